//! Multivariate polynomials over Q in a fixed number of variables.

use crate::rational::{pow_rat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn monomial(powers: Vec<u32>, c: Rat) -> Self {
        let mut p = Self::zero(powers.len());
        p.add_term(powers, c);
        p
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    /// `sum_i coeffs[i] x_i + constant`.
    pub fn affine(coeffs: &[Rat], constant: &Rat) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant.clone());
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, powers: Vec<u32>, c: Rat) {
        debug_assert_eq!(powers.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(powers.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&powers);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, (e, c)| {
            let m = e.iter().zip(x).fold(c.clone(), |m, (k, xi)| m * pow_rat(xi, *k));
            acc + m
        })
    }

    /// Compose with variables given as polynomials in a new variable set.
    pub fn compose(&self, images: &[Poly], new_nvars: usize) -> Self {
        debug_assert_eq!(images.len(), self.nvars);
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(new_nvars), p.clone()]).collect();
        let mut out = Self::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut m = Self::constant(new_nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                m = m.mul(&cache[i][k as usize]);
            }
            out = out.add(&m);
        }
        out
    }

    /// Compose with the affine substitution `x = a y + b` (`a` is nvars x new_nvars).
    pub fn compose_affine(&self, a: &[Vec<Rat>], b: &[Rat], new_nvars: usize) -> Self {
        let images: Vec<Poly> = a.iter().zip(b).map(|(row, bi)| Poly::affine(row, bi)).collect();
        if images.is_empty() {
            return Self { nvars: new_nvars, terms: self.terms.iter().map(|(_, c)| (vec![0; new_nvars], c.clone())).collect() };
        }
        self.compose(&images, new_nvars)
    }

    /// Collect as a polynomial in `x_var` with coefficients free of it.
    pub fn by_power_of(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[var], 0);
            out.entry(k).or_insert_with(|| Poly::zero(self.nvars)).add_term(e2, c.clone());
        }
        out
    }

    /// Drop variable `var`, which must not occur.
    pub fn remove_var(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            debug_assert_eq!(e[var], 0);
            let mut e2 = e.clone();
            e2.remove(var);
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Reorder or embed variables: old variable i becomes new variable `map[i]`.
    pub fn relabel(&self, map: &[usize], new_nvars: usize) -> Self {
        let mut out = Self::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_nvars];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }
}
