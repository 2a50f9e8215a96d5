//! Exponential-polynomial densities `sum c x^a e^{<lambda, x> + s}` and their exact
//! integrals over rational simplicial cones.

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Poly;
use crate::rational::{dot, factorial, int_rat, pow_rat, primitive, serde_rat, serde_rat_vec, to_f64, Rat};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One term `coeff * x^powers * exp(<linform, x> + shift)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpPolyTerm {
    #[serde(with = "serde_rat")]
    pub coeff: Rat,
    pub powers: Vec<u32>,
    #[serde(with = "serde_rat_vec")]
    pub linform: Vec<Rat>,
    #[serde(with = "serde_rat", default = "Rat::zero", skip_serializing_if = "Rat::is_zero")]
    pub shift: Rat,
}

/// Canonical sum of terms, grouped by exponential.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExpPolyDensity {
    nvars: usize,
    parts: BTreeMap<(Vec<Rat>, Rat), Poly>,
}

/// Integration bound for `eliminate_variable`: affine in the remaining variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    PosInf,
    Affine { coeffs: Vec<Rat>, constant: Rat },
}

impl Bound {
    pub fn linear(coeffs: Vec<Rat>) -> Self {
        Bound::Affine { coeffs, constant: Rat::zero() }
    }

    pub fn zero(n: usize) -> Self {
        Bound::linear(vec![Rat::zero(); n])
    }
}

impl ExpPolyDensity {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, parts: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::from_poly(Poly::constant(nvars, c))
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        let mut d = Self::zero(n);
        d.add_part(vec![Rat::zero(); n], Rat::zero(), p);
        d
    }

    /// `exp(<linform, x>)`.
    pub fn exp(linform: Vec<Rat>) -> Self {
        let n = linform.len();
        let mut d = Self::zero(n);
        d.add_part(linform, Rat::zero(), Poly::one(n));
        d
    }

    pub fn from_terms(nvars: usize, terms: &[ExpPolyTerm]) -> Result<Self> {
        let mut d = Self::zero(nvars);
        for t in terms {
            if t.powers.len() != nvars || t.linform.len() != nvars {
                return Err(Error::invalid(format!("density term has wrong arity (expected {nvars})")));
            }
            d.add_part(t.linform.clone(), t.shift.clone(), Poly::monomial(t.powers.clone(), t.coeff.clone()));
        }
        Ok(d)
    }

    pub fn terms(&self) -> Vec<ExpPolyTerm> {
        let mut out = Vec::new();
        for ((lf, s), p) in &self.parts {
            for (e, c) in p.terms() {
                out.push(ExpPolyTerm { coeff: c.clone(), powers: e.clone(), linform: lf.clone(), shift: s.clone() });
            }
        }
        out
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Vec<Rat>, &Rat, &Poly)> {
        self.parts.iter().map(|((l, s), p)| (l, s, p))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add_part(&mut self, linform: Vec<Rat>, shift: Rat, p: Poly) {
        if p.is_zero() {
            return;
        }
        let key = (linform, shift);
        let merged = match self.parts.remove(&key) {
            Some(q) => q.add(&p),
            None => p,
        };
        if !merged.is_zero() {
            self.parts.insert(key, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, s), p) in &other.parts {
            out.add_part(l.clone(), s.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for ((l, s), p) in &self.parts {
            out.add_part(l.clone(), s.clone(), p.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for ((l1, s1), p1) in &self.parts {
            for ((l2, s2), p2) in &other.parts {
                let l: Vec<Rat> = l1.iter().zip(l2).map(|(a, b)| a + b).collect();
                out.add_part(l, s1 + s2, p1.mul(p2));
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.mul(&Self::from_poly(p.clone()))
    }

    /// Multiply by `exp(<mu, x>)`.
    pub fn mul_exp(&self, mu: &[Rat]) -> Self {
        let mut out = Self::zero(self.nvars);
        for ((l, s), p) in &self.parts {
            let l2 = l.iter().zip(mu).map(|(a, b)| a + b).collect();
            out.add_part(l2, s.clone(), p.clone());
        }
        out
    }

    /// Substitute `x = a y + b` with `a` of shape nvars x new_nvars.
    pub fn compose_affine(&self, a: &[Vec<Rat>], b: &[Rat], new_nvars: usize) -> Self {
        let mut out = Self::zero(new_nvars);
        for ((l, s), p) in &self.parts {
            let l2: Vec<Rat> = (0..new_nvars).map(|j| l.iter().zip(a).fold(Rat::zero(), |acc, (li, row)| acc + li * &row[j])).collect();
            let s2 = s + dot(l, b);
            out.add_part(l2, s2, p.compose_affine(a, b, new_nvars));
        }
        out
    }

    pub fn compose_linear(&self, a: &[Vec<Rat>], new_nvars: usize) -> Self {
        self.compose_affine(a, &vec![Rat::zero(); self.nvars], new_nvars)
    }

    /// Whether every exponential is free of constant shifts.
    pub fn is_linear(&self) -> bool {
        self.parts.keys().all(|(_, s)| s.is_zero())
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for ((l, s), p) in &self.parts {
            let e: f64 = l.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>() + to_f64(s);
            let pv: f64 = p
                .terms()
                .map(|(pw, c)| to_f64(c) * pw.iter().zip(x).map(|(k, xi)| xi.powi(*k as i32)).product::<f64>())
                .sum();
            total += pv * e.exp();
        }
        total
    }

    /// Value at a point when no exponential is present there (all linforms vanish on it).
    pub fn eval_at_origin(&self) -> Result<Rat> {
        let zero = vec![Rat::zero(); self.nvars];
        let mut total = Rat::zero();
        for ((_, s), p) in &self.parts {
            if !s.is_zero() {
                return Err(Error::NotRational("exponential of a nonzero constant".into()));
            }
            total += p.eval(&zero);
        }
        Ok(total)
    }
}

/// `∫_cone f dν` for the lattice-normalized measure on the span of the cone:
/// with primitive generators `G`, `ν = index(G) dt` under `x = G t`.
pub fn integrate_cone(f: &ExpPolyDensity, gens: &[Vec<Rat>]) -> Result<Rat> {
    let n = f.nvars();
    let r = gens.len();
    if r == 0 {
        return f.eval_at_origin();
    }
    let g: Vec<Vec<num_bigint::BigInt>> = gens.iter().map(|v| primitive(v)).collect();
    let gr: Vec<Vec<Rat>> = g.iter().map(|v| v.iter().map(int_rat).collect()).collect();
    if linalg::rank(&gr, n) != r {
        return Err(Error::invalid("cone generators are not linearly independent"));
    }
    let index = int_rat(&linalg::lattice_index(&g, n));
    // x = G t: column j of the substitution matrix is generator j.
    let a: Vec<Vec<Rat>> = (0..n).map(|i| gr.iter().map(|v| v[i].clone()).collect()).collect();
    let mut total = Rat::zero();
    for ((l, s), p) in &f.parts {
        if !s.is_zero() {
            return Err(Error::NotRational("exponential of a nonzero constant".into()));
        }
        let mu: Vec<Rat> = gr.iter().map(|v| dot(l, v)).collect();
        if let Some(j) = mu.iter().position(|m| !m.is_negative()) {
            return Err(Error::NonConvergent(format!("exponent pairs to {} with generator {j}", mu[j])));
        }
        let pt = p.compose_affine(&a, &vec![Rat::zero(); n], r);
        for (alpha, c) in pt.terms() {
            let mut v = c.clone();
            for (k, m) in alpha.iter().zip(&mu) {
                v *= int_rat(&factorial(*k)) / pow_rat(&-m.clone(), k + 1);
            }
            total += v;
        }
    }
    Ok(total * index)
}

/// Integrate out variable `var` between two bounds affine in the remaining variables;
/// the result lives on the remaining `nvars - 1` variables.
pub fn eliminate_variable(f: &ExpPolyDensity, var: usize, lower: &Bound, upper: &Bound) -> Result<ExpPolyDensity> {
    let n = f.nvars();
    let m = n - 1;
    let mut out = ExpPolyDensity::zero(m);
    for ((l, s), p) in &f.parts {
        let lk = &l[var];
        let mut lrest = l.clone();
        lrest.remove(var);
        for (k, q) in p.by_power_of(var) {
            let q = q.remove_var(var);
            let up = antiderivative_at(k, lk, upper, m)?;
            let lo = antiderivative_at(k, lk, lower, m)?;
            for part in [up, lo.scale(&-Rat::one())] {
                let d = part.mul_exp(&lrest).mul_poly(&q);
                for ((l2, s2), p2) in d.parts {
                    out.add_part(l2, s2 + s, p2);
                }
            }
        }
    }
    Ok(out)
}

/// `F(b)` where `F(x) = ∫ x^k e^{λ x} dx`, as a density in the remaining variables.
fn antiderivative_at(k: u32, lambda: &Rat, b: &Bound, m: usize) -> Result<ExpPolyDensity> {
    match b {
        Bound::PosInf | Bound::NegInf => {
            let decays = if *b == Bound::PosInf { lambda.is_negative() } else { lambda.is_positive() };
            if decays {
                Ok(ExpPolyDensity::zero(m))
            } else if lambda.is_zero() {
                Err(Error::NonIntegrable("polynomial integrand over an unbounded interval".into()))
            } else {
                Err(Error::NonConvergent("exponential grows along an unbounded interval".into()))
            }
        }
        Bound::Affine { coeffs, constant } => {
            let x = Poly::affine(coeffs, constant);
            if lambda.is_zero() {
                let p = x.pow(k + 1).scale(&Rat::new(1.into(), (k + 1).into()));
                return Ok(ExpPolyDensity::from_poly(p));
            }
            let mut p = Poly::zero(m);
            for j in 0..=k {
                let num = int_rat(&(factorial(k) / factorial(k - j)));
                let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
                let c = sign * num / pow_rat(lambda, j + 1);
                p = p.add(&x.pow(k - j).scale(&c));
            }
            let mut d = ExpPolyDensity::zero(m);
            let lf: Vec<Rat> = coeffs.iter().map(|c| c * lambda).collect();
            d.add_part(lf, lambda * constant, p);
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn area_weighted_examples() {
        let f = ExpPolyDensity::exp(v(&[-1, -1]));
        assert_eq!(integrate_cone(&f, &[v(&[1, 1]), v(&[1, 0])]).unwrap(), ratio(1, 2));
        // x e^{-2x} on the half line
        let g = ExpPolyDensity::from_terms(1, &[ExpPolyTerm { coeff: rat(1), powers: vec![1], linform: v(&[-2]), shift: rat(0) }]).unwrap();
        assert_eq!(integrate_cone(&g, &[v(&[1])]).unwrap(), ratio(1, 4));
        assert!(matches!(integrate_cone(&ExpPolyDensity::exp(v(&[1, -1])), &[v(&[1, 0]), v(&[0, 1])]), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn lower_dimensional_cone_uses_lattice_measure() {
        // The diagonal ray (1,1): ν = dt along t(1,1); ∫ e^{-2t} dt = 1/2.
        let f = ExpPolyDensity::exp(v(&[-1, -1]));
        assert_eq!(integrate_cone(&f, &[v(&[1, 1])]).unwrap(), ratio(1, 2));
        // Scaling the generator does not change the measure.
        assert_eq!(integrate_cone(&f, &[v(&[3, 3])]).unwrap(), ratio(1, 2));
        // Zero-dimensional cone: evaluation at the origin.
        assert_eq!(integrate_cone(&ExpPolyDensity::constant(2, rat(5)), &[]).unwrap(), rat(5));
    }

    #[test]
    fn eliminate_examples() {
        // ∫_0^∞ x e^{-2x} dx = 1/4
        let g = ExpPolyDensity::from_terms(1, &[ExpPolyTerm { coeff: rat(1), powers: vec![1], linform: v(&[-2]), shift: rat(0) }]).unwrap();
        let r = eliminate_variable(&g, 0, &Bound::zero(0), &Bound::PosInf).unwrap();
        assert_eq!(r.eval_at_origin().unwrap(), ratio(1, 4));
        assert!(matches!(eliminate_variable(&ExpPolyDensity::one(1), 0, &Bound::zero(0), &Bound::PosInf), Err(Error::NonIntegrable(_))));
        // ∫_0^y e^{-x} dx = 1 - e^{-y}
        let f = ExpPolyDensity::exp(v(&[-1, 0]));
        let r = eliminate_variable(&f, 0, &Bound::zero(1), &Bound::linear(v(&[1]))).unwrap();
        let expect = ExpPolyDensity::one(1).sub(&ExpPolyDensity::exp(v(&[-1])));
        assert_eq!(r, expect);
    }

    /// Iterated elimination over the cone {0 <= y <= x} must agree with integrate_cone.
    fn iterated(f: &ExpPolyDensity) -> Result<Rat> {
        // inner: y from 0 to x (y is variable 1), then x from 0 to ∞
        let inner = eliminate_variable(f, 1, &Bound::zero(1), &Bound::linear(v(&[1])))?;
        let outer = eliminate_variable(&inner, 0, &Bound::zero(0), &Bound::PosInf)?;
        outer.eval_at_origin()
    }

    proptest! {
        #[test]
        fn closed_form_matches_iterated_integration(
            a in 1i64..5, b in 0i64..4, p in 0u32..3, q in 0u32..3, c in -3i64..4,
        ) {
            // density c x^p y^q e^{-a x - b y} on cone((1,0),(1,1))
            let f = ExpPolyDensity::from_terms(2, &[ExpPolyTerm { coeff: rat(c), powers: vec![p, q], linform: v(&[-a, -b]), shift: rat(0) }]).unwrap();
            let closed = integrate_cone(&f, &[v(&[1, 0]), v(&[1, 1])]).unwrap();
            prop_assert_eq!(closed, iterated(&f).unwrap());
        }

        #[test]
        fn triangulation_independence(a in 1i64..4, b in 1i64..4, p in 0u32..3) {
            // Integral over the quadrant equals the sum over either split by the diagonal.
            let f = ExpPolyDensity::from_terms(2, &[ExpPolyTerm { coeff: rat(1), powers: vec![p, 0], linform: v(&[-a, -b]), shift: rat(0) }]).unwrap();
            let whole = integrate_cone(&f, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
            let split = integrate_cone(&f, &[v(&[1, 0]), v(&[1, 1])]).unwrap() + integrate_cone(&f, &[v(&[1, 1]), v(&[0, 1])]).unwrap();
            prop_assert_eq!(whole.clone(), split);
            let split2 = integrate_cone(&f, &[v(&[1, 0]), v(&[1, 2])]).unwrap() + integrate_cone(&f, &[v(&[1, 2]), v(&[0, 1])]).unwrap();
            prop_assert_eq!(whole, split2);
        }
    }
}
