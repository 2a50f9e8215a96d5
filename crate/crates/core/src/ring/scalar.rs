use super::laurent::LaurentPoly;
use crate::error::{Error, Result};
use crate::rational::{int_rat, Rat};
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element of `A = Z[L, L^-1, 1/(1 - L^-i)]` (with rational numerators): a Laurent
/// numerator over a product of factors `(1 - L^-i)`, the denominator stored as a
/// multiset `i -> multiplicity`.
#[derive(Clone, Debug, Default)]
pub struct AtomicScalar {
    num: LaurentPoly,
    den: BTreeMap<u32, u32>,
}

/// `1 - L^-i`.
fn den_factor(i: u32) -> LaurentPoly {
    LaurentPoly::one() - LaurentPoly::l_pow(-(i as i64))
}

fn den_product(den: &BTreeMap<u32, u32>) -> LaurentPoly {
    den.iter().fold(LaurentPoly::one(), |acc, (&i, &m)| &acc * &den_factor(i).pow(m))
}

impl AtomicScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        Self { num, den: BTreeMap::new() }
    }

    pub fn new(num: LaurentPoly, den: BTreeMap<u32, u32>) -> Self {
        let den = den.into_iter().filter(|(_, m)| *m > 0).collect();
        Self { num, den }
    }

    /// Build from a numerator and a list of denominator indices (repeats allowed).
    pub fn with_denominators(num: LaurentPoly, idx: &[u32]) -> Self {
        let mut den = BTreeMap::new();
        for &i in idx {
            assert!(i >= 1, "denominator index must be at least 1");
            *den.entry(i).or_insert(0) += 1;
        }
        Self { num, den }
    }

    pub fn l_pow(k: i64) -> Self {
        Self::from_poly(LaurentPoly::l_pow(k))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<u32, u32> {
        &self.den
    }

    /// Denominator indices with repetition, ascending.
    pub fn denominator_list(&self) -> Vec<u32> {
        self.den.iter().flat_map(|(&i, &m)| std::iter::repeat(i).take(m as usize)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn rescale_to(&self, den: &BTreeMap<u32, u32>) -> LaurentPoly {
        let mut extra = BTreeMap::new();
        for (&i, &m) in den {
            let have = self.den.get(&i).copied().unwrap_or(0);
            extra.insert(i, m - have);
        }
        &self.num * &den_product(&extra)
    }

    fn lcm_den(&self, other: &Self) -> BTreeMap<u32, u32> {
        let mut den = self.den.clone();
        for (&i, &m) in &other.den {
            let e = den.entry(i).or_insert(0);
            *e = (*e).max(m);
        }
        den
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Divide out every denominator factor that divides the numerator exactly.
    pub fn reduce(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let keys: Vec<u32> = den.keys().rev().copied().collect();
        for i in keys {
            while den.get(&i).copied().unwrap_or(0) > 0 {
                // (1 - L^-i) = L^-i (L^i - 1)
                match num.div_l_pow_minus_one(i as i64) {
                    Some(q) => {
                        num = q.shift(i as i64);
                        let m = den.get_mut(&i).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            den.remove(&i);
                        }
                    }
                    None => break,
                }
            }
        }
        Self { num, den }
    }

    /// Point-count specialization `L -> q`, for rational `q > 1`.
    pub fn theta_q(&self, q: &Rat) -> Result<Rat> {
        if *q <= Rat::one() {
            return Err(Error::invalid("point-count specialization needs q > 1"));
        }
        let d = den_product(&self.den).eval(q);
        Ok(self.num.eval(q) / d)
    }

    /// Value at `L = 1`. Each factor `(1 - L^-i)` contributes `i (L - 1)` to leading
    /// order, so the numerator must vanish to the full order of the denominator.
    pub fn limit_l1(&self) -> Result<Rat> {
        let k: u32 = self.den.values().sum();
        let mut num = self.num.clone();
        for _ in 0..k {
            num = num.div_l_minus_one().ok_or(Error::PoleAtOne)?;
        }
        let scale = self
            .den
            .iter()
            .fold(Rat::one(), |acc, (&i, &m)| acc * num_traits::pow(int_rat(&i.into()), m as usize));
        Ok(num.eval_one() / scale)
    }
}

/// Closed form of `sum_{n >= 1} n^p L^{c n}` for `c <= -1`.
pub fn poly_sum(p: u32, c: i64) -> Result<AtomicScalar> {
    if c >= 0 {
        return Err(Error::NonConvergent(format!("geometric ratio L^{c} does not decay")));
    }
    // Work in t = L^c: start from t/(1-t) and apply t d/dt p times,
    // N/(1-t)^k -> t (N'(1-t) + k N) / (1-t)^(k+1).
    let t = LaurentPoly::l_pow(1);
    let one_minus_t = LaurentPoly::one() - t.clone();
    let mut n = t.clone();
    let mut k = 1u32;
    for _ in 0..p {
        let deriv = LaurentPoly::from_terms(
            n.terms().filter(|(e, _)| *e != 0).map(|(e, c)| (e - 1, c * Rat::from_integer(e.into()))),
        );
        let inner = &deriv * &one_minus_t + n.scale(&Rat::from_integer(k.into()));
        n = &t * &inner;
        k += 1;
    }
    let num = n.compose_power(c);
    let idx = vec![c.unsigned_abs() as u32; k as usize];
    Ok(AtomicScalar::with_denominators(num, &idx))
}

/// `sum_{n >= 0} n^p L^{c n}`, i.e. `poly_sum` plus the `n = 0` term.
pub fn poly_sum_from_zero(p: u32, c: i64) -> Result<AtomicScalar> {
    let s = poly_sum(p, c)?;
    Ok(if p == 0 { s + AtomicScalar::one() } else { s })
}

impl PartialEq for AtomicScalar {
    fn eq(&self, other: &Self) -> bool {
        let den = self.lcm_den(other);
        self.rescale_to(&den) == other.rescale_to(&den)
    }
}

impl Add for &AtomicScalar {
    type Output = AtomicScalar;
    fn add(self, rhs: &AtomicScalar) -> AtomicScalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let den = self.lcm_den(rhs);
        let num = self.rescale_to(&den) + rhs.rescale_to(&den);
        AtomicScalar { num, den }
    }
}

impl Add for AtomicScalar {
    type Output = AtomicScalar;
    fn add(self, rhs: AtomicScalar) -> AtomicScalar {
        &self + &rhs
    }
}

impl Neg for AtomicScalar {
    type Output = AtomicScalar;
    fn neg(self) -> AtomicScalar {
        AtomicScalar { num: -self.num, den: self.den }
    }
}

impl Sub for AtomicScalar {
    type Output = AtomicScalar;
    fn sub(self, rhs: AtomicScalar) -> AtomicScalar {
        self + (-rhs)
    }
}

impl Mul for &AtomicScalar {
    type Output = AtomicScalar;
    fn mul(self, rhs: &AtomicScalar) -> AtomicScalar {
        if self.is_zero() || rhs.is_zero() {
            return AtomicScalar::zero();
        }
        let mut den = self.den.clone();
        for (&i, &m) in &rhs.den {
            *den.entry(i).or_insert(0) += m;
        }
        AtomicScalar { num: &self.num * &rhs.num, den }
    }
}

impl Mul for AtomicScalar {
    type Output = AtomicScalar;
    fn mul(self, rhs: AtomicScalar) -> AtomicScalar {
        &self * &rhs
    }
}

impl fmt::Display for AtomicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduce();
        if r.den.is_empty() {
            return write!(f, "{}", r.num);
        }
        write!(f, "({}) / ", r.num)?;
        for (i, m) in &r.den {
            for _ in 0..*m {
                write!(f, "(1 - L^-{i})")?;
            }
        }
        Ok(())
    }
}
