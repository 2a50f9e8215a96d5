use crate::rational::{fmt_rat, pow_rat, rat, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Laurent polynomial in the Lefschetz variable `L` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `L^k`.
    pub fn l_pow(k: i64) -> Self {
        Self::monomial(k, Rat::one())
    }

    /// `(L - 1)^k`.
    pub fn l_minus_one_pow(k: u32) -> Self {
        let base = Self::l_pow(1) - Self::one();
        (0..k).fold(Self::one(), |acc, _| &acc * &base)
    }

    /// `1 + L + ... + L^m`, the class of projective m-space (zero for m = -1).
    pub fn projective(m: i64) -> Self {
        (0..=m).fold(Self::zero(), |acc, k| acc + Self::l_pow(k))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, Rat)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exp).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> Rat {
        self.terms.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Substitute `L -> L^c`.
    pub fn compose_power(&self, c: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (e * c, x.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Value at `L = q` (q nonzero).
    pub fn eval(&self, q: &Rat) -> Rat {
        self.terms.iter().fold(Rat::zero(), |acc, (e, c)| {
            let p = pow_rat(q, e.unsigned_abs() as u32);
            let v = if *e >= 0 { p } else { p.recip() };
            acc + c * v
        })
    }

    pub fn eval_one(&self) -> Rat {
        self.terms.values().fold(Rat::zero(), |acc, c| acc + c)
    }

    /// Exact quotient by the polynomial `L^i - 1`, if it divides.
    pub fn div_l_pow_minus_one(&self, i: i64) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        assert!(i > 0);
        // Long division from the top: p = (L^i - 1) q.
        let mut rem = self.clone();
        let mut q = Self::zero();
        let lo = self.min_exp().unwrap();
        while let Some(top) = rem.max_exp() {
            if top - i < lo {
                return None;
            }
            let c = rem.coeff(top);
            q.add_term(top - i, c.clone());
            rem.add_term(top, -c.clone());
            rem.add_term(top - i, c);
        }
        Some(q)
    }

    /// Exact quotient by `L - 1`.
    pub fn div_l_minus_one(&self) -> Option<Self> {
        self.div_l_pow_minus_one(1)
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        self + (-rhs)
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        Self { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let var = match e {
                0 => String::new(),
                1 => "L".to_string(),
                _ => format!("L^{e}"),
            };
            if var.is_empty() {
                write!(f, "{}", fmt_rat(&a))?;
            } else if a == rat(1) {
                write!(f, "{var}")?;
            } else {
                write!(f, "{}·{var}", fmt_rat(&a))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn projective_classes() {
        assert_eq!(LaurentPoly::projective(-1), LaurentPoly::zero());
        assert_eq!(LaurentPoly::projective(0), LaurentPoly::one());
        assert_eq!(LaurentPoly::projective(2).eval(&rat(2)), rat(7));
    }

    #[test]
    fn division_by_cyclotomic_factors() {
        let p = LaurentPoly::l_pow(3) - LaurentPoly::l_pow(-1);
        // L^3 - L^-1 = L^-1 (L^4 - 1) = (L^2 - 1)(L + L^-1)
        let q = p.div_l_pow_minus_one(2).unwrap();
        assert_eq!(q, LaurentPoly::l_pow(1) + LaurentPoly::l_pow(-1));
        assert!(LaurentPoly::l_pow(2).div_l_minus_one().is_none());
        assert_eq!(
            LaurentPoly::l_minus_one_pow(3).div_l_minus_one().unwrap(),
            LaurentPoly::l_minus_one_pow(2)
        );
    }

    #[test]
    fn evaluation() {
        let p = LaurentPoly::from_terms([(-1, rat(1)), (2, ratio(1, 2))]);
        assert_eq!(p.eval(&rat(2)), ratio(5, 2));
        assert_eq!(p.eval_one(), ratio(3, 2));
        assert_eq!(p.to_string(), "1/2·L^2 + L^-1");
    }
}
