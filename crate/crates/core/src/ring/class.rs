use super::laurent::LaurentPoly;
use super::scalar::AtomicScalar;
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Name of an opaque Grothendieck class such as `U` or `D1o`.
pub type ClassSymbol = String;

/// Commutative product of class symbols; the empty product is the unit `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassMonomial(Vec<ClassSymbol>);

impl ClassMonomial {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn symbol(s: impl Into<String>) -> Self {
        Self(vec![s.into()])
    }

    pub fn from_symbols(mut v: Vec<ClassSymbol>) -> Self {
        v.sort();
        Self(v)
    }

    pub fn symbols(&self) -> &[ClassSymbol] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Self::from_symbols(v)
    }
}

impl fmt::Display for ClassMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.0.join("·"))
        }
    }
}

/// Coefficient rings for class combinations.
pub trait Coeff: Clone + fmt::Debug + PartialEq {
    fn zero_c() -> Self;
    fn one_c() -> Self;
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, other: &Self) -> Self;
    fn mul_c(&self, other: &Self) -> Self;
    fn neg_c(&self) -> Self;
}

impl Coeff for Rat {
    fn zero_c() -> Self {
        Rat::zero()
    }
    fn one_c() -> Self {
        Rat::one()
    }
    fn is_zero_c(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self.clone()
    }
}

impl Coeff for AtomicScalar {
    fn zero_c() -> Self {
        AtomicScalar::zero()
    }
    fn one_c() -> Self {
        AtomicScalar::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self.clone()
    }
}

/// Finite combination `sum c_m [m]` of class monomials.
#[derive(Clone, Debug)]
pub struct Combination<C: Coeff> {
    terms: BTreeMap<ClassMonomial, C>,
}

/// Classes after specialization at `L = 1`: rational combinations of symbols.
pub type MotClass = Combination<Rat>;
/// Classes in the atomic ring: coefficients in `A`.
pub type AtomicClass = Combination<AtomicScalar>;

impl<C: Coeff> Default for Combination<C> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Combination<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::term(ClassMonomial::unit(), C::one_c())
    }

    pub fn scalar(c: C) -> Self {
        Self::term(ClassMonomial::unit(), c)
    }

    pub fn symbol(s: impl Into<String>) -> Self {
        Self::term(ClassMonomial::symbol(s), C::one_c())
    }

    pub fn term(m: ClassMonomial, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    pub fn add_term(&mut self, m: ClassMonomial, c: C) {
        if c.is_zero_c() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e = e.add_c(&c);
                if e.is_zero_c() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ClassMonomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &ClassMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero_c)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul_c(c));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Combination<D> {
        let mut out = Combination::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), f(x));
        }
        out
    }

    pub fn try_map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Combination<D>> {
        let mut out = Combination::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), f(x)?);
        }
        Ok(out)
    }

    /// Replace symbols by the given classes (symbols not in the map are kept).
    pub fn substitute(&self, rules: &HashMap<ClassSymbol, Combination<C>>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Self::scalar(c.clone());
            for s in m.symbols() {
                let f = rules.get(s).cloned().unwrap_or_else(|| Self::symbol(s.clone()));
                acc = &acc * &f;
            }
            out = out + acc;
        }
        out
    }

    /// Rename symbols (a ring homomorphism on monomials).
    pub fn rename(&self, map: &BTreeMap<ClassSymbol, ClassSymbol>) -> Self {
        if map.is_empty() {
            return self.clone();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let syms = m.symbols().iter().map(|s| map.get(s).cloned().unwrap_or_else(|| s.clone())).collect();
            out.add_term(ClassMonomial::from_symbols(syms), c.clone());
        }
        out
    }

    pub fn symbols(&self) -> impl Iterator<Item = &ClassSymbol> {
        self.terms.keys().flat_map(|m| m.symbols().iter())
    }
}

impl<C: Coeff> PartialEq for Combination<C> {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

impl<C: Coeff> Add for Combination<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<C: Coeff> Add for &Combination<C> {
    type Output = Combination<C>;
    fn add(self, rhs: Self) -> Combination<C> {
        self.clone() + rhs.clone()
    }
}

impl<C: Coeff> Neg for Combination<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map_coeffs(|c| c.neg_c())
    }
}

impl<C: Coeff> Sub for Combination<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<C: Coeff> Mul for &Combination<C> {
    type Output = Combination<C>;
    fn mul(self, rhs: Self) -> Combination<C> {
        let mut out = Combination::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.mul_c(c2));
            }
        }
        out
    }
}

impl<C: Coeff> Mul for Combination<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<C: Coeff> std::iter::Sum for Combination<C> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl MotClass {
    pub fn rational(c: Rat) -> Self {
        Self::scalar(c)
    }

    /// Substitute Euler characteristics for symbols.
    pub fn chi_specialize(&self, table: &BTreeMap<ClassSymbol, Rat>) -> Result<Rat> {
        let mut total = Rat::zero();
        for (m, c) in self.terms() {
            let mut v = c.clone();
            for s in m.symbols() {
                v *= table.get(s).ok_or_else(|| Error::MissingSymbol(s.clone()))?;
            }
            total += v;
        }
        Ok(total)
    }

    /// Lift to the atomic ring with constant coefficients.
    pub fn to_atomic(&self) -> AtomicClass {
        self.map_coeffs(|c| AtomicScalar::from_rat(c.clone()))
    }
}

impl AtomicClass {
    pub fn poly(p: LaurentPoly) -> Self {
        Self::scalar(AtomicScalar::from_poly(p))
    }

    pub fn limit_l1(&self) -> Result<MotClass> {
        self.try_map_coeffs(|c| c.limit_l1())
    }

    pub fn theta_q(&self, q: &Rat) -> Result<MotClass> {
        self.try_map_coeffs(|c| c.theta_q(q))
    }

    pub fn reduce(&self) -> Self {
        self.map_coeffs(|c| c.reduce())
    }
}

/// Rendering order for monomials: known symbols by rank, then the rest by name.
#[derive(Clone, Debug, Default)]
pub struct ClassOrder {
    rank: HashMap<ClassSymbol, usize>,
}

impl ClassOrder {
    pub fn new(symbols: impl IntoIterator<Item = ClassSymbol>) -> Self {
        let mut rank = HashMap::new();
        for s in symbols {
            let n = rank.len();
            rank.entry(s).or_insert(n);
        }
        Self { rank }
    }

    fn key(&self, m: &ClassMonomial) -> (usize, Vec<(usize, String)>) {
        let mut v: Vec<(usize, String)> =
            m.symbols().iter().map(|s| (self.rank.get(s).copied().unwrap_or(usize::MAX), s.clone())).collect();
        v.sort();
        (m.symbols().len(), v)
    }

    fn sorted<'a, C: Coeff>(&self, c: &'a Combination<C>) -> Vec<(&'a ClassMonomial, &'a C)> {
        let mut v: Vec<_> = c.terms().collect();
        v.sort_by(|a, b| {
            let (ka, kb) = (self.key(a.0), self.key(b.0));
            (ka.1.clone(), ka.0).cmp(&(kb.1.clone(), kb.0))
        });
        v
    }

    pub fn render_mot(&self, c: &MotClass) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, x)) in self.sorted(c).into_iter().enumerate() {
            let neg = x.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = x.abs();
            if m.is_unit() {
                out.push_str(&fmt_rat(&a));
            } else if a.is_one() {
                out.push_str(&format!("[{m}]"));
            } else {
                out.push_str(&format!("{}·[{m}]", fmt_rat(&a)));
            }
        }
        out
    }

    pub fn render_atomic(&self, c: &AtomicClass) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .sorted(c)
            .into_iter()
            .map(|(m, x)| {
                let num = x.numerator();
                if x.denominator().is_empty() && num.min_exp() == Some(0) && num.max_exp() == Some(0) {
                    let c = num.coeff(0);
                    return match (m.is_unit(), c.is_one()) {
                        (true, _) => fmt_rat(&c),
                        (false, true) => format!("[{m}]"),
                        (false, false) => format!("{}·[{m}]", fmt_rat(&c)),
                    };
                }
                let s = x.to_string();
                if m.is_unit() {
                    format!("({s})")
                } else {
                    format!("({s})·[{m}]")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for MotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ClassOrder::default().render_mot(self))
    }
}

impl fmt::Display for AtomicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ClassOrder::default().render_atomic(self))
    }
}
