//! JSON encodings: a bare string is a single symbol (`"1"` is the unit), otherwise
//! `{"terms": [...]}` with rationals written as `"p/q"`.

use super::{AtomicClass, AtomicScalar, ClassMonomial, LaurentPoly, MotClass};
use crate::rational::{fmt_rat, serde_rat, Rat};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

fn monomial_of(s: &str) -> ClassMonomial {
    if s == "1" {
        ClassMonomial::unit()
    } else {
        ClassMonomial::symbol(s)
    }
}

#[derive(Serialize, Deserialize)]
struct MotTerm {
    monomial: Vec<String>,
    #[serde(with = "serde_rat")]
    coeff: Rat,
}

#[derive(Serialize, Deserialize)]
struct MotTerms {
    terms: Vec<MotTerm>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MotRepr {
    Symbol(String),
    Terms(MotTerms),
}

impl Serialize for MotClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .map(|(m, c)| MotTerm { monomial: m.symbols().to_vec(), coeff: c.clone() })
            .collect();
        MotTerms { terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MotClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match MotRepr::deserialize(d)? {
            MotRepr::Symbol(s) => MotClass::term(monomial_of(&s), Rat::from_integer(1.into())),
            MotRepr::Terms(t) => {
                let mut out = MotClass::zero();
                for term in t.terms {
                    out.add_term(ClassMonomial::from_symbols(term.monomial), term.coeff);
                }
                out
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AtomicTermRepr {
    monomial: Vec<String>,
    /// Exponent of `L` (as a string key) to coefficient.
    num: BTreeMap<String, String>,
    #[serde(default)]
    den: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct AtomicTerms {
    terms: Vec<AtomicTermRepr>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AtomicRepr {
    Symbol(String),
    Terms(AtomicTerms),
}

pub fn scalar_to_parts(x: &AtomicScalar) -> (BTreeMap<String, String>, Vec<u32>) {
    let num = x.numerator().terms().map(|(e, c)| (e.to_string(), fmt_rat(c))).collect();
    (num, x.denominator_list())
}

pub fn scalar_from_parts(num: &BTreeMap<String, String>, den: &[u32]) -> crate::error::Result<AtomicScalar> {
    let mut p = LaurentPoly::zero();
    for (e, c) in num {
        let e: i64 = e.trim().parse().map_err(|_| crate::error::Error::Parse(format!("bad exponent `{e}`")))?;
        p.add_term(e, crate::rational::parse_rat(c)?);
    }
    if den.contains(&0) {
        return Err(crate::error::Error::Parse("denominator index must be at least 1".into()));
    }
    Ok(AtomicScalar::with_denominators(p, den))
}

impl Serialize for AtomicClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .map(|(m, c)| {
                let (num, den) = scalar_to_parts(c);
                AtomicTermRepr { monomial: m.symbols().to_vec(), num, den }
            })
            .collect();
        AtomicTerms { terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AtomicClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match AtomicRepr::deserialize(d)? {
            AtomicRepr::Symbol(s) => AtomicClass::term(monomial_of(&s), AtomicScalar::one()),
            AtomicRepr::Terms(t) => {
                let mut out = AtomicClass::zero();
                for term in t.terms {
                    let c = scalar_from_parts(&term.num, &term.den).map_err(de::Error::custom)?;
                    out.add_term(ClassMonomial::from_symbols(term.monomial), c);
                }
                out
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn mot_round_trip() {
        let c = MotClass::symbol("U") + MotClass::symbol("D1o").scale(&ratio(1, 2));
        let j = serde_json::to_string(&c).unwrap();
        let back: MotClass = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), j);
        let s: MotClass = serde_json::from_str("\"U\"").unwrap();
        assert_eq!(s, MotClass::symbol("U"));
    }

    #[test]
    fn atomic_round_trip() {
        let x = AtomicScalar::with_denominators(LaurentPoly::l_pow(-1) - LaurentPoly::one(), &[1, 2]);
        let c = AtomicClass::term(ClassMonomial::symbol("C"), x);
        let j = serde_json::to_string(&c).unwrap();
        let back: AtomicClass = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<AtomicClass>(r#"{"terms":[{"monomial":[],"num":{"0":"1"},"den":[0]}]}"#).is_err());
    }
}
