//! Exact rational helpers and the `"p/q"` string encoding used in JSON.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;
pub type Int = BigInt;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_rat(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Integer value of `r` if it is one.
pub fn as_int(r: &Rat) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

pub fn as_i64(r: &Rat) -> Option<i64> {
    use num_traits::ToPrimitive;
    as_int(r).and_then(|n| n.to_i64())
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn pow_rat(r: &Rat, e: u32) -> Rat {
    num_traits::pow(r.clone(), e as usize)
}

/// Scale a rational vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * int_rat(&l)).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn primitive_rat(v: &[Rat]) -> Vec<Rat> {
    primitive(v).iter().map(int_rat).collect()
}

pub fn is_nonneg(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub enum RawRat {
        S(String),
        I(i64),
    }

    pub fn from_raw<E: de::Error>(r: RawRat) -> std::result::Result<Rat, E> {
        match r {
            RawRat::S(s) => parse_rat(&s).map_err(E::custom),
            RawRat::I(i) => Ok(rat(i)),
        }
    }

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        from_raw(RawRat::deserialize(d)?)
    }
}

pub mod serde_rat_vec {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fmt_rat(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let raw: Vec<serde_rat::RawRat> = Vec::deserialize(d)?;
        raw.into_iter().map(serde_rat::from_raw).collect()
    }
}

pub mod serde_rat_mat {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let strs: Vec<String> = row.iter().map(fmt_rat).collect();
            seq.serialize_element(&strs)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rat>>, D::Error> {
        let raw: Vec<Vec<serde_rat::RawRat>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|row| row.into_iter().map(serde_rat::from_raw).collect())
            .collect()
    }
}

/// Integers carried as decimal strings (or plain JSON numbers on input).
pub mod serde_int_vec {
    use super::*;
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub enum RawInt {
        S(String),
        I(i64),
    }

    pub fn from_raw<E: de::Error>(r: RawInt) -> std::result::Result<BigInt, E> {
        match r {
            RawInt::S(s) => s.trim().parse().map_err(|_| E::custom(format!("not an integer: `{s}`"))),
            RawInt::I(i) => Ok(BigInt::from(i)),
        }
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        let raw: Vec<RawInt> = Vec::deserialize(d)?;
        raw.into_iter().map(from_raw).collect()
    }
}

pub mod serde_int_mat {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let strs: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            seq.serialize_element(&strs)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<BigInt>>, D::Error> {
        let raw: Vec<Vec<super::serde_int_vec::RawInt>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|row| row.into_iter().map(super::serde_int_vec::from_raw).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-5/6", "12/8"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
        }
        assert_eq!(fmt_rat(&parse_rat("12/8").unwrap()), "3/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![ratio(1, 2), ratio(3, 4), rat(0)];
        assert_eq!(primitive(&v), vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]);
        assert_eq!(primitive(&[rat(4), rat(6)]), vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(2, 3), BigInt::from(0));
    }
}
