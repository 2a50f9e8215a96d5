//! SNC models: boundary divisors with log discrepancies, strata with classes, ideals.

mod blowup;
mod morphism;

pub use blowup::{blow_up, refined_model, BlowupSpec, MetEntry};
pub use morphism::ModelMorphism;

use crate::error::{Error, Result};
use crate::polyhedra::{face_of, Face, FaceCone, PolySet};
use crate::rational::{serde_rat, Rat};
use crate::ring::{AtomicClass, ClassOrder, MotClass};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub id: String,
    #[serde(with = "serde_rat")]
    pub a: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stratum {
    #[serde(rename = "I")]
    pub face: Face,
    pub class: AtomicClass,
}

/// Orders `b_i` of an ideal along each divisor (missing divisors have order 0).
pub type IdealOrders = BTreeMap<String, Rat>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct SncModel {
    divisors: Vec<Divisor>,
    strata: BTreeMap<Face, AtomicClass>,
    ideals: BTreeMap<String, IdealOrders>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    divisors: Vec<Divisor>,
    strata: Vec<Stratum>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    ideals: BTreeMap<String, BTreeMap<String, IdealOrder>>,
}

#[derive(Serialize, Deserialize)]
struct IdealOrder(#[serde(with = "serde_rat")] Rat);

impl TryFrom<ModelRepr> for SncModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        let mut strata = BTreeMap::new();
        for s in r.strata {
            let f = face_of(&s.face);
            if f.len() != s.face.len() {
                return Err(Error::invalid(format!("stratum {:?} repeats a divisor", s.face)));
            }
            if strata.insert(f, s.class).is_some() {
                return Err(Error::invalid(format!("stratum {:?} listed twice", s.face)));
            }
        }
        let ideals = r.ideals.into_iter().map(|(k, v)| (k, v.into_iter().map(|(d, o)| (d, o.0)).collect())).collect();
        let m = SncModel { divisors: r.divisors, strata, ideals };
        m.validate()?;
        Ok(m)
    }
}

impl From<SncModel> for ModelRepr {
    fn from(m: SncModel) -> Self {
        let strata = m.strata_in_order().into_iter().map(|(f, c)| Stratum { face: f.clone(), class: c.clone() }).collect();
        let ideals = m.ideals.iter().map(|(k, v)| (k.clone(), v.iter().map(|(d, o)| (d.clone(), IdealOrder(o.clone()))).collect())).collect();
        ModelRepr { divisors: m.divisors, strata, ideals }
    }
}

impl SncModel {
    /// Build and validate.
    pub fn new(divisors: Vec<Divisor>, strata: Vec<(Face, AtomicClass)>, ideals: BTreeMap<String, IdealOrders>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (f, c) in strata {
            let key = face_of(&f);
            if map.insert(key, c).is_some() {
                return Err(Error::invalid(format!("stratum {f:?} listed twice")));
            }
        }
        let m = SncModel { divisors, strata: map, ideals };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: ModelRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        SncModel::try_from(repr)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for d in &self.divisors {
            if d.id.is_empty() {
                return Err(Error::invalid("empty divisor id"));
            }
            if !ids.insert(d.id.as_str()) {
                return Err(Error::invalid(format!("duplicate divisor id `{}`", d.id)));
            }
            if !d.a.is_positive() {
                return Err(Error::invalid(format!("divisor `{}` has non-positive log discrepancy {}", d.id, d.a)));
            }
        }
        if !self.strata.contains_key(&Vec::new()) {
            return Err(Error::invalid("the open stratum (I = []) is missing"));
        }
        for f in self.strata.keys() {
            for i in f {
                if !ids.contains(i.as_str()) {
                    return Err(Error::invalid(format!("stratum {f:?} names unknown divisor `{i}`")));
                }
            }
            for k in 0..f.len() {
                let mut sub = f.clone();
                sub.remove(k);
                if !self.strata.contains_key(&sub) {
                    return Err(Error::invalid(format!("strata are not downward closed: {f:?} present but {sub:?} missing")));
                }
            }
        }
        for d in &self.divisors {
            if !self.strata.contains_key(&vec![d.id.clone()]) {
                return Err(Error::invalid(format!("divisor `{}` has no stratum", d.id)));
            }
        }
        for (name, orders) in &self.ideals {
            for (d, b) in orders {
                if !ids.contains(d.as_str()) {
                    return Err(Error::invalid(format!("ideal `{name}` names unknown divisor `{d}`")));
                }
                if b.is_negative() || !b.is_integer() {
                    return Err(Error::invalid(format!("ideal `{name}` has order {b} along `{d}`")));
                }
            }
        }
        Ok(())
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn divisor_ids(&self) -> Vec<String> {
        self.divisors.iter().map(|d| d.id.clone()).collect()
    }

    pub fn a(&self, id: &str) -> Result<&Rat> {
        self.divisors.iter().find(|d| d.id == id).map(|d| &d.a).ok_or_else(|| Error::invalid(format!("unknown divisor `{id}`")))
    }

    /// Log discrepancies along a face, in face coordinate order.
    pub fn face_a(&self, face: &[String]) -> Result<Vec<Rat>> {
        face.iter().map(|i| self.a(i).cloned()).collect()
    }

    pub fn has_stratum(&self, face: &[String]) -> bool {
        self.strata.contains_key(face)
    }

    pub fn stratum_class(&self, face: &[String]) -> Result<&AtomicClass> {
        self.strata.get(face).ok_or_else(|| Error::invalid(format!("{face:?} is not a stratum")))
    }

    /// Class of a stratum at `L = 1`.
    pub fn mot_class(&self, face: &[String]) -> Result<MotClass> {
        self.stratum_class(face)?.limit_l1()
    }

    /// Strata ordered by dimension of the face, then lexicographically.
    pub fn strata_in_order(&self) -> Vec<(&Face, &AtomicClass)> {
        let mut v: Vec<_> = self.strata.iter().collect();
        v.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        v
    }

    pub fn faces(&self) -> Vec<Face> {
        self.strata_in_order().into_iter().map(|(f, _)| f.clone()).collect()
    }

    /// Rendering order following the strata.
    pub fn class_order(&self) -> ClassOrder {
        ClassOrder::new(self.strata_in_order().into_iter().flat_map(|(_, c)| c.symbols().cloned().collect::<Vec<_>>()))
    }

    pub fn ideal(&self, name: &str) -> Result<Vec<(String, Rat)>> {
        let orders = self.ideals.get(name).ok_or_else(|| Error::invalid(format!("unknown ideal `{name}`")))?;
        Ok(self.divisors.iter().map(|d| (d.id.clone(), orders.get(&d.id).cloned().unwrap_or_else(Rat::zero))).collect())
    }

    /// Orders of an ideal along a face, in face coordinate order.
    pub fn face_orders(&self, name: &str, face: &[String]) -> Result<Vec<Rat>> {
        let orders = self.ideals.get(name).ok_or_else(|| Error::invalid(format!("unknown ideal `{name}`")))?;
        Ok(face.iter().map(|i| orders.get(i).cloned().unwrap_or_else(Rat::zero)).collect())
    }

    pub fn ideals(&self) -> &BTreeMap<String, IdealOrders> {
        &self.ideals
    }

    /// One full-face piece per stratum.
    pub fn full_skeleton(&self) -> PolySet {
        PolySet::new(self.faces().into_iter().map(FaceCone::full_face).collect())
    }

    /// Same model with log discrepancies shifted by an ideal: `a_i + s b_i`.
    pub fn twisted(&self, ideal: &str, s: &Rat) -> Result<SncModel> {
        let orders = self.ideal(ideal)?;
        let mut m = self.clone();
        for (d, (_, b)) in m.divisors.iter_mut().zip(orders) {
            d.a += s * b;
        }
        Ok(m)
    }

    /// Replace log discrepancies (same order as `divisors`), bypassing positivity checks.
    pub fn with_discrepancies(&self, a: Vec<Rat>) -> SncModel {
        let mut m = self.clone();
        for (d, x) in m.divisors.iter_mut().zip(a) {
            d.a = x;
        }
        m
    }

    pub(crate) fn raw(divisors: Vec<Divisor>, strata: BTreeMap<Face, AtomicClass>, ideals: BTreeMap<String, IdealOrders>) -> Self {
        SncModel { divisors, strata, ideals }
    }

    pub(crate) fn strata_map(&self) -> &BTreeMap<Face, AtomicClass> {
        &self.strata
    }
}

/// Mather log canonical threshold `min a_i / b_i` over divisors with `b_i > 0`.
pub fn mather_lct(model: &SncModel, ideal: &str) -> Result<Rat> {
    model
        .ideal(ideal)?
        .into_iter()
        .filter(|(_, b)| b.is_positive())
        .map(|(d, b)| model.a(&d).map(|a| a / &b))
        .collect::<Result<Vec<Rat>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::TrivialIdeal(ideal.to_string()))
}

/// Model with divisors `D1..Dn`, every subset a stratum, classes named `U`, `D1o`,
/// `D12o`, ... (the naming used for coordinate hyperplane arrangements).
pub fn coordinate_model(a: &[Rat]) -> SncModel {
    let n = a.len();
    let ids: Vec<String> = (1..=n).map(|i| format!("D{i}")).collect();
    let divisors = ids.iter().zip(a).map(|(id, a)| Divisor { id: id.clone(), a: a.clone() }).collect();
    let mut strata = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let face = face_of(&members.iter().map(|&k| ids[k].clone()).collect::<Vec<_>>());
        let name = if members.is_empty() {
            "U".to_string()
        } else {
            format!("D{}o", members.iter().map(|k| (k + 1).to_string()).collect::<String>())
        };
        strata.insert(face, AtomicClass::symbol(name));
    }
    SncModel::raw(divisors, strata, BTreeMap::new())
}
