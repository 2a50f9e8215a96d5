use super::{Divisor, ModelMorphism, SncModel};
use crate::error::{Error, Result};
use crate::polyhedra::{face_of, Face};
use crate::rational::{rat, Int};
use crate::ring::{AtomicClass, AtomicScalar, LaurentPoly};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How the center meets one stratum `D_I°` with `T ⊆ I`: the class of the part inside
/// the center and, optionally, of the rest (default: the stratum class minus `inside`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetEntry {
    #[serde(rename = "I")]
    pub face: Face,
    pub inside: AtomicClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside: Option<AtomicClass>,
}

/// Blow-up of a smooth center of codimension `c` contained in `D_T` and meeting the
/// boundary transversally.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowupSpec {
    #[serde(rename = "T")]
    pub t: Face,
    pub c: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptional: Option<String>,
    #[serde(default)]
    pub met: Vec<MetEntry>,
}

impl BlowupSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Blow-up of the stratum closure `D_T` itself.
    pub fn stellar(t: Face) -> Self {
        let c = t.len() as u32;
        BlowupSpec { t, c, exceptional: None, met: Vec::new() }
    }
}

fn is_subset(a: &[String], b: &[String]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Resolved `met` data: face -> (inside, outside).
fn resolve_met(model: &SncModel, spec: &BlowupSpec) -> Result<BTreeMap<Face, (AtomicClass, AtomicClass)>> {
    let t = face_of(&spec.t);
    let tl = t.len() as u32;
    if !model.has_stratum(&t) {
        return Err(Error::invalid(format!("T = {t:?} is not a stratum")));
    }
    if spec.c < tl {
        return Err(Error::invalid(format!("codimension {} is incompatible with |T| = {tl}", spec.c)));
    }
    if spec.c < 2 {
        // a divisorial center: the blow-up is an isomorphism and leaves no exceptional stratum
        return Err(Error::invalid("the center must have codimension at least 2"));
    }
    let above: Vec<Face> = model.faces().into_iter().filter(|f| is_subset(&t, f)).collect();
    let mut met = BTreeMap::new();
    if spec.c == tl && spec.met.is_empty() {
        for f in &above {
            met.insert(f.clone(), (model.stratum_class(f)?.clone(), AtomicClass::zero()));
        }
        return Ok(met);
    }
    for e in &spec.met {
        let f = face_of(&e.face);
        if !model.has_stratum(&f) {
            return Err(Error::invalid(format!("met face {f:?} is not a stratum")));
        }
        if !is_subset(&t, &f) {
            return Err(Error::invalid(format!("met face {f:?} does not contain T")));
        }
        let cls = model.stratum_class(&f)?;
        let outside = e.outside.clone().unwrap_or_else(|| cls.clone() - e.inside.clone());
        if met.insert(f.clone(), (e.inside.clone(), outside)).is_some() {
            return Err(Error::invalid(format!("met face {f:?} listed twice")));
        }
    }
    if !met.contains_key(&t) {
        return Err(Error::invalid("the center must meet D_T°"));
    }
    for f in met.keys() {
        for g in &above {
            if is_subset(g, f) && !met.contains_key(g) {
                return Err(Error::invalid(format!("met is not closed: contains {f:?} but not {g:?}")));
            }
        }
    }
    for (f, (_, out)) in &met {
        if out.is_zero() {
            for g in above.iter().filter(|g| is_subset(f, g)) {
                if !met.get(g).is_some_and(|(_, o)| o.is_zero()) {
                    return Err(Error::invalid(format!("D_{f:?}° lies in the center, so D_{g:?}° must too")));
                }
            }
        }
    }
    if spec.c == tl {
        for f in &above {
            match met.get(f) {
                Some((_, o)) if o.is_zero() => {}
                _ => return Err(Error::invalid(format!("stellar center must contain all of D_{f:?}°"))),
            }
        }
    }
    Ok(met)
}

/// Scissor-refined copy of the model: `[D_I°] = inside + outside` for every met face.
pub fn refined_model(model: &SncModel, spec: &BlowupSpec) -> Result<SncModel> {
    let met = resolve_met(model, spec)?;
    let mut strata = model.strata_map().clone();
    for (f, (inside, outside)) in met {
        strata.insert(f, inside + outside);
    }
    Ok(SncModel::raw(model.divisors().to_vec(), strata, model.ideals().clone()))
}

/// Blow up and return the new model with the blow-down morphism to the old one.
pub fn blow_up(model: &SncModel, spec: &BlowupSpec) -> Result<(SncModel, ModelMorphism)> {
    let met = resolve_met(model, spec)?;
    let t = face_of(&spec.t);
    let tl = t.len() as i64;
    let c = spec.c as i64;
    let ids = model.divisor_ids();
    let e_id = match &spec.exceptional {
        Some(e) if ids.contains(e) => return Err(Error::invalid(format!("exceptional id `{e}` already used"))),
        Some(e) => e.clone(),
        None => (0..).map(|k| format!("E{k}")).find(|e| !ids.contains(e)).unwrap(),
    };

    let mut a0 = rat(c - tl);
    for j in &t {
        a0 += model.a(j)?;
    }
    let mut divisors = model.divisors().to_vec();
    divisors.push(Divisor { id: e_id.clone(), a: a0 });
    let mut ideals = model.ideals().clone();
    for orders in ideals.values_mut() {
        let b0 = t.iter().filter_map(|j| orders.get(j)).fold(rat(0), |acc, b| acc + b);
        if b0 != rat(0) {
            orders.insert(e_id.clone(), b0);
        }
    }

    let mut strata = BTreeMap::new();
    for (f, cls) in model.strata_map() {
        match met.get(f) {
            None => {
                strata.insert(f.clone(), cls.clone());
            }
            Some((_, outside)) => {
                if !outside.is_zero() {
                    strata.insert(f.clone(), outside.clone());
                }
            }
        }
    }
    for (f, (inside, _)) in &met {
        let rest: Vec<String> = f.iter().filter(|i| !t.contains(i)).cloned().collect();
        let tf: Vec<String> = f.iter().filter(|i| t.contains(i)).cloned().collect();
        // J = rest ∪ S for S ⊆ T; the new stratum sits over D_I° ∩ C.
        for mask in 0u32..(1 << tf.len()) {
            let s: Vec<String> = (0..tf.len()).filter(|k| mask & (1 << k) != 0).map(|k| tf[k].clone()).collect();
            let factor = if s.len() == tf.len() {
                LaurentPoly::projective(c - tl - 1)
            } else {
                let k = tl - s.len() as i64;
                &LaurentPoly::l_minus_one_pow((k - 1) as u32) * &LaurentPoly::l_pow(c - tl)
            };
            if factor.is_zero() {
                continue;
            }
            let cls = inside.scale(&AtomicScalar::from_poly(factor));
            if cls.is_zero() {
                continue;
            }
            let mut k: Vec<String> = rest.iter().chain(&s).cloned().collect();
            k.push(e_id.clone());
            strata.insert(face_of(&k), cls);
        }
    }
    let new_model = SncModel::raw(divisors, strata, ideals);
    new_model.validate()?;

    let mut source = ids.clone();
    source.push(e_id);
    let n = ids.len();
    let mut matrix: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
    matrix.push(ids.iter().map(|j| Int::from(t.contains(j) as i64)).collect());
    let morphism = ModelMorphism { source, target: ids, matrix, class_map: BTreeMap::new() };
    morphism.validate(&new_model, model)?;
    Ok((new_model, morphism))
}
