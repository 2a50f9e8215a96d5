//! The measure engine: motivic volumes and integrals on the cone complex at `L = 1`.

use crate::error::{Error, Result};
use crate::exp_integrals::{integrate_cone, ExpPolyDensity, ExpPolyTerm};
use crate::functions::{pullback_function, pullback_set};
use crate::model::{blow_up, refined_model, BlowupSpec, SncModel};
use crate::polyhedra::{face_of, Face, FaceCone, PolySet};
use crate::rational::{Rat, serde_rat_mat};
use crate::ring::{Coeff, Combination, MotClass};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Evaluate `f` on every item and add the results in input order.
pub(crate) fn ordered_sum<T: Sync, C: Coeff + Send>(
    items: &[T],
    parallel: bool,
    f: impl Fn(&T) -> Result<Combination<C>> + Sync,
) -> Result<Combination<C>> {
    let parts: Vec<Result<Combination<C>>> = if parallel { items.par_iter().map(&f).collect() } else { items.iter().map(&f).collect() };
    let mut total = Combination::zero();
    for p in parts {
        total = total + p?;
    }
    Ok(total)
}

/// One term `coeff · 1_piece ⊗ density` of a motivic function on a face.
#[derive(Clone, Debug, PartialEq)]
pub struct MotTerm {
    pub coeff: MotClass,
    pub piece: FaceCone,
    pub density: ExpPolyDensity,
}

/// Constructible motivic function: combination of classes (relative to the strata)
/// with exponential-polynomial densities on full-dimensional cones in the faces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MotivicFunction {
    pub terms: Vec<MotTerm>,
}

#[derive(Serialize, Deserialize)]
struct MotTermRepr {
    #[serde(default = "MotClass::unit")]
    coeff: MotClass,
    face: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rays")]
    rays: Option<Vec<Vec<Rat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Vec<ExpPolyTerm>>,
}

mod opt_rays {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Vec<Rat>>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(m) => serde_rat_mat::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Vec<Rat>>>, D::Error> {
        serde_rat_mat::deserialize(d).map(Some)
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    terms: Vec<MotTermRepr>,
}

pub(crate) fn density_from_repr(n: usize, d: Option<Vec<ExpPolyTerm>>) -> Result<ExpPolyDensity> {
    match d {
        None => Ok(ExpPolyDensity::one(n)),
        Some(t) => ExpPolyDensity::from_terms(n, &t),
    }
}

impl MotivicFunction {
    pub fn from_json(s: &str) -> Result<Self> {
        let r: FunctionRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut terms = Vec::new();
        for t in r.terms {
            let face = face_of(&t.face);
            let piece = match t.rays {
                Some(rays) => FaceCone::new(face.clone(), rays),
                None => FaceCone::full_face(face.clone()),
            };
            piece.validate()?;
            terms.push(MotTerm { coeff: t.coeff, density: density_from_repr(face.len(), t.density)?, piece });
        }
        Ok(MotivicFunction { terms })
    }

    pub fn to_json(&self) -> String {
        let terms = self
            .terms
            .iter()
            .map(|t| MotTermRepr {
                coeff: t.coeff.clone(),
                face: t.piece.face.clone(),
                rays: Some(t.piece.rays.clone()),
                density: Some(t.density.terms()),
            })
            .collect();
        serde_json::to_string_pretty(&FunctionRepr { terms }).expect("function serializes")
    }

    /// The constant function 1 on the whole skeleton.
    pub fn one(model: &SncModel) -> Self {
        let terms = model
            .faces()
            .into_iter()
            .map(|f| MotTerm { coeff: MotClass::unit(), density: ExpPolyDensity::one(f.len()), piece: FaceCone::full_face(f) })
            .collect();
        MotivicFunction { terms }
    }

    /// `e^{-s · ord_Z}` on the whole skeleton.
    pub fn ideal_power(model: &SncModel, ideal: &str, s: &Rat) -> Result<Self> {
        let mut terms = Vec::new();
        for f in model.faces() {
            let b = model.face_orders(ideal, &f)?;
            let lf = b.iter().map(|x| -(x * s)).collect();
            terms.push(MotTerm { coeff: MotClass::unit(), density: ExpPolyDensity::exp(lf), piece: FaceCone::full_face(f) });
        }
        Ok(MotivicFunction { terms })
    }

    /// Multiply every density by `e^{<mu_I, x>}` where `mu_I` is read off per face.
    pub fn mul_exp_by(&self, mu: impl Fn(&Face) -> Result<Vec<Rat>>) -> Result<Self> {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.density = t.density.mul_exp(&mu(&t.piece.face)?);
        }
        Ok(out)
    }

    pub fn validate(&self, model: &SncModel) -> Result<()> {
        for t in &self.terms {
            if !model.has_stratum(&t.piece.face) {
                return Err(Error::invalid(format!("function term on {:?}, which is not a stratum", t.piece.face)));
            }
            t.piece.validate()?;
            if t.density.nvars() != t.piece.face.len() {
                return Err(Error::invalid("density arity differs from the face dimension"));
            }
        }
        Ok(())
    }
}

fn check_piece(model: &SncModel, piece: &FaceCone) -> Result<()> {
    if !model.has_stratum(&piece.face) {
        return Err(Error::invalid(format!("piece in {:?}, which is not a stratum", piece.face)));
    }
    piece.validate()
}

/// `∫_piece density · e^{-<a, x>} dν_I`, zero on lower-dimensional pieces.
pub fn integrate_piece(model: &SncModel, piece: &FaceCone, density: &ExpPolyDensity) -> Result<Rat> {
    let n = piece.ambient_dim();
    if piece.dim() < n {
        return Ok(Rat::zero());
    }
    let a = model.face_a(&piece.face)?;
    let f = density.mul_exp(&a.iter().map(|x| -x.clone()).collect::<Vec<_>>());
    let mut total = Rat::zero();
    for s in piece.triangulate()? {
        total += integrate_cone(&f, &s.rays)?;
    }
    Ok(total)
}

/// `μ(S) = Σ_pieces [D_I°] ∫_σ e^{-Â}`.
pub fn measure(model: &SncModel, s: &PolySet) -> Result<MotClass> {
    measure_with(model, s, false)
}

pub fn measure_with(model: &SncModel, s: &PolySet, parallel: bool) -> Result<MotClass> {
    ordered_sum(&s.pieces, parallel, |p| {
        check_piece(model, p)?;
        let v = integrate_piece(model, p, &ExpPolyDensity::one(p.ambient_dim()))?;
        Ok(model.mot_class(&p.face)?.scale(&v))
    })
}

pub fn integrate(model: &SncModel, f: &MotivicFunction) -> Result<MotClass> {
    integrate_with(model, f, false)
}

pub fn integrate_with(model: &SncModel, f: &MotivicFunction, parallel: bool) -> Result<MotClass> {
    f.validate(model)?;
    ordered_sum(&f.terms, parallel, |t| {
        let v = integrate_piece(model, &t.piece, &t.density)?;
        Ok((&t.coeff * &model.mot_class(&t.piece.face)?).scale(&v))
    })
}

/// Closed form `Σ_I [D_I°] / ∏_{i∈I} (a_i + s b_i)`.
pub fn integrate_ideal_power(model: &SncModel, ideal: &str, s: &Rat) -> Result<MotClass> {
    let orders = model.ideal(ideal)?;
    let mut shifted = BTreeMap::new();
    for (id, b) in orders {
        let v = model.a(&id)? + s * b;
        if !v.is_positive() {
            return Err(Error::NonConvergent(format!("a + s·b = {v} along `{id}`")));
        }
        shifted.insert(id, v);
    }
    closed_form(model, |id| shifted[id].clone())
}

fn closed_form(model: &SncModel, weight: impl Fn(&str) -> Rat) -> Result<MotClass> {
    let mut total = MotClass::zero();
    for f in model.faces() {
        let denom = f.iter().fold(Rat::from_integer(1.into()), |acc, i| acc * weight(i));
        total = total + model.mot_class(&f)?.scale(&denom.recip());
    }
    Ok(total)
}

/// Stringy class `Σ_I [D_I°] / ∏ a_i`.
pub fn stringy_class(model: &SncModel) -> Result<MotClass> {
    closed_form(model, |id| model.a(id).cloned().expect("known divisor"))
}

/// Euler characteristic of `μ(S)` under a table of symbol values.
pub fn euler_measure(model: &SncModel, table: &BTreeMap<String, Rat>, s: &PolySet) -> Result<Rat> {
    measure(model, s)?.chi_specialize(table)
}

/// Both sides of a numerical comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub lhs: MotClass,
    pub rhs: MotClass,
    pub equal: bool,
}

impl CheckReport {
    pub fn new(lhs: MotClass, rhs: MotClass) -> Self {
        let equal = lhs == rhs;
        CheckReport { lhs, rhs, equal }
    }
}

/// `∫ f · |Jac| dμ_Y` against `∫ f dμ_X` where `a^X = a^Y + ord(Jac)`.
pub fn change_of_variables_check(model: &SncModel, jacobian: &str, f: Option<&MotivicFunction>) -> Result<CheckReport> {
    let f = f.cloned().unwrap_or_else(|| MotivicFunction::one(model));
    let weighted = f.mul_exp_by(|face| Ok(model.face_orders(jacobian, face)?.iter().map(|b| -b.clone()).collect()))?;
    let lhs = integrate(model, &weighted)?;
    let rhs = integrate(&model.twisted(jacobian, &Rat::from_integer(1.into()))?, &f)?;
    Ok(CheckReport::new(lhs, rhs))
}

/// Compare `μ(S)` (and `∫ f`) before and after a blow-up; classes of met strata are
/// first rewritten by the scissor relation `[D_I°] = inside + outside`.
pub fn check_blowup_invariance(model: &SncModel, spec: &BlowupSpec, s: &PolySet, f: Option<&MotivicFunction>) -> Result<Vec<CheckReport>> {
    let (new_model, phi) = blow_up(model, spec)?;
    let before_model = refined_model(model, spec)?;
    let mut out = Vec::new();
    let s_new = pullback_set(&phi, &new_model, s)?;
    out.push(CheckReport::new(measure(&before_model, s)?, measure(&new_model, &s_new)?));
    if let Some(f) = f {
        let f_new = pullback_function(&phi, &new_model, f)?;
        out.push(CheckReport::new(integrate(&before_model, f)?, integrate(&new_model, &f_new)?));
    }
    Ok(out)
}
