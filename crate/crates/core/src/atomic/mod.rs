//! The lattice-point theory: cells of integral points in skeleton faces, exact sums
//! `Σ φ·L^{-Â}` in the ring `Z[L, L^-1, (1 - L^-i)^-1]`, and their push-forwards.

pub mod lattice;

pub use lattice::{lattice_sum, semigroup_sum, LatticePolyhedron};

use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::ordered_sum;
use crate::model::{blow_up, refined_model, BlowupSpec};
use crate::model::{ModelMorphism, SncModel};
use crate::poly::Poly;
use crate::polyhedra::{face_of, Face};
use crate::rational::{as_i64, int_rat, serde_int_mat, serde_int_vec, serde_rat, serde_rat_vec, Int, Rat};
use crate::ring::{AtomicClass, AtomicScalar, LaurentPoly, MotClass};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

/// Points `{v + Σ λ_j u_j : λ ∈ N^d}` in the open face `I`; `generators` lists the `u_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCell {
    pub face: Face,
    #[serde(with = "serde_int_vec")]
    pub offset: Vec<Int>,
    #[serde(default, with = "serde_int_mat")]
    pub generators: Vec<Vec<Int>>,
}

impl LatticeCell {
    pub fn new(face: Face, offset: Vec<Int>, generators: Vec<Vec<Int>>) -> Self {
        Self { face, offset, generators }
    }

    /// All integral points of the open face.
    pub fn full(face: Face) -> Self {
        let n = face.len();
        let gens = (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect();
        Self { face, offset: vec![Int::one(); n], generators: gens }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.face.len();
        if self.offset.len() != n {
            return Err(Error::invalid(format!("cell offset has length {}, face {:?} has {n}", self.offset.len(), self.face)));
        }
        if self.offset.iter().any(|x| x < &Int::one()) {
            return Err(Error::invalid("cell offset entries must be at least 1"));
        }
        for g in &self.generators {
            if g.len() != n {
                return Err(Error::invalid("cell generator has the wrong length"));
            }
            if g.iter().any(|x| x.is_negative()) || g.iter().all(|x| x.is_zero()) {
                return Err(Error::invalid("cell generators must be nonzero and nonnegative"));
            }
        }
        if linalg::rank(&self.gen_rows(), n) != self.generators.len() {
            return Err(Error::invalid("cell generators are linearly dependent"));
        }
        Ok(())
    }

    fn gen_rows(&self) -> Vec<Vec<Rat>> {
        self.generators.iter().map(|g| g.iter().map(int_rat).collect()).collect()
    }

    fn offset_rat(&self) -> Vec<Rat> {
        self.offset.iter().map(int_rat).collect()
    }

    /// Points with every coordinate at most `bound`.
    pub fn points_up_to(&self, bound: i64) -> Vec<Vec<Int>> {
        let bound = Int::from(bound);
        let mut out = Vec::new();
        let mut stack = vec![(self.offset.clone(), 0usize)];
        // λ enumerated in lexicographic-increasing order without repetition: only bump j >= last.
        while let Some((p, start)) = stack.pop() {
            if p.iter().any(|x| x > &bound) {
                continue;
            }
            out.push(p.clone());
            for j in start..self.generators.len() {
                let q: Vec<Int> = p.iter().zip(&self.generators[j]).map(|(a, b)| a + b).collect();
                stack.push((q, j));
            }
        }
        out
    }
}

/// Affine form `x ↦ linear·x + constant` giving an exponent of `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineForm {
    #[serde(with = "serde_rat_vec")]
    pub linear: Vec<Rat>,
    #[serde(with = "serde_rat", default = "Rat::zero")]
    pub constant: Rat,
}

impl AffineForm {
    pub fn zero(n: usize) -> Self {
        Self { linear: vec![Rat::zero(); n], constant: Rat::zero() }
    }

    pub fn linear(linear: Vec<Rat>) -> Self {
        Self { linear, constant: Rat::zero() }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        crate::rational::dot(&self.linear, x) + &self.constant
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            linear: self.linear.iter().zip(&other.linear).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &other.constant,
        }
    }
}

/// A finite union of cells, declared pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PresburgerSet {
    pub cells: Vec<LatticeCell>,
}

impl PresburgerSet {
    pub fn from_json(s: &str) -> Result<Self> {
        let set: PresburgerSet = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        for c in &mut set.cells.clone() {
            c.validate()?;
        }
        Ok(PresburgerSet { cells: set.cells.into_iter().map(|c| LatticeCell { face: face_of(&c.face), ..c }).collect() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cells serialize")
    }

    pub fn full_skeleton(model: &SncModel) -> Self {
        PresburgerSet { cells: model.faces().into_iter().map(LatticeCell::full).collect() }
    }

    pub fn validate(&self, model: &SncModel) -> Result<()> {
        for c in &self.cells {
            if !model.has_stratum(&c.face) {
                return Err(Error::invalid(format!("cell on {:?}, which is not a stratum", c.face)));
            }
            c.validate()?;
        }
        Ok(())
    }

    /// Brute-force disjointness of the cells on the box `[1, bound]^I`.
    pub fn check_disjoint(&self, bound: i64) -> Result<()> {
        let mut seen: HashSet<(Face, Vec<Int>)> = HashSet::new();
        for c in &self.cells {
            for p in c.points_up_to(bound) {
                if !seen.insert((c.face.clone(), p.clone())) {
                    return Err(Error::invalid(format!("cells overlap at {:?} on face {:?}", p.iter().map(|x| x.to_string()).collect::<Vec<_>>(), c.face)));
                }
            }
        }
        Ok(())
    }
}

/// `coeff ⊗ weight(x)·L^{β(x)}` on the points of `cell`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicTerm {
    pub coeff: AtomicClass,
    pub cell: LatticeCell,
    pub beta: AffineForm,
    pub weight: Poly,
    /// Whether `coeff` already carries the class of the stratum.
    pub includes_stratum: bool,
}

#[derive(Serialize, Deserialize)]
struct WeightTermRepr {
    #[serde(with = "serde_rat")]
    coeff: Rat,
    powers: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(default = "AtomicClass::unit")]
    coeff: AtomicClass,
    #[serde(flatten)]
    cell: LatticeCell,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<AffineForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    powers: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Vec<WeightTermRepr>>,
    #[serde(default)]
    includes_stratum: bool,
}

#[derive(Serialize, Deserialize)]
struct TermsRepr {
    terms: Vec<TermRepr>,
}

impl AtomicTerm {
    pub fn new(coeff: AtomicClass, cell: LatticeCell) -> Self {
        let n = cell.face.len();
        Self { coeff, cell, beta: AffineForm::zero(n), weight: Poly::one(n), includes_stratum: false }
    }

    fn from_repr(r: TermRepr) -> Result<Self> {
        let cell = LatticeCell { face: face_of(&r.cell.face), ..r.cell };
        cell.validate()?;
        let n = cell.face.len();
        let beta = r.beta.unwrap_or_else(|| AffineForm::zero(n));
        if beta.linear.len() != n {
            return Err(Error::invalid("beta has the wrong number of coordinates"));
        }
        let weight = match (r.powers, r.weight) {
            (Some(_), Some(_)) => return Err(Error::invalid("give either `powers` or `weight`, not both")),
            (Some(p), None) => {
                if p.len() != n {
                    return Err(Error::invalid("powers have the wrong length"));
                }
                Poly::monomial(p, Rat::one())
            }
            (None, Some(ws)) => {
                let mut w = Poly::zero(n);
                for t in ws {
                    if t.powers.len() != n {
                        return Err(Error::invalid("weight powers have the wrong length"));
                    }
                    w.add_term(t.powers, t.coeff);
                }
                w
            }
            (None, None) => Poly::one(n),
        };
        Ok(Self { coeff: r.coeff, cell, beta, weight, includes_stratum: r.includes_stratum })
    }

    fn to_repr(&self) -> TermRepr {
        let weight = self.weight.terms().map(|(p, c)| WeightTermRepr { coeff: c.clone(), powers: p.clone() }).collect();
        TermRepr {
            coeff: self.coeff.clone(),
            cell: self.cell.clone(),
            beta: Some(self.beta.clone()),
            powers: None,
            weight: Some(weight),
            includes_stratum: self.includes_stratum,
        }
    }
}

pub fn terms_from_json(s: &str) -> Result<Vec<AtomicTerm>> {
    let r: TermsRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    r.terms.into_iter().map(AtomicTerm::from_repr).collect()
}

pub fn terms_to_json(terms: &[AtomicTerm]) -> String {
    serde_json::to_string_pretty(&TermsRepr { terms: terms.iter().map(AtomicTerm::to_repr).collect() }).expect("terms serialize")
}

/// `Σ_{x ∈ cell} weight(x) L^{β(x)}`.
pub fn cell_sum(cell: &LatticeCell, beta: &AffineForm, weight: &Poly) -> Result<AtomicScalar> {
    cell.validate()?;
    semigroup_sum(&cell.offset_rat(), &cell.gen_rows(), beta, weight)
}

fn integer_discrepancies(model: &SncModel, face: &[String]) -> Result<Vec<Rat>> {
    let a = model.face_a(face)?;
    if a.iter().any(|x| !x.is_integer()) {
        return Err(Error::invalid("the lattice engine needs integer log discrepancies"));
    }
    Ok(a)
}

/// `(L - 1)^k` for any integer `k`.
pub fn l_minus_one_power(k: i64) -> AtomicScalar {
    if k >= 0 {
        AtomicScalar::from_poly(LaurentPoly::l_minus_one_pow(k as u32))
    } else {
        // (L - 1)^-1 = L^-1 / (1 - L^-1)
        let m = k.unsigned_abs() as usize;
        AtomicScalar::with_denominators(LaurentPoly::l_pow(k), &vec![1; m])
    }
}

/// Atomic volume of a cell: `(L - 1)^{|I|} Σ_{x ∈ cell} L^{-Â(x)}`.
fn cell_volume(model: &SncModel, cell: &LatticeCell) -> Result<AtomicClass> {
    let a = integer_discrepancies(model, &cell.face)?;
    let beta = AffineForm::linear(a.iter().map(|x| -x).collect());
    let s = cell_sum(cell, &beta, &Poly::one(cell.face.len()))?;
    let factor = &l_minus_one_power(cell.face.len() as i64) * &s;
    Ok(model.stratum_class(&cell.face)?.scale(&factor))
}

pub fn atomic_measure(model: &SncModel, set: &PresburgerSet) -> Result<AtomicClass> {
    atomic_measure_with(model, set, false)
}

pub fn atomic_measure_with(model: &SncModel, set: &PresburgerSet, parallel: bool) -> Result<AtomicClass> {
    set.validate(model)?;
    Ok(ordered_sum(&set.cells, parallel, |c| cell_volume(model, c))?.reduce())
}

fn term_integral(model: &SncModel, t: &AtomicTerm) -> Result<AtomicClass> {
    if !model.has_stratum(&t.cell.face) {
        return Err(Error::invalid(format!("term on {:?}, which is not a stratum", t.cell.face)));
    }
    let a = integer_discrepancies(model, &t.cell.face)?;
    let beta = AffineForm { linear: t.beta.linear.iter().zip(&a).map(|(b, a)| b - a).collect(), constant: t.beta.constant.clone() };
    let s = cell_sum(&t.cell, &beta, &t.weight)?;
    let factor = &l_minus_one_power(t.cell.face.len() as i64) * &s;
    let coeff = if t.includes_stratum { t.coeff.clone() } else { &t.coeff * model.stratum_class(&t.cell.face)? };
    Ok(coeff.scale(&factor))
}

pub fn atomic_integrate(model: &SncModel, terms: &[AtomicTerm]) -> Result<AtomicClass> {
    atomic_integrate_with(model, terms, false)
}

pub fn atomic_integrate_with(model: &SncModel, terms: &[AtomicTerm], parallel: bool) -> Result<AtomicClass> {
    Ok(ordered_sum(terms, parallel, |t| term_integral(model, t))?.reduce())
}

/// Push-forward of atomic terms along `phi`: image cells with the fiber sums folded into
/// the coefficients. Supported when every generator is either killed by the face map or
/// the surviving generators map injectively.
pub fn atomic_pushforward(source: &SncModel, target: &SncModel, phi: &ModelMorphism, terms: &[AtomicTerm]) -> Result<Vec<AtomicTerm>> {
    phi.validate(source, target)?;
    let mut out = Vec::new();
    for t in terms {
        push_term(source, target, phi, t, &mut out)?;
    }
    Ok(out)
}

fn push_term(source: &SncModel, target: &SncModel, phi: &ModelMorphism, t: &AtomicTerm, out: &mut Vec<AtomicTerm>) -> Result<()> {
    let cell = &t.cell;
    cell.validate()?;
    let face = &cell.face;
    let n = face.len();
    let a_x = integer_discrepancies(source, face)?;
    let (jface, lam) = phi.face_map(face)?;
    let a_y = integer_discrepancies(target, &jface)?;
    let m = jface.len();
    let beta_tot = AffineForm { linear: t.beta.linear.iter().zip(&a_x).map(|(b, a)| b - a).collect(), constant: t.beta.constant.clone() };

    let v = cell.offset_rat();
    let gens = cell.gen_rows();
    let images: Vec<Vec<Rat>> = gens.iter().map(|g| linalg::mat_vec(&lam, g)).collect();
    let (kill, keep): (Vec<usize>, Vec<usize>) = (0..gens.len()).partition(|&j| images[j].iter().all(|x| x.is_zero()));
    let kept: Vec<Vec<Rat>> = keep.iter().map(|&j| images[j].clone()).collect();
    if linalg::rank(&kept, m) != kept.len() {
        return Err(Error::Unsupported("the face map folds cell generators together without killing them".into()));
    }
    let mut steps = Vec::new();
    for &j in &kill {
        let c = crate::rational::dot(&beta_tot.linear, &gens[j]);
        let ci = as_i64(&c).ok_or_else(|| Error::invalid("exponent is not integral along a fiber generator"))?;
        if ci >= 0 {
            return Err(Error::NonConvergent("term is not integrable along the fibers".into()));
        }
        steps.push(ci);
    }
    // Weight in cell parameters, ordered (kept, killed).
    let order: Vec<usize> = keep.iter().chain(&kill).copied().collect();
    let d = order.len();
    let amat: Vec<Vec<Rat>> = (0..n).map(|i| order.iter().map(|&j| gens[j][i].clone()).collect()).collect();
    let w = t.weight.compose_affine(&amat, &v, d);
    let mut by_killed: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (alpha, c) in w.terms() {
        let (ak, az) = alpha.split_at(keep.len());
        by_killed.entry(az.to_vec()).or_insert_with(|| Poly::zero(keep.len())).add_term(ak.to_vec(), c.clone());
    }

    // λ_R as an affine function of the target point w.
    let bv = linalg::mat_vec(&lam, &v);
    let (lft, shift) = if keep.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let lft = linalg::left_inverse(&kept, m).expect("injective on kept generators");
        let shift: Vec<Rat> = linalg::mat_vec(&lft, &bv).into_iter().map(|x| -x).collect();
        (lft, shift)
    };
    // x(w) = v + U_R (lft w + shift)
    let mut x_lin = vec![vec![Rat::zero(); m]; n];
    let mut x_const = v.clone();
    for (r, &j) in keep.iter().enumerate() {
        for i in 0..n {
            for k in 0..m {
                x_lin[i][k] += &gens[j][i] * &lft[r][k];
            }
            x_const[i] += &gens[j][i] * &shift[r];
        }
    }
    let beta_new = AffineForm {
        linear: (0..m).map(|k| (0..n).fold(a_y[k].clone(), |acc, i| acc + &beta_tot.linear[i] * &x_lin[i][k])).collect(),
        constant: beta_tot.eval(&x_const),
    };
    let new_cell = LatticeCell {
        face: jface.clone(),
        offset: bv.iter().map(|x| x.to_integer()).collect(),
        generators: kept.iter().map(|g| g.iter().map(|x| x.to_integer()).collect()).collect(),
    };
    let base = if t.includes_stratum { t.coeff.clone() } else { &t.coeff * source.stratum_class(face)? };
    let base = phi.push_atomic(&base).scale(&l_minus_one_power(n as i64 - m as i64));
    let lft_shift_mat: Vec<Vec<Rat>> = lft.clone();
    for (az, p) in by_killed {
        let mut s = AtomicScalar::one();
        for (e, c) in az.iter().zip(&steps) {
            s = &s * &crate::ring::poly_sum_from_zero(*e, *c)?;
        }
        let weight = p.compose_affine(&lft_shift_mat, &shift, m);
        out.push(AtomicTerm { coeff: base.scale(&s), cell: new_cell.clone(), beta: beta_new.clone(), weight, includes_stratum: true });
    }
    Ok(())
}

/// Both sides of the atomic blow-up lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicCheckReport {
    pub lhs: AtomicClass,
    pub rhs: AtomicClass,
    pub equal: bool,
}

impl AtomicCheckReport {
    pub fn new(lhs: AtomicClass, rhs: AtomicClass) -> Self {
        let equal = lhs == rhs;
        Self { lhs: lhs.reduce(), rhs: rhs.reduce(), equal }
    }
}

/// `μ(S)` on the scissor-refined model against the lattice sum over the preimage of `S`
/// in the blow-up, computed face by face from the integral points `x` with `λ_K x ∈ S`.
pub fn check_atomic_blowup(model: &SncModel, spec: &BlowupSpec, set: &PresburgerSet) -> Result<AtomicCheckReport> {
    set.validate(model)?;
    let before = atomic_measure(&refined_model(model, spec)?, set)?;
    let (new_model, phi) = blow_up(model, spec)?;
    let faces = new_model.faces();
    let mut after = AtomicClass::zero();
    for cell in &set.cells {
        for k in &faces {
            let (img, lam) = phi.face_map(k)?;
            if img != cell.face {
                continue;
            }
            let a_k = integer_discrepancies(&new_model, k)?;
            let nk = k.len();
            let d = cell.dim();
            let nz = nk + d;
            // z = (x, λ): λ_K x - U λ = v, x >= 1, λ >= 0
            let mut p = LatticePolyhedron { n: nz, ..Default::default() };
            for (i, row) in lam.iter().enumerate() {
                let mut r: Vec<Int> = row.iter().map(|x| x.to_integer()).collect();
                r.extend(cell.generators.iter().map(|g| -g[i].clone()));
                p.eqs.push((r, cell.offset[i].clone()));
            }
            for i in 0..nz {
                let mut r = vec![Int::zero(); nz];
                r[i] = Int::one();
                p.ineqs.push((r, Int::from((i < nk) as i64)));
            }
            let mut lin: Vec<Rat> = a_k.iter().map(|x| -x).collect();
            lin.extend(std::iter::repeat(Rat::zero()).take(d));
            let s = lattice_sum(&p, &AffineForm::linear(lin), &Poly::one(nz))?;
            let factor = &l_minus_one_power(nk as i64) * &s;
            after = after + new_model.stratum_class(k)?.scale(&factor);
        }
    }
    Ok(AtomicCheckReport::new(before, after))
}

/// `lim_{L→1}` of the atomic volume of the full skeleton against the real measure.
pub fn cross_check_l1(model: &SncModel) -> Result<(MotClass, MotClass, bool)> {
    let atomic = atomic_measure(model, &PresburgerSet::full_skeleton(model))?.limit_l1()?;
    let real = crate::measure::measure(model, &model.full_skeleton())?;
    let equal = atomic == real;
    Ok((atomic, real, equal))
}

#[cfg(test)]
mod tests;
