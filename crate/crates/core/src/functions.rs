//! Functions on skeleta (classes tensor exponential-polynomial densities on cones of any
//! dimension), their integrals, products, pull-backs and fiber-integration push-forwards.

use crate::error::{Error, Result};
use crate::exp_integrals::{eliminate_variable, integrate_cone, Bound, ExpPolyDensity, ExpPolyTerm};
use crate::linalg::{self, Mat};
use crate::measure::{density_from_repr, MotTerm, MotivicFunction};
use crate::model::{ModelMorphism, SncModel};
use crate::polyhedra::{face_of, is_full_dim, preimage_cones, simplicial_hcone, triangulate, Face, FaceCone, HCone, PolySet};
use crate::rational::{dot, int_rat, primitive, primitive_rat, Rat};
use crate::ring::{ClassMonomial, ClassOrder, MotClass};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `coeff ⊗ density · 1_carrier`; the coefficient already includes the stratum class.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionPiece {
    pub coeff: MotClass,
    pub carrier: FaceCone,
    pub density: ExpPolyDensity,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunctionV {
    pub pieces: Vec<FunctionPiece>,
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    coeff: MotClass,
    face: Vec<String>,
    #[serde(with = "crate::rational::serde_rat_mat")]
    rays: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Vec<ExpPolyTerm>>,
}

#[derive(Serialize, Deserialize)]
struct FunctionVRepr {
    pieces: Vec<PieceRepr>,
}

impl FunctionV {
    pub fn from_json(s: &str) -> Result<Self> {
        let r: FunctionVRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut pieces = Vec::new();
        for p in r.pieces {
            let face = face_of(&p.face);
            let carrier = FaceCone::new(face.clone(), p.rays);
            carrier.validate()?;
            pieces.push(FunctionPiece { coeff: p.coeff, density: density_from_repr(face.len(), p.density)?, carrier });
        }
        Ok(FunctionV { pieces })
    }

    pub fn to_json(&self) -> String {
        let pieces = self
            .pieces
            .iter()
            .map(|p| PieceRepr {
                coeff: p.coeff.clone(),
                face: p.carrier.face.clone(),
                rays: p.carrier.rays.clone(),
                density: Some(p.density.terms()),
            })
            .collect();
        serde_json::to_string_pretty(&FunctionVRepr { pieces }).expect("function serializes")
    }

    pub fn render(&self, order: &ClassOrder) -> String {
        let mut out = String::new();
        for p in &self.pieces {
            let dens: Vec<String> = p.density.terms().iter().map(render_term).collect();
            out.push_str(&format!(
                "({}) ⊗ [{}] on {:?} cone {:?}\n",
                order.render_mot(&p.coeff),
                if dens.is_empty() { "0".to_string() } else { dens.join(" + ") },
                p.carrier.face,
                p.carrier.rays.iter().map(|r| r.iter().map(crate::rational::fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>()
            ));
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let pieces = self.pieces.iter().map(|p| FunctionPiece { coeff: p.coeff.scale(c), ..p.clone() }).collect();
        FunctionV { pieces }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        FunctionV { pieces }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn validate(&self, model: &SncModel) -> Result<()> {
        for p in &self.pieces {
            if !model.has_stratum(&p.carrier.face) {
                return Err(Error::invalid(format!("piece on {:?}, which is not a stratum", p.carrier.face)));
            }
            p.carrier.validate()?;
            if !p.carrier.meets_open_face() {
                return Err(Error::invalid("carrier lies on the boundary of its face"));
            }
            if p.density.nvars() != p.carrier.face.len() {
                return Err(Error::invalid("density arity differs from the face dimension"));
            }
        }
        Ok(())
    }
}

fn render_term(t: &ExpPolyTerm) -> String {
    let mut s = crate::rational::fmt_rat(&t.coeff);
    for (i, k) in t.powers.iter().enumerate() {
        if *k > 0 {
            s.push_str(&format!("·x{i}^{k}"));
        }
    }
    if t.linform.iter().any(|x| !x.is_zero()) {
        let lf: Vec<String> = t.linform.iter().map(crate::rational::fmt_rat).collect();
        s.push_str(&format!("·exp<({}),x>", lf.join(",")));
    }
    s
}

/// Λ: promote a motivic function to a function on the skeleton.
pub fn lift(model: &SncModel, f: &MotivicFunction) -> Result<FunctionV> {
    f.validate(model)?;
    let mut pieces = Vec::new();
    for t in &f.terms {
        if t.piece.dim() < t.piece.ambient_dim() {
            continue;
        }
        let coeff = &t.coeff * &model.mot_class(&t.piece.face)?;
        if coeff.is_zero() {
            continue;
        }
        pieces.push(FunctionPiece { coeff, carrier: t.piece.clone(), density: t.density.clone() });
    }
    Ok(FunctionV { pieces })
}

/// Total integral `Σ coeff ∫_R density e^{-Â} dν_R` (lattice measure on each carrier).
pub fn integrate_v(model: &SncModel, g: &FunctionV) -> Result<MotClass> {
    g.validate(model)?;
    let mut total = MotClass::zero();
    for p in &g.pieces {
        let a = model.face_a(&p.carrier.face)?;
        let f = p.density.mul_exp(&a.iter().map(|x| -x.clone()).collect::<Vec<_>>());
        let mut v = Rat::zero();
        for s in triangulate(&p.carrier.rays, p.carrier.ambient_dim())? {
            v += integrate_cone(&f, &s)?;
        }
        total = total + p.coeff.scale(&v);
    }
    Ok(total)
}

/// `b^{-1}(S)`: preimages of each piece in every source face over its face.
pub fn pullback_set(phi: &ModelMorphism, source: &SncModel, s: &PolySet) -> Result<PolySet> {
    let mut out = Vec::new();
    for piece in &s.pieces {
        let m = piece.ambient_dim();
        let simplices = triangulate(&piece.rays, m)?;
        for k in source.faces() {
            let (j, lam) = phi.face_map(&k)?;
            if j != piece.face {
                continue;
            }
            for sigma in &simplices {
                for rays in preimage_cones(&lam, sigma, k.len(), m, None)? {
                    out.push(FaceCone::new(k.clone(), rays));
                }
            }
        }
    }
    Ok(PolySet::new(out))
}

/// `b^*(f)`: compose each term with the face maps over its face.
pub fn pullback_function(phi: &ModelMorphism, source: &SncModel, f: &MotivicFunction) -> Result<MotivicFunction> {
    let mut terms = Vec::new();
    for t in &f.terms {
        let m = t.piece.ambient_dim();
        let simplices = triangulate(&t.piece.rays, m)?;
        for k in source.faces() {
            let (j, lam) = phi.face_map(&k)?;
            if j != t.piece.face {
                continue;
            }
            let density = t.density.compose_linear(&lam, k.len());
            for sigma in &simplices {
                for rays in preimage_cones(&lam, sigma, k.len(), m, None)? {
                    if linalg::rank(&rays, k.len()) < k.len() {
                        continue;
                    }
                    terms.push(MotTerm { coeff: t.coeff.clone(), piece: FaceCone::new(k.clone(), rays), density: density.clone() });
                }
            }
        }
    }
    Ok(MotivicFunction { terms })
}

/// Module product `f · g` of a motivic function and a function on the same model.
pub fn multiply(f: &MotivicFunction, g: &FunctionV) -> Result<FunctionV> {
    let mut pieces = Vec::new();
    for p in &g.pieces {
        let n = p.carrier.ambient_dim();
        let gs = triangulate(&p.carrier.rays, n)?;
        for t in f.terms.iter().filter(|t| t.piece.face == p.carrier.face) {
            let fs = triangulate(&t.piece.rays, n)?;
            let coeff = &t.coeff * &p.coeff;
            if coeff.is_zero() {
                continue;
            }
            let density = t.density.mul(&p.density);
            for a in &gs {
                for b in &fs {
                    let h = simplicial_hcone(a, n).intersect(&simplicial_hcone(b, n));
                    let rays = h.rays()?;
                    if linalg::rank(&rays, n) < a.len() {
                        continue;
                    }
                    for s in triangulate(&rays, n)? {
                        pieces.push(FunctionPiece { coeff: coeff.clone(), carrier: FaceCone::new(p.carrier.face.clone(), s), density: density.clone() });
                    }
                }
            }
        }
    }
    Ok(FunctionV { pieces })
}

/// Integrate the trailing fiber variables of `density` over the cone `{z : ineqs z >= 0}`,
/// splitting by which bounds are active. Returns regions and densities in the first
/// `n_keep` variables.
fn fiber_integrate(ineqs: Vec<Vec<Rat>>, density: ExpPolyDensity, n_keep: usize) -> Result<Vec<(Vec<Vec<Rat>>, ExpPolyDensity)>> {
    let nvars = density.nvars();
    if nvars == n_keep {
        return Ok(vec![(ineqs, density)]);
    }
    let v = nvars - 1;
    let mut lowers: Vec<Vec<Rat>> = Vec::new();
    let mut uppers: Vec<Vec<Rat>> = Vec::new();
    let mut rest: Vec<Vec<Rat>> = Vec::new();
    for row in ineqs {
        let c = row[v].clone();
        let r: Vec<Rat> = row[..v].to_vec();
        if c.is_zero() {
            if r.iter().any(|x| !x.is_zero()) {
                rest.push(r);
            }
            continue;
        }
        // c z_v + r.z >= 0
        let bound: Vec<Rat> = r.iter().map(|x| -(x / &c)).collect();
        let list = if c.is_positive() { &mut lowers } else { &mut uppers };
        if !list.contains(&bound) {
            list.push(bound);
        }
    }
    let lower_choices: Vec<Option<usize>> = if lowers.is_empty() { vec![None] } else { (0..lowers.len()).map(Some).collect() };
    let upper_choices: Vec<Option<usize>> = if uppers.is_empty() { vec![None] } else { (0..uppers.len()).map(Some).collect() };
    let diff = |a: &[Rat], b: &[Rat]| -> Vec<Rat> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let mut out = Vec::new();
    for &li in &lower_choices {
        for &ui in &upper_choices {
            let mut cons = rest.clone();
            if let Some(l) = li {
                for (k, other) in lowers.iter().enumerate() {
                    if k != l {
                        cons.push(diff(&lowers[l], other));
                    }
                }
            }
            if let Some(u) = ui {
                for (k, other) in uppers.iter().enumerate() {
                    if k != u {
                        cons.push(diff(other, &uppers[u]));
                    }
                }
            }
            if let (Some(l), Some(u)) = (li, ui) {
                cons.push(diff(&uppers[u], &lowers[l]));
            }
            cons.retain(|r| r.iter().any(|x| !x.is_zero()));
            if !is_full_dim(&cons, v) {
                continue;
            }
            let lo = li.map_or(Bound::NegInf, |l| Bound::linear(lowers[l].clone()));
            let hi = ui.map_or(Bound::PosInf, |u| Bound::linear(uppers[u].clone()));
            let d = eliminate_variable(&density, v, &lo, &hi).map_err(|e| match e {
                Error::NonConvergent(m) | Error::NonIntegrable(m) => Error::NonIntegrable(format!("not integrable along the fibers: {m}")),
                other => other,
            })?;
            if d.is_zero() {
                continue;
            }
            out.extend(fiber_integrate(cons, d, n_keep)?);
        }
    }
    Ok(out)
}

/// Push-forward of one piece restricted to one simplicial cone of its carrier.
fn push_simplex(gens: &[Vec<Rat>], density: &ExpPolyDensity, a_x: &[Rat], lam: &Mat, a_y: &[Rat]) -> Result<Vec<(Vec<Vec<Rat>>, ExpPolyDensity)>> {
    let n = a_x.len();
    let m = a_y.len();
    let r = gens.len();
    let g: Vec<Vec<Rat>> = gens.iter().map(|v| primitive_rat(v)).collect();
    let gi: Vec<Vec<_>> = g.iter().map(|v| primitive(v)).collect();
    let index = int_rat(&linalg::lattice_index(&gi, n));
    let bg: Vec<Vec<Rat>> = g.iter().map(|v| linalg::mat_vec(lam, v)).collect();
    let s = linalg::rank(&bg, m);
    let basis: Vec<Vec<Rat>> = linalg::to_rat_mat(&linalg::saturated_basis(&bg, m));
    debug_assert_eq!(basis.len(), s);
    // Columns of M are coordinates of the image generators in the lattice basis.
    let mcols: Vec<Vec<Rat>> = bg.iter().map(|v| if s == 0 { Vec::new() } else { linalg::coordinates(&basis, v).expect("image in span") }).collect();
    let mrows: Mat = (0..s).map(|i| mcols.iter().map(|c| c[i].clone()).collect()).collect();
    let kernel = linalg::nullspace(&mrows, r);
    let (_, pivots) = linalg::rref(&mrows, r);
    let mb: Mat = (0..s).map(|i| pivots.iter().map(|&c| mrows[i][c].clone()).collect()).collect();
    let mb_inv = if s == 0 { Vec::new() } else { linalg::inverse(&mb).expect("pivot block invertible") };
    // t = P eta + K u, stored as the r x r matrix T = [P | K].
    let mut t: Mat = linalg::zeros(r, r);
    for (k, &c) in pivots.iter().enumerate() {
        for j in 0..s {
            t[c][j] = mb_inv[k][j].clone();
        }
    }
    for (q, kv) in kernel.iter().enumerate() {
        for i in 0..r {
            t[i][s + q] = kv[i].clone();
        }
    }
    let det_t = linalg::det(&t).abs();
    // Integrand in t, then in z = (eta, u).
    let gm: Mat = (0..n).map(|i| g.iter().map(|v| v[i].clone()).collect()).collect();
    let f_t = density.mul_exp(&a_x.iter().map(|x| -x.clone()).collect::<Vec<_>>()).compose_linear(&gm, r);
    let f_z = f_t.compose_linear(&t, r);
    let ineqs: Vec<Vec<Rat>> = t.clone();
    let factor = index * det_t;
    let left = if s == 0 { Vec::new() } else { linalg::left_inverse(&basis, m).expect("basis independent") };
    let mut out = Vec::new();
    for (region, h) in fiber_integrate(ineqs, f_z, s)? {
        let rays = if s == 0 { Vec::new() } else { HCone { n: s, ineqs: region, eqs: Vec::new() }.rays()? };
        if s > 0 && linalg::rank(&rays, s) < s {
            continue;
        }
        let psi = h.scale(&factor).compose_linear(&left, m).mul_exp(a_y);
        for simplex in triangulate(&rays, s)? {
            let yr: Vec<Vec<Rat>> = simplex
                .iter()
                .map(|eta| (0..m).map(|i| basis.iter().zip(eta).fold(Rat::zero(), |acc, (b, e)| acc + &b[i] * e)).collect())
                .collect();
            out.push((yr, psi.clone()));
        }
    }
    Ok(out)
}

/// `b_!`: fiber integration along the face maps, with `ψ = e^{Â_Y} ∫ γ e^{-Â_X}`.
pub fn pushforward(source: &SncModel, target: &SncModel, phi: &ModelMorphism, g: &FunctionV) -> Result<FunctionV> {
    phi.validate(source, target)?;
    g.validate(source)?;
    let mut merged: Vec<FunctionPiece> = Vec::new();
    for p in &g.pieces {
        let face = &p.carrier.face;
        let (j, lam) = phi.face_map(face)?;
        let a_x = source.face_a(face)?;
        let a_y = target.face_a(&j)?;
        let coeff = phi.push_class(&p.coeff);
        if coeff.is_zero() {
            continue;
        }
        for simplex in triangulate(&p.carrier.rays, face.len())? {
            for (rays, psi) in push_simplex(&simplex, &p.density, &a_x, &lam, &a_y)? {
                let carrier = FaceCone::new(j.clone(), rays);
                match merged.iter_mut().find(|q| q.carrier == carrier && q.coeff == coeff) {
                    Some(q) => q.density = q.density.add(&psi),
                    None => merged.push(FunctionPiece { coeff: coeff.clone(), carrier, density: psi }),
                }
            }
        }
    }
    merged.retain(|q| !q.density.is_zero());
    Ok(FunctionV { pieces: merged })
}

/// Class-valued density `Σ [m] ⊗ d_m`.
type ClassDensity = BTreeMap<ClassMonomial, ExpPolyDensity>;

fn add_class_density(acc: &mut ClassDensity, coeff: &MotClass, d: &ExpPolyDensity) {
    for (mono, c) in coeff.terms() {
        let e = acc.entry(mono.clone()).or_insert_with(|| ExpPolyDensity::zero(d.nvars()));
        *e = e.add(&d.scale(c));
    }
    acc.retain(|_, v| !v.is_zero());
}

struct SpanGroup {
    basis: Vec<Vec<Rat>>,
    members: Vec<(Vec<Vec<Rat>>, MotClass, ExpPolyDensity)>,
}

/// A cell of the refinement: rays and facet description.
struct Cell {
    rays: Vec<Vec<Rat>>,
    hcone: HCone,
}

fn split_cells(cells: Vec<Cell>, normal: &[Rat], s: usize) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for c in cells {
        let signs: Vec<Rat> = c.rays.iter().map(|r| dot(normal, r)).collect();
        if signs.iter().all(|x| !x.is_negative()) || signs.iter().all(|x| !x.is_positive()) {
            out.push(c);
            continue;
        }
        for sign in [Rat::one(), -Rat::one()] {
            let mut h = c.hcone.clone();
            h.ineqs.push(normal.iter().map(|x| x * &sign).collect());
            let rays = h.rays()?;
            if linalg::rank(&rays, s) == s {
                out.push(Cell { rays, hcone: h });
            }
        }
    }
    Ok(out)
}

/// Whether `g` vanishes almost everywhere on each potential face (pieces compared in
/// the lattice coordinates of their common span).
pub fn is_ae_zero(g: &FunctionV) -> Result<bool> {
    let mut groups: BTreeMap<(Face, Mat), SpanGroup> = BTreeMap::new();
    for p in &g.pieces {
        let n = p.carrier.ambient_dim();
        let simplices = triangulate(&p.carrier.rays, n)?;
        let (span_key, _) = linalg::rref(&p.carrier.rays, n);
        let key = (p.carrier.face.clone(), span_key);
        let grp = groups.entry(key).or_insert_with(|| SpanGroup { basis: linalg::to_rat_mat(&linalg::saturated_basis(&p.carrier.rays, n)), members: Vec::new() });
        let s = grp.basis.len();
        let bm: Mat = (0..n).map(|i| grp.basis.iter().map(|b| b[i].clone()).collect()).collect();
        let d_eta = p.density.compose_linear(&bm, s);
        for simplex in simplices {
            let eta: Vec<Vec<Rat>> = simplex.iter().map(|r| linalg::coordinates(&grp.basis, r).unwrap_or_default()).collect();
            grp.members.push((eta, p.coeff.clone(), d_eta.clone()));
        }
    }
    for grp in groups.values() {
        let s = grp.basis.len();
        if s == 0 {
            let mut acc = ClassDensity::new();
            for (_, c, d) in &grp.members {
                add_class_density(&mut acc, c, d);
            }
            if !acc.is_empty() {
                return Ok(false);
            }
            continue;
        }
        let mut normals: Vec<Vec<Rat>> = Vec::new();
        let mut hs: Vec<HCone> = Vec::new();
        for (eta, _, _) in &grp.members {
            let h = simplicial_hcone(eta, s);
            for row in &h.ineqs {
                let p = primitive_rat(row);
                let neg: Vec<Rat> = p.iter().map(|x| -x.clone()).collect();
                if !normals.contains(&p) && !normals.contains(&neg) {
                    normals.push(p);
                }
            }
            hs.push(h);
        }
        for (k, (eta, _, _)) in grp.members.iter().enumerate() {
            let mut cells = vec![Cell { rays: eta.clone(), hcone: hs[k].clone() }];
            for nrm in &normals {
                cells = split_cells(cells, nrm, s)?;
            }
            for cell in cells {
                let q = crate::polyhedra::interior_point(&cell.rays, s);
                let mut acc = ClassDensity::new();
                for (j, (_, c, d)) in grp.members.iter().enumerate() {
                    if hs[j].ineqs.iter().all(|row| dot(row, &q).is_positive()) {
                        add_class_density(&mut acc, c, d);
                    }
                }
                if !acc.is_empty() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn equivalent(g1: &FunctionV, g2: &FunctionV) -> Result<bool> {
    is_ae_zero(&g1.sub(g2))
}

/// `b_!(b^*(f) · g)` against `f · b_!(g)`.
pub fn check_projection_formula(source: &SncModel, target: &SncModel, phi: &ModelMorphism, f: &MotivicFunction, g: &FunctionV) -> Result<bool> {
    let lhs = pushforward(source, target, phi, &multiply(&pullback_function(phi, source, f)?, g)?)?;
    let rhs = multiply(f, &pushforward(source, target, phi, g)?)?;
    equivalent(&lhs, &rhs)
}

/// Outcome of the functoriality checks for `X -b-> Y -q-> Z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctorialityReport {
    pub composition: bool,
    pub fubini_first: bool,
    pub fubini_second: bool,
}

impl FunctorialityReport {
    pub fn all(&self) -> bool {
        self.composition && self.fubini_first && self.fubini_second
    }
}

pub fn check_functoriality(x: &SncModel, y: &SncModel, z: &SncModel, b: &ModelMorphism, q: &ModelMorphism, g: &FunctionV) -> Result<FunctorialityReport> {
    let qb = b.then(q)?;
    let via_y = pushforward(x, y, b, g)?;
    let two_step = pushforward(y, z, q, &via_y)?;
    let direct = pushforward(x, z, &qb, g)?;
    let composition = equivalent(&two_step, &direct)?;
    let tx = integrate_v(x, g)?;
    let fubini_first = integrate_v(y, &via_y)? == b.push_class(&tx);
    let fubini_second = integrate_v(z, &two_step)? == qb.push_class(&tx);
    Ok(FunctorialityReport { composition, fubini_first, fubini_second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{blow_up, coordinate_model, BlowupSpec};
    use crate::rational::{rat, ratio};

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    fn ramified() -> (SncModel, SncModel, ModelMorphism) {
        let x = SncModel::from_json(r#"{"divisors":[{"id":"P","a":"1"}],"strata":[{"I":[],"class":"XU"},{"I":["P"],"class":"P"}]}"#).unwrap();
        let y = SncModel::from_json(r#"{"divisors":[{"id":"Q","a":"1"}],"strata":[{"I":[],"class":"YU"},{"I":["Q"],"class":"Q"}]}"#).unwrap();
        let phi = ModelMorphism::from_json(r#"{"source":["P"],"target":["Q"],"matrix":[["2"]],"class_map":{"P":"Q","XU":"YU"}}"#).unwrap();
        (x, y, phi)
    }

    #[test]
    fn ramified_double_cover() {
        let (x, y, phi) = ramified();
        let f = MotivicFunction {
            terms: vec![MotTerm { coeff: MotClass::unit(), piece: FaceCone::full_face(face_of(&["P"])), density: ExpPolyDensity::one(1) }],
        };
        let g = lift(&x, &f).unwrap();
        let pushed = pushforward(&x, &y, &phi, &g).unwrap();
        assert_eq!(pushed.pieces.len(), 1);
        let p = &pushed.pieces[0];
        assert_eq!(p.coeff, MotClass::symbol("Q"));
        assert_eq!(p.density, ExpPolyDensity::exp(vec![ratio(1, 2)]).scale(&ratio(1, 2)));
        assert_eq!(integrate_v(&y, &pushed).unwrap(), MotClass::symbol("Q"));
        assert_eq!(integrate_v(&x, &g).unwrap(), MotClass::symbol("P"));
    }

    #[test]
    fn identity_pushforward_is_trivial() {
        let m = coordinate_model(&[rat(1), rat(2)]);
        let g = lift(&m, &MotivicFunction::one(&m)).unwrap();
        let pushed = pushforward(&m, &m, &ModelMorphism::identity(&m), &g).unwrap();
        assert!(equivalent(&pushed, &g).unwrap());
    }

    #[test]
    fn blowup_lift_compatibility() {
        // Pushing the lift of the pull-back recovers the lift on the base.
        let m = coordinate_model(&[rat(1), rat(2)]);
        let (b, phi) = blow_up(&m, &BlowupSpec::stellar(face_of(&["D1", "D2"]))).unwrap();
        let f = MotivicFunction::one(&m);
        let up = lift(&b, &pullback_function(&phi, &b, &f).unwrap()).unwrap();
        let down = pushforward(&b, &m, &phi, &up).unwrap();
        assert!(equivalent(&down, &lift(&m, &f).unwrap()).unwrap());
        assert!(!is_ae_zero(&down).unwrap());
    }

    #[test]
    fn ae_zero_detects_refinements() {
        // The quadrant split along the diagonal equals the whole quadrant.
        let face = face_of(&["D1", "D2"]);
        let dens = ExpPolyDensity::exp(v(&[-1, 0]));
        let piece = |rays: Vec<Vec<Rat>>, c: Rat| FunctionPiece { coeff: MotClass::symbol("A").scale(&c), carrier: FaceCone::new(face.clone(), rays), density: dens.clone() };
        let whole = FunctionV { pieces: vec![piece(vec![v(&[1, 0]), v(&[0, 1])], rat(1))] };
        let split = FunctionV { pieces: vec![piece(vec![v(&[1, 0]), v(&[1, 1])], rat(1)), piece(vec![v(&[1, 1]), v(&[0, 1])], rat(1))] };
        assert!(equivalent(&whole, &split).unwrap());
        let half = FunctionV { pieces: vec![piece(vec![v(&[1, 0]), v(&[1, 1])], rat(1))] };
        assert!(!equivalent(&whole, &half).unwrap());
        // Lower-dimensional pieces live on their own span.
        let ray = FunctionV { pieces: vec![piece(vec![v(&[1, 1])], rat(1))] };
        assert!(!equivalent(&whole, &whole.add(&ray)).unwrap());
    }

    #[test]
    fn projection_formula_on_the_cover() {
        let (x, y, phi) = ramified();
        let f = MotivicFunction {
            terms: vec![MotTerm { coeff: MotClass::symbol("W"), piece: FaceCone::full_face(face_of(&["Q"])), density: ExpPolyDensity::exp(vec![rat(-1)]) }],
        };
        let g = lift(&x, &MotivicFunction::one(&x)).unwrap();
        assert!(check_projection_formula(&x, &y, &phi, &f, &g).unwrap());
    }
}
