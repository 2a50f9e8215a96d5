//! Rational polyhedral cones inside the faces of a cone complex: H- and V-descriptions,
//! triangulation, images and preimages under linear face maps.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::rational::{dot, is_nonneg, primitive_rat, serde_rat_mat, Rat};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Sorted list of divisor ids naming a face of the skeleton.
pub type Face = Vec<String>;

pub fn face_of<S: AsRef<str>>(ids: &[S]) -> Face {
    let mut f: Face = ids.iter().map(|s| s.as_ref().to_string()).collect();
    f.sort();
    f.dedup();
    f
}

/// A cone inside the closed orthant of `face`, given by generating rays in face coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCone {
    pub face: Face,
    #[serde(with = "serde_rat_mat")]
    pub rays: Vec<Vec<Rat>>,
}

impl FaceCone {
    pub fn new(face: Face, rays: Vec<Vec<Rat>>) -> Self {
        Self { face, rays }
    }

    /// The whole face orthant.
    pub fn full_face(face: Face) -> Self {
        let n = face.len();
        let rays = linalg::identity(n);
        Self { face, rays }
    }

    pub fn ambient_dim(&self) -> usize {
        self.face.len()
    }

    pub fn dim(&self) -> usize {
        linalg::rank(&self.rays, self.ambient_dim())
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim() == self.rays.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim();
        for r in &self.rays {
            if r.len() != n {
                return Err(Error::invalid(format!("ray of length {} in face of dimension {n}", r.len())));
            }
            if !is_nonneg(r) {
                return Err(Error::invalid("cone leaves the closed face orthant"));
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(Error::invalid("zero ray"));
            }
        }
        Ok(())
    }

    /// Whether a relative-interior point has all coordinates positive, so the cone
    /// really meets the open face.
    pub fn meets_open_face(&self) -> bool {
        let n = self.ambient_dim();
        (0..n).all(|i| self.rays.iter().any(|r| r[i].is_positive()))
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        match triangulate(&self.rays, self.ambient_dim()) {
            Ok(simplices) => simplices.iter().any(|s| simplex_coords(s, x).is_some_and(|c| is_nonneg(&c))),
            Err(_) => false,
        }
    }

    /// Membership in the relative interior.
    pub fn contains_relint(&self, x: &[Rat]) -> bool {
        let n = self.ambient_dim();
        let Ok(h) = HCone::from_rays(&self.rays, n) else { return false };
        h.eqs.iter().all(|e| dot(e, x).is_zero()) && h.ineqs.iter().all(|a| dot(a, x).is_positive())
    }

    pub fn triangulate(&self) -> Result<Vec<FaceCone>> {
        Ok(triangulate(&self.rays, self.ambient_dim())?
            .into_iter()
            .map(|rays| FaceCone { face: self.face.clone(), rays })
            .collect())
    }
}

/// Finite union of cones in faces of the skeleton.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySet {
    pub pieces: Vec<FaceCone>,
}

impl PolySet {
    pub fn new(pieces: Vec<FaceCone>) -> Self {
        Self { pieces }
    }

    /// Whether `x`, a point of the open face `face`, lies in the relative interior of a piece.
    pub fn membership(&self, face: &[String], x: &[Rat]) -> bool {
        self.pieces.iter().any(|p| p.face == face && p.contains_relint(x))
    }

    /// Probabilistic check that full-dimensional pieces on a common face have disjoint
    /// interiors: `samples` random interior points are tested against the other pieces.
    pub fn check_disjoint(&self, samples: usize, seed: u64) -> Result<()> {
        let full: Vec<(usize, HCone)> = self
            .pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.rays.is_empty() && p.dim() == p.ambient_dim())
            .map(|(i, p)| HCone::from_rays(&p.rays, p.ambient_dim()).map(|h| (i, h)))
            .collect::<Result<_>>()?;
        if full.len() < 2 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..samples {
            let (i, _) = &full[k % full.len()];
            let p = &self.pieces[*i];
            let n = p.ambient_dim();
            let mut x = vec![Rat::zero(); n];
            for r in &p.rays {
                let w = Rat::from_integer(rng.gen_range(1..=1000).into());
                for (xi, ri) in x.iter_mut().zip(r) {
                    *xi += &w * ri;
                }
            }
            for (j, h) in &full {
                if j != i && self.pieces[*j].face == p.face && h.ineqs.iter().all(|a| dot(a, &x).is_positive()) {
                    return Err(Error::invalid(format!("pieces {i} and {j} overlap in face {:?}", p.face)));
                }
            }
        }
        Ok(())
    }
}

/// Coordinates of `x` with respect to simplicial generators, if `x` is in their span.
pub fn simplex_coords(gens: &[Vec<Rat>], x: &[Rat]) -> Option<Vec<Rat>> {
    if gens.is_empty() {
        return x.iter().all(|v| v.is_zero()).then(Vec::new);
    }
    linalg::coordinates(gens, x)
}

/// Cone given by `ineqs . x >= 0` and `eqs . x = 0` in R^n.
#[derive(Clone, Debug, Default)]
pub struct HCone {
    pub n: usize,
    pub ineqs: Vec<Vec<Rat>>,
    pub eqs: Vec<Vec<Rat>>,
}

impl HCone {
    pub fn new(n: usize) -> Self {
        Self { n, ..Default::default() }
    }

    /// Facet description of the cone generated by `rays` (which must be pointed).
    pub fn from_rays(rays: &[Vec<Rat>], n: usize) -> Result<Self> {
        let eqs = linalg::nullspace(rays, n);
        // Facet normals are the extreme rays of the dual cone restricted to the span.
        let span_dual = HCone { n, ineqs: rays.to_vec(), eqs: eqs.clone() };
        let normals = span_dual.rays()?;
        Ok(HCone { n, ineqs: normals, eqs })
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.eqs.iter().all(|e| dot(e, x).is_zero()) && self.ineqs.iter().all(|a| !dot(a, x).is_negative())
    }

    pub fn intersect(&self, other: &HCone) -> HCone {
        let mut out = self.clone();
        out.ineqs.extend(other.ineqs.iter().cloned());
        out.eqs.extend(other.eqs.iter().cloned());
        out
    }

    /// Extreme rays (primitive, deduplicated). Errors with `NotPointed` if the cone
    /// contains a line.
    pub fn rays(&self) -> Result<Vec<Vec<Rat>>> {
        let n = self.n;
        let w = linalg::nullspace(&self.eqs, n);
        let k = w.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        // Inequalities in coordinates z of the subspace x = W z.
        let a: Mat = self
            .ineqs
            .iter()
            .map(|row| w.iter().map(|col| dot(row, col)).collect::<Vec<Rat>>())
            .filter(|r: &Vec<Rat>| r.iter().any(|x| !x.is_zero()))
            .collect();
        if linalg::rank(&a, k) < k {
            return Err(Error::NotPointed);
        }
        let mut found: BTreeSet<Vec<Rat>> = BTreeSet::new();
        for rows in (0..a.len()).combinations(k - 1) {
            let sub: Mat = rows.iter().map(|&i| a[i].clone()).collect();
            let ns = linalg::nullspace(&sub, k);
            if ns.len() != 1 {
                continue;
            }
            for sign in [Rat::one(), -Rat::one()] {
                let d: Vec<Rat> = ns[0].iter().map(|x| x * &sign).collect();
                if a.iter().all(|row| !dot(row, &d).is_negative()) {
                    let x: Vec<Rat> = (0..n).map(|i| w.iter().zip(&d).fold(Rat::zero(), |acc, (col, dz)| acc + &col[i] * dz)).collect();
                    found.insert(primitive_rat(&x));
                }
            }
        }
        Ok(found.into_iter().collect())
    }

    pub fn dim(&self) -> Result<usize> {
        let r = self.rays()?;
        Ok(linalg::rank(&r, self.n))
    }
}

/// Whether `{z in R^n : a z >= 0}` is full-dimensional. By Gordan's alternative this
/// fails exactly when a nonzero `mu >= 0` has `mu^T a = 0`.
pub fn is_full_dim(ineqs: &[Vec<Rat>], n: usize) -> bool {
    let rows: Vec<&Vec<Rat>> = ineqs.iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let m = rows.len();
    if m == 0 {
        return true;
    }
    let mut h = HCone::new(m);
    for i in 0..m {
        let mut e = vec![Rat::zero(); m];
        e[i] = Rat::one();
        h.ineqs.push(e);
    }
    for j in 0..n {
        h.eqs.push(rows.iter().map(|r| r[j].clone()).collect());
    }
    h.rays().map(|r| r.is_empty()).unwrap_or(false)
}

/// Whether a finite set of rays generates a pointed cone.
pub fn is_pointed(rays: &[Vec<Rat>], n: usize) -> bool {
    if rays.iter().all(|r| is_nonneg(r)) {
        return rays.iter().all(|r| r.iter().any(|x| !x.is_zero()));
    }
    let d = linalg::rank(rays, n);
    let dual = HCone { n, ineqs: rays.to_vec(), eqs: linalg::nullspace(rays, n) };
    match dual.rays() {
        Ok(r) => linalg::rank(&r, n) == d,
        Err(_) => false,
    }
}

/// Placing triangulation of the cone generated by `rays` in R^n: simplicial cones of
/// full dimension in the span, using only the given rays (as primitive vectors), with
/// pairwise disjoint relative interiors. The zero cone triangulates as one empty simplex.
pub fn triangulate(rays: &[Vec<Rat>], n: usize) -> Result<Vec<Vec<Vec<Rat>>>> {
    let mut uniq: Vec<Vec<Rat>> = Vec::new();
    for r in rays {
        if r.iter().all(|x| x.is_zero()) {
            continue;
        }
        let p = primitive_rat(r);
        if !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    if uniq.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    if !is_pointed(&uniq, n) {
        return Err(Error::NotPointed);
    }
    // Work in coordinates of a basis of the span.
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, r) in uniq.iter().enumerate() {
        let mut t = basis.clone();
        t.push(r.clone());
        if linalg::rank(&t, n) > basis.len() {
            basis = t;
            chosen.push(i);
        }
    }
    let d = basis.len();
    let pts: Vec<Vec<Rat>> = uniq.iter().map(|r| linalg::coordinates(&basis, r).expect("ray in span")).collect();

    let mut simplices: Vec<Vec<usize>> = vec![chosen.clone()];
    for (i, p) in pts.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let mut facet_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for s in &simplices {
            for f in s.iter().copied().combinations(d - 1) {
                let mut f = f;
                f.sort();
                *facet_count.entry(f).or_insert(0) += 1;
            }
        }
        let mut new = Vec::new();
        for s in &simplices {
            for &v in s {
                let mut f: Vec<usize> = s.iter().copied().filter(|&u| u != v).collect();
                f.sort();
                if facet_count[&f] != 1 {
                    continue;
                }
                let fm: Mat = f.iter().map(|&u| pts[u].clone()).collect();
                let ns = linalg::nullspace(&fm, d);
                debug_assert_eq!(ns.len(), 1);
                let mut eta = ns[0].clone();
                if dot(&eta, &pts[v]).is_negative() {
                    eta = eta.into_iter().map(|x| -x).collect();
                }
                if dot(&eta, p).is_negative() {
                    let mut s2 = f.clone();
                    s2.push(i);
                    new.push(s2);
                }
            }
        }
        simplices.extend(new);
    }
    Ok(simplices.into_iter().map(|s| s.into_iter().map(|i| uniq[i].clone()).collect()).collect())
}

/// Facet inequalities of a simplicial cone: `coords_j(x) >= 0`, plus span equations.
pub fn simplicial_hcone(gens: &[Vec<Rat>], n: usize) -> HCone {
    let eqs = linalg::nullspace(gens, n);
    let ineqs = if gens.is_empty() {
        Vec::new()
    } else {
        linalg::left_inverse(gens, n).expect("independent generators")
    };
    HCone { n, ineqs, eqs }
}

/// Triangulated image of a cone under the linear map `lambda` (rows: target coords).
pub fn image_cone(lambda: &[Vec<Rat>], cone: &[Vec<Rat>], target_dim: usize) -> Result<Vec<Vec<Vec<Rat>>>> {
    let imgs: Vec<Vec<Rat>> = cone.iter().map(|r| linalg::mat_vec(lambda, r)).collect();
    triangulate(&imgs, target_dim)
}

/// Triangulated preimage `{x >= 0 : lambda x in sigma}` of a simplicial cone `sigma`
/// (in R^m) under `lambda : R^n -> R^m`, restricted further by `extra` if given.
pub fn preimage_cones(
    lambda: &[Vec<Rat>],
    sigma: &[Vec<Rat>],
    n: usize,
    m: usize,
    extra: Option<&HCone>,
) -> Result<Vec<Vec<Vec<Rat>>>> {
    let hs = simplicial_hcone(sigma, m);
    let pull = |row: &Vec<Rat>| -> Vec<Rat> { (0..n).map(|j| (0..m).fold(Rat::zero(), |acc, i| acc + &row[i] * &lambda[i][j])).collect() };
    let mut h = HCone::new(n);
    for i in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[i] = Rat::one();
        h.ineqs.push(e);
    }
    h.ineqs.extend(hs.ineqs.iter().map(pull));
    h.eqs.extend(hs.eqs.iter().map(pull));
    if let Some(x) = extra {
        h = h.intersect(x);
    }
    triangulate(&h.rays()?, n)
}

/// Sum of generators, a relative-interior point of a cone.
pub fn interior_point(gens: &[Vec<Rat>], n: usize) -> Vec<Rat> {
    let mut p = vec![Rat::zero(); n];
    for g in gens {
        for (a, b) in p.iter_mut().zip(g) {
            *a += b;
        }
    }
    p
}
