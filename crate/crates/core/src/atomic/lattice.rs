//! Exact generating sums `Σ_{z ∈ P ∩ Z^n} w(z) L^{β(z)}` over rational polyhedra, via a
//! half-open triangulation of the homogenized cone.

use super::AffineForm;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::poly::Poly;
use crate::polyhedra::{simplicial_hcone, triangulate, HCone};
use crate::rational::{as_i64, int_rat, Int, Rat};
use crate::ring::{poly_sum_from_zero, AtomicScalar};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// `{z ∈ Z^n : eqs, ineqs}` with rows `(a, b)` meaning `a·z = b` and `a·z >= b`.
#[derive(Clone, Debug, Default)]
pub struct LatticePolyhedron {
    pub n: usize,
    pub eqs: Vec<(Vec<Int>, Int)>,
    pub ineqs: Vec<(Vec<Int>, Int)>,
}

/// `Σ_{λ ∈ N^d} w(base + Σ λ_j g_j) L^{β(base + Σ λ_j g_j)}`.
pub fn semigroup_sum(base: &[Rat], gens: &[Vec<Rat>], beta: &AffineForm, weight: &Poly) -> Result<AtomicScalar> {
    let b0 = beta.eval(base);
    let e0 = as_i64(&b0).ok_or_else(|| Error::invalid(format!("exponent {b0} is not an integer on the lattice set")))?;
    let mut steps = Vec::with_capacity(gens.len());
    for g in gens {
        let c = crate::rational::dot(&beta.linear, g);
        let ci = as_i64(&c).ok_or_else(|| Error::invalid(format!("exponent step {c} is not an integer")))?;
        if ci >= 0 {
            return Err(Error::NonConvergent(format!("exponent does not decrease along a generator (step {ci})")));
        }
        steps.push(ci);
    }
    let n = base.len();
    let d = gens.len();
    // x = base + G λ
    let a: Mat = (0..n).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect();
    let w = weight.compose_affine(&a, base, d);
    let mut total = AtomicScalar::zero();
    for (alpha, c) in w.terms() {
        let mut term = AtomicScalar::from_rat(c.clone());
        for (k, step) in alpha.iter().zip(&steps) {
            term = &term * &poly_sum_from_zero(*k, *step)?;
        }
        total = total + term;
    }
    Ok(&total * &AtomicScalar::l_pow(e0))
}

fn frac(x: &Rat) -> Rat {
    x - Rat::from_integer(x.numer().div_floor(x.denom()))
}

/// Representatives `c ∈ [0,1)^d` of `Z^d / g Z^d`, as coefficient vectors.
fn parallelepiped(g: &Mat) -> Vec<Vec<Rat>> {
    let d = g.len();
    let inv = linalg::inverse(g).expect("simplicial generators");
    // gens of the group: columns of g^{-1}
    let steps: Vec<Vec<Rat>> = (0..d).map(|j| (0..d).map(|i| inv[i][j].clone()).collect()).collect();
    let zero = vec![Rat::zero(); d];
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut queue = vec![zero];
    while let Some(c) = queue.pop() {
        for s in &steps {
            let next: Vec<Rat> = c.iter().zip(s).map(|(a, b)| frac(&(a + b))).collect();
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn lattice_sum(p: &LatticePolyhedron, beta: &AffineForm, weight: &Poly) -> Result<AtomicScalar> {
    let n = p.n;
    // Integer parametrization of the equality set: z = z0 + W μ.
    let (z0, w): (Vec<Int>, Vec<Vec<Int>>) = if p.eqs.is_empty() {
        (vec![Int::zero(); n], (0..n).map(|i| (0..n).map(|j| Int::from((i == j) as i64)).collect()).collect())
    } else {
        let a: Vec<Vec<Int>> = p.eqs.iter().map(|(r, _)| r.clone()).collect();
        let b: Vec<Int> = p.eqs.iter().map(|(_, b)| b.clone()).collect();
        match linalg::integer_solve(&a, &b, n) {
            Some(s) => s,
            None => return Ok(AtomicScalar::zero()),
        }
    };
    let k = w.len();
    let z0r: Vec<Rat> = z0.iter().map(int_rat).collect();
    // z as affine function of μ
    let wm: Mat = (0..n).map(|i| w.iter().map(|col| int_rat(&col[i])).collect()).collect();
    let beta_mu = AffineForm {
        linear: (0..k).map(|j| (0..n).fold(Rat::zero(), |acc, i| acc + &beta.linear[i] * &wm[i][j])).collect(),
        constant: beta.eval(&z0r),
    };
    let weight_mu = weight.compose_affine(&wm, &z0r, k);
    let rows: Vec<(Vec<Rat>, Rat)> = p
        .ineqs
        .iter()
        .map(|(a, b)| {
            let ar: Vec<Rat> = a.iter().map(int_rat).collect();
            let row: Vec<Rat> = (0..k).map(|j| (0..n).fold(Rat::zero(), |acc, i| acc + &ar[i] * &wm[i][j])).collect();
            (row, int_rat(b) - crate::rational::dot(&ar, &z0r))
        })
        .collect();
    if k == 0 {
        if rows.iter().all(|(_, rhs)| !rhs.is_positive()) {
            return semigroup_sum(&[], &[], &beta_mu, &weight_mu);
        }
        return Ok(AtomicScalar::zero());
    }
    // Homogenized cone in (μ, h).
    let mut cone = HCone::new(k + 1);
    for (row, rhs) in &rows {
        let mut r = row.clone();
        r.push(-rhs.clone());
        cone.ineqs.push(r);
    }
    let mut hrow = vec![Rat::zero(); k + 1];
    hrow[k] = Rat::one();
    cone.ineqs.push(hrow);
    let rays = cone.rays().map_err(|e| match e {
        Error::NotPointed => Error::NonConvergent("lattice set contains a line".into()),
        other => other,
    })?;
    if !rays.iter().any(|r| r[k].is_positive()) {
        return Ok(AtomicScalar::zero());
    }
    let simplices = triangulate(&rays, k + 1)?;
    let basis = linalg::to_rat_mat(&linalg::saturated_basis(&rays, k + 1));
    let y = generic_point(&rays, &simplices, k + 1)?;

    let mut total = AtomicScalar::zero();
    for gens in &simplices {
        let d = gens.len();
        let glat: Mat = {
            let cols: Vec<Vec<Rat>> = gens.iter().map(|g| linalg::coordinates(&basis, g).expect("generator in span")).collect();
            (0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
        };
        let cy = linalg::coordinates(gens, &y).expect("y in span");
        let open: Vec<bool> = cy.iter().map(|c| c.is_negative()).collect();
        let heights: Vec<Rat> = gens.iter().map(|g| g[k].clone()).collect();
        let rec: Vec<Vec<Rat>> = gens.iter().filter(|g| g[k].is_zero()).map(|g| g[..k].to_vec()).collect();
        for mut c in parallelepiped(&glat) {
            for j in 0..d {
                if open[j] && c[j].is_zero() {
                    c[j] = Rat::one();
                }
            }
            let point: Vec<Rat> = (0..=k).map(|i| gens.iter().zip(&c).fold(Rat::zero(), |acc, (g, cj)| acc + &g[i] * cj)).collect();
            let h = point[k].clone();
            let mut bases = Vec::new();
            if h.is_one() {
                bases.push(point[..k].to_vec());
            } else if h.is_zero() {
                for (g, hg) in gens.iter().zip(&heights) {
                    if hg.is_one() {
                        bases.push(point[..k].iter().zip(g).map(|(a, b)| a + b).collect::<Vec<Rat>>());
                    }
                }
            }
            for b in bases {
                total = total + semigroup_sum(&b, &rec, &beta_mu, &weight_mu)?;
            }
        }
    }
    Ok(total)
}

/// A point in the interior of the cone off every wall of the triangulation.
fn generic_point(rays: &[Vec<Rat>], simplices: &[Vec<Vec<Rat>>], n: usize) -> Result<Vec<Rat>> {
    let walls: Vec<HCone> = simplices.iter().map(|s| simplicial_hcone(s, n)).collect();
    for base in [7i64, 11, 13, 17, 19, 23, 29, 31] {
        let mut y = vec![Rat::zero(); n];
        let mut w = Rat::one();
        for r in rays {
            w *= Rat::from_integer(base.into());
            for (a, b) in y.iter_mut().zip(r) {
                *a += &w * b;
            }
        }
        // Slightly unbalance the weights so that symmetric configurations are avoided.
        for (i, r) in rays.iter().enumerate() {
            let eps = Rat::new(1.into(), (base * (i as i64 + 3)).into());
            for (a, b) in y.iter_mut().zip(r) {
                *a += &eps * b;
            }
        }
        if walls.iter().all(|h| h.ineqs.iter().all(|row| !crate::rational::dot(row, &y).is_zero())) {
            return Ok(y);
        }
    }
    Err(Error::Unsupported("could not find a generic interior point".into()))
}
