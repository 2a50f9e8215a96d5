//! Seeded generators of random models, blow-ups, sets, functions and morphisms, used by
//! the property suites and benches.

use crate::atomic::{LatticeCell, PresburgerSet};
use crate::exp_integrals::ExpPolyDensity;
use crate::functions::{FunctionPiece, FunctionV};
use crate::linalg;
use crate::measure::{MotTerm, MotivicFunction};
use crate::model::{coordinate_model, BlowupSpec, Divisor, IdealOrders, MetEntry, ModelMorphism, SncModel};
use crate::poly::Poly;
use crate::polyhedra::{Face, FaceCone, PolySet};
use crate::rational::{rat, ratio, Int, Rat};
use crate::ring::{AtomicClass, MotClass};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symbol_for(face: &[String]) -> String {
    if face.is_empty() {
        "U".into()
    } else {
        format!("{}o", face.join(""))
    }
}

/// Random model on `1..=max_divisors` divisors: every singleton is a stratum, larger faces
/// appear with probability 3/4 when all their facets do. Log discrepancies are integers in
/// `1..=4`, or (when `integer` is false) rationals with denominator up to 3.
pub fn random_model(rng: &mut impl Rng, max_divisors: usize, integer: bool) -> SncModel {
    let n = rng.gen_range(1..=max_divisors.max(1));
    let ids: Vec<String> = (1..=n).map(|i| format!("D{i}")).collect();
    let divisors: Vec<Divisor> = ids
        .iter()
        .map(|id| {
            let a = if integer || rng.gen_bool(0.5) { rat(rng.gen_range(1..=4)) } else { ratio(rng.gen_range(1..=8), rng.gen_range(2..=3)) };
            Divisor { id: id.clone(), a }
        })
        .collect();
    let mut faces: Vec<Face> = vec![Vec::new()];
    faces.extend(ids.iter().map(|i| vec![i.clone()]));
    for size in 2..=n {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let f: Face = (0..n).filter(|k| mask & (1 << k) != 0).map(|k| ids[k].clone()).collect();
            let facets_present = (0..size).all(|drop| {
                let sub: Face = f.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, x)| x.clone()).collect();
                faces.contains(&sub)
            });
            if facets_present && rng.gen_bool(0.75) {
                faces.push(f);
            }
        }
    }
    let strata = faces.iter().map(|f| (f.clone(), AtomicClass::symbol(symbol_for(f)))).collect();
    let mut orders = IdealOrders::new();
    for id in &ids {
        let b = rng.gen_range(0..=2);
        if b > 0 {
            orders.insert(id.clone(), rat(b));
        }
    }
    if orders.is_empty() {
        orders.insert(ids[0].clone(), rat(1));
    }
    let ideals = BTreeMap::from([("Z".to_string(), orders)]);
    SncModel::new(divisors, strata, ideals).expect("generated model is valid")
}

/// Random blow-up: the center lies over a random stratum `T` (possibly empty), with
/// codimension `|T|` (the stratum closure itself) or larger, and always at least 2.
pub fn random_blowup(rng: &mut impl Rng, model: &SncModel) -> BlowupSpec {
    let faces = model.faces();
    let t = faces.choose(rng).expect("models have strata").clone();
    let stellar = t.len() >= 2 && rng.gen_bool(0.5);
    if stellar {
        return BlowupSpec::stellar(t);
    }
    let c = (t.len() as u32 + rng.gen_range(1..=2)).max(2);
    let met = faces
        .iter()
        .filter(|f| t.iter().all(|x| f.contains(x)))
        .map(|f| MetEntry { face: f.clone(), inside: AtomicClass::symbol(format!("C{}", symbol_for(f))), outside: None })
        .collect();
    BlowupSpec { t, c, exceptional: None, met }
}

/// Primitive nonnegative integer vectors spanning `R^d` (entries in `0..=3`).
pub fn random_simplicial_rays(rng: &mut impl Rng, d: usize) -> Vec<Vec<Rat>> {
    loop {
        let rays: Vec<Vec<Rat>> = (0..d).map(|_| (0..d).map(|_| rat(rng.gen_range(0..=3))).collect()).collect();
        if d == 0 || linalg::rank(&rays, d) == d {
            return rays.iter().map(|r| crate::rational::primitive_rat(r)).collect();
        }
    }
}

fn random_piece(rng: &mut impl Rng, face: &Face) -> FaceCone {
    if rng.gen_bool(0.3) {
        FaceCone::full_face(face.clone())
    } else {
        FaceCone::new(face.clone(), random_simplicial_rays(rng, face.len()))
    }
}

/// One or two random full-dimensional cones on a few random strata.
pub fn random_polyset(rng: &mut impl Rng, model: &SncModel) -> PolySet {
    let faces = model.faces();
    let mut pieces = Vec::new();
    for f in &faces {
        if rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(1..=2) {
                pieces.push(random_piece(rng, f));
            }
        }
    }
    if pieces.is_empty() {
        let f = faces.choose(rng).unwrap().clone();
        pieces.push(random_piece(rng, &f));
    }
    PolySet::new(pieces)
}

/// Polynomial of degree at most 2 with small rational coefficients.
pub fn random_poly(rng: &mut impl Rng, nvars: usize) -> Poly {
    let mut p = Poly::constant(nvars, ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)));
    for _ in 0..rng.gen_range(0..=2) {
        if nvars == 0 {
            break;
        }
        let mut powers = vec![0u32; nvars];
        for _ in 0..rng.gen_range(1..=2) {
            powers[rng.gen_range(0..nvars)] += 1;
        }
        p.add_term(powers, ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
    }
    p
}

/// Density `p(x)·e^{<mu, x>}` with `mu_i < a_i / 2`, so that it stays integrable against
/// `e^{-Â}` even after multiplication by a pulled-back decaying density.
pub fn random_density(rng: &mut impl Rng, a: &[Rat]) -> ExpPolyDensity {
    let mu: Vec<Rat> = a
        .iter()
        .map(|ai| {
            let top = (ai * rat(2) - rat(1)).floor().to_integer();
            let top = i64::try_from(top).unwrap_or(4).min(4);
            ratio(rng.gen_range(-4..=top), 4)
        })
        .collect();
    ExpPolyDensity::from_poly(random_poly(rng, a.len())).mul_exp(&mu)
}

/// Decaying density `p(x)·e^{<nu, x>}` with `nu_i ∈ [-1, 0]`.
pub fn random_decaying_density(rng: &mut impl Rng, nvars: usize) -> ExpPolyDensity {
    let nu: Vec<Rat> = (0..nvars).map(|_| ratio(-rng.gen_range(0..=2), 2)).collect();
    ExpPolyDensity::from_poly(random_poly(rng, nvars)).mul_exp(&nu)
}

fn random_coeff(rng: &mut impl Rng) -> MotClass {
    let c = MotClass::rational(ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)));
    if rng.gen_bool(0.3) {
        c + MotClass::symbol("W").scale(&ratio(rng.gen_range(-2..=2), 1))
    } else {
        c
    }
}

/// Integrable motivic function (coefficients relative to the strata).
pub fn random_function(rng: &mut impl Rng, model: &SncModel) -> MotivicFunction {
    let set = random_polyset(rng, model);
    let terms = set
        .pieces
        .into_iter()
        .map(|piece| {
            let a = model.face_a(&piece.face).expect("face of the model");
            MotTerm { coeff: random_coeff(rng), density: random_density(rng, &a), piece }
        })
        .collect();
    MotivicFunction { terms }
}

/// Motivic function with decaying densities, suitable as the `f` of a projection formula.
pub fn random_decaying_function(rng: &mut impl Rng, model: &SncModel) -> MotivicFunction {
    let set = random_polyset(rng, model);
    let terms = set
        .pieces
        .into_iter()
        .map(|piece| {
            let n = piece.face.len();
            MotTerm { coeff: random_coeff(rng), density: random_decaying_density(rng, n), piece }
        })
        .collect();
    MotivicFunction { terms }
}

/// Relatively integrable function on the skeleton (coefficients include the stratum).
pub fn random_function_v(rng: &mut impl Rng, model: &SncModel) -> FunctionV {
    let f = random_function(rng, model);
    let pieces = f
        .terms
        .into_iter()
        .map(|t| FunctionPiece { coeff: &t.coeff * &model.mot_class(&t.piece.face).unwrap(), carrier: t.piece, density: t.density })
        .collect();
    FunctionV { pieces }
}

/// Cell with offset entries in `1..=3` and up to `|I|` independent generators.
pub fn random_cell(rng: &mut impl Rng, face: &Face) -> LatticeCell {
    let n = face.len();
    let offset: Vec<Int> = (0..n).map(|_| Int::from(rng.gen_range(1..=3))).collect();
    let d = rng.gen_range(0..=n);
    loop {
        let gens: Vec<Vec<Int>> = (0..d).map(|_| (0..n).map(|_| Int::from(rng.gen_range(0..=2))).collect()).collect();
        let cell = LatticeCell::new(face.clone(), offset.clone(), gens);
        if cell.validate().is_ok() {
            return cell;
        }
    }
}

/// At most one random cell per stratum, so the cells are disjoint.
pub fn random_presburger(rng: &mut impl Rng, model: &SncModel) -> PresburgerSet {
    let faces = model.faces();
    let mut cells = Vec::new();
    for f in &faces {
        if rng.gen_bool(0.5) {
            cells.push(random_cell(rng, f));
        }
    }
    if cells.is_empty() {
        let f = faces.choose(rng).unwrap().clone();
        cells.push(random_cell(rng, &f));
    }
    PresburgerSet { cells }
}

/// A source model, a target model and a morphism between them: either the blow-down of a
/// random blow-up, or a monomial map between coordinate models.
pub fn random_morphism(rng: &mut impl Rng, integer: bool) -> (SncModel, SncModel, ModelMorphism) {
    if rng.gen_bool(0.5) {
        let y = random_model(rng, 3, integer);
        let spec = random_blowup(rng, &y);
        let (x, phi) = crate::model::blow_up(&y, &spec).expect("generated blow-up is valid");
        (x, y, phi)
    } else {
        let y = coordinate_model(&(0..rng.gen_range(1..=2)).map(|_| rat(rng.gen_range(1..=3))).collect::<Vec<_>>());
        let (x, phi) = monomial_over(rng, &y);
        (x, y, phi)
    }
}

/// Coordinate model `X` with a monomial morphism `X -> Y` onto a coordinate model `Y`.
fn monomial_over(rng: &mut impl Rng, y: &SncModel) -> (SncModel, ModelMorphism) {
    let n = rng.gen_range(1..=3);
    let x = coordinate_model(&(0..n).map(|_| rat(rng.gen_range(1..=3))).collect::<Vec<_>>());
    let m = y.divisor_ids().len();
    let mut matrix: Vec<Vec<Int>> = (0..n)
        .map(|_| loop {
            let row: Vec<Int> = (0..m).map(|_| Int::from(rng.gen_range(0..=2))).collect();
            if row.iter().any(|v| v > &Int::from(0)) {
                break row;
            }
        })
        .collect();
    for j in 0..m {
        if matrix.iter().all(|r| r[j] == Int::from(0)) {
            matrix[rng.gen_range(0..n)][j] = Int::from(1);
        }
    }
    let mut phi = ModelMorphism { source: x.divisor_ids(), target: y.divisor_ids(), matrix, class_map: BTreeMap::new() };
    for f in x.faces() {
        let (j, _) = phi.face_map(&f).expect("face of the source");
        let from = x.mot_class(&f).unwrap().symbols().next().cloned().unwrap();
        let to = y.mot_class(&j).unwrap().symbols().next().cloned().unwrap();
        phi.class_map.insert(from, to);
    }
    (x, phi)
}

/// Models `X -> Y -> Z` with the two morphisms.
pub fn random_tower(rng: &mut impl Rng) -> (SncModel, SncModel, SncModel, ModelMorphism, ModelMorphism) {
    if rng.gen_bool(0.5) {
        let z = random_model(rng, 2, false);
        let (y, q) = crate::model::blow_up(&z, &random_blowup(rng, &z)).expect("valid blow-up");
        let (x, b) = crate::model::blow_up(&y, &random_blowup(rng, &y)).expect("valid blow-up");
        (x, y, z, b, q)
    } else {
        let z = coordinate_model(&(0..rng.gen_range(1..=2)).map(|_| rat(rng.gen_range(1..=3))).collect::<Vec<_>>());
        let (y, q) = monomial_over(rng, &z);
        let (x, b) = if rng.gen_bool(0.5) {
            monomial_over(rng, &y)
        } else {
            let spec = random_blowup(rng, &y);
            crate::model::blow_up(&y, &spec).expect("valid blow-up")
        };
        (x, y, z, b, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_produce_valid_data() {
        let mut rng = seeded(7);
        for _ in 0..30 {
            let m = random_model(&mut rng, 3, false);
            let spec = random_blowup(&mut rng, &m);
            crate::model::blow_up(&m, &spec).unwrap();
            random_function(&mut rng, &m).validate(&m).unwrap();
            random_function_v(&mut rng, &m).validate(&m).unwrap();
            let cells = random_presburger(&mut rng, &m);
            cells.validate(&m).unwrap();
            cells.check_disjoint(20).unwrap();
            let (x, y, phi) = random_morphism(&mut rng, false);
            phi.validate(&x, &y).unwrap();
            let (x, y, z, b, q) = random_tower(&mut rng);
            b.validate(&x, &y).unwrap();
            q.validate(&y, &z).unwrap();
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_model(&mut seeded(3), 3, true).to_json();
        let b = random_model(&mut seeded(3), 3, true).to_json();
        assert_eq!(a, b);
    }
}
