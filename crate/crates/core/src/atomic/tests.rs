use super::*;
use crate::model::coordinate_model;
use crate::rational::{rat, ratio};
use num_traits::pow;

fn iv(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| Int::from(x)).collect()
}

fn lp(terms: &[(i64, i64)]) -> AtomicScalar {
    AtomicScalar::from_poly(LaurentPoly::from_terms(terms.iter().map(|&(e, c)| (e, rat(c)))))
}

fn q_pow(q: &Rat, e: i64) -> Rat {
    if e >= 0 {
        pow(q.clone(), e as usize)
    } else {
        pow(Rat::one() / q, (-e) as usize)
    }
}

/// Truncated `Σ weight·q^β` over the cell with `λ_j <= radius`.
fn brute_cell(cell: &LatticeCell, beta: &AffineForm, weight: &Poly, q: &Rat, radius: u32) -> Rat {
    let d = cell.dim();
    let mut lam = vec![0u32; d];
    let mut total = Rat::zero();
    loop {
        let x: Vec<Rat> = (0..cell.face.len())
            .map(|i| int_rat(&cell.offset[i]) + (0..d).fold(Rat::zero(), |acc, j| acc + int_rat(&cell.generators[j][i]) * rat(lam[j] as i64)))
            .collect();
        total += weight.eval(&x) * q_pow(q, as_i64(&beta.eval(&x)).unwrap());
        let mut j = 0;
        loop {
            if j == d {
                return total;
            }
            lam[j] += 1;
            if lam[j] <= radius {
                break;
            }
            lam[j] = 0;
            j += 1;
        }
    }
}

#[test]
fn geometric_cell_sums() {
    // Σ_{m >= 1} L^{-(d+1) m} = 1/(L^{d+1} - 1)
    let ray = LatticeCell::full(face_of(&["D"]));
    let s = cell_sum(&ray, &AffineForm::linear(vec![rat(-3)]), &Poly::one(1)).unwrap();
    assert_eq!(&s * &lp(&[(3, 1), (0, -1)]), AtomicScalar::one());
    // even cell n = 2 + 2λ with exponent -n/2
    let even = LatticeCell::new(face_of(&["D"]), iv(&[2]), vec![iv(&[2])]);
    let s = cell_sum(&even, &AffineForm::linear(vec![ratio(-1, 2)]), &Poly::one(1)).unwrap();
    assert_eq!(&s * &lp(&[(1, 1), (0, -1)]), AtomicScalar::one());
    let point = LatticeCell::new(face_of(&["D"]), iv(&[3]), vec![]);
    assert_eq!(cell_sum(&point, &AffineForm::linear(vec![rat(-1)]), &Poly::one(1)).unwrap(), AtomicScalar::l_pow(-3));
}

#[test]
fn weighted_ray_against_truncation() {
    // Σ m L^{-m}; combined with the (L - 1) factor of the face this is L/(L - 1).
    let ray = LatticeCell::full(face_of(&["D"]));
    let beta = AffineForm::linear(vec![rat(-1)]);
    let s = cell_sum(&ray, &beta, &Poly::var(1, 0)).unwrap();
    let vol = &l_minus_one_power(1) * &s;
    assert_eq!(&vol * &lp(&[(1, 1), (0, -1)]), AtomicScalar::l_pow(1));
    for q in [rat(2), rat(3)] {
        let exact = s.theta_q(&q).unwrap();
        let approx = brute_cell(&ray, &beta, &Poly::var(1, 0), &q, 200);
        let gap = &exact - &approx;
        assert!(gap >= Rat::zero() && gap < Rat::new(1.into(), Int::from(10).pow(40u32)));
    }
}

#[test]
fn divergent_and_ill_formed_cells() {
    let ray = LatticeCell::full(face_of(&["D"]));
    assert!(matches!(cell_sum(&ray, &AffineForm::linear(vec![rat(0)]), &Poly::one(1)), Err(Error::NonConvergent(_))));
    let bad = LatticeCell::new(face_of(&["D"]), iv(&[0]), vec![]);
    assert!(cell_sum(&bad, &AffineForm::zero(1), &Poly::one(1)).is_err());
    let dep = LatticeCell::new(face_of(&["D1", "D2"]), iv(&[1, 1]), vec![iv(&[1, 1]), iv(&[2, 2])]);
    assert!(dep.validate().is_err());
    let odd = LatticeCell::new(face_of(&["D"]), iv(&[1]), vec![iv(&[2])]);
    assert!(cell_sum(&odd, &AffineForm::linear(vec![ratio(-1, 2)]), &Poly::one(1)).is_err());
}

#[test]
fn cell_sum_agrees_with_lattice_sum() {
    let cell = LatticeCell::new(face_of(&["D1", "D2"]), iv(&[2, 1]), vec![iv(&[1, 2]), iv(&[3, 1])]);
    let beta = AffineForm { linear: vec![rat(-2), rat(-1)], constant: rat(1) };
    let weight = Poly::var(2, 0).mul(&Poly::var(2, 1)).add(&Poly::constant(2, rat(3)));
    let direct = cell_sum(&cell, &beta, &weight).unwrap();
    // the same points as {x = v + Uλ, λ >= 0} in (x, λ) space
    let mut p = LatticePolyhedron { n: 4, ..Default::default() };
    p.eqs.push((iv(&[1, 0, -1, -3]), Int::from(2)));
    p.eqs.push((iv(&[0, 1, -2, -1]), Int::from(1)));
    p.ineqs.push((iv(&[0, 0, 1, 0]), Int::zero()));
    p.ineqs.push((iv(&[0, 0, 0, 1]), Int::zero()));
    let lifted = AffineForm { linear: vec![rat(-2), rat(-1), rat(0), rat(0)], constant: rat(1) };
    let w4 = Poly::var(4, 0).mul(&Poly::var(4, 1)).add(&Poly::constant(4, rat(3)));
    assert_eq!(lattice_sum(&p, &lifted, &w4).unwrap(), direct);
    for q in [rat(2), rat(3)] {
        let gap = direct.theta_q(&q).unwrap() - brute_cell(&cell, &beta, &weight, &q, 60);
        assert!(gap >= Rat::zero() && gap < Rat::new(1.into(), Int::from(10).pow(20u32)));
    }
}

#[test]
fn atomic_volumes_of_coordinate_models() {
    let m = coordinate_model(&[rat(1)]);
    let full = PresburgerSet::full_skeleton(&m);
    assert_eq!(atomic_measure(&m, &full).unwrap(), AtomicClass::symbol("U") + AtomicClass::symbol("D1o"));
    let plane = coordinate_model(&[rat(1), rat(1)]);
    let expect: AtomicClass = ["U", "D1o", "D2o", "D12o"].iter().map(|s| AtomicClass::symbol(*s)).sum();
    assert_eq!(atomic_measure(&plane, &PresburgerSet::full_skeleton(&plane)).unwrap(), expect);
    // (L - 1)/(L^3 - 1) -> 1/3
    let a3 = coordinate_model(&[rat(3)]);
    let v = atomic_measure(&a3, &PresburgerSet { cells: vec![LatticeCell::full(face_of(&["D1"]))] }).unwrap();
    assert_eq!(v.limit_l1().unwrap(), MotClass::symbol("D1o").scale(&ratio(1, 3)));
}

#[test]
fn classical_integral_of_a_divisor() {
    // L^{-ord Σ d_i D_i} with d = (1, 2) gives Σ_I [D_I°] / ∏_{i ∈ I} [P^{d_i}]
    let m = coordinate_model(&[rat(1), rat(1)]);
    let d = [rat(1), rat(2)];
    let terms: Vec<AtomicTerm> = m
        .faces()
        .into_iter()
        .map(|f| {
            let lin = f.iter().map(|i| -d[if i == "D1" { 0 } else { 1 }].clone()).collect();
            AtomicTerm { beta: AffineForm::linear(lin), ..AtomicTerm::new(AtomicClass::unit(), LatticeCell::full(f)) }
        })
        .collect();
    let got = atomic_integrate(&m, &terms).unwrap();
    let p1 = AtomicScalar::with_denominators(LaurentPoly::l_pow(-2), &[2]);
    let p2 = AtomicScalar::with_denominators(LaurentPoly::l_pow(-3), &[3]);
    // 1/[P^d] = (L - 1)/(L^{d+1} - 1) = (L - 1) L^{-d-1}/(1 - L^{-d-1})
    let inv1 = &p1 * &lp(&[(1, 1), (0, -1)]);
    let inv2 = &p2 * &lp(&[(1, 1), (0, -1)]);
    let expect = AtomicClass::symbol("U")
        + AtomicClass::symbol("D1o").scale(&inv1)
        + AtomicClass::symbol("D2o").scale(&inv2)
        + AtomicClass::symbol("D12o").scale(&(&inv1 * &inv2));
    assert_eq!(got, expect);
}

fn ramified_cover() -> (SncModel, SncModel, ModelMorphism) {
    let x = SncModel::from_json(r#"{"divisors":[{"id":"P","a":"1"}],"strata":[{"I":[],"class":"X0"},{"I":["P"],"class":"P"}]}"#).unwrap();
    let y = SncModel::from_json(r#"{"divisors":[{"id":"Q","a":"1"}],"strata":[{"I":[],"class":"Y0"},{"I":["Q"],"class":"Q"}]}"#).unwrap();
    let phi = ModelMorphism::from_json(r#"{"source":["P"],"target":["Q"],"matrix":[["2"]],"class_map":{"P":"Q","X0":"Y0"}}"#).unwrap();
    (x, y, phi)
}

#[test]
fn ramified_cover_pushes_to_even_cells() {
    let (x, y, phi) = ramified_cover();
    let f = vec![AtomicTerm::new(AtomicClass::unit(), LatticeCell::full(face_of(&["P"])))];
    let pushed = atomic_pushforward(&x, &y, &phi, &f).unwrap();
    assert_eq!(pushed.len(), 1);
    let t = &pushed[0];
    assert_eq!(t.cell, LatticeCell::new(face_of(&["Q"]), iv(&[2]), vec![iv(&[2])]));
    assert_eq!(t.beta, AffineForm::linear(vec![ratio(1, 2)]));
    assert_eq!(t.coeff, AtomicClass::symbol("Q"));
    assert_eq!(atomic_integrate(&y, &pushed).unwrap(), AtomicClass::symbol("Q"));
    assert_eq!(phi.push_atomic(&atomic_integrate(&x, &f).unwrap()), AtomicClass::symbol("Q"));
}

#[test]
fn pushforward_folds_killed_directions() {
    // projection of the quadrant face onto its first coordinate
    let x = coordinate_model(&[rat(1), rat(2)]);
    let y = coordinate_model(&[rat(1)]);
    let phi = ModelMorphism::from_json(r#"{"source":["D1","D2"],"target":["D1"],"matrix":[["1"],["0"]],"class_map":{"D12o":"D1o","D2o":"U"}}"#).unwrap();
    let weight = Poly::var(2, 0).mul(&Poly::var(2, 1));
    let f = vec![AtomicTerm { weight, beta: AffineForm::linear(vec![rat(0), rat(1)]), ..AtomicTerm::new(AtomicClass::unit(), LatticeCell::full(face_of(&["D1", "D2"]))) }];
    let pushed = atomic_pushforward(&x, &y, &phi, &f).unwrap();
    let lhs = atomic_integrate(&y, &pushed).unwrap();
    let rhs = phi.push_atomic(&atomic_integrate(&x, &f).unwrap());
    assert_eq!(lhs, rhs);
    let id = ModelMorphism::identity(&x);
    let same = atomic_pushforward(&x, &x, &id, &f).unwrap();
    assert_eq!(same[0].cell, f[0].cell);
    assert_eq!(atomic_integrate(&x, &same).unwrap(), atomic_integrate(&x, &f).unwrap());
}

#[test]
fn crossing_generators_are_unsupported() {
    let x = coordinate_model(&[rat(1), rat(1)]);
    let y = coordinate_model(&[rat(1)]);
    let phi = ModelMorphism::from_json(r#"{"source":["D1","D2"],"target":["D1"],"matrix":[["1"],["1"]]}"#).unwrap();
    let f = vec![AtomicTerm::new(AtomicClass::unit(), LatticeCell::full(face_of(&["D1", "D2"])))];
    assert!(matches!(atomic_pushforward(&x, &y, &phi, &f), Err(Error::Unsupported(_))));
}

#[test]
fn blowup_lemma_instances() {
    let m = coordinate_model(&[rat(1), rat(1)]);
    let stellar = BlowupSpec::stellar(face_of(&["D1", "D2"]));
    let r = check_atomic_blowup(&m, &stellar, &PresburgerSet::full_skeleton(&m)).unwrap();
    assert!(r.equal, "{} vs {}", r.lhs, r.rhs);
    let even = PresburgerSet { cells: vec![LatticeCell::new(face_of(&["D1", "D2"]), iv(&[2, 2]), vec![iv(&[2, 0]), iv(&[0, 2])])] };
    assert!(check_atomic_blowup(&m, &stellar, &even).unwrap().equal);
    // a point blown up in the open part: T = ∅, c = 2
    let pt: BlowupSpec = BlowupSpec::from_json(r#"{"T":[],"c":2,"met":[{"I":[],"inside":"pt"}]}"#).unwrap();
    let r = check_atomic_blowup(&m, &pt, &PresburgerSet::full_skeleton(&m)).unwrap();
    assert!(r.equal, "{} vs {}", r.lhs, r.rhs);
}

#[test]
fn l1_limit_matches_real_measure() {
    for a in [vec![rat(3)], vec![rat(2), rat(5)], vec![rat(1), rat(2), rat(4)], vec![]] {
        let (atomic, real, equal) = cross_check_l1(&coordinate_model(&a)).unwrap();
        assert!(equal, "{atomic} vs {real}");
    }
    assert!(cross_check_l1(&coordinate_model(&[ratio(1, 2)])).is_err());
}

#[test]
fn disjointness_oracle() {
    let odd = LatticeCell::new(face_of(&["D1"]), iv(&[1]), vec![iv(&[2])]);
    let even = LatticeCell::new(face_of(&["D1"]), iv(&[2]), vec![iv(&[2])]);
    let ok = PresburgerSet { cells: vec![odd.clone(), even] };
    assert!(ok.check_disjoint(50).is_ok());
    let m = coordinate_model(&[rat(1)]);
    assert_eq!(atomic_measure(&m, &ok).unwrap(), AtomicClass::symbol("D1o"));
    let bad = PresburgerSet { cells: vec![odd, LatticeCell::full(face_of(&["D1"]))] };
    assert!(bad.check_disjoint(50).is_err());
}

#[test]
fn terms_round_trip() {
    let s = r#"{"terms":[{"coeff":"P","face":["P"],"offset":["1"],"generators":[["1"]],"beta":{"linear":["-1/2"]},"powers":[2]}]}"#;
    let t = terms_from_json(s).unwrap();
    assert_eq!(t[0].weight, Poly::monomial(vec![2], rat(1)));
    assert_eq!(terms_from_json(&terms_to_json(&t)).unwrap(), t);
}

#[test]
fn atomic_fubini_on_random_morphisms() {
    use crate::instances::{random_morphism, random_presburger, seeded};
    use rand::Rng;
    let mut rng = seeded(21);
    let mut supported = 0;
    for _ in 0..80 {
        let (x, y, phi) = random_morphism(&mut rng, true);
        let terms: Vec<AtomicTerm> = random_presburger(&mut rng, &x)
            .cells
            .into_iter()
            .map(|c| {
                let n = c.face.len();
                let mut powers = vec![0u32; n];
                if n > 0 && rng.gen_bool(0.5) {
                    powers[rng.gen_range(0..n)] = 1;
                }
                AtomicTerm { weight: Poly::monomial(powers, rat(1)), ..AtomicTerm::new(AtomicClass::symbol("W"), c) }
            })
            .collect();
        match atomic_pushforward(&x, &y, &phi, &terms) {
            Ok(pushed) => {
                supported += 1;
                let lhs = atomic_integrate(&y, &pushed).unwrap();
                let rhs = phi.push_atomic(&atomic_integrate(&x, &terms).unwrap());
                assert_eq!(lhs, rhs);
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(supported > 40);
}

#[test]
fn atomic_measure_is_additive() {
    use crate::instances::{random_model, random_presburger, seeded};
    let mut rng = seeded(22);
    for _ in 0..30 {
        let m = random_model(&mut rng, 3, true);
        let a = random_presburger(&mut rng, &m);
        let b = random_presburger(&mut rng, &m);
        let mut both = a.clone();
        both.cells.extend(b.cells.iter().cloned());
        let sum = atomic_measure(&m, &a).unwrap() + atomic_measure(&m, &b).unwrap();
        assert_eq!(atomic_measure(&m, &both).unwrap(), sum);
    }
}
