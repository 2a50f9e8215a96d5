//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons throughout.

use motint::atomic::{self, AffineForm, AtomicTerm, LatticeCell};
use motint::exp_integrals::{integrate_cone, ExpPolyDensity};
use motint::functions::{self, FunctionV};
use motint::instances::{self, seeded};
use motint::linalg;
use motint::measure::{self, MotivicFunction};
use motint::model::{self, ModelMorphism, SncModel};
use motint::poly::Poly;
use motint::polyhedra::face_of;
use motint::rational::{as_i64, int_rat, rat, ratio, to_f64, Int};
use motint::ring::{AtomicClass, AtomicScalar, LaurentPoly, MotClass};
use motint::{Error, Rat};
use num_traits::{One, Zero};
use rand::Rng;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load_model(name: &str) -> SncModel {
    SncModel::from_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_motint")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mot(pairs: &[(&str, Rat)]) -> MotClass {
    pairs.iter().map(|(s, c)| if *s == "1" { MotClass::rational(c.clone()) } else { MotClass::symbol(*s).scale(c) }).sum()
}

fn criterion_1() -> Outcome {
    let path = fixture("model_a23.json");
    let (code, text) = cli(&["stringy", path.to_str().unwrap()]);
    let expect = "[U] + 1/2·[D1o] + 1/3·[D2o] + 1/6·[D12o]";
    ensure(code == 0 && text == expect, || format!("exit {code}, output `{text}`"))?;
    let exact = measure::stringy_class(&load_model("model_a23.json")).map_err(|e| e.to_string())?;
    let want = mot(&[("U", rat(1)), ("D1o", ratio(1, 2)), ("D2o", ratio(1, 3)), ("D12o", ratio(1, 6))]);
    ensure(exact == want, || format!("engine value {exact}"))?;
    Ok(text)
}

fn criterion_2() -> Outcome {
    let m = load_model("model_plane.json");
    let v = measure::integrate_ideal_power(&m, "Z", &rat(1)).map_err(|e| e.to_string())?;
    let want = mot(&[("U", rat(1)), ("D1o", ratio(1, 2)), ("D2o", ratio(1, 2)), ("D12o", ratio(1, 4))]);
    ensure(v == want, || format!("got {v}"))?;
    Ok(m.class_order().render_mot(&v))
}

fn criterion_3() -> Outcome {
    let path = fixture("model_cusp.json");
    let (code, text) = cli(&["lct", path.to_str().unwrap(), "--ideal", "Z"]);
    ensure(code == 0 && text == "5/6", || format!("lct printed `{text}` (exit {code})"))?;
    let m = load_model("model_cusp.json");
    ensure(model::mather_lct(&m, "Z") == Ok(ratio(5, 6)), || "engine lct differs".into())?;
    let threshold = ratio(-5, 6);
    for k in -100..=0 {
        let s = ratio(k, 100);
        let r = measure::integrate_ideal_power(&m, "Z", &s);
        let finite = r.is_ok();
        ensure(finite == (s > threshold), || format!("s = {k}/100: finite = {finite}"))?;
        if let Err(e) = r {
            ensure(matches!(e, Error::NonConvergent(_)), || format!("s = {k}/100: unexpected error {e}"))?;
        }
    }
    let at = measure::integrate_ideal_power(&m, "Z", &threshold);
    ensure(matches!(at, Err(Error::NonConvergent(_))), || "not divergent at s = -5/6".into())?;
    Ok("lct 5/6; finite exactly for s > -5/6 on the 1/100 grid".into())
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(4);
    let (mut t0, mut stellar, mut higher) = (0, 0, 0);
    for i in 0..100 {
        let m = instances::random_model(&mut rng, 3, false);
        let spec = instances::random_blowup(&mut rng, &m);
        match (spec.t.is_empty(), spec.c as usize == spec.t.len()) {
            (true, _) => t0 += 1,
            (false, true) => stellar += 1,
            (false, false) => higher += 1,
        }
        let s = instances::random_polyset(&mut rng, &m);
        let f = instances::random_function(&mut rng, &m);
        let reports = measure::check_blowup_invariance(&m, &spec, &s, Some(&f)).map_err(|e| format!("instance {i}: {e}"))?;
        for r in reports {
            ensure(r.equal, || format!("instance {i}: {} vs {}", r.lhs, r.rhs))?;
        }
    }
    ensure(t0 > 0 && stellar > 0 && higher > 0, || format!("category counts {t0}/{stellar}/{higher}"))?;
    Ok(format!("100 instances (t = 0: {t0}, stellar: {stellar}, c > |T|: {higher}), volume and integral"))
}

fn criterion_5() -> Outcome {
    let mut rng = seeded(5);
    for i in 0..100 {
        let m = instances::random_model(&mut rng, 3, true);
        let spec = instances::random_blowup(&mut rng, &m);
        let s = instances::random_presburger(&mut rng, &m);
        let r = atomic::check_atomic_blowup(&m, &spec, &s).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(r.equal, || format!("instance {i}: {} vs {}", r.lhs, r.rhs))?;
    }
    Ok("100 instances equal".into())
}

fn criterion_6() -> Outcome {
    let m = load_model("model_plane.json");
    let terms = atomic::terms_from_json(&std::fs::read_to_string(fixture("divisor_d12.json")).unwrap()).map_err(|e| e.to_string())?;
    let v = atomic::atomic_integrate(&m, &terms).map_err(|e| e.to_string())?;
    let p1 = LaurentPoly::from_terms([(1, rat(1)), (0, rat(1))]);
    let p2 = LaurentPoly::from_terms([(2, rat(1)), (1, rat(1)), (0, rat(1))]);
    let hand: AtomicClass = [("U", LaurentPoly::one()), ("D1o", p1.clone()), ("D2o", p2.clone()), ("D12o", &p1 * &p2)]
        .into_iter()
        .map(|(s, p)| AtomicClass::symbol(s).scale(&AtomicScalar::from_poly(p)))
        .sum();
    // multiply each coefficient by its ∏ [P^{d_i}] and compare with the bare strata
    let mut scaled = AtomicClass::zero();
    for (mono, c) in v.terms() {
        let sym = mono.symbols()[0].clone();
        scaled.add_term(mono.clone(), c * &hand.coeff(&motint::ring::ClassMonomial::symbol(sym)));
    }
    let strata: AtomicClass = ["U", "D1o", "D2o", "D12o"].iter().map(|s| AtomicClass::symbol(*s)).sum();
    ensure(scaled == strata, || format!("got {v}"))?;
    Ok(m.class_order().render_atomic(&v))
}

fn criterion_7() -> Outcome {
    let x = load_model("cover_source.json");
    let y = load_model("cover_target.json");
    let phi = ModelMorphism::from_json(&std::fs::read_to_string(fixture("cover_map.json")).unwrap()).unwrap();
    let f = FunctionV::from_json(&std::fs::read_to_string(fixture("cover_f.json")).unwrap()).unwrap();
    let pushed = functions::pushforward(&x, &y, &phi, &f).map_err(|e| e.to_string())?;
    let half = ExpPolyDensity::exp(vec![ratio(1, 2)]).scale(&ratio(1, 2));
    ensure(pushed.pieces.len() == 1 && pushed.pieces[0].coeff == MotClass::symbol("Q") && pushed.pieces[0].density == half, || {
        format!("push-forward {}", pushed.render(&y.class_order()))
    })?;
    let q = MotClass::symbol("Q");
    let ty = functions::integrate_v(&y, &pushed).map_err(|e| e.to_string())?;
    let tx = phi.push_class(&functions::integrate_v(&x, &f).map_err(|e| e.to_string())?);
    ensure(ty == q && tx == q, || format!("t_Y b_! = {ty}, b_* t_X = {tx}"))?;

    let terms = vec![AtomicTerm::new(AtomicClass::unit(), LatticeCell::full(face_of(&["P"])))];
    let at = atomic::atomic_pushforward(&x, &y, &phi, &terms).map_err(|e| e.to_string())?;
    let even = LatticeCell::new(face_of(&["Q"]), vec![Int::from(2)], vec![vec![Int::from(2)]]);
    ensure(at.len() == 1 && at[0].cell == even && at[0].beta == AffineForm::linear(vec![ratio(1, 2)]) && at[0].coeff == AtomicClass::symbol("Q"), || {
        "atomic push-forward is not [Q] ⊗ L^{n/2} on the even cell".into()
    })?;
    let aq = AtomicClass::symbol("Q");
    let aty = atomic::atomic_integrate(&y, &at).map_err(|e| e.to_string())?;
    let atx = phi.push_atomic(&atomic::atomic_integrate(&x, &terms).map_err(|e| e.to_string())?);
    ensure(aty == aq && atx == aq, || format!("atomic: t_Y b_! = {aty}, b_* t_X = {atx}"))?;
    Ok("[Q] ⊗ 1/2·e^{y/2}; [Q] ⊗ L^{n/2} on even n; both integrals [Q]".into())
}

fn criterion_8() -> Outcome {
    let mut rng = seeded(8);
    for i in 0..50 {
        let m = instances::random_model(&mut rng, 4, true);
        let (a, r, equal) = atomic::cross_check_l1(&m).map_err(|e| format!("model {i}: {e}"))?;
        ensure(equal, || format!("model {i}: {a} vs {r}"))?;
    }
    Ok("50 models".into())
}

/// Monte-Carlo estimate and its standard error for `∫_cone f dx`, sampling `x = G t` with
/// independent exponential `t_j` matched to the slowest decay rate.
fn monte_carlo(f: &ExpPolyDensity, rays: &[Vec<Rat>], samples: usize, rng: &mut impl Rng) -> (f64, f64) {
    let d = rays.len();
    let gf: Vec<Vec<f64>> = rays.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let det = to_f64(&linalg::det(rays)).abs();
    let parts: Vec<(Vec<f64>, Vec<(Vec<u32>, f64)>)> =
        f.parts().map(|(lf, _, p)| (lf.iter().map(to_f64).collect(), p.terms().map(|(e, c)| (e.clone(), to_f64(c))).collect())).collect();
    let rate: Vec<f64> = (0..d)
        .map(|j| parts.iter().map(|(lf, _)| -(0..d).map(|i| lf[i] * gf[j][i]).sum::<f64>()).fold(f64::INFINITY, f64::min))
        .collect();
    let norm = det / rate.iter().product::<f64>();
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut x = vec![0.0; d];
    for _ in 0..samples {
        let t: Vec<f64> = rate.iter().map(|c| -(1.0 - rng.gen::<f64>()).ln() / c).collect();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = (0..d).map(|j| gf[j][i] * t[j]).sum();
        }
        let mut val = 0.0;
        for (lf, terms) in &parts {
            let e: f64 = lf.iter().zip(&x).map(|(a, b)| a * b).sum();
            let p: f64 = terms.iter().map(|(pw, c)| c * pw.iter().zip(&x).map(|(k, xi)| xi.powi(*k as i32)).product::<f64>()).sum();
            val += p * e.exp();
        }
        let y = val * norm * t.iter().zip(&rate).map(|(t, c)| (t * c).exp()).product::<f64>();
        sum += y;
        sq += y * y;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

fn q_pow(q: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(Rat::one() / q, (-e) as usize)
    }
}

/// Truncated sum over `λ ∈ [0, R]^d` and a rigorous bound on the omitted tail.
fn truncated_cell_sum(cell: &LatticeCell, beta: &AffineForm, powers: &[u32], q: &Rat, radius: u32) -> (Rat, Rat) {
    let d = cell.dim();
    let n = cell.face.len();
    let mut lam = vec![0u32; d];
    let mut total = Rat::zero();
    loop {
        let x: Vec<Rat> =
            (0..n).map(|i| int_rat(&cell.offset[i]) + (0..d).fold(Rat::zero(), |acc, j| acc + int_rat(&cell.generators[j][i]) * rat(lam[j] as i64))).collect();
        let w = x.iter().zip(powers).fold(Rat::one(), |acc, (xi, k)| acc * num_traits::pow(xi.clone(), *k as usize));
        total += w * q_pow(q, as_i64(&beta.eval(&x)).unwrap());
        let mut j = 0;
        while j < d {
            lam[j] += 1;
            if lam[j] <= radius {
                break;
            }
            lam[j] = 0;
            j += 1;
        }
        if j == d {
            break;
        }
    }
    // weight <= M^D (1 + |λ|)^D, at most (s + 1)^{d-1} points with |λ| = s, each step lowers β by >= 1
    let m = cell.offset.iter().chain(cell.generators.iter().flatten()).map(int_rat).fold(Rat::one(), |a, b| a.max(b));
    let deg: u32 = powers.iter().sum();
    let e = (deg + d.saturating_sub(1) as u32) as usize;
    let r = radius as i64;
    let first = num_traits::pow(rat(r + 2), e) * q_pow(q, -(r + 1));
    let rho = num_traits::pow(ratio(r + 3, r + 2), e) / q;
    let tail = if d == 0 {
        Rat::zero()
    } else {
        num_traits::pow(m, deg as usize) * q_pow(q, as_i64(&beta.eval(&cell.offset.iter().map(int_rat).collect::<Vec<_>>())).unwrap()) * first / (Rat::one() - rho)
    };
    (total, tail)
}

fn criterion_9() -> Outcome {
    let mut rng = seeded(9);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = rng.gen_range(1..=3);
        let rays = instances::random_simplicial_rays(&mut rng, d);
        let mut f = ExpPolyDensity::zero(d);
        for _ in 0..rng.gen_range(1..=2) {
            let mu: Vec<Rat> = (0..d).map(|_| ratio(-rng.gen_range(1..=4), 2)).collect();
            f = f.add(&ExpPolyDensity::from_poly(instances::random_poly(&mut rng, d)).mul_exp(&mu));
        }
        let exact = to_f64(&integrate_cone(&f, &rays).map_err(|e| format!("instance {i}: {e}"))?);
        let (mean, se) = monte_carlo(&f, &rays, 1_000_000, &mut rng);
        // 3σ, plus double-precision rounding when the estimator is (nearly) constant
        let err = (mean - exact).abs();
        if se > 0.0 {
            worst = worst.max(err / se);
        }
        ensure(err <= 3.0 * se + 1e-9 * exact.abs(), || format!("instance {i}: exact {exact}, Monte-Carlo {mean} ± {se}"))?;
    }
    for i in 0..50 {
        let m = instances::random_model(&mut rng, 3, true);
        let faces: Vec<_> = m.faces().into_iter().filter(|f| !f.is_empty()).collect();
        let face = faces[rng.gen_range(0..faces.len())].clone();
        let cell = instances::random_cell(&mut rng, &face);
        let n = face.len();
        let beta = AffineForm { linear: (0..n).map(|_| rat(-rng.gen_range(1..=3))).collect(), constant: rat(rng.gen_range(0..=1)) };
        let mut powers = vec![0u32; n];
        for _ in 0..rng.gen_range(0..=2) {
            powers[rng.gen_range(0..n)] += 1;
        }
        let exact = atomic::cell_sum(&cell, &beta, &Poly::monomial(powers.clone(), rat(1))).map_err(|e| format!("cell {i}: {e}"))?;
        let radius = match cell.dim() {
            0 | 1 => 200,
            2 => 60,
            _ => 25,
        };
        for q in [rat(2), rat(3)] {
            let value = exact.theta_q(&q).map_err(|e| e.to_string())?;
            let (partial, tail) = truncated_cell_sum(&cell, &beta, &powers, &q, radius);
            let gap = &value - &partial;
            ensure(gap >= Rat::zero() && gap <= tail, || format!("cell {i}, q = {q}: gap {} exceeds tail bound {}", to_f64(&gap), to_f64(&tail)))?;
        }
    }
    Ok(format!("50 cone integrals (max |z| = {worst:.2}), 50 cells at q = 2, 3"))
}

fn criterion_10() -> Outcome {
    let mut rng = seeded(10);
    for i in 0..50 {
        let m = instances::random_model(&mut rng, 3, false);
        let f: MotivicFunction = instances::random_function(&mut rng, &m);
        let direct = measure::integrate(&m, &f).map_err(|e| format!("function {i}: {e}"))?;
        let lifted = functions::integrate_v(&m, &functions::lift(&m, &f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(direct == lifted, || format!("function {i}: {direct} vs {lifted}"))?;
    }
    Ok("50 functions".into())
}

fn criterion_11() -> Outcome {
    let mut rng = seeded(11);
    for i in 0..25 {
        let (x, y, phi) = instances::random_morphism(&mut rng, false);
        let f = instances::random_decaying_function(&mut rng, &y);
        let g = instances::random_function_v(&mut rng, &x);
        let ok = functions::check_projection_formula(&x, &y, &phi, &f, &g).map_err(|e| format!("morphism {i}: {e}"))?;
        ensure(ok, || format!("projection formula fails on morphism {i}"))?;
    }
    for i in 0..25 {
        let (x, y, z, b, q) = instances::random_tower(&mut rng);
        let g = instances::random_function_v(&mut rng, &x);
        let r = functions::check_functoriality(&x, &y, &z, &b, &q, &g).map_err(|e| format!("tower {i}: {e}"))?;
        ensure(r.all(), || format!("tower {i}: {r:?}"))?;
    }
    Ok("25 projection-formula instances, 25 two-step towers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("stringy class", criterion_1, Duration::from_secs(1)),
        ("ideal-power integral", criterion_2, Duration::from_secs(1)),
        ("Mather lct and divergence scan", criterion_3, Duration::from_secs(5)),
        ("blow-up invariance", criterion_4, Duration::from_secs(60)),
        ("atomic blow-up invariance", criterion_5, Duration::from_secs(60)),
        ("classical integral agreement", criterion_6, Duration::from_secs(1)),
        ("ramified cover", criterion_7, Duration::from_secs(60)),
        ("L -> 1 cross-check", criterion_8, Duration::from_secs(60)),
        ("numerical oracles", criterion_9, Duration::from_secs(600)),
        ("Lambda compatibility", criterion_10, Duration::from_secs(60)),
        ("projection formula and functoriality", criterion_11, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > *limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}) [{took:.2?}]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{took:.2?}]: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
