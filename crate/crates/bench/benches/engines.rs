use criterion::{black_box, criterion_group, criterion_main, Criterion};
use motint::atomic::{self, PresburgerSet};
use motint::instances::{self, seeded};
use motint::measure;
use motint::model::blow_up;

fn real_engine(c: &mut Criterion) {
    let mut rng = seeded(1);
    let models: Vec<_> = (0..20).map(|_| instances::random_model(&mut rng, 4, false)).collect();
    c.bench_function("stringy class, 20 random models", |b| {
        b.iter(|| models.iter().map(|m| measure::stringy_class(black_box(m)).unwrap()).count())
    });
    let cases: Vec<_> = models
        .iter()
        .map(|m| (m.clone(), instances::random_blowup(&mut rng, m), instances::random_polyset(&mut rng, m), instances::random_function(&mut rng, m)))
        .collect();
    c.bench_function("blow-up invariance, 20 instances", |b| {
        b.iter(|| {
            for (m, spec, s, f) in &cases {
                black_box(measure::check_blowup_invariance(m, spec, s, Some(f)).unwrap());
            }
        })
    });
}

fn atomic_engine(c: &mut Criterion) {
    let mut rng = seeded(2);
    let models: Vec<_> = (0..20).map(|_| instances::random_model(&mut rng, 4, true)).collect();
    c.bench_function("atomic full-skeleton volume, 20 models", |b| {
        b.iter(|| models.iter().map(|m| atomic::atomic_measure(m, &PresburgerSet::full_skeleton(m)).unwrap()).count())
    });
    let cases: Vec<_> = models.iter().map(|m| (m.clone(), instances::random_blowup(&mut rng, m), instances::random_presburger(&mut rng, m))).collect();
    c.bench_function("atomic blow-up check, 20 instances", |b| {
        b.iter(|| {
            for (m, spec, s) in &cases {
                black_box(atomic::check_atomic_blowup(m, spec, s).unwrap());
            }
        })
    });
}

fn pushforward(c: &mut Criterion) {
    let mut rng = seeded(3);
    let cases: Vec<_> = (0..10)
        .map(|_| {
            let (x, y, phi) = instances::random_morphism(&mut rng, false);
            let g = instances::random_function_v(&mut rng, &x);
            (x, y, phi, g)
        })
        .collect();
    c.bench_function("push-forward, 10 random morphisms", |b| {
        b.iter(|| {
            for (x, y, phi, g) in &cases {
                black_box(motint::functions::pushforward(x, y, phi, g).unwrap());
            }
        })
    });
    let y = instances::random_model(&mut rng, 3, false);
    let spec = instances::random_blowup(&mut rng, &y);
    c.bench_function("blow-up construction", |b| b.iter(|| blow_up(black_box(&y), black_box(&spec)).unwrap()));
}

criterion_group!(benches, real_engine, atomic_engine, pushforward);
criterion_main!(benches);
