use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use shock_core::slow_fast::{fast_field, FastState};
use shock_core::{shoot_profile, verify, EndState, GasParams, IntegratorOptions, ShockData};

fn p0() -> (GasParams, EndState) {
    let gas = GasParams::new(1.0, 5.0 / 3.0, 1.0, 1.0).unwrap();
    let left = EndState::new(1.0, 0.0, 1.0, &gas).unwrap();
    (gas, left)
}

fn shooting(c: &mut Criterion) {
    let (gas, left) = p0();
    let opts = IntegratorOptions::default();
    for eps in [0.1, 0.05] {
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        c.bench_function(&format!("shoot_profile eps={eps}"), |b| {
            b.iter(|| shoot_profile(black_box(&shock), &gas, &opts).unwrap())
        });
    }
}

fn verification(c: &mut Criterion) {
    let (gas, left) = p0();
    let opts = IntegratorOptions::default();
    c.bench_function("verify eps=0.05", |b| {
        b.iter(|| verify(&left, &gas, black_box(0.05), &opts).unwrap())
    });
}

fn fast_field_eval(c: &mut Criterion) {
    let (gas, left) = p0();
    let w = FastState { w0: 0.5, w1: 0.28, w2: -0.01 };
    c.bench_function("fast_field", |b| {
        b.iter(|| fast_field(black_box(&w), black_box(0.05), &left, &gas))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = shooting, verification, fast_field_eval
}
criterion_main!(benches);
