use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mapcone::{compose, is_decomposable, is_positive_k, is_superpositive_k, SolverOptions};
use mapcone_bench::{entangled_map, positive_map, random_map};

fn seesaw(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let phi = positive_map();
    c.bench_function("positivity/phi_abcd", |b| b.iter(|| is_positive_k(&phi, 1, &opts).unwrap()));
    let mut g = c.benchmark_group("positivity/random");
    for d in [2, 3] {
        let m = random_map(d, d, 11);
        g.bench_with_input(BenchmarkId::from_parameter(d), &m, |b, m| b.iter(|| is_positive_k(m, 1, &opts).unwrap()));
    }
    g.finish();
}

fn decomposability(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let phi = positive_map();
    c.bench_function("dec/phi_abcd", |b| b.iter(|| is_decomposable(&phi, &opts).unwrap()));
    let tau = entangled_map();
    c.bench_function("separable/tau", |b| b.iter(|| is_superpositive_k(&tau, 1, &opts).unwrap()));
}

fn composition(c: &mut Criterion) {
    let mut g = c.benchmark_group("compose");
    for d in [2, 4, 8] {
        let phi = random_map(d, d, 1);
        let psi = random_map(d, d, 2);
        g.bench_with_input(BenchmarkId::from_parameter(d), &(phi, psi), |b, (phi, psi)| {
            b.iter(|| compose(psi, phi).unwrap())
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = seesaw, decomposability, composition
}
criterion_main!(benches);
