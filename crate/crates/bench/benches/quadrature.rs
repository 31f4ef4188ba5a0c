use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dunkl_bloch::quadrature::{gauss_jacobi, integrate, make_disk_rule};
use dunkl_bloch::LambdaParam;
use dunkl_bloch_bench::test_polynomial;

fn quadrature(c: &mut Criterion) {
    let lam = LambdaParam::new(0.5).unwrap();
    c.bench_function("gauss_jacobi_128", |b| b.iter(|| black_box(gauss_jacobi(128, -0.2, 0.7).unwrap())));
    c.bench_function("disk_rule_64x128", |b| b.iter(|| black_box(make_disk_rule(lam, 0.0, 64, 128).unwrap())));
    let rule = make_disk_rule(lam, 0.0, 64, 128).unwrap();
    let f = test_polynomial(lam, 20);
    c.bench_function("integrate_norm_sqr", |b| b.iter(|| black_box(integrate(&rule, |p| f.value_at(p) * f.value_at(p).conj()))));
}

criterion_group!(benches, quadrature);
criterion_main!(benches);
