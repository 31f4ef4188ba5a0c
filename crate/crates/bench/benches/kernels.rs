use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dunkl_bloch::kernels::{kernel_series, p0, KERNEL_TOL};
use dunkl_bloch::{KernelWeights, LambdaParam};
use dunkl_bloch_bench::spiral_points;

fn kernels(c: &mut Criterion) {
    let lam = LambdaParam::new(0.5).unwrap();
    let pts = spiral_points(16, 0.9);
    let mut group = c.benchmark_group("kernel_series");
    for kernel in [KernelWeights::cauchy(lam), KernelWeights::bergman(lam), KernelWeights::pure_power(lam, -1.5)] {
        group.bench_function(kernel.name().to_string(), |b| {
            b.iter(|| {
                for z in &pts {
                    for w in &pts {
                        black_box(kernel_series(&kernel, z, w, KERNEL_TOL).unwrap());
                    }
                }
            })
        });
    }
    group.finish();
    c.bench_function("p0_closed_form", |b| {
        b.iter(|| {
            for z in &pts {
                for w in &pts {
                    black_box(p0(lam, z.z(), w.z()).unwrap());
                }
            }
        })
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
