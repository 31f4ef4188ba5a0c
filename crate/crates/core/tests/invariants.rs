//! Cross-module properties: boundedness of the projections into the Bloch
//! space, the embedding of bounded functions, and nested difference stencils.

use dunkl_bloch::norms::{bloch_seminorm, sup_abs, SupGrid};
use dunkl_bloch::operators::t_alpha;
use dunkl_bloch::quadrature::make_disk_rule;
use dunkl_bloch::series::dz_numeric;
use dunkl_bloch::{CoefficientSeries, Complex64, DiskPoint, LambdaParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lam(v: f64) -> LambdaParam {
    LambdaParam::new(v).unwrap()
}

/// `|z|^{2m} Re(e^{iφ} z^k)`: a polynomial in x, y with sup 1 over the disk.
fn trig_radial(k: i32, m: i32, phase: f64) -> impl Fn(&DiskPoint) -> Complex64 + Sync {
    move |p: &DiskPoint| Complex64::new(p.r().powi(k + 2 * m) * (k as f64 * p.theta() + phase).cos(), 0.0)
}

#[test]
fn projections_of_bounded_functions_are_bloch() {
    let l = lam(0.5);
    let (fine, coarse) = (SupGrid::with_depth(12).unwrap(), SupGrid::with_depth(8).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for alpha in [-0.5, 0.0, 1.0] {
        let rule = make_disk_rule(l, alpha, 48, 96).unwrap();
        let (mut c_fine, mut c_coarse) = (0.0f64, 0.0f64);
        for k in 0..=6 {
            for m in 0..=2 {
                let psi = trig_radial(k, m, rng.gen_range(0.0..6.2));
                let degree = (k + 2 * m) as usize;
                let t = t_alpha(&psi, alpha, degree + 4, &rule).unwrap();
                // The projection of a degree-d polynomial has degree ≤ d.
                for n in degree + 1..=degree + 4 {
                    assert!(t.coeff(n).norm() < 1e-12, "α={alpha} k={k} m={m} n={n}");
                }
                c_fine = c_fine.max(bloch_seminorm(&t, 1, &fine).unwrap().value);
                c_coarse = c_coarse.max(bloch_seminorm(&t, 1, &coarse).unwrap().value);
            }
        }
        assert!(c_fine.is_finite() && c_fine < 20.0, "α={alpha} C={c_fine}");
        assert!((c_fine / c_coarse - 1.0).abs() <= 0.10, "α={alpha}");
    }
}

#[test]
fn bounded_polynomials_embed_in_bloch() {
    let (fine, coarse) = (SupGrid::with_depth(12).unwrap(), SupGrid::with_depth(8).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for lv in [0.0, 0.3, 0.5, 2.5] {
        let l = lam(lv);
        let mut family: Vec<CoefficientSeries> = (0..=16).map(|k| CoefficientSeries::unit(l, k)).collect();
        for _ in 0..5 {
            let deg = rng.gen_range(1..=20);
            let coeffs = (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            family.push(CoefficientSeries::polynomial(l, coeffs));
        }
        let ratio = |f: &CoefficientSeries, g: &SupGrid| {
            bloch_seminorm(f, 1, g).unwrap().value / sup_abs(f, g).unwrap().value
        };
        let c_fine = family.iter().map(|f| ratio(f, &fine)).fold(0.0, f64::max);
        let c_coarse = family.iter().map(|f| ratio(f, &coarse)).fold(0.0, f64::max);
        assert!(c_fine.is_finite() && c_fine > 0.0);
        assert!((c_fine / c_coarse - 1.0).abs() <= 0.10, "λ={lv} {c_fine} {c_coarse}");
    }
}

#[test]
fn triple_nested_stencil_matches_diagonal_action() {
    let l = lam(0.7);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let coeffs: Vec<Complex64> = (0..=32).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let f = CoefficientSeries::polynomial(l, coeffs);
    let h = 1e-3;
    let eval = |s: &CoefficientSeries, u: Complex64| s.value_at(&DiskPoint::from_complex(u).unwrap());
    let g1 = |u: Complex64| dz_numeric(l, |v| v * eval(&f, v), u, h).unwrap();
    let g2 = |u: Complex64| dz_numeric(l, |v| v * g1(v), u, h).unwrap();
    let g3 = |u: Complex64| dz_numeric(l, |v| v * g2(v), u, h).unwrap();
    let exact = f.dz_circ_z_pow(3);
    for _ in 0..4 {
        let z = loop {
            let z = Complex64::from_polar(0.6 * rng.gen::<f64>().sqrt(), rng.gen_range(-3.1..3.1));
            if z.im.abs() >= 0.05 {
                break z;
            }
        };
        let want = eval(&exact, z);
        assert!((g3(z) - want).norm() <= 1e-3 * (1.0 + want.norm()), "z={z}");
    }
}
