//! Integral operators with diagonal kernels, applied in coefficient space:
//! projections `T_{λ,α}`, the ψ-reconstruction, the representation formula
//! and the `A¹`–Bloch pairing.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{BasisSweep, DiskPoint};
use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_series, KernelWeights, KERNEL_TOL};
use crate::quadrature::{try_integrate, weighted_moment, DiskRule, Rule};
use crate::series::{CoefficientSeries, SeriesValue};
use crate::sum::ComplexSum;

/// `⟨f, φ_n⟩_α = ∫ f conj(φ_n) (1-|z|²)^α dσ_λ` for `n = 0..=n_max`.
pub fn moments<F>(f: F, n_max: usize, rule: &DiskRule) -> Vec<Complex64>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    let lam = rule.lam();
    let rows: Vec<Vec<Complex64>> = rule
        .nodes()
        .par_iter()
        .map(|p| {
            let fv = f(p);
            let mut sweep = BasisSweep::new(lam, p);
            (0..=n_max).map(|_| fv * sweep.next_term().phi.conj()).collect()
        })
        .collect();
    (0..=n_max)
        .map(|n| {
            let mut acc = ComplexSum::new();
            for (row, w) in rows.iter().zip(rule.weights()) {
                acc.add(row[n] * *w);
            }
            acc.value()
        })
        .collect()
}

/// Orthogonal expansion `d_n = ⟨f, φ_n⟩_α / ⟨φ_n, φ_n⟩_α`.
pub fn expand<F>(f: F, alpha: f64, n_max: usize, rule: &DiskRule) -> Result<CoefficientSeries>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    rule.require_alpha(alpha)?;
    let lam = rule.lam();
    let m = moments(f, n_max, rule);
    let coeffs = m
        .into_iter()
        .enumerate()
        .map(|(n, v)| v / weighted_moment(lam, alpha, n))
        .collect();
    Ok(CoefficientSeries::polynomial(lam, coeffs))
}

/// `T_{λ,α} f` as the series with coefficients `a_{K_{λ,α}}(n) ⟨f, φ_n⟩_α`;
/// `α = 0` gives the Bergman projection.
pub fn t_alpha<F>(f: F, alpha: f64, n_max: usize, rule: &DiskRule) -> Result<CoefficientSeries>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    rule.require_alpha(alpha)?;
    let kernel = KernelWeights::k_alpha(rule.lam(), alpha)?;
    let m = moments(f, n_max, rule);
    let coeffs = m.into_iter().enumerate().map(|(n, v)| v * kernel.a(n)).collect();
    Ok(CoefficientSeries::polynomial(rule.lam(), coeffs))
}

/// `T_{λ,α} f` with a pointwise cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    pub coeffs: CoefficientSeries,
    /// Largest `|∫ f K_{λ,α}(z,·) dμ_α − T f(z)|` over the spot-check points.
    pub residual: f64,
    pub alpha: f64,
}

/// Points at which projections are spot-checked against the kernel integral.
pub fn spot_points() -> Vec<DiskPoint> {
    [(0.0, 0.0), (0.35, 0.9), (0.6, -2.2)]
        .iter()
        .map(|&(r, t)| DiskPoint::polar(r, t).expect("fixed interior points"))
        .collect()
}

/// Kernel integral `∫ g(w) K(z, w) dμ(w)` over the rule, one kernel series
/// per node.
pub fn kernel_integral<F>(kernel: &KernelWeights, g: F, z: &DiskPoint, rule: &DiskRule) -> Result<Complex64>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    try_integrate(rule, |w| Ok(g(w) * kernel_series(kernel, z, w, KERNEL_TOL)?.value))
}

pub fn t_alpha_checked<F>(f: F, alpha: f64, n_max: usize, rule: &DiskRule) -> Result<ProjectionResult>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    let coeffs = t_alpha(&f, alpha, n_max, rule)?;
    let kernel = KernelWeights::k_alpha(rule.lam(), alpha)?;
    let mut residual: f64 = 0.0;
    for z in spot_points() {
        let pointwise = kernel_integral(&kernel, &f, &z, rule)?;
        residual = residual.max((pointwise - coeffs.value_at(&z)).norm());
    }
    Ok(ProjectionResult { coeffs, residual, alpha })
}

/// `ψ(z) = (1-|z|²)/(α+1) [D_z(z f) + (α+1) f]`.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    alpha: f64,
    f: CoefficientSeries,
    /// `Σ ((n+λ+α+2)/(α+1)) c_n φ_n`.
    inner: CoefficientSeries,
    dzz: CoefficientSeries,
}

pub fn psi_reconstruct(f: &CoefficientSeries, alpha: f64) -> Result<PsiFunction> {
    Ok(PsiFunction {
        alpha,
        f: f.clone(),
        inner: f.psi_inner(alpha)?,
        dzz: f.dz_circ_z_pow(1),
    })
}

impl PsiFunction {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The series `ψ / (1-|z|²)`.
    pub fn inner(&self) -> &CoefficientSeries {
        &self.inner
    }

    /// `ψ(z)` from the merged coefficient form, with its tail bound.
    pub fn eval(&self, p: &DiskPoint) -> Result<SeriesValue> {
        let v = self.inner.eval(p)?;
        let w = 1.0 - p.r() * p.r();
        Ok(SeriesValue {
            value: v.value * w,
            tail_bound: v.tail_bound * w,
        })
    }

    pub fn value_at(&self, p: &DiskPoint) -> Complex64 {
        self.inner.value_at(p) * (1.0 - p.r() * p.r())
    }

    /// `ψ(z)` assembled from `D_z(z f)` and `f` separately.
    pub fn value_direct(&self, p: &DiskPoint) -> Complex64 {
        let a1 = self.alpha + 1.0;
        (self.dzz.value_at(p) + self.f.value_at(p) * a1) * ((1.0 - p.r() * p.r()) / a1)
    }
}

/// `∫ D_w(w f(w)) K̃_{λ,α}(z, w) (1-|w|²)^α dσ_λ(w)` by quadrature.
pub fn representation_eval(f: &CoefficientSeries, alpha: f64, z: &DiskPoint, rule: &DiskRule) -> Result<Complex64> {
    rule.require_alpha(alpha)?;
    if !z.is_interior() {
        return Err(Error::OutsideDomain {
            what: "the representation formula",
            radius: z.r(),
        });
    }
    let kernel = KernelWeights::k_tilde_alpha(rule.lam(), alpha)?;
    let g = f.dz_circ_z_pow(1);
    kernel_integral(&kernel, |w| g.value_at(w), z, rule)
}

/// The pairing `∫ f conj(g) dσ_λ` computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityPairing {
    /// Quadrature of `f conj(g)`.
    pub quadrature: Complex64,
    /// `Σ c_n conj(g_n) (λ+1)/(n+λ+1)`.
    pub coefficient: Complex64,
    /// `∫ F conj(D_w(w g)) (1-|w|²) dσ_λ` with `F = f + Σ c_n/(n+λ+1) φ_n`.
    pub representation: Complex64,
}

impl DualityPairing {
    /// Largest pairwise difference among the three routes.
    pub fn spread(&self) -> f64 {
        let (a, b, c) = (self.quadrature, self.coefficient, self.representation);
        (a - b).norm().max((a - c).norm()).max((b - c).norm())
    }
}

pub fn duality_pair(f: &CoefficientSeries, g: &CoefficientSeries, rule: &DiskRule) -> Result<DualityPairing> {
    rule.require_alpha(0.0)?;
    if !f.is_polynomial() || !g.is_polynomial() {
        return Err(Error::Unsupported("the pairing is only formed for polynomials".into()));
    }
    if f.lam() != rule.lam() || g.lam() != rule.lam() {
        return Err(invalid("lambda", f.lam().value(), "series and rule use different lambda"));
    }
    let l = rule.lam().value();
    let quadrature = try_integrate(rule, |p| Ok(f.value_at(p) * g.value_at(p).conj()))?;

    let n = f.coeffs().len().min(g.coeffs().len());
    let mut acc = ComplexSum::new();
    for k in 0..n {
        acc.add(f.coeff(k) * g.coeff(k).conj() * ((l + 1.0) / (k as f64 + l + 1.0)));
    }
    let coefficient = acc.value();

    let big_f = f.apply_weights(|k| 1.0 + 1.0 / (k as f64 + l + 1.0));
    let dg = g.dz_circ_z_pow(1);
    let representation = try_integrate(rule, |p| {
        Ok(big_f.value_at(p) * dg.value_at(p).conj() * (1.0 - p.r() * p.r()))
    })?;
    Ok(DualityPairing {
        quadrature,
        coefficient,
        representation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::make_disk_rule;
    use crate::series::f0_series;
    use crate::specfun::LambdaParam;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lam(v: f64) -> LambdaParam {
        LambdaParam::new(v).unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, l: LambdaParam, degree: usize) -> CoefficientSeries {
        let coeffs = (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        CoefficientSeries::polynomial(l, coeffs)
    }

    fn max_coeff_err(a: &CoefficientSeries, b: &CoefficientSeries, n: usize) -> f64 {
        (0..=n).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn expand_recovers_basis_functions() {
        let l = lam(0.7);
        for &alpha in &[0.0, 1.0, -0.5] {
            let rule = make_disk_rule(l, alpha, 32, 48).unwrap();
            for k in [0usize, 3, 11] {
                let e = CoefficientSeries::unit(l, k);
                let d = expand(|p| e.value_at(p), alpha, 16, &rule).unwrap();
                assert!(max_coeff_err(&d, &e, 16) <= 1e-8, "α={alpha} k={k}");
            }
        }
        let rule = make_disk_rule(l, 0.0, 16, 16).unwrap();
        assert!(expand(|_| Complex64::new(1.0, 0.0), 1.0, 4, &rule).is_err());
    }

    #[test]
    fn unweighted_coefficients_match_explicit_formula() {
        let l = lam(0.4);
        let rule = make_disk_rule(l, 0.0, 32, 48).unwrap();
        let f = |p: &DiskPoint| Complex64::new(p.r().powi(2) * p.cos_theta(), p.sin_theta());
        let d = expand(f, 0.0, 6, &rule).unwrap();
        let m = moments(f, 6, &rule);
        for (n, mn) in m.iter().enumerate() {
            let explicit = mn * ((n as f64 + 1.4) / 1.4);
            assert!((d.coeff(n) - explicit).norm() <= 1e-12);
        }
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let l = lam(0.5);
        let rule = make_disk_rule(l, 0.0, 32, 64).unwrap();
        for _ in 0..3 {
            let f = random_poly(&mut rng, l, 20);
            let p = t_alpha(|z| f.value_at(z), 0.0, 20, &rule).unwrap();
            assert!(max_coeff_err(&p, &f, 20) <= 1e-8);
        }
        for &alpha in &[-0.5, 0.0, 2.0] {
            let rule = make_disk_rule(l, alpha, 16, 16).unwrap();
            let one = t_alpha(|_| Complex64::new(1.0, 0.0), alpha, 5, &rule).unwrap();
            assert!(max_coeff_err(&one, &CoefficientSeries::unit(l, 0), 5) <= 1e-12);
        }
    }

    #[test]
    fn projection_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let l = lam(0.8);
        let rule = make_disk_rule(l, 1.0, 32, 48).unwrap();
        let f = random_poly(&mut rng, l, 8);
        let r = t_alpha_checked(|z| f.value_at(z), 1.0, 8, &rule).unwrap();
        assert!(r.residual <= 1e-6, "{}", r.residual);
    }

    #[test]
    fn psi_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let l = lam(0.6);
        for &alpha in &[-0.5, 0.0, 1.0, 2.0] {
            let rule = make_disk_rule(l, alpha, 32, 48).unwrap();
            let f = random_poly(&mut rng, l, 15);
            let psi = psi_reconstruct(&f, alpha).unwrap();
            let back = t_alpha(|p| psi.value_at(p), alpha, 15, &rule).unwrap();
            assert!(max_coeff_err(&back, &f, 15) <= 1e-6, "α={alpha}");
            let p = DiskPoint::polar(0.4, 1.0).unwrap();
            assert!((psi.value_at(&p) - psi.value_direct(&p)).norm() <= 1e-12);
        }
        let psi = psi_reconstruct(&CoefficientSeries::unit(l, 0), 0.0).unwrap();
        let p = DiskPoint::polar(0.5, 0.2).unwrap();
        assert!((psi.value_at(&p).re - 0.75 * 2.6).abs() < 1e-14);
    }

    #[test]
    fn psi_of_f0_truncation_has_tail() {
        let l = lam(0.5);
        let psi = psi_reconstruct(&f0_series(l, 500).unwrap(), 1.0).unwrap();
        let v = psi.eval(&DiskPoint::polar(0.9, 0.0).unwrap()).unwrap();
        assert!(v.tail_bound.is_finite() && v.tail_bound < 1e-6);
    }

    #[test]
    fn representation_reproduces() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let l = lam(0.5);
        for &alpha in &[0.5, 1.0, 2.0] {
            let rule = make_disk_rule(l, alpha, 48, 48).unwrap();
            let f = random_poly(&mut rng, l, 10);
            for &(r, t) in &[(0.0, 0.0), (0.7, 2.0), (0.5, -1.0)] {
                let z = DiskPoint::polar(r, t).unwrap();
                let v = representation_eval(&f, alpha, &z, &rule).unwrap();
                assert!((v - f.value_at(&z)).norm() <= 1e-6, "α={alpha} r={r}");
            }
        }
        let rule = make_disk_rule(l, 1.0, 16, 16).unwrap();
        let one = representation_eval(&CoefficientSeries::unit(l, 0), 1.0, &DiskPoint::polar(0.3, 0.3).unwrap(), &rule).unwrap();
        assert!((one - 1.0).norm() <= 1e-10);
        assert!(representation_eval(&CoefficientSeries::unit(l, 0), 1.0, &DiskPoint::polar(1.0, 0.3).unwrap(), &rule).is_err());
    }

    #[test]
    fn duality_three_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let l = lam(0.9);
        let rule = make_disk_rule(l, 0.0, 32, 48).unwrap();
        let one = CoefficientSeries::unit(l, 0);
        let d = duality_pair(&one, &one, &rule).unwrap();
        assert!((d.coefficient - 1.0).norm() < 1e-14 && d.spread() <= 1e-10);
        let e3 = CoefficientSeries::unit(l, 3);
        let e5 = CoefficientSeries::unit(l, 5);
        assert!(duality_pair(&e3, &e5, &rule).unwrap().quadrature.norm() <= 1e-10);
        let d = duality_pair(&e5, &e5, &rule).unwrap();
        assert!((d.quadrature - 1.9 / 6.9).norm() <= 1e-10);
        for _ in 0..5 {
            let f = random_poly(&mut rng, l, 12);
            let g = random_poly(&mut rng, l, 9);
            assert!(duality_pair(&f, &g, &rule).unwrap().spread() <= 1e-8);
        }
        assert!(duality_pair(&f0_series(l, 5).unwrap(), &one, &rule).is_err());
    }
}
