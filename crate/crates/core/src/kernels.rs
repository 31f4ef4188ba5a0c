//! Diagonal kernels `Σ a(n) φ_n(z) conj(φ_n(w))`, the closed forms of the
//! Cauchy and Poisson kernels, and the pointwise envelopes of the `h_{λ,β}`
//! family.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{BasisSweep, DiskPoint};
use crate::error::{invalid, Error, Result};
use crate::specfun::{gamma_ratio, gauss_2f1, recip_gamma, LambdaParam, HYPERGEOMETRIC_TOL};
use crate::sum::ComplexSum;

/// Default absolute tolerance of [`kernel_series`].
pub const KERNEL_TOL: f64 = 1e-13;
/// Default term budget of [`kernel_series`].
pub const KERNEL_BUDGET: usize = 200_000;

#[derive(Clone)]
enum WeightLaw {
    Cauchy,
    Bergman,
    KTilde,
    KTildeAlpha(f64),
    KAlpha(f64),
    F0Derived,
    PurePower(f64),
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

/// Coefficient weights `a(n)` of a diagonal kernel, with the declared growth
/// exponent `β` (`a(n) ≍ (n+1)^β`).
#[derive(Clone)]
pub struct KernelWeights {
    lam: LambdaParam,
    name: String,
    beta: f64,
    law: WeightLaw,
}

impl fmt::Debug for KernelWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelWeights")
            .field("lam", &self.lam.value())
            .field("name", &self.name)
            .field("beta", &self.beta)
            .finish()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", alpha, "weight exponent must exceed -1"))
    }
}

impl KernelWeights {
    fn build(lam: LambdaParam, name: impl Into<String>, beta: f64, law: WeightLaw) -> Self {
        Self {
            lam,
            name: name.into(),
            beta,
            law,
        }
    }

    /// `C(z, w)`: `a(n) = 1`.
    pub fn cauchy(lam: LambdaParam) -> Self {
        Self::build(lam, "cauchy", 0.0, WeightLaw::Cauchy)
    }

    /// `K_λ(z, w)`: `a(n) = (n+λ+1)/(λ+1)`.
    pub fn bergman(lam: LambdaParam) -> Self {
        Self::build(lam, "bergman", 1.0, WeightLaw::Bergman)
    }

    /// `K̃_λ(z, w)`: `a(n) = (n+λ+2)/(λ+1)`.
    pub fn k_tilde(lam: LambdaParam) -> Self {
        Self::build(lam, "k_tilde", 1.0, WeightLaw::KTilde)
    }

    /// `K̃_{λ,α}`: `a(n) = Γ(n+λ+α+2) / ((λ+1) Γ(α+1) Γ(n+λ+2))`.
    pub fn k_tilde_alpha(lam: LambdaParam, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::build(lam, format!("k_tilde_alpha:{alpha}"), alpha, WeightLaw::KTildeAlpha(alpha)))
    }

    /// `K_{λ,α}`: `a(n) = Γ(n+λ+α+2) / ((λ+1) Γ(α+1) Γ(n+λ+1))`, the
    /// reciprocal of the weighted moment of `φ_n`.
    pub fn k_alpha(lam: LambdaParam, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::build(lam, format!("k_alpha:{alpha}"), alpha + 1.0, WeightLaw::KAlpha(alpha)))
    }

    /// `a(n) = (n+λ+1) ε_n / n^{λ+1}` for `n ≥ 1`, `a(0) = 0`; paired with
    /// `w = 1` it gives `D_z(z f_0)`.
    pub fn f0_derived(lam: LambdaParam) -> Self {
        Self::build(lam, "f0", -2.0 * lam.value(), WeightLaw::F0Derived)
    }

    /// `a(n) = (n+1)^β`.
    pub fn pure_power(lam: LambdaParam, beta: f64) -> Self {
        Self::build(lam, format!("h_beta:{beta}"), beta, WeightLaw::PurePower(beta))
    }

    /// Arbitrary weights. The tail bound of [`kernel_series`] assumes the
    /// consecutive ratios `a(n+1)/a(n)` are monotone for large `n`.
    pub fn custom(lam: LambdaParam, name: impl Into<String>, beta: f64, a: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(lam, name, beta, WeightLaw::Custom(Arc::new(a)))
    }

    /// Looks up a kernel by its command-line name: `cauchy`, `bergman`,
    /// `k_tilde`, `k_tilde_alpha`, `k_alpha`, `f0` or `h_beta:<β>`.
    pub fn from_name(lam: LambdaParam, name: &str, alpha: f64) -> Result<Self> {
        match name {
            "cauchy" => Ok(Self::cauchy(lam)),
            "bergman" => Ok(Self::bergman(lam)),
            "k_tilde" => Ok(Self::k_tilde(lam)),
            "k_tilde_alpha" => Self::k_tilde_alpha(lam, alpha),
            "k_alpha" => Self::k_alpha(lam, alpha),
            "f0" => Ok(Self::f0_derived(lam)),
            _ => {
                let beta = name
                    .strip_prefix("h_beta:")
                    .and_then(|b| b.replace('−', "-").parse::<f64>().ok())
                    .ok_or_else(|| Error::Unsupported(format!("unknown kernel `{name}`")))?;
                if !beta.is_finite() {
                    return Err(invalid("beta", beta, "exponent must be finite"));
                }
                Ok(Self::pure_power(lam, beta))
            }
        }
    }

    pub fn lam(&self) -> LambdaParam {
        self.lam
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The weight `a(n)`.
    pub fn a(&self, n: usize) -> f64 {
        let l = self.lam.value();
        let nf = n as f64;
        match &self.law {
            WeightLaw::Cauchy => 1.0,
            WeightLaw::Bergman => (nf + l + 1.0) / (l + 1.0),
            WeightLaw::KTilde => (nf + l + 2.0) / (l + 1.0),
            WeightLaw::KTildeAlpha(alpha) => {
                gamma_ratio(nf + l + alpha + 2.0, nf + l + 2.0).unwrap_or(f64::NAN) * recip_gamma(alpha + 1.0) / (l + 1.0)
            }
            WeightLaw::KAlpha(alpha) => {
                gamma_ratio(nf + l + alpha + 2.0, nf + l + 1.0).unwrap_or(f64::NAN) * recip_gamma(alpha + 1.0) / (l + 1.0)
            }
            WeightLaw::F0Derived => {
                if n == 0 {
                    0.0
                } else {
                    (nf + l + 1.0) * crate::basis::epsilon(self.lam, n) / nf.powf(l + 1.0)
                }
            }
            WeightLaw::PurePower(beta) => (nf + 1.0).powf(*beta),
            WeightLaw::Custom(f) => f(n),
        }
    }

    /// `a(0), a(1), ...` by recurrence where one is available.
    pub fn stream(&self) -> WeightStream<'_> {
        WeightStream {
            weights: self,
            n: 0,
            last: 0.0,
            eps: 1.0,
        }
    }
}

/// Iterator over the weights of a [`KernelWeights`].
#[derive(Debug, Clone)]
pub struct WeightStream<'a> {
    weights: &'a KernelWeights,
    n: usize,
    last: f64,
    eps: f64,
}

impl Iterator for WeightStream<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.n;
        self.n += 1;
        let w = self.weights;
        let l = w.lam.value();
        let nf = n as f64;
        let value = match &w.law {
            WeightLaw::KTildeAlpha(alpha) if n > 0 && !n.is_multiple_of(256) => self.last * (nf + l + alpha + 1.0) / (nf + l + 1.0),
            WeightLaw::KAlpha(alpha) if n > 0 && !n.is_multiple_of(256) => self.last * (nf + l + alpha + 1.0) / (nf + l),
            WeightLaw::F0Derived => {
                if n == 0 {
                    0.0
                } else {
                    self.eps *= (nf / (nf + 2.0 * l)).sqrt();
                    (nf + l + 1.0) * self.eps / nf.powf(l + 1.0)
                }
            }
            _ => w.a(n),
        };
        self.last = value;
        Some(value)
    }
}

/// Result of a kernel summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `Σ a(n) φ_n(z) conj(φ_n(w))`, truncated once the majorant
/// `Σ_{n>N} |a(n)| ε_n^{-2} (|z||w|)^n` is at most `tol`.
pub fn kernel_series(k: &KernelWeights, z: &DiskPoint, w: &DiskPoint, tol: f64) -> Result<KernelValue> {
    kernel_series_with_budget(k, z, w, tol, KERNEL_BUDGET)
}

pub fn kernel_series_with_budget(k: &KernelWeights, z: &DiskPoint, w: &DiskPoint, tol: f64, budget: usize) -> Result<KernelValue> {
    if !(tol > 0.0) {
        return Err(invalid("tol", tol, "tolerance must be positive"));
    }
    let rho = z.r() * w.r();
    if rho >= 1.0 {
        return Err(Error::OutsideDomain {
            what: "a diagonal kernel series",
            radius: rho,
        });
    }
    let two_lam = 2.0 * k.lam.value();
    let mut sz = BasisSweep::new(k.lam, z);
    let mut sw = BasisSweep::new(k.lam, w);
    let mut weights = k.stream();
    let mut ahead = [weights.next().unwrap_or(0.0), weights.next().unwrap_or(0.0), weights.next().unwrap_or(0.0)];
    let mut acc = ComplexSum::new();
    // ε_{n+1}^{-2} ρ^{n+1} while processing term n.
    let mut next_scale = rho * (1.0 + two_lam);
    let mut bound = f64::INFINITY;
    for n in 0..budget {
        let a = ahead[0];
        let phi_z = sz.next_term().phi;
        let phi_w = sw.next_term().phi;
        acc.add(phi_z * phi_w.conj() * a);

        // Tail past n: first term a(n+1) ε_{n+1}^{-2} ρ^{n+1}, ratio bound q.
        let nf = n as f64;
        let a1 = ahead[1].abs();
        let a2 = ahead[2].abs();
        let growth = if a1 > 0.0 { (a2 / a1).max(1.0) } else { 1.0 };
        let q = rho * (nf + 2.0 + two_lam) / (nf + 2.0) * growth;
        bound = if a1 == 0.0 && a2 == 0.0 && rho == 0.0 {
            0.0
        } else if q < 1.0 {
            a1 * next_scale / (1.0 - q)
        } else {
            f64::INFINITY
        };
        if bound <= tol {
            return Ok(KernelValue {
                value: acc.value(),
                terms: n + 1,
                tail_bound: bound,
            });
        }
        ahead = [ahead[1], ahead[2], weights.next().unwrap_or(0.0)];
        next_scale *= rho * (nf + 2.0 + two_lam) / (nf + 2.0);
    }
    Err(Error::BudgetExhausted { terms: budget, bound })
}

/// `P_0(z, w)` and how well its two hypergeometric forms agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P0Value {
    pub value: f64,
    /// Relative difference between the two forms.
    pub discrepancy: f64,
    /// `1` when the positive-argument form was returned, `2` otherwise.
    pub form: u8,
}

/// `P_0(z, w)` from
/// `₂F₁(λ,λ;2λ+1;x)/|1−zw|^{2λ}` with `x = 4 Im z Im w/|1−zw|²`, or
/// `₂F₁(λ,λ+1;2λ+1;−y)/|1−zw̄|^{2λ}` with `y = 4 Im z Im w/|1−zw̄|²`.
pub fn p0(lam: LambdaParam, z: Complex64, w: Complex64) -> Result<P0Value> {
    if (z * w).norm() >= 1.0 {
        return Err(Error::OutsideDomain {
            what: "P0",
            radius: (z * w).norm(),
        });
    }
    if lam.is_classical() {
        return Ok(P0Value {
            value: 1.0,
            discrepancy: 0.0,
            form: 1,
        });
    }
    let l = lam.value();
    let one = Complex64::new(1.0, 0.0);
    let d2sq = (one - z * w).norm_sqr();
    let d1sq = (one - z * w.conj()).norm_sqr();
    let prod = 4.0 * z.im * w.im;
    let x = prod / d2sq;
    let y = prod / d1sq;
    let form1 = gauss_2f1(l, l, 2.0 * l + 1.0, x, HYPERGEOMETRIC_TOL)? * d2sq.powf(-l);
    let form2 = gauss_2f1(l, l + 1.0, 2.0 * l + 1.0, -y, HYPERGEOMETRIC_TOL)? * d1sq.powf(-l);
    let discrepancy = (form1 - form2).abs() / form1.abs().max(form2.abs()).max(f64::MIN_POSITIVE);
    let (value, form) = if x <= 0.9 { (form1, 1) } else { (form2, 2) };
    Ok(P0Value {
        value,
        discrepancy,
        form,
    })
}

fn check_pole(z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - z * w.conj();
    if d.norm() == 0.0 {
        return Err(Error::OutsideDomain {
            what: "a kernel with a pole at z conj(w) = 1",
            radius: z.norm(),
        });
    }
    Ok(d)
}

/// `C(z, w) = P_0(z, w) / (1 − z w̄)`.
pub fn cauchy_closed(lam: LambdaParam, z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = check_pole(z, w)?;
    Ok(p0(lam, z, w)?.value / d)
}

/// `P(z, w) = (1 − |z|²|w|²) / |1 − z w̄|² · P_0(z, w)`.
pub fn poisson_closed(lam: LambdaParam, z: Complex64, w: Complex64) -> Result<f64> {
    let d = check_pole(z, w)?;
    Ok((1.0 - z.norm_sqr() * w.norm_sqr()) / d.norm_sqr() * p0(lam, z, w)?.value)
}

/// `P(z, w) = C(z, w) + z̄ w C(w, z)` through the Cauchy series.
pub fn poisson_series(lam: LambdaParam, z: &DiskPoint, w: &DiskPoint, tol: f64) -> Result<Complex64> {
    let c = KernelWeights::cauchy(lam);
    let a = kernel_series(&c, z, w, tol)?.value;
    let b = kernel_series(&c, w, z, tol)?.value;
    Ok(a + z.z().conj() * w.z() * b)
}

/// The four regimes of the pointwise bound on `h_{λ,β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", content = "beta", rename_all = "snake_case")]
pub enum EnvelopeCase {
    /// `β > 0`.
    Positive(f64),
    /// `−1 < β < 0`.
    NegativeSmall(f64),
    /// `β = −1`.
    Log,
    /// `−2λ−1 < β < −1`.
    NegativeLarge(f64),
}

impl EnvelopeCase {
    pub fn for_beta(lam: LambdaParam, beta: f64) -> Result<Self> {
        let l = lam.value();
        if beta > 0.0 {
            Ok(Self::Positive(beta))
        } else if beta < 0.0 && beta > -1.0 {
            Ok(Self::NegativeSmall(beta))
        } else if beta == -1.0 {
            Ok(Self::Log)
        } else if beta < -1.0 && beta > -2.0 * l - 1.0 {
            Ok(Self::NegativeLarge(beta))
        } else {
            Err(invalid("beta", beta, "exponent outside every envelope regime"))
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::Positive(b) | Self::NegativeSmall(b) | Self::NegativeLarge(b) => b,
            Self::Log => -1.0,
        }
    }
}

/// The right-hand side of the envelope bound, with `d1 = |1 − z w̄|` and
/// `d2 = |1 − z w|`.
pub fn envelope(lam: LambdaParam, case: EnvelopeCase, z: Complex64, w: Complex64) -> Result<f64> {
    let case = EnvelopeCase::for_beta(lam, case.beta())?;
    let one = Complex64::new(1.0, 0.0);
    let d1 = (one - z * w.conj()).norm();
    let d2 = (one - z * w).norm();
    let base = (d1 + d2).powf(-2.0 * lam.value());
    Ok(match case {
        EnvelopeCase::Positive(b) => base / d1 * (d1.powf(-b) + d2.powf(-b)),
        EnvelopeCase::NegativeSmall(b) => base / d1.powf(b + 1.0),
        EnvelopeCase::Log => base * (d2 / d1 + 2.0).ln(),
        EnvelopeCase::NegativeLarge(b) => (d1 + d2).powf(-b - 2.0 * lam.value() - 1.0),
    })
}

/// `|1 − z w̄|`, `|1 − z w|` and their polar comparison quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryFactors {
    pub d1: f64,
    pub d2: f64,
    /// `1 − rs + |sin((θ − φ)/2)|`.
    pub comp1: f64,
    /// `1 − rs + |sin θ| + |sin φ|`.
    pub comp2: f64,
}

pub fn geometry_factors(z: &DiskPoint, w: &DiskPoint) -> GeometryFactors {
    let one = Complex64::new(1.0, 0.0);
    let (zc, wc) = (z.z(), w.z());
    let rs = z.r() * w.r();
    GeometryFactors {
        d1: (one - zc * wc.conj()).norm(),
        d2: (one - zc * wc).norm(),
        comp1: 1.0 - rs + (0.5 * (z.theta() - w.theta())).sin().abs(),
        comp2: 1.0 - rs + z.sin_theta().abs() + w.sin_theta().abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::phi_sum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn lam(v: f64) -> LambdaParam {
        LambdaParam::new(v).unwrap()
    }

    fn point(rng: &mut ChaCha8Rng, rmax: f64) -> DiskPoint {
        DiskPoint::polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)).unwrap()
    }

    #[test]
    fn streams_match_direct_weights() {
        let l = lam(0.7);
        let kernels = [
            KernelWeights::cauchy(l),
            KernelWeights::bergman(l),
            KernelWeights::k_tilde(l),
            KernelWeights::k_tilde_alpha(l, 1.5).unwrap(),
            KernelWeights::k_alpha(l, -0.5).unwrap(),
            KernelWeights::f0_derived(l),
            KernelWeights::pure_power(l, -1.3),
        ];
        for k in &kernels {
            for (n, s) in k.stream().take(3000).enumerate() {
                let a = k.a(n);
                assert!((s - a).abs() <= 1e-11 * a.abs().max(1e-300), "{} n={n} {s} {a}", k.name());
            }
        }
    }

    #[test]
    fn weight_growth_brackets() {
        let l = lam(0.6);
        let kernels = [
            KernelWeights::cauchy(l),
            KernelWeights::bergman(l),
            KernelWeights::k_tilde(l),
            KernelWeights::k_tilde_alpha(l, 2.0).unwrap(),
            KernelWeights::k_alpha(l, 0.5).unwrap(),
            KernelWeights::f0_derived(l),
            KernelWeights::pure_power(l, 2.0),
        ];
        for k in &kernels {
            let first = if k.name() == "f0" { 1 } else { 0 };
            for (n, a) in k.stream().enumerate().take(4097).skip(first) {
                let ratio = a / ((n + 1) as f64).powf(k.beta());
                assert!((0.1..=10.0).contains(&ratio), "{} n={n} ratio={ratio}", k.name());
            }
        }
    }

    #[test]
    fn named_lookup() {
        let l = lam(0.5);
        assert_eq!(KernelWeights::from_name(l, "h_beta:-1", 0.0).unwrap().beta(), -1.0);
        assert_eq!(KernelWeights::from_name(l, "h_beta:−1", 0.0).unwrap().beta(), -1.0);
        assert_eq!(KernelWeights::from_name(l, "k_alpha", 1.0).unwrap().beta(), 2.0);
        assert!(KernelWeights::from_name(l, "nope", 0.0).is_err());
    }

    #[test]
    fn cauchy_at_origin_is_one() {
        let l = lam(0.8);
        let z = DiskPoint::polar(0.9, 1.0).unwrap();
        let v = kernel_series(&KernelWeights::cauchy(l), &z, &DiskPoint::origin(), KERNEL_TOL).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert_eq!(v.terms, 1);
        assert_eq!(cauchy_closed(l, z.z(), Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn bergman_is_dz_circ_z_of_cauchy() {
        let l = lam(1.3);
        let c = KernelWeights::cauchy(l);
        let b = KernelWeights::bergman(l);
        for n in 0..50 {
            assert!((b.a(n) - (n as f64 + 2.3) * c.a(n) / 2.3).abs() < 1e-13);
        }
    }

    #[test]
    fn series_matches_direct_sum() {
        let l = lam(0.4);
        let z = DiskPoint::polar(0.6, 0.7).unwrap();
        let w = DiskPoint::polar(0.5, -2.0).unwrap();
        let k = KernelWeights::bergman(l);
        let v = kernel_series(&k, &z, &w, 1e-14).unwrap();
        let direct: Complex64 = (0..200).map(|n| phi_sum(n, l, z.z()) * phi_sum(n, l, w.z()).conj() * k.a(n)).sum();
        assert!((v.value - direct).norm() <= 1e-12);
        assert!(v.tail_bound <= 1e-14);
    }

    #[test]
    fn tail_bound_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = lam(1.1);
        let k = KernelWeights::k_tilde_alpha(l, 2.0).unwrap();
        for _ in 0..50 {
            let z = point(&mut rng, 0.95);
            let w = point(&mut rng, 0.95);
            let loose = kernel_series(&k, &z, &w, 1e-4).unwrap();
            let tight = kernel_series(&k, &z, &w, 1e-14).unwrap();
            assert!((loose.value - tight.value).norm() <= loose.tail_bound + 1e-14);
        }
    }

    #[test]
    fn hermitian_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &lv in &[0.3, 1.0, 2.5] {
            let l = lam(lv);
            for k in [KernelWeights::cauchy(l), KernelWeights::bergman(l), KernelWeights::pure_power(l, -0.5)] {
                for _ in 0..50 {
                    let z = point(&mut rng, 0.9);
                    let w = point(&mut rng, 0.9);
                    let a = kernel_series(&k, &z, &w, KERNEL_TOL).unwrap().value;
                    let b = kernel_series(&k, &w, &z, KERNEL_TOL).unwrap().value;
                    assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
                    let d = kernel_series(&k, &z, &z, KERNEL_TOL).unwrap().value;
                    assert!(d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_bound() {
        let l = lam(0.5);
        let z = DiskPoint::polar(0.9999, 0.3).unwrap();
        let err = kernel_series_with_budget(&KernelWeights::bergman(l), &z, &z, 1e-14, 100).unwrap_err();
        match err {
            Error::BudgetExhausted { terms, bound } => {
                assert_eq!(terms, 100);
                assert!(bound > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(kernel_series(&KernelWeights::cauchy(l), &DiskPoint::polar(1.0, 0.0).unwrap(), &DiskPoint::polar(1.0, 0.0).unwrap(), 1e-8).is_err());
    }

    #[test]
    fn closed_forms_match_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &lv in &[0.3, 0.8, 2.0] {
            let l = lam(lv);
            for _ in 0..200 {
                let z = point(&mut rng, 0.8);
                let w = point(&mut rng, 0.8);
                let p = p0(l, z.z(), w.z()).unwrap();
                assert!(p.discrepancy <= 1e-9, "λ={lv} z={:?} w={:?} d={}", z, w, p.discrepancy);
                let closed = cauchy_closed(l, z.z(), w.z()).unwrap();
                let series = kernel_series(&KernelWeights::cauchy(l), &z, &w, 1e-14).unwrap().value;
                assert!((closed - series).norm() <= 1e-6 * closed.norm());
                let pc = poisson_closed(l, z.z(), w.z()).unwrap();
                let ps = poisson_series(l, &z, &w, 1e-14).unwrap();
                assert!((ps - pc).norm() <= 1e-6 * pc.abs());
            }
        }
    }

    #[test]
    fn p0_special_values() {
        let l = lam(0.8);
        let z = Complex64::new(0.5, 0.0);
        let w = Complex64::new(0.3, 0.6);
        let expect = (Complex64::new(1.0, 0.0) - z * w).norm().powf(-1.6);
        assert!((p0(l, z, w).unwrap().value - expect).abs() < 1e-14);
        assert_eq!(p0(lam(0.0), w, w).unwrap().value, 1.0);
        let small = lam(0.01);
        let z = Complex64::new(0.3, 0.5);
        let w = Complex64::new(-0.2, 0.7);
        let v = p0(small, z, w).unwrap().value;
        let base = (Complex64::new(1.0, 0.0) - z * w).norm().powf(-0.02);
        assert!((v - base).abs() <= 0.05 * base);
        assert!((poisson_closed(l, Complex64::new(0.0, 0.0), w).unwrap() - 1.0).abs() < 1e-15);
        let classical = cauchy_closed(lam(0.0), z, w).unwrap();
        assert!((classical - 1.0 / (Complex64::new(1.0, 0.0) - z * w.conj())).norm() < 1e-15);
    }

    #[test]
    fn envelope_cases() {
        let l = lam(0.5);
        let zero = Complex64::new(0.0, 0.0);
        let w = Complex64::new(0.3, 0.2);
        let v = envelope(l, EnvelopeCase::Positive(1.0), zero, w).unwrap();
        assert!((v - 2f64.powf(1.0 - 1.0)).abs() < 1e-15);
        assert!(EnvelopeCase::for_beta(l, 0.0).is_err());
        assert!(EnvelopeCase::for_beta(l, -2.0).is_err());
        assert_eq!(EnvelopeCase::for_beta(l, -1.0).unwrap(), EnvelopeCase::Log);
        let z = Complex64::new(0.5, 0.5);
        let d1 = (Complex64::new(1.0, 0.0) - z * w.conj()).norm();
        let d2 = (Complex64::new(1.0, 0.0) - z * w).norm();
        let iv = envelope(l, EnvelopeCase::NegativeLarge(-1.5), z, w).unwrap();
        assert!((iv - (d1 + d2).powf(-0.5)).abs() < 1e-15);
        let iii = envelope(l, EnvelopeCase::Log, z, w).unwrap();
        assert!((iii - (d2 / d1 + 2.0).ln() / (d1 + d2)).abs() < 1e-15);
    }

    #[test]
    fn geometry_on_real_pairs() {
        let z = DiskPoint::polar(0.4, 0.0).unwrap();
        let w = DiskPoint::polar(0.7, 0.0).unwrap();
        let g = geometry_factors(&z, &w);
        assert!((g.d1 - 0.72).abs() < 1e-15 && (g.comp1 - 0.72).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let g = geometry_factors(&point(&mut rng, 1.0), &point(&mut rng, 1.0));
            let ratio = g.d1 / g.comp1;
            assert!((0.5..=2.0).contains(&ratio), "{ratio}");
            assert!((g.d1 + g.d2) / g.comp2 >= 0.25);
        }
    }
}
