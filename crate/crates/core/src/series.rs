//! λ-analytic functions in coefficient space, `f = Σ c_n φ_n`, together with
//! the diagonal Dunkl-operator actions and finite-difference oracles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{epsilon_inv_fast, BasisSweep, DiskPoint};
use crate::error::{invalid, Error, Result};
use crate::specfun::LambdaParam;
use crate::sum::ComplexSum;

/// Default finite-difference step of the numeric oracles.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Coefficient majorant `|c_n| ≤ scale · (n+λ+1)^eigen_power · n^{-decay}`
/// for every `n` past the stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub scale: f64,
    pub decay: f64,
    pub eigen_power: f64,
}

impl PowerTail {
    /// `ln` of the majorant term `scale (n+λ+1)^p n^{-s} ε_n^{-1} r^n`.
    fn ln_term(&self, lam: LambdaParam, n: usize, r: f64) -> f64 {
        let nf = n as f64;
        self.scale.ln() + self.eigen_power * (nf + lam.value() + 1.0).ln() - self.decay * nf.ln()
            + epsilon_inv_fast(lam, n).ln()
            + nf * r.ln()
    }

    /// Upper bound on the consecutive ratio of majorant terms for `n ≥ first`.
    fn ratio_bound(&self, lam: LambdaParam, first: usize, r: f64) -> f64 {
        let l = lam.value();
        let n = first as f64;
        let f1 = if self.eigen_power >= 0.0 {
            ((n + l + 2.0) / (n + l + 1.0)).powf(self.eigen_power)
        } else {
            1.0
        };
        let f2 = if self.decay >= 0.0 { 1.0 } else { (n / (n + 1.0)).powf(self.decay) };
        let f3 = ((n + 2.0 * l + 1.0) / (n + 1.0)).sqrt();
        r * f1 * f2 * f3
    }

    /// `Σ_{n ≥ first} |c_n| ε_n^{-1} r^n`, bounded by a geometric majorant.
    pub fn bound(&self, lam: LambdaParam, first: usize, r: f64) -> Result<f64> {
        if self.scale == 0.0 || r == 0.0 {
            return Ok(0.0);
        }
        let first = first.max(1);
        let q = self.ratio_bound(lam, first, r);
        if q >= 1.0 {
            return Err(Error::OutsideDomain {
                what: "the truncation tail majorant",
                radius: r,
            });
        }
        Ok(self.ln_term(lam, first, r).exp() / (1.0 - q))
    }

    /// Smallest truncation order `N` (a power of two times 16) whose tail past
    /// `N` is at most `tol` at radius `r`.
    pub fn order_for(&self, lam: LambdaParam, r: f64, tol: f64) -> Result<usize> {
        let mut hi = 16usize;
        loop {
            if let Ok(b) = self.bound(lam, hi + 1, r) {
                if b <= tol {
                    break;
                }
            }
            if hi > 1 << 26 {
                return Err(Error::NonConvergence {
                    what: "truncation order search",
                    terms: hi,
                    achieved: self.bound(lam, hi + 1, r).unwrap_or(f64::INFINITY),
                });
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match self.bound(lam, mid + 1, r) {
                Ok(b) if b <= tol => hi = mid,
                _ => lo = mid,
            }
        }
        Ok(hi)
    }
}

/// Whether the coefficients are the whole function or a truncation of an
/// infinite series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesKind {
    Polynomial,
    /// `tail = None` means no certified bound on the discarded terms.
    Truncation { name: String, tail: Option<PowerTail> },
}

/// A value of `f` together with the certified bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `f(z) = Σ_{n ≤ N} c_n φ_n(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    lam: LambdaParam,
    coeffs: Vec<Complex64>,
    kind: SeriesKind,
}

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
        coeffs.pop();
    }
    coeffs
}

impl CoefficientSeries {
    pub fn polynomial(lam: LambdaParam, coeffs: Vec<Complex64>) -> Self {
        Self {
            lam,
            coeffs: trim(coeffs),
            kind: SeriesKind::Polynomial,
        }
    }

    pub fn truncation(lam: LambdaParam, coeffs: Vec<Complex64>, name: impl Into<String>, tail: Option<PowerTail>) -> Self {
        Self {
            lam,
            coeffs: trim(coeffs),
            kind: SeriesKind::Truncation {
                name: name.into(),
                tail,
            },
        }
    }

    pub fn from_real(lam: LambdaParam, coeffs: &[f64]) -> Self {
        Self::polynomial(lam, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(lam: LambdaParam) -> Self {
        Self::polynomial(lam, Vec::new())
    }

    /// The basis function `φ_k` itself.
    pub fn unit(lam: LambdaParam, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self::polynomial(lam, coeffs)
    }

    pub fn lam(&self) -> LambdaParam {
        self.lam
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_n`, zero past the stored range.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn kind(&self) -> &SeriesKind {
        &self.kind
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, SeriesKind::Polynomial)
    }

    pub fn is_zero(&self) -> bool {
        self.is_polynomial() && self.coeffs.is_empty()
    }

    /// Highest stored index; `None` for the empty coefficient list.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True when every coefficient is real and nonnegative, so that the
    /// modulus on each circle peaks at `θ = 0`.
    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0 && c.re >= 0.0)
    }

    pub fn tail(&self) -> Option<PowerTail> {
        match &self.kind {
            SeriesKind::Polynomial => None,
            SeriesKind::Truncation { tail, .. } => *tail,
        }
    }

    /// Certified bound on `|f(z) − f_N(z)|` at `|z| = r`.
    pub fn tail_bound(&self, r: f64) -> Result<f64> {
        match &self.kind {
            SeriesKind::Polynomial => Ok(0.0),
            SeriesKind::Truncation { tail: None, .. } => Ok(f64::INFINITY),
            SeriesKind::Truncation { tail: Some(t), .. } => t.bound(self.lam, self.coeffs.len(), r),
        }
    }

    /// `Σ c_n φ_n(z)` from one Gegenbauer sweep, ignoring any tail.
    pub fn value_at(&self, p: &DiskPoint) -> Complex64 {
        let mut sweep = BasisSweep::new(self.lam, p);
        let mut acc = ComplexSum::new();
        for c in &self.coeffs {
            let phi = sweep.next_term().phi;
            acc.add(*c * phi);
        }
        acc.value()
    }

    /// Value plus tail bound; truncations are rejected on the boundary.
    pub fn eval(&self, p: &DiskPoint) -> Result<SeriesValue> {
        if !self.is_polynomial() && !p.is_interior() {
            return Err(Error::OutsideDomain {
                what: "a truncated series",
                radius: p.r(),
            });
        }
        Ok(SeriesValue {
            value: self.value_at(p),
            tail_bound: self.tail_bound(p.r())?,
        })
    }

    /// `c'_n = factor(n) c_n`, with the tail updated by `tail_map`.
    fn map_diagonal(&self, factor: impl Fn(usize) -> f64, tail_map: impl Fn(PowerTail) -> Option<PowerTail>) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, c)| *c * factor(n)).collect();
        let kind = match &self.kind {
            SeriesKind::Polynomial => SeriesKind::Polynomial,
            SeriesKind::Truncation { name, tail } => SeriesKind::Truncation {
                name: name.clone(),
                tail: tail.and_then(tail_map),
            },
        };
        Self {
            lam: self.lam,
            coeffs: trim(coeffs),
            kind,
        }
    }

    /// `t · f`.
    pub fn scaled(&self, t: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * t).collect();
        let kind = match &self.kind {
            SeriesKind::Polynomial => SeriesKind::Polynomial,
            SeriesKind::Truncation { name, tail } => SeriesKind::Truncation {
                name: name.clone(),
                tail: tail.map(|tl| PowerTail {
                    scale: tl.scale * t.norm(),
                    ..tl
                }),
            },
        };
        Self {
            lam: self.lam,
            coeffs: trim(coeffs),
            kind,
        }
    }

    /// `f + g` for polynomials; a truncation operand makes the tail unknown
    /// unless both tails share their exponents.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.lam != other.lam {
            return Err(invalid("lambda", other.lam.value(), "series with different lambda"));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let kind = match (&self.kind, &other.kind) {
            (SeriesKind::Polynomial, SeriesKind::Polynomial) => SeriesKind::Polynomial,
            (SeriesKind::Polynomial, k) | (k, SeriesKind::Polynomial) => k.clone(),
            (SeriesKind::Truncation { name: a, tail: ta }, SeriesKind::Truncation { name: b, tail: tb }) => {
                let tail = match (ta, tb) {
                    (Some(x), Some(y)) if x.decay == y.decay && x.eigen_power == y.eigen_power => Some(PowerTail {
                        scale: x.scale + y.scale,
                        ..*x
                    }),
                    _ => None,
                };
                SeriesKind::Truncation {
                    name: format!("{a}+{b}"),
                    tail,
                }
            }
        };
        Ok(Self {
            lam: self.lam,
            coeffs: trim(coeffs),
            kind,
        })
    }

    /// `D_z f`: `c'_k = sqrt((k+1)(k+1+2λ)) c_{k+1}`.
    pub fn dz(&self) -> Self {
        let two_lam = 2.0 * self.lam.value();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| *c * (n as f64 * (n as f64 + two_lam)).sqrt())
            .collect();
        let kind = match &self.kind {
            SeriesKind::Polynomial => SeriesKind::Polynomial,
            SeriesKind::Truncation { name, .. } => SeriesKind::Truncation {
                name: format!("dz({name})"),
                tail: None,
            },
        };
        Self {
            lam: self.lam,
            coeffs: trim(coeffs),
            kind,
        }
    }

    /// `(D_z ∘ z)^n f`: `c'_k = (k+λ+1)^n c_k`.
    pub fn dz_circ_z_pow(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let l1 = self.lam.value() + 1.0;
        self.map_diagonal(
            |k| (k as f64 + l1).powi(n as i32),
            |t| {
                Some(PowerTail {
                    eigen_power: t.eigen_power + n as f64,
                    ..t
                })
            },
        )
    }

    /// The series `Σ ((n+λ+α+2)/(α+1)) c_n φ_n`, i.e. `ψ/(1-|z|²)`.
    pub fn psi_inner(&self, alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(invalid("alpha", alpha, "weight exponent must exceed -1"));
        }
        let l = self.lam.value();
        Ok(self.map_diagonal(
            |n| (n as f64 + l + alpha + 2.0) / (alpha + 1.0),
            |t| {
                Some(PowerTail {
                    scale: t.scale * (l + alpha + 2.0) / ((l + 1.0) * (alpha + 1.0)),
                    eigen_power: t.eigen_power + 1.0,
                    ..t
                })
            },
        ))
    }

    /// The diagonal image `Σ a(n) c_n φ_n` of a polynomial.
    pub fn apply_weights(&self, a: impl Fn(usize) -> f64) -> Self {
        self.map_diagonal(a, |_| None)
    }
}

/// `f_0 = Σ_{n ≥ 1} φ_n / n^{λ+1}` truncated at `N`, with its power tail.
pub fn f0_series(lam: LambdaParam, order: usize) -> Result<CoefficientSeries> {
    if order == 0 {
        return Err(invalid("order", 0.0, "truncation order must be positive"));
    }
    let s = lam.value() + 1.0;
    let coeffs = (0..=order)
        .map(|n| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((n as f64).powf(-s), 0.0)
            }
        })
        .collect();
    Ok(CoefficientSeries::truncation(
        lam,
        coeffs,
        "f0",
        Some(PowerTail {
            scale: 1.0,
            decay: s,
            eigen_power: 0.0,
        }),
    ))
}

/// `Σ c_n φ_n(z) + Σ c̃_n z̄ conj(φ_{n-1}(z))`; `partner_coeffs[k]` multiplies
/// the partner of index `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSeries {
    pub lam: LambdaParam,
    pub analytic_coeffs: Vec<Complex64>,
    pub partner_coeffs: Vec<Complex64>,
}

impl HarmonicSeries {
    pub fn value_at(&self, p: &DiskPoint) -> Complex64 {
        let len = self.analytic_coeffs.len().max(self.partner_coeffs.len() + 1);
        let mut sweep = BasisSweep::new(self.lam, p);
        let mut acc = ComplexSum::new();
        for n in 0..len {
            let t = sweep.next_term();
            if let Some(c) = self.analytic_coeffs.get(n) {
                acc.add(*c * t.phi);
            }
            if n > 0 {
                if let Some(c) = self.partner_coeffs.get(n - 1) {
                    acc.add(*c * t.partner);
                }
            }
        }
        acc.value()
    }
}

fn check_stencil(z: Complex64, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(invalid("h", h, "step must be positive"));
    }
    if z.im.abs() < 4.0 * h {
        return Err(invalid("z.im", z.im, "point is within 4h of the real axis"));
    }
    Ok(())
}

/// `λ (f(z) − f(z̄)) / (z − z̄)`.
fn reflection<F: Fn(Complex64) -> Complex64>(lam: LambdaParam, f: &F, z: Complex64) -> Complex64 {
    if lam.is_classical() {
        return Complex64::new(0.0, 0.0);
    }
    (f(z) - f(z.conj())) / (z - z.conj()) * lam.value()
}

fn partials<F: Fn(Complex64) -> Complex64>(f: &F, z: Complex64, h: f64) -> (Complex64, Complex64) {
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let ih = Complex64::new(0.0, h);
    let dy = (f(z + ih) - f(z - ih)) / (2.0 * h);
    (dx, dy)
}

/// `D_z f(z)` by central differences plus the exact reflection quotient.
pub fn dz_numeric<F: Fn(Complex64) -> Complex64>(lam: LambdaParam, f: F, z: Complex64, h: f64) -> Result<Complex64> {
    check_stencil(z, h)?;
    let (dx, dy) = partials(&f, z, h);
    let i = Complex64::new(0.0, 1.0);
    Ok((dx - i * dy) * 0.5 + reflection(lam, &f, z))
}

/// `D_z̄ f(z)`; vanishes on λ-analytic functions.
pub fn dzbar_numeric<F: Fn(Complex64) -> Complex64>(lam: LambdaParam, f: F, z: Complex64, h: f64) -> Result<Complex64> {
    check_stencil(z, h)?;
    let (dx, dy) = partials(&f, z, h);
    let i = Complex64::new(0.0, 1.0);
    Ok((dx + i * dy) * 0.5 - reflection(lam, &f, z))
}

/// `Δ_λ f = f_xx + f_yy + (2λ/y) f_y − (λ/y²)(f(z) − f(z̄))`.
pub fn laplacian_numeric<F: Fn(Complex64) -> Complex64>(lam: LambdaParam, f: F, z: Complex64, h: f64) -> Result<Complex64> {
    check_stencil(z, h)?;
    let ih = Complex64::new(0.0, h);
    let f0 = f(z);
    let (fe, fw, fn_, fs) = (f(z + h), f(z - h), f(z + ih), f(z - ih));
    let flat = (fe + fw + fn_ + fs - f0 * 4.0) / (h * h);
    let l = lam.value();
    if l == 0.0 {
        return Ok(flat);
    }
    let y = z.im;
    let fy = (fn_ - fs) / (2.0 * h);
    Ok(flat + fy * (2.0 * l / y) - (f0 - f(z.conj())) * (l / (y * y)))
}

/// Wire format of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub lambda: f64,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(flatten)]
    pub kind: SeriesKind,
}

impl From<&CoefficientSeries> for SeriesJson {
    fn from(s: &CoefficientSeries) -> Self {
        Self {
            lambda: s.lam.value(),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            kind: s.kind.clone(),
        }
    }
}

impl TryFrom<SeriesJson> for CoefficientSeries {
    type Error = Error;

    fn try_from(j: SeriesJson) -> Result<Self> {
        let lam = LambdaParam::new(j.lambda)?;
        if j.coeffs.iter().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(Error::Unsupported("series coefficients must be finite".into()));
        }
        Ok(Self {
            lam,
            coeffs: trim(j.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect()),
            kind: j.kind,
        })
    }
}

impl Serialize for CoefficientSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefficientSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        CoefficientSeries::try_from(j).map_err(serde::de::Error::custom)
    }
}
