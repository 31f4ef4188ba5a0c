//! The λ-analytic basis `φ_n` and the λ-harmonic partners `z̄·conj(φ_{n-1}(z))`.
//!
//! Two independent evaluators are kept: the Gegenbauer (polar) form, used by
//! every hot path through [`BasisSweep`], and the binomial-sum form
//! [`phi_sum`], which also covers `λ = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::specfun::{GegenbauerSweep, LambdaParam};

/// A point of the closed unit disk in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    r: f64,
    theta: f64,
    cos_theta: f64,
    sin_theta: f64,
}

impl DiskPoint {
    /// Builds `r e^{iθ}`; `θ` is reduced into `(-π, π]`.
    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid("r", r, "radius must lie in [0, 1]"));
        }
        if !theta.is_finite() {
            return Err(invalid("theta", theta, "angle must be finite"));
        }
        let mut theta = theta.rem_euclid(2.0 * PI);
        if theta > PI {
            theta -= 2.0 * PI;
        }
        let (sin_theta, cos_theta) = theta.sin_cos();
        Ok(Self {
            r,
            theta,
            cos_theta,
            sin_theta,
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if r > 1.0 {
            return Err(Error::OutsideDomain {
                what: "the closed unit disk",
                radius: r,
            });
        }
        if r == 0.0 {
            return Ok(Self::origin());
        }
        Ok(Self {
            r,
            theta: z.arg(),
            cos_theta: z.re / r,
            sin_theta: z.im / r,
        })
    }

    pub fn origin() -> Self {
        Self {
            r: 0.0,
            theta: 0.0,
            cos_theta: 1.0,
            sin_theta: 0.0,
        }
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    #[inline]
    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }

    #[inline]
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.r * self.cos_theta, self.r * self.sin_theta)
    }

    /// Reflection `z ↦ z̄`.
    pub fn conj(&self) -> Self {
        Self {
            r: self.r,
            theta: if self.theta == PI { PI } else { -self.theta },
            cos_theta: self.cos_theta,
            sin_theta: -self.sin_theta,
        }
    }

    #[inline]
    pub fn is_interior(&self) -> bool {
        self.r < 1.0
    }
}

/// `ε_n = sqrt(n!/(2λ+1)_n)`.
pub fn epsilon(lam: LambdaParam, n: usize) -> f64 {
    let two_lam = 2.0 * lam.value();
    (1..=n).fold(1.0, |acc, k| acc * (k as f64 / (k as f64 + two_lam)).sqrt())
}

/// `ε_n^{-1}` for large `n` without the O(n) product.
pub(crate) fn epsilon_inv_fast(lam: LambdaParam, n: usize) -> f64 {
    if n <= 64 {
        return 1.0 / epsilon(lam, n);
    }
    let two_lam = 2.0 * lam.value();
    let nf = n as f64;
    // ε_n^{-2} = Γ(n+2λ+1) / (Γ(2λ+1) Γ(n+1))
    let ln = crate::specfun::ln_gamma(nf + two_lam + 1.0)
        - crate::specfun::ln_gamma(two_lam + 1.0)
        - crate::specfun::ln_gamma(nf + 1.0);
    (0.5 * ln).exp()
}

/// Normalizing sequences `ε_n` and `a_n = sqrt((n+λ+1)/(λ+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisNormalizers {
    pub epsilon: Vec<f64>,
    pub a_n: Vec<f64>,
}

impl BasisNormalizers {
    pub fn new(lam: LambdaParam, n_max: usize) -> Self {
        let two_lam = 2.0 * lam.value();
        let mut epsilon = Vec::with_capacity(n_max + 1);
        let mut e = 1.0;
        epsilon.push(e);
        for k in 1..=n_max {
            e *= (k as f64 / (k as f64 + two_lam)).sqrt();
            epsilon.push(e);
        }
        let l1 = lam.value() + 1.0;
        let a_n = (0..=n_max).map(|n| ((n as f64 + l1) / l1).sqrt()).collect();
        Self { epsilon, a_n }
    }
}

/// The majorant `ε_n^{-1} r^n` of `|φ_n(z)|` at `|z| = r`.
pub fn phi_bound(lam: LambdaParam, n: usize, r: f64) -> f64 {
    epsilon_inv_fast(lam, n) * r.powi(n as i32)
}

/// One step of [`BasisSweep`]: `φ_n(z)` and, for `n >= 1`,
/// `z̄·conj(φ_{n-1}(z))` (zero at `n = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisTerm {
    pub phi: Complex64,
    pub partner: Complex64,
}

#[derive(Debug, Clone)]
enum SweepState {
    Classical {
        z: Complex64,
        power: Complex64,
    },
    Dunkl {
        two_lam: f64,
        r: f64,
        sin_theta: f64,
        eps: f64,
        eps_prev: f64,
        r_pow: f64,
        outer: GegenbauerSweep,
        inner: GegenbauerSweep,
    },
}

/// Streams `φ_0(z), φ_1(z), ...` (and the harmonic partners) with one
/// Gegenbauer recurrence sweep per family.
#[derive(Debug, Clone)]
pub struct BasisSweep {
    n: usize,
    state: SweepState,
}

impl BasisSweep {
    pub fn new(lam: LambdaParam, p: &DiskPoint) -> Self {
        let state = if lam.is_classical() {
            SweepState::Classical {
                z: p.z(),
                power: Complex64::new(1.0, 0.0),
            }
        } else {
            let l = lam.value();
            let c = p.cos_theta().clamp(-1.0, 1.0);
            SweepState::Dunkl {
                two_lam: 2.0 * l,
                r: p.r(),
                sin_theta: p.sin_theta(),
                eps: 1.0,
                eps_prev: 1.0,
                r_pow: 1.0,
                outer: GegenbauerSweep::new_unchecked(l, c),
                inner: GegenbauerSweep::new_unchecked(l + 1.0, c),
            }
        };
        Self { n: 0, state }
    }

    /// Next `(φ_n, partner_n)` pair.
    #[inline]
    pub fn next_term(&mut self) -> BasisTerm {
        let n = self.n;
        self.n += 1;
        match &mut self.state {
            SweepState::Classical { z, power } => {
                let phi = *power;
                let partner = if n == 0 { Complex64::new(0.0, 0.0) } else { phi.conj() };
                *power *= *z;
                BasisTerm { phi, partner }
            }
            SweepState::Dunkl {
                two_lam,
                r,
                sin_theta,
                eps,
                eps_prev,
                r_pow,
                outer,
                inner,
            } => {
                let g_outer = outer.next().unwrap_or(0.0);
                if n == 0 {
                    BasisTerm {
                        phi: Complex64::new(1.0, 0.0),
                        partner: Complex64::new(0.0, 0.0),
                    }
                } else {
                    let nf = n as f64;
                    *eps_prev = *eps;
                    *eps *= (nf / (nf + *two_lam)).sqrt();
                    *r_pow *= *r;
                    let g_inner = inner.next().unwrap_or(0.0);
                    let re = (nf + *two_lam) / *two_lam * g_outer;
                    let im = *sin_theta * g_inner;
                    let s = *eps * *r_pow;
                    let sp = *eps_prev * *r_pow;
                    BasisTerm {
                        phi: Complex64::new(s * re, s * im),
                        partner: Complex64::new(sp * nf / *two_lam * g_outer, -sp * im),
                    }
                }
            }
        }
    }
}

impl Iterator for BasisSweep {
    type Item = Complex64;

    #[inline]
    fn next(&mut self) -> Option<Complex64> {
        Some(self.next_term().phi)
    }
}

/// `φ_0(z), ..., φ_{n_max}(z)` in one pass.
pub fn phi_all(lam: LambdaParam, p: &DiskPoint, n_max: usize) -> Vec<Complex64> {
    BasisSweep::new(lam, p).take(n_max + 1).collect()
}

/// `φ_n(z)` from the Gegenbauer form
/// `ε_n r^n [((n+2λ)/(2λ)) P_n^λ(cosθ) + i sinθ P_{n-1}^{λ+1}(cosθ)]`.
pub fn phi_polar(n: usize, lam: LambdaParam, p: &DiskPoint) -> Result<Complex64> {
    if lam.is_classical() {
        return Err(Error::DegenerateLambda("phi_polar"));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let l = lam.value();
    let c = p.cos_theta().clamp(-1.0, 1.0);
    let outer = GegenbauerSweep::new_unchecked(l, c).nth(n).unwrap_or(0.0);
    let inner = GegenbauerSweep::new_unchecked(l + 1.0, c).nth(n - 1).unwrap_or(0.0);
    let nf = n as f64;
    let scale = epsilon(lam, n) * p.r().powi(n as i32);
    Ok(Complex64::new(
        scale * (nf + 2.0 * l) / (2.0 * l) * outer,
        scale * p.sin_theta() * inner,
    ))
}

/// `φ_n(z)` from the binomial sum
/// `ε_n Σ_j (λ)_j (λ+1)_{n-j} / (j! (n-j)!) z̄^j z^{n-j}`.
///
/// The ratios `(λ)_j/j!` and `(λ+1)_k/k!` are built by running products, so
/// nothing overflows. At `λ = 0` this is exactly `z^n`.
pub fn phi_sum(n: usize, lam: LambdaParam, z: Complex64) -> Complex64 {
    let l = lam.value();
    let mut lower = Vec::with_capacity(n + 1); // (λ)_j / j!
    let mut upper = Vec::with_capacity(n + 1); // (λ+1)_k / k!
    let (mut a, mut b) = (1.0, 1.0);
    for k in 0..=n {
        if k > 0 {
            let kf = k as f64;
            a *= (l + kf - 1.0) / kf;
            b *= (l + kf) / kf;
        }
        lower.push(a);
        upper.push(b);
    }
    let zbar = z.conj();
    let mut z_pows = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        z_pows.push(p);
        p *= z;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zbar_pow = Complex64::new(1.0, 0.0);
    for j in 0..=n {
        if lower[j] != 0.0 {
            acc += zbar_pow * z_pows[n - j] * (lower[j] * upper[n - j]);
        }
        zbar_pow *= zbar;
    }
    acc * epsilon(lam, n)
}

/// The λ-harmonic partner `z̄·conj(φ_{n-1}(z))` from its Gegenbauer form.
pub fn harmonic_partner(n: usize, lam: LambdaParam, p: &DiskPoint) -> Result<Complex64> {
    if lam.is_classical() {
        return Err(Error::DegenerateLambda("harmonic_partner"));
    }
    if n == 0 {
        return Err(invalid("n", 0.0, "harmonic partners start at n = 1"));
    }
    let l = lam.value();
    let c = p.cos_theta().clamp(-1.0, 1.0);
    let outer = GegenbauerSweep::new_unchecked(l, c).nth(n).unwrap_or(0.0);
    let inner = GegenbauerSweep::new_unchecked(l + 1.0, c).nth(n - 1).unwrap_or(0.0);
    let scale = epsilon(lam, n - 1) * p.r().powi(n as i32);
    Ok(Complex64::new(
        scale * n as f64 / (2.0 * l) * outer,
        -scale * p.sin_theta() * inner,
    ))
}
