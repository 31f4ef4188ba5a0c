//! p-means, `A^p` norms, weighted sups and Bloch-type seminorms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::DiskPoint;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{CircleRule, DiskRule, Rule};
use crate::series::{f0_series, CoefficientSeries};
use crate::specfun::LambdaParam;
use crate::sum::sum_real;

pub const DEFAULT_DEPTH: usize = 10;
pub const DEFAULT_SUBDIVISIONS: usize = 4;

/// Rings `r_j = 1 − 2^{−j/s}`, `j = 0..=sK`, so the dyadic radii
/// `1 − 2^{−k}` appear at `j = sk` and `r_0 = 0` is the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupGrid {
    depth: usize,
    subdivisions: usize,
    radii: Vec<f64>,
}

impl SupGrid {
    pub fn new(depth: usize, subdivisions: usize) -> Result<Self> {
        if depth == 0 || depth > 40 {
            return Err(invalid("depth", depth as f64, "grid depth must lie in 1..=40"));
        }
        if subdivisions == 0 {
            return Err(invalid("subdivisions", 0.0, "need at least one ring per level"));
        }
        let radii = (0..=depth * subdivisions)
            .map(|j| 1.0 - (-(j as f64) / subdivisions as f64).exp2())
            .collect();
        Ok(Self {
            depth,
            subdivisions,
            radii,
        })
    }

    pub fn with_depth(depth: usize) -> Result<Self> {
        Self::new(depth, DEFAULT_SUBDIVISIONS)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().expect("grid has rings")
    }

    /// Angles on ring `j` for a series of degree `degree`:
    /// at least `8 · max(degree, 2^{j/s})`.
    pub fn angular_count(&self, j: usize, degree: usize) -> usize {
        if j == 0 {
            return 1;
        }
        let level = (j as f64 / self.subdivisions as f64).exp2().ceil() as usize;
        8 * degree.max(level).max(1)
    }

    fn ring(&self, j: usize, degree: usize) -> Vec<DiskPoint> {
        let r = self.radii[j];
        let m = self.angular_count(j, degree);
        (0..m)
            .map(|i| DiskPoint::polar(r, -PI + 2.0 * PI * i as f64 / m as f64).expect("ring radius below one"))
            .collect()
    }
}

/// A grid maximum with its location and the truncation slack at that ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupValue {
    pub value: f64,
    pub r: f64,
    pub theta: f64,
    /// Largest weighted tail bound over the rings.
    pub slack: f64,
}

/// `max over the grid of (1-|z|²)^m |f(z)|`.
///
/// Series with real nonnegative coefficients peak on each ring at `θ = 0`
/// (`|φ_n(z)| ≤ φ_n(|z|)`), so one point per ring is evaluated for them.
pub fn weighted_sup(f: &CoefficientSeries, m: u32, grid: &SupGrid) -> Result<SupValue> {
    let degree = f.degree().unwrap_or(0);
    let shortcut = f.has_nonnegative_coeffs();
    let rings: Vec<Result<(f64, f64, f64, f64)>> = (0..grid.radii.len())
        .into_par_iter()
        .map(|j| {
            let r = grid.radii[j];
            let weight = (1.0 - r * r).powi(m as i32);
            let tail = f.tail_bound(r)?;
            if !tail.is_finite() {
                return Err(Error::Unsupported(
                    "series has no certified tail bound on this grid".into(),
                ));
            }
            let points = if shortcut {
                vec![DiskPoint::polar(r, 0.0)?]
            } else {
                grid.ring(j, degree)
            };
            let mut best = (f64::NEG_INFINITY, 0.0);
            for p in &points {
                let v = f.value_at(p).norm() * weight;
                if v > best.0 {
                    best = (v, p.theta());
                }
            }
            Ok((best.0, r, best.1, tail * weight))
        })
        .collect();
    let mut out = SupValue {
        value: f64::NEG_INFINITY,
        r: 0.0,
        theta: 0.0,
        slack: 0.0,
    };
    for ring in rings {
        let (v, r, theta, slack) = ring?;
        if v > out.value {
            out.value = v;
            out.r = r;
            out.theta = theta;
        }
        out.slack = out.slack.max(slack);
    }
    Ok(out)
}

/// `sup (1-|z|²)^n |(D_z ∘ z)^n f(z)|` over the grid.
pub fn bloch_seminorm(f: &CoefficientSeries, order: u32, grid: &SupGrid) -> Result<SupValue> {
    if order == 0 {
        return Err(invalid("order", 0.0, "seminorm order must be positive"));
    }
    weighted_sup(&f.dz_circ_z_pow(order), order, grid)
}

/// Plain sup of `|f|` over the grid.
pub fn sup_abs(f: &CoefficientSeries, grid: &SupGrid) -> Result<SupValue> {
    weighted_sup(f, 0, grid)
}

/// `max |f(z)| / (‖f‖_B ln(2/(1-|z|)))` over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRatio {
    pub ratio: f64,
    pub bloch: f64,
    pub r: f64,
}

pub fn growth_ratio(f: &CoefficientSeries, grid: &SupGrid) -> Result<GrowthRatio> {
    let bloch = bloch_seminorm(f, 1, grid)?.value;
    if bloch == 0.0 {
        return Ok(GrowthRatio {
            ratio: 0.0,
            bloch,
            r: 0.0,
        });
    }
    let degree = f.degree().unwrap_or(0);
    let shortcut = f.has_nonnegative_coeffs();
    let mut best = GrowthRatio { ratio: 0.0, bloch, r: 0.0 };
    for (j, &r) in grid.radii.iter().enumerate() {
        let points = if shortcut {
            vec![DiskPoint::polar(r, 0.0)?]
        } else {
            grid.ring(j, degree)
        };
        let m = points.par_iter().map(|p| f.value_at(p).norm()).reduce(|| 0.0, f64::max);
        let ratio = m / (bloch * (2.0 / (1.0 - r)).ln());
        if ratio > best.ratio {
            best.ratio = ratio;
            best.r = r;
        }
    }
    Ok(best)
}

/// Exponent of a p-mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

/// `M_p(f; r) = (∫ |f(r e^{iθ})|^p dm_λ)^{1/p}`; for `p = ∞` the maximum over
/// the rule's angles, so only as fine as the rule.
pub fn p_mean<F>(f: F, r: f64, p: PExponent, rule: &CircleRule) -> Result<f64>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("r", r, "radius must lie in [0, 1)"));
    }
    let circle = rule.scaled(r)?;
    let values: Vec<f64> = circle.nodes().par_iter().map(|z| f(z).norm()).collect();
    match p {
        PExponent::Infinity => Ok(values.iter().copied().fold(0.0, f64::max)),
        PExponent::Finite(p) if p > 0.0 => {
            let s = sum_real(values.iter().zip(circle.weights()).map(|(v, w)| v.powf(p) * w));
            Ok(s.powf(1.0 / p))
        }
        PExponent::Finite(p) => Err(invalid("p", p, "exponent must be positive")),
    }
}

/// An `A^p` norm together with whether `p` is below `p_0 = 2λ/(2λ+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApNorm {
    pub value: f64,
    pub below_p0: bool,
}

/// `(∫_D |f|^p dσ_λ)^{1/p}`.
pub fn ap_norm<F>(f: F, p: f64, rule: &DiskRule) -> Result<ApNorm>
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    rule.require_alpha(0.0)?;
    if !(p > 0.0) {
        return Err(invalid("p", p, "exponent must be positive"));
    }
    let values: Vec<f64> = rule.nodes().par_iter().map(|z| f(z).norm().powf(p)).collect();
    let s = sum_real(values.iter().zip(rule.weights()).map(|(v, w)| v * w));
    Ok(ApNorm {
        value: s.powf(1.0 / p),
        below_p0: p < rule.lam().p0(),
    })
}

/// Truncation of `f_0` whose own tail, and the tails of `(D_z ∘ z)^n f_0`
/// weighted by `(1-r²)^n` for `n ≤ max_order`, stay within `tol` out to
/// `1 − 2^{−depth}`.
pub fn f0_for_depth(lam: LambdaParam, depth: usize, max_order: u32, tol: f64) -> Result<CoefficientSeries> {
    let r = 1.0 - (-(depth as f64)).exp2();
    let base = f0_series(lam, 1)?;
    let mut order = 1;
    for n in 0..=max_order {
        let tail = base.dz_circ_z_pow(n).tail().expect("diagonal maps keep tails");
        let weight = (1.0 - r * r).powi(n as i32);
        order = order.max(tail.order_for(lam, r, tol / weight)?);
    }
    f0_series(lam, order)
}

/// One row of the `f_0` growth profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: usize,
    pub r: f64,
    /// `M_∞(f_0; r) = f_0(r)`.
    pub m_inf: f64,
    /// `M_∞ / ln(1/(1-r))`.
    pub ln_ratio: f64,
    /// Bloch seminorm over the grid of depth `k`.
    pub bloch_partial: f64,
    pub tail_bound: f64,
}

/// `M_∞(f_0; 1 − 2^{−k})` and the partial Bloch seminorm for each `k`.
pub fn f0_unboundedness_profile(lam: LambdaParam, depths: &[usize], tol: f64) -> Result<Vec<ProfileRow>> {
    let deepest = depths.iter().copied().max().ok_or_else(|| Error::Unsupported("no depths".into()))?;
    let f0 = f0_for_depth(lam, deepest, 1, tol)?;
    depths
        .iter()
        .map(|&k| {
            let r = 1.0 - (-(k as f64)).exp2();
            let v = f0.eval(&DiskPoint::polar(r, 0.0)?)?;
            let m_inf = v.value.re;
            let grid = SupGrid::with_depth(k)?;
            Ok(ProfileRow {
                k,
                r,
                m_inf,
                ln_ratio: m_inf / (1.0 / (1.0 - r)).ln(),
                bloch_partial: bloch_seminorm(&f0, 1, &grid)?.value,
                tail_bound: v.tail_bound,
            })
        })
        .collect()
}
