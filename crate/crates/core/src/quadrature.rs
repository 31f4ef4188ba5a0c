//! Gauss rules for the circle measure `dm_λ` and the weighted disk measures
//! `(1-|z|²)^α dσ_λ`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::DiskPoint;
use crate::error::{invalid, Error, Result};
use crate::specfun::{ln_gamma, LambdaParam};
use crate::sum::{sum_complex, sum_real};

pub const DEFAULT_RADIAL: usize = 64;
pub const DEFAULT_ANGULAR: usize = 128;
/// Largest node count accepted by the Jacobi-matrix eigen solver.
pub const MAX_NODES: usize = 2048;

/// `c_λ = Γ(λ+2) / (Γ(λ+1/2) Γ(1/2))`, the density constant of `dσ_λ`.
pub fn area_constant(lam: LambdaParam) -> f64 {
    let l = lam.value();
    (ln_gamma(l + 2.0) - ln_gamma(l + 0.5) - 0.5 * PI.ln()).exp()
}

/// `c̃_λ = c_λ / (2λ+2)`, the density constant of `dm_λ`.
pub fn circle_constant(lam: LambdaParam) -> f64 {
    area_constant(lam) / (2.0 * lam.value() + 2.0)
}

/// `∫_D (1-|z|²)^α |φ_n|² dσ_λ = (λ+1) Γ(α+1) Γ(n+λ+1) / Γ(n+λ+α+2)`.
pub fn weighted_moment(lam: LambdaParam, alpha: f64, n: usize) -> f64 {
    let l = lam.value();
    let nf = n as f64;
    (l + 1.0) * (ln_gamma(alpha + 1.0) + ln_gamma(nf + l + 1.0) - ln_gamma(nf + l + alpha + 2.0)).exp()
}

/// Nodes and weights of an `m`-point Gauss rule on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b`.
///
/// Nodes are the eigenvalues of the symmetric Jacobi matrix, located by
/// Sturm-sequence bisection; weights come from the Christoffel numbers
/// `1 / Σ_k p̂_k(x)²` of the orthonormal polynomials.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> Result<GaussRule> {
    if m == 0 || m > MAX_NODES {
        return Err(invalid("m", m as f64, "node count must lie in 1..=MAX_NODES"));
    }
    if !(a > -1.0) || !(b > -1.0) {
        return Err(invalid("a, b", a.min(b), "Jacobi exponents must exceed -1"));
    }
    let (diag, off2) = jacobi_recurrence(m, a, b);
    let off: Vec<f64> = off2.iter().map(|v| v.sqrt()).collect();
    let mu0 = ((a + b + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)).exp();

    let mut nodes = Vec::with_capacity(m);
    let mut lower = -1.0;
    for k in 0..m {
        let x = bisect_eigenvalue(&diag, &off2, k, lower, 1.0);
        nodes.push(x);
        lower = x;
    }

    let p0 = 1.0 / mu0.sqrt();
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut prev = 0.0;
            let mut cur = p0;
            let mut acc = cur * cur;
            for k in 0..m - 1 {
                let back = if k == 0 { 0.0 } else { off[k - 1] * prev };
                let next = ((x - diag[k]) * cur - back) / off[k];
                prev = cur;
                cur = next;
                acc += cur * cur;
            }
            1.0 / acc
        })
        .collect();
    Ok(GaussRule { nodes, weights })
}

/// Diagonal `α_k` and squared off-diagonal `β_{k+1}` of the monic Jacobi
/// recurrence.
fn jacobi_recurrence(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..m)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let off2 = (1..m)
        .map(|k| {
            let kf = k as f64;
            if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        })
        .collect();
    (diag, off2)
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::EPSILON * (x.abs() + 1.0) } else { q };
        q = diag[i] - x - off2[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue, all of which lie in `(-1, 1)`.
fn bisect_eigenvalue(diag: &[f64], off2: &[f64], k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off2, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A finite node set with positive weights.
pub trait Rule: Sync {
    fn nodes(&self) -> &[DiskPoint];
    fn weights(&self) -> &[f64];

    fn total_mass(&self) -> f64 {
        sum_real(self.weights().iter().copied())
    }

    /// Writes `r,theta,weight` rows under a header.
    fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()>
    where
        Self: Sized,
    {
        writeln!(out, "r,theta,weight")?;
        for (p, w) in self.nodes().iter().zip(self.weights()) {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", p.r(), p.theta(), w)?;
        }
        Ok(())
    }
}

/// `Σ w_i g(node_i)`; nodes are evaluated in parallel and summed in node
/// order, so the result does not depend on the thread count.
pub fn integrate<R: Rule + ?Sized, F>(rule: &R, g: F) -> Complex64
where
    F: Fn(&DiskPoint) -> Complex64 + Sync,
{
    let values: Vec<Complex64> = rule.nodes().par_iter().map(&g).collect();
    sum_complex(values.iter().zip(rule.weights()).map(|(v, w)| v * *w))
}

/// Fallible variant of [`integrate`]; the first failing node is reported.
pub fn try_integrate<R: Rule + ?Sized, F>(rule: &R, g: F) -> Result<Complex64>
where
    F: Fn(&DiskPoint) -> Result<Complex64> + Sync,
{
    let values: Vec<Complex64> = rule
        .nodes()
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            g(p).map_err(|e| Error::NodeEvaluation {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(sum_complex(values.iter().zip(rule.weights()).map(|(v, w)| v * *w)))
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<R: Rule + ?Sized, F>(rule: &R, g: F) -> f64
where
    F: Fn(&DiskPoint) -> f64 + Sync,
{
    let values: Vec<f64> = rule.nodes().par_iter().map(&g).collect();
    sum_real(values.iter().zip(rule.weights()).map(|(v, w)| v * w))
}

/// Rule for `dm_λ` on the unit circle.
#[derive(Debug, Clone, Serialize)]
pub struct CircleRule {
    lam: LambdaParam,
    nodes: Vec<DiskPoint>,
    weights: Vec<f64>,
}

/// Builds a circle rule from `m` Gauss–Gegenbauer nodes in `x = cos θ`,
/// each used at `±θ`, giving `2m` angles.
pub fn make_circle_rule(lam: LambdaParam, m: usize) -> Result<CircleRule> {
    if m < 2 {
        return Err(invalid("m", m as f64, "circle rule needs at least 2 nodes"));
    }
    let e = lam.value() - 0.5;
    let gauss = gauss_jacobi(m, e, e)?;
    let c = circle_constant(lam);
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(2 * m);
    for (x, w) in gauss.nodes.iter().zip(&gauss.weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        pairs.push((theta, c * w));
        pairs.push((-theta, c * w));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut nodes = Vec::with_capacity(pairs.len());
    let mut weights = Vec::with_capacity(pairs.len());
    for (theta, w) in pairs {
        nodes.push(DiskPoint::polar(1.0, theta)?);
        weights.push(w);
    }
    Ok(CircleRule { lam, nodes, weights })
}

impl CircleRule {
    pub fn lam(&self) -> LambdaParam {
        self.lam
    }

    /// The same angles on the circle of radius `r`.
    pub fn scaled(&self, r: f64) -> Result<ScaledCircle<'_>> {
        let nodes = self
            .nodes
            .iter()
            .map(|p| DiskPoint::polar(r, p.theta()))
            .collect::<Result<_>>()?;
        Ok(ScaledCircle { base: self, nodes })
    }
}

impl Rule for CircleRule {
    fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A [`CircleRule`] transported to a circle of smaller radius.
#[derive(Debug, Clone)]
pub struct ScaledCircle<'a> {
    base: &'a CircleRule,
    nodes: Vec<DiskPoint>,
}

impl Rule for ScaledCircle<'_> {
    fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.base.weights
    }
}

/// Tensor rule for `(1-|z|²)^α dσ_λ` on the disk.
#[derive(Debug, Clone, Serialize)]
pub struct DiskRule {
    lam: LambdaParam,
    alpha: f64,
    radial: usize,
    angular: usize,
    nodes: Vec<DiskPoint>,
    weights: Vec<f64>,
}

/// Radial Gauss–Jacobi in `u = r²` against `(1-u)^α u^λ`, tensored with
/// [`make_circle_rule`].
pub fn make_disk_rule(lam: LambdaParam, alpha: f64, radial: usize, angular: usize) -> Result<DiskRule> {
    if !(alpha > -1.0) {
        return Err(invalid("alpha", alpha, "weight exponent must exceed -1"));
    }
    let l = lam.value();
    let radial_rule = gauss_jacobi(radial, alpha, l)?;
    let circle = make_circle_rule(lam, angular)?;
    let scale = (l + 1.0) * (-(alpha + l + 1.0) * 2f64.ln()).exp();
    let mut nodes = Vec::with_capacity(radial_rule.nodes.len() * circle.nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (x, wr) in radial_rule.nodes.iter().zip(&radial_rule.weights) {
        let r = (0.5 * (1.0 + x)).sqrt().min(1.0);
        for (p, wt) in circle.nodes.iter().zip(&circle.weights) {
            nodes.push(DiskPoint::polar(r, p.theta())?);
            weights.push(scale * wr * wt);
        }
    }
    Ok(DiskRule {
        lam,
        alpha,
        radial,
        angular,
        nodes,
        weights,
    })
}

impl DiskRule {
    pub fn lam(&self) -> LambdaParam {
        self.lam
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    /// Fails unless the rule was built for this `α`.
    pub fn require_alpha(&self, alpha: f64) -> Result<()> {
        if (self.alpha - alpha).abs() > 1e-14 {
            return Err(Error::AlphaMismatch {
                rule: self.alpha,
                requested: alpha,
            });
        }
        Ok(())
    }

    /// Same node counts with both doubled.
    pub fn refined(&self) -> Result<DiskRule> {
        make_disk_rule(self.lam, self.alpha, 2 * self.radial, 2 * self.angular)
    }
}

impl Rule for DiskRule {
    fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{harmonic_partner, phi_all, phi_sum};

    fn lam(v: f64) -> LambdaParam {
        LambdaParam::new(v).unwrap()
    }

    #[test]
    fn gauss_legendre_matches_known_rule() {
        let g = gauss_jacobi(3, 0.0, 0.0).unwrap();
        let x = (0.6f64).sqrt();
        assert!((g.nodes[0] + x).abs() < 1e-15 && g.nodes[1].abs() < 1e-15 && (g.nodes[2] - x).abs() < 1e-15);
        assert!((g.weights[0] - 5.0 / 9.0).abs() < 1e-14 && (g.weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_jacobi_integrates_moments_exactly() {
        // ∫_{-1}^{1} (1-x)^a (1+x)^b (1+x)^k dx = 2^{a+b+k+1} B(a+1, b+k+1)
        for &(a, b) in &[(0.5, 1.7), (-0.5, -0.5), (2.0, 0.3), (-0.7, 2.5)] {
            let g = gauss_jacobi(40, a, b).unwrap();
            assert!(g.weights.iter().all(|w| *w > 0.0));
            for k in 0..60 {
                let kf = k as f64;
                let exact = ((a + b + kf + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + kf + 1.0)
                    - ln_gamma(a + b + kf + 2.0))
                .exp();
                let approx = sum_real(g.nodes.iter().zip(&g.weights).map(|(x, w)| w * (1.0 + x).powi(k)));
                assert!((approx - exact).abs() <= 1e-12 * exact, "a={a} b={b} k={k}");
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gauss_jacobi(MAX_NODES + 1, 0.0, 0.0).is_err());
        assert!(make_circle_rule(lam(0.5), 1).is_err());
        assert!(make_disk_rule(lam(0.5), -1.0, 8, 8).is_err());
    }

    #[test]
    fn circle_rule_mass_and_symmetry() {
        for &l in &[0.0, 0.3, 0.5, 1.0, 2.5] {
            let rule = make_circle_rule(lam(l), 64).unwrap();
            assert!((rule.total_mass() - 1.0).abs() <= 1e-12, "λ={l}");
            let n = rule.nodes().len();
            for i in 0..n / 2 {
                assert!((rule.nodes()[i].theta() + rule.nodes()[n - 1 - i].theta()).abs() < 1e-15);
                assert_eq!(rule.weights()[i], rule.weights()[n - 1 - i]);
            }
        }
    }

    #[test]
    fn circle_rule_unit_lambda_weight() {
        // At λ = 1, dm = (1/π) sin²θ dθ and ∫ sin²θ cos 2θ dθ / π = -1/2.
        let rule = make_circle_rule(lam(1.0), 16).unwrap();
        assert!((circle_constant(lam(1.0)) - 1.0 / PI).abs() < 1e-14);
        let v = integrate_real(&rule, |p| (2.0 * p.theta()).cos());
        assert!((v + 0.5).abs() < 1e-13);
    }

    #[test]
    fn circle_gram_is_identity() {
        for &l in &[0.3, 0.5, 1.0, 2.5] {
            let lp = lam(l);
            let rule = make_circle_rule(lp, DEFAULT_ANGULAR).unwrap();
            let rows: Vec<Vec<Complex64>> = rule.nodes().iter().map(|p| phi_all(lp, p, 32)).collect();
            for n in 0..=32 {
                for m in 0..=32 {
                    let g = sum_complex(rows.iter().zip(rule.weights()).map(|(row, w)| row[n] * row[m].conj() * *w));
                    let target = if n == m { 1.0 } else { 0.0 };
                    assert!((g - target).norm() <= 1e-8, "λ={l} n={n} m={m} g={g}");
                }
            }
            for n in 0..=32 {
                for m in 1..=32 {
                    let g = integrate(&rule, |p| {
                        phi_sum(n, lp, p.z()) * harmonic_partner(m, lp, p).unwrap().conj()
                    });
                    assert!(g.norm() <= 1e-8, "mixed λ={l} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn disk_rule_mass_and_moments() {
        for &l in &[0.3, 0.5, 1.0, 2.5] {
            let lp = lam(l);
            for &alpha in &[0.0, 0.5, 1.0, 2.0, -0.5] {
                let rule = make_disk_rule(lp, alpha, DEFAULT_RADIAL, 48).unwrap();
                let mass = weighted_moment(lp, alpha, 0);
                assert!((rule.total_mass() - mass).abs() <= 1e-12 * mass);
                if alpha == 0.0 {
                    assert!((rule.total_mass() - 1.0).abs() <= 1e-12);
                }
                let rows: Vec<Vec<Complex64>> = rule.nodes().iter().map(|p| phi_all(lp, p, 20)).collect();
                for n in 0..=20 {
                    let h = sum_real(rows.iter().zip(rule.weights()).map(|(row, w)| row[n].norm_sqr() * w));
                    let exact = weighted_moment(lp, alpha, n);
                    assert!((h - exact).abs() <= 1e-8 * exact, "λ={l} α={alpha} n={n}");
                    if n > 0 {
                        let off = sum_complex(rows.iter().zip(rule.weights()).map(|(row, w)| row[n] * row[n - 1].conj() * *w));
                        assert!(off.norm() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn radial_second_moment() {
        let lp = lam(0.8);
        let rule = make_disk_rule(lp, 0.0, 16, 16).unwrap();
        let v = integrate_real(&rule, |p| p.r() * p.r());
        assert!((v - 1.8 / 2.8).abs() <= 1e-10);
        let z = integrate(&rule, |p| phi_sum(1, lp, p.z()));
        assert!(z.norm() <= 1e-12);
    }

    #[test]
    fn refinement_is_stable() {
        let lp = lam(0.5);
        let rule = make_disk_rule(lp, 1.0, 32, 32).unwrap();
        let fine = rule.refined().unwrap();
        let g = |p: &DiskPoint| phi_sum(5, lp, p.z()).norm_sqr() * (1.0 + p.r());
        assert!((integrate_real(&rule, g) - integrate_real(&fine, g)).abs() <= 1e-10);
        assert!(rule.require_alpha(1.0).is_ok());
        assert!(matches!(rule.require_alpha(0.0), Err(Error::AlphaMismatch { .. })));
    }

    #[test]
    fn node_errors_carry_index() {
        let rule = make_circle_rule(lam(0.5), 4).unwrap();
        let err = try_integrate(&rule, |p| {
            if p.theta() > 0.0 {
                Err(Error::Unsupported("boom".into()))
            } else {
                Ok(Complex64::new(1.0, 0.0))
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::NodeEvaluation { index: 4, .. }));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let rule = make_circle_rule(lam(0.5), 3).unwrap();
        let mut buf = Vec::new();
        rule.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("r,theta,weight"));
        assert_eq!(text.lines().count(), 7);
    }
}
