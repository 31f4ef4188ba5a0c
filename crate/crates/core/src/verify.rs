//! The verification run: a fixed registry of numerical checks. Each check
//! produces a [`CheckRecord`] holding a digest of its inputs, the computed
//! values, its tolerances and a verdict.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::basis::{harmonic_partner, phi_all, phi_bound, phi_polar, phi_sum, DiskPoint};
use crate::error::{invalid, Error, Result};
use crate::kernels::{
    cauchy_closed, envelope, geometry_factors, kernel_series, p0, poisson_closed, poisson_series, EnvelopeCase,
    KernelWeights, KERNEL_TOL,
};
use crate::norms::{
    ap_norm, bloch_seminorm, f0_for_depth, f0_unboundedness_profile, growth_ratio, weighted_sup, SupGrid,
    DEFAULT_SUBDIVISIONS,
};
use crate::operators::{duality_pair, psi_reconstruct, representation_eval, t_alpha, t_alpha_checked};
use crate::quadrature::{
    make_circle_rule, make_disk_rule, weighted_moment, CircleRule, DiskRule, Rule, DEFAULT_ANGULAR,
    DEFAULT_RADIAL, MAX_NODES,
};
use crate::series::{dz_numeric, dzbar_numeric, f0_series, laplacian_numeric, CoefficientSeries, DEFAULT_STEP};
use crate::specfun::LambdaParam;
use crate::sum::sum_complex;

/// Accuracy demanded of `f_0` truncations on the sup grids.
const F0_TOL: f64 = 1e-9;
/// Relative error allowed for the coefficient-space derivative formulas.
const EXACT_TOL: f64 = 1e-13;
/// Step for the λ-Laplacian stencil; `DEFAULT_STEP` squared would sit at the
/// rounding floor.
const LAPLACIAN_STEP: f64 = 1e-4;
/// Geometry brackets: `d1/comp1 ∈ [1/2, 2]` holds exactly, the lower bound on
/// `(d1+d2)/comp2` is empirical.
const GEOMETRY_D1: (f64, f64) = (0.5, 2.0);
const GEOMETRY_SUM_LOWER: f64 = 0.5;
/// Ceiling for `|⟨f, g⟩| / (‖f‖_{A¹} ‖g‖_B)` over the random pairs.
const DUALITY_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub circle_orthonormality: f64,
    pub measure_mass: f64,
    pub moments: f64,
    pub basis_forms: f64,
    pub derivative: f64,
    pub laplacian: f64,
    pub closed_forms: f64,
    pub p0_forms: f64,
    pub reproducing: f64,
    pub representation: f64,
    pub round_trip: f64,
    /// Allowed relative drift of an empirical constant under grid refinement.
    pub constant_stability: f64,
    pub equivalence_spread: f64,
    pub equivalence_stability: f64,
    pub f0_stability: f64,
    /// Allowed `(max − min)/min` of `M_∞(f_0; r)/ln(1/(1−r))`.
    pub f0_bracket: f64,
    pub duality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            circle_orthonormality: 1e-8,
            measure_mass: 1e-12,
            moments: 1e-8,
            basis_forms: 1e-10,
            derivative: 1e-4,
            laplacian: 1e-3,
            closed_forms: 1e-6,
            p0_forms: 1e-9,
            reproducing: 1e-8,
            representation: 1e-6,
            round_trip: 1e-6,
            constant_stability: 0.10,
            equivalence_spread: 50.0,
            equivalence_stability: 0.05,
            f0_stability: 0.02,
            f0_bracket: 3.0,
            duality: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn entries(&self) -> [(&'static str, f64); 17] {
        [
            ("circle_orthonormality", self.circle_orthonormality),
            ("measure_mass", self.measure_mass),
            ("moments", self.moments),
            ("basis_forms", self.basis_forms),
            ("derivative", self.derivative),
            ("laplacian", self.laplacian),
            ("closed_forms", self.closed_forms),
            ("p0_forms", self.p0_forms),
            ("reproducing", self.reproducing),
            ("representation", self.representation),
            ("round_trip", self.round_trip),
            ("constant_stability", self.constant_stability),
            ("equivalence_spread", self.equivalence_spread),
            ("equivalence_stability", self.equivalence_stability),
            ("f0_stability", self.f0_stability),
            ("f0_bracket", self.f0_bracket),
            ("duality", self.duality),
        ]
    }
}

/// Everything a verification run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lambda: f64,
    /// Weight exponents for the α-dependent checks.
    pub alphas: Vec<f64>,
    /// Size of the circle Gram matrix.
    pub trunc: usize,
    pub quad_radial: usize,
    pub quad_angular: usize,
    pub circle_nodes: usize,
    /// Deepest dyadic level `K` of the sup grids; refinement checks compare
    /// against `K − 2` and `K − 4`.
    pub grid_depth: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            alphas: vec![-0.5, 0.0, 0.5, 1.0, 2.0],
            trunc: 32,
            quad_radial: DEFAULT_RADIAL,
            quad_angular: DEFAULT_ANGULAR,
            circle_nodes: DEFAULT_ANGULAR,
            grid_depth: 12,
            seed: 20_240_601,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        LambdaParam::new(self.lambda)?;
        if self.alphas.is_empty() {
            return Err(invalid("alphas", 0.0, "at least one weight exponent is needed"));
        }
        for &a in &self.alphas {
            if !(a.is_finite() && a > -1.0) {
                return Err(invalid("alpha", a, "weight exponents must exceed -1"));
            }
        }
        if !(1..=256).contains(&self.trunc) {
            return Err(invalid("trunc", self.trunc as f64, "must lie in 1..=256"));
        }
        for (name, v) in [
            ("quad_radial", self.quad_radial),
            ("quad_angular", self.quad_angular),
            ("circle_nodes", self.circle_nodes),
        ] {
            if !(1..=MAX_NODES).contains(&v) {
                return Err(invalid(name, v as f64, "node count out of range"));
            }
        }
        if !(6..=20).contains(&self.grid_depth) {
            return Err(invalid("grid_depth", self.grid_depth as f64, "must lie in 6..=20"));
        }
        for (name, v) in self.tolerances.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, v, "tolerances must be positive and finite"));
            }
        }
        Ok(())
    }

    /// `λ = 0` runs the classical-limit variants.
    pub fn is_classical(&self) -> bool {
        self.lambda == 0.0
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or bound being tested.
    pub anchor: String,
    /// SHA-256 of the canonical JSON of `inputs`.
    pub inputs_digest: String,
    pub inputs: Value,
    pub computed: Value,
    pub tolerance: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub classical: bool,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with a trailing newline; byte-identical across runs with
    /// the same configuration.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }
}

struct Outcome {
    inputs: Value,
    computed: Value,
    tolerance: Value,
    pass: bool,
}

type CheckFn = fn(&Context) -> Result<Outcome>;

/// A registered check.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub anchor: &'static str,
    run: CheckFn,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("name", &self.name).finish()
    }
}

/// All checks in run order.
pub fn registry() -> Vec<Check> {
    vec![
        Check {
            name: "circle_orthonormality",
            anchor: "∫ φ_n conj(φ_m) dm_λ = δ_nm on the circle, and φ_n ⟂ z̄ conj(φ_{m-1})",
            run: check_circle_orthonormality,
        },
        Check {
            name: "measure_normalization",
            anchor: "dσ_λ and dm_λ are probability measures; ∫ (1-|z|²)^α dσ_λ = h_0(α)",
            run: check_measures,
        },
        Check {
            name: "weighted_moments",
            anchor: "∫ φ_n conj(φ_m) (1-|z|²)^α dσ_λ = h_n(α) δ_nm",
            run: check_moments,
        },
        Check {
            name: "basis_dual_forms",
            anchor: "Gegenbauer form of φ_n equals its finite z, z̄ sum; |φ_n(z)| ≤ ε_n^{-1} |z|^n",
            run: check_basis_forms,
        },
        Check {
            name: "operator_identities",
            anchor: "D_z φ_n = √(n(n+2λ)) φ_{n-1}, D_z̄ φ_n = 0, D_z(z̄ conj φ_{n-1}) = -λ φ_{n-1}, Δ_λ kills both",
            run: check_operators,
        },
        Check {
            name: "kernel_closed_forms",
            anchor: "Σ φ_n(z) conj(φ_n(w)) = P_0(z,w)/(1-z w̄); P = C(z,w) + z̄ w C(w,z) reproduces on the circle",
            run: check_closed_forms,
        },
        Check {
            name: "reproducing_formula",
            anchor: "T_{λ,α} f = f for λ-analytic polynomials",
            run: check_reproducing,
        },
        Check {
            name: "representation_formula",
            anchor: "f(z) = ∫ D_w(w f(w)) K̃_{λ,α}(z,w) (1-|w|²)^α dσ_λ(w)",
            run: check_representation,
        },
        Check {
            name: "psi_round_trip",
            anchor: "ψ = (1-|z|²)/(α+1) [D_z(z f) + (α+1) f] satisfies T_{λ,α} ψ = f and sup|ψ| ≤ C ‖f‖_B",
            run: check_psi,
        },
        Check {
            name: "higher_order_equivalence",
            anchor: "sup (1-|z|²)^n |(D_z ∘ z)^n f| is comparable to the first-order Bloch norm",
            run: check_equivalence,
        },
        Check {
            name: "f0_dichotomy",
            anchor: "f_0 = Σ n^{-λ-1} ε_n φ_n is Bloch but M_∞(f_0; r) grows like ln(1/(1-r))",
            run: check_f0,
        },
        Check {
            name: "growth_bound",
            anchor: "|f(z)| ≤ C ‖f‖_B ln(2/(1-|z|))",
            run: check_growth,
        },
        Check {
            name: "envelope_certification",
            anchor: "|h_{λ,β}(z,w)| is bounded by the four-regime envelope in |1-z w̄|, |1-z w|",
            run: check_envelopes,
        },
        Check {
            name: "duality",
            anchor: "∫ f conj(g) dσ_λ = Σ c_n conj(g_n)(λ+1)/(n+λ+1) = ∫ F conj(D_w(w g))(1-|w|²) dσ_λ",
            run: check_duality,
        },
        Check {
            name: "determinism",
            anchor: "seeded checks give byte-identical records on repeat and on one thread",
            run: check_determinism,
        },
    ]
}

pub fn check_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name).collect()
}

/// Runs every check, or only those named in `only`.
pub fn run_verification(config: &RunConfig, only: Option<&[String]>) -> Result<VerificationReport> {
    run_verification_with(config, only, |_| {})
}

/// As [`run_verification`], calling `progress` after each check.
pub fn run_verification_with<P: FnMut(&CheckRecord)>(
    config: &RunConfig,
    only: Option<&[String]>,
    mut progress: P,
) -> Result<VerificationReport> {
    config.validate()?;
    let checks = registry();
    if let Some(names) = only {
        for n in names {
            if !checks.iter().any(|c| c.name == n) {
                return Err(Error::Unsupported(format!("unknown check `{n}`")));
            }
        }
    }
    let ctx = Context::new(config)?;
    let mut records = Vec::new();
    for check in checks.iter().filter(|c| only.is_none_or(|names| names.iter().any(|n| n == c.name))) {
        let record = run_one(&ctx, check);
        progress(&record);
        records.push(record);
    }
    let passed = records.iter().filter(|r| r.pass).count();
    Ok(VerificationReport {
        config: config.clone(),
        classical: config.is_classical(),
        summary: Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
        },
        checks: records,
    })
}

fn run_one(ctx: &Context, check: &Check) -> CheckRecord {
    let outcome = (check.run)(ctx).unwrap_or_else(|e| Outcome {
        inputs: json!({ "lambda": ctx.cfg.lambda }),
        computed: json!({ "error": e.to_string() }),
        tolerance: Value::Null,
        pass: false,
    });
    let canonical = serde_json::to_string(&outcome.inputs).expect("inputs are plain data");
    CheckRecord {
        name: check.name.to_string(),
        anchor: check.anchor.to_string(),
        inputs_digest: hex::encode(Sha256::digest(canonical.as_bytes())),
        inputs: outcome.inputs,
        computed: outcome.computed,
        tolerance: outcome.tolerance,
        pass: outcome.pass,
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    lam: LambdaParam,
    circle: CircleRule,
    disks: Vec<(f64, DiskRule)>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let lam = LambdaParam::new(cfg.lambda)?;
        let mut alphas = cfg.alphas.clone();
        alphas.push(0.0);
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        let disks = alphas
            .into_iter()
            .map(|a| Ok((a, make_disk_rule(lam, a, cfg.quad_radial, cfg.quad_angular)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            cfg,
            lam,
            circle: make_circle_rule(lam, cfg.circle_nodes)?,
            disks,
        })
    }

    fn disk(&self, alpha: f64) -> &DiskRule {
        &self.disks.iter().find(|(a, _)| *a == alpha).expect("rules built for every alpha").1
    }

    fn classical(&self) -> bool {
        self.lam.is_classical()
    }

    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    /// Independent stream per check.
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn grid(&self, depth: usize) -> Result<SupGrid> {
        SupGrid::new(depth, DEFAULT_SUBDIVISIONS)
    }

    /// λ values for the structural checks.
    fn lambda_set(&self) -> Vec<f64> {
        if self.classical() {
            return vec![0.0];
        }
        let mut v = vec![0.3, 0.5, 1.0, 2.5, self.cfg.lambda];
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_poly(rng: &mut ChaCha8Rng, lam: LambdaParam, degree: usize) -> CoefficientSeries {
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CoefficientSeries::polynomial(lam, coeffs)
}

fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> DiskPoint {
    DiskPoint::polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)).expect("sampled inside the disk")
}

fn off_axis(rng: &mut ChaCha8Rng, rmax: f64, min_im: f64) -> Complex64 {
    loop {
        let p = random_point(rng, rmax);
        if p.z().im.abs() >= min_im {
            return p.z();
        }
    }
}

/// `z̄ conj(φ_{n-1}(z))` from the power-sum form; valid for every λ.
fn partner_sum(n: usize, lam: LambdaParam, z: Complex64) -> Complex64 {
    z.conj() * phi_sum(n - 1, lam, z).conj()
}

fn rel_drift(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn check_circle_orthonormality(ctx: &Context) -> Result<Outcome> {
    let n_max = ctx.cfg.trunc;
    let tol = ctx.tol().circle_orthonormality;
    let mut per_lambda = Vec::new();
    let mut worst: f64 = 0.0;
    for l in ctx.lambda_set() {
        let lam = LambdaParam::new(l)?;
        let rule = make_circle_rule(lam, ctx.cfg.circle_nodes)?;
        let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = rule
            .nodes()
            .par_iter()
            .map(|p| {
                let phi = phi_all(lam, p, n_max);
                let partners = (1..=n_max)
                    .map(|m| {
                        if lam.is_classical() {
                            Ok(partner_sum(m, lam, p.z()))
                        } else {
                            harmonic_partner(m, lam, p)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((phi, partners))
            })
            .collect::<Result<_>>()?;
        let w = rule.weights();
        let mut gram_err: f64 = 0.0;
        let mut mixed_err: f64 = 0.0;
        for n in 0..=n_max {
            for m in 0..=n_max {
                let g = sum_complex(rows.iter().zip(w).map(|((phi, _), w)| phi[n] * phi[m].conj() * *w));
                let target = if n == m { 1.0 } else { 0.0 };
                gram_err = gram_err.max((g - target).norm());
            }
            for m in 1..=n_max {
                let g = sum_complex(rows.iter().zip(w).map(|((phi, pt), w)| phi[n] * pt[m - 1].conj() * *w));
                mixed_err = mixed_err.max(g.norm());
            }
        }
        worst = worst.max(gram_err).max(mixed_err);
        per_lambda.push(json!({ "lambda": l, "gram_error": gram_err, "mixed_error": mixed_err }));
    }
    Ok(Outcome {
        inputs: json!({ "lambdas": ctx.lambda_set(), "n_max": n_max, "circle_nodes": ctx.cfg.circle_nodes }),
        computed: json!({ "per_lambda": per_lambda, "max_error": worst }),
        tolerance: json!({ "abs": tol }),
        pass: worst <= tol,
    })
}

fn check_measures(ctx: &Context) -> Result<Outcome> {
    let tol = ctx.tol().measure_mass;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for l in ctx.lambda_set() {
        let lam = LambdaParam::new(l)?;
        let disk = make_disk_rule(lam, 0.0, ctx.cfg.quad_radial, ctx.cfg.quad_angular)?.total_mass();
        let circle = make_circle_rule(lam, ctx.cfg.circle_nodes)?.total_mass();
        worst = worst.max((disk - 1.0).abs()).max((circle - 1.0).abs());
        rows.push(json!({ "lambda": l, "disk_mass": disk, "circle_mass": circle }));
    }
    let mut weighted = Vec::new();
    for &(alpha, ref rule) in &ctx.disks {
        let target = weighted_moment(ctx.lam, alpha, 0);
        let err = (rule.total_mass() - target).abs() / target;
        worst = worst.max(err);
        weighted.push(json!({ "alpha": alpha, "mass": rule.total_mass(), "h0": target }));
    }
    Ok(Outcome {
        inputs: json!({
            "lambdas": ctx.lambda_set(),
            "lambda": ctx.cfg.lambda,
            "alphas": ctx.disks.iter().map(|d| d.0).collect::<Vec<_>>(),
            "radial": ctx.cfg.quad_radial,
            "angular": ctx.cfg.quad_angular,
            "circle_nodes": ctx.cfg.circle_nodes,
        }),
        computed: json!({ "unweighted": rows, "weighted": weighted, "max_error": worst }),
        tolerance: json!({ "abs": tol }),
        pass: worst <= tol,
    })
}

fn check_moments(ctx: &Context) -> Result<Outcome> {
    const N: usize = 20;
    let tol = ctx.tol().moments;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &alpha in &ctx.cfg.alphas {
        let rule = ctx.disk(alpha);
        let values: Vec<Vec<Complex64>> = rule.nodes().par_iter().map(|p| phi_all(ctx.lam, p, N)).collect();
        let mut diag: f64 = 0.0;
        let mut off: f64 = 0.0;
        for n in 0..=N {
            let h = weighted_moment(ctx.lam, alpha, n);
            for m in 0..=N {
                let g = sum_complex(values.iter().zip(rule.weights()).map(|(v, w)| v[n] * v[m].conj() * *w));
                if n == m {
                    diag = diag.max((g - h).norm() / h);
                } else {
                    off = off.max(g.norm() / h);
                }
            }
        }
        worst = worst.max(diag).max(off);
        rows.push(json!({ "alpha": alpha, "diagonal_rel_error": diag, "offdiagonal_rel": off }));
    }
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "alphas": ctx.cfg.alphas,
            "n_max": N,
            "radial": ctx.cfg.quad_radial,
            "angular": ctx.cfg.quad_angular,
        }),
        computed: json!({ "per_alpha": rows, "max_error": worst }),
        tolerance: json!({ "rel": tol }),
        pass: worst <= tol,
    })
}

fn check_basis_forms(ctx: &Context) -> Result<Outcome> {
    const SAMPLES: usize = 10_000;
    const N_MAX: usize = 64;
    let tol = ctx.tol().basis_forms;
    let mut rng = ctx.rng(4);
    let samples: Vec<(usize, DiskPoint)> = (0..SAMPLES)
        .map(|_| (rng.gen_range(0..=N_MAX), random_point(&mut rng, 1.0)))
        .collect();
    let lam = ctx.lam;
    let errs: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|(n, p)| {
            let scale = phi_bound(lam, *n, p.r());
            let sum = phi_sum(*n, lam, p.z());
            let other = if lam.is_classical() {
                p.z().powu(*n as u32)
            } else {
                phi_polar(*n, lam, p)?
            };
            let form = if scale > 0.0 { (sum - other).norm() / scale } else { (sum - other).norm() };
            let excess = if scale > 0.0 { sum.norm() / scale - 1.0 } else { sum.norm() };
            Ok((form, excess))
        })
        .collect::<Result<_>>()?;
    let form_err = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let bound_excess = errs.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let mut computed = json!({ "max_form_error": form_err, "max_bound_ratio_minus_one": bound_excess });
    if lam.is_classical() {
        computed["skipped"] = json!("Gegenbauer form is undefined at λ = 0; the sum form is compared with z^n");
    }
    Ok(Outcome {
        inputs: json!({ "lambda": ctx.cfg.lambda, "samples": SAMPLES, "n_max": N_MAX, "seed": ctx.cfg.seed }),
        computed,
        tolerance: json!({ "rel_to_bound": tol, "bound_slack": 1e-12 }),
        pass: form_err <= tol && bound_excess <= 1e-12,
    })
}

fn check_operators(ctx: &Context) -> Result<Outcome> {
    const N_MAX: usize = 32;
    const POINTS: usize = 1000;
    const LAPLACIAN_POINTS: usize = 400;
    let lam = ctx.lam;
    let l = lam.value();
    let tol = ctx.tol();

    // Coefficient-space formulas against their closed forms.
    let mut exact: f64 = 0.0;
    for n in 0..=N_MAX {
        let e = CoefficientSeries::unit(lam, n);
        let d = e.dz();
        if n > 0 {
            let want = ((n * n) as f64 + 2.0 * l * n as f64).sqrt();
            exact = exact.max((d.coeff(n - 1) - want).norm() / want);
        }
        for k in 1..=3u32 {
            let want = (n as f64 + l + 1.0).powi(k as i32);
            exact = exact.max((e.dz_circ_z_pow(k).coeff(n) - want).norm() / want);
        }
    }

    let mut rng = ctx.rng(5);
    let cases: Vec<(usize, Complex64)> = (0..POINTS).map(|_| (rng.gen_range(1..=16), off_axis(&mut rng, 0.95, 1e-3))).collect();
    let derivs: Vec<f64> = cases
        .par_iter()
        .map(|&(n, z)| {
            let prev = phi_sum(n - 1, lam, z);
            let a = dz_numeric(lam, |u| phi_sum(n, lam, u), z, DEFAULT_STEP)?;
            let e1 = (a - prev * ((n * n) as f64 + 2.0 * l * n as f64).sqrt()).norm();
            let b = dzbar_numeric(lam, |u| phi_sum(n, lam, u), z, DEFAULT_STEP)?;
            let p = dz_numeric(lam, |u| partner_sum(n, lam, u), z, DEFAULT_STEP)?;
            let e3 = (p + prev * l).norm();
            Ok(e1.max(b.norm()).max(e3))
        })
        .collect::<Result<_>>()?;
    let deriv_err = derivs.iter().copied().fold(0.0, f64::max);

    let lap_cases: Vec<(usize, Complex64)> = (0..LAPLACIAN_POINTS)
        .map(|_| (rng.gen_range(1..=16), off_axis(&mut rng, 0.9, 0.05)))
        .collect();
    let laps: Vec<f64> = lap_cases
        .par_iter()
        .map(|&(n, z)| {
            let a = laplacian_numeric(lam, |u| phi_sum(n, lam, u), z, LAPLACIAN_STEP)?;
            let b = laplacian_numeric(lam, |u| partner_sum(n, lam, u), z, LAPLACIAN_STEP)?;
            Ok(a.norm().max(b.norm()))
        })
        .collect::<Result<_>>()?;
    let lap_err = laps.iter().copied().fold(0.0, f64::max);

    // (D_z ∘ z)² through nested stencils on a random polynomial.
    let f = random_poly(&mut rng, lam, 24);
    let g2 = f.dz_circ_z_pow(2);
    let eval = |s: &CoefficientSeries, u: Complex64| DiskPoint::from_complex(u).map(|p| s.value_at(&p));
    let nested_h = 1e-3;
    let mut nested: f64 = 0.0;
    for _ in 0..8 {
        let z = off_axis(&mut rng, 0.6, 0.05);
        let g1 = |u: Complex64| dz_numeric(lam, |v| v * eval(&f, v).unwrap_or(c(f64::NAN)), u, nested_h);
        let two = dz_numeric(lam, |v| v * g1(v).unwrap_or(c(f64::NAN)), z, nested_h)?;
        nested = nested.max((two - eval(&g2, z)?).norm() / (1.0 + eval(&g2, z)?.norm()));
    }

    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "seed": ctx.cfg.seed,
            "points": POINTS,
            "laplacian_points": LAPLACIAN_POINTS,
            "step": DEFAULT_STEP,
            "laplacian_step": LAPLACIAN_STEP,
            "nested_step": nested_h,
        }),
        computed: json!({
            "coefficient_rel_error": exact,
            "derivative_error": deriv_err,
            "laplacian_residual": lap_err,
            "nested_rel_error": nested,
        }),
        tolerance: json!({
            "coefficient_rel": EXACT_TOL,
            "derivative": tol.derivative,
            "laplacian": tol.laplacian,
            "nested_rel": tol.laplacian,
        }),
        pass: exact <= EXACT_TOL && deriv_err <= tol.derivative && lap_err <= tol.laplacian && nested <= tol.laplacian,
    })
}

fn closed_form_grid() -> Vec<DiskPoint> {
    let mut pts = vec![DiskPoint::origin()];
    for &r in &[0.2, 0.4, 0.6, 0.8] {
        for j in 0..12 {
            pts.push(DiskPoint::polar(r, -PI + 2.0 * PI * j as f64 / 12.0).expect("grid point"));
        }
    }
    pts
}

fn check_closed_forms(ctx: &Context) -> Result<Outcome> {
    let lam = ctx.lam;
    let tol = ctx.tol();
    let grid = closed_form_grid();
    let pairs: Vec<(DiskPoint, DiskPoint)> =
        grid.iter().flat_map(|z| grid.iter().map(move |w| (*z, *w))).collect();
    let cauchy = KernelWeights::cauchy(lam);
    let errs: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|(z, w)| {
            let series = kernel_series(&cauchy, z, w, KERNEL_TOL)?.value;
            let closed = if lam.is_classical() {
                c(1.0) / (c(1.0) - z.z() * w.z().conj())
            } else {
                cauchy_closed(lam, z.z(), w.z())?
            };
            let pc = poisson_closed(lam, z.z(), w.z())?;
            let ps = poisson_series(lam, z, w, KERNEL_TOL)?;
            Ok((
                (series - closed).norm() / closed.norm(),
                (ps - pc).norm() / pc.abs(),
                p0(lam, z.z(), w.z())?.discrepancy,
            ))
        })
        .collect::<Result<_>>()?;
    let cauchy_err = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let poisson_err = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let p0_err = errs.iter().map(|e| e.2).fold(0.0, f64::max);

    // Poisson integrals of boundary values reproduce φ_n and the partners.
    let targets = [(0.0, 0.0), (0.3, 1.1), (0.5, -2.4), (0.6, 0.7)];
    let mut reproduce: f64 = 0.0;
    for &(r, t) in &targets {
        let z = DiskPoint::polar(r, t)?;
        let kernel: Vec<f64> = ctx
            .circle
            .nodes()
            .iter()
            .map(|xi| poisson_closed(lam, z.z(), xi.z()))
            .collect::<Result<_>>()?;
        for n in 0..=8 {
            let a = sum_complex(
                ctx.circle.nodes().iter().zip(&kernel).zip(ctx.circle.weights()).map(|((xi, k), w)| phi_sum(n, lam, xi.z()) * *k * *w),
            );
            let want = phi_sum(n, lam, z.z());
            reproduce = reproduce.max((a - want).norm() / (1.0 + want.norm()));
            if n > 0 {
                let b = sum_complex(
                    ctx.circle.nodes().iter().zip(&kernel).zip(ctx.circle.weights()).map(|((xi, k), w)| partner_sum(n, lam, xi.z()) * *k * *w),
                );
                let want = partner_sum(n, lam, z.z());
                reproduce = reproduce.max((b - want).norm() / (1.0 + want.norm()));
            }
        }
    }
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "grid_points": grid.len(),
            "max_radius": 0.8,
            "series_tol": KERNEL_TOL,
            "circle_nodes": ctx.cfg.circle_nodes,
        }),
        computed: json!({
            "cauchy_rel_error": cauchy_err,
            "poisson_rel_error": poisson_err,
            "p0_form_discrepancy": p0_err,
            "poisson_reproduction_error": reproduce,
        }),
        tolerance: json!({ "closed_forms": tol.closed_forms, "p0_forms": tol.p0_forms }),
        pass: cauchy_err <= tol.closed_forms
            && poisson_err <= tol.closed_forms
            && reproduce <= tol.closed_forms
            && p0_err <= tol.p0_forms,
    })
}

fn coeff_error(a: &CoefficientSeries, b: &CoefficientSeries) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
}

fn check_reproducing(ctx: &Context) -> Result<Outcome> {
    const DEGREE: usize = 20;
    const PROBE: usize = 24;
    let lam = ctx.lam;
    let tol = ctx.tol().reproducing;
    let rule = ctx.disk(0.0);
    let mut rng = ctx.rng(7);
    let mut family: Vec<CoefficientSeries> = (0..=DEGREE).map(|k| CoefficientSeries::unit(lam, k)).collect();
    family.extend((0..5).map(|_| random_poly(&mut rng, lam, DEGREE)));
    let mut coeff_err: f64 = 0.0;
    for f in &family {
        let t = t_alpha(|p| f.value_at(p), 0.0, PROBE, rule)?;
        coeff_err = coeff_err.max(coeff_error(&t, f));
    }
    let mut per_alpha = Vec::new();
    for &alpha in &ctx.cfg.alphas {
        let f = random_poly(&mut rng, lam, DEGREE);
        let t = t_alpha(|p| f.value_at(p), alpha, PROBE, ctx.disk(alpha))?;
        let e = coeff_error(&t, &f);
        coeff_err = coeff_err.max(e);
        per_alpha.push(json!({ "alpha": alpha, "coefficient_error": e }));
    }
    let probe = random_poly(&mut rng, lam, DEGREE);
    let checked = t_alpha_checked(|p| probe.value_at(p), 0.0, PROBE, rule)?;
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "degree": DEGREE,
            "probe_order": PROBE,
            "random_polynomials": 5,
            "alphas": ctx.cfg.alphas,
            "seed": ctx.cfg.seed,
            "radial": ctx.cfg.quad_radial,
            "angular": ctx.cfg.quad_angular,
        }),
        computed: json!({
            "max_coefficient_error": coeff_err,
            "per_alpha": per_alpha,
            "pointwise_residual": checked.residual,
        }),
        tolerance: json!({ "abs": tol }),
        pass: coeff_err <= tol && checked.residual <= tol,
    })
}

fn check_representation(ctx: &Context) -> Result<Outcome> {
    const DEGREE: usize = 10;
    let lam = ctx.lam;
    let tol = ctx.tol().representation;
    let points: Vec<DiskPoint> = [(0.0, 0.0), (0.3, 0.5), (0.5, 2.0), (0.7, -1.0), (0.7, 2.8), (0.45, -2.5)]
        .iter()
        .map(|&(r, t)| DiskPoint::polar(r, t))
        .collect::<Result<_>>()?;
    let mut rng = ctx.rng(8);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &alpha in &ctx.cfg.alphas {
        let mut err: f64 = 0.0;
        for _ in 0..2 {
            let f = random_poly(&mut rng, lam, DEGREE);
            for z in &points {
                let v = representation_eval(&f, alpha, z, ctx.disk(alpha))?;
                let want = f.value_at(z);
                err = err.max((v - want).norm() / (1.0 + want.norm()));
            }
        }
        worst = worst.max(err);
        rows.push(json!({ "alpha": alpha, "rel_error": err }));
    }
    // At α = 1 the representing kernel is K̃_λ.
    let k1 = KernelWeights::k_tilde_alpha(lam, 1.0)?;
    let kt = KernelWeights::k_tilde(lam);
    let weight_err = (0..200).map(|n| (k1.a(n) - kt.a(n)).abs() / kt.a(n)).fold(0.0, f64::max);
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "alphas": ctx.cfg.alphas,
            "degree": DEGREE,
            "polynomials_per_alpha": 2,
            "points": points.iter().map(|p| [p.r(), p.theta()]).collect::<Vec<_>>(),
            "seed": ctx.cfg.seed,
            "radial": ctx.cfg.quad_radial,
            "angular": ctx.cfg.quad_angular,
        }),
        computed: json!({ "per_alpha": rows, "max_rel_error": worst, "alpha_one_weight_error": weight_err }),
        tolerance: json!({ "rel": tol, "alpha_one_weights": EXACT_TOL }),
        pass: worst <= tol && weight_err <= EXACT_TOL,
    })
}

/// `sup|ψ| / ‖f‖_B` on one grid.
fn psi_constant(f: &CoefficientSeries, alpha: f64, grid: &SupGrid) -> Result<(f64, f64)> {
    let psi = psi_reconstruct(f, alpha)?;
    let sup = weighted_sup(psi.inner(), 1, grid)?;
    let bloch = bloch_seminorm(f, 1, grid)?;
    Ok((sup.value / bloch.value, sup.slack.max(bloch.slack)))
}

fn check_psi(ctx: &Context) -> Result<Outcome> {
    let lam = ctx.lam;
    let tol = ctx.tol();
    let mut rng = ctx.rng(9);
    let mut polys: Vec<(String, CoefficientSeries)> =
        [0, 1, 5, 15].iter().map(|&k| (format!("e_{k}"), CoefficientSeries::unit(lam, k))).collect();
    for i in 0..3 {
        polys.push((format!("random_{i}"), random_poly(&mut rng, lam, 15)));
    }
    let f0_trunc = f0_series(lam, 48)?;
    polys.push(("f0_degree_48".into(), CoefficientSeries::polynomial(lam, f0_trunc.coeffs().to_vec())));

    let k = ctx.cfg.grid_depth;
    let (fine, coarse) = (ctx.grid(k)?, ctx.grid(k - 4)?);
    let f0 = f0_for_depth(lam, k, 1, F0_TOL)?;

    let mut round_trip: f64 = 0.0;
    let mut direct: f64 = 0.0;
    let mut rows = Vec::new();
    let mut worst_drift: f64 = 0.0;
    for &alpha in &ctx.cfg.alphas {
        let rule = ctx.disk(alpha);
        let mut err: f64 = 0.0;
        for (_, f) in &polys {
            let psi = psi_reconstruct(f, alpha)?;
            let degree = f.degree().unwrap_or(0);
            let back = t_alpha(|p| psi.value_at(p), alpha, degree + 2, rule)?;
            err = err.max(coeff_error(&back, f) / (1.0 + f.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max)));
            for p in crate::operators::spot_points() {
                direct = direct.max((psi.value_at(&p) - psi.value_direct(&p)).norm());
            }
        }
        round_trip = round_trip.max(err);

        let mut c_fine: f64 = 0.0;
        let mut c_coarse: f64 = 0.0;
        let mut slack: f64 = 0.0;
        for f in polys.iter().map(|p| &p.1).chain(std::iter::once(&f0)) {
            let (a, s) = psi_constant(f, alpha, &fine)?;
            let (b, _) = psi_constant(f, alpha, &coarse)?;
            c_fine = c_fine.max(a);
            c_coarse = c_coarse.max(b);
            slack = slack.max(s);
        }
        let drift = rel_drift(c_fine, c_coarse);
        worst_drift = worst_drift.max(drift);
        rows.push(json!({
            "alpha": alpha,
            "round_trip_error": err,
            "c_emp": c_fine,
            "c_emp_coarse": c_coarse,
            "drift": drift,
            "tail_slack": slack,
        }));
    }
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "alphas": ctx.cfg.alphas,
            "family": polys.iter().map(|p| p.0.clone()).chain(std::iter::once("f0".to_string())).collect::<Vec<_>>(),
            "grid_depths": [k - 4, k],
            "f0_order": f0.coeffs().len() - 1,
            "seed": ctx.cfg.seed,
        }),
        computed: json!({ "per_alpha": rows, "max_round_trip_error": round_trip, "merged_vs_direct": direct }),
        tolerance: json!({ "round_trip": tol.round_trip, "constant_stability": tol.constant_stability }),
        pass: round_trip <= tol.round_trip && direct <= tol.round_trip && worst_drift <= tol.constant_stability,
    })
}

/// `e_k` for `k ≤ 16`, five random degree-20 polynomials and a truncation of
/// `f_0` good to order `max_order` on a depth-`depth` grid.
fn bloch_family(ctx: &Context, salt: u64, depth: usize, max_order: u32) -> Result<Vec<(String, CoefficientSeries)>> {
    let lam = ctx.lam;
    let mut rng = ctx.rng(salt);
    let mut family: Vec<(String, CoefficientSeries)> =
        (0..=16).map(|k| (format!("e_{k}"), CoefficientSeries::unit(lam, k))).collect();
    for i in 0..5 {
        family.push((format!("random_{i}"), random_poly(&mut rng, lam, 20)));
    }
    family.push(("f0".into(), f0_for_depth(lam, depth, max_order, F0_TOL)?));
    Ok(family)
}

fn check_equivalence(ctx: &Context) -> Result<Outcome> {
    let tol = ctx.tol();
    let k = ctx.cfg.grid_depth;
    let family = bloch_family(ctx, 10, k, 3)?;
    let (fine, coarse) = (ctx.grid(k)?, ctx.grid(k - 4)?);
    let mut orders = Vec::new();
    let mut pass = true;
    for n in [2u32, 3] {
        let mut ratios = Vec::new();
        let mut drift: f64 = 0.0;
        let mut worst_name = String::new();
        for (name, f) in &family {
            let rf = bloch_seminorm(f, n, &fine)?.value / bloch_seminorm(f, 1, &fine)?.value;
            let rc = bloch_seminorm(f, n, &coarse)?.value / bloch_seminorm(f, 1, &coarse)?.value;
            let d = rel_drift(rf, rc);
            if d > drift {
                drift = d;
                worst_name = name.clone();
            }
            ratios.push(rf);
        }
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = max / min;
        pass &= spread <= tol.equivalence_spread && drift <= tol.equivalence_stability;
        orders.push(json!({
            "order": n,
            "ratio_min": min,
            "ratio_max": max,
            "spread": spread,
            "max_drift": drift,
            "max_drift_member": worst_name,
            "f0_ratio": ratios.last(),
        }));
    }
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "family": family.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
            "orders": [2, 3],
            "grid_depths": [k - 4, k],
            "seed": ctx.cfg.seed,
        }),
        computed: json!({ "per_order": orders }),
        tolerance: json!({ "spread": tol.equivalence_spread, "stability": tol.equivalence_stability }),
        pass,
    })
}

fn check_f0(ctx: &Context) -> Result<Outcome> {
    let tol = ctx.tol();
    let lam = ctx.lam;
    let k = ctx.cfg.grid_depth;
    let f0 = f0_for_depth(lam, k, 1, F0_TOL)?;
    let b_fine = bloch_seminorm(&f0, 1, &ctx.grid(k)?)?;
    let b_mid = bloch_seminorm(&f0, 1, &ctx.grid(k - 2)?)?;
    let drift = rel_drift(b_fine.value, b_mid.value);

    let depths: Vec<usize> = (4..=k).collect();
    let profile = f0_unboundedness_profile(lam, &depths, F0_TOL)?;
    let increasing = profile.windows(2).all(|w| w[1].m_inf > w[0].m_inf);
    let lo = profile.iter().map(|r| r.ln_ratio).fold(f64::INFINITY, f64::min);
    let hi = profile.iter().map(|r| r.ln_ratio).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / lo;
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "grid_depths": [k - 2, k],
            "profile_depths": depths,
            "f0_tol": F0_TOL,
        }),
        computed: json!({
            "bloch": b_fine.value,
            "bloch_coarse": b_mid.value,
            "bloch_drift": drift,
            "bloch_tail_slack": b_fine.slack,
            "m_inf_increasing": increasing,
            "ln_ratio_bracket": [lo, hi],
            "bracket_width": width,
            "profile": profile,
        }),
        tolerance: json!({ "bloch_stability": tol.f0_stability, "bracket_width": tol.f0_bracket }),
        pass: drift <= tol.f0_stability && increasing && lo > 0.0 && width <= tol.f0_bracket,
    })
}

fn check_growth(ctx: &Context) -> Result<Outcome> {
    let tol = ctx.tol();
    let k = ctx.cfg.grid_depth;
    let family = bloch_family(ctx, 12, k, 1)?;
    let (fine, coarse) = (ctx.grid(k)?, ctx.grid(k - 4)?);
    let mut c_fine: f64 = 0.0;
    let mut c_coarse: f64 = 0.0;
    let mut arg = String::new();
    for (name, f) in &family {
        let a = growth_ratio(f, &fine)?.ratio;
        if a > c_fine {
            c_fine = a;
            arg = name.clone();
        }
        c_coarse = c_coarse.max(growth_ratio(f, &coarse)?.ratio);
    }
    let f0_ratio = growth_ratio(&family.last().expect("family is nonempty").1, &fine)?;
    let drift = rel_drift(c_fine, c_coarse);
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "family": family.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
            "grid_depths": [k - 4, k],
            "seed": ctx.cfg.seed,
        }),
        computed: json!({
            "c_emp": c_fine,
            "c_emp_coarse": c_coarse,
            "attained_by": arg,
            "drift": drift,
            "f0": f0_ratio,
        }),
        tolerance: json!({ "constant_stability": tol.constant_stability }),
        pass: c_fine.is_finite() && drift <= tol.constant_stability,
    })
}

fn envelope_points(levels: usize, per_level: usize, angles: usize) -> Vec<DiskPoint> {
    let mut pts = vec![DiskPoint::origin()];
    for j in 1..=levels * per_level {
        let r = 1.0 - (-(j as f64) / per_level as f64).exp2();
        for i in 0..angles {
            pts.push(DiskPoint::polar(r, -PI + 2.0 * PI * i as f64 / angles as f64).expect("grid point"));
        }
    }
    pts
}

fn w_points(rings: usize, angles: usize) -> Vec<DiskPoint> {
    let mut pts = vec![DiskPoint::origin()];
    for j in 1..=rings {
        let r = 0.9 * j as f64 / rings as f64;
        for i in 0..angles {
            pts.push(DiskPoint::polar(r, -PI + 2.0 * PI * i as f64 / angles as f64).expect("grid point"));
        }
    }
    pts
}

fn envelope_constant(lam: LambdaParam, beta: f64, zs: &[DiskPoint], ws: &[DiskPoint]) -> Result<f64> {
    let kernel = KernelWeights::pure_power(lam, beta);
    let case = EnvelopeCase::for_beta(lam, beta)?;
    let ratios: Vec<f64> = zs
        .par_iter()
        .map(|z| {
            let mut best: f64 = 0.0;
            for w in ws {
                let h = kernel_series(&kernel, z, w, KERNEL_TOL)?.value.norm();
                best = best.max(h / envelope(lam, case, z.z(), w.z())?);
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

fn check_envelopes(ctx: &Context) -> Result<Outcome> {
    const LEVELS: usize = 8;
    const PAIRS: usize = 100_000;
    let lam = ctx.lam;
    let tol = ctx.tol();
    let mut betas = vec![2.0, 1.0, -0.5, -1.0];
    let large = -(2.0 * lam.value() + 0.5);
    if large < -1.0 {
        betas.push(large);
    }
    let coarse = (envelope_points(LEVELS, 1, 16), w_points(3, 16));
    let fine = (envelope_points(LEVELS, 2, 32), w_points(6, 32));
    let mut rows = Vec::new();
    let mut pass = true;
    for &beta in &betas {
        let c_coarse = envelope_constant(lam, beta, &coarse.0, &coarse.1)?;
        let c_fine = envelope_constant(lam, beta, &fine.0, &fine.1)?;
        let drift = rel_drift(c_fine, c_coarse);
        pass &= c_fine.is_finite() && drift <= tol.constant_stability;
        rows.push(json!({ "beta": beta, "c_emp": c_fine, "c_emp_coarse": c_coarse, "drift": drift }));
    }

    let mut rng = ctx.rng(13);
    let pairs: Vec<(DiskPoint, DiskPoint)> = (0..PAIRS).map(|_| (random_point(&mut rng, 1.0), random_point(&mut rng, 1.0))).collect();
    let bracket = |slice: &[(DiskPoint, DiskPoint)]| {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for (z, w) in slice {
            let g = geometry_factors(z, w);
            let q1 = g.d1 / g.comp1;
            let q2 = (g.d1 + g.d2) / g.comp2;
            b = [b[0].min(q1), b[1].max(q1), b[2].min(q2), b[3].max(q2)];
        }
        b
    };
    let all = bracket(&pairs);
    let head = bracket(&pairs[..PAIRS / 10]);
    let geometry_ok = all[0] >= GEOMETRY_D1.0 && all[1] <= GEOMETRY_D1.1 && all[2] >= GEOMETRY_SUM_LOWER;
    // The upper end of `(d1+d2)/comp2` is unbounded near the circle; only the
    // lower end is a constant.
    let bracket_drift = rel_drift(all[2], head[2]);
    pass &= geometry_ok && bracket_drift <= tol.constant_stability;
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "betas": betas,
            "z_max_radius": 1.0 - (-(LEVELS as f64)).exp2(),
            "w_max_radius": 0.9,
            "coarse_sizes": [coarse.0.len(), coarse.1.len()],
            "fine_sizes": [fine.0.len(), fine.1.len()],
            "geometry_pairs": PAIRS,
            "seed": ctx.cfg.seed,
        }),
        computed: json!({
            "per_beta": rows,
            "d1_over_comp1": [all[0], all[1]],
            "sum_over_comp2": [all[2], all[3]],
            "sum_over_comp2_first_tenth": [head[2], head[3]],
            "bracket_drift": bracket_drift,
        }),
        tolerance: json!({
            "constant_stability": tol.constant_stability,
            "d1_bracket": [GEOMETRY_D1.0, GEOMETRY_D1.1],
            "sum_lower": GEOMETRY_SUM_LOWER,
        }),
        pass,
    })
}

fn check_duality(ctx: &Context) -> Result<Outcome> {
    const PAIRS: usize = 100;
    let lam = ctx.lam;
    let tol = ctx.tol().duality;
    let rule = ctx.disk(0.0);
    let grid = ctx.grid(ctx.cfg.grid_depth)?;
    let mut rng = ctx.rng(14);
    let mut spread: f64 = 0.0;
    let mut constant: f64 = 0.0;
    for _ in 0..PAIRS {
        let df = rng.gen_range(0..=12);
        let dg = rng.gen_range(0..=12);
        let f = random_poly(&mut rng, lam, df);
        let g = random_poly(&mut rng, lam, dg);
        let pair = duality_pair(&f, &g, rule)?;
        spread = spread.max(pair.spread() / (1.0 + pair.coefficient.norm()));
        let a1 = ap_norm(|p| f.value_at(p), 1.0, rule)?.value;
        let b = bloch_seminorm(&g, 1, &grid)?.value;
        constant = constant.max(pair.coefficient.norm() / (a1 * b));
    }
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "pairs": PAIRS,
            "max_degree": 12,
            "seed": ctx.cfg.seed,
            "radial": ctx.cfg.quad_radial,
            "angular": ctx.cfg.quad_angular,
            "grid_depth": ctx.cfg.grid_depth,
        }),
        computed: json!({ "max_rel_spread": spread, "c_emp": constant }),
        tolerance: json!({ "rel": tol, "constant_ceiling": DUALITY_CONSTANT }),
        pass: spread <= tol && constant <= DUALITY_CONSTANT,
    })
}

fn check_determinism(ctx: &Context) -> Result<Outcome> {
    let seeded: Vec<Check> = registry()
        .into_iter()
        .filter(|c| matches!(c.name, "basis_dual_forms" | "operator_identities" | "duality"))
        .collect();
    let render = |ctx: &Context| -> Vec<String> {
        seeded
            .iter()
            .map(|c| serde_json::to_string(&run_one(ctx, c)).expect("records are plain data"))
            .collect()
    };
    let first = render(ctx);
    let second = render(ctx);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let single = pool.install(|| render(ctx));
    let digest = |v: &[String]| hex::encode(Sha256::digest(v.concat().as_bytes()));
    let repeat_ok = first == second;
    let thread_ok = first == single;
    Ok(Outcome {
        inputs: json!({
            "lambda": ctx.cfg.lambda,
            "seed": ctx.cfg.seed,
            "checks": seeded.iter().map(|c| c.name).collect::<Vec<_>>(),
        }),
        computed: json!({
            "first_digest": digest(&first),
            "repeat_identical": repeat_ok,
            "single_thread_identical": thread_ok,
        }),
        tolerance: json!("byte-identical"),
        pass: repeat_ok && thread_ok,
    })
}
