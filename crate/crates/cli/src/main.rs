use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dunkl_bloch::kernels::{envelope, kernel_series, EnvelopeCase, KERNEL_TOL};
use dunkl_bloch::norms::{bloch_seminorm, f0_for_depth, f0_unboundedness_profile, growth_ratio, SupGrid};
use dunkl_bloch::quadrature::{make_circle_rule, make_disk_rule};
use dunkl_bloch::verify::{check_names, run_verification_with};
use dunkl_bloch::{CoefficientSeries, Complex64, DiskPoint, KernelWeights, LambdaParam, Rule, RunConfig};

#[derive(Parser)]
#[command(name = "dunkl-bloch", version, about = "Numerical verification for λ-analytic Bloch and Bergman theory on the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the verification checks and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate a kernel on a grid of (z, w) pairs as CSV.
    KernelDump(KernelDumpArgs),
    /// Growth profile of the unbounded Bloch function f_0.
    F0Study(F0Args),
    /// Higher-order Bloch seminorm ratios and growth ratios over a test family.
    Equivalence(EquivalenceArgs),
    /// Export quadrature nodes and weights as CSV.
    RuleDump(RuleDumpArgs),
    /// List the names of the verification checks.
    Checks,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Weight exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Size of the circle Gram matrix.
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    grid_depth: Option<usize>,
    #[arg(long)]
    quad_radial: Option<usize>,
    #[arg(long)]
    quad_angular: Option<usize>,
    #[arg(long)]
    circle_nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for `report.json`; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run only these checks (repeatable).
    #[arg(long = "check")]
    checks: Vec<String>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Default)]
struct TolArgs {
    #[arg(long)]
    tol_circle_orthonormality: Option<f64>,
    #[arg(long)]
    tol_measure_mass: Option<f64>,
    #[arg(long)]
    tol_moments: Option<f64>,
    #[arg(long)]
    tol_basis_forms: Option<f64>,
    #[arg(long)]
    tol_derivative: Option<f64>,
    #[arg(long)]
    tol_laplacian: Option<f64>,
    #[arg(long)]
    tol_closed_forms: Option<f64>,
    #[arg(long)]
    tol_p0_forms: Option<f64>,
    #[arg(long)]
    tol_reproducing: Option<f64>,
    #[arg(long)]
    tol_representation: Option<f64>,
    #[arg(long)]
    tol_round_trip: Option<f64>,
    #[arg(long)]
    tol_constant_stability: Option<f64>,
    #[arg(long)]
    tol_equivalence_spread: Option<f64>,
    #[arg(long)]
    tol_equivalence_stability: Option<f64>,
    #[arg(long)]
    tol_f0_stability: Option<f64>,
    #[arg(long)]
    tol_f0_bracket: Option<f64>,
    #[arg(long)]
    tol_duality: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct KernelDumpArgs {
    /// cauchy, bergman, k_tilde, k_tilde_alpha, k_alpha, f0 or h_beta:<β>.
    #[arg(long, default_value = "cauchy")]
    kernel: String,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Number of z points; the first is the origin.
    #[arg(long, default_value_t = 32)]
    z_count: usize,
    /// Number of w points; the first is the origin.
    #[arg(long, default_value_t = 32)]
    w_count: usize,
    /// Largest |z| and |w| in the grid.
    #[arg(long, default_value_t = 0.9)]
    max_radius: f64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct F0Args {
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Deepest level k; rows run over r_k = 1 − 2^{−k} for k = 4..=depth.
    #[arg(long, default_value_t = 12)]
    grid_depth: usize,
    /// Truncation accuracy of f_0 on the grid.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for `f0_profile.csv` and `f0_summary.json`; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivalenceArgs {
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 12)]
    grid_depth: usize,
    /// Highest seminorm order compared with the first.
    #[arg(long, default_value_t = 3)]
    max_order: u32,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleKind {
    Circle,
    Disk,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RuleDumpArgs {
    #[arg(long, value_enum, default_value = "disk")]
    kind: RuleKind,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 16)]
    radial: usize,
    #[arg(long, default_value_t = 32)]
    angular: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad settings; reported with exit status 2.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| ConfigError(e).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::KernelDump(args) => kernel_dump(args).map(|_| true),
        Command::F0Study(args) => f0_study(args).map(|_| true),
        Command::Equivalence(args) => equivalence(args).map(|_| true),
        Command::RuleDump(args) => rule_dump(args).map(|_| true),
        Command::Checks => {
            for name in check_names() {
                println!("{name}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(args: &VerifyArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($flag:expr => $field:expr),* $(,)?) => { $(if let Some(v) = $flag.clone() { $field = v; })* };
    }
    set! {
        args.lambda => cfg.lambda,
        args.alpha => cfg.alphas,
        args.trunc => cfg.trunc,
        args.grid_depth => cfg.grid_depth,
        args.quad_radial => cfg.quad_radial,
        args.quad_angular => cfg.quad_angular,
        args.circle_nodes => cfg.circle_nodes,
        args.seed => cfg.seed,
    }
    let (t, tol) = (&args.tol, &mut cfg.tolerances);
    set! {
        t.tol_circle_orthonormality => tol.circle_orthonormality,
        t.tol_measure_mass => tol.measure_mass,
        t.tol_moments => tol.moments,
        t.tol_basis_forms => tol.basis_forms,
        t.tol_derivative => tol.derivative,
        t.tol_laplacian => tol.laplacian,
        t.tol_closed_forms => tol.closed_forms,
        t.tol_p0_forms => tol.p0_forms,
        t.tol_reproducing => tol.reproducing,
        t.tol_representation => tol.representation,
        t.tol_round_trip => tol.round_trip,
        t.tol_constant_stability => tol.constant_stability,
        t.tol_equivalence_spread => tol.equivalence_spread,
        t.tol_equivalence_stability => tol.equivalence_stability,
        t.tol_f0_stability => tol.f0_stability,
        t.tol_f0_bracket => tol.f0_bracket,
        t.tol_duality => tol.duality,
    }
    cfg.validate()?;
    let known = check_names();
    if let Some(bad) = args.checks.iter().find(|c| !known.contains(&c.as_str())) {
        bail!("unknown check `{bad}`; run `dunkl-bloch checks` for the list");
    }
    Ok(cfg)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let cfg = config_err(load_config(&args))?;
    let only = (!args.checks.is_empty()).then_some(args.checks.as_slice());
    let report = run_verification_with(&cfg, only, |r| {
        eprintln!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
    })?;
    let json = report.to_json();
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join("report.json");
            fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("report written to {}", path.display());
        }
        None => io::stdout().write_all(json.as_bytes())?,
    }
    eprintln!("{}/{} checks passed", report.summary.passed, report.summary.total);
    Ok(report.all_passed())
}

fn lambda(v: f64) -> Result<LambdaParam> {
    config_err(LambdaParam::new(v).map_err(Into::into))
}

/// `n` deterministic points of the disk of radius `max_r`: the origin, then a
/// golden-angle spiral.
fn spiral(n: usize, max_r: f64) -> Result<Vec<DiskPoint>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            pts.push(DiskPoint::origin());
            continue;
        }
        let r = max_r * (i as f64 / (n - 1) as f64).sqrt();
        let theta = (golden * i as f64 + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
        pts.push(DiskPoint::polar(r, theta)?);
    }
    Ok(pts)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            Box::new(io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

fn kernel_dump(args: KernelDumpArgs) -> Result<()> {
    let lam = lambda(args.lambda)?;
    if !(0.0..1.0).contains(&args.max_radius) {
        return config_err(Err(anyhow::anyhow!("--max-radius must lie in [0, 1)")));
    }
    if args.z_count == 0 || args.w_count == 0 {
        return config_err(Err(anyhow::anyhow!("grid sizes must be positive")));
    }
    let kernel = config_err(KernelWeights::from_name(lam, &args.kernel, args.alpha).map_err(Into::into))?;
    let case = EnvelopeCase::for_beta(lam, kernel.beta()).ok();
    let zs = spiral(args.z_count, args.max_radius)?;
    let ws = spiral(args.w_count, args.max_radius)?;
    let mut out = sink(&args.out)?;
    writeln!(out, "z_r,z_theta,w_r,w_theta,re,im,envelope,ratio")?;
    for z in &zs {
        for w in &ws {
            let v: Complex64 = kernel_series(&kernel, z, w, KERNEL_TOL)?.value;
            let (env, ratio) = match case {
                Some(c) => {
                    let e = envelope(lam, c, z.z(), w.z())?;
                    (format!("{e:.17e}"), format!("{:.17e}", v.norm() / e))
                }
                None => (String::new(), String::new()),
            };
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{env},{ratio}", z.r(), z.theta(), w.r(), w.theta(), v.re, v.im)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct F0Summary {
    lambda: f64,
    depths: Vec<usize>,
    truncation_order: usize,
    bloch_seminorm: f64,
    bloch_tail_slack: f64,
    m_inf_increasing: bool,
    ln_ratio_min: f64,
    ln_ratio_max: f64,
}

fn f0_study(args: F0Args) -> Result<()> {
    let lam = lambda(args.lambda)?;
    if !(4..=20).contains(&args.grid_depth) {
        return config_err(Err(anyhow::anyhow!("--grid-depth must lie in 4..=20")));
    }
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return config_err(Err(anyhow::anyhow!("--tol must be positive")));
    }
    let depths: Vec<usize> = (4..=args.grid_depth).collect();
    let rows = f0_unboundedness_profile(lam, &depths, args.tol)?;
    let f0 = f0_for_depth(lam, args.grid_depth, 1, args.tol)?;
    let bloch = bloch_seminorm(&f0, 1, &SupGrid::with_depth(args.grid_depth)?)?;

    let mut csv = Vec::new();
    writeln!(csv, "k,r_k,M_inf,ln_ratio,bloch_partial")?;
    for r in &rows {
        writeln!(csv, "{},{:.17e},{:.17e},{:.17e},{:.17e}", r.k, r.r, r.m_inf, r.ln_ratio, r.bloch_partial)?;
    }
    let summary = F0Summary {
        lambda: args.lambda,
        depths,
        truncation_order: f0.coeffs().len() - 1,
        bloch_seminorm: bloch.value,
        bloch_tail_slack: bloch.slack,
        m_inf_increasing: rows.windows(2).all(|w| w[1].m_inf > w[0].m_inf),
        ln_ratio_min: rows.iter().map(|r| r.ln_ratio).fold(f64::INFINITY, f64::min),
        ln_ratio_max: rows.iter().map(|r| r.ln_ratio).fold(f64::NEG_INFINITY, f64::max),
    };
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_file(&dir.join("f0_profile.csv"), &csv)?;
            write_file(&dir.join("f0_summary.json"), json.as_bytes())?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&csv)?;
            stdout.write_all(json.as_bytes())?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn equivalence(args: EquivalenceArgs) -> Result<()> {
    let lam = lambda(args.lambda)?;
    if !(4..=20).contains(&args.grid_depth) || args.max_order < 2 {
        return config_err(Err(anyhow::anyhow!("need --grid-depth in 4..=20 and --max-order >= 2")));
    }
    let grid = SupGrid::with_depth(args.grid_depth)?;
    let mut family: Vec<(String, CoefficientSeries)> =
        (0..=16).map(|k| (format!("e_{k}"), CoefficientSeries::unit(lam, k))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for i in 0..5 {
        let coeffs = (0..=20).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        family.push((format!("random_{i}"), CoefficientSeries::polynomial(lam, coeffs)));
    }
    family.push(("f0".into(), f0_for_depth(lam, args.grid_depth, args.max_order, 1e-9)?));

    let mut out = sink(&args.out)?;
    let orders: Vec<String> = (2..=args.max_order).map(|n| format!("R_{n}")).collect();
    writeln!(out, "member,bloch,{},growth_ratio", orders.join(","))?;
    for (name, f) in &family {
        let b1 = bloch_seminorm(f, 1, &grid)?.value;
        let mut row = format!("{name},{b1:.17e}");
        for n in 2..=args.max_order {
            row.push_str(&format!(",{:.17e}", bloch_seminorm(f, n, &grid)?.value / b1));
        }
        row.push_str(&format!(",{:.17e}", growth_ratio(f, &grid)?.ratio));
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

fn rule_dump(args: RuleDumpArgs) -> Result<()> {
    let lam = lambda(args.lambda)?;
    let out = sink(&args.out)?;
    match args.kind {
        RuleKind::Circle => config_err(make_circle_rule(lam, args.angular).map_err(Into::into))?.write_csv(out)?,
        RuleKind::Disk => {
            config_err(make_disk_rule(lam, args.alpha, args.radial, args.angular).map_err(Into::into))?.write_csv(out)?
        }
    }
    Ok(())
}
