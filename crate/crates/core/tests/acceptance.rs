//! Runs every registered check with the default configuration and prints one
//! PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use dunkl_bloch::verify::{check_names, run_verification, run_verification_with};
use dunkl_bloch::RunConfig;

fn line(ok: bool, name: &str, detail: &str) {
    println!("{} {:<26} {}", if ok { "PASS" } else { "FAIL" }, name, detail);
}

fn main() -> ExitCode {
    let start = Instant::now();
    let config = RunConfig::default();
    println!("acceptance: lambda = {}, seed = {}", config.lambda, config.seed);

    let first = match run_verification_with(&config, None, |r| {
        let detail = if r.pass { String::new() } else { r.computed.to_string() };
        line(r.pass, &r.name, &detail);
    }) {
        Ok(report) => report,
        Err(e) => {
            println!("FAIL verification run aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut ok = first.all_passed() && first.checks.len() == check_names().len();

    // A second full run must serialize to the same bytes.
    let second = run_verification(&config, None).map(|r| r.to_json());
    let same = second.as_deref() == Ok(first.to_json().as_str());
    line(same, "full_report_repeat", "second default run is byte-identical");
    ok &= same;

    // The classical limit runs the same registry with its λ = 0 variants.
    let classical = RunConfig { lambda: 0.0, ..RunConfig::default() };
    match run_verification(&classical, None) {
        Ok(r) => {
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            line(r.all_passed(), "classical_limit", &format!("{}/{} checks at lambda = 0 {:?}", r.summary.passed, r.summary.total, failed));
            ok &= r.all_passed();
        }
        Err(e) => {
            line(false, "classical_limit", &e.to_string());
            ok = false;
        }
    }

    println!(
        "acceptance: {} in {:.1}s",
        if ok { "all criteria passed" } else { "FAILURES present" },
        start.elapsed().as_secs_f64()
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
