use std::error::Error;
use std::io::{self, Write};
use std::path::Path;

use nrep::canonical::DEFAULT_RANK_TOLERANCE;
use nrep::conditions::{self, default_probes, run_all, Condition, ConditionReport, ProbeSet};
use nrep::io::{format_f64, MatrixFile};
use nrep::sampling::{
    default_lambda_grid, random_pure_state_from, rng_for, witness_search, ProbeGeminal, SampleKind,
    SampleSpec, GENERATOR,
};
use nrep::spectral3::verify_against_lift;
use serde_json::json;

use crate::output::{
    json_lines, render_table, report_csv_rows, report_rows, write_csv, Format, REPORT_HEADER,
};

macro_rules! out {
    ($($arg:tt)*) => { write!(io::stdout().lock(), $($arg)*)? };
}

macro_rules! outln {
    ($($arg:tt)*) => { writeln!(io::stdout().lock(), $($arg)*)? };
}

pub type CmdResult = Result<u8, Box<dyn Error>>;

pub const PASS: u8 = 0;
pub const VIOLATION: u8 = 2;

/// Largest eigenvalue deviation or residual accepted by `verify-spectral`.
pub const SPECTRAL_TOLERANCE: f64 = 1e-9;

fn emit_reports(reports: &[ConditionReport], format: Format) -> Result<(), Box<dyn Error>> {
    let mut stdout = io::stdout().lock();
    match format {
        Format::Json => {
            stdout.write_all(json_lines(reports)?.as_bytes())?;
            eprint!("{}", render_table(&REPORT_HEADER, &report_rows(reports)));
        }
        Format::Csv => write_csv(&mut stdout, &REPORT_HEADER, &report_csv_rows(reports))?,
        Format::Table => stdout.write_all(render_table(&REPORT_HEADER, &report_rows(reports)).as_bytes())?,
    }
    Ok(())
}

pub fn check(
    file: &Path,
    particles: usize,
    probes: ProbeSet,
    tol: f64,
    seed: u64,
    format: Format,
) -> CmdResult {
    let d = MatrixFile::read(file)
        .and_then(|f| f.to_density())
        .map_err(|e| format!("{}: {e}", file.display()))?;
    if d.p() != 2 {
        return Err(format!("{}: expected a 2-density, got p = {}", file.display(), d.p()).into());
    }
    let probes = default_probes(&d, probes, seed)?;
    let reports = run_all(&d, particles, &probes, tol)?;
    emit_reports(&reports, format)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        eprintln!("all {} checks passed", reports.len());
        Ok(PASS)
    } else {
        eprintln!("{failed} of {} checks violated", reports.len());
        Ok(VIOLATION)
    }
}

pub fn verify_spectral(n: usize, count: usize, seed: u64, detail_limit: usize) -> CmdResult {
    if !(4..=8).contains(&n) {
        return Err(format!("verify-spectral needs 4 <= n <= 8, got {n}").into());
    }
    if count == 0 {
        return Err("count must be positive".into());
    }
    let mut worst_eig: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut nongeneric = 0;
    let mut kernel_mismatch = 0;
    for i in 0..count {
        let g = random_pure_state_from(n, 2, &mut rng_for(seed, i as u64));
        let check = verify_against_lift(&g, DEFAULT_RANK_TOLERANCE)?;
        worst_eig = worst_eig.max(check.eigenvalue_deviation);
        worst_residual = worst_residual.max(check.max_residual);
        worst_orth = worst_orth.max(check.orthonormality_defect);
        if !check.generic_kernel {
            nongeneric += 1;
        }
        if check.kernel_dim != check.numeric_kernel_dim {
            kernel_mismatch += 1;
        }
        if count <= detail_limit {
            outln!(
                "sample {i}: kernel dim {} (numeric {})",
                check.kernel_dim,
                check.numeric_kernel_dim
            );
            let rows: Vec<Vec<String>> = check
                .analytic
                .iter()
                .zip(&check.numeric)
                .enumerate()
                .map(|(k, (a, b))| {
                    vec![
                        k.to_string(),
                        format!("{a:.15}"),
                        format!("{b:.15}"),
                        format!("{:.2e}", (a - b).abs()),
                    ]
                })
                .collect();
            out!("{}", render_table(&["k", "analytic", "numeric", "|diff|"], &rows));
        }
    }
    let worst = worst_eig.max(worst_residual);
    outln!("n={n} count={count} seed={seed}");
    outln!("max eigenvalue deviation  {worst_eig:.3e}");
    outln!("max eigenvector residual  {worst_residual:.3e}");
    outln!("max orthonormality defect {worst_orth:.3e}");
    outln!("non-generic kernels       {nongeneric}");
    outln!("kernel dimension mismatch {kernel_mismatch}");
    outln!("max deviation             {worst:.3e}");
    if worst <= SPECTRAL_TOLERANCE && kernel_mismatch == 0 {
        outln!("PASS (tolerance {SPECTRAL_TOLERANCE:.0e})");
        Ok(PASS)
    } else {
        outln!("FAIL (tolerance {SPECTRAL_TOLERANCE:.0e})");
        Ok(VIOLATION)
    }
}

pub fn compare_bounds(ns: &[usize], format: Format) -> CmdResult {
    let mut rows = Vec::new();
    for &n in ns {
        if n % 2 != 0 {
            eprintln!("note: skipping odd n = {n} (the extreme geminal needs even n)");
            continue;
        }
        rows.push(conditions::compare_bounds(n)?);
    }
    const HEADER: [&str; 7] = [
        "n",
        "dual_p",
        "b_c",
        "strengthened_b",
        "lambda_min_b",
        "1+1/n",
        "route_gap",
    ];
    match format {
        Format::Json => {
            for r in &rows {
                let line = json!({
                    "n": r.n,
                    "dual_p": r.dual_p,
                    "dual_p_closed": r.dual_p_closed(),
                    "b": r.b,
                    "c": r.c,
                    "bc_closed": r.bc_closed(),
                    "strengthened_b": r.strengthened_b,
                    "lambda_min_b": r.lambda_min_b,
                    "lambda_min_closed": r.lambda_min_closed(),
                    "route_gap": r.max_route_gap(),
                });
                outln!("{line}");
            }
        }
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        format_f64(r.dual_p),
                        format_f64(r.b),
                        format_f64(r.strengthened_b),
                        format_f64(r.lambda_min_b),
                        format_f64(r.lambda_min_closed()),
                        format_f64(r.max_route_gap()),
                    ]
                })
                .collect();
            write_csv(&mut io::stdout().lock(), &HEADER, &table)?;
        }
        Format::Table => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        format!("{:.6}", r.dual_p),
                        format!("{:.6}", r.b),
                        format!("{:.6}", r.strengthened_b),
                        format!("{:.6}", r.lambda_min_b),
                        format!("{:.6}", r.lambda_min_closed()),
                        format!("{:.1e}", r.max_route_gap()),
                    ]
                })
                .collect();
            out!("{}", render_table(&HEADER, &table));
        }
    }
    Ok(PASS)
}

pub fn witness(n: usize, particles: usize, grid: Option<Vec<f64>>, format: Format) -> CmdResult {
    let grid = grid.unwrap_or_else(default_lambda_grid);
    let found = witness_search(n, particles, &grid)?;
    if found.is_empty() {
        eprintln!("no witness on the grid");
    }
    let margin = |w: &nrep::sampling::Witness, c: Condition| {
        w.reports
            .iter()
            .find(|r| r.condition == c)
            .map(|r| (r.value, r.bound, r.margin))
    };
    match format {
        Format::Json => {
            for w in &found {
                for r in &w.reports {
                    let mut r = r.clone();
                    r.probe = format!("extreme lambda={}", format_f64(w.spec.lambda));
                    outln!("{}", nrep::io::report_json_line(&r)?);
                }
            }
        }
        Format::Csv | Format::Table => {
            const HEADER: [&str; 6] = [
                "lambda",
                "value",
                "dual_p_bound",
                "b_bound",
                "c_bound",
                "dual_p_margin",
            ];
            let rows: Vec<Vec<String>> = found
                .iter()
                .filter_map(|w| {
                    let (value, dp_bound, dp_margin) = margin(w, Condition::DualP)?;
                    let (_, b_bound, _) = margin(w, Condition::B)?;
                    let (_, c_bound, _) = margin(w, Condition::C)?;
                    let f = |x: f64| {
                        if format == Format::Csv {
                            format_f64(x)
                        } else {
                            format!("{x:.6}")
                        }
                    };
                    Some(vec![
                        f(w.spec.lambda),
                        f(value),
                        f(dp_bound),
                        f(b_bound),
                        f(c_bound),
                        f(dp_margin),
                    ])
                })
                .collect();
            if format == Format::Csv {
                write_csv(&mut io::stdout().lock(), &HEADER, &rows)?;
            } else {
                out!("{}", render_table(&HEADER, &rows));
            }
        }
    }
    eprintln!("{} witness(es) among {} grid points", found.len(), grid.len());
    Ok(PASS)
}

fn parse_snake<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T, Box<dyn Error>> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown {what} {s:?}").into())
}

#[allow(clippy::too_many_arguments)]
pub fn sample(
    kind: &str,
    geminal: &str,
    n: usize,
    particles: usize,
    mix_rank: usize,
    lambda: f64,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let spec = SampleSpec {
        n,
        particles,
        kind: parse_snake::<SampleKind>("sample kind", kind)?,
        mix_rank,
        lambda,
        seed,
        geminal: parse_snake::<ProbeGeminal>("geminal", geminal)?,
    };
    let d = spec.generate()?;
    let metadata = json!({ "seed": seed, "generator": GENERATOR, "spec": spec });
    let file = MatrixFile::from_operator(d.operator(), Some(metadata));
    match out {
        Some(path) => {
            file.write(path)?;
            eprintln!(
                "wrote {} ({}x{})",
                path.display(),
                d.matrix().nrows(),
                d.matrix().ncols()
            );
        }
        None => outln!("{}", file.to_json()?),
    }
    Ok(PASS)
}
