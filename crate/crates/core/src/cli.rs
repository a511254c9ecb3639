//! Command-line surface: `bound`, `simulate`, `sweep`, `verify`, `oracle`.
//!
//! Data goes to stdout and diagnostics to stderr. Exit codes: 0 ok,
//! 2 usage or invalid parameters, 3 capacity or overflow, 4 verification
//! precondition (Lipschitz mismatch), 1 anything else.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{cell_radius, log_space_bounds, BoundParams, BoundSet};
use crate::error::{Error, Result};
use crate::montecarlo::{
    exact_coverage_failure, Experiment, TrialConfig, DEFAULT_MAX_CELLS, DEFAULT_MAX_SAMPLES,
    DEFAULT_SEED, DEFAULT_TRIALS,
};
use crate::report::{emit_csv, emit_json};
use crate::sweep::{linspace, run_sweep, SweepParam, SweepPlan};
use crate::verify::{builtin, certify_sup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Environment variable overriding the default `--seed`.
pub const SEED_ENV: &str = "COVERAGE_BOUND_SEED";

#[derive(Debug, Parser)]
#[command(name = "gridcover", version, about = "Grid-coverage sample complexity toolkit")]
pub struct Cli {
    /// Worker threads for simulation (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form sample sizes for one configuration.
    Bound(BoundArgs),
    /// Seeded coverage trials at one configuration.
    Simulate(SimulateArgs),
    /// Vary one parameter around a benchmark and write a report.
    Sweep(SweepArgs),
    /// Certify the supremum of a builtin function.
    Verify(VerifyArgs),
    /// Exact coverage-failure probability by inclusion–exclusion.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    /// Dimension d.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Precision ε.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Failure probability δ.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub delta: f64,
    /// Lipschitz constant L̃.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lipschitz: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<BoundParams> {
        BoundParams::new(self.d, self.epsilon, self.delta, self.lipschitz)
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SAMPLES)]
    pub max_samples: u64,
    /// Sample count at which the failure rate is measured (default: m_exact).
    #[arg(long)]
    pub probe_m: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// dimension, epsilon or delta.
    #[arg(long)]
    pub vary: String,
    /// Comma-separated values, or `start:end:count` for an equispaced range.
    #[arg(long)]
    pub values: String,
    #[command(flatten)]
    pub benchmark: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: u64,
    /// Per-trial sample cap (default: max(1,000,000, 10·m_approx)).
    #[arg(long)]
    pub max_samples: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub function: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub cells: u64,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub json: bool,
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_) | Error::UnknownFunction(_) => EXIT_USAGE,
        Error::Overflow(_) | Error::Capacity { .. } => EXIT_CAPACITY,
        Error::LipschitzMismatch { .. } => EXIT_PRECONDITION,
        Error::Evaluation { .. } | Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        // The global pool can only be configured once per process.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            let _ = writeln!(err, "note: --jobs ignored: {e}");
        }
    }
    let result = dispatch(&cli.command, out, err);
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Bound(a) => cmd_bound(a, out, err),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
    }
}

/// `1234567` → `1,234,567`.
pub fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut s = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            s.push(',');
        }
        s.push(ch);
    }
    s
}

fn cmd_bound(args: &BoundArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let params = args.params.params()?;
    let (grid, set) = match BoundSet::for_params(&params) {
        Ok(v) => v,
        Err(e @ Error::Overflow(_)) => {
            if let Ok(logs) = log_space_bounds(&params) {
                writeln!(
                    err,
                    "ln C = {:.6}, ln m_approx = {:.6}, ln m_classic = {:.6}",
                    logs.ln_cells, logs.ln_m_approx, logs.ln_m_classic
                )?;
            }
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    if args.json {
        let doc = json!({
            "params": params,
            "k": grid.k,
            "cells": grid.cells,
            "cell_radius": cell_radius(&params),
            "q1": set.q1,
            "q2": set.q2,
            "discriminant": set.discriminant,
            "m_exact": set.m_exact,
            "m_approx": set.m_approx,
            "m_classic": set.m_classic,
            "improvement": set.improvement(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(
            out,
            "d = {}, epsilon = {}, delta = {}, lipschitz = {}",
            params.d, params.epsilon, params.delta, params.lipschitz
        )?;
        writeln!(out, "k           {}", thousands(grid.k))?;
        writeln!(out, "cells       {}", thousands(grid.cells))?;
        writeln!(out, "q1          {:.6e}", set.q1)?;
        writeln!(out, "q2          {:.6e}", set.q2)?;
        writeln!(out, "m_exact     {}", thousands(set.m_exact))?;
        writeln!(out, "m_approx    {}", thousands(set.m_approx))?;
        writeln!(out, "m_classic   {}", thousands(set.m_classic))?;
        writeln!(out, "improvement {:.4}", set.improvement())?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.params.params()?;
    let (grid, set) = BoundSet::for_params(&params)?;
    let config = TrialConfig::new(params)
        .with_trials(args.trials)
        .with_seed(args.seed)
        .with_max_samples(args.max_samples);
    let experiment = Experiment::with_cap(&config, args.max_cells)?;
    let probe = args.probe_m.unwrap_or(set.m_exact);
    let results = experiment.coverage_trials(Some(probe));

    let done: Vec<u64> = results.iter().filter_map(|r| r.m_actual).collect();
    let mean_m = (!done.is_empty()).then(|| done.iter().sum::<u64>() as f64 / done.len() as f64);
    let mean_ratio = mean_m.map(|m| m / set.m_approx as f64);
    // A capped trial that never reached the probe counts as a failure.
    let failures = results.iter().filter(|r| r.z_at_m.is_none_or(|z| z >= 1)).count();
    let failure_rate = failures as f64 / results.len() as f64;

    if args.json {
        let trials: Vec<_> = results
            .iter()
            .enumerate()
            .map(|(t, r)| {
                json!({
                    "trial": t,
                    "seed": experiment.seed_for(t as u64),
                    "m_actual": r.m_actual,
                    "hit_cap": r.hit_cap,
                    "z_at_probe": r.z_at_m,
                })
            })
            .collect();
        let doc = json!({
            "params": params,
            "cells": grid.cells,
            "m_exact": set.m_exact,
            "m_approx": set.m_approx,
            "m_classic": set.m_classic,
            "probe_m": probe,
            "trials": trials,
            "mean_m_actual": mean_m,
            "mean_ratio": mean_ratio,
            "failure_rate": failure_rate,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(());
    }
    writeln!(
        out,
        "cells {}  m_exact {}  m_approx {}  m_classic {}",
        thousands(grid.cells),
        thousands(set.m_exact),
        thousands(set.m_approx),
        thousands(set.m_classic)
    )?;
    for (t, r) in results.iter().enumerate() {
        match r.m_actual {
            Some(m) => writeln!(out, "trial {t:>4}  m_actual {}", thousands(m))?,
            None => writeln!(out, "trial {t:>4}  hit cap at {}", thousands(args.max_samples))?,
        }
    }
    match (mean_m, mean_ratio) {
        (Some(m), Some(r)) => writeln!(out, "mean m_actual {m:.1}  mean ratio {r:.4}")?,
        _ => writeln!(out, "no trial reached full coverage")?,
    }
    writeln!(out, "failure rate at M = {}: {failure_rate:.4}", thousands(probe))?;
    Ok(())
}

/// Parses `a,b,c` or `start:end:count`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::invalid(format!("cannot parse sweep value `{s}`"));
    if let [start, end, count] = text.split(':').collect::<Vec<_>>()[..] {
        let start: f64 = start.trim().parse().map_err(|_| bad(start))?;
        let end: f64 = end.trim().parse().map_err(|_| bad(end))?;
        let count: usize = count.trim().parse().map_err(|_| bad(count))?;
        return Ok(linspace(start, end, count));
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(s)))
        .collect()
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let vary: SweepParam = args.vary.parse()?;
    let values = parse_values(&args.values)?;
    let benchmark = args.benchmark.params()?;
    for &v in &values {
        vary.apply(&benchmark, v)?;
    }
    let mut plan = SweepPlan::new(vary, values, benchmark)
        .with_trials(args.trials)
        .with_seed(args.seed)
        .with_max_cells(args.max_cells);
    plan.max_samples = args.max_samples;
    let report = run_sweep(&plan)?;

    for p in report.points.iter().filter(|p| p.skipped) {
        writeln!(
            err,
            "skipped {} = {}: {} cells above cap {}",
            vary.name(),
            p.value,
            p.grid.cells,
            plan.max_cells
        )?;
    }
    let summary = format!(
        "points {}  grand mean ratio {}  improvement min {}  max {}",
        report.points.len(),
        fmt_opt(report.summary.grand_mean_ratio),
        fmt_opt(report.summary.min_improvement),
        fmt_opt(report.summary.max_improvement),
    );
    match &args.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_report(&report, args.format, &mut file)?;
            file.flush()?;
            writeln!(out, "{summary}")?;
        }
        None => {
            write_report(&report, args.format, &mut *out)?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(())
}

fn write_report(report: &crate::sweep::SweepReport, format: ReportFormat, w: &mut dyn Write) -> Result<()> {
    match format {
        ReportFormat::Csv => emit_csv(report, w),
        ReportFormat::Json => emit_json(report, w),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let f = builtin(&args.function, args.params.d)?;
    let params = args.params.params()?;
    let cert = certify_sup(&f, &params, args.seed)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&cert)?)?;
    } else {
        writeln!(out, "function            {}", cert.function)?;
        writeln!(out, "m_used              {}", thousands(cert.m_used))?;
        writeln!(out, "sampled_max         {}", cert.sampled_max)?;
        writeln!(out, "certified_sup_bound {}", cert.certified_sup_bound)?;
        writeln!(out, "confidence          {}", cert.confidence)?;
        writeln!(out, "seed                {}", cert.seed)?;
    }
    Ok(())
}

/// 12 decimal places with trailing zeros trimmed, keeping at least one.
fn format_probability(p: f64) -> String {
    let s = format!("{p:.12}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    let p = exact_coverage_failure(args.cells, args.samples)?;
    if args.json {
        let doc = json!({ "cells": args.cells, "samples": args.samples, "failure_probability": p });
        writeln!(out, "{doc}")?;
    } else {
        writeln!(out, "{}", format_probability(p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("gridcover").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn thousands_separator() {
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(999), "999");
        assert_eq!(thousands(43_486), "43,486");
        assert_eq!(thousands(2_852_379), "2,852,379");
    }

    #[test]
    fn values_parsing() {
        assert_eq!(parse_values("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_values("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_values("1,x").is_err());
        assert!(parse_values("").unwrap().is_empty());
    }

    #[test]
    fn probability_format() {
        assert_eq!(format_probability(0.5), "0.5");
        assert_eq!(format_probability(7.0 / 9.0), "0.777777777778");
        assert_eq!(format_probability(1.0), "1.0");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["bound", "--delta", "1.5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["oracle", "--cells", "30", "--samples", "3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["verify", "--function", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["sweep", "--vary", "lipschitz", "--values", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["sweep", "--vary", "delta", "--values", "0.1,zz"]).0, EXIT_USAGE);
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("bound"));
    }

    #[test]
    fn capacity_and_precondition_codes() {
        let (code, _, err) = run_str(&["bound", "--d", "8", "--epsilon", "0.001"]);
        assert_eq!(code, EXIT_CAPACITY);
        assert!(err.contains("ln C"));
        assert_eq!(run_str(&["simulate", "--d", "3", "--epsilon", "0.1", "--max-cells", "1000"]).0, EXIT_CAPACITY);
        let (code, _, _) = run_str(&["verify", "--function", "affine", "--d", "1", "--epsilon", "0.2", "--lipschitz", "1"]);
        assert_eq!(code, EXIT_PRECONDITION);
    }
}
