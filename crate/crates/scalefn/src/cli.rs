//! `scalefn` command line.
//!
//! Exit codes: 0 success, 2 validation FAIL, 3 numerical failure, 4 bad
//! input, 1 I/O failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use scalefn_core::change::{exit_ratio, occupation_prediction, resolvent_density, scale_curve};
use scalefn_core::mc::{compare, McConfig};
use scalefn_core::{Prediction, ScaleFunction};

use crate::config::{Command, Format, Functional, JobConfig};
use crate::error::{JobError, JobResult, EXIT_BAD_INPUT, EXIT_VALIDATION_FAIL};
use crate::format::{write_table_csv, PredictionJson, TableJson, ValidationReport};
use crate::montecarlo::{simulate_exit_functional, simulate_occupation_functional};

#[derive(Debug, Parser)]
#[command(name = "scalefn", version, about = "Scale functions of space-time changed Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Evaluate the closed-form q-scale function of the base process.
    LevyScale(Flags),
    /// Solve y -> W_Y(a, y) on [lower, a] and write the curve.
    ScaleCurve(Flags),
    /// Predict E_x[exp(-q T_b); T_b < T_a].
    ExitRatio(Flags),
    /// Predict the resolvent density at xp.
    Resolvent(Flags),
    /// Monte Carlo check of the exit (or occupation) identity.
    Validate(Flags),
}

/// One flag per config key; values are parsed by [`JobConfig::set`].
#[derive(Debug, Args)]
struct Flags {
    /// `key = value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kill_rate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    drift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    jump_rate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    jump_decay: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    allow_monotone: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hd: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xp: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    bridge: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    functional: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    allowance: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    timing: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all: [(&'static str, &Option<String>); 27] = [
            ("model", &self.model),
            ("alpha", &self.alpha),
            ("kill_rate", &self.kill_rate),
            ("drift", &self.drift),
            ("sigma", &self.sigma),
            ("jump_rate", &self.jump_rate),
            ("jump_decay", &self.jump_decay),
            ("allow_monotone", &self.allow_monotone),
            ("hd", &self.hd),
            ("q", &self.q),
            ("a", &self.a),
            ("b", &self.b),
            ("x", &self.x),
            ("xp", &self.xp),
            ("lower", &self.lower),
            ("n", &self.n),
            ("paths", &self.paths),
            ("dt", &self.dt),
            ("seed", &self.seed),
            ("bridge", &self.bridge),
            ("max_steps", &self.max_steps),
            ("workers", &self.workers),
            ("functional", &self.functional),
            ("allowance", &self.allowance),
            ("timing", &self.timing),
            ("out", &self.out),
            ("format", &self.format),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

/// Runs one job and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_BAD_INPUT,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn job_config(command: Command, flags: &Flags) -> JobResult<JobConfig> {
    let mut cfg = JobConfig::default();
    if let Some(path) = &flags.config {
        let text = fs::read_to_string(path)
            .map_err(|e| JobError::Input(format!("--config {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for (k, v) in flags.pairs() {
        cfg.set(k, v)?;
    }
    cfg.command = Some(command);
    if cfg.n < 2 {
        return Err(JobError::Input(format!("--n must be >= 2, got {}", cfg.n)));
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> JobResult<i32> {
    let (command, flags) = match &cli.command {
        Sub::LevyScale(f) => (Command::LevyScale, f),
        Sub::ScaleCurve(f) => (Command::ScaleCurve, f),
        Sub::ExitRatio(f) => (Command::ExitRatio, f),
        Sub::Resolvent(f) => (Command::Resolvent, f),
        Sub::Validate(f) => (Command::Validate, f),
    };
    let cfg = job_config(command, flags)?;
    match command {
        Command::LevyScale => levy_scale(&cfg),
        Command::ScaleCurve => curve(&cfg),
        Command::ExitRatio => {
            let p = exit_ratio(
                &cfg.model_spec()?,
                cfg.q,
                cfg.require("a", cfg.a)?,
                cfg.require("x", cfg.x)?,
                cfg.require("b", cfg.b)?,
                cfg.n,
            )?;
            prediction(&cfg, "exit-ratio", p)
        }
        Command::Resolvent => {
            let p = resolvent_density(
                &cfg.model_spec()?,
                cfg.q,
                cfg.require("a", cfg.a)?,
                cfg.require("b", cfg.b)?,
                cfg.require("x", cfg.x)?,
                cfg.require("xp", cfg.xp)?,
                cfg.n,
            )?;
            prediction(&cfg, "resolvent", p)
        }
        Command::Validate => validate(&cfg),
    }
}

fn open_out(cfg: &JobConfig) -> JobResult<Option<BufWriter<File>>> {
    match &cfg.out {
        Some(p) => Ok(Some(BufWriter::new(File::create(p)?))),
        None => Ok(None),
    }
}

fn out_note(cfg: &JobConfig) -> String {
    cfg.out
        .as_ref()
        .map(|p| format!(" -> {}", p.display()))
        .unwrap_or_default()
}

fn levy_scale(cfg: &JobConfig) -> JobResult<i32> {
    let w = ScaleFunction::closed_form(&cfg.levy(), cfg.q)?;
    let x = cfg.require("x", cfg.x)?;
    let value = match cfg.xp {
        Some(xp) => w.eval_two_arg(x, xp),
        None => w.eval(x),
    };
    if let Some(mut out) = open_out(cfg)? {
        match cfg.output_format() {
            Format::Csv => writeln!(out, "q,x,value\n{},{},{}", cfg.q, x, value)?,
            Format::Json => {
                serde_json::to_writer_pretty(
                    &mut out,
                    &serde_json::json!({ "q": cfg.q, "x": x, "xp": cfg.xp, "value": value, "phi": w.phi }),
                )?;
                writeln!(out)?;
            }
        }
        out.flush()?;
    }
    println!("{value:?}");
    Ok(0)
}

fn curve(cfg: &JobConfig) -> JobResult<i32> {
    let model = cfg.model_spec()?;
    let table = scale_curve(
        &model,
        cfg.q,
        cfg.require("a", cfg.a)?,
        cfg.require("lower", cfg.lower)?,
        cfg.n,
    )?;
    if let Some(mut out) = open_out(cfg)? {
        match cfg.output_format() {
            Format::Csv => write_table_csv(&mut out, &table)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &TableJson::new(&table))?;
                writeln!(out)?;
            }
        }
        out.flush()?;
    }
    println!(
        "scale-curve: model={} q={} rows={} est_error={:e}{}",
        cfg.model.name(),
        cfg.q,
        table.values.len(),
        table.est_error,
        out_note(cfg)
    );
    Ok(0)
}

fn prediction(cfg: &JobConfig, command: &'static str, p: Prediction) -> JobResult<i32> {
    if let Some(mut out) = open_out(cfg)? {
        match cfg.output_format() {
            Format::Csv => writeln!(out, "value,est_error\n{},{}", p.value, p.est_error)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &PredictionJson::new(command, cfg, p))?;
                writeln!(out)?;
            }
        }
        out.flush()?;
    }
    println!(
        "{command}: value={:?} est_error={:e}{}",
        p.value,
        p.est_error,
        out_note(cfg)
    );
    Ok(0)
}

fn validate(cfg: &JobConfig) -> JobResult<i32> {
    let started = Instant::now();
    let model = cfg.model_spec()?;
    let a = cfg.require("a", cfg.a)?;
    let x = cfg.require("x", cfg.x)?;
    let b = cfg.require("b", cfg.b)?;
    let mc = McConfig {
        seed: cfg.seed,
        n_paths: cfg.paths,
        dt: cfg.dt,
        bridge_correction: cfg.bridge,
        max_steps: cfg.max_steps,
    };
    let (predicted, estimate) = match cfg.functional {
        Functional::Exit => (
            exit_ratio(&model, cfg.q, a, x, b, cfg.n)?,
            simulate_exit_functional(&model, cfg.q, x, a, b, &mc, cfg.workers)?,
        ),
        Functional::Occupation => (
            occupation_prediction(&model, cfg.q, a, x, b, &|_| 1.0, cfg.n)?,
            simulate_occupation_functional(&model, cfg.q, x, a, b, &|_| 1.0, &mc, cfg.workers)?,
        ),
    };
    let mut verdict = compare(&estimate, predicted.value, cfg.allowance);
    if estimate.unreliable {
        verdict.pass = false;
    }
    let elapsed = started.elapsed().as_secs_f64();
    let report = ValidationReport::new(
        cfg,
        predicted,
        &estimate,
        &verdict,
        cfg.timing.then_some(elapsed),
    );
    if let Some(mut out) = open_out(cfg)? {
        match cfg.output_format() {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &report)?;
                writeln!(out)?;
            }
            Format::Csv => writeln!(
                out,
                "predicted,mean,stderr,n,truncated_paths,verdict\n{},{},{},{},{},{}",
                report.predicted,
                estimate.mean,
                estimate.stderr,
                estimate.n,
                estimate.truncated_paths,
                report.verdict
            )?,
        }
        out.flush()?;
    }
    println!(
        "validate: {} predicted={:.6} mean={:.6} stderr={:.2e} truncated={} {} ({:.1}s){}",
        cfg.functional.name(),
        predicted.value,
        estimate.mean,
        estimate.stderr,
        estimate.truncated_paths,
        report.verdict,
        elapsed,
        out_note(cfg)
    );
    Ok(if verdict.pass { 0 } else { EXIT_VALIDATION_FAIL })
}
