//! Job configuration: line-oriented `key = value` text with `#` comments.
//!
//! Every key has a command-line flag of the same name (underscores become
//! dashes), so a job can be written to a file, re-read, and overridden from
//! the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use scalefn_core::{LevySpec, ModelSpec, RefDensity};

use crate::error::{JobError, JobResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    LevyScale,
    ScaleCurve,
    ExitRatio,
    Resolvent,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LevyScale => "levy-scale",
            Command::ScaleCurve => "scale-curve",
            Command::ExitRatio => "exit-ratio",
            Command::Resolvent => "resolvent",
            Command::Validate => "validate",
        }
    }
}

impl FromStr for Command {
    type Err = JobError;
    fn from_str(s: &str) -> JobResult<Self> {
        Ok(match s {
            "levy-scale" => Command::LevyScale,
            "scale-curve" => Command::ScaleCurve,
            "exit-ratio" => Command::ExitRatio,
            "resolvent" => Command::Resolvent,
            "validate" => Command::Validate,
            _ => return Err(JobError::bad("command", s)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    Generic,
    Pssmp,
    Nssmp,
    Csbp,
}

impl ModelName {
    pub fn name(&self) -> &'static str {
        match self {
            ModelName::Generic => "generic",
            ModelName::Pssmp => "pssmp",
            ModelName::Nssmp => "nssmp",
            ModelName::Csbp => "csbp",
        }
    }
}

impl FromStr for ModelName {
    type Err = JobError;
    fn from_str(s: &str) -> JobResult<Self> {
        Ok(match s {
            "generic" => ModelName::Generic,
            "pssmp" => ModelName::Pssmp,
            "nssmp" => ModelName::Nssmp,
            "csbp" => ModelName::Csbp,
            _ => return Err(JobError::bad("model", s)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = JobError;
    fn from_str(s: &str) -> JobResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(JobError::bad("format", s)),
        }
    }
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Which functional `validate` simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Functional {
    /// `E_x[e^{−qT_b^+}; T_b^+ < T_a^−]`
    #[default]
    Exit,
    /// `E_x[∫₀^T e^{−qt} dt]` (occupation with `f ≡ 1`)
    Occupation,
}

impl FromStr for Functional {
    type Err = JobError;
    fn from_str(s: &str) -> JobResult<Self> {
        match s {
            "exit" => Ok(Functional::Exit),
            "occupation" => Ok(Functional::Occupation),
            _ => Err(JobError::bad("functional", s)),
        }
    }
}

impl Functional {
    pub fn name(&self) -> &'static str {
        match self {
            Functional::Exit => "exit",
            Functional::Occupation => "occupation",
        }
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub model: ModelName,
    pub alpha: Option<f64>,
    pub drift: f64,
    pub sigma: f64,
    pub jump_rate: f64,
    pub jump_decay: f64,
    pub kill_rate: f64,
    pub allow_monotone: bool,
    pub hd: RefDensity,
    pub q: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub x: Option<f64>,
    pub xp: Option<f64>,
    pub lower: Option<f64>,
    pub n: usize,
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub bridge: bool,
    pub max_steps: usize,
    pub workers: Option<usize>,
    pub functional: Functional,
    pub allowance: f64,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for JobConfig {
    fn default() -> Self {
        let base = LevySpec::default();
        JobConfig {
            command: None,
            model: ModelName::Generic,
            alpha: None,
            drift: base.drift,
            sigma: base.sigma,
            jump_rate: base.jump_rate,
            jump_decay: base.jump_decay,
            kill_rate: base.kill_rate,
            allow_monotone: false,
            hd: RefDensity::default(),
            q: 0.0,
            a: None,
            b: None,
            x: None,
            xp: None,
            lower: None,
            n: 1024,
            paths: 100_000,
            dt: 1e-4,
            seed: 7,
            bridge: true,
            max_steps: 10_000_000,
            workers: None,
            functional: Functional::Exit,
            allowance: 0.01,
            timing: false,
            out: None,
            format: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> JobResult<T> {
    value.parse().map_err(|_| JobError::bad(key, value))
}

fn parse_bool(key: &str, value: &str) -> JobResult<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(JobError::bad(key, value)),
    }
}

impl JobConfig {
    /// Sets one key. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> JobResult<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let k = key.as_str();
        match k {
            "command" => self.command = Some(parse(k, value)?),
            "model" => self.model = parse(k, value)?,
            "alpha" => self.alpha = Some(parse(k, value)?),
            "drift" => self.drift = parse(k, value)?,
            "sigma" => self.sigma = parse(k, value)?,
            "jump_rate" => self.jump_rate = parse(k, value)?,
            "jump_decay" => self.jump_decay = parse(k, value)?,
            "kill_rate" => self.kill_rate = parse(k, value)?,
            "allow_monotone" => self.allow_monotone = parse_bool(k, value)?,
            "hd" => {
                self.hd = value
                    .parse()
                    .map_err(|_| JobError::bad("hd", value))?
            }
            "q" => self.q = parse(k, value)?,
            "a" => self.a = Some(parse(k, value)?),
            "b" => self.b = Some(parse(k, value)?),
            "x" => self.x = Some(parse(k, value)?),
            "xp" => self.xp = Some(parse(k, value)?),
            "lower" => self.lower = Some(parse(k, value)?),
            "n" => self.n = parse(k, value)?,
            "paths" => self.paths = parse(k, value)?,
            "dt" => self.dt = parse(k, value)?,
            "seed" => self.seed = parse(k, value)?,
            "bridge" => self.bridge = parse_bool(k, value)?,
            "max_steps" => self.max_steps = parse(k, value)?,
            "workers" => self.workers = Some(parse(k, value)?),
            "functional" => self.functional = parse(k, value)?,
            "allowance" => self.allowance = parse(k, value)?,
            "timing" => self.timing = parse_bool(k, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(parse(k, value)?),
            _ => return Err(JobError::Input(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> JobResult<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                JobError::Input(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            self.set(k, v)
                .map_err(|e| JobError::Input(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> JobResult<Self> {
        let mut cfg = JobConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn levy(&self) -> LevySpec {
        LevySpec {
            drift: self.drift,
            sigma: self.sigma,
            jump_rate: self.jump_rate,
            jump_decay: self.jump_decay,
            kill_rate: self.kill_rate,
            allow_monotone: self.allow_monotone,
        }
    }

    /// `generic` is the base process itself (identity change).
    pub fn model_spec(&self) -> JobResult<ModelSpec> {
        let base = self.levy();
        let alpha = || {
            self.alpha
                .ok_or_else(|| JobError::Input(format!("--alpha is required for model {}", self.model.name())))
        };
        let spec = match self.model {
            ModelName::Generic => ModelSpec::levy(base).with_density(self.hd),
            ModelName::Pssmp => ModelSpec::pssmp(base, alpha()?, self.hd),
            ModelName::Nssmp => ModelSpec::nssmp(base, alpha()?, self.hd),
            ModelName::Csbp => ModelSpec::csbp(base, self.hd),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn require(&self, key: &str, value: Option<f64>) -> JobResult<f64> {
        value.ok_or_else(|| JobError::Input(format!("--{key} is required")))
    }

    pub fn output_format(&self) -> Format {
        if let Some(f) = self.format {
            return f;
        }
        match self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl fmt::Display for JobConfig {
    /// Text form accepted by [`JobConfig::from_text`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.command {
            writeln!(f, "command = {}", c.name())?;
        }
        writeln!(f, "model = {}", self.model.name())?;
        if let Some(v) = self.alpha {
            writeln!(f, "alpha = {v}")?;
        }
        writeln!(f, "drift = {}", self.drift)?;
        writeln!(f, "sigma = {}", self.sigma)?;
        writeln!(f, "jump_rate = {}", self.jump_rate)?;
        writeln!(f, "jump_decay = {}", self.jump_decay)?;
        writeln!(f, "kill_rate = {}", self.kill_rate)?;
        writeln!(f, "allow_monotone = {}", self.allow_monotone)?;
        writeln!(f, "hd = {}", self.hd)?;
        writeln!(f, "q = {}", self.q)?;
        for (k, v) in [
            ("a", self.a),
            ("b", self.b),
            ("x", self.x),
            ("xp", self.xp),
            ("lower", self.lower),
        ] {
            if let Some(v) = v {
                writeln!(f, "{k} = {v}")?;
            }
        }
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "paths = {}", self.paths)?;
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "bridge = {}", self.bridge)?;
        writeln!(f, "max_steps = {}", self.max_steps)?;
        if let Some(w) = self.workers {
            writeln!(f, "workers = {w}")?;
        }
        writeln!(f, "functional = {}", self.functional.name())?;
        writeln!(f, "allowance = {}", self.allowance)?;
        writeln!(f, "timing = {}", self.timing)?;
        if let Some(p) = &self.out {
            writeln!(f, "out = {}", p.display())?;
        }
        if let Some(fm) = self.format {
            writeln!(f, "format = {}", fm.name())?;
        }
        Ok(())
    }
}
