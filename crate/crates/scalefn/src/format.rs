//! CSV and JSON artefacts.

use std::io::{self, Write};

use serde::Serialize;

use scalefn_core::mc::{McEstimate, Verdict};
use scalefn_core::{Prediction, ScaleTable};

use crate::config::JobConfig;

/// `u,y,value` with one row per grid node.
pub fn write_table_csv<W: Write>(mut w: W, table: &ScaleTable) -> io::Result<()> {
    writeln!(w, "u,y,value")?;
    for (i, u) in table.nodes().into_iter().enumerate() {
        let y = table.native_nodes.get(i).copied().unwrap_or(u);
        writeln!(w, "{},{},{}", u, y, table.values[i])?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct GridJson {
    pub lower: f64,
    pub anchor: f64,
    pub n: usize,
    pub h: f64,
}

#[derive(Debug, Serialize)]
pub struct TableJson<'a> {
    pub q: f64,
    pub grid: GridJson,
    pub est_error: f64,
    pub u: Vec<f64>,
    pub y: &'a [f64],
    pub value: &'a [f64],
}

impl<'a> TableJson<'a> {
    pub fn new(table: &'a ScaleTable) -> Self {
        TableJson {
            q: table.q,
            grid: GridJson {
                lower: table.grid.lower,
                anchor: table.grid.anchor,
                n: table.grid.n,
                h: table.grid.step(),
            },
            est_error: table.est_error,
            u: table.nodes(),
            y: &table.native_nodes,
            value: &table.values,
        }
    }
}

/// Model and numerical inputs recorded in reports. Worker count and output
/// path are left out so reports compare equal across runs.
#[derive(Debug, Serialize)]
pub struct InputsJson {
    pub model: &'static str,
    pub alpha: Option<f64>,
    pub drift: f64,
    pub sigma: f64,
    pub jump_rate: f64,
    pub jump_decay: f64,
    pub kill_rate: f64,
    pub hd: String,
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
}

impl InputsJson {
    pub fn new(cfg: &JobConfig) -> Self {
        InputsJson {
            model: cfg.model.name(),
            alpha: cfg.alpha,
            drift: cfg.drift,
            sigma: cfg.sigma,
            jump_rate: cfg.jump_rate,
            jump_decay: cfg.jump_decay,
            kill_rate: cfg.kill_rate,
            hd: cfg.hd.to_string(),
            q: cfg.q,
            a: cfg.a,
            b: cfg.b,
            x: cfg.x,
            xp: cfg.xp,
            lower: cfg.lower,
            n: cfg.n,
            paths: cfg.paths,
            dt: cfg.dt,
            seed: cfg.seed,
            bridge: cfg.bridge,
            max_steps: cfg.max_steps,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PredictionJson {
    pub command: &'static str,
    pub inputs: InputsJson,
    pub value: f64,
    pub est_error: f64,
}

impl PredictionJson {
    pub fn new(command: &'static str, cfg: &JobConfig, p: Prediction) -> Self {
        PredictionJson {
            command,
            inputs: InputsJson::new(cfg),
            value: p.value,
            est_error: p.est_error,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateJson {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub truncated_paths: usize,
    pub unreliable: bool,
}

impl From<&McEstimate> for EstimateJson {
    fn from(e: &McEstimate) -> Self {
        EstimateJson {
            mean: e.mean,
            stderr: e.stderr,
            n: e.n,
            truncated_paths: e.truncated_paths,
            unreliable: e.unreliable,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub command: &'static str,
    pub functional: &'static str,
    pub inputs: InputsJson,
    pub predicted: f64,
    pub predicted_est_error: f64,
    pub estimate: EstimateJson,
    pub bias_allowance: f64,
    pub verdict: &'static str,
    pub z: Option<f64>,
    pub bound: f64,
    /// Only recorded with `timing = true`; it varies between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl ValidationReport {
    pub fn new(
        cfg: &JobConfig,
        predicted: Prediction,
        estimate: &McEstimate,
        verdict: &Verdict,
        wall_clock_seconds: Option<f64>,
    ) -> Self {
        ValidationReport {
            command: "validate",
            functional: cfg.functional.name(),
            inputs: InputsJson::new(cfg),
            predicted: predicted.value,
            predicted_est_error: predicted.est_error,
            estimate: estimate.into(),
            bias_allowance: cfg.allowance,
            verdict: if verdict.pass { "PASS" } else { "FAIL" },
            z: verdict.z.is_finite().then_some(verdict.z),
            bound: verdict.bound,
            wall_clock_seconds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scalefn_core::change::scale_curve;
    use scalefn_core::{LevySpec, ModelSpec};

    #[test]
    fn csv_has_header_and_one_row_per_node() {
        let m = ModelSpec::csbp(LevySpec::brownian(0.0, 1.0), Default::default());
        let t = scale_curve(&m, 0.5, -0.5, -3.0, 16).unwrap();
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u,y,value");
        assert_eq!(lines.len(), 18);
        assert!(lines[1].starts_with("-3,-3,"));
    }

    #[test]
    fn table_json_carries_grid_and_error() {
        let m = ModelSpec::levy(LevySpec::brownian(0.0, 1.0));
        let t = scale_curve(&m, 0.5, 1.0, 0.0, 8).unwrap();
        let v: serde_json::Value = serde_json::to_value(TableJson::new(&t)).unwrap();
        assert_eq!(v["q"], 0.5);
        assert_eq!(v["grid"]["n"], 8);
        assert!(v["est_error"].as_f64().unwrap() >= 0.0);
        assert_eq!(v["value"].as_array().unwrap().len(), 9);
    }
}
