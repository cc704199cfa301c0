//! Single-path Euler kernel for Monte Carlo checks of the exit and
//! occupation identities.
//!
//! The base process `X` is simulated on its own clock with step `dt`: a
//! Gaussian increment `a·dt + σ√dt·N`, then at most one negative exponential
//! jump per step. The time-change clock `A` is accumulated by the trapezoid
//! rule on `h_T(X)`. Killing at rate `r` enters as the weight `e^{−r·T}`.
//!
//! Parallel fan-out and random-stream management live in the companion
//! crate; everything here is generic over [`rand::Rng`].

use alloc::format;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::change::{HtMap, ModelSpec};
use crate::error::{Error, Result};
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

/// Largest allowed jump probability per step.
pub const MAX_JUMP_PROB: f64 = 0.1;

/// Fraction of truncated paths above which an estimate is unreliable.
pub const MAX_TRUNCATED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub n_paths: usize,
    /// Euler step on the clock of `X`.
    pub dt: f64,
    /// Brownian-bridge barrier-crossing correction.
    pub bridge_correction: bool,
    /// Per-path step cap; paths reaching it count as truncated.
    pub max_steps: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 7,
            n_paths: 100_000,
            dt: 1e-4,
            bridge_correction: true,
            max_steps: 10_000_000,
        }
    }
}

impl McConfig {
    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be >= 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be > 0", self.dt)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be >= 1".into()));
        }
        let rho_dt = model.base.jump_rate * self.dt;
        if rho_dt > MAX_JUMP_PROB {
            return Err(Error::Config(format!(
                "jump_rate·dt = {rho_dt} exceeds {MAX_JUMP_PROB}; reduce dt"
            )));
        }
        Ok(())
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Paths contributing to the mean.
    pub n: usize,
    /// Paths that hit `max_steps` or the clock singularity; excluded.
    pub truncated_paths: usize,
    pub unreliable: bool,
}

impl McEstimate {
    /// Summarises per-path scores in index order. `None` marks a truncated
    /// path.
    pub fn from_scores(scores: &[Option<f64>]) -> McEstimate {
        let mut n = 0usize;
        let mut sum = 0.0;
        for s in scores.iter().flatten() {
            n += 1;
            sum += s;
        }
        let truncated = scores.len() - n;
        let mean = if n > 0 { sum / n as f64 } else { f64::NAN };
        let mut ss = 0.0;
        for s in scores.iter().flatten() {
            let d = s - mean;
            ss += d * d;
        }
        let stderr = if n > 1 {
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        let unreliable =
            n == 0 || truncated as f64 > MAX_TRUNCATED_FRACTION * scores.len() as f64;
        McEstimate {
            mean,
            stderr,
            n,
            truncated_paths: truncated,
            unreliable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    /// `|mean − predicted| / stderr` (infinite when stderr is zero and the
    /// values differ).
    pub z: f64,
    pub bound: f64,
}

/// PASS iff `|mean − predicted| ≤ 3·stderr + bias_allowance`.
pub fn compare(estimate: &McEstimate, predicted: f64, bias_allowance: f64) -> Verdict {
    let diff = (estimate.mean - predicted).abs();
    let bound = 3.0 * estimate.stderr + bias_allowance;
    let z = if estimate.stderr > 0.0 {
        diff / estimate.stderr
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Verdict {
        pass: diff <= bound,
        z,
        bound,
    }
}

/// Internal-coordinate window for one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lower: f64,
    pub start: f64,
    pub upper: f64,
}

impl Window {
    /// Maps native `(a, y0, b)` to the internal coordinate.
    pub fn from_native(model: &ModelSpec, a: f64, y0: f64, b: f64) -> Result<Window> {
        let change = &model.change;
        for (name, v) in [("a", a), ("y0", y0), ("b", b)] {
            if !change.contains(v) {
                let (lo, hi) = change.state_interval();
                return Err(Error::DomainError {
                    value: v,
                    interval: format!("({lo}, {hi}) for {name}"),
                });
            }
        }
        if !(a < y0 && y0 <= b) {
            return Err(Error::Config(format!(
                "need a < y0 <= b, got ({a}, {y0}, {b})"
            )));
        }
        let hs = change.hs;
        Ok(Window {
            lower: hs.inverse(a),
            start: if y0 == b { hs.inverse(b) } else { hs.inverse(y0) },
            upper: hs.inverse(b),
        })
    }
}

/// How a simulated path ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    /// Crossed the upper barrier; `x` is the Euler value at detection.
    Up { x: f64 },
    Down { x: f64 },
    Truncated,
}

/// Per-path result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub exit: Exit,
    /// Clock `A` at exit.
    pub clock: f64,
    /// Time of `X` at exit.
    pub time: f64,
    /// `∫ e^{−qA_s − r s} f(h_S(X_s)) dA_s` up to exit.
    pub occupation: f64,
}

impl PathOutcome {
    /// `e^{−q·A_T − r·T}·1{upward exit}`, or `None` when truncated.
    pub fn exit_score(&self, q: f64, kill_rate: f64) -> Option<f64> {
        match self.exit {
            Exit::Up { .. } => Some((-q * self.clock - kill_rate * self.time).exp()),
            Exit::Down { .. } => Some(0.0),
            Exit::Truncated => None,
        }
    }

    pub fn occupation_score(&self) -> Option<f64> {
        match self.exit {
            Exit::Truncated => None,
            _ => Some(self.occupation),
        }
    }
}

/// Simulates one path of `X` from `window.start` until it leaves
/// `(window.lower, window.upper)`.
///
/// `occupation` is optional; when given, the discounted occupation integral
/// `∫ e^{−qA_s − rs} f(h_S(X_s)) h_T(X_s) ds` is accumulated along the way.
pub fn simulate_path<R: Rng + ?Sized>(
    model: &ModelSpec,
    q: f64,
    window: &Window,
    occupation: Option<&dyn Fn(f64) -> f64>,
    cfg: &McConfig,
    rng: &mut R,
) -> PathOutcome {
    let base = &model.base;
    let hs = model.change.hs;
    let ht = model.change.ht;
    let r = base.kill_rate;
    let (lo, hi) = (window.lower, window.upper);
    let dt = cfg.dt;
    let sdt = base.sigma * dt.sqrt();
    let var = base.sigma * base.sigma * dt;
    let jump_prob = if base.jump_rate > 0.0 {
        1.0 - (-base.jump_rate * dt).exp()
    } else {
        0.0
    };
    let jump = Exp::new(base.jump_decay).ok();
    // Near 0 the clock density −1/x of the branching model is unreliable.
    let eps = match ht {
        HtMap::Reciprocal => 10.0 * sdt,
        _ => 0.0,
    };

    let mut out = PathOutcome {
        exit: Exit::Truncated,
        clock: 0.0,
        time: 0.0,
        occupation: 0.0,
    };
    let mut x = window.start;
    if x >= hi {
        out.exit = Exit::Up { x };
        return out;
    }
    if x <= lo {
        out.exit = Exit::Down { x };
        return out;
    }
    let density = |x: f64, clock: f64, time: f64| -> f64 {
        match occupation {
            Some(f) => (-q * clock - r * time).exp() * f(hs.forward(x)) * ht.eval(x),
            None => 0.0,
        }
    };
    let mut phi_prev = density(x, 0.0, 0.0);
    let mut ht_prev = ht.eval(x);

    for _ in 0..cfg.max_steps {
        let z: f64 = StandardNormal.sample(rng);
        let mut next = x + base.drift * dt + sdt * z;
        let t_next = out.time + dt;

        // Barrier crossings during the diffusive move.
        let mut crossed: Option<bool> = None;
        if next >= hi {
            crossed = Some(true);
        } else if next <= lo {
            crossed = Some(false);
        } else if cfg.bridge_correction && var > 0.0 {
            let u: f64 = rng.random();
            let p_up = (-2.0 * (hi - x) * (hi - next) / var).exp();
            let p_down = (-2.0 * (x - lo) * (next - lo) / var).exp();
            if u < p_up {
                crossed = Some(true);
            } else if u < p_up + p_down {
                crossed = Some(false);
            }
        }
        if let Some(up) = crossed {
            let barrier = if up { hi } else { lo };
            let ht_end = ht.eval(barrier);
            out.clock += 0.5 * (ht_prev + ht_end) * dt;
            out.time = t_next;
            if occupation.is_some() {
                let phi_end = density(barrier, out.clock, out.time);
                out.occupation += 0.5 * (phi_prev + phi_end) * dt;
            }
            out.exit = if up {
                Exit::Up { x: next }
            } else {
                Exit::Down { x: next }
            };
            return out;
        }

        if eps > 0.0 && next > -eps {
            out.exit = Exit::Truncated;
            return out;
        }
        let ht_next = ht.eval(next);
        out.clock += 0.5 * (ht_prev + ht_next) * dt;
        out.time = t_next;
        let phi_next = density(next, out.clock, out.time);
        out.occupation += 0.5 * (phi_prev + phi_next) * dt;

        if let Some(j) = jump {
            let u: f64 = rng.random();
            if u < jump_prob {
                next -= j.sample(rng);
                if next <= lo {
                    out.exit = Exit::Down { x: next };
                    return out;
                }
                ht_prev = ht.eval(next);
                phi_prev = density(next, out.clock, out.time);
                x = next;
                continue;
            }
        }
        ht_prev = ht_next;
        phi_prev = phi_next;
        x = next;
    }
    out.exit = Exit::Truncated;
    out
}
