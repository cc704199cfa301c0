//! Spectrally negative Lévy processes with rational Laplace exponent
//!
//! ```text
//! ψ(λ) = a·λ + ½σ²λ² − ρ·λ/(μ + λ)
//! ```
//!
//! i.e. linear drift `a`, Gaussian part `σ`, and a compound Poisson stream of
//! negative jumps at rate `ρ` with exponential magnitudes of mean `1/μ`. The
//! jump part is finite-activity and uncompensated, so when `σ = 0` the drift
//! `a` is the true drift `δ` of the bounded-variation representation.

use alloc::format;

use crate::error::{Error, Result};
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

const BRACKET_CAP: usize = 2000;

/// Parameters of a spectrally negative Lévy process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevySpec {
    pub drift: f64,
    pub sigma: f64,
    pub jump_rate: f64,
    pub jump_decay: f64,
    /// Rate of independent exponential killing. Does not enter `ψ`.
    pub kill_rate: f64,
    /// Accept a pure positive drift (monotone paths). Only meant for test
    /// fixtures where `W` is constant.
    pub allow_monotone: bool,
}

impl Default for LevySpec {
    fn default() -> Self {
        LevySpec {
            drift: 0.0,
            sigma: 1.0,
            jump_rate: 0.0,
            jump_decay: 1.0,
            kill_rate: 0.0,
            allow_monotone: false,
        }
    }
}

impl LevySpec {
    /// Brownian motion with drift.
    pub fn brownian(drift: f64, sigma: f64) -> Self {
        LevySpec {
            drift,
            sigma,
            ..Default::default()
        }
    }

    /// Pure drift `δ > 0`. Monotone, so the override flag is set.
    pub fn pure_drift(delta: f64) -> Self {
        LevySpec {
            drift: delta,
            sigma: 0.0,
            allow_monotone: true,
            ..Default::default()
        }
    }

    pub fn with_jumps(mut self, rate: f64, decay: f64) -> Self {
        self.jump_rate = rate;
        self.jump_decay = decay;
        self
    }

    pub fn with_kill_rate(mut self, r: f64) -> Self {
        self.kill_rate = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("drift", self.drift),
            ("sigma", self.sigma),
            ("jump_rate", self.jump_rate),
            ("jump_decay", self.jump_decay),
            ("kill_rate", self.kill_rate),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} = {v} is not finite")));
            }
        }
        if self.sigma < 0.0 {
            return Err(Error::InvalidSpec(format!("sigma = {} < 0", self.sigma)));
        }
        if self.jump_rate < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "jump_rate = {} < 0",
                self.jump_rate
            )));
        }
        if self.jump_decay <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "jump_decay = {} must be > 0",
                self.jump_decay
            )));
        }
        if self.kill_rate < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "kill_rate = {} < 0",
                self.kill_rate
            )));
        }
        if self.sigma == 0.0 {
            if self.drift == 0.0 && self.jump_rate == 0.0 {
                return Err(Error::DegenerateModel("ψ ≡ 0".into()));
            }
            if self.drift <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "bounded variation requires drift > 0, got {}",
                    self.drift
                )));
            }
            if self.jump_rate == 0.0 && !self.allow_monotone {
                return Err(Error::InvalidSpec(
                    "pure drift has monotone paths; set allow_monotone to use it".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn has_bounded_variation(&self) -> bool {
        self.sigma == 0.0
    }

    pub fn has_jumps(&self) -> bool {
        self.jump_rate > 0.0
    }

    /// Laplace exponent `ψ(λ)`.
    pub fn psi(&self, lambda: f64) -> f64 {
        let jumps = if self.jump_rate > 0.0 {
            self.jump_rate * lambda / (self.jump_decay + lambda)
        } else {
            0.0
        };
        self.drift * lambda + 0.5 * self.sigma * self.sigma * lambda * lambda - jumps
    }

    pub fn psi_prime(&self, lambda: f64) -> f64 {
        let d = self.jump_decay + lambda;
        let jumps = if self.jump_rate > 0.0 {
            self.jump_rate * self.jump_decay / (d * d)
        } else {
            0.0
        };
        self.drift + self.sigma * self.sigma * lambda - jumps
    }

    /// Right inverse `Φ(q) = sup{λ ≥ 0 : ψ(λ) = q}`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(Error::InvalidSpec(format!("q = {q} must be >= 0")));
        }
        let lo = self.psi_minimiser()?;
        if q == 0.0 && lo == 0.0 {
            return Ok(0.0);
        }
        let mut hi = lo.max(1.0);
        let mut grown = 0;
        while self.psi(hi) <= q {
            hi *= 2.0;
            grown += 1;
            if grown > BRACKET_CAP || !hi.is_finite() {
                return Err(Error::NonConvergence {
                    what: format!("bracketing Φ({q})"),
                    iterations: grown,
                });
            }
        }
        let mut lo = lo;
        // ψ(lo) <= q < ψ(hi) and ψ is increasing on [lo, hi].
        for _ in 0..BRACKET_CAP {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid) <= q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = if (self.psi(lo) - q).abs() <= (self.psi(hi) - q).abs() {
            lo
        } else {
            hi
        };
        Ok(root)
    }

    /// Point where `ψ` attains its minimum over `[0, ∞)`.
    fn psi_minimiser(&self) -> Result<f64> {
        if self.psi_prime(0.0) >= 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        let mut grown = 0;
        while self.psi_prime(hi) < 0.0 {
            hi *= 2.0;
            grown += 1;
            if grown > BRACKET_CAP || !hi.is_finite() {
                return Err(Error::NonConvergence {
                    what: "bracketing the minimiser of ψ".into(),
                    iterations: grown,
                });
            }
        }
        let mut lo = 0.0;
        for _ in 0..BRACKET_CAP {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi_prime(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}
