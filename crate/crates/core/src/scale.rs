//! Closed-form `q`-scale functions.
//!
//! For the exponents in [`crate::levy`], `1/(ψ(β) − q)` is a proper rational
//! function of `β`. Its partial-fraction expansion inverts term by term to an
//! exponential sum `W^(q)(x) = Σ c_k x^{p_k} e^{λ_k x}` on `x ≥ 0`, and
//! `W^(q) = 0` on `x < 0`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::levy::LevySpec;
use crate::poly::{partial_fractions, Poly};
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance of the transform identity checked at construction.
pub const CONSTRUCTION_CHECK_TOL: f64 = 1e-10;

/// `coef · x^power · e^{rate·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleTerm {
    pub coef: Complex64,
    pub rate: Complex64,
    pub power: u32,
}

impl ScaleTerm {
    fn eval(&self, x: f64) -> Complex64 {
        let e = (self.rate * x).exp();
        let p = if self.power == 0 { 1.0 } else { x.powi(self.power as i32) };
        self.coef * e * p
    }

    /// `∫₀^∞ e^{−βx} coef·x^p e^{λx} dx = coef·p!/(β − λ)^{p+1}`.
    fn laplace(&self, beta: f64) -> Complex64 {
        let fact: f64 = (1..=self.power).map(|v| v as f64).product();
        self.coef * fact / (Complex64::new(beta, 0.0) - self.rate).powi(self.power as i32 + 1)
    }
}

/// Exponential-sum representation of `W^(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFunction {
    pub terms: Vec<ScaleTerm>,
    pub q: f64,
    pub spec: LevySpec,
    /// `W^(q)(0)`: `1/δ` with bounded variation, `0` otherwise.
    pub w_at_zero: f64,
    /// `Φ(q)`, the exponential growth rate of `W^(q)`.
    pub phi: f64,
}

impl ScaleFunction {
    /// Builds `W^(q)` for `spec`. Callers that want the 0-scale function of
    /// the process killed at rate `r` pass `q = spec.kill_rate`.
    pub fn closed_form(spec: &LevySpec, q: f64) -> Result<Self> {
        spec.validate()?;
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::InvalidSpec(format!("q = {q} must be finite and >= 0")));
        }
        let (num, den) = rational_form(spec, q);
        let terms: Vec<ScaleTerm> = partial_fractions(&num, &den)?
            .into_iter()
            .filter(|t| t.coef != Complex64::zero())
            .map(|t| ScaleTerm {
                coef: t.coef,
                rate: t.rate,
                power: t.power,
            })
            .collect();
        let w_at_zero = if spec.has_bounded_variation() {
            1.0 / spec.drift
        } else {
            0.0
        };
        let phi = spec.phi(q)?;
        let w = ScaleFunction {
            terms,
            q,
            spec: *spec,
            w_at_zero,
            phi,
        };
        let beta = phi + 1.0;
        let want = 1.0 / (spec.psi(beta) - q);
        let got = w.laplace(beta);
        if !((got - want).abs() <= CONSTRUCTION_CHECK_TOL * want.abs()) {
            return Err(Error::RootFindingFailure(format!(
                "transform check failed at β = {beta}: {got} vs {want}"
            )));
        }
        Ok(w)
    }

    /// `W^(q)(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x == 0.0 {
            self.w_at_zero
        } else {
            self.eval_complex(x).re
        }
    }

    /// Raw exponential sum, including the (rounding-level) imaginary part.
    pub fn eval_complex(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::zero(), |acc, t| acc + t.eval(x))
    }

    /// Two-argument form for the Lebesgue reference measure:
    /// `W_X^(q)(x, x') = W^(q)(x − x')`.
    pub fn eval_two_arg(&self, x: f64, xp: f64) -> f64 {
        self.eval(x - xp)
    }

    /// Exact Laplace transform of the exponential sum at `beta > Φ(q)`.
    pub fn laplace(&self, beta: f64) -> f64 {
        self.terms
            .iter()
            .fold(Complex64::zero(), |acc, t| acc + t.laplace(beta))
            .re
    }
}

/// `1/(ψ(β) − q) = num(β)/den(β)`.
fn rational_form(spec: &LevySpec, q: f64) -> (Poly, Poly) {
    let quad = Poly::new(vec![-q, spec.drift, 0.5 * spec.sigma * spec.sigma]);
    if spec.has_jumps() {
        let mu = spec.jump_decay;
        let den = quad
            .mul(&Poly::new(vec![mu, 1.0]))
            .sub(&Poly::new(vec![0.0, spec.jump_rate]));
        (Poly::new(vec![mu, 1.0]), den)
    } else {
        (Poly::new(vec![1.0]), quad)
    }
}
