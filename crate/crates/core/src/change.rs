//! Space-time changes `Y_t = h_S(X_{τ(t)})` of a spectrally negative Lévy
//! process `X`, where `τ` inverts the clock `A_t = ∫₀ᵗ h_T(X_s) ds`.
//!
//! With a reference density `h_D`, the map `y ↦ W_Y^(q)(a, y)` solves
//!
//! ```text
//! f(y) = H(y)·W(A − u) + q·H(y)·∫_u^A f(h_S(u'))·W(u' − u)·D(u') du'
//! ```
//!
//! in the internal coordinate `u = h_S⁻¹(y)`, `A = h_S⁻¹(a)`, with
//! `H(y) = h_T(u)/h_D(y)`, `D(u') = h_D(h_S(u'))`, and `W` the 0-scale function
//! of the (possibly killed) base process. Every named model goes through
//! [`build_generic`].

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::levy::LevySpec;
use crate::scale::ScaleFunction;
use crate::volterra::{solve_with_refinement, Grid, ScaleTable, VolterraProblem};
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

/// Space change `h_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsMap {
    Identity,
    /// `y = eˣ`
    Exp,
    /// `y = −e^{−x}`
    NegExpReflect,
}

impl HsMap {
    pub fn forward(&self, x: f64) -> f64 {
        match self {
            HsMap::Identity => x,
            HsMap::Exp => x.exp(),
            HsMap::NegExpReflect => -(-x).exp(),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match self {
            HsMap::Identity => y,
            HsMap::Exp => y.ln(),
            HsMap::NegExpReflect => -(-y).ln(),
        }
    }
}

/// Time change density `h_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HtMap {
    One,
    /// `e^{αx}`
    ExpAlpha(f64),
    /// `e^{−αx}`
    NegExpAlpha(f64),
    /// `−1/x` on `x < 0`
    Reciprocal,
}

impl HtMap {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            HtMap::One => 1.0,
            HtMap::ExpAlpha(a) => (a * x).exp(),
            HtMap::NegExpAlpha(a) => (-a * x).exp(),
            HtMap::Reciprocal => -1.0 / x,
        }
    }

    /// Open interval of the internal coordinate where `h_T > 0`.
    pub fn internal_domain(&self) -> (f64, f64) {
        match self {
            HtMap::Reciprocal => (f64::NEG_INFINITY, 0.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Shape of the reference density `h_D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    One,
    Y,
    NegY,
    AbsPow(f64),
}

/// `h_D(y) = scale · kind(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefDensity {
    pub kind: DensityKind,
    pub scale: f64,
}

impl Default for RefDensity {
    fn default() -> Self {
        RefDensity::new(DensityKind::One)
    }
}

impl RefDensity {
    pub fn new(kind: DensityKind) -> Self {
        RefDensity { kind, scale: 1.0 }
    }

    pub fn scaled(self, c: f64) -> Self {
        RefDensity {
            scale: self.scale * c,
            ..self
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let shape = match self.kind {
            DensityKind::One => 1.0,
            DensityKind::Y => y,
            DensityKind::NegY => -y,
            DensityKind::AbsPow(p) => y.abs().powf(p),
        };
        self.scale * shape
    }

    /// Whether `h_D > 0` on the whole open interval `(lo, hi)`.
    fn positive_on(&self, lo: f64, hi: f64) -> bool {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return false;
        }
        match self.kind {
            DensityKind::One => true,
            DensityKind::Y => lo >= 0.0,
            DensityKind::NegY => hi <= 0.0,
            DensityKind::AbsPow(p) => p.is_finite() && (p == 0.0 || lo >= 0.0 || hi <= 0.0),
        }
    }
}

impl fmt::Display for RefDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale != 1.0 {
            write!(f, "{}*", self.scale)?;
        }
        match self.kind {
            DensityKind::One => write!(f, "1"),
            DensityKind::Y => write!(f, "y"),
            DensityKind::NegY => write!(f, "-y"),
            DensityKind::AbsPow(p) => write!(f, "abs(y)^{p}"),
        }
    }
}

impl FromStr for RefDensity {
    type Err = Error;

    /// Accepts `1`, `y`, `-y`, `abs(y)^p`, optionally prefixed by `c*`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unsupported hd expression '{s}'"));
        let (scale, body) = match s.split_once('*') {
            Some((c, rest)) => (c.trim().parse::<f64>().map_err(|_| bad())?, rest.trim()),
            None => (1.0, s),
        };
        let kind = match body {
            "1" => DensityKind::One,
            "y" => DensityKind::Y,
            "-y" => DensityKind::NegY,
            _ => {
                let p = body
                    .strip_prefix("abs(y)^")
                    .ok_or_else(bad)?
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad())?;
                DensityKind::AbsPow(p)
            }
        };
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(bad());
        }
        Ok(RefDensity { kind, scale })
    }
}

/// The triple `(h_S, h_T, h_D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeChange {
    pub hs: HsMap,
    pub ht: HtMap,
    pub hd: RefDensity,
}

impl SpaceTimeChange {
    pub fn identity() -> Self {
        SpaceTimeChange {
            hs: HsMap::Identity,
            ht: HtMap::One,
            hd: RefDensity::default(),
        }
    }

    /// Open native interval `h_S(I)`.
    pub fn state_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.ht.internal_domain();
        (self.hs.forward(lo), self.hs.forward(hi))
    }

    pub fn contains(&self, y: f64) -> bool {
        let (lo, hi) = self.state_interval();
        y > lo && y < hi
    }

    fn check_domain(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            let (lo, hi) = self.state_interval();
            Err(Error::DomainError {
                value: y,
                interval: format!("({lo}, {hi})"),
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.ht {
            HtMap::ExpAlpha(a) | HtMap::NegExpAlpha(a) if !(a > 0.0 && a.is_finite()) => {
                return Err(Error::Config(format!("alpha = {a} must be > 0")));
            }
            _ => {}
        }
        let (lo, hi) = self.state_interval();
        if !self.hd.positive_on(lo, hi) {
            return Err(Error::Config(format!(
                "hd = {} is not positive on ({lo}, {hi})",
                self.hd
            )));
        }
        Ok(())
    }

    /// `H(y) = h_T(h_S⁻¹(y)) / h_D(y)`.
    pub fn h_weight(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        Ok(self.ht.eval(self.hs.inverse(y)) / self.hd.eval(y))
    }

    /// `Ĥ(u) = h_T(u) / h_D(h_S(u))`.
    pub fn internal_weight(&self, u: f64) -> f64 {
        self.ht.eval(u) / self.hd.eval(self.hs.forward(u))
    }

    /// `D(u) = h_D(h_S(u))`.
    pub fn internal_density(&self, u: f64) -> f64 {
        self.hd.eval(self.hs.forward(u))
    }
}

/// Named model families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Generic,
    /// Positive self-similar Markov process with index `alpha`.
    Pssmp { alpha: f64 },
    /// Negative self-similar Markov process with index `alpha`.
    Nssmp { alpha: f64 },
    /// Negative of a continuous-state branching process.
    Csbp,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Generic => "generic",
            ModelKind::Pssmp { .. } => "pssmp",
            ModelKind::Nssmp { .. } => "nssmp",
            ModelKind::Csbp => "csbp",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            ModelKind::Pssmp { alpha } | ModelKind::Nssmp { alpha } => Some(alpha),
            _ => None,
        }
    }
}

/// Base process, change and label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub base: LevySpec,
    pub change: SpaceTimeChange,
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn generic(base: LevySpec, change: SpaceTimeChange) -> Self {
        ModelSpec {
            base,
            change,
            kind: ModelKind::Generic,
        }
    }

    /// Lévy process itself, Lebesgue reference measure.
    pub fn levy(base: LevySpec) -> Self {
        Self::generic(base, SpaceTimeChange::identity())
    }

    /// `h_S = eˣ`, `h_T = e^{αx}`; the base kill rate plays the role of `r`.
    pub fn pssmp(base: LevySpec, alpha: f64, hd: RefDensity) -> Self {
        ModelSpec {
            base,
            change: SpaceTimeChange {
                hs: HsMap::Exp,
                ht: HtMap::ExpAlpha(alpha),
                hd,
            },
            kind: ModelKind::Pssmp { alpha },
        }
    }

    /// `h_S = −e^{−x}`, `h_T = e^{−αx}`.
    pub fn nssmp(base: LevySpec, alpha: f64, hd: RefDensity) -> Self {
        ModelSpec {
            base,
            change: SpaceTimeChange {
                hs: HsMap::NegExpReflect,
                ht: HtMap::NegExpAlpha(alpha),
                hd,
            },
            kind: ModelKind::Nssmp { alpha },
        }
    }

    /// `h_S = x`, `h_T = −1/x` on `(−∞, 0)`.
    pub fn csbp(base: LevySpec, hd: RefDensity) -> Self {
        ModelSpec {
            base,
            change: SpaceTimeChange {
                hs: HsMap::Identity,
                ht: HtMap::Reciprocal,
                hd,
            },
            kind: ModelKind::Csbp,
        }
    }

    pub fn with_density(mut self, hd: RefDensity) -> Self {
        self.change.hd = hd;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.change.validate()?;
        let c = &self.change;
        let ok = match self.kind {
            ModelKind::Generic => true,
            ModelKind::Pssmp { alpha } => {
                c.hs == HsMap::Exp && c.ht == HtMap::ExpAlpha(alpha)
            }
            ModelKind::Nssmp { alpha } => {
                c.hs == HsMap::NegExpReflect && c.ht == HtMap::NegExpAlpha(alpha)
            }
            ModelKind::Csbp => {
                if self.base.kill_rate != 0.0 {
                    return Err(Error::Config(
                        "csbp base process must have kill_rate = 0".into(),
                    ));
                }
                c.hs == HsMap::Identity && c.ht == HtMap::Reciprocal
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "space-time change does not match model {}",
                self.kind.name()
            )))
        }
    }

    /// 0-scale function of the base process killed at rate `r`, i.e.
    /// `W^(r)` of the unkilled process.
    pub fn base_scale(&self) -> Result<ScaleFunction> {
        ScaleFunction::closed_form(&self.base, self.base.kill_rate)
    }
}

pub type BoxedFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Volterra problem produced by [`build_generic`].
pub type ModelProblem = VolterraProblem<BoxedFn, BoxedFn, BoxedFn>;

/// Map between native and internal coordinates for one anchored problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMap {
    pub hs: HsMap,
    /// `(lower, a)` in native coordinates.
    pub native: (f64, f64),
    /// `(h_S⁻¹(lower), h_S⁻¹(a))`.
    pub internal: (f64, f64),
}

impl NodeMap {
    pub fn to_native(&self, u: f64) -> f64 {
        if u == self.internal.0 {
            self.native.0
        } else if u == self.internal.1 {
            self.native.1
        } else {
            self.hs.forward(u)
        }
    }

    pub fn to_internal(&self, y: f64) -> f64 {
        if y == self.native.0 {
            self.internal.0
        } else if y == self.native.1 {
            self.internal.1
        } else {
            self.hs.inverse(y)
        }
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new(self.internal.0, self.internal.1, n)
    }
}

/// Assembles the internal-coordinate Volterra problem for `y ↦ W_Y^(q)(a, y)`
/// on `[lower, a]`.
pub fn build_generic(
    model: &ModelSpec,
    q: f64,
    a: f64,
    lower: f64,
) -> Result<(ModelProblem, NodeMap)> {
    model.validate()?;
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::Config(format!("q = {q} must be finite and >= 0")));
    }
    let change = model.change;
    change.check_domain(a)?;
    change.check_domain(lower)?;
    if lower == a {
        return Err(Error::DegenerateInterval { lower, anchor: a });
    }
    if lower > a {
        return Err(Error::Config(format!("lower = {lower} must be < a = {a}")));
    }
    let w = model.base_scale()?;
    let anchor = change.hs.inverse(a);
    let map = NodeMap {
        hs: change.hs,
        native: (lower, a),
        internal: (change.hs.inverse(lower), anchor),
    };
    let wf = w.clone();
    let forcing: BoxedFn = Box::new(move |u| wf.eval(anchor - u));
    let hmult: BoxedFn = Box::new(move |u| change.internal_weight(u));
    let density: BoxedFn = Box::new(move |u| change.internal_density(u));
    Ok((
        VolterraProblem::new(q, forcing, w, hmult, density, anchor),
        map,
    ))
}

/// `y_i ↦ W_Y^(q)(a, y_i)` on `n` intervals of `[lower, a]`, solved with
/// Richardson refinement.
pub fn scale_curve(model: &ModelSpec, q: f64, a: f64, lower: f64, n: usize) -> Result<ScaleTable> {
    let (problem, map) = build_generic(model, q, a, lower)?;
    curve_from(&problem, &map, n)
}

fn curve_from(problem: &ModelProblem, map: &NodeMap, n: usize) -> Result<ScaleTable> {
    let grid = map.grid(n)?;
    let mut table = solve_with_refinement(problem, &grid)?;
    table.native_nodes = table.nodes().into_iter().map(|u| map.to_native(u)).collect();
    Ok(table)
}

/// A predicted value with its propagated discretisation error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub est_error: f64,
}

struct Anchored {
    problem: ModelProblem,
    map: NodeMap,
    table: ScaleTable,
}

impl Anchored {
    fn new(model: &ModelSpec, q: f64, anchor: f64, lower: f64, n: usize) -> Result<Self> {
        let (problem, map) = build_generic(model, q, anchor, lower)?;
        let table = curve_from(&problem, &map, n)?;
        Ok(Anchored {
            problem,
            map,
            table,
        })
    }

    /// `W_Y^(q)(anchor, y)` for `y` in `[lower, anchor]`.
    fn value_at(&self, y: f64) -> Result<f64> {
        if y == self.map.native.0 {
            return Ok(self.table.at_lower());
        }
        if y == self.map.native.1 {
            return Ok(self.table.at_anchor());
        }
        self.problem
            .evaluate_at(&self.table, self.map.to_internal(y))
    }
}

fn check_order(pairs: &[(&str, f64, &str, f64)], strict: &[bool]) -> Result<()> {
    for ((ln, l, rn, r), s) in pairs.iter().zip(strict) {
        let bad = if *s { !(l < r) } else { !(l <= r) };
        if bad {
            let op = if *s { "<" } else { "<=" };
            return Err(Error::Config(format!("need {ln} {op} {rn}, got {l} and {r}")));
        }
    }
    Ok(())
}

struct ExitPair {
    at_x: Anchored,
    at_b: Option<Anchored>,
    ratio: Prediction,
}

impl ExitPair {
    fn new(model: &ModelSpec, q: f64, a: f64, x: f64, b: f64, n: usize) -> Result<Self> {
        check_order(
            &[("a", a, "x", x), ("x", x, "b", b)],
            &[true, false],
        )?;
        let at_x = Anchored::new(model, q, x, a, n)?;
        let at_b = if x == b {
            None
        } else {
            Some(Anchored::new(model, q, b, a, n)?)
        };
        let tb = at_b.as_ref().map_or(&at_x.table, |t| &t.table);
        let (wx, wb) = (at_x.table.at_lower(), tb.at_lower());
        if wb == 0.0 {
            return Err(Error::DivisionByZero(format!(
                "W_Y(b, a) = 0 for a = {a}, b = {b}"
            )));
        }
        let ratio = if at_b.is_none() {
            Prediction {
                value: 1.0,
                est_error: 0.0,
            }
        } else {
            let value = wx / wb;
            Prediction {
                value,
                est_error: (at_x.table.est_error + value.abs() * tb.est_error) / wb.abs(),
            }
        };
        Ok(ExitPair { at_x, at_b, ratio })
    }

    fn b_side(&self) -> &Anchored {
        self.at_b.as_ref().unwrap_or(&self.at_x)
    }
}

/// `E_x[e^{−q T_b^+}; T_b^+ < T_a^−] = W_Y^(q)(x, a) / W_Y^(q)(b, a)`, from two
/// anchored solves.
pub fn exit_ratio(model: &ModelSpec, q: f64, a: f64, x: f64, b: f64, n: usize) -> Result<Prediction> {
    Ok(ExitPair::new(model, q, a, x, b, n)?.ratio)
}

/// Discounted local-time density at `xp` of `Y` started at `x` and killed on
/// leaving `(a, b)`:
/// `W_Y(x,a)/W_Y(b,a) · W_Y(b,xp) − W_Y(x,xp)`.
pub fn resolvent_density(
    model: &ModelSpec,
    q: f64,
    a: f64,
    b: f64,
    x: f64,
    xp: f64,
    n: usize,
) -> Result<Prediction> {
    check_order(&[("a", a, "xp", xp), ("xp", xp, "b", b)], &[true, false])?;
    let pair = ExitPair::new(model, q, a, x, b, n)?;
    let wb = pair.b_side().value_at(xp)?;
    let wx = if xp > x { 0.0 } else { pair.at_x.value_at(xp)? };
    let r = pair.ratio;
    let tb = &pair.b_side().table;
    Ok(Prediction {
        value: r.value * wb - wx,
        est_error: r.est_error * wb.abs() + r.value.abs() * tb.est_error + pair.at_x.table.est_error,
    })
}

/// Predicted `E_x[∫₀^{T} e^{−qt} f(Y_t) dt]` for the exit time `T` of
/// `(a, b)`: the resolvent density integrated against `f` and `m_Y`, by the
/// trapezoid rule on the two anchored grids.
pub fn occupation_prediction(
    model: &ModelSpec,
    q: f64,
    a: f64,
    x: f64,
    b: f64,
    f: &dyn Fn(f64) -> f64,
    n: usize,
) -> Result<Prediction> {
    let pair = ExitPair::new(model, q, a, x, b, n)?;
    let change = model.change;
    let weight = |map: NodeMap| {
        move |u: f64| f(map.to_native(u)) * change.internal_density(u)
    };
    let bside = pair.b_side();
    let ib = bside.table.integrate(weight(bside.map));
    let ix = pair.at_x.table.integrate(weight(pair.at_x.map));
    let r = pair.ratio;
    // ∫|f|·D over [a, b]: turns the tables' pointwise error into an integral bound.
    let grid = bside.table.grid;
    let f_mass: f64 = (0..=grid.n)
        .map(|i| {
            let u = grid.node(i);
            let w = if i == 0 || i == grid.n { 0.5 } else { 1.0 };
            w * f(bside.map.to_native(u)).abs() * change.internal_density(u)
        })
        .sum::<f64>()
        * grid.step();
    Ok(Prediction {
        value: r.value * ib - ix,
        est_error: r.est_error * ib.abs()
            + (r.value.abs() * bside.table.est_error + pair.at_x.table.est_error) * f_mass,
    })
}

/// Human-readable description used in reports.
pub fn describe(model: &ModelSpec) -> String {
    match model.kind.alpha() {
        Some(alpha) => format!("{}(alpha={alpha}, hd={})", model.kind.name(), model.change.hd),
        None => format!("{}(hd={})", model.kind.name(), model.change.hd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_weight_examples() {
        let e = core::f64::consts::E;
        let p = ModelSpec::pssmp(LevySpec::brownian(0.0, 1.0), 2.0, RefDensity::new(DensityKind::Y));
        assert!((p.change.h_weight(e).unwrap() - e).abs() < 1e-14);
        let c = ModelSpec::csbp(LevySpec::brownian(0.0, 1.0), RefDensity::default());
        assert_eq!(c.change.h_weight(-1.0).unwrap(), 1.0);
        let id = SpaceTimeChange::identity();
        for y in [-3.0, 0.0, 2.5] {
            assert_eq!(id.h_weight(y).unwrap(), 1.0);
        }
        assert!(matches!(c.change.h_weight(0.5), Err(Error::DomainError { .. })));
        assert!(p.change.h_weight(-1.0).is_err());
    }

    #[test]
    fn state_intervals() {
        let c = ModelSpec::csbp(LevySpec::brownian(0.0, 1.0), RefDensity::default());
        assert_eq!(c.change.state_interval(), (f64::NEG_INFINITY, 0.0));
        let p = ModelSpec::pssmp(LevySpec::brownian(0.0, 1.0), 1.0, RefDensity::default());
        assert_eq!(p.change.state_interval(), (0.0, f64::INFINITY));
        let n = ModelSpec::nssmp(LevySpec::brownian(0.0, 1.0), 1.0, RefDensity::default());
        let (lo, hi) = n.change.state_interval();
        assert_eq!(lo, f64::NEG_INFINITY);
        assert_eq!(hi, 0.0);
    }

    #[test]
    fn density_validation() {
        let bm = LevySpec::brownian(0.0, 1.0);
        assert!(ModelSpec::levy(bm)
            .with_density(RefDensity::new(DensityKind::Y))
            .validate()
            .is_err());
        assert!(ModelSpec::csbp(bm, RefDensity::new(DensityKind::NegY))
            .validate()
            .is_ok());
        assert!(ModelSpec::csbp(bm.with_kill_rate(0.1), RefDensity::default())
            .validate()
            .is_err());
        let mut wrong = ModelSpec::pssmp(bm, 2.0, RefDensity::default());
        wrong.change.ht = HtMap::ExpAlpha(1.0);
        assert!(wrong.validate().is_err());
    }

    #[test]
    fn density_text_form() {
        for s in ["1", "y", "-y", "abs(y)^1.5", "2*y"] {
            let d: RefDensity = s.parse().unwrap();
            let back: RefDensity = alloc::string::ToString::to_string(&d).parse().unwrap();
            assert_eq!(d, back);
        }
        assert!("y^2".parse::<RefDensity>().is_err());
        assert!("0*y".parse::<RefDensity>().is_err());
    }

    #[test]
    fn degenerate_interval() {
        let m = ModelSpec::levy(LevySpec::brownian(0.0, 1.0));
        assert!(matches!(
            build_generic(&m, 0.1, 1.0, 1.0),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn exit_ratio_examples() {
        let m = ModelSpec::levy(LevySpec::brownian(0.0, 1.0));
        let r = exit_ratio(&m, 0.0, 0.0, 0.5, 1.0, 64).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert_eq!(exit_ratio(&m, 0.3, 0.0, 1.0, 1.0, 64).unwrap().value, 1.0);
        let r = exit_ratio(&m, 0.5, 0.0, 0.5, 1.0, 512).unwrap();
        let want = 0.5f64.sinh() / 1.0f64.sinh();
        assert!((r.value - want).abs() < 1e-6, "{} vs {want}", r.value);
        assert!((want - 0.44341).abs() < 1e-5);
    }

    #[test]
    fn resolvent_examples() {
        let m = ModelSpec::levy(LevySpec::brownian(0.0, 1.0));
        let r = resolvent_density(&m, 0.0, 0.0, 1.0, 0.5, 0.5, 64).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        // Green function 2·min(x,x')·(1 − max(x,x')) for BM on (0,1).
        for (x, xp) in [(0.3, 0.7), (0.7, 0.3), (0.25, 0.6)] {
            let r = resolvent_density(&m, 0.0, 0.0, 1.0, x, xp, 64).unwrap();
            let want = 2.0 * f64::min(x, xp) * (1.0 - f64::max(x, xp));
            assert!((r.value - want).abs() < 1e-13, "{x},{xp}");
        }
        // xp = b: ratio · W(0) − 0 = 0 for Brownian motion.
        let r = resolvent_density(&m, 0.2, 0.0, 1.0, 0.5, 1.0, 64).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn resolvent_diagonal_bounded_variation() {
        // Pure drift δ = 1: W ≡ 1, so W(x, x) = 1 is subtracted on the diagonal.
        let m = ModelSpec::levy(LevySpec::pure_drift(1.0));
        let r = resolvent_density(&m, 0.0, 0.0, 1.0, 0.5, 0.5, 64).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
        let at_b = resolvent_density(&m, 0.0, 0.0, 1.0, 0.5, 1.0, 64).unwrap();
        assert!((at_b.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn occupation_prediction_bm_expected_exit_time() {
        let m = ModelSpec::levy(LevySpec::brownian(0.0, 1.0));
        let p = occupation_prediction(&m, 0.0, 0.0, 0.5, 1.0, &|_| 1.0, 64).unwrap();
        assert!((p.value - 0.25).abs() < 1e-14);
    }
}
