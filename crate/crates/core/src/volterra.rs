//! Second-kind Volterra equations with a difference kernel,
//!
//! ```text
//! f(u) = Ĥ(u)·g(u) + q·Ĥ(u)·∫_u^A f(u')·W(u' − u)·D(u') du',   u ∈ [L, A],
//! ```
//!
//! solved by marching down from the anchor `A` with the product trapezoid
//! rule. The unknown at the lower end of each step enters with weight
//! `½h·W(0)·D(u)` and is solved for algebraically, so bounded-variation
//! kernels (`W(0) > 0`) and unbounded-variation kernels (`W(0) = 0`) share one
//! code path.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scale::ScaleFunction;
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

/// Maximum number of step halvings tried by [`solve_with_refinement`].
pub const MAX_HALVINGS: u32 = 12;

/// Uniform grid on `[lower, anchor]` with `n` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lower: f64,
    pub anchor: f64,
    pub n: usize,
}

impl Grid {
    /// `lower == anchor` gives the one-node grid.
    pub fn new(lower: f64, anchor: f64, n: usize) -> Result<Self> {
        if !lower.is_finite() || !anchor.is_finite() {
            return Err(Error::Config(format!(
                "grid end points must be finite: [{lower}, {anchor}]"
            )));
        }
        if lower > anchor {
            return Err(Error::Config(format!(
                "grid lower end {lower} exceeds anchor {anchor}"
            )));
        }
        if lower == anchor {
            return Ok(Grid {
                lower,
                anchor,
                n: 0,
            });
        }
        if n < 2 {
            return Err(Error::Config(format!("grid needs n >= 2 intervals, got {n}")));
        }
        Ok(Grid { lower, anchor, n })
    }

    pub fn step(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.anchor - self.lower) / self.n as f64
        }
    }

    /// Node `i`. Computed as `lower + (i/n)·(anchor − lower)` so that nodes
    /// shared with a refined grid are bit-identical.
    pub fn node(&self, i: usize) -> f64 {
        if i >= self.n {
            self.anchor
        } else {
            self.lower + (i as f64 / self.n as f64) * (self.anchor - self.lower)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// Same interval, `n` intervals.
    pub fn with_n(&self, n: usize) -> Grid {
        Grid { n, ..*self }
    }

    /// Index of the interval containing `u`, clamped to the grid.
    fn locate(&self, u: f64) -> usize {
        if self.n == 0 {
            return 0;
        }
        let t = (u - self.lower) / (self.anchor - self.lower) * self.n as f64;
        let mut j = (t.floor().max(0.0) as usize).min(self.n - 1);
        while j > 0 && self.node(j) > u {
            j -= 1;
        }
        while j + 1 < self.n && self.node(j + 1) <= u {
            j += 1;
        }
        j
    }
}

/// Data of one Volterra equation in the internal coordinate.
#[derive(Debug, Clone)]
pub struct VolterraProblem<G, H, D> {
    pub q: f64,
    /// Inhomogeneous term `g`.
    pub forcing: G,
    /// Difference kernel `W`.
    pub kernel: ScaleFunction,
    /// Weight `Ĥ` multiplying forcing and integral.
    pub hmult: H,
    /// Reference-measure density `D`.
    pub density: D,
    pub anchor: f64,
}

impl<G, H, D> VolterraProblem<G, H, D>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    pub fn new(q: f64, forcing: G, kernel: ScaleFunction, hmult: H, density: D, anchor: f64) -> Self {
        VolterraProblem {
            q,
            forcing,
            kernel,
            hmult,
            density,
            anchor,
        }
    }

    /// Nyström evaluation of the solution at an arbitrary `u` in the grid,
    /// reusing the solved node values for the integral.
    pub fn evaluate_at(&self, table: &ScaleTable, u: f64) -> Result<f64> {
        let grid = &table.grid;
        if !(u >= grid.lower && u <= grid.anchor) {
            return Err(Error::DomainError {
                value: u,
                interval: format!("[{}, {}]", grid.lower, grid.anchor),
            });
        }
        let hm = (self.hmult)(u);
        let g = (self.forcing)(u);
        if u == grid.anchor || grid.n == 0 {
            return Ok(hm * g);
        }
        let j = grid.locate(u);
        let w0 = self.kernel.w_at_zero;
        let du = grid.node(j + 1) - u;
        let fd = |k: usize| table.values[k] * (self.density)(grid.node(k));
        // Partial panel [u, u_{j+1}], then full panels up to the anchor.
        let mut known = 0.5 * du * fd(j + 1) * self.kernel.eval(grid.node(j + 1) - u);
        let h = grid.step();
        for k in (j + 1)..grid.n {
            let left = fd(k) * self.kernel.eval(grid.node(k) - u);
            let right = fd(k + 1) * self.kernel.eval(grid.node(k + 1) - u);
            known += 0.5 * h * (left + right);
        }
        let bracket = 1.0 - self.q * hm * 0.5 * du * w0 * (self.density)(u);
        let value = hm * (g + self.q * known) / bracket;
        if !value.is_finite() {
            return Err(Error::NonFinite { node: u });
        }
        Ok(value)
    }
}

/// Solution of a Volterra problem on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleTable {
    pub grid: Grid,
    /// `values[i] ≈ f(u_i)`.
    pub values: Vec<f64>,
    pub q: f64,
    /// Richardson estimate of the error of `values`; zero for a single solve.
    pub est_error: f64,
    /// Native coordinates `y_i = h_S(u_i)`, filled by the caller.
    pub native_nodes: Vec<f64>,
}

impl ScaleTable {
    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    /// Value at the lower end of the grid.
    pub fn at_lower(&self) -> f64 {
        self.values[0]
    }

    /// Value at the anchor.
    pub fn at_anchor(&self) -> f64 {
        self.values[self.grid.n]
    }

    /// Composite trapezoid of `weight(u_i)·values[i]` over the grid.
    pub fn integrate(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let n = self.grid.n;
        if n == 0 {
            return 0.0;
        }
        let h = self.grid.step();
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * v * weight(self.grid.node(i));
        }
        acc * h
    }
}

fn check_anchor<G, H, D>(problem: &VolterraProblem<G, H, D>, grid: &Grid) -> Result<()> {
    if grid.anchor != problem.anchor {
        return Err(Error::Config(format!(
            "grid anchor {} differs from problem anchor {}",
            grid.anchor, problem.anchor
        )));
    }
    if !(problem.q >= 0.0) || !problem.q.is_finite() {
        return Err(Error::Config(format!("q = {} must be finite and >= 0", problem.q)));
    }
    Ok(())
}

/// Downward product-trapezoid march from the anchor. `O(n²)`.
pub fn solve<G, H, D>(problem: &VolterraProblem<G, H, D>, grid: &Grid) -> Result<ScaleTable>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_anchor(problem, grid)?;
    let n = grid.n;
    let h = grid.step();
    let q = problem.q;
    let nodes = grid.nodes();
    let mut hm = Vec::with_capacity(n + 1);
    let mut dens = Vec::with_capacity(n + 1);
    for &u in &nodes {
        let (hv, dv) = ((problem.hmult)(u), (problem.density)(u));
        if !(hv > 0.0 && hv.is_finite() && dv > 0.0 && dv.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "weight Ĥ = {hv} and density D = {dv} must be positive and finite at u = {u}"
            )));
        }
        hm.push(hv);
        dens.push(dv);
    }
    let span = grid.anchor - grid.lower;
    let kern: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 {
                problem.kernel.w_at_zero
            } else {
                problem.kernel.eval((k as f64 / n as f64) * span)
            }
        })
        .collect();

    let mut values = alloc::vec![0.0; n + 1];
    let mut fd = alloc::vec![0.0; n + 1];
    values[n] = hm[n] * (problem.forcing)(grid.anchor);
    fd[n] = values[n] * dens[n];
    if !values[n].is_finite() {
        return Err(Error::NonFinite { node: grid.anchor });
    }
    for i in (0..n).rev() {
        let mut known = 0.5 * fd[n] * kern[n - i];
        for j in (i + 1)..n {
            known += fd[j] * kern[j - i];
        }
        let bracket = 1.0 - q * hm[i] * 0.5 * h * kern[0] * dens[i];
        if bracket < 0.5 {
            return Err(Error::StepTooLarge {
                node: nodes[i],
                bracket,
            });
        }
        let v = hm[i] * ((problem.forcing)(nodes[i]) + q * h * known) / bracket;
        if !v.is_finite() {
            return Err(Error::NonFinite { node: nodes[i] });
        }
        values[i] = v;
        fd[i] = v * dens[i];
    }
    Ok(ScaleTable {
        grid: *grid,
        values,
        q,
        est_error: 0.0,
        native_nodes: Vec::new(),
    })
}

/// Maximum defect of the table in the defining equation, with each integral
/// recomputed by composite Simpson on the linear interpolant of the values
/// (midpoints added, so twice the grid resolution).
pub fn residual<G, H, D>(problem: &VolterraProblem<G, H, D>, table: &ScaleTable) -> f64
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let grid = &table.grid;
    let n = grid.n;
    let nodes = grid.nodes();
    let dens: Vec<f64> = nodes.iter().map(|&u| (problem.density)(u)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let ui = nodes[i];
        let mut integral = 0.0;
        for j in i..n {
            let (a, b) = (nodes[j], nodes[j + 1]);
            let m = 0.5 * (a + b);
            let fm = 0.5 * (table.values[j] + table.values[j + 1]);
            let fa = table.values[j] * problem.kernel.eval(a - ui) * dens[j];
            let fb = table.values[j + 1] * problem.kernel.eval(b - ui) * dens[j + 1];
            let fmid = fm * problem.kernel.eval(m - ui) * (problem.density)(m);
            integral += (b - a) / 6.0 * (fa + 4.0 * fmid + fb);
        }
        let hm = (problem.hmult)(ui);
        let defect =
            (table.values[i] - hm * (problem.forcing)(ui) - problem.q * hm * integral).abs();
        worst = worst.max(defect);
    }
    worst
}

/// Solves at `h` and `h/2` and returns the `h/2` values on the caller's
/// nodes, with `est_error = max |f_h − f_{h/2}| / 3`.
///
/// If the stability bracket fails at `h`, the step is halved (at most
/// [`MAX_HALVINGS`] times) before the pair of solves.
pub fn solve_with_refinement<G, H, D>(
    problem: &VolterraProblem<G, H, D>,
    grid: &Grid,
) -> Result<ScaleTable>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if grid.n == 0 {
        return solve(problem, grid);
    }
    let mut factor = 1usize;
    let mut halvings = 0;
    let coarse = loop {
        match solve(problem, &grid.with_n(grid.n * factor)) {
            Ok(t) => break t,
            Err(Error::StepTooLarge { .. }) if halvings < MAX_HALVINGS => {
                factor *= 2;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    };
    let fine = solve(problem, &grid.with_n(grid.n * factor * 2))?;
    let mut values = Vec::with_capacity(grid.n + 1);
    let mut est: f64 = 0.0;
    for i in 0..=grid.n {
        let c = coarse.values[i * factor];
        let f = fine.values[i * factor * 2];
        est = est.max((c - f).abs() / 3.0);
        values.push(f);
    }
    Ok(ScaleTable {
        grid: *grid,
        values,
        q: problem.q,
        est_error: est,
        native_nodes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevySpec;

    fn unit_kernel() -> ScaleFunction {
        ScaleFunction::closed_form(&LevySpec::pure_drift(1.0), 0.0).unwrap()
    }

    fn exp_problem(q: f64, a: f64) -> VolterraProblem<impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        VolterraProblem::new(q, |_| 1.0, unit_kernel(), |_| 1.0, |_| 1.0, a)
    }

    #[test]
    fn grid_nodes_shared_with_refinement() {
        let g = Grid::new(-0.3, 1.7, 10).unwrap();
        let f = g.with_n(20);
        for i in 0..=10 {
            assert_eq!(g.node(i), f.node(2 * i));
        }
        assert_eq!(g.node(10), 1.7);
        assert!(Grid::new(1.0, 0.0, 4).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert_eq!(Grid::new(1.0, 1.0, 8).unwrap().n, 0);
    }

    #[test]
    fn q_zero_is_weighted_forcing() {
        let w = ScaleFunction::closed_form(&LevySpec::brownian(0.0, 1.0), 0.0).unwrap();
        let ww = w.clone();
        let p = VolterraProblem::new(0.0, move |u| ww.eval(1.0 - u), w, |u: f64| 1.0 + u * u, |_| 3.0, 1.0);
        let g = Grid::new(0.0, 1.0, 50).unwrap();
        let t = solve(&p, &g).unwrap();
        for (i, u) in g.nodes().into_iter().enumerate() {
            assert_eq!(t.values[i], (1.0 + u * u) * 2.0 * (1.0 - u));
        }
        assert!(residual(&p, &t) <= 1e-12);
        let r = solve_with_refinement(&p, &g).unwrap();
        assert_eq!(r.est_error, 0.0);
    }

    #[test]
    fn exponential_solution() {
        let p = exp_problem(1.0, 1.0);
        let g = Grid::new(0.0, 1.0, 1000).unwrap();
        let t = solve(&p, &g).unwrap();
        assert_eq!(t.at_anchor(), 1.0);
        let e = core::f64::consts::E;
        assert!((t.at_lower() - e).abs() < 10.0 * 1e-6);
    }

    #[test]
    fn perturbation_shows_in_residual() {
        let p = exp_problem(1.0, 1.0);
        let g = Grid::new(0.0, 1.0, 200).unwrap();
        let mut t = solve(&p, &g).unwrap();
        t.values[100] += 1e-3;
        assert!(residual(&p, &t) >= 0.5e-3);
    }

    #[test]
    fn step_too_large_then_refined() {
        // Bracket 1 − q·h/2 with q = 100: h = 0.1 fails, h = 0.01 passes.
        let p = exp_problem(100.0, 1.0);
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        assert!(matches!(solve(&p, &g), Err(Error::StepTooLarge { .. })));
        let t = solve_with_refinement(&p, &g).unwrap();
        assert_eq!(t.values.len(), 11);
        assert!(t.values.iter().all(|v| v.is_finite() && *v >= 1.0));
    }

    #[test]
    fn step_too_large_after_cap() {
        let p = exp_problem(1e9, 1.0);
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            solve_with_refinement(&p, &g),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn single_node_grid() {
        let p = VolterraProblem::new(2.0, |_| 3.0, unit_kernel(), |_| 0.5, |_| 1.0, 0.4);
        let g = Grid::new(0.4, 0.4, 10).unwrap();
        let t = solve_with_refinement(&p, &g).unwrap();
        assert_eq!(t.values, alloc::vec![1.5]);
    }

    #[test]
    fn anchor_mismatch_rejected() {
        let p = exp_problem(1.0, 1.0);
        assert!(solve(&p, &Grid::new(0.0, 2.0, 4).unwrap()).is_err());
    }

    #[test]
    fn nonpositive_weight_rejected() {
        let p = VolterraProblem::new(1.0, |_| 1.0, unit_kernel(), |u: f64| u, |_| 1.0, 1.0);
        assert!(matches!(
            solve(&p, &Grid::new(-1.0, 1.0, 4).unwrap()),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn nystrom_matches_nodes() {
        let p = exp_problem(1.0, 1.0);
        let g = Grid::new(0.0, 1.0, 100).unwrap();
        let t = solve(&p, &g).unwrap();
        for i in [0, 13, 50, 99, 100] {
            let v = p.evaluate_at(&t, g.node(i)).unwrap();
            assert!((v - t.values[i]).abs() < 1e-12, "i={i}");
        }
        let mid = p.evaluate_at(&t, 0.505).unwrap();
        assert!((mid - (0.495f64).exp()).abs() < 1e-4);
        assert!(p.evaluate_at(&t, 1.5).is_err());
    }
}
