//! Parallel Monte Carlo driver.
//!
//! Path `i` draws from its own ChaCha8 stream (`seed`, stream `i`), and the
//! per-path scores are reduced in path-index order, so an estimate does not
//! depend on the number of worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use scalefn_core::mc::{simulate_path, McConfig, McEstimate, PathOutcome, Window};
use scalefn_core::ModelSpec;

use crate::error::{JobError, JobResult};

/// Random stream of path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `cfg.n_paths` independent paths on `workers` threads (all cores
/// when `None`) and returns the outcomes in path order.
pub fn run_paths<T, F>(cfg: &McConfig, workers: Option<usize>, per_path: F) -> JobResult<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| JobError::Input(format!("cannot start worker pool: {e}")))?;
    let seed = cfg.seed;
    Ok(pool.install(|| {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| per_path(&mut path_rng(seed, i)))
            .collect()
    }))
}

/// Simulated outcomes of every path, for diagnostics.
pub fn simulate_outcomes(
    model: &ModelSpec,
    q: f64,
    y0: f64,
    a: f64,
    b: f64,
    occupation: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    cfg: &McConfig,
    workers: Option<usize>,
) -> JobResult<Vec<PathOutcome>> {
    model.validate()?;
    cfg.validate(model)?;
    let window = Window::from_native(model, a, y0, b)?;
    run_paths(cfg, workers, |rng| {
        let f = occupation.map(|f| f as &dyn Fn(f64) -> f64);
        simulate_path(model, q, &window, f, cfg, rng)
    })
}

/// Estimates `E_{y0}[e^{−q T_b^+}; T_b^+ < T_a^−]` for the changed process.
pub fn simulate_exit_functional(
    model: &ModelSpec,
    q: f64,
    y0: f64,
    a: f64,
    b: f64,
    cfg: &McConfig,
    workers: Option<usize>,
) -> JobResult<McEstimate> {
    let r = model.base.kill_rate;
    let outcomes = simulate_outcomes(model, q, y0, a, b, None, cfg, workers)?;
    let scores: Vec<Option<f64>> = outcomes.iter().map(|o| o.exit_score(q, r)).collect();
    Ok(McEstimate::from_scores(&scores))
}

/// Estimates `E_{y0}[∫₀^T e^{−qt} f(Y_t) dt]` up to the exit time of `(a, b)`.
pub fn simulate_occupation_functional(
    model: &ModelSpec,
    q: f64,
    y0: f64,
    a: f64,
    b: f64,
    f: &(dyn Fn(f64) -> f64 + Sync),
    cfg: &McConfig,
    workers: Option<usize>,
) -> JobResult<McEstimate> {
    let outcomes = simulate_outcomes(model, q, y0, a, b, Some(f), cfg, workers)?;
    let scores: Vec<Option<f64>> = outcomes.iter().map(|o| o.occupation_score()).collect();
    Ok(McEstimate::from_scores(&scores))
}
