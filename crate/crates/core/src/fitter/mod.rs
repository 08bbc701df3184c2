//! The alternating fitting algorithm.
//!
//! A fit interleaves two updates until the objective stalls:
//!
//! 1. with labels fixed, the continuous parameters solve a convex
//!    subproblem by spectral projected gradient (Barzilai-Borwein step,
//!    Euclidean projection onto the feasible set, non-monotone Armijo
//!    backtracking);
//! 2. with parameters fixed, every node label moves to its per-node argmin.
//!    The batch form evaluates all nodes against the previous labeling; if
//!    that fails to decrease the objective, a sequential sweep (which can
//!    only decrease it) runs instead.
//!
//! The loop stops when the relative objective change drops below `alpha`
//! or after `t_max` outer iterations. Objective checkpoints after every
//! accepted update form a non-increasing trace.

mod spectral;

pub use spectral::spectral_init;

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::likelihood::{gradient, nll_of_params, pair_loss};
use crate::model::{theta_entry, DiagonalPolicy, Membership, NodeParams, SignedAdjacency};
use crate::projection::{gauge_fix_k2, project_all, project_node, FeasibleSpec};

/// Spectral-projected-gradient hyperparameters.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SpgConfig {
    pub max_inner_iters: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    /// Clamp interval for the Barzilai-Borwein step.
    pub bb_step_clamp: (f64, f64),
    /// Stop when the unit-step projected gradient falls below this in sup norm.
    pub inner_tol: f64,
    /// Number of recent objective values the Armijo test compares against.
    pub nonmonotone_window: usize,
}

impl Default for SpgConfig {
    fn default() -> Self {
        Self {
            max_inner_iters: 500,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            bb_step_clamp: (1e-10, 1e10),
            inner_tol: 1e-8,
            nonmonotone_window: 10,
        }
    }
}

/// Full configuration of a fit.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FitConfig {
    /// Number of communities.
    pub k: usize,
    /// Relative-error stopping threshold of the outer loop.
    pub alpha: f64,
    /// Maximum number of outer iterations.
    pub t_max: usize,
    pub spg: SpgConfig,
    /// Feasibility margin.
    pub epsilon: f64,
    pub seed: u64,
    pub diagonal_policy: DiagonalPolicy,
}

impl FitConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: 1e-6,
            t_max: 100,
            spg: SpgConfig::default(),
            epsilon: 1e-6,
            seed: 0,
            diagonal_policy: DiagonalPolicy::Exclude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let spg = &self.spg;
        let checks = [
            (self.k >= 1, "k must be >= 1"),
            (self.alpha > 0.0 && self.alpha.is_finite(), "alpha must be positive"),
            (self.t_max >= 1, "t_max must be >= 1"),
            (self.epsilon >= 0.0 && self.epsilon.is_finite(), "epsilon must be >= 0"),
            (spg.max_inner_iters >= 1, "max_inner_iters must be >= 1"),
            (spg.armijo_c > 0.0 && spg.armijo_c < 1.0, "armijo_c must lie in (0, 1)"),
            (
                spg.backtrack_factor > 0.0 && spg.backtrack_factor < 1.0,
                "backtrack_factor must lie in (0, 1)",
            ),
            (
                spg.bb_step_clamp.0 > 0.0 && spg.bb_step_clamp.0 <= spg.bb_step_clamp.1,
                "bb_step_clamp must satisfy 0 < min <= max",
            ),
            (spg.inner_tol >= 0.0, "inner_tol must be >= 0"),
            (spg.nonmonotone_window >= 1, "nonmonotone_window must be >= 1"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidConfig(msg.into()));
            }
        }
        Ok(())
    }
}

/// Everything a fit produces.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub params: NodeParams,
    pub membership: Membership,
    /// Objective value at every accepted checkpoint; non-increasing.
    pub nll_trace: Vec<f64>,
    pub outer_iters: usize,
    pub converged: bool,
    pub seed: u64,
}

impl FitReport {
    pub fn final_nll(&self) -> f64 {
        *self.nll_trace.last().expect("trace holds at least the initial value")
    }

    /// The identifiability-normalized parameters. For two communities this
    /// is the gauge-fixed representative with eta_1+ = eta_1- = 0; the
    /// log-odds, probabilities and objective are identical to those of
    /// `params`, but the representative sits on the closure of the
    /// constraint set rather than inside the margin.
    pub fn normalized_params(&self) -> Result<NodeParams> {
        if self.membership.k() == 2 {
            gauge_fix_k2(&self.params, &self.membership)
        } else {
            Ok(self.params.clone())
        }
    }
}

const MAX_BACKTRACKS: usize = 60;
const MAX_POLISH_SWEEPS: usize = 50;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_flat(x: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    for q in x.chunks_exact(4) {
        out.extend_from_slice(&project_node([q[0], q[1], q[2], q[3]], epsilon)?);
    }
    Ok(out)
}

fn objective(
    adjacency: &SignedAdjacency,
    x: &[f64],
    membership: &Membership,
) -> Result<f64> {
    match nll_of_params(adjacency, &NodeParams::from_flat(x.to_vec()), membership) {
        Ok(v) => Ok(v.value),
        Err(Error::NonFinite(_)) => Err(Error::NumericalFailure(
            "objective became non-finite during SPG; the instance is badly scaled".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Minimizes the objective over the feasible parameters with labels fixed.
///
/// Returns a feasible point whose objective does not exceed the starting
/// one. For K = 2 the result is gauge-fixed to eta_1+ = eta_1- = 0
/// (re-projected in the rare case the gauge output leaves the margin).
pub fn spg_solve(
    adjacency: &SignedAdjacency,
    params0: &NodeParams,
    membership: &Membership,
    config: &FitConfig,
) -> Result<NodeParams> {
    config.validate()?;
    let spg = &config.spg;
    // Callers hand over feasible points; projecting is then a no-op.
    let mut x = project_flat(params0.as_flat(), config.epsilon)?;
    let mut f = objective(adjacency, &x, membership)?;
    let mut grad =
        gradient(adjacency, &NodeParams::from_flat(x.clone()), membership)?.as_flat().to_vec();

    let mut history: VecDeque<f64> = VecDeque::with_capacity(spg.nonmonotone_window);
    history.push_back(f);
    let mut bb_step = 1.0f64;

    for _ in 0..spg.max_inner_iters {
        // Unit-step projected gradient residual decides convergence.
        let unit: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - gi).collect();
        let unit = project_flat(&unit, config.epsilon)?;
        let residual = unit
            .iter()
            .zip(&x)
            .map(|(u, xi)| (u - xi).abs())
            .fold(0.0f64, f64::max);
        if residual <= spg.inner_tol {
            break;
        }

        let shifted: Vec<f64> =
            x.iter().zip(&grad).map(|(xi, gi)| xi - bb_step * gi).collect();
        let target = project_flat(&shifted, config.epsilon)?;
        let direction: Vec<f64> = target.iter().zip(&x).map(|(t, xi)| t - xi).collect();
        let slope = dot(&grad, &direction);
        if slope >= 0.0 {
            break;
        }

        let f_ref = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut step = 1.0f64;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> =
                x.iter().zip(&direction).map(|(xi, di)| xi + step * di).collect();
            let f_new = objective(adjacency, &candidate, membership)?;
            if f_new <= f_ref + spg.armijo_c * step * slope {
                accepted = Some((candidate, f_new));
                break;
            }
            step *= spg.backtrack_factor;
        }
        let Some((x_new, f_new)) = accepted else {
            // An extreme BB step can point along an exactly flat descent
            // direction (s'y = 0 resets the step to its upper clamp); a
            // unit step yields a different search arc, so retry once.
            if bb_step != 1.0 {
                bb_step = 1.0;
                continue;
            }
            log::debug!("SPG line search stagnated at objective {f}");
            break;
        };

        let grad_new = gradient(adjacency, &NodeParams::from_flat(x_new.clone()), membership)?
            .as_flat()
            .to_vec();
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        bb_step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(spg.bb_step_clamp.0, spg.bb_step_clamp.1)
        } else {
            spg.bb_step_clamp.1
        };

        x = x_new;
        f = f_new;
        grad = grad_new;
        if history.len() == spg.nonmonotone_window {
            history.pop_front();
        }
        history.push_back(f);
    }

    let mut out = NodeParams::from_flat(x);
    if membership.k() == 2 {
        // The eta_1 = 0 representative puts the anchor node on the closure
        // of both constraints, outside any positive margin, so it can only
        // be adopted as the working iterate when it happens to stay
        // feasible. Otherwise the iterate keeps its own gauge and the
        // pinned representative is available from the fit report.
        let gauged = gauge_fix_k2(&out, membership)?;
        if gauged.is_feasible(config.epsilon) {
            out = gauged;
        } else {
            log::debug!("gauge-fixed parameters leave the feasibility margin; keeping iterate gauge");
        }
    }
    Ok(out)
}

/// Sum of the candidate-label-dependent loss terms of row `i`, i.e. the
/// pairs (i, j) for j != i with node i relabeled to `candidate`. The
/// self-pair term does not depend on the label and is left out.
fn row_loss(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    labels: &[usize],
    i: usize,
    candidate: usize,
) -> f64 {
    let n = adjacency.n();
    let gi_p = params.gamma_plus(i);
    let ei_p = params.eta_plus(i);
    let gi_m = params.gamma_minus(i);
    let ei_m = params.eta_minus(i);
    let mut s = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let same = labels[j] == candidate;
        let tp = theta_entry(gi_p, params.gamma_plus(j), ei_p, params.eta_plus(j), same);
        let tm = theta_entry(gi_m, params.gamma_minus(j), ei_m, params.eta_minus(j), same);
        s += pair_loss(tp, tm, adjacency.entry(i, j));
    }
    s
}

/// Best label for node `i` against the fixed labeling `labels`. Ties keep
/// the current label; among strictly better candidates the lowest index
/// wins.
fn best_label(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    labels: &[usize],
    k: usize,
    i: usize,
) -> usize {
    let current = labels[i];
    let mut best = current;
    let mut best_loss = row_loss(adjacency, params, labels, i, current);
    for l in 0..k {
        if l == current {
            continue;
        }
        let loss = row_loss(adjacency, params, labels, i, l);
        if loss < best_loss {
            best = l;
            best_loss = loss;
        }
    }
    best
}

fn check_label_shapes(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    membership: &Membership,
) -> Result<()> {
    if params.n() != adjacency.n() || membership.n() != adjacency.n() {
        return Err(Error::DimensionMismatch {
            context: "label_update",
            expected: adjacency.n(),
            got: params.n().min(membership.n()),
        });
    }
    Ok(())
}

/// Relabels every node simultaneously against the previous labeling.
pub fn label_update_batch(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    membership: &Membership,
) -> Result<Membership> {
    check_label_shapes(adjacency, params, membership)?;
    let k = membership.k();
    let labels = membership.labels();
    let new_labels: Vec<usize> = (0..adjacency.n())
        .into_par_iter()
        .map(|i| best_label(adjacency, params, labels, k, i))
        .collect();
    Membership::new(new_labels, k)
}

/// Relabels nodes one at a time against the current labeling; the
/// objective never increases along the sweep.
pub fn label_update_sequential(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    membership: &Membership,
) -> Result<Membership> {
    check_label_shapes(adjacency, params, membership)?;
    let k = membership.k();
    let mut current = membership.clone();
    for i in 0..adjacency.n() {
        let choice = best_label(adjacency, params, current.labels(), k, i);
        if choice != current.label(i) {
            current.set_label(i, choice);
        }
    }
    Ok(current)
}

/// Runs the full alternating scheme from spectral initialization.
pub fn fit(adjacency: &SignedAdjacency, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    if adjacency.diagonal_policy() != config.diagonal_policy {
        return Err(Error::InvalidConfig(
            "config diagonal_policy disagrees with the adjacency".into(),
        ));
    }
    let n = adjacency.n();
    let mut membership = spectral_init(adjacency, config.k, config.seed)?;
    let spec = FeasibleSpec { epsilon: config.epsilon, gauge_k2: true };
    let mut params = project_all(&NodeParams::zeros(n), &spec)?;

    let mut nll_trace = vec![nll_of_params(adjacency, &params, &membership)?.value];
    let mut previous = nll_trace[0];
    let mut converged = false;
    let mut outer_iters = 0;

    for _ in 0..config.t_max {
        outer_iters += 1;
        params = spg_solve(adjacency, &params, &membership, config)?;
        let after_spg = nll_of_params(adjacency, &params, &membership)?.value;
        nll_trace.push(after_spg);

        let batch = label_update_batch(adjacency, &params, &membership)?;
        let batch_value = nll_of_params(adjacency, &params, &batch)?.value;
        let after_labels = if batch_value < after_spg {
            membership = batch;
            batch_value
        } else {
            // The simultaneous update can oscillate; the sequential sweep
            // is the decrease-guaranteeing fallback.
            membership = label_update_sequential(adjacency, &params, &membership)?;
            nll_of_params(adjacency, &params, &membership)?.value
        };
        nll_trace.push(after_labels);

        if membership.community_sizes().contains(&0) {
            log::debug!("a label update emptied a community (k = {})", config.k);
        }

        let rel = if previous != 0.0 {
            (after_labels - previous).abs() / previous.abs()
        } else {
            (after_labels - previous).abs()
        };
        previous = after_labels;
        if rel < config.alpha {
            converged = true;
            break;
        }
    }

    // Discrete polish: iterate the sequential sweep to a fixed point so the
    // returned labeling admits no improving single-node move.
    for _ in 0..MAX_POLISH_SWEEPS {
        let swept = label_update_sequential(adjacency, &params, &membership)?;
        if swept.labels() == membership.labels() {
            break;
        }
        membership = swept;
        nll_trace.push(nll_of_params(adjacency, &params, &membership)?.value);
    }

    Ok(FitReport {
        params,
        membership,
        nll_trace,
        outer_iters,
        converged,
        seed: config.seed,
    })
}

/// BIC score of a fitted model: `2 * pair_count * L + d_k * ln(pair_count)`
/// with `d_k = 4n - 2·1(k = 2)` free continuous parameters.
pub fn bic_value(n: usize, k: usize, pair_count: usize, nll: f64) -> f64 {
    let d_k = (4 * n - if k == 2 { 2 } else { 0 }) as f64;
    2.0 * pair_count as f64 * nll + d_k * (pair_count as f64).ln()
}

/// One successfully fitted candidate inside a BIC sweep.
#[derive(Debug, Clone)]
pub struct KCandidate {
    pub k: usize,
    pub bic: f64,
    pub nll: f64,
    pub report: FitReport,
}

/// Outcome of fitting every candidate K and scoring them by BIC.
#[derive(Debug)]
pub struct KSelection {
    pub best_k: usize,
    pub candidates: Vec<KCandidate>,
    /// Candidates whose fit failed; selection proceeds over the successes.
    pub failures: Vec<(usize, Error)>,
}

/// Fits each candidate K and returns the BIC minimizer with per-K diagnostics.
pub fn select_k_bic(
    adjacency: &SignedAdjacency,
    k_candidates: &[usize],
    config: &FitConfig,
) -> Result<KSelection> {
    if k_candidates.is_empty() {
        return Err(Error::InvalidConfig("k_candidates must be nonempty".into()));
    }
    let n = adjacency.n();
    let pair_count = adjacency.pair_count();
    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for &k in k_candidates {
        let mut per_k = config.clone();
        per_k.k = k;
        match fit(adjacency, &per_k) {
            Ok(report) => {
                let nll = report.final_nll();
                let bic = bic_value(n, k, pair_count, nll);
                candidates.push(KCandidate { k, bic, nll, report });
            }
            Err(e) => {
                log::debug!("fit with k = {k} failed: {e}");
                failures.push((k, e));
            }
        }
    }
    let best = candidates
        .iter()
        .min_by(|a, b| a.bic.total_cmp(&b.bic))
        .map(|c| c.k)
        .ok_or_else(|| Error::NumericalFailure("every candidate fit failed".into()))?;
    Ok(KSelection { best_k: best, candidates, failures })
}
