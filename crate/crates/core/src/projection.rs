//! Euclidean projection onto the feasible parameter set and the K=2
//! gauge-fixing transform.
//!
//! The feasibility constraints of one node,
//!
//! ```text
//! gamma+ + eps <= gamma-          (n1 = (1, 0, -1, 0))
//! gamma+ + eta+ >= gamma- + eta- + eps   (n2 = (1, 1, -1, -1))
//! ```
//!
//! are separable across nodes, so projecting the whole parameter vector
//! reduces to projecting each quadruple onto the intersection of two
//! half-spaces. That projection has a three-case closed form: the point
//! itself, the projection onto a single violated boundary, or the solution
//! of the 2x2 Gram system [[2, 2], [2, 4]] on the intersection of both
//! boundary hyperplanes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Membership, NodeParams};

/// Feasible-set description used by the fitter.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct FeasibleSpec {
    /// Margin closing the strict constraints; must be nonnegative.
    pub epsilon: f64,
    /// When K = 2, pin eta_1+ = eta_1- = 0 after each continuous update.
    pub gauge_k2: bool,
}

impl Default for FeasibleSpec {
    fn default() -> Self {
        Self { epsilon: 1e-6, gauge_k2: true }
    }
}

const N1: [f64; 4] = [1.0, 0.0, -1.0, 0.0];
const N2: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

#[inline]
fn dot4(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn axpy4(x: [f64; 4], alpha: f64, y: [f64; 4]) -> [f64; 4] {
    [x[0] + alpha * y[0], x[1] + alpha * y[1], x[2] + alpha * y[2], x[3] + alpha * y[3]]
}

#[inline]
fn dist2(a: [f64; 4], b: [f64; 4]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    let d3 = a[3] - b[3];
    d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3
}

/// Constraint slacks: both must be <= 0 for feasibility.
#[inline]
fn violations(q: [f64; 4], epsilon: f64) -> (f64, f64) {
    (dot4(N1, q) + epsilon, epsilon - dot4(N2, q))
}

/// Projects one node quadruple onto the feasible set with margin `epsilon`.
pub fn project_node(q: [f64; 4], epsilon: f64) -> Result<[f64; 4]> {
    if !q.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("project_node"));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidConfig(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let (g1, g2) = violations(q, epsilon);
    if g1 <= 0.0 && g2 <= 0.0 {
        return Ok(q);
    }

    // Candidate active sets: boundary 1, boundary 2, both boundaries. The
    // projection onto the true active set is feasible and closest to q, so
    // picking the nearest feasible candidate is exact. The tiny slack only
    // guards against rejecting the true candidate over rounding noise.
    let scale = q.iter().fold(epsilon.abs(), |m, v| m.max(v.abs()));
    let slack = 1e-10 * (1.0 + scale);

    // ||n1||^2 = 2 and ||n2||^2 = 4.
    let on_boundary1 = axpy4(q, -g1 / 2.0, N1);
    let on_boundary2 = axpy4(q, g2 / 4.0, N2);
    // Both boundaries active: solve the Gram system [[2,2],[2,4]] lambda = rhs.
    let rhs1 = dot4(N1, q) + epsilon;
    let rhs2 = dot4(N2, q) - epsilon;
    let lambda1 = rhs1 - rhs2 / 2.0;
    let lambda2 = (rhs2 - rhs1) / 2.0;
    let on_both = axpy4(axpy4(q, -lambda1, N1), -lambda2, N2);

    let mut best: Option<([f64; 4], f64)> = None;
    for cand in [on_boundary1, on_boundary2, on_both] {
        let (c1, c2) = violations(cand, epsilon);
        if c1 <= slack && c2 <= slack {
            let d = dist2(cand, q);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((cand, d));
            }
        }
    }
    // The both-boundaries candidate always satisfies both equalities up to
    // rounding, so a feasible candidate exists.
    Ok(best.expect("two-halfspace projection always has a feasible candidate").0)
}

/// Projects every node independently onto the feasible set.
pub fn project_all(params: &NodeParams, spec: &FeasibleSpec) -> Result<NodeParams> {
    let n = params.n();
    let nodes: Vec<[f64; 4]> = (0..n)
        .into_par_iter()
        .map(|i| project_node(params.node(i), spec.epsilon))
        .collect::<Result<_>>()?;
    let mut out = NodeParams::zeros(n);
    for (i, q) in nodes.into_iter().enumerate() {
        out.set_node(i, q);
    }
    Ok(out)
}

/// Theta-preserving gauge transform pinning eta_1+ = eta_1- = 0 for K = 2.
///
/// Shifts eta by -c and gamma by +c inside node 1's community and the
/// opposite way outside it, separately for the plus and minus blocks. Both
/// log-odds matrices are unchanged entrywise, hence so is the objective.
pub fn gauge_fix_k2(params: &NodeParams, membership: &Membership) -> Result<NodeParams> {
    if membership.k() != 2 {
        return Err(Error::GaugeRequiresTwoCommunities(membership.k()));
    }
    let n = params.n();
    if membership.n() != n {
        return Err(Error::DimensionMismatch {
            context: "gauge_fix_k2",
            expected: n,
            got: membership.n(),
        });
    }
    let c_plus = params.eta_plus(0);
    let c_minus = params.eta_minus(0);
    let anchor = membership.label(0);
    let mut out = params.clone();
    for i in 0..n {
        let [gp, ep, gm, em] = params.node(i);
        let node = if membership.label(i) == anchor {
            [gp + c_plus, ep - c_plus, gm + c_minus, em - c_minus]
        } else {
            [gp - c_plus, ep + c_plus, gm - c_minus, em + c_minus]
        };
        out.set_node(i, node);
    }
    Ok(out)
}
