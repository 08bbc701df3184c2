//! Domain types for signed networks and the deterministic maps from
//! per-node parameters and community memberships to pairwise log-odds and
//! edge probabilities.
//!
//! Every pair (i, j) carries two log-odds values: `theta_plus` for a
//! positive edge and `theta_minus` for a negative one. Both decompose as a
//! cross-community baseline plus a within-community bonus,
//!
//! ```text
//! theta±_ij = gamma±_i + gamma±_j + (eta±_i + eta±_j) * 1(psi_i = psi_j),
//! ```
//!
//! and the edge sign follows a three-outcome multinomial with probabilities
//! proportional to (exp(theta+), exp(theta-), 1).

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Whether self-pairs (i, i) participate in likelihood sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalPolicy {
    Include,
    Exclude,
}

impl DiagonalPolicy {
    pub fn includes_diagonal(self) -> bool {
        matches!(self, DiagonalPolicy::Include)
    }
}

impl Default for DiagonalPolicy {
    fn default() -> Self {
        DiagonalPolicy::Exclude
    }
}

/// Symmetric signed adjacency matrix with entries in {+1, -1, 0}.
#[derive(Debug, Clone)]
pub struct SignedAdjacency {
    entries: Array2<i8>,
    diagonal_policy: DiagonalPolicy,
}

impl SignedAdjacency {
    /// Validates symmetry, the sign alphabet, and a zero diagonal when
    /// self-pairs are excluded.
    pub fn new(entries: Array2<i8>, diagonal_policy: DiagonalPolicy) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::InvalidAdjacency(format!(
                "matrix must be square, got {rows}x{cols}"
            )));
        }
        if rows == 0 {
            return Err(Error::InvalidAdjacency("graph must have at least 1 node".into()));
        }
        for i in 0..rows {
            for j in i..cols {
                let v = entries[[i, j]];
                if !(-1..=1).contains(&v) {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry ({i}, {j}) = {v} is outside {{-1, 0, +1}}"
                    )));
                }
                if entries[[j, i]] != v {
                    return Err(Error::InvalidAdjacency(format!(
                        "entries ({i}, {j}) and ({j}, {i}) disagree"
                    )));
                }
            }
            if !diagonal_policy.includes_diagonal() && entries[[i, i]] != 0 {
                return Err(Error::InvalidAdjacency(format!(
                    "self-pair ({i}, {i}) must be 0 when the diagonal is excluded"
                )));
            }
        }
        Ok(Self { entries, diagonal_policy })
    }

    /// Builds an adjacency from an undirected signed edge list.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, i8)],
        diagonal_policy: DiagonalPolicy,
    ) -> Result<Self> {
        let mut entries = Array2::<i8>::zeros((n, n));
        for &(i, j, sign) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidAdjacency(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            entries[[i, j]] = sign;
            entries[[j, i]] = sign;
        }
        Self::new(entries, diagonal_policy)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn diagonal_policy(&self) -> DiagonalPolicy {
        self.diagonal_policy
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries[[i, j]]
    }

    pub fn entries(&self) -> &Array2<i8> {
        &self.entries
    }

    /// Number of pairs entering likelihood sums: n(n+1)/2 with the diagonal,
    /// n(n-1)/2 without.
    pub fn pair_count(&self) -> usize {
        let n = self.n();
        if self.diagonal_policy.includes_diagonal() {
            n * (n + 1) / 2
        } else {
            n * (n - 1) / 2
        }
    }

    /// Counts of positive and negative edges over unordered pairs i < j.
    pub fn edge_counts(&self) -> (usize, usize) {
        let n = self.n();
        let mut pos = 0;
        let mut neg = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                match self.entries[[i, j]] {
                    1 => pos += 1,
                    -1 => neg += 1,
                    _ => {}
                }
            }
        }
        (pos, neg)
    }
}

/// Community assignment for n nodes over k communities. Labels are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    labels: Vec<usize>,
    k: usize,
}

impl Membership {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 || labels.is_empty() {
            return Err(Error::InvalidCommunityCount { k, n: labels.len() });
        }
        for (node, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::InvalidLabel { node, label, k });
            }
        }
        Ok(Self { labels, k })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn same_community(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub(crate) fn set_label(&mut self, i: usize, label: usize) {
        debug_assert!(label < self.k);
        self.labels[i] = label;
    }
}

/// Index of gamma_plus within a node's parameter quadruple.
pub(crate) const GP: usize = 0;
/// Index of eta_plus.
pub(crate) const EP: usize = 1;
/// Index of gamma_minus.
pub(crate) const GM: usize = 2;
/// Index of eta_minus.
pub(crate) const EM: usize = 3;

/// Per-node parameter quadruples (gamma+, eta+, gamma-, eta-).
///
/// Stored as one flat vector with stride 4 so the optimizer can treat the
/// whole parameter set as a point in R^{4n}. The within-community log-odds
/// recover as beta± = gamma± + eta±.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeParams {
    data: Vec<f64>,
}

impl NodeParams {
    pub fn zeros(n: usize) -> Self {
        Self { data: vec![0.0; 4 * n] }
    }

    /// Assembles params from the four per-node vectors, checking finiteness.
    pub fn from_vectors(
        gamma_plus: &[f64],
        eta_plus: &[f64],
        gamma_minus: &[f64],
        eta_minus: &[f64],
    ) -> Result<Self> {
        let n = gamma_plus.len();
        for (name, v) in [
            ("eta_plus", eta_plus),
            ("gamma_minus", gamma_minus),
            ("eta_minus", eta_minus),
        ] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "NodeParams::from_vectors",
                    expected: n,
                    got: v.len(),
                });
            }
            let _ = name;
        }
        let mut data = Vec::with_capacity(4 * n);
        for i in 0..n {
            data.extend_from_slice(&[gamma_plus[i], eta_plus[i], gamma_minus[i], eta_minus[i]]);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("NodeParams"));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_flat(data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len() % 4, 0);
        Self { data }
    }

    pub fn n(&self) -> usize {
        self.data.len() / 4
    }

    #[inline]
    pub fn gamma_plus(&self, i: usize) -> f64 {
        self.data[4 * i + GP]
    }

    #[inline]
    pub fn eta_plus(&self, i: usize) -> f64 {
        self.data[4 * i + EP]
    }

    #[inline]
    pub fn gamma_minus(&self, i: usize) -> f64 {
        self.data[4 * i + GM]
    }

    #[inline]
    pub fn eta_minus(&self, i: usize) -> f64 {
        self.data[4 * i + EM]
    }

    #[inline]
    pub fn beta_plus(&self, i: usize) -> f64 {
        self.gamma_plus(i) + self.eta_plus(i)
    }

    #[inline]
    pub fn beta_minus(&self, i: usize) -> f64 {
        self.gamma_minus(i) + self.eta_minus(i)
    }

    pub fn node(&self, i: usize) -> [f64; 4] {
        [self.data[4 * i], self.data[4 * i + 1], self.data[4 * i + 2], self.data[4 * i + 3]]
    }

    pub(crate) fn set_node(&mut self, i: usize, q: [f64; 4]) {
        self.data[4 * i..4 * i + 4].copy_from_slice(&q);
    }

    pub fn gamma_plus_vec(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.gamma_plus(i)).collect()
    }

    pub fn eta_plus_vec(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.eta_plus(i)).collect()
    }

    pub fn gamma_minus_vec(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.gamma_minus(i)).collect()
    }

    pub fn eta_minus_vec(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.eta_minus(i)).collect()
    }

    pub(crate) fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Node-wise feasibility with margin `epsilon`:
    /// gamma+ + eps <= gamma-  and  beta+ >= beta- + eps.
    pub fn is_feasible(&self, epsilon: f64) -> bool {
        self.first_infeasible_node(epsilon).is_none()
    }

    pub fn check_feasible(&self, epsilon: f64) -> Result<()> {
        match self.first_infeasible_node(epsilon) {
            None => Ok(()),
            Some(node) => Err(Error::InfeasibleParams { node, epsilon }),
        }
    }

    fn first_infeasible_node(&self, epsilon: f64) -> Option<usize> {
        (0..self.n()).find(|&i| {
            let ok = self.gamma_plus(i) + epsilon <= self.gamma_minus(i)
                && self.beta_plus(i) >= self.beta_minus(i) + epsilon;
            !ok || !self.node(i).iter().all(|v| v.is_finite())
        })
    }
}

/// Log-odds entry for one pair. Shared by the matrix builder and the fused
/// likelihood paths so they produce bit-identical values.
#[inline]
pub(crate) fn theta_entry(g_i: f64, g_j: f64, e_i: f64, e_j: f64, same_community: bool) -> f64 {
    if same_community {
        (g_i + g_j) + (e_i + e_j)
    } else {
        g_i + g_j
    }
}

/// Stable multinomial probabilities (p+, p-, p0) for one pair.
///
/// The max is subtracted before exponentiation, and p0 is the ratio
/// exp(-m)/denominator rather than 1 - p+ - p-, so all three components
/// stay nonnegative for |theta| up to ~700.
#[inline]
pub(crate) fn prob_pair(theta_plus: f64, theta_minus: f64) -> (f64, f64, f64) {
    let m = theta_plus.max(theta_minus).max(0.0);
    let e0 = (-m).exp();
    let ep = (theta_plus - m).exp();
    let em = (theta_minus - m).exp();
    // Grouping (ep + em) first keeps the computation exactly symmetric
    // under swapping the positive and negative channels.
    let denom = e0 + (ep + em);
    (ep / denom, em / denom, e0 / denom)
}

/// The pair of symmetric log-odds matrices (Theta+, Theta-).
#[derive(Debug, Clone)]
pub struct ThetaPair {
    plus: Array2<f64>,
    minus: Array2<f64>,
}

impl ThetaPair {
    /// Validates shape, symmetry and finiteness.
    pub fn new(plus: Array2<f64>, minus: Array2<f64>) -> Result<Self> {
        if plus.dim() != minus.dim() || plus.nrows() != plus.ncols() {
            return Err(Error::DimensionMismatch {
                context: "ThetaPair::new",
                expected: plus.nrows(),
                got: minus.nrows(),
            });
        }
        let n = plus.nrows();
        for m in [&plus, &minus] {
            for i in 0..n {
                for j in i..n {
                    if !m[[i, j]].is_finite() {
                        return Err(Error::NonFinite("ThetaPair"));
                    }
                    if m[[i, j]] != m[[j, i]] {
                        return Err(Error::Asymmetric { row: i, col: j });
                    }
                }
            }
        }
        Ok(Self { plus, minus })
    }

    pub(crate) fn from_parts_unchecked(plus: Array2<f64>, minus: Array2<f64>) -> Self {
        Self { plus, minus }
    }

    pub fn n(&self) -> usize {
        self.plus.nrows()
    }

    pub fn plus(&self) -> &Array2<f64> {
        &self.plus
    }

    pub fn minus(&self) -> &Array2<f64> {
        &self.minus
    }
}

/// Multinomial probabilities of one pair: positive, negative, absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTriple {
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_zero: f64,
}

/// Builds (Theta+, Theta-) from params and membership.
pub fn build_theta(params: &NodeParams, membership: &Membership) -> Result<ThetaPair> {
    let n = params.n();
    if membership.n() != n {
        return Err(Error::DimensionMismatch {
            context: "build_theta",
            expected: n,
            got: membership.n(),
        });
    }
    let mut plus = Array2::<f64>::zeros((n, n));
    let mut minus = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let same = membership.same_community(i, j);
            let tp = theta_entry(
                params.gamma_plus(i),
                params.gamma_plus(j),
                params.eta_plus(i),
                params.eta_plus(j),
                same,
            );
            let tm = theta_entry(
                params.gamma_minus(i),
                params.gamma_minus(j),
                params.eta_minus(i),
                params.eta_minus(j),
                same,
            );
            plus[[i, j]] = tp;
            plus[[j, i]] = tp;
            minus[[i, j]] = tm;
            minus[[j, i]] = tm;
        }
    }
    Ok(ThetaPair::from_parts_unchecked(plus, minus))
}

/// Multinomial probabilities for a single pair of log-odds.
pub fn prob_triple(theta_plus: f64, theta_minus: f64) -> Result<ProbTriple> {
    if !theta_plus.is_finite() || !theta_minus.is_finite() {
        return Err(Error::NonFinite("prob_triple"));
    }
    let (p_plus, p_minus, p_zero) = prob_pair(theta_plus, theta_minus);
    Ok(ProbTriple { p_plus, p_minus, p_zero })
}

/// Elementwise edge-probability matrices (P+, P-) for a theta pair.
pub fn prob_matrices(theta: &ThetaPair) -> (Array2<f64>, Array2<f64>) {
    let n = theta.n();
    let mut plus = Array2::<f64>::zeros((n, n));
    let mut minus = Array2::<f64>::zeros((n, n));
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rp = vec![0.0; n];
            let mut rm = vec![0.0; n];
            for j in 0..n {
                let (pp, pm, _) = prob_pair(theta.plus()[[i, j]], theta.minus()[[i, j]]);
                rp[j] = pp;
                rm[j] = pm;
            }
            (rp, rm)
        })
        .collect();
    for (i, (rp, rm)) in rows.into_iter().enumerate() {
        for j in 0..n {
            plus[[i, j]] = rp[j];
            minus[[i, j]] = rm[j];
        }
    }
    (plus, minus)
}
