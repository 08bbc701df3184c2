//! Seeded synthetic signed-network generators.
//!
//! Three benchmark families plus a generic sampler for arbitrary feasible
//! parameters. Every generator returns the drawn adjacency together with
//! the exact ground truth (labels, edge-probability matrices, and the
//! parameters when the family is parameterized that way).
//!
//! All draws come from counter-based streams keyed by `(seed, purpose,
//! node-or-pair index)`, so growing `n` extends earlier draws instead of
//! reshuffling them and pair sampling is safe to parallelize.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    prob_pair, theta_entry, DiagonalPolicy, Membership, NodeParams, SignedAdjacency,
};
use crate::rng::{pair_index, stream_rng, Stream};

/// Latent-type generator configuration (strong-balanced networks).
#[derive(Debug, Clone, Copy)]
pub struct Example1Config {
    pub n: usize,
    /// Global sparsity offset; larger means denser.
    pub mu: f64,
    pub seed: u64,
}

/// Heterogeneous block generator configuration (weak-balanced networks).
#[derive(Debug, Clone, Copy)]
pub struct Example23Config {
    pub n: usize,
    pub k: usize,
    /// Location of the normal draws for beta- and gamma-.
    pub mean_beta: f64,
    /// Their variance.
    pub var_beta: f64,
    /// The within/cross gap delta_i is uniform on (0, delta_max).
    pub delta_max: f64,
    pub seed: u64,
}

impl Example23Config {
    /// The community-count benchmark: beta-, gamma- ~ N(-7/2, 9).
    pub fn example2(n: usize, k: usize, seed: u64) -> Self {
        Self { n, k, mean_beta: -3.5, var_beta: 9.0, delta_max: 2.0, seed }
    }

    /// The heterogeneity benchmark: K = 4, beta-, gamma- ~ N(-3, sigma^2).
    pub fn example3(n: usize, sigma2: f64, seed: u64) -> Self {
        Self { n, k: 4, mean_beta: -3.0, var_beta: sigma2, delta_max: 2.0, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n < self.k {
            return Err(Error::InvalidCommunityCount { k: self.k, n: self.n });
        }
        if !(self.var_beta > 0.0) || !(self.delta_max > 0.0) {
            return Err(Error::InvalidConfig(
                "var_beta and delta_max must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Exact population quantities behind a sampled network.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub membership: Membership,
    pub p_plus: Array2<f64>,
    pub p_minus: Array2<f64>,
    /// Present when the generator is parameterized by node quadruples.
    pub params: Option<NodeParams>,
}

/// A sampled network with its generating truth.
#[derive(Debug, Clone)]
pub struct SampleOutput {
    pub adjacency: SignedAdjacency,
    pub truth: GroundTruth,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Draws one signed entry from (p+, p-) using the pair's own stream.
#[inline]
fn draw_sign(seed: u64, i: usize, j: usize, p_plus: f64, p_minus: f64) -> i8 {
    let mut rng = stream_rng(seed, Stream::Edges, pair_index(i, j));
    let u: f64 = rng.random();
    if u < p_plus {
        1
    } else if u < p_plus + p_minus {
        -1
    } else {
        0
    }
}

fn sample_from_probs(
    p_plus: &Array2<f64>,
    p_minus: &Array2<f64>,
    seed: u64,
    diagonal_policy: DiagonalPolicy,
) -> Result<SignedAdjacency> {
    let n = p_plus.nrows();
    let include_diag = diagonal_policy.includes_diagonal();
    let rows: Vec<Vec<i8>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = if include_diag { i } else { i + 1 };
            (lo..n)
                .map(|j| draw_sign(seed, i, j, p_plus[[i, j]], p_minus[[i, j]]))
                .collect()
        })
        .collect();
    let mut entries = Array2::<i8>::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        let lo = if include_diag { i } else { i + 1 };
        for (offset, v) in row.into_iter().enumerate() {
            let j = lo + offset;
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    SignedAdjacency::new(entries, diagonal_policy)
}

/// Samples a network from explicit feasible parameters and memberships.
pub fn sample_sbbm(
    params: &NodeParams,
    membership: &Membership,
    seed: u64,
    diagonal_policy: DiagonalPolicy,
) -> Result<SampleOutput> {
    if params.n() != membership.n() {
        return Err(Error::DimensionMismatch {
            context: "sample_sbbm",
            expected: params.n(),
            got: membership.n(),
        });
    }
    params.check_feasible(0.0)?;
    let n = params.n();
    let mut p_plus = Array2::<f64>::zeros((n, n));
    let mut p_minus = Array2::<f64>::zeros((n, n));
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
            let (pp, pm, _) = prob_pair(tp, tm);
            p_plus[[i, j]] = pp;
            p_plus[[j, i]] = pp;
            p_minus[[i, j]] = pm;
            p_minus[[j, i]] = pm;
        }
    }
    let adjacency = sample_from_probs(&p_plus, &p_minus, seed, diagonal_policy)?;
    Ok(SampleOutput {
        adjacency,
        truth: GroundTruth {
            membership: membership.clone(),
            p_plus,
            p_minus,
            params: Some(params.clone()),
        },
    })
}

/// Latent-type strong-balance generator.
///
/// Each node draws a type row (1,0) or (0,1) with equal probability and an
/// intercept alpha_i ~ Unif(1, 3). With X* the column-centered type matrix,
/// v_i proportional to the centered type contrast, and sigma the logistic
/// function, an edge appears with probability
/// `sigma(mu + alpha_i + alpha_j - 2*mean(alpha) + <x*_i, x*_j>)` and is
/// positive with conditional probability `sigma(v_i v_j)`.
pub fn gen_example1(cfg: &Example1Config) -> Result<SampleOutput> {
    if cfg.n < 2 {
        return Err(Error::InvalidConfig("example 1 needs n >= 2".into()));
    }
    let n = cfg.n;
    let types: Vec<bool> = (0..n)
        .map(|i| stream_rng(cfg.seed, Stream::CovariateRows, i as u64).random::<bool>())
        .collect();
    let alphas: Vec<f64> = (0..n)
        .map(|i| stream_rng(cfg.seed, Stream::Intercepts, i as u64).random_range(1.0..3.0))
        .collect();

    // Column-center the type matrix X whose rows are (1,0) or (0,1).
    let frac_first = types.iter().filter(|&&t| t).count() as f64 / n as f64;
    let centered: Vec<[f64; 2]> = types
        .iter()
        .map(|&t| {
            let row = if t { [1.0, 0.0] } else { [0.0, 1.0] };
            [row[0] - frac_first, row[1] - (1.0 - frac_first)]
        })
        .collect();
    let v: Vec<f64> = centered.iter().map(|x| (x[0] - x[1]) / 2f64.sqrt()).collect();
    let alpha_bar = alphas.iter().sum::<f64>() / n as f64;

    let mut p_plus = Array2::<f64>::zeros((n, n));
    let mut p_minus = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let inner = centered[i][0] * centered[j][0] + centered[i][1] * centered[j][1];
            let p_edge = sigmoid(cfg.mu + alphas[i] + alphas[j] - 2.0 * alpha_bar + inner);
            let p_sign = sigmoid(v[i] * v[j]);
            p_plus[[i, j]] = p_edge * p_sign;
            p_plus[[j, i]] = p_plus[[i, j]];
            p_minus[[i, j]] = p_edge * (1.0 - p_sign);
            p_minus[[j, i]] = p_minus[[i, j]];
        }
    }

    // Two-stage draw: edge presence, then conditional sign.
    let rows: Vec<Vec<i8>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    let mut rng = stream_rng(cfg.seed, Stream::Edges, pair_index(i, j));
                    let inner =
                        centered[i][0] * centered[j][0] + centered[i][1] * centered[j][1];
                    let p_edge =
                        sigmoid(cfg.mu + alphas[i] + alphas[j] - 2.0 * alpha_bar + inner);
                    if rng.random::<f64>() >= p_edge {
                        0
                    } else if rng.random::<f64>() < sigmoid(v[i] * v[j]) {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect();
    let mut entries = Array2::<i8>::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, val) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            entries[[i, j]] = val;
            entries[[j, i]] = val;
        }
    }
    let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Exclude)?;
    let membership = Membership::new(types.iter().map(|&t| usize::from(t)).collect(), 2)?;
    Ok(SampleOutput {
        adjacency,
        truth: GroundTruth { membership, p_plus, p_minus, params: None },
    })
}

fn gen_heterogeneous_blocks(cfg: &Example23Config) -> Result<SampleOutput> {
    cfg.validate()?;
    let n = cfg.n;
    let normal = Normal::new(cfg.mean_beta, cfg.var_beta.sqrt())
        .map_err(|e| Error::InvalidConfig(format!("invalid normal parameters: {e}")))?;
    let mut gamma_plus = vec![0.0; n];
    let mut eta_plus = vec![0.0; n];
    let mut gamma_minus = vec![0.0; n];
    let mut eta_minus = vec![0.0; n];
    for i in 0..n {
        let mut rng = stream_rng(cfg.seed, Stream::NodeParams, i as u64);
        let beta_m: f64 = normal.sample(&mut rng);
        let gamma_m: f64 = normal.sample(&mut rng);
        let delta: f64 = rng.random_range(0.0..cfg.delta_max);
        // beta+ = beta- + delta, gamma+ = gamma- - delta.
        gamma_plus[i] = gamma_m - delta;
        eta_plus[i] = beta_m - gamma_m + 2.0 * delta;
        gamma_minus[i] = gamma_m;
        eta_minus[i] = beta_m - gamma_m;
    }
    let params = NodeParams::from_vectors(&gamma_plus, &eta_plus, &gamma_minus, &eta_minus)?;
    let labels: Vec<usize> = (0..n)
        .map(|i| stream_rng(cfg.seed, Stream::Labels, i as u64).random_range(0..cfg.k))
        .collect();
    let membership = Membership::new(labels, cfg.k)?;
    sample_sbbm(&params, &membership, cfg.seed, DiagonalPolicy::Exclude)
}

/// Weak-balanced benchmark varying the number of communities.
pub fn gen_example2(cfg: &Example23Config) -> Result<SampleOutput> {
    gen_heterogeneous_blocks(cfg)
}

/// Weak-balanced benchmark varying the node heterogeneity.
pub fn gen_example3(cfg: &Example23Config) -> Result<SampleOutput> {
    gen_heterogeneous_blocks(cfg)
}
