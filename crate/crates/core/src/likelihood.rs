//! Normalized negative log-likelihood of the signed block beta-model and
//! its analytic gradient with respect to (gamma+, eta+, gamma-, eta-).
//!
//! The objective averages the per-pair multinomial losses
//!
//! ```text
//! l_ij = -a+_ij theta+_ij - a-_ij theta-_ij + log(1 + exp(theta+_ij) + exp(theta-_ij))
//! ```
//!
//! over the pair set selected by the diagonal policy. Pair sums are
//! computed as per-row partials that are then added in row order, so the
//! result is bit-identical no matter how many threads participate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    prob_pair, theta_entry, Membership, NodeParams, SignedAdjacency, ThetaPair, EM, EP, GM, GP,
};

/// Value of the normalized objective together with the number of pairs summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NllValue {
    pub value: f64,
    pub pair_count: usize,
}

/// Objective gradient, laid out exactly like [`NodeParams`].
#[derive(Debug, Clone)]
pub struct Gradient {
    data: Vec<f64>,
}

impl Gradient {
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

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

/// Stable per-pair loss. `a` is the observed sign in {-1, 0, +1}.
#[inline]
pub(crate) fn pair_loss(theta_plus: f64, theta_minus: f64, a: i8) -> f64 {
    let m = theta_plus.max(theta_minus).max(0.0);
    let lse = m + ((-m).exp() + ((theta_plus - m).exp() + (theta_minus - m).exp())).ln();
    match a {
        1 => lse - theta_plus,
        -1 => lse - theta_minus,
        _ => lse,
    }
}

fn check_shapes(context: &'static str, n_adj: usize, n_other: usize) -> Result<()> {
    if n_adj != n_other {
        return Err(Error::DimensionMismatch { context, expected: n_adj, got: n_other });
    }
    Ok(())
}

/// Sums per-row partials in row order. `row_sum(i)` must itself be a
/// sequential sum so the total is independent of the thread count.
fn pair_sum<F>(n: usize, row_sum: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let rows: Vec<f64> = (0..n).into_par_iter().map(row_sum).collect();
    rows.iter().sum()
}

/// Normalized negative log-likelihood of an explicit theta pair.
pub fn nll(adjacency: &SignedAdjacency, theta: &ThetaPair) -> Result<NllValue> {
    let n = adjacency.n();
    check_shapes("nll", n, theta.n())?;
    let include_diag = adjacency.diagonal_policy().includes_diagonal();
    let total = pair_sum(n, |i| {
        let lo = if include_diag { i } else { i + 1 };
        let mut s = 0.0;
        for j in lo..n {
            s += pair_loss(theta.plus()[[i, j]], theta.minus()[[i, j]], adjacency.entry(i, j));
        }
        s
    });
    if !total.is_finite() {
        return Err(Error::NonFinite("nll"));
    }
    let pair_count = adjacency.pair_count();
    Ok(NllValue { value: total / pair_count as f64, pair_count })
}

/// Same objective evaluated directly from params and membership.
///
/// Bit-identical to `nll(adjacency, &build_theta(params, membership)?)`:
/// the per-pair log-odds come from the same expression and the pairs are
/// accumulated in the same order.
pub fn nll_of_params(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    membership: &Membership,
) -> Result<NllValue> {
    let n = adjacency.n();
    check_shapes("nll_of_params", n, params.n())?;
    check_shapes("nll_of_params", n, membership.n())?;
    let include_diag = adjacency.diagonal_policy().includes_diagonal();
    let total = pair_sum(n, |i| {
        let lo = if include_diag { i } else { i + 1 };
        let mut s = 0.0;
        for j in lo..n {
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
            s += pair_loss(tp, tm, adjacency.entry(i, j));
        }
        s
    });
    if !total.is_finite() {
        return Err(Error::NonFinite("nll_of_params"));
    }
    let pair_count = adjacency.pair_count();
    Ok(NllValue { value: total / pair_count as f64, pair_count })
}

/// Analytic gradient of [`nll_of_params`].
///
/// The per-pair score is p± - a±; gamma entries collect it over the whole
/// row, eta entries only over same-community partners, and an included
/// self-pair contributes with multiplicity two.
pub fn gradient(
    adjacency: &SignedAdjacency,
    params: &NodeParams,
    membership: &Membership,
) -> Result<Gradient> {
    let n = adjacency.n();
    check_shapes("gradient", n, params.n())?;
    check_shapes("gradient", n, membership.n())?;
    let include_diag = adjacency.diagonal_policy().includes_diagonal();
    let scale = 1.0 / adjacency.pair_count() as f64;

    let per_node: Vec<[f64; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let gi_p = params.gamma_plus(i);
            let ei_p = params.eta_plus(i);
            let gi_m = params.gamma_minus(i);
            let ei_m = params.eta_minus(i);
            let mut d = [0.0f64; 4];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let same = membership.same_community(i, j);
                let tp = theta_entry(gi_p, params.gamma_plus(j), ei_p, params.eta_plus(j), same);
                let tm =
                    theta_entry(gi_m, params.gamma_minus(j), ei_m, params.eta_minus(j), same);
                let (pp, pm, _) = prob_pair(tp, tm);
                let a = adjacency.entry(i, j);
                let rp = pp - f64::from(a == 1);
                let rm = pm - f64::from(a == -1);
                d[GP] += rp;
                d[GM] += rm;
                if same {
                    d[EP] += rp;
                    d[EM] += rm;
                }
            }
            if include_diag {
                let tp = theta_entry(gi_p, gi_p, ei_p, ei_p, true);
                let tm = theta_entry(gi_m, gi_m, ei_m, ei_m, true);
                let (pp, pm, _) = prob_pair(tp, tm);
                let a = adjacency.entry(i, i);
                let rp = pp - f64::from(a == 1);
                let rm = pm - f64::from(a == -1);
                d[GP] += 2.0 * rp;
                d[EP] += 2.0 * rp;
                d[GM] += 2.0 * rm;
                d[EM] += 2.0 * rm;
            }
            [d[0] * scale, d[1] * scale, d[2] * scale, d[3] * scale]
        })
        .collect();

    let mut data = Vec::with_capacity(4 * n);
    for d in per_node {
        data.extend_from_slice(&d);
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(Gradient { data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_theta, DiagonalPolicy};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_instance(
        n: usize,
        k: usize,
        policy: DiagonalPolicy,
        rng: &mut ChaCha8Rng,
    ) -> (SignedAdjacency, NodeParams, Membership) {
        let mut entries = Array2::<i8>::zeros((n, n));
        let lo_offset = usize::from(!policy.includes_diagonal());
        for i in 0..n {
            for j in (i + lo_offset)..n {
                let v = match rng.random_range(0..3u8) {
                    0 => 1,
                    1 => -1,
                    _ => 0,
                };
                entries[[i, j]] = v;
                entries[[j, i]] = v;
            }
        }
        let adjacency = SignedAdjacency::new(entries, policy).unwrap();
        let data: Vec<f64> = (0..4 * n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let params = NodeParams::from_flat(data);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let membership = Membership::new(labels, k).unwrap();
        (adjacency, params, membership)
    }

    #[test]
    fn zero_theta_gives_log3() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for policy in [DiagonalPolicy::Include, DiagonalPolicy::Exclude] {
            let (adjacency, _, membership) = random_instance(6, 2, policy, &mut rng);
            let params = NodeParams::zeros(6);
            let v = nll_of_params(&adjacency, &params, &membership).unwrap();
            assert_abs_diff_eq!(v.value, 3.0f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn single_node_hand_value() {
        let mut entries = Array2::<i8>::zeros((1, 1));
        entries[[0, 0]] = 1;
        let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Include).unwrap();
        let theta = ThetaPair::new(
            Array2::from_elem((1, 1), 1.0),
            Array2::from_elem((1, 1), 0.0),
        )
        .unwrap();
        let v = nll(&adjacency, &theta).unwrap();
        assert_eq!(v.pair_count, 1);
        assert_abs_diff_eq!(v.value, -1.0 + (2.0 + std::f64::consts::E).ln(), epsilon = 1e-12);
    }

    #[test]
    fn all_positive_pairs_loss_vanishes_in_the_limit() {
        let n = 4;
        let mut entries = Array2::<i8>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries[[i, j]] = 1;
                }
            }
        }
        let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Exclude).unwrap();
        let mut prev = f64::INFINITY;
        for tp in [1.0, 5.0, 10.0, 30.0] {
            let theta = ThetaPair::new(
                Array2::from_elem((n, n), tp),
                Array2::from_elem((n, n), 0.0),
            )
            .unwrap();
            let v = nll(&adjacency, &theta).unwrap().value;
            assert!(v < prev, "objective must decrease as theta+ grows");
            prev = v;
        }
        assert!(prev <= 1e-12);
    }

    #[test]
    fn fused_path_matches_composition_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for policy in [DiagonalPolicy::Include, DiagonalPolicy::Exclude] {
            for _ in 0..20 {
                let (adjacency, params, membership) = random_instance(8, 3, policy, &mut rng);
                let theta = build_theta(&params, &membership).unwrap();
                let a = nll(&adjacency, &theta).unwrap();
                let b = nll_of_params(&adjacency, &params, &membership).unwrap();
                assert_eq!(a.value.to_bits(), b.value.to_bits());
                assert_eq!(a.pair_count, b.pair_count);
            }
        }
    }

    #[test]
    fn gradient_single_node_hand_value() {
        let entries = Array2::<i8>::zeros((1, 1));
        let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Include).unwrap();
        let params = NodeParams::zeros(1);
        let membership = Membership::new(vec![0], 1).unwrap();
        let g = gradient(&adjacency, &params, &membership).unwrap();
        assert_abs_diff_eq!(g.gamma_plus(0), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.eta_plus(0), 2.0 / 3.0, epsilon = 1e-15);
    }

    fn finite_difference_gradient(
        adjacency: &SignedAdjacency,
        params: &NodeParams,
        membership: &Membership,
        h: f64,
    ) -> Vec<f64> {
        let flat = params.as_flat().to_vec();
        (0..flat.len())
            .map(|idx| {
                let mut plus = flat.clone();
                let mut minus = flat.clone();
                plus[idx] += h;
                minus[idx] -= h;
                let fp = nll_of_params(adjacency, &NodeParams::from_flat(plus), membership)
                    .unwrap()
                    .value;
                let fm = nll_of_params(adjacency, &NodeParams::from_flat(minus), membership)
                    .unwrap()
                    .value;
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for policy in [DiagonalPolicy::Include, DiagonalPolicy::Exclude] {
            let (adjacency, params, membership) = random_instance(10, 3, policy, &mut rng);
            let g = gradient(&adjacency, &params, &membership).unwrap();
            let fd = finite_difference_gradient(&adjacency, &params, &membership, 1e-5);
            let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (ga, gf) in g.as_flat().iter().zip(&fd) {
                assert!((ga - gf).abs() <= 1e-6 * scale.max(1e-8));
            }
        }
    }

    #[test]
    fn sign_swap_swaps_gradient_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (adjacency, params, membership) =
            random_instance(7, 2, DiagonalPolicy::Exclude, &mut rng);
        let swapped_entries = adjacency.entries().mapv(|v| -v);
        let swapped_adj =
            SignedAdjacency::new(swapped_entries, DiagonalPolicy::Exclude).unwrap();
        let swapped_params = NodeParams::from_vectors(
            &params.gamma_minus_vec(),
            &params.eta_minus_vec(),
            &params.gamma_plus_vec(),
            &params.eta_plus_vec(),
        )
        .unwrap();
        let g = gradient(&adjacency, &params, &membership).unwrap();
        let gs = gradient(&swapped_adj, &swapped_params, &membership).unwrap();
        for i in 0..params.n() {
            assert_eq!(g.gamma_plus(i).to_bits(), gs.gamma_minus(i).to_bits());
            assert_eq!(g.eta_plus(i).to_bits(), gs.eta_minus(i).to_bits());
            assert_eq!(g.gamma_minus(i).to_bits(), gs.gamma_plus(i).to_bits());
            assert_eq!(g.eta_minus(i).to_bits(), gs.eta_plus(i).to_bits());
        }
    }

    #[test]
    fn objective_is_convex_in_params_for_fixed_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (adjacency, x, membership) =
                random_instance(6, 2, DiagonalPolicy::Exclude, &mut rng);
            let y = NodeParams::from_flat(
                (0..4 * 6).map(|_| rng.random_range(-1.5..1.5)).collect(),
            );
            let t: f64 = rng.random_range(0.05..0.95);
            let mix = NodeParams::from_flat(
                x.as_flat()
                    .iter()
                    .zip(y.as_flat())
                    .map(|(a, b)| t * a + (1.0 - t) * b)
                    .collect(),
            );
            let fx = nll_of_params(&adjacency, &x, &membership).unwrap().value;
            let fy = nll_of_params(&adjacency, &y, &membership).unwrap().value;
            let fmix = nll_of_params(&adjacency, &mix, &membership).unwrap().value;
            assert!(fmix <= t * fx + (1.0 - t) * fy + 1e-10);
        }
    }
}
