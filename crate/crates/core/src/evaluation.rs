//! Partition and probability metrics, the triad census, signed modularity,
//! and the population balance checkers.

use ndarray::Array2;
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fitter::spectral_init;
use crate::model::{Membership, SignedAdjacency};

/// Pair-counting clustering error: the fraction of node pairs on which two
/// partitions disagree about co-membership. Invariant to label names.
pub fn clustering_error(psi_hat: &[usize], psi_star: &[usize]) -> Result<f64> {
    let n = psi_hat.len();
    if psi_star.len() != n {
        return Err(Error::DimensionMismatch {
            context: "clustering_error",
            expected: n,
            got: psi_star.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidConfig("clustering_error needs n >= 2".into()));
    }
    let mut disagreements = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let together_hat = psi_hat[i] == psi_hat[j];
            let together_star = psi_star[i] == psi_star[j];
            if together_hat != together_star {
                disagreements += 1;
            }
        }
    }
    Ok(2.0 * disagreements as f64 / (n * (n - 1)) as f64)
}

/// Permutation-matched membership error: `min_P ||Z_hat P - Z*||_F^2 / n`,
/// i.e. twice the minimal fraction of misclassified nodes. The minimum
/// over permutations is computed exactly by optimal assignment on the
/// KxK label-overlap matrix.
pub fn membership_error(hat: &Membership, star: &Membership) -> Result<f64> {
    let n = hat.n();
    if star.n() != n {
        return Err(Error::DimensionMismatch {
            context: "membership_error",
            expected: n,
            got: star.n(),
        });
    }
    if hat.k() != star.k() {
        return Err(Error::DimensionMismatch {
            context: "membership_error (community counts)",
            expected: hat.k(),
            got: star.k(),
        });
    }
    let k = hat.k();
    let mut overlap = vec![vec![0i64; k]; k];
    for i in 0..n {
        overlap[hat.label(i)][star.label(i)] += 1;
    }
    let weights = Matrix::from_rows(overlap).expect("square overlap matrix");
    let (agreement, _) = kuhn_munkres(&weights);
    let misclassified = n as i64 - agreement;
    Ok(2.0 * misclassified as f64 / n as f64)
}

/// Relative squared Frobenius error `||P_hat - P*||_F^2 / ||P*||_F^2`.
pub fn prob_error(p_hat: &Array2<f64>, p_star: &Array2<f64>) -> Result<f64> {
    if p_hat.dim() != p_star.dim() {
        return Err(Error::DimensionMismatch {
            context: "prob_error",
            expected: p_star.nrows(),
            got: p_hat.nrows(),
        });
    }
    let denom: f64 = p_star.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::ZeroNormTruth);
    }
    let num: f64 = p_hat
        .iter()
        .zip(p_star.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(num / denom)
}

/// Signed modularity of a labeling: the modularity of the positive
/// subgraph minus the modularity of the negative subgraph. A term whose
/// edge class is empty contributes zero.
pub fn signed_modularity(adjacency: &SignedAdjacency, labels: &[usize]) -> Result<f64> {
    let n = adjacency.n();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "signed_modularity",
            expected: n,
            got: labels.len(),
        });
    }
    let mut degree_plus = vec![0.0f64; n];
    let mut degree_minus = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..n {
            match adjacency.entry(i, j) {
                1 => degree_plus[i] += 1.0,
                -1 => degree_minus[i] += 1.0,
                _ => {}
            }
        }
    }
    let two_m_plus: f64 = degree_plus.iter().sum();
    let two_m_minus: f64 = degree_minus.iter().sum();
    if two_m_plus + two_m_minus == 0.0 {
        return Err(Error::NoEdges);
    }

    let class_term = |two_m: f64, degree: &[f64], positive: bool| -> f64 {
        if two_m == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] != labels[j] {
                    continue;
                }
                let a = adjacency.entry(i, j);
                let observed = f64::from(if positive { a == 1 } else { a == -1 });
                sum += observed - degree[i] * degree[j] / two_m;
            }
        }
        sum / two_m
    };

    Ok(class_term(two_m_plus, &degree_plus, true) - class_term(two_m_minus, &degree_minus, false))
}

/// Counts of the four fully-connected triple configurations, by number of
/// positive edges: 3 (A), 2 (B), 1 (C), 0 (D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TriadCensus {
    pub type_a: usize,
    pub type_b: usize,
    pub type_c: usize,
    pub type_d: usize,
}

impl TriadCensus {
    /// Triads compatible with a two-faction split.
    pub fn strong_balanced(&self) -> usize {
        self.type_a + self.type_c
    }

    /// All-hostile triads: weak-balanced but not strong-balanced.
    pub fn weak_only(&self) -> usize {
        self.type_d
    }

    pub fn unbalanced(&self) -> usize {
        self.type_b
    }

    pub fn total(&self) -> usize {
        self.type_a + self.type_b + self.type_c + self.type_d
    }
}

/// Classifies every triple whose three edges are all present.
///
/// Neighbor-intersection implementation: for each node i, scan pairs of
/// its larger-indexed neighbors and test the closing edge, so the cost is
/// O(n d^2) rather than O(n^3).
pub fn triad_census(adjacency: &SignedAdjacency) -> TriadCensus {
    let n = adjacency.n();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| ((i + 1)..n).filter(|&j| adjacency.entry(i, j) != 0).collect())
        .collect();
    let per_node: Vec<[usize; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut counts = [0usize; 4];
            let nbrs = &neighbors[i];
            for (a, &j) in nbrs.iter().enumerate() {
                for &k in &nbrs[(a + 1)..] {
                    let closing = adjacency.entry(j, k);
                    if closing == 0 {
                        continue;
                    }
                    let positives = usize::from(adjacency.entry(i, j) == 1)
                        + usize::from(adjacency.entry(i, k) == 1)
                        + usize::from(closing == 1);
                    counts[positives] += 1;
                }
            }
            counts
        })
        .collect();
    let mut totals = [0usize; 4];
    for c in per_node {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    TriadCensus { type_a: totals[3], type_b: totals[2], type_c: totals[1], type_d: totals[0] }
}

/// Verdict classes of the population balance checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceClass {
    Strong,
    Weak,
    Unbalanced,
}

/// Evidence for an `Unbalanced` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceWitness {
    /// A pair whose positive and negative probabilities tie within tolerance.
    TiedPair(usize, usize),
    /// A triple violating the partition structure (exactly two preferred-
    /// positive pairs).
    Triple(usize, usize, usize),
}

/// Result of the population balance check.
#[derive(Debug, Clone)]
pub struct BalanceVerdict {
    pub class: BalanceClass,
    /// Recovered communities when balanced: 0-based blocks, numbered by
    /// first appearance.
    pub partition: Option<Vec<usize>>,
    pub witness: Option<BalanceWitness>,
}

/// Checks strong/weak balance of a population (P+, P-).
///
/// Builds the preference relation `i ~ j  <=>  p+_ij - p-_ij > tol` over
/// off-diagonal pairs. The population is balanced exactly when no pair ties
/// within `tol` and the relation is a disjoint union of cliques; it is
/// strong-balanced when those cliques number at most two.
pub fn check_balance_population(
    p_plus: &Array2<f64>,
    p_minus: &Array2<f64>,
    tol: f64,
) -> Result<BalanceVerdict> {
    let n = p_plus.nrows();
    if p_plus.dim() != p_minus.dim() || p_plus.ncols() != n || p_minus.ncols() != p_minus.nrows() {
        return Err(Error::DimensionMismatch {
            context: "check_balance_population",
            expected: n,
            got: p_minus.nrows(),
        });
    }
    for m in [p_plus, p_minus] {
        for i in 0..n {
            for j in (i + 1)..n {
                if m[[i, j]] != m[[j, i]] {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
        }
    }

    // Ties break the strict-inequality structure outright.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = p_plus[[i, j]] - p_minus[[i, j]];
            if d.abs() <= tol {
                return Ok(BalanceVerdict {
                    class: BalanceClass::Unbalanced,
                    partition: None,
                    witness: Some(BalanceWitness::TiedPair(i, j)),
                });
            }
        }
    }

    let prefers_positive =
        |i: usize, j: usize| -> bool { p_plus[[i, j]] - p_minus[[i, j]] > tol };

    // Connected components of the preference relation.
    let mut component = vec![usize::MAX; n];
    let mut blocks = 0usize;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = blocks;
        blocks += 1;
        let mut stack = vec![start];
        component[start] = id;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j != i && component[j] == usize::MAX && prefers_positive(i, j) {
                    component[j] = id;
                    stack.push(j);
                }
            }
        }
    }

    // Balanced iff components are cliques: any same-component pair that is
    // not directly positive yields a two-positive-edge triple along a
    // shortest positive path.
    for i in 0..n {
        for j in (i + 1)..n {
            if component[i] == component[j] && !prefers_positive(i, j) {
                let witness = two_positive_triple(i, j, n, &prefers_positive);
                return Ok(BalanceVerdict {
                    class: BalanceClass::Unbalanced,
                    partition: None,
                    witness: Some(witness),
                });
            }
        }
    }

    let class = if blocks <= 2 { BalanceClass::Strong } else { BalanceClass::Weak };
    Ok(BalanceVerdict { class, partition: Some(component), witness: None })
}

/// Finds a triple with exactly two preferred-positive pairs certifying that
/// the relation is not transitive between i and j (which are positive-
/// connected but not directly positive).
fn two_positive_triple(
    i: usize,
    j: usize,
    n: usize,
    prefers_positive: &dyn Fn(usize, usize) -> bool,
) -> BalanceWitness {
    // Common neighbor first.
    for k in 0..n {
        if k != i && k != j && prefers_positive(i, k) && prefers_positive(k, j) {
            return BalanceWitness::Triple(i, k, j);
        }
    }
    // Otherwise walk a shortest positive path from i; its first two steps
    // cannot close into a positive pair, or the path would be shorter.
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([i]);
    parent[i] = i;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if v != u && parent[v] == usize::MAX && prefers_positive(u, v) {
                parent[v] = u;
                queue.push_back(v);
                if v == j {
                    queue.clear();
                    break;
                }
            }
        }
    }
    let mut path = vec![j];
    let mut cur = j;
    while cur != i {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    debug_assert!(path.len() >= 3);
    BalanceWitness::Triple(path[0], path[1], path[2])
}

/// Signed-Laplacian spectral clustering, exposed as a named baseline.
/// Shares its implementation with the fitter's initialization.
pub fn slp_baseline(adjacency: &SignedAdjacency, k: usize, seed: u64) -> Result<Membership> {
    spectral_init(adjacency, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiagonalPolicy;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clustering_error_hand_values() {
        assert_eq!(clustering_error(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 0.0);
        let err = clustering_error(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap();
        assert_abs_diff_eq!(err, 2.0 / 3.0, epsilon = 1e-15);
        // Bijective relabeling changes nothing.
        let err2 = clustering_error(&[1, 0, 1, 0], &[0, 0, 1, 1]).unwrap();
        assert_eq!(err, err2);
        assert!(clustering_error(&[0, 1], &[0, 1, 1]).is_err());
    }

    #[test]
    fn clustering_error_is_symmetric_pseudometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.random_range(2..12usize);
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..3usize)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..3usize)).collect();
            assert_eq!(
                clustering_error(&a, &b).unwrap(),
                clustering_error(&b, &a).unwrap()
            );
            assert_eq!(clustering_error(&a, &a).unwrap(), 0.0);
        }
    }

    #[test]
    fn membership_error_matches_hand_counts() {
        let a = Membership::new(vec![0, 0, 1, 1, 2], 3).unwrap();
        assert_eq!(membership_error(&a, &a).unwrap(), 0.0);
        // Permuted column names still score zero.
        let permuted = Membership::new(vec![2, 2, 0, 0, 1], 3).unwrap();
        assert_eq!(membership_error(&permuted, &a).unwrap(), 0.0);
        // One node flipped out of five: squared Frobenius 2, over n = 5.
        let one_off = Membership::new(vec![0, 0, 1, 1, 0], 3).unwrap();
        assert_abs_diff_eq!(membership_error(&one_off, &a).unwrap(), 2.0 / 5.0, epsilon = 1e-15);
        let other_k = Membership::new(vec![0, 0, 1, 1, 1], 2).unwrap();
        assert!(membership_error(&other_k, &a).is_err());
    }

    #[test]
    fn membership_error_agrees_with_clustering_error_on_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let n = rng.random_range(2..12usize);
            let k = rng.random_range(1..6usize);
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let ma = Membership::new(a.clone(), k).unwrap();
            let mb = Membership::new(b.clone(), k).unwrap();
            let zero_pairs = clustering_error(&a, &b).unwrap() == 0.0;
            let zero_match = membership_error(&ma, &mb).unwrap() == 0.0;
            assert_eq!(zero_pairs, zero_match, "hat {a:?} star {b:?}");
        }
    }

    #[test]
    fn prob_error_hand_values() {
        let star = ndarray::arr2(&[[0.5, 0.25], [0.25, 0.5]]);
        assert_eq!(prob_error(&star, &star).unwrap(), 0.0);
        let zero = Array2::<f64>::zeros((2, 2));
        assert_abs_diff_eq!(prob_error(&zero, &star).unwrap(), 1.0, epsilon = 1e-15);
        let shifted = star.mapv(|v| v + 0.05);
        assert_abs_diff_eq!(prob_error(&shifted, &star).unwrap(), 0.016, epsilon = 1e-15);
        assert!(prob_error(&zero, &zero).is_err());
    }

    fn adjacency_from_edges(n: usize, edges: &[(usize, usize, i8)]) -> SignedAdjacency {
        SignedAdjacency::from_edges(n, edges, DiagonalPolicy::Exclude).unwrap()
    }

    #[test]
    fn signed_modularity_hand_examples() {
        // Perfectly separated: positive within, negative across.
        let adjacency =
            adjacency_from_edges(4, &[(0, 1, 1), (2, 3, 1), (0, 2, -1), (1, 3, -1)]);
        let q = signed_modularity(&adjacency, &[0, 0, 1, 1]).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-12);

        // All-positive triangle in one community: both terms vanish.
        let triangle = adjacency_from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let q = signed_modularity(&triangle, &[0, 0, 0]).unwrap();
        assert_abs_diff_eq!(q, 0.0, epsilon = 1e-12);

        let empty = SignedAdjacency::new(Array2::<i8>::zeros((3, 3)), DiagonalPolicy::Exclude)
            .unwrap();
        assert!(signed_modularity(&empty, &[0, 0, 0]).is_err());
    }

    #[test]
    fn signed_modularity_is_label_name_invariant() {
        let adjacency =
            adjacency_from_edges(5, &[(0, 1, 1), (1, 2, -1), (2, 3, 1), (3, 4, -1), (0, 4, 1)]);
        let q1 = signed_modularity(&adjacency, &[0, 0, 1, 1, 2]).unwrap();
        let q2 = signed_modularity(&adjacency, &[2, 2, 0, 0, 1]).unwrap();
        assert_eq!(q1, q2);
    }

    fn brute_force_census(adjacency: &SignedAdjacency) -> TriadCensus {
        let n = adjacency.n();
        let mut census = TriadCensus::default();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let e1 = adjacency.entry(i, j);
                    let e2 = adjacency.entry(i, k);
                    let e3 = adjacency.entry(j, k);
                    if e1 == 0 || e2 == 0 || e3 == 0 {
                        continue;
                    }
                    match usize::from(e1 == 1) + usize::from(e2 == 1) + usize::from(e3 == 1) {
                        3 => census.type_a += 1,
                        2 => census.type_b += 1,
                        1 => census.type_c += 1,
                        _ => census.type_d += 1,
                    }
                }
            }
        }
        census
    }

    #[test]
    fn census_on_single_triangles() {
        let all_plus = adjacency_from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        assert_eq!(
            triad_census(&all_plus),
            TriadCensus { type_a: 1, type_b: 0, type_c: 0, type_d: 0 }
        );
        let two_plus = adjacency_from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, -1)]);
        let census = triad_census(&two_plus);
        assert_eq!(census.type_b, 1);
        assert_eq!(census.unbalanced(), 1);
        assert_eq!(census.total(), 1);
    }

    #[test]
    fn census_matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let n = rng.random_range(5..31usize);
            let mut entries = Array2::<i8>::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = [1i8, -1, 0, 0][rng.random_range(0..4usize)];
                    entries[[i, j]] = v;
                    entries[[j, i]] = v;
                }
            }
            let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Exclude).unwrap();
            assert_eq!(triad_census(&adjacency), brute_force_census(&adjacency));
        }
    }

    fn population_from_diffs(diffs: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        let n = diffs.nrows();
        let mut p = Array2::<f64>::zeros((n, n));
        let mut m = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                p[[i, j]] = 0.3 + diffs[[i, j]] / 2.0;
                m[[i, j]] = 0.3 - diffs[[i, j]] / 2.0;
            }
        }
        (p, m)
    }

    #[test]
    fn balance_checker_basic_verdicts() {
        // All-positive preferences: one block, strong.
        let n = 5;
        let diffs = Array2::from_elem((n, n), 0.2);
        let (p, m) = population_from_diffs(&diffs);
        let verdict = check_balance_population(&p, &m, 1e-12).unwrap();
        assert_eq!(verdict.class, BalanceClass::Strong);
        assert_eq!(verdict.partition.unwrap(), vec![0; n]);

        // Three blocks: weak.
        let labels = [0, 0, 0, 1, 1, 2];
        let mut diffs = Array2::<f64>::zeros((6, 6));
        for i in 0..6 {
            for j in 0..6 {
                diffs[[i, j]] = if labels[i] == labels[j] { 0.2 } else { -0.2 };
            }
        }
        let (p, m) = population_from_diffs(&diffs);
        let verdict = check_balance_population(&p, &m, 1e-12).unwrap();
        assert_eq!(verdict.class, BalanceClass::Weak);
        let blocks = verdict.partition.unwrap();
        assert_eq!(clustering_error(&blocks, &labels.to_vec()).unwrap(), 0.0);

        // Flip one pair inside the three-node block: unbalanced with a
        // witness triple containing that pair.
        let mut flipped = diffs.clone();
        flipped[[0, 1]] = -0.2;
        flipped[[1, 0]] = -0.2;
        let (p, m) = population_from_diffs(&flipped);
        let verdict = check_balance_population(&p, &m, 1e-12).unwrap();
        assert_eq!(verdict.class, BalanceClass::Unbalanced);
        match verdict.witness {
            Some(BalanceWitness::Triple(a, b, c)) => {
                let set = [a, b, c];
                assert!(set.contains(&0) && set.contains(&1));
            }
            w => panic!("expected a triple witness, got {w:?}"),
        }

        // Tied pair.
        let mut tied = diffs;
        tied[[2, 3]] = 0.0;
        tied[[3, 2]] = 0.0;
        let (p, m) = population_from_diffs(&tied);
        let verdict = check_balance_population(&p, &m, 1e-12).unwrap();
        assert_eq!(verdict.class, BalanceClass::Unbalanced);
        assert_eq!(verdict.witness, Some(BalanceWitness::TiedPair(2, 3)));
    }

    /// Triple-wise check of the local balance conditions; the global
    /// partition test must agree with it on every instance.
    pub(crate) fn local_balance_class(
        p_plus: &Array2<f64>,
        p_minus: &Array2<f64>,
        tol: f64,
    ) -> BalanceClass {
        let n = p_plus.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if (p_plus[[i, j]] - p_minus[[i, j]]).abs() <= tol {
                    return BalanceClass::Unbalanced;
                }
            }
        }
        let sign = |i: usize, j: usize| p_plus[[i, j]] - p_minus[[i, j]] > tol;
        let mut saw_all_negative = false;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let positives =
                        usize::from(sign(i, j)) + usize::from(sign(j, k)) + usize::from(sign(i, k));
                    match positives {
                        2 => return BalanceClass::Unbalanced,
                        0 => saw_all_negative = true,
                        _ => {}
                    }
                }
            }
        }
        if saw_all_negative {
            BalanceClass::Weak
        } else {
            BalanceClass::Strong
        }
    }

    #[test]
    fn global_and_local_balance_tests_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let mut seen = [0usize; 3];
        for trial in 0..1000 {
            let n = rng.random_range(3..8usize);
            let mut diffs = Array2::<f64>::zeros((n, n));
            if trial % 2 == 0 {
                // Planted partition, sometimes corrupted.
                let blocks = rng.random_range(1..4usize);
                let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..blocks)).collect();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d = if labels[i] == labels[j] { 0.2 } else { -0.2 };
                        diffs[[i, j]] = d;
                        diffs[[j, i]] = d;
                    }
                }
                if rng.random::<bool>() {
                    let i = rng.random_range(0..n);
                    let j = rng.random_range(0..n);
                    if i != j {
                        let d = -diffs[[i, j]];
                        diffs[[i, j]] = d;
                        diffs[[j, i]] = d;
                    }
                }
            } else {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d: f64 = rng.random_range(-0.3..0.3);
                        diffs[[i, j]] = d;
                        diffs[[j, i]] = d;
                    }
                }
            }
            let (p, m) = population_from_diffs(&diffs);
            let global = check_balance_population(&p, &m, 1e-12).unwrap().class;
            let local = local_balance_class(&p, &m, 1e-12);
            assert_eq!(global, local, "diffs {diffs:?}");
            seen[match global {
                BalanceClass::Strong => 0,
                BalanceClass::Weak => 1,
                BalanceClass::Unbalanced => 2,
            }] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0), "all verdict classes exercised: {seen:?}");
    }

    #[test]
    fn slp_baseline_is_spectral_init() {
        let adjacency =
            adjacency_from_edges(6, &[(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1), (0, 3, -1)]);
        let a = slp_baseline(&adjacency, 2, 9).unwrap();
        let b = spectral_init(&adjacency, 2, 9).unwrap();
        assert_eq!(a.labels(), b.labels());
    }
}
