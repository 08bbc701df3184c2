//! Spectral initialization: embed nodes with the bottom eigenvectors of the
//! degree-normalized signed Laplacian and cluster the embedding with
//! restarted k-means.
//!
//! The Laplacian is `L = D - A` with `D = diag(sum_j |a_ij|)`, symmetrically
//! normalized by `D^{-1/2}`. Every balanced connected component contributes
//! an exact-zero eigenvalue whose eigenvector is supported on that component
//! alone, so isolated nodes and stray small components would crowd out the
//! informative eigenvectors; the embedding is therefore computed on the
//! largest connected component and the remaining nodes get label 0.
//!
//! The same routine doubles as the signed-Laplacian clustering baseline.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Membership, SignedAdjacency};
use crate::rng::{stream_rng, Stream};

const KMEANS_RESTARTS: u64 = 10;
const KMEANS_MAX_ITERS: usize = 100;

/// Community initialization by spectral clustering of the signed Laplacian.
pub fn spectral_init(adjacency: &SignedAdjacency, k: usize, seed: u64) -> Result<Membership> {
    let n = adjacency.n();
    if k == 0 || k > n {
        return Err(Error::InvalidCommunityCount { k, n });
    }
    if k == 1 {
        return Membership::new(vec![0; n], 1);
    }
    let component = largest_component(adjacency);
    if component.len() < k {
        // No usable structure (e.g. an empty graph); degenerate assignment.
        return Membership::new(vec![0; n], k);
    }

    let embedding = bottom_eigenvectors(adjacency, &component, k);
    let component_labels = kmeans(&embedding, component.len(), k, seed);
    let mut labels = vec![0usize; n];
    for (row, &node) in component.iter().enumerate() {
        labels[node] = component_labels[row];
    }
    Membership::new(labels, k)
}

/// Nodes of the largest connected component of the edge-support graph,
/// in increasing order. Ties go to the component with the smallest node.
fn largest_component(adjacency: &SignedAdjacency) -> Vec<usize> {
    let n = adjacency.n();
    let mut component = vec![usize::MAX; n];
    let mut count = 0usize;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = count;
        count += 1;
        component[start] = id;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if component[v] == usize::MAX && adjacency.entry(u, v) != 0 {
                    component[v] = id;
                    stack.push(v);
                }
            }
        }
    }
    let mut sizes = vec![0usize; count];
    for &c in &component {
        sizes[c] += 1;
    }
    let largest = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
    (0..n).filter(|&i| component[i] == largest).collect()
}

/// Rows are the component's nodes, columns the k eigenvectors of smallest
/// eigenvalue of the normalized signed Laplacian.
fn bottom_eigenvectors(adjacency: &SignedAdjacency, nodes: &[usize], k: usize) -> Vec<f64> {
    let m = nodes.len();
    let degree: Vec<f64> = nodes
        .iter()
        .map(|&i| nodes.iter().map(|&j| f64::from(adjacency.entry(i, j)).abs()).sum())
        .collect();
    let laplacian = DMatrix::<f64>::from_fn(m, m, |a, b| {
        let v = f64::from(adjacency.entry(nodes[a], nodes[b]));
        let scale = (degree[a].max(1.0) * degree[b].max(1.0)).sqrt();
        if a == b {
            (degree[a] - v) / scale
        } else {
            -v / scale
        }
    });
    let eigen = laplacian.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

    let mut embedding = vec![0.0; m * k];
    for (col, &e) in order.iter().take(k).enumerate() {
        for i in 0..m {
            embedding[i * k + col] = eigen.eigenvectors[(i, e)];
        }
    }
    embedding
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding, restarted `KMEANS_RESTARTS`
/// times; the labeling with the lowest inertia wins. Fully deterministic
/// given the seed.
fn kmeans(data: &[f64], n: usize, k: usize, seed: u64) -> Vec<usize> {
    let dim = k;
    let point = |i: usize| &data[i * dim..(i + 1) * dim];

    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = stream_rng(seed, Stream::KmeansInit, restart);
        let mut centers = kmeanspp_centers(data, n, k, dim, &mut rng);
        let mut labels = vec![0usize; n];
        for _ in 0..KMEANS_MAX_ITERS {
            let mut changed = false;
            for i in 0..n {
                let mut best_c = 0;
                let mut best_d = f64::INFINITY;
                for (c, center) in centers.chunks_exact(dim).enumerate() {
                    let d = sq_dist(point(i), center);
                    if d < best_d {
                        best_d = d;
                        best_c = c;
                    }
                }
                if labels[i] != best_c {
                    labels[i] = best_c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            update_centers(data, n, k, dim, &labels, &mut centers);
        }
        let inertia: f64 = (0..n)
            .map(|i| sq_dist(point(i), &centers[labels[i] * dim..(labels[i] + 1) * dim]))
            .sum();
        if best.as_ref().map_or(true, |(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.expect("at least one k-means restart").1
}

fn kmeanspp_centers(
    data: &[f64],
    n: usize,
    k: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut centers = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(point(first));

    let mut dist = vec![0.0f64; n];
    while centers.len() < k * dim {
        let mut total = 0.0;
        for i in 0..n {
            let mut d = f64::INFINITY;
            for center in centers.chunks_exact(dim) {
                d = d.min(sq_dist(point(i), center));
            }
            dist[i] = d;
            total += d;
        }
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // All points coincide with existing centers.
            rng.random_range(0..n)
        };
        centers.extend_from_slice(point(next));
    }
    centers
}

fn update_centers(
    data: &[f64],
    n: usize,
    k: usize,
    dim: usize,
    labels: &[usize],
    centers: &mut [f64],
) {
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut counts = vec![0usize; k];
    centers.fill(0.0);
    for i in 0..n {
        counts[labels[i]] += 1;
        for d in 0..dim {
            centers[labels[i] * dim + d] += point(i)[d];
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for d in 0..dim {
                centers[c * dim + d] /= counts[c] as f64;
            }
        }
    }
    // Reseat each empty cluster at the point farthest from its center.
    for c in 0..k {
        if counts[c] == 0 {
            let farthest = (0..n)
                .max_by(|&a, &b| {
                    let da = sq_dist(point(a), &centers[labels[a] * dim..(labels[a] + 1) * dim]);
                    let db = sq_dist(point(b), &centers[labels[b] * dim..(labels[b] + 1) * dim]);
                    da.total_cmp(&db)
                })
                .expect("n >= k >= 1");
            centers[c * dim..(c + 1) * dim].copy_from_slice(point(farthest));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::clustering_error;
    use crate::model::DiagonalPolicy;
    use ndarray::Array2;

    /// Two positive cliques joined by all-negative cross edges.
    pub(crate) fn two_clique_instance(half: usize) -> SignedAdjacency {
        let n = 2 * half;
        let mut entries = Array2::<i8>::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let same = (i < half) == (j < half);
                let v = if same { 1 } else { -1 };
                entries[[i, j]] = v;
                entries[[j, i]] = v;
            }
        }
        SignedAdjacency::new(entries, DiagonalPolicy::Exclude).unwrap()
    }

    #[test]
    fn recovers_planted_bipartition_exactly() {
        let adjacency = two_clique_instance(10);
        let membership = spectral_init(&adjacency, 2, 7).unwrap();
        let truth: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        assert_eq!(clustering_error(membership.labels(), &truth).unwrap(), 0.0);
    }

    #[test]
    fn k1_labels_everything_together() {
        let adjacency = two_clique_instance(3);
        let membership = spectral_init(&adjacency, 1, 0).unwrap();
        assert!(membership.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn node_permutation_permutes_labels_consistently() {
        let adjacency = two_clique_instance(5);
        let n = adjacency.n();
        // Interleave the two cliques.
        let perm: Vec<usize> = (0..n).map(|i| (i % 2) * 5 + i / 2).collect();
        let mut permuted = Array2::<i8>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                permuted[[i, j]] = adjacency.entry(perm[i], perm[j]);
            }
        }
        let permuted = SignedAdjacency::new(permuted, DiagonalPolicy::Exclude).unwrap();
        let base = spectral_init(&adjacency, 2, 3).unwrap();
        let shuffled = spectral_init(&permuted, 2, 3).unwrap();
        let aligned: Vec<usize> = (0..n).map(|i| base.label(perm[i])).collect();
        assert_eq!(clustering_error(shuffled.labels(), &aligned).unwrap(), 0.0);
    }

    #[test]
    fn isolated_nodes_do_not_crowd_out_the_embedding() {
        // Two cliques plus three isolated nodes; the isolated nodes would
        // contribute exact-zero localized eigenvectors if kept.
        let half = 6;
        let clean = two_clique_instance(half);
        let n = 2 * half + 3;
        let mut entries = Array2::<i8>::zeros((n, n));
        for i in 0..2 * half {
            for j in 0..2 * half {
                entries[[i, j]] = clean.entry(i, j);
            }
        }
        let adjacency = SignedAdjacency::new(entries, DiagonalPolicy::Exclude).unwrap();
        let membership = spectral_init(&adjacency, 2, 5).unwrap();
        let truth: Vec<usize> = (0..2 * half).map(|i| usize::from(i >= half)).collect();
        assert_eq!(
            clustering_error(&membership.labels()[..2 * half], &truth).unwrap(),
            0.0
        );
        // Out-of-component nodes take the default label.
        assert!(membership.labels()[2 * half..].iter().all(|&l| l == 0));
    }

    #[test]
    fn rejects_too_many_communities_and_handles_empty_graph() {
        let adjacency = two_clique_instance(2);
        assert!(spectral_init(&adjacency, 5, 0).is_err());
        assert!(spectral_init(&adjacency, 0, 0).is_err());

        let empty =
            SignedAdjacency::new(Array2::<i8>::zeros((4, 4)), DiagonalPolicy::Exclude).unwrap();
        let membership = spectral_init(&empty, 2, 0).unwrap();
        assert!(membership.labels().iter().all(|&l| l == 0));
    }
}
