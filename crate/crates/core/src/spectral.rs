//! Two-step spectral clustering and the k-means machinery it shares with
//! SDP rounding.
//!
//! k-means uses k-means++ seeding followed by Lloyd iterations. Assignment
//! ties go to the lowest centroid index. A cluster left empty by an
//! assignment step receives the point farthest from its current centroid,
//! so every run keeps exactly `k` clusters. Restart `r` draws from
//! `SplitMix64::substream(seed, r)` and the best run wins by
//! `(objective, r)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel_graph::{laplacian, normalized_laplacian, WeightedGraph};
use crate::linalg::sym_eigen;
use crate::partition::{Partition, Variant};
use crate::rng::SplitMix64;

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_LLOYD_ITERS: usize = 300;
const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralVariant {
    /// Eigenvectors of `L`.
    Unnormalized,
    /// Eigenvectors of `L_sym`, rows rescaled by `D^{-1/2}` before k-means.
    Normalized,
}

impl From<Variant> for SpectralVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::RatioCut => SpectralVariant::Unnormalized,
            Variant::NCut => SpectralVariant::Normalized,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// `N x k`, orthonormal columns for the `k` smallest eigenvalues.
    pub u: DMatrix<f64>,
    /// Full spectrum of the Laplacian used, ascending.
    pub eigenvalues: Vec<f64>,
    pub variant: SpectralVariant,
    /// `λ_{k+1} - λ_k < 1e-12`: the subspace is valid but not unique.
    pub degenerate_gap: bool,
}

pub fn embed(g: &WeightedGraph, k: usize, variant: SpectralVariant) -> Result<Embedding> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
    }
    let m = match variant {
        SpectralVariant::Unnormalized => laplacian(g),
        SpectralVariant::Normalized => normalized_laplacian(g)?,
    };
    let (vals, vecs) = sym_eigen(&m);
    let u = vecs.columns(0, k).into_owned();
    let degenerate_gap = k < n && vals[k] - vals[k - 1] < DEGENERATE_GAP;
    Ok(Embedding { u, eigenvalues: vals.iter().copied().collect(), variant, degenerate_gap })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansResult {
    pub partition: Partition,
    /// `k x dim`, row `a` is the centroid of cluster `a`.
    pub centroids: Vec<Vec<f64>>,
    /// `Σ_i ‖row_i - c_{label(i)}‖²`.
    pub objective: f64,
    /// Lloyd iterations of the winning restart.
    pub iterations: usize,
    /// Objective after each Lloyd update of the winning restart.
    pub history: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Algorithm 1 (unnormalized) or 2 (normalized) with default restarts.
pub fn spectral_cluster(g: &WeightedGraph, k: usize, variant: SpectralVariant, seed: u64) -> Result<KMeansResult> {
    spectral_cluster_with(g, k, variant, seed, DEFAULT_RESTARTS)
}

pub fn spectral_cluster_with(
    g: &WeightedGraph,
    k: usize,
    variant: SpectralVariant,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult> {
    let emb = embed(g, k, variant)?;
    let rows = match variant {
        SpectralVariant::Unnormalized => emb.u,
        SpectralVariant::Normalized => scale_rows(&emb.u, &g.degrees().map(f64::sqrt)),
    };
    kmeans(&rows, k, seed, restarts)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Sum over rows of the squared distance to the nearest centroid
/// (`centroids` is `k x dim`).
pub fn kmeans_objective_at(rows: &DMatrix<f64>, centroids: &DMatrix<f64>) -> f64 {
    let c = to_rows(centroids);
    to_rows(rows)
        .iter()
        .map(|r| c.iter().map(|ci| sq_dist(r, ci)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Best of `restarts` seeded k-means++/Lloyd runs on the rows of `rows`.
pub fn kmeans(rows: &DMatrix<f64>, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    let n = rows.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n} rows")));
    }
    if rows.ncols() == 0 {
        return Err(Error::InvalidInput("rows have dimension 0".into()));
    }
    let pts = to_rows(rows);
    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts.max(1) {
        let mut rng = SplitMix64::substream(seed, r as u64);
        let init = plus_plus_init(&pts, k, &mut rng);
        let mut run = lloyd(&pts, init)?;
        run.restart = r;
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plus_plus_init(pts: &[Vec<f64>], k: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let n = pts.len();
    let mut centroids = vec![pts[rng.next_below(n as u64) as usize].clone()];
    let mut d2: Vec<f64> = pts.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave target >= acc; take the last positive weight
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            rng.next_below(n as u64) as usize
        };
        let c = pts[idx].clone();
        for (i, p) in pts.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (a, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.0 {
            best = (d, a);
        }
    }
    best.1
}

fn means(pts: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = pts[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in pts.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        for x in s.iter_mut() {
            *x /= c as f64;
        }
    }
    sums
}

fn objective(pts: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    pts.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum()
}

/// Gives each empty cluster the point farthest from its centroid, taken
/// from a cluster with at least two members.
fn repair_empty(pts: &[Vec<f64>], labels: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = (f64::NEG_INFINITY, usize::MAX);
        for (i, p) in pts.iter().enumerate() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[labels[i]]);
            if d > far.0 {
                far = (d, i);
            }
        }
        labels[far.1] = empty;
        centroids[empty] = pts[far.1].clone();
    }
}

fn lloyd(pts: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> Result<KMeansResult> {
    let k = centroids.len();
    let mut labels: Vec<usize> = vec![usize::MAX; pts.len()];
    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..MAX_LLOYD_ITERS {
        let mut new_labels: Vec<usize> = pts.iter().map(|p| nearest(p, &centroids)).collect();
        repair_empty(pts, &mut new_labels, &mut centroids);
        if new_labels == labels {
            break;
        }
        labels = new_labels;
        centroids = means(pts, &labels, k);
        history.push(objective(pts, &labels, &centroids));
        iterations += 1;
    }
    let obj = objective(pts, &labels, &centroids);
    Ok(KMeansResult {
        partition: Partition::new(labels, k)?,
        centroids,
        objective: obj,
        iterations,
        history,
        restart: 0,
    })
}

/// Divides row `i` of `u` by `s[i]`.
pub fn scale_rows(u: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    let mut out = u.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row /= s[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_inner;

    fn blobs() -> DMatrix<f64> {
        let pts = [[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [5.0, 5.0], [5.1, 5.0], [5.0, 5.1], [-5.0, 5.0], [-5.1, 5.0]];
        DMatrix::from_fn(pts.len(), 2, |i, j| pts[i][j])
    }

    #[test]
    fn k1_is_the_mean() {
        let rows = DMatrix::from_row_slice(4, 1, &[0.0, 1.0, 2.0, 5.0]);
        let r = kmeans(&rows, 1, 0, 3).unwrap();
        assert!((r.centroids[0][0] - 2.0).abs() < 1e-15);
        // N * variance = Σ (x - 2)^2
        assert!((r.objective - (4.0 + 1.0 + 0.0 + 9.0)).abs() < 1e-12);
    }

    #[test]
    fn separated_blobs_recovered() {
        let r = kmeans(&blobs(), 3, 9, 5).unwrap();
        assert_eq!(r.partition.canonical().labels(), &[0, 0, 0, 1, 1, 1, 2, 2]);
        let c = DMatrix::from_fn(3, 2, |a, j| r.centroids[a][j]);
        assert!((kmeans_objective_at(&blobs(), &c) - r.objective).abs() < 1e-12);
    }

    #[test]
    fn identical_points_use_empty_cluster_repair() {
        let rows = DMatrix::from_element(5, 2, 1.5);
        let r = kmeans(&rows, 2, 1, 2).unwrap();
        assert_eq!(r.partition.sizes().len(), 2);
        assert!(r.partition.sizes().iter().all(|&s| s >= 1));
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn rejects_too_many_clusters() {
        assert!(matches!(kmeans(&blobs(), 9, 0, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn objective_at_zero_when_points_are_centroids() {
        let rows = blobs();
        assert_eq!(kmeans_objective_at(&rows, &rows), 0.0);
    }

    #[test]
    fn k2_single_edge_embedding() {
        let g = WeightedGraph::from_weights(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let e = embed(&g, 1, SpectralVariant::Unnormalized).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((e.u[(0, 0)].abs() - s).abs() < 1e-14 && (e.u[(1, 0)].abs() - s).abs() < 1e-14);
        assert!(e.u[(0, 0)] * e.u[(1, 0)] > 0.0);
    }

    #[test]
    fn embedding_objective_equals_eigen_sum() {
        let mut w = DMatrix::zeros(6, 6);
        let mut rng = SplitMix64::new(5);
        for i in 0..6 {
            for j in (i + 1)..6 {
                let v = rng.next_f64();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        let g = WeightedGraph::from_weights(w).unwrap();
        for k in 1..=3 {
            let e = embed(&g, k, SpectralVariant::Unnormalized).unwrap();
            let utu = e.u.transpose() * &e.u;
            assert!((utu - DMatrix::identity(k, k)).abs().max() < 1e-10);
            let obj = frob_inner(&laplacian(&g), &(&e.u * e.u.transpose()));
            let sum: f64 = e.eigenvalues[..k].iter().sum();
            assert!((obj - sum).abs() < 1e-10);
        }
    }
}
