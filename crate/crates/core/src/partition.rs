//! Partitions of the vertex set, cut objectives, partition matrices and the
//! within/between-cluster ("iso"/"delta") decomposition of a graph.
//!
//! Matrices are kept in the caller's vertex order. Cluster blocks are
//! addressed through [`Partition::members`], which lists each cluster's
//! vertices in increasing order; gathering along those lists is the same as
//! permuting to cluster-contiguous order.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel_graph::{laplacian, normalized_laplacian, WeightedGraph};

/// Largest vertex count accepted by [`brute_force_min_cut`].
pub const BRUTE_FORCE_LIMIT: usize = 14;

/// Assignment of `n` vertices to `k` nonempty clusters labelled `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no vertices".into()));
        }
        if k == 0 {
            return Err(Error::InvalidPartition("k must be at least 1".into()));
        }
        let mut sizes = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidPartition(format!("label {l} of vertex {i} is not below k={k}")));
            }
            sizes[l] += 1;
        }
        if let Some(a) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("cluster {a} is empty")));
        }
        Ok(Self { labels, k, sizes })
    }

    /// Infers `k` as one more than the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    /// Consecutive blocks of the given sizes: `[0; s0] ++ [1; s1] ++ ...`.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let labels = sizes.iter().enumerate().flat_map(|(a, &s)| std::iter::repeat_n(a, s)).collect();
        Self::new(labels, sizes.len())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Vertices of cluster `a` in increasing order.
    pub fn members(&self, a: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == a).collect()
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Relabelled so clusters are numbered by first appearance.
    pub fn canonical(&self) -> Partition {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Partition { labels, k: self.k, sizes: self.sizes.clone() }.with_recomputed_sizes()
    }

    fn with_recomputed_sizes(mut self) -> Self {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        self.sizes = sizes;
        self
    }

    /// Equality up to a relabelling of clusters.
    pub fn same_clusters(&self, other: &Partition) -> bool {
        self.k == other.k && self.canonical().labels == other.canonical().labels
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::InvalidPartition(format!("partition has {} vertices, graph has {n}", self.n())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    RatioCut,
    NCut,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ratiocut" | "rcut" => Ok(Variant::RatioCut),
            "ncut" => Ok(Variant::NCut),
            _ => Err(Error::InvalidInput(format!("unknown variant '{s}', expected ratiocut or ncut"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::RatioCut => "ratiocut",
            Variant::NCut => "ncut",
        })
    }
}

/// Within-cluster (`iso`) and between-cluster (`delta`) parts of a graph.
///
/// `W = W_iso + W_delta`, `D = D_iso + D_delta`, `L = L_iso + L_delta`.
/// Random-walk quantities are `None` when a needed degree vanishes.
#[derive(Debug, Clone)]
pub struct PartitionSplit {
    pub w_iso: DMatrix<f64>,
    pub d_iso: DVector<f64>,
    pub l_iso: DMatrix<f64>,
    /// `D_iso^{-1} W_iso`.
    pub p_iso: Option<DMatrix<f64>>,
    /// `I - P_iso`.
    pub l_rw_iso: Option<DMatrix<f64>>,
    pub w_delta: DMatrix<f64>,
    pub d_delta: DVector<f64>,
    pub l_delta: DMatrix<f64>,
    /// `D^{-1} W_delta`.
    pub p_delta: Option<DMatrix<f64>>,
    /// `‖D_delta‖ = max_i (d_delta)_i`.
    pub d_delta_norm: f64,
    /// `‖P_delta‖_∞ = max_i (d_delta)_i / d_i`.
    pub p_delta_norm: Option<f64>,
}

impl PartitionSplit {
    pub fn d_iso_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.d_iso)
    }

    pub fn d_delta_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.d_delta)
    }
}

fn row_sums(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.iter().sum::<f64>()))
}

fn graph_laplacian(w: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let mut l = -w.clone();
    for i in 0..w.nrows() {
        l[(i, i)] += d[i];
    }
    l
}

pub fn split(g: &WeightedGraph, p: &Partition) -> Result<PartitionSplit> {
    p.check_size(g.n())?;
    let n = g.n();
    let w = g.weights();
    let lab = p.labels();
    let w_iso = DMatrix::from_fn(n, n, |i, j| if lab[i] == lab[j] { w[(i, j)] } else { 0.0 });
    let w_delta = DMatrix::from_fn(n, n, |i, j| if lab[i] == lab[j] { 0.0 } else { w[(i, j)] });
    let d_iso = row_sums(&w_iso);
    let d_delta = row_sums(&w_delta);
    let l_iso = graph_laplacian(&w_iso, &d_iso);
    let l_delta = graph_laplacian(&w_delta, &d_delta);
    let d_delta_norm = d_delta.iter().copied().fold(0.0, f64::max);

    let (p_iso, l_rw_iso) = if d_iso.iter().all(|&x| x > 0.0) {
        let p_iso = DMatrix::from_fn(n, n, |i, j| w_iso[(i, j)] / d_iso[i]);
        let l_rw = DMatrix::identity(n, n) - &p_iso;
        (Some(p_iso), Some(l_rw))
    } else {
        (None, None)
    };
    let d = g.degrees();
    let (p_delta, p_delta_norm) = if d.iter().all(|&x| x > 0.0) {
        let pd = DMatrix::from_fn(n, n, |i, j| w_delta[(i, j)] / d[i]);
        let norm = (0..n).map(|i| d_delta[i] / d[i]).fold(0.0, f64::max);
        (Some(pd), Some(norm))
    } else {
        (None, None)
    };
    Ok(PartitionSplit {
        w_iso,
        d_iso,
        l_iso,
        p_iso,
        l_rw_iso,
        w_delta,
        d_delta,
        l_delta,
        p_delta,
        d_delta_norm,
        p_delta_norm,
    })
}

/// `cut(Γ_a, Γ_a^c)` for each cluster.
fn cuts(w: &DMatrix<f64>, labels: &[usize], k: usize) -> Vec<f64> {
    let n = labels.len();
    let mut c = vec![0.0; k];
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                c[labels[i]] += w[(i, j)];
            }
        }
    }
    c
}

fn ratio_cut_labels(w: &DMatrix<f64>, labels: &[usize], sizes: &[usize]) -> f64 {
    cuts(w, labels, sizes.len()).iter().zip(sizes).map(|(c, &s)| c / s as f64).sum()
}

fn normalized_cut_labels(w: &DMatrix<f64>, d: &DVector<f64>, labels: &[usize], k: usize) -> f64 {
    let mut vol = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        vol[l] += d[i];
    }
    cuts(w, labels, k).iter().zip(&vol).map(|(c, v)| c / v).sum()
}

/// `Σ_a cut(Γ_a, Γ_a^c) / |Γ_a|`.
pub fn ratio_cut(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    p.check_size(g.n())?;
    Ok(ratio_cut_labels(g.weights(), p.labels(), p.sizes()))
}

/// `Σ_a cut(Γ_a, Γ_a^c) / Vol(Γ_a)`.
pub fn normalized_cut(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    p.check_size(g.n())?;
    g.require_positive_degrees()?;
    Ok(normalized_cut_labels(g.weights(), g.degrees(), p.labels(), p.k()))
}

pub fn cut_value(g: &WeightedGraph, p: &Partition, variant: Variant) -> Result<f64> {
    match variant {
        Variant::RatioCut => ratio_cut(g, p),
        Variant::NCut => normalized_cut(g, p),
    }
}

/// The vector `φ` of the unified program: all ones for RatioCut, `D^{1/2} 1` for NCut.
pub fn phi_vector(g: &WeightedGraph, variant: Variant) -> Result<DVector<f64>> {
    match variant {
        Variant::RatioCut => Ok(DVector::from_element(g.n(), 1.0)),
        Variant::NCut => {
            g.require_positive_degrees()?;
            Ok(g.degrees().map(f64::sqrt))
        }
    }
}

/// Cost matrix of the unified program: `L` for RatioCut, `L_sym` for NCut.
pub fn cost_matrix(g: &WeightedGraph, variant: Variant) -> Result<DMatrix<f64>> {
    match variant {
        Variant::RatioCut => Ok(laplacian(g)),
        Variant::NCut => normalized_laplacian(g),
    }
}

/// `X = Σ_a φ_a φ_aᵀ / ‖φ_a‖²` with `φ_a` the restriction of `φ` to cluster `a`.
pub fn partition_matrix(p: &Partition, phi: &DVector<f64>) -> DMatrix<f64> {
    let n = p.n();
    let mut norms = vec![0.0; p.k()];
    for i in 0..n {
        norms[p.label(i)] += phi[i] * phi[i];
    }
    let lab = p.labels();
    DMatrix::from_fn(n, n, |i, j| if lab[i] == lab[j] { phi[i] * phi[j] / norms[lab[i]] } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthX {
    pub x: DMatrix<f64>,
    pub variant: Variant,
}

/// `X_rcut` (blocks `J / n_a`) or `X_ncut` (entries `sqrt(d_i d_j) / Vol(Γ_a)`).
pub fn ground_truth_x(g: &WeightedGraph, p: &Partition, variant: Variant) -> Result<GroundTruthX> {
    p.check_size(g.n())?;
    let phi = phi_vector(g, variant)?;
    Ok(GroundTruthX { x: partition_matrix(p, &phi), variant })
}

/// Exact minimiser of the cut objective over all partitions into exactly `k`
/// nonempty clusters. Ties go to the lexicographically smallest label vector
/// among labelings whose clusters are numbered by first appearance.
pub fn brute_force_min_cut(g: &WeightedGraph, k: usize, objective: Variant) -> Result<(Partition, f64)> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::OracleTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
    }
    if objective == Variant::NCut {
        g.require_positive_degrees()?;
    }
    let mut labels = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut eval = |labels: &[usize]| {
        let val = match objective {
            Variant::RatioCut => {
                let mut sizes = vec![0usize; k];
                for &l in labels {
                    sizes[l] += 1;
                }
                ratio_cut_labels(g.weights(), labels, &sizes)
            }
            Variant::NCut => normalized_cut_labels(g.weights(), g.degrees(), labels, k),
        };
        if best.as_ref().is_none_or(|(_, b)| val < *b) {
            best = Some((labels.to_vec(), val));
        }
    };
    enumerate_rgs(&mut labels, 1, 1, k, &mut eval);
    let (labels, val) = best.expect("at least one k-partition exists for k <= n");
    Ok((Partition::new(labels, k)?, val))
}

/// Restricted-growth strings with exactly `k` blocks, in lexicographic order.
/// `used` counts the distinct labels among `labels[..pos]`.
fn enumerate_rgs(labels: &mut [usize], pos: usize, used: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let n = labels.len();
    if pos == n {
        if used == k {
            f(labels);
        }
        return;
    }
    let remaining = n - pos;
    for l in 0..=used.min(k - 1) {
        let new_used = if l == used { used + 1 } else { used };
        if new_used + remaining - 1 < k {
            continue;
        }
        labels[pos] = l;
        enumerate_rgs(labels, pos + 1, new_used, k, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_inner;

    fn two_blocks() -> WeightedGraph {
        let mut w = DMatrix::zeros(4, 4);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        w[(2, 3)] = 1.0;
        w[(3, 2)] = 1.0;
        WeightedGraph::from_weights(w).unwrap()
    }

    /// Edges 0-1 and 2-3 with unit weight, 1-2 with weight 0.1.
    fn four_node() -> WeightedGraph {
        let mut w = DMatrix::zeros(4, 4);
        for &(i, j, v) in &[(0, 1, 1.0), (2, 3, 1.0), (1, 2, 0.1)] {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        WeightedGraph::from_weights(w).unwrap()
    }

    fn k2_with_self_loops() -> WeightedGraph {
        WeightedGraph::from_weights(DMatrix::from_element(2, 2, 1.0)).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0, 2], 3).is_err());
        assert!(Partition::new(vec![0, 3], 3).is_err());
        assert!(Partition::new(vec![], 1).is_err());
        let p = Partition::new(vec![1, 0, 1], 2).unwrap();
        assert_eq!(p.sizes(), &[1, 2]);
        assert_eq!(p.members(1), vec![0, 2]);
        assert_eq!(p.canonical().labels(), &[0, 1, 0]);
        assert!(p.same_clusters(&Partition::new(vec![0, 1, 0], 2).unwrap()));
        assert!(!p.same_clusters(&Partition::new(vec![0, 0, 1], 2).unwrap()));
    }

    #[test]
    fn split_disconnected_blocks() {
        let s = split(&two_blocks(), &Partition::contiguous(&[2, 2]).unwrap()).unwrap();
        assert_eq!(s.w_delta, DMatrix::zeros(4, 4));
        assert_eq!(s.d_delta_norm, 0.0);
    }

    #[test]
    fn split_k2_singletons() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let g = WeightedGraph::from_weights(w).unwrap();
        let s = split(&g, &Partition::contiguous(&[1, 1]).unwrap()).unwrap();
        assert_eq!(s.d_delta_matrix(), DMatrix::identity(2, 2));
        assert_eq!(s.d_delta_norm, 1.0);
        assert_eq!(s.p_delta_norm, Some(1.0));
        // D_iso vanishes, so the random-walk iso matrices are undefined
        assert!(s.p_iso.is_none());
    }

    #[test]
    fn split_four_node() {
        let g = four_node();
        let s = split(&g, &Partition::contiguous(&[2, 2]).unwrap()).unwrap();
        assert!((s.d_delta_norm - 0.1).abs() < 1e-15);
        // row 1: d_delta = 0.1, d = 1.1
        assert!((s.p_delta_norm.unwrap() - 0.1 / 1.1).abs() < 1e-15);
        assert!((s.p_delta_norm.unwrap() - 0.0909).abs() < 1e-4);
        let l = laplacian(&g);
        assert!((&s.l_iso + &s.l_delta - l).abs().max() < 1e-15);
    }

    #[test]
    fn cut_examples() {
        let blocks = Partition::contiguous(&[2, 2]).unwrap();
        assert_eq!(ratio_cut(&two_blocks(), &blocks).unwrap(), 0.0);
        assert_eq!(normalized_cut(&two_blocks(), &blocks).unwrap(), 0.0);

        let singles = Partition::contiguous(&[1, 1]).unwrap();
        let k2 = WeightedGraph::from_weights(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(ratio_cut(&k2, &singles).unwrap(), 2.0);
        // self-weights count toward the volume: d = (2, 2)
        assert_eq!(normalized_cut(&k2_with_self_loops(), &singles).unwrap(), 1.0);

        let g = four_node();
        assert!((ratio_cut(&g, &blocks).unwrap() - 0.1).abs() < 1e-15);
        // Vol of each side is 1 + 1.1
        let nc = normalized_cut(&g, &blocks).unwrap();
        assert!((nc - 2.0 * 0.1 / 2.1).abs() < 1e-15);
    }

    #[test]
    fn cut_inner_product_identities_four_node() {
        let g = four_node();
        let p = Partition::contiguous(&[2, 2]).unwrap();
        let xr = ground_truth_x(&g, &p, Variant::RatioCut).unwrap();
        assert!((frob_inner(&laplacian(&g), &xr.x) - ratio_cut(&g, &p).unwrap()).abs() < 1e-14);
        let xn = ground_truth_x(&g, &p, Variant::NCut).unwrap();
        let ls = normalized_laplacian(&g).unwrap();
        assert!((frob_inner(&ls, &xn.x) - normalized_cut(&g, &p).unwrap()).abs() < 1e-14);
        // entrywise: sqrt(d_i d_j) / Vol
        let d: [f64; 4] = [1.0, 1.1, 1.1, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i < 2) == (j < 2) { (d[i] * d[j]).sqrt() / 2.1 } else { 0.0 };
                assert!((xn.x[(i, j)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ground_truth_small_cases() {
        let k2 = WeightedGraph::from_weights(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let x = ground_truth_x(&k2, &Partition::contiguous(&[1, 1]).unwrap(), Variant::RatioCut).unwrap();
        assert_eq!(x.x, DMatrix::identity(2, 2));
        let x = ground_truth_x(&two_blocks(), &Partition::contiguous(&[2, 2]).unwrap(), Variant::RatioCut).unwrap();
        let expect = DMatrix::from_row_slice(4, 4, &[0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5]);
        assert_eq!(x.x, expect);
    }

    #[test]
    fn brute_force_examples() {
        let (p, v) = brute_force_min_cut(&two_blocks(), 2, Variant::RatioCut).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
        assert_eq!(v, 0.0);

        let (p, v) = brute_force_min_cut(&four_node(), 2, Variant::RatioCut).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
        assert!((v - 0.1).abs() < 1e-15);

        let k3 = WeightedGraph::from_weights(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap();
        let (p, v) = brute_force_min_cut(&k3, 2, Variant::RatioCut).unwrap();
        assert_eq!(v, 3.0);
        // lexicographically smallest of the three optimal splits
        assert_eq!(p.labels(), &[0, 0, 1]);
    }

    #[test]
    fn rgs_counts_match_stirling_numbers() {
        // S(6, k) for k = 1..6
        let expect = [1usize, 31, 90, 65, 15, 1];
        for (k, &s) in (1..=6).zip(&expect) {
            let mut count = 0;
            let mut labels = vec![0; 6];
            enumerate_rgs(&mut labels, 1, 1, k, &mut |_| count += 1);
            assert_eq!(count, s, "k={k}");
        }
    }

    #[test]
    fn brute_force_guard() {
        let g = WeightedGraph::from_weights(DMatrix::zeros(15, 15)).unwrap();
        assert_eq!(
            brute_force_min_cut(&g, 2, Variant::RatioCut).unwrap_err(),
            Error::OracleTooLarge { n: 15, limit: BRUTE_FORCE_LIMIT }
        );
    }
}
