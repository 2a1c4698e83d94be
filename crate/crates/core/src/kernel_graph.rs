//! Similarity graphs built from point clouds, and the Laplacian family
//! derived from them.
//!
//! Storage is dense. The kernel diagonal `W_ii = Φ(0)` is kept and counts
//! toward the degree `d_i = Σ_j W_ij`; for the heat kernel every vertex
//! therefore has degree at least 1.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::inf_norm;

/// Finite points of a common dimension `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        let dim = coords
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("point set is empty".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        for (i, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(Self { coords, dim })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// Points as the rows of an `n x d` matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim, |i, j| self.coords[i][j])
    }

    /// Concatenation of two point sets of equal dimension.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet> {
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        PointSet::new(coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `exp(-t^2 / 2)` evaluated at `t = ‖x - y‖ / σ`.
    Heat,
    /// `1` if `‖x - y‖ <= σ`, else `0`.
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub sigma: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidInput(format!("bandwidth must be positive, got {sigma}")));
        }
        Ok(Self { kind, sigma })
    }

    pub fn heat(sigma: f64) -> Result<Self> {
        Self::new(KernelKind::Heat, sigma)
    }

    pub fn threshold(sigma: f64) -> Result<Self> {
        Self::new(KernelKind::Threshold, sigma)
    }

    /// Kernel value for a squared Euclidean distance.
    pub fn eval_sq(&self, dist_sq: f64) -> f64 {
        match self.kind {
            KernelKind::Heat => (-dist_sq / (2.0 * self.sigma * self.sigma)).exp(),
            KernelKind::Threshold => {
                if dist_sq.sqrt() / self.sigma <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Symmetric nonnegative weights with their degree vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    w: DMatrix<f64>,
    d: DVector<f64>,
}

impl WeightedGraph {
    /// Validates squareness, exact symmetry, finiteness and nonnegativity.
    pub fn from_weights(w: DMatrix<f64>) -> Result<Self> {
        let n = w.nrows();
        if n == 0 || w.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "weight matrix must be square and nonempty, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let x = w[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidInput(format!("weight ({i},{j}) = {x} is not a finite nonnegative number")));
                }
                if x != w[(j, i)] {
                    return Err(Error::InvalidInput(format!("weight matrix not symmetric at ({i},{j})")));
                }
            }
        }
        let d = degrees_of(&w);
        Ok(Self { w, d })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn degrees(&self) -> &DVector<f64> {
        &self.d
    }

    /// Fails on the first vertex with `d_i <= 0`.
    pub fn require_positive_degrees(&self) -> Result<()> {
        match self.d.iter().position(|&x| x <= 0.0) {
            Some(vertex) => Err(Error::DegenerateDegree { vertex }),
            None => Ok(()),
        }
    }

    /// Graph with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_weights(&self.w * c)
    }
}

fn degrees_of(w: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(w.nrows(), w.row_iter().map(|r| r.iter().sum::<f64>()))
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn build_graph(pts: &PointSet, kernel: &KernelSpec) -> Result<WeightedGraph> {
    let kernel = KernelSpec::new(kernel.kind, kernel.sigma)?;
    let n = pts.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = kernel.eval_sq(0.0);
        for j in (i + 1)..n {
            let v = kernel.eval_sq(dist_sq(pts.point(i), pts.point(j)));
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let d = degrees_of(&w);
    Ok(WeightedGraph { w, d })
}

/// `L = D - W`.
pub fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let mut l = -g.w.clone();
    for i in 0..g.n() {
        l[(i, i)] += g.d[i];
    }
    l
}

/// `L_sym = I - D^{-1/2} W D^{-1/2}`.
pub fn normalized_laplacian(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    g.require_positive_degrees()?;
    let s: Vec<f64> = g.d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let n = g.n();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let v = -g.w[(i, j)] * s[i] * s[j];
        if i == j {
            1.0 + v
        } else {
            v
        }
    }))
}

/// `(P, L_rw) = (D^{-1} W, I - P)`.
pub fn random_walk_matrix(g: &WeightedGraph) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    g.require_positive_degrees()?;
    let n = g.n();
    let p = DMatrix::from_fn(n, n, |i, j| g.w[(i, j)] / g.d[i]);
    let l_rw = DMatrix::identity(n, n) - &p;
    Ok((p, l_rw))
}

/// `‖M‖_∞`, an upper bound on the spectral radius of any square matrix.
pub fn gershgorin_bound(m: &DMatrix<f64>) -> f64 {
    inf_norm(m)
}
