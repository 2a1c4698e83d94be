//! Dense symmetric linear algebra helpers on top of `nalgebra`.
//!
//! Every eigen routine returns eigenvalues in ascending order with the
//! matching eigenvectors as columns.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix.
/// Only the lower triangle is read.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Ascending eigenvalues of a symmetric matrix, without eigenvectors.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Second smallest eigenvalue; `None` for matrices smaller than 2x2.
pub fn lambda2(m: &DMatrix<f64>) -> Option<f64> {
    sym_eigenvalues(m).get(1).copied()
}

/// `<A, B> = trace(A^T B)`.
pub fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `(M + M^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Euclidean projection of `v` onto `{x >= 0, sum x = s}` for `s >= 0`.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    if s <= 0.0 {
        return vec![0.0; v.len()];
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - s) / (j + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// `V diag(w) V^T`.
pub fn reassemble(vecs: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut scaled = vecs.clone();
    for (j, &wj) in w.iter().enumerate() {
        scaled.column_mut(j).scale_mut(wj);
    }
    &scaled * vecs.transpose()
}
