//! The unified cut SDP
//!
//! ```text
//! minimize ⟨A, Z⟩  subject to  Z ⪰ 0,  Z ≥ 0,  Tr Z = k,  Zφ = φ
//! ```
//!
//! with `(A, φ) = (L, 1)` for RatioCut and `(L_sym, D^{1/2} 1)` for NCut,
//! plus rounding of the solution to a partition.
//!
//! # Solver
//!
//! ADMM on the splitting `Z = Y` with
//!
//! * `Z ∈ C = {Z ⪰ 0, Tr Z = k, Zφ = φ}`
//! * `Y ∈ {Y ≥ 0}` (entrywise).
//!
//! Both projections are exact. For `C`, a Householder reflection `H` maps
//! `φ/‖φ‖` to `-e_1`. In the reflected frame the constraints read
//! `Z' = diag(1, S)` with `S ⪰ 0` and `Tr S = k - 1`, so the projection
//! clips the eigenvalues of the trailing block onto a scaled simplex. The
//! cost matrix is divided by its Gershgorin bound internally; objectives are
//! reported in the original scale. The penalty `ρ` is rebalanced by a factor
//! 2 whenever one residual exceeds the other tenfold.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel_graph::WeightedGraph;
use crate::linalg::{frob_inner, inf_norm, project_simplex, sym_eigen, sym_eigenvalues};
use crate::partition::{cost_matrix, partition_matrix, phi_vector, GroundTruthX, Partition, Variant};
use crate::spectral::{kmeans, scale_rows, DEFAULT_RESTARTS};

/// Relative Frobenius distance below which a rounded partition counts as
/// exactly recovered.
pub const EXACT_GAP: f64 = 1e-3;
const BALANCE_EVERY: usize = 10;
const BALANCE_RATIO: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub a: DMatrix<f64>,
    pub phi: DVector<f64>,
    pub k: usize,
    pub variant: Option<Variant>,
}

impl SdpProblem {
    /// Checks symmetry of `A`, positivity of `φ` and `1 <= k <= N`.
    pub fn new(a: DMatrix<f64>, phi: DVector<f64>, k: usize, variant: Option<Variant>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n || phi.len() != n {
            return Err(Error::InvalidInput(format!(
                "cost is {}x{}, phi has length {}",
                a.nrows(),
                a.ncols(),
                phi.len()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("cost matrix has non-finite entries".into()));
        }
        let scale = inf_norm(&a).max(1.0);
        if (&a - a.transpose()).abs().max() > 1e-12 * scale {
            return Err(Error::InvalidInput("cost matrix is not symmetric".into()));
        }
        if phi.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidInput("phi must be entrywise positive".into()));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
        }
        Ok(Self { a, phi, k, variant })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

pub fn make_problem(g: &WeightedGraph, k: usize, variant: Variant) -> Result<SdpProblem> {
    let a = cost_matrix(g, variant)?;
    let phi = phi_vector(g, variant)?;
    SdpProblem::new(a, phi, k, Some(variant))
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iters: usize,
    pub rho: f64,
    pub adaptive_rho: bool,
    /// Seeds the k-means step of [`round_solution`]; the solver itself is deterministic.
    pub seed: u64,
    /// Initial `Y` iterate, e.g. a partition matrix from spectral clustering.
    pub warm_start: Option<DMatrix<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_primal: 1e-6,
            tol_dual: 1e-6,
            max_iters: 5000,
            rho: 1.0,
            adaptive_rho: true,
            seed: 0,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    fn validate(&self, n: usize) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !(pos(self.tol_primal) && pos(self.tol_dual) && pos(self.rho)) {
            return Err(Error::InvalidInput("tolerances and rho must be positive".into()));
        }
        if let Some(w) = &self.warm_start {
            if w.nrows() != n || w.ncols() != n {
                return Err(Error::InvalidInput("warm start has the wrong shape".into()));
            }
        }
        Ok(())
    }
}

/// Constraint violations of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityGaps {
    pub min_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
    pub min_entry: f64,
    /// `|Tr Z - k|`.
    pub trace_gap: f64,
    /// `‖Zφ - φ‖_∞`.
    pub phi_gap: f64,
}

impl FeasibilityGaps {
    pub fn of(z: &DMatrix<f64>, phi: &DVector<f64>, k: usize) -> Self {
        let ev = sym_eigenvalues(z);
        let min_eigenvalue = ev.first().copied().unwrap_or(0.0);
        let max_abs_eigenvalue = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let min_entry = z.iter().copied().fold(f64::INFINITY, f64::min);
        let trace_gap = (z.trace() - k as f64).abs();
        let phi_gap = (z * phi - phi).amax();
        Self { min_eigenvalue, max_abs_eigenvalue, min_entry, trace_gap, phi_gap }
    }

    /// Bounds `λ_min ≥ -tol‖Z‖`, `min Z_ij ≥ -tol`, `|Tr Z - k| ≤ tol·k`,
    /// `‖Zφ - φ‖_∞ ≤ tol‖φ‖_∞`.
    pub fn within(&self, tol: f64, k: usize, phi: &DVector<f64>) -> bool {
        self.min_eigenvalue >= -tol * self.max_abs_eigenvalue.max(1.0)
            && self.min_entry >= -tol
            && self.trace_gap <= tol * k as f64
            && self.phi_gap <= tol * phi.amax()
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub z: DMatrix<f64>,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gaps: FeasibilityGaps,
    pub iterations: usize,
    pub converged: bool,
    pub rho: f64,
    pub phi: DVector<f64>,
    pub k: usize,
    pub seed: u64,
}

/// Projection onto `{Z ⪰ 0, Tr Z = k, Zφ = φ}`.
struct AffinePsdProjector {
    v: DVector<f64>,
    beta: f64,
    k: usize,
}

impl AffinePsdProjector {
    fn new(phi: &DVector<f64>, k: usize) -> Self {
        let mut v = phi / phi.norm();
        v[0] += 1.0;
        let beta = 2.0 / v.norm_squared();
        Self { v, beta, k }
    }

    /// `H M H` for `H = I - β v vᵀ`.
    fn reflect(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let w = m * &self.v;
        let c = self.v.dot(&w);
        let mut out = m.clone();
        out.ger(-self.beta, &self.v, &w, 1.0);
        out.ger(-self.beta, &w, &self.v, 1.0);
        out.ger(self.beta * self.beta * c, &self.v, &self.v, 1.0);
        out
    }

    fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = m.nrows();
        let r = self.reflect(m);
        let mut zr = DMatrix::zeros(n, n);
        zr[(0, 0)] = 1.0;
        if n > 1 && self.k > 1 {
            let block = r.view((1, 1), (n - 1, n - 1)).into_owned();
            let (vals, vecs) = sym_eigen(&block);
            let mu = project_simplex(vals.as_slice(), (self.k - 1) as f64);
            let keep: Vec<usize> = (0..n - 1).filter(|&j| mu[j] > 0.0).collect();
            let mut vk = DMatrix::zeros(n - 1, keep.len());
            for (c, &j) in keep.iter().enumerate() {
                vk.set_column(c, &(vecs.column(j) * mu[j].sqrt()));
            }
            let s = &vk * vk.transpose();
            zr.view_mut((1, 1), (n - 1, n - 1)).copy_from(&s);
        }
        let z = self.reflect(&zr);
        (&z + z.transpose()) * 0.5
    }
}

/// Feasible point `φ̂φ̂ᵀ + ((k-1)/(N-1))(I - φ̂φ̂ᵀ)`, the projection of
/// `(k/N) I + c φφᵀ/‖φ‖²` for any `c`.
pub fn cold_start(phi: &DVector<f64>, k: usize) -> DMatrix<f64> {
    let n = phi.len();
    let ph = phi / phi.norm();
    let pp = &ph * ph.transpose();
    if n == 1 {
        return pp;
    }
    let t = (k as f64 - 1.0) / (n as f64 - 1.0);
    &pp + (DMatrix::identity(n, n) - &pp) * t
}

/// Runs ADMM. Non-convergence is reported through `converged = false`.
pub fn solve(prob: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let n = prob.n();
    opts.validate(n)?;
    let scale = inf_norm(&prob.a).max(f64::MIN_POSITIVE);
    let a_hat = &prob.a / scale;
    let proj = AffinePsdProjector::new(&prob.phi, prob.k);

    let mut y = match &opts.warm_start {
        Some(w) => crate::linalg::symmetrize(w).map(|x| x.max(0.0)),
        None => cold_start(&prob.phi, prob.k),
    };
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut rho = opts.rho;
    let mut z = y.clone();
    let (mut r, mut s) = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iters {
        iterations = it;
        z = proj.project(&(&y - &u - &a_hat / rho));
        let y_prev = std::mem::replace(&mut y, (&z + &u).map(|x| x.max(0.0)));
        u += &z - &y;
        r = (&z - &y).norm();
        s = rho * (&y - &y_prev).norm();

        if r <= opts.tol_primal && s <= opts.tol_dual * (rho * u.norm()).max(1.0) {
            let gaps = FeasibilityGaps::of(&z, &prob.phi, prob.k);
            if gaps.within(opts.tol_primal, prob.k, &prob.phi) {
                converged = true;
                break;
            }
        }
        if opts.adaptive_rho && it % BALANCE_EVERY == 0 {
            if r > BALANCE_RATIO * s {
                rho *= 2.0;
                u /= 2.0;
            } else if s > BALANCE_RATIO * r {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }

    let gaps = FeasibilityGaps::of(&z, &prob.phi, prob.k);
    Ok(SdpSolution {
        objective: frob_inner(&prob.a, &z),
        z,
        primal_residual: r,
        dual_residual: s,
        gaps,
        iterations,
        converged,
        rho,
        phi: prob.phi.clone(),
        k: prob.k,
        seed: opts.seed,
    })
}

/// `‖Z - X‖_F / ‖X‖_F`.
pub fn exactness_gap(sol: &SdpSolution, x: &GroundTruthX) -> f64 {
    relative_gap(&sol.z, &x.x)
}

pub fn relative_gap(z: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    (z - x).norm() / x.norm()
}

#[derive(Debug, Clone)]
pub struct Rounding {
    pub partition: Partition,
    /// `gap <= 1e-3`.
    pub exact: bool,
    /// Relative distance from `Z` to the partition matrix of `partition`.
    pub gap: f64,
}

/// Top-`k` eigenvectors of `Z`, rows divided by `φ_i`, clustered by k-means.
pub fn round_solution(sol: &SdpSolution, k: usize) -> Result<Rounding> {
    round_matrix(&sol.z, &sol.phi, k, sol.seed)
}

pub fn round_matrix(z: &DMatrix<f64>, phi: &DVector<f64>, k: usize, seed: u64) -> Result<Rounding> {
    let n = z.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
    }
    if phi.len() != n || z.ncols() != n {
        return Err(Error::InvalidInput("shape mismatch between Z and phi".into()));
    }
    let (_, vecs) = sym_eigen(&crate::linalg::symmetrize(z));
    let top = vecs.columns(n - k, k).into_owned();
    let rows = scale_rows(&top, phi);
    let km = kmeans(&rows, k, seed, DEFAULT_RESTARTS)?;
    let partition = km.partition.canonical();
    let gap = relative_gap(z, &partition_matrix(&partition, phi));
    Ok(Rounding { exact: gap <= EXACT_GAP, partition, gap })
}
