//! Certificates of exact recovery for a candidate partition.
//!
//! * [`proximity_check`]: the spectral proximity conditions
//!   `‖D_δ‖ < λ_{k+1}(L_iso)/4` (RatioCut) and
//!   `‖P_δ‖_∞/(1 - ‖P_δ‖_∞) < λ_{k+1}(L_rw,iso)/4` (NCut).
//! * [`build_certificate`] / [`verify_kkt`]: the explicit dual pair `(B, Q)`
//!   for a multiplier `z`, with numeric margins for every optimality condition.
//! * Closed-form sample-size thresholds for circles, lines and the SBM.
//! * [`gw_check`]: the two-cluster equal-size eigenvalue test.
//!
//! Block quantities use the unified notation of the cut SDP: cost `A` and
//! vector `φ`, restricted to clusters `a, b` as `A^{ab}` and `φ_a`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel_graph::WeightedGraph;
use crate::linalg::{inf_norm, max_abs, sym_eigenvalues};
use crate::partition::{cost_matrix, partition_matrix, phi_vector, split, Partition, Variant};

/// `B^{(a,b)}` entries must exceed `-B_POSITIVITY_TOL`, and none may be exactly zero.
pub const B_POSITIVITY_TOL: f64 = 1e-10;
/// Relative tolerance for the algebraic identities of the certificate.
pub const IDENTITY_TOL: f64 = 1e-8;
/// `λ_min((I-X)Q(I-X)) >= -PSD_TOL * ‖(I-X)Q(I-X)‖`.
pub const PSD_TOL: f64 = 1e-8;
/// Interior points tried when the midpoint multiplier fails numerically.
const Z_SCAN_POINTS: usize = 9;

/// Why a proximity condition could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProximityDiagnostic {
    /// `λ_2` of a 1x1 block is undefined.
    SingletonCluster { cluster: usize },
    /// A vertex with no within-cluster weight makes `D_iso` singular.
    IsolatedInCluster { vertex: usize },
    /// `λ_2` of the block is within eigensolver error of zero, so the
    /// cluster is numerically disconnected and the comparison is noise.
    UnresolvedGap { cluster: usize, lambda2: f64, resolution: f64 },
}

/// Absolute error bound used for block eigenvalues: `64 m ε ‖block‖_∞`.
fn eigen_resolution(block: &DMatrix<f64>) -> f64 {
    64.0 * block.nrows() as f64 * f64::EPSILON * inf_norm(block)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProximityReport {
    pub variant: Variant,
    /// `‖D_δ‖` or `‖P_δ‖_∞ / (1 - ‖P_δ‖_∞)`.
    pub lhs: f64,
    /// `λ_{k+1}(L_iso)/4` or `λ_{k+1}(L_rw,iso)/4`; NaN when undefined.
    pub rhs: f64,
    pub holds: bool,
    /// `rhs - lhs`.
    pub margin: f64,
    /// `λ_2` of each diagonal block of `L_iso` (or of `L_rw,iso`).
    pub block_lambda2: Vec<Option<f64>>,
    /// `min_a λ_2`, i.e. `λ_{k+1}` of the block-diagonal matrix.
    pub lambda_k1: f64,
    /// `‖D_δ‖` or `‖P_δ‖_∞`.
    pub delta_norm: f64,
    pub diagnostic: Option<ProximityDiagnostic>,
}

impl ProximityReport {
    /// Open interval of admissible multipliers `z`; empty unless `holds`.
    pub fn z_interval(&self) -> (f64, f64) {
        match self.variant {
            Variant::RatioCut => (-self.lambda_k1, -4.0 * self.delta_norm),
            Variant::NCut => (-(1.0 - self.delta_norm) * self.lambda_k1, -4.0 * self.delta_norm),
        }
    }
}

/// Within- and between-cluster degrees per vertex.
struct ClusterDegrees {
    clusters: Vec<Vec<usize>>,
    d_iso: Vec<f64>,
    d_delta: Vec<f64>,
}

impl ClusterDegrees {
    fn new(g: &WeightedGraph, p: &Partition) -> Self {
        let w = g.weights();
        let n = g.n();
        let lab = p.labels();
        let mut d_iso = vec![0.0; n];
        let mut d_delta = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                if lab[i] == lab[j] {
                    d_iso[i] += w[(i, j)];
                } else {
                    d_delta[i] += w[(i, j)];
                }
            }
        }
        Self { clusters: p.clusters(), d_iso, d_delta }
    }

    /// `L_iso^{(a,a)}`, or its symmetric normalisation
    /// `D_iso^{-1/2} L_iso^{(a,a)} D_iso^{-1/2}` which shares the spectrum of `L_rw,iso^{(a,a)}`.
    fn block(&self, g: &WeightedGraph, a: usize, variant: Variant) -> DMatrix<f64> {
        let idx = &self.clusters[a];
        let w = g.weights();
        let m = idx.len();
        let mut l = DMatrix::from_fn(m, m, |r, c| -w[(idx[r], idx[c])]);
        for r in 0..m {
            l[(r, r)] += self.d_iso[idx[r]];
        }
        if variant == Variant::NCut {
            let s: Vec<f64> = idx.iter().map(|&i| 1.0 / self.d_iso[i].sqrt()).collect();
            for r in 0..m {
                for c in 0..m {
                    l[(r, c)] *= s[r] * s[c];
                }
            }
        }
        l
    }
}

pub fn proximity_check(g: &WeightedGraph, p: &Partition, variant: Variant) -> Result<ProximityReport> {
    p.check_size(g.n())?;
    let cd = ClusterDegrees::new(g, p);
    proximity_from(g, &cd, variant)
}

/// Both conditions, sharing the degree computation.
pub fn proximity_check_both(g: &WeightedGraph, p: &Partition) -> Result<(ProximityReport, ProximityReport)> {
    p.check_size(g.n())?;
    let cd = ClusterDegrees::new(g, p);
    Ok((proximity_from(g, &cd, Variant::RatioCut)?, proximity_from(g, &cd, Variant::NCut)?))
}

fn proximity_from(g: &WeightedGraph, cd: &ClusterDegrees, variant: Variant) -> Result<ProximityReport> {
    let delta_norm = match variant {
        Variant::RatioCut => cd.d_delta.iter().copied().fold(0.0, f64::max),
        Variant::NCut => {
            g.require_positive_degrees()?;
            (0..g.n()).map(|i| cd.d_delta[i] / g.degrees()[i]).fold(0.0, f64::max)
        }
    };
    let lhs = match variant {
        Variant::RatioCut => delta_norm,
        Variant::NCut if delta_norm < 1.0 => delta_norm / (1.0 - delta_norm),
        Variant::NCut => f64::INFINITY,
    };
    let mut diagnostic = None;
    let mut block_lambda2 = Vec::with_capacity(cd.clusters.len());
    for (a, idx) in cd.clusters.iter().enumerate() {
        if idx.len() < 2 {
            diagnostic.get_or_insert(ProximityDiagnostic::SingletonCluster { cluster: a });
            block_lambda2.push(None);
            continue;
        }
        if variant == Variant::NCut {
            if let Some(&v) = idx.iter().find(|&&i| cd.d_iso[i] <= 0.0) {
                diagnostic.get_or_insert(ProximityDiagnostic::IsolatedInCluster { vertex: v });
                block_lambda2.push(None);
                continue;
            }
        }
        let block = cd.block(g, a, variant);
        let lambda2 = sym_eigenvalues(&block)[1];
        let resolution = eigen_resolution(&block);
        if lambda2 <= resolution {
            diagnostic.get_or_insert(ProximityDiagnostic::UnresolvedGap { cluster: a, lambda2, resolution });
        }
        block_lambda2.push(Some(lambda2));
    }
    let lambda_k1 = if block_lambda2.iter().all(Option::is_some) {
        block_lambda2.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    let rhs = lambda_k1 / 4.0;
    let holds = diagnostic.is_none() && lhs < rhs;
    Ok(ProximityReport {
        variant,
        lhs,
        rhs,
        holds,
        margin: rhs - lhs,
        block_lambda2,
        lambda_k1,
        delta_norm,
        diagnostic,
    })
}

/// `λ_{k+1}` of the full block-diagonal `L_iso` (RatioCut) or of
/// `D_iso^{-1/2} L_iso D_iso^{-1/2}` (NCut), computed on the whole `N x N`
/// matrix rather than per block.
pub fn lambda_k1_full(g: &WeightedGraph, p: &Partition, variant: Variant) -> Result<f64> {
    let s = split(g, p)?;
    let m = match variant {
        Variant::RatioCut => s.l_iso.clone(),
        Variant::NCut => {
            if let Some(v) = s.d_iso.iter().position(|&x| x <= 0.0) {
                return Err(Error::DegenerateDegree { vertex: v });
            }
            let inv = s.d_iso.map(|x| 1.0 / x.sqrt());
            DMatrix::from_fn(g.n(), g.n(), |i, j| s.l_iso[(i, j)] * inv[i] * inv[j])
        }
    };
    Ok(sym_eigenvalues(&m)[p.k()])
}

/// A certificate condition with its numeric evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateChecks {
    /// `value` = smallest entry of the off-diagonal blocks of `B`.
    pub b_offdiag_positive: Check,
    /// Number of off-diagonal-block entries of `B` that are exactly zero.
    pub b_offdiag_zero_entries: usize,
    /// `value` = largest `|B^{(a,a)}_{ij}|`.
    pub b_diag_zero: Check,
    /// `value` = `‖B - Bᵀ‖_∞`.
    pub b_symmetric: Check,
    /// `value` = largest `‖B^{(a,b)}φ_b - ‖φ_b‖² u_{a,b}‖_∞`.
    pub b_phi_identity: Check,
    /// `value` = largest `‖Q^{(a,b)}φ_b‖_∞`.
    pub q_annihilates_x: Check,
    /// `value` = smallest eigenvalue of `(I - X) Q (I - X)`.
    pub q_tperp_psd: Check,
}

impl CertificateChecks {
    pub fn all_pass(&self) -> bool {
        self.b_offdiag_positive.pass
            && self.b_diag_zero.pass
            && self.b_symmetric.pass
            && self.b_phi_identity.pass
            && self.q_annihilates_x.pass
            && self.q_tperp_psd.pass
    }
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub variant: Variant,
    pub z: f64,
    /// Admissible open interval for `z` (may be empty).
    pub z_interval: (f64, f64),
    /// Whether `z` was found by scanning after the midpoint failed.
    pub z_scanned: bool,
    pub b: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub checks: CertificateChecks,
}

/// Per-cluster pieces of `A` and `φ`.
struct Blocks {
    clusters: Vec<Vec<usize>>,
    a: DMatrix<f64>,
    phi: DVector<f64>,
    /// `φ_a` as a full-length vector, zero outside cluster `a`.
    phi_full: Vec<DVector<f64>>,
    /// `‖φ_a‖²`.
    nsq: Vec<f64>,
    /// `A^{(a,a)} φ_a`, full length.
    a_phi: Vec<DVector<f64>>,
    /// `φ_aᵀ A^{(a,a)} φ_a / ‖φ_a‖⁴`.
    c: Vec<f64>,
}

impl Blocks {
    fn new(g: &WeightedGraph, p: &Partition, variant: Variant) -> Result<Self> {
        p.check_size(g.n())?;
        let a = cost_matrix(g, variant)?;
        let phi = phi_vector(g, variant)?;
        let clusters = p.clusters();
        let n = g.n();
        let mut phi_full = Vec::new();
        let mut nsq = Vec::new();
        let mut a_phi = Vec::new();
        let mut c = Vec::new();
        for idx in &clusters {
            let mut f = DVector::zeros(n);
            for &i in idx {
                f[i] = phi[i];
            }
            let mut af = DVector::zeros(n);
            for &i in idx {
                af[i] = idx.iter().map(|&j| a[(i, j)] * phi[j]).sum();
            }
            let s = f.norm_squared();
            c.push(f.dot(&af) / (s * s));
            nsq.push(s);
            phi_full.push(f);
            a_phi.push(af);
        }
        Ok(Self { clusters, a, phi, phi_full, nsq, a_phi, c })
    }

    fn k(&self) -> usize {
        self.clusters.len()
    }

    /// `u_{a,b}` as a full-length vector supported on cluster `a`.
    fn u(&self, a: usize, b: usize, z: f64) -> DVector<f64> {
        let n = self.phi.len();
        let mut out = DVector::zeros(n);
        let coef = 0.5 * (self.c[a] - self.c[b]) - 0.5 * z * (1.0 / self.nsq[a] + 1.0 / self.nsq[b]);
        for &i in &self.clusters[a] {
            let ab: f64 = self.clusters[b].iter().map(|&j| self.a[(i, j)] * self.phi[j]).sum();
            out[i] = ab / self.nsq[b] - self.a_phi[a][i] / self.nsq[a] + coef * self.phi[i];
        }
        out
    }

    /// `α_a` (full length, supported on cluster `a`).
    fn alpha(&self, a: usize, z: f64) -> DVector<f64> {
        let s = self.nsq[a];
        &self.a_phi[a] * (-2.0 / s) - &self.phi_full[a] * ((z - self.c[a] * s) / s)
    }

    /// `X = Σ_a φ_a φ_aᵀ / ‖φ_a‖²`.
    fn x(&self) -> DMatrix<f64> {
        let labels = label_vector(&self.clusters, self.phi.len());
        partition_matrix(&Partition::new(labels, self.k()).expect("clusters nonempty"), &self.phi)
    }

    fn scale(&self) -> f64 {
        inf_norm(&self.a).max(1.0) * self.phi.amax().max(1.0)
    }
}

fn label_vector(clusters: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut labels = vec![0; n];
    for (a, idx) in clusters.iter().enumerate() {
        for &i in idx {
            labels[i] = a;
        }
    }
    labels
}

fn build_b(bl: &Blocks, z: f64) -> DMatrix<f64> {
    let n = bl.phi.len();
    let mut b = DMatrix::zeros(n, n);
    for a in 0..bl.k() {
        for bb in 0..bl.k() {
            if a == bb {
                continue;
            }
            let u_ab = bl.u(a, bb, z);
            let u_ba = bl.u(bb, a, z);
            let t = bl.phi_full[a].dot(&u_ab) / bl.nsq[a];
            for &i in &bl.clusters[a] {
                for &j in &bl.clusters[bb] {
                    b[(i, j)] = u_ab[i] * bl.phi[j] + bl.phi[i] * u_ba[j] - t * bl.phi[i] * bl.phi[j];
                }
            }
        }
    }
    b
}

fn build_q(bl: &Blocks, b: &DMatrix<f64>, z: f64) -> DMatrix<f64> {
    let n = bl.phi.len();
    let mut q = DMatrix::zeros(n, n);
    for a in 0..bl.k() {
        let ia = &bl.clusters[a];
        for bb in 0..bl.k() {
            let ib = &bl.clusters[bb];
            if a == bb {
                // P_a (A^{aa} + zI) P_a with P_a = I - φ_a φ_aᵀ / ‖φ_a‖²
                let s = bl.nsq[a];
                let quad = bl.c[a] * s * s + z * s;
                for &i in ia {
                    for &j in ia {
                        let m_ij = bl.a[(i, j)] + if i == j { z } else { 0.0 };
                        let mphi_i = bl.a_phi[a][i] + z * bl.phi[i];
                        let mphi_j = bl.a_phi[a][j] + z * bl.phi[j];
                        q[(i, j)] = m_ij - (bl.phi[i] * mphi_j + mphi_i * bl.phi[j]) / s
                            + quad * bl.phi[i] * bl.phi[j] / (s * s);
                    }
                }
            } else {
                let coef = 0.5 * (bl.c[a] + bl.c[bb]) - 0.5 * z * (1.0 / bl.nsq[a] + 1.0 / bl.nsq[bb]);
                for &i in ia {
                    for &j in ib {
                        q[(i, j)] = -(bl.a_phi[a][i] * bl.phi[j] / bl.nsq[a] + bl.phi[i] * bl.a_phi[bb][j] / bl.nsq[bb])
                            + coef * bl.phi[i] * bl.phi[j]
                            + bl.a[(i, j)]
                            - b[(i, j)];
                    }
                }
            }
        }
    }
    q
}

fn evaluate_checks(bl: &Blocks, b: &DMatrix<f64>, q: &DMatrix<f64>, z: f64) -> CertificateChecks {
    let n = bl.phi.len();
    let lab = label_vector(&bl.clusters, n);
    let scale = bl.scale();

    let mut min_off = f64::INFINITY;
    let mut zeros = 0usize;
    let mut max_diag = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if lab[i] == lab[j] {
                max_diag = max_diag.max(b[(i, j)].abs());
            } else {
                min_off = min_off.min(b[(i, j)]);
                if b[(i, j)] == 0.0 {
                    zeros += 1;
                }
            }
        }
    }
    if bl.k() < 2 {
        min_off = f64::INFINITY;
    }
    let b_scale = max_abs(b).max(1.0);
    let asym = inf_norm(&(b - b.transpose()));

    let mut phi_id = 0.0f64;
    let mut q_phi = 0.0f64;
    for a in 0..bl.k() {
        for bb in 0..bl.k() {
            let ib = &bl.clusters[bb];
            for &i in &bl.clusters[a] {
                let qv: f64 = ib.iter().map(|&j| q[(i, j)] * bl.phi[j]).sum();
                q_phi = q_phi.max(qv.abs());
            }
            if a != bb {
                let u = bl.u(a, bb, z);
                for &i in &bl.clusters[a] {
                    let bv: f64 = ib.iter().map(|&j| b[(i, j)] * bl.phi[j]).sum();
                    phi_id = phi_id.max((bv - bl.nsq[bb] * u[i]).abs());
                }
            }
        }
    }

    let x = bl.x();
    let proj = DMatrix::identity(n, n) - &x;
    let q_proj = &proj * q * &proj;
    let q_proj = (&q_proj + q_proj.transpose()) * 0.5;
    let ev = sym_eigenvalues(&q_proj);
    let min_ev = ev.first().copied().unwrap_or(0.0);
    let spec = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    CertificateChecks {
        b_offdiag_positive: Check { pass: min_off > -B_POSITIVITY_TOL && zeros == 0, value: min_off },
        b_offdiag_zero_entries: zeros,
        b_diag_zero: Check { pass: max_diag <= IDENTITY_TOL * b_scale, value: max_diag },
        b_symmetric: Check { pass: asym <= IDENTITY_TOL * b_scale, value: asym },
        b_phi_identity: Check { pass: phi_id <= IDENTITY_TOL * scale, value: phi_id },
        q_annihilates_x: Check { pass: q_phi <= IDENTITY_TOL * scale, value: q_phi },
        q_tperp_psd: Check { pass: min_ev >= -PSD_TOL * spec.max(f64::MIN_POSITIVE), value: min_ev },
    }
}

fn certificate_at(bl: &Blocks, variant: Variant, z: f64, interval: (f64, f64), scanned: bool) -> CertificateReport {
    let b = build_b(bl, z);
    let q = build_q(bl, &b, z);
    let checks = evaluate_checks(bl, &b, &q, z);
    CertificateReport { variant, z, z_interval: interval, z_scanned: scanned, b, q, checks }
}

/// Builds `(B, Q)` at multiplier `z`, defaulting to the midpoint of the
/// admissible interval. When the midpoint fails a check, nine equispaced
/// interior points are tried before the midpoint report is returned.
pub fn build_certificate(g: &WeightedGraph, p: &Partition, variant: Variant, z: Option<f64>) -> Result<CertificateReport> {
    let bl = Blocks::new(g, p, variant)?;
    let prox = proximity_check(g, p, variant)?;
    let interval = prox.z_interval();
    if let Some(z) = z {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!("multiplier z = {z} is not finite")));
        }
        return Ok(certificate_at(&bl, variant, z, interval, false));
    }
    let (lo, hi) = interval;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::CertificateIntervalEmpty { lower: lo, upper: hi });
    }
    let mid = certificate_at(&bl, variant, 0.5 * (lo + hi), interval, false);
    if mid.checks.all_pass() {
        return Ok(mid);
    }
    for j in 1..=Z_SCAN_POINTS {
        let t = j as f64 / (Z_SCAN_POINTS + 1) as f64;
        let rep = certificate_at(&bl, variant, lo + t * (hi - lo), interval, true);
        if rep.checks.all_pass() {
            return Ok(rep);
        }
    }
    Ok(mid)
}

/// Largest entry of `|Q + B - (½(αφᵀ + φαᵀ) + zI + A)|` with `α = (α_1, …, α_k)`.
pub fn kkt_identity_residual(g: &WeightedGraph, p: &Partition, variant: Variant, report: &CertificateReport) -> Result<f64> {
    let bl = Blocks::new(g, p, variant)?;
    let n = bl.phi.len();
    if report.b.shape() != (n, n) || report.q.shape() != (n, n) {
        return Err(Error::InvalidInput("certificate shape does not match the graph".into()));
    }
    let mut alpha = DVector::zeros(n);
    for a in 0..bl.k() {
        alpha += bl.alpha(a, report.z);
    }
    let rhs = (&alpha * bl.phi.transpose() + &bl.phi * alpha.transpose()) * 0.5
        + DMatrix::identity(n, n) * report.z
        + &bl.a;
    Ok(max_abs(&(&report.q + &report.b - rhs)))
}

/// Re-derives every check from the report's matrices, confirms the
/// decomposition identity, and returns the conjunction.
pub fn verify_kkt(g: &WeightedGraph, p: &Partition, variant: Variant, report: &CertificateReport) -> bool {
    let Ok(bl) = Blocks::new(g, p, variant) else {
        return false;
    };
    let Ok(res) = kkt_identity_residual(g, p, variant, report) else {
        return false;
    };
    let checks = evaluate_checks(&bl, &report.b, &report.q, report.z);
    res <= IDENTITY_TOL * bl.scale() && checks.all_pass()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdModel {
    Circles,
    Lines,
    Sbm,
}

/// A closed-form sufficient condition evaluated at given parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEval {
    pub model: ThresholdModel,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Minimum separation `Δ` (circles, lines) or the `α` threshold (SBM).
    pub required: f64,
    /// Model separation `Δ` or `α`, when known.
    pub actual: Option<f64>,
    /// `actual >= required` for `Δ`, `actual > required` for `α`.
    pub satisfied: Option<bool>,
}

impl ThresholdEval {
    fn blank(model: ThresholdModel, required: f64) -> Self {
        Self {
            model,
            n: None,
            m: None,
            kappa: None,
            gamma: None,
            sigma: None,
            alpha: None,
            beta: None,
            required,
            actual: None,
            satisfied: None,
        }
    }

    pub fn with_actual(mut self, actual: f64) -> Self {
        self.actual = Some(actual);
        self.satisfied = Some(match self.model {
            ThresholdModel::Sbm => actual > self.required,
            _ => actual >= self.required,
        });
        self
    }
}

/// `γ` implied by a bandwidth for the circles model with `r1 = 1`:
/// `γ = σ² n² ln(m/2π) / 16`.
pub fn gamma_circles(n: usize, m: usize, sigma: f64) -> f64 {
    sigma * sigma * (n * n) as f64 * (m as f64 / (2.0 * std::f64::consts::PI)).ln() / 16.0
}

/// `γ` implied by a bandwidth for the lines model: `γ = σ² (n-1)² ln(n/π)`.
pub fn gamma_lines(n: usize, sigma: f64) -> f64 {
    sigma * sigma * ((n - 1) * (n - 1)) as f64 * (n as f64 / std::f64::consts::PI).ln()
}

/// Required `Δ = (4/n) √(1 + 2γ(2 + ln(4m)/ln(m/2π)))` for circles of radii
/// `1` and `κ`; `actual = κ - 1`; `σ² = 16γ / (n² ln(m/2π))`.
pub fn threshold_circles(n: usize, m: usize, kappa: f64, gamma: f64) -> Result<ThresholdEval> {
    if m <= 7 {
        return Err(Error::InvalidInput(format!("need m > 7, got {m}")));
    }
    if n < 7 {
        return Err(Error::InvalidInput(format!("need n >= 7, got {n}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma}")));
    }
    let lm = (m as f64 / (2.0 * std::f64::consts::PI)).ln();
    let required = 4.0 / n as f64 * (1.0 + 2.0 * gamma * (2.0 + (4.0 * m as f64).ln() / lm)).sqrt();
    let mut t = ThresholdEval::blank(ThresholdModel::Circles, required);
    t.n = Some(n);
    t.m = Some(m);
    t.kappa = Some(kappa);
    t.gamma = Some(gamma);
    t.sigma = Some((16.0 * gamma / ((n * n) as f64 * lm)).sqrt());
    Ok(t.with_actual(kappa - 1.0))
}

/// Required `Δ = (1/(n-1)) √(1 + 6γ ln n / ln(n/π))`;
/// `σ² = γ / ((n-1)² ln(n/π))`. Use [`ThresholdEval::with_actual`] to compare.
pub fn threshold_lines(n: usize, gamma: f64) -> Result<ThresholdEval> {
    if n <= 3 {
        return Err(Error::InvalidInput(format!("need n > 3, got {n}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma}")));
    }
    let nf = n as f64;
    let lp = (nf / std::f64::consts::PI).ln();
    let required = (1.0 + 6.0 * gamma * nf.ln() / lp).sqrt() / (nf - 1.0);
    let mut t = ThresholdEval::blank(ThresholdModel::Lines, required);
    t.n = Some(n);
    t.gamma = Some(gamma);
    t.sigma = Some((gamma / ((nf - 1.0) * (nf - 1.0) * lp)).sqrt());
    Ok(t)
}

/// `26 (1/3 + β/2 + √(1/9 + β))` for `β >= 0`.
pub fn threshold_sbm(beta: f64) -> f64 {
    26.0 * (1.0 / 3.0 + beta / 2.0 + (1.0 / 9.0 + beta).sqrt())
}

pub fn threshold_sbm_eval(alpha: f64, beta: f64) -> Result<ThresholdEval> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidInput(format!("beta must be nonnegative, got {beta}")));
    }
    let mut t = ThresholdEval::blank(ThresholdModel::Sbm, threshold_sbm(beta));
    t.alpha = Some(alpha);
    t.beta = Some(beta);
    Ok(t.with_actual(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwReport {
    /// `λ_2(D_iso - D_δ - W + ½ 11ᵀ)`.
    pub eigen_value: f64,
    pub eigen_test: bool,
    /// `min_a λ_2(L_iso^{(a,a)})`.
    pub min_lambda2: f64,
    pub d_delta_norm: f64,
    /// `min λ_2 > 2‖D_δ‖`.
    pub sufficient: bool,
    /// `sufficient ⇒ eigen_test`.
    pub implication_holds: bool,
}

/// Two clusters of equal size only.
pub fn gw_check(g: &WeightedGraph, p: &Partition) -> Result<GwReport> {
    p.check_size(g.n())?;
    if p.k() != 2 || p.sizes()[0] != p.sizes()[1] {
        return Err(Error::NotApplicable(format!("needs two equal clusters, got sizes {:?}", p.sizes())));
    }
    let s = split(g, p)?;
    let n = g.n();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { s.d_iso[i] - s.d_delta[i] } else { 0.0 };
        diag - g.weights()[(i, j)] + 0.5
    });
    let eigen_value = sym_eigenvalues(&m)[1];
    let prox = proximity_check(g, p, Variant::RatioCut)?;
    let min_lambda2 = prox.lambda_k1;
    let sufficient = min_lambda2 > 2.0 * s.d_delta_norm;
    let eigen_test = eigen_value > 0.0;
    Ok(GwReport {
        eigen_value,
        eigen_test,
        min_lambda2,
        d_delta_norm: s.d_delta_norm,
        sufficient,
        implication_holds: !sufficient || eigen_test,
    })
}
