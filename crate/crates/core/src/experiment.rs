//! Monte Carlo grids over separation `Δ` and bandwidth parameter `p`, and
//! threshold tables.
//!
//! Trial `t` of separation index `i` draws its dataset from
//! `SplitMix64::substream(seed, i * 2^32 + t)`. The same datasets are reused
//! across the `p` columns of a row. Results therefore do not depend on the
//! order in which cells run.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certify::{
    gamma_circles, gamma_lines, proximity_check_both, threshold_circles, threshold_lines, threshold_sbm_eval,
    ThresholdEval,
};
use crate::datagen::{gen_balls, gen_circles_random, gen_lines_random, Dataset};
use crate::error::{Error, Result};
use crate::kernel_graph::{build_graph, KernelSpec};
use crate::partition::{ground_truth_x, Variant};
use crate::rng::SplitMix64;
use crate::sdp::{exactness_gap, make_problem, solve, SolverOptions, EXACT_GAP};

/// `√(3/2) - 1`: at or below this separation the k-means SDP cannot recover
/// two unit balls exactly.
pub const KMEANS_SDP_IMPOSSIBILITY: f64 = 0.224_744_871_391_589;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridModel {
    Circles,
    Lines,
    Balls,
}

impl std::str::FromStr for GridModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circles" => Ok(GridModel::Circles),
            "lines" => Ok(GridModel::Lines),
            "balls" => Ok(GridModel::Balls),
            _ => Err(Error::InvalidInput(format!("unknown grid model '{s}'"))),
        }
    }
}

/// Bandwidth as a function of the grid parameter `p` and cluster size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// `σ = p / n`
    OverN,
    /// `σ = p / (2n)`
    OverTwoN,
    /// `σ = p / (5 √n)`
    OverFiveSqrtN,
}

impl SigmaRule {
    pub fn sigma(self, p: f64, n: usize) -> f64 {
        let n = n as f64;
        match self {
            SigmaRule::OverN => p / n,
            SigmaRule::OverTwoN => p / (2.0 * n),
            SigmaRule::OverFiveSqrtN => p / (5.0 * n.sqrt()),
        }
    }

    /// The rule customarily paired with each model.
    pub fn default_for(model: GridModel) -> Self {
        match model {
            GridModel::Circles => SigmaRule::OverN,
            GridModel::Lines => SigmaRule::OverTwoN,
            GridModel::Balls => SigmaRule::OverFiveSqrtN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridMode {
    /// Count trials satisfying each proximity condition.
    ConditionCheck,
    /// Also solve both SDPs and count exact recoveries.
    FullSdp,
}

#[derive(Debug, Clone)]
pub struct ExperimentGrid {
    pub model: GridModel,
    /// Points in the first cluster (circles) or in each cluster (lines, balls).
    pub n: usize,
    pub deltas: Vec<f64>,
    pub ps: Vec<f64>,
    pub sigma_rule: SigmaRule,
    pub trials: usize,
    pub mode: GridMode,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl ExperimentGrid {
    pub fn new(model: GridModel, n: usize, deltas: Vec<f64>, ps: Vec<f64>) -> Self {
        Self {
            model,
            n,
            deltas,
            ps,
            sigma_rule: SigmaRule::default_for(model),
            trials: 50,
            mode: GridMode::ConditionCheck,
            seed: 0,
            solver: SolverOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.deltas.is_empty() || self.ps.is_empty() {
            return Err(Error::InvalidInput("grid axes must be nonempty".into()));
        }
        if self.deltas.iter().chain(&self.ps).any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput("grid values must be positive".into()));
        }
        Ok(())
    }

    pub fn dataset(&self, delta_index: usize, trial: usize) -> Result<Dataset> {
        let stream = ((delta_index as u64) << 32) | trial as u64;
        let seed = SplitMix64::substream(self.seed, stream).next_u64();
        let delta = self.deltas[delta_index];
        match self.model {
            GridModel::Circles => gen_circles_random(self.n, 1.0, delta, seed),
            GridModel::Lines => gen_lines_random(self.n, delta, seed),
            GridModel::Balls => gen_balls(self.n, delta, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub delta: f64,
    pub p: f64,
    pub sigma: f64,
    pub trials: usize,
    pub ratiocut_condition: usize,
    pub ncut_condition: usize,
    /// Exact SDP recoveries (full-sdp mode only).
    pub ratiocut_sdp: Option<usize>,
    pub ncut_sdp: Option<usize>,
    /// SDP solves that hit the iteration limit.
    pub sdp_nonconverged: usize,
    /// Trials that raised an error; they count as failures.
    pub failed_trials: usize,
    pub seconds: f64,
}

impl CellResult {
    pub fn fraction(&self, variant: Variant) -> f64 {
        let s = match variant {
            Variant::RatioCut => self.ratiocut_condition,
            Variant::NCut => self.ncut_condition,
        };
        s as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub model: GridModel,
    pub n: usize,
    pub deltas: Vec<f64>,
    pub ps: Vec<f64>,
    /// Row-major: `cells[i * ps.len() + j]` is `(deltas[i], ps[j])`.
    pub cells: Vec<CellResult>,
    pub seconds: f64,
}

#[derive(Default)]
struct TrialOutcome {
    rcut: bool,
    ncut: bool,
    rcut_sdp: bool,
    ncut_sdp: bool,
    nonconverged: usize,
}

fn run_trial(grid: &ExperimentGrid, data: &Dataset, sigma: f64) -> Result<TrialOutcome> {
    let g = build_graph(&data.points, &KernelSpec::heat(sigma)?)?;
    let (rc, nc) = proximity_check_both(&g, &data.truth)?;
    let mut out = TrialOutcome { rcut: rc.holds, ncut: nc.holds, ..Default::default() };
    if grid.mode == GridMode::FullSdp {
        for variant in [Variant::RatioCut, Variant::NCut] {
            let sol = solve(&make_problem(&g, data.truth.k(), variant)?, &grid.solver)?;
            if !sol.converged {
                out.nonconverged += 1;
            }
            let exact = sol.converged && exactness_gap(&sol, &ground_truth_x(&g, &data.truth, variant)?) <= EXACT_GAP;
            match variant {
                Variant::RatioCut => out.rcut_sdp = exact,
                Variant::NCut => out.ncut_sdp = exact,
            }
        }
    }
    Ok(out)
}

/// Runs every cell. Per-trial errors are counted, never propagated.
pub fn run_grid(grid: &ExperimentGrid) -> Result<GridResult> {
    grid.validate()?;
    let start = Instant::now();
    let full = grid.mode == GridMode::FullSdp;
    let mut cells = Vec::with_capacity(grid.deltas.len() * grid.ps.len());
    for (i, &delta) in grid.deltas.iter().enumerate() {
        let datasets: Vec<Result<Dataset>> = (0..grid.trials).map(|t| grid.dataset(i, t)).collect();
        for &p in &grid.ps {
            let cell_start = Instant::now();
            let sigma = grid.sigma_rule.sigma(p, grid.n);
            let mut cell = CellResult {
                delta,
                p,
                sigma,
                trials: grid.trials,
                ratiocut_condition: 0,
                ncut_condition: 0,
                ratiocut_sdp: full.then_some(0),
                ncut_sdp: full.then_some(0),
                sdp_nonconverged: 0,
                failed_trials: 0,
                seconds: 0.0,
            };
            for data in &datasets {
                let outcome = data.as_ref().map_err(Clone::clone).and_then(|d| run_trial(grid, d, sigma));
                match outcome {
                    Ok(o) => {
                        cell.ratiocut_condition += o.rcut as usize;
                        cell.ncut_condition += o.ncut as usize;
                        if let Some(c) = cell.ratiocut_sdp.as_mut() {
                            *c += o.rcut_sdp as usize;
                        }
                        if let Some(c) = cell.ncut_sdp.as_mut() {
                            *c += o.ncut_sdp as usize;
                        }
                        cell.sdp_nonconverged += o.nonconverged;
                    }
                    Err(_) => cell.failed_trials += 1,
                }
            }
            cell.seconds = cell_start.elapsed().as_secs_f64();
            cells.push(cell);
        }
    }
    Ok(GridResult {
        model: grid.model,
        n: grid.n,
        deltas: grid.deltas.clone(),
        ps: grid.ps.clone(),
        cells,
        seconds: start.elapsed().as_secs_f64(),
    })
}

impl GridResult {
    pub fn cell(&self, delta_index: usize, p_index: usize) -> &CellResult {
        &self.cells[delta_index * self.ps.len() + p_index]
    }

    /// CSV with a header row `delta,p_1,p_2,...`; one row per `Δ`, values
    /// are success fractions for the given condition.
    pub fn heatmap_csv(&self, variant: Variant) -> String {
        let mut s = String::from("delta");
        for p in &self.ps {
            write!(s, ",{p}").unwrap();
        }
        s.push('\n');
        for (i, d) in self.deltas.iter().enumerate() {
            write!(s, "{d}").unwrap();
            for j in 0..self.ps.len() {
                write!(s, ",{}", self.cell(i, j).fraction(variant)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// gnuplot `matrix nonuniform` layout: first row is `N p_1 ... p_m`,
    /// then `Δ_i f_i1 ... f_im`.
    pub fn heatmap_gnuplot(&self, variant: Variant) -> String {
        let mut s = self.ps.len().to_string();
        for p in &self.ps {
            write!(s, " {p}").unwrap();
        }
        s.push('\n');
        for (i, d) in self.deltas.iter().enumerate() {
            write!(s, "{d}").unwrap();
            for j in 0..self.ps.len() {
                write!(s, " {}", self.cell(i, j).fraction(variant)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Writes `<stem>_ratiocut.csv`, `<stem>_ncut.csv` and matching `.dat` files.
    pub fn write_heatmaps(&self, dir: &std::path::Path, stem: &str) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for v in [Variant::RatioCut, Variant::NCut] {
            let csv = dir.join(format!("{stem}_{v}.csv"));
            std::fs::write(&csv, self.heatmap_csv(v))?;
            let dat = dir.join(format!("{stem}_{v}.dat"));
            std::fs::write(&dat, self.heatmap_gnuplot(v))?;
            written.push(csv);
            written.push(dat);
        }
        Ok(written)
    }
}

/// Range of `p` where recovery was observed empirically at separation `Δ`,
/// or `None` outside the observed regime.
pub fn empirical_p_range(model: GridModel, n: usize, delta: f64) -> Option<(f64, f64)> {
    let (min_delta, lo, hi) = match (model, n) {
        (GridModel::Circles, 250) => (0.2, 5.0, 75.0 * delta - 8.0),
        (GridModel::Lines, 250) => (0.05, 2.0, 150.0 * delta - 4.0),
        (GridModel::Balls, 250) => (0.2, 2.0, 40.0 * delta - 4.0),
        (GridModel::Balls, 1000) => (0.1, 2.0, 60.0 * delta - 2.0),
        _ => return None,
    };
    (delta >= min_delta && lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ThresholdQuery {
    /// Circles of radii 1 and `κ`; `m = ⌊nκ⌋` points on the outer circle.
    Circles { n: usize, kappa: f64, sigma: f64 },
    Lines { n: usize, delta: f64, sigma: f64 },
    Sbm { alpha: f64, beta: f64 },
    Balls { n: usize, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub name: String,
    pub actual: f64,
    pub required: f64,
    pub satisfied: bool,
    pub detail: Option<ThresholdEval>,
    pub note: String,
}

/// Compares model parameters with the closed-form sufficient conditions and,
/// for balls, with the k-means SDP impossibility bound and the empirical
/// success region.
pub fn report_thresholds(query: &ThresholdQuery) -> Result<Vec<ThresholdRow>> {
    let row = |name: &str, e: ThresholdEval, note: String| ThresholdRow {
        name: name.into(),
        actual: e.actual.unwrap_or(f64::NAN),
        required: e.required,
        satisfied: e.satisfied.unwrap_or(false),
        detail: Some(e),
        note,
    };
    match *query {
        ThresholdQuery::Circles { n, kappa, sigma } => {
            let m = (n as f64 * kappa + 1e-9).floor() as usize;
            let gamma = gamma_circles(n, m, sigma);
            let e = threshold_circles(n, m, kappa, gamma)?;
            Ok(vec![row("circles_delta", e, format!("m={m}, gamma={gamma:.6}"))])
        }
        ThresholdQuery::Lines { n, delta, sigma } => {
            let gamma = gamma_lines(n, sigma);
            let e = threshold_lines(n, gamma)?.with_actual(delta);
            Ok(vec![row("lines_delta", e, format!("gamma={gamma:.6}"))])
        }
        ThresholdQuery::Sbm { alpha, beta } => {
            let e = threshold_sbm_eval(alpha, beta)?;
            Ok(vec![row("sbm_alpha", e, format!("beta={beta}"))])
        }
        ThresholdQuery::Balls { n, delta } => {
            if !(delta.is_finite() && delta >= 0.0) {
                return Err(Error::InvalidInput(format!("delta must be nonnegative, got {delta}")));
            }
            let mut rows = vec![ThresholdRow {
                name: "kmeans_sdp_possible".into(),
                actual: delta,
                required: KMEANS_SDP_IMPOSSIBILITY,
                satisfied: delta > KMEANS_SDP_IMPOSSIBILITY,
                detail: None,
                note: if delta <= KMEANS_SDP_IMPOSSIBILITY {
                    "below the k-means SDP impossibility bound".into()
                } else {
                    "above the k-means SDP impossibility bound".into()
                },
            }];
            let region = empirical_p_range(GridModel::Balls, n, delta);
            rows.push(ThresholdRow {
                name: "spectral_sdp_empirical_region".into(),
                actual: delta,
                required: match n {
                    250 => 0.2,
                    1000 => 0.1,
                    _ => f64::NAN,
                },
                satisfied: region.is_some(),
                detail: None,
                note: match region {
                    Some((lo, hi)) => format!("sigma = p/(5 sqrt(n)) with {lo} <= p <= {hi}"),
                    None => "outside the observed success region (recorded for n = 250 and n = 1000)".into(),
                },
            });
            Ok(rows)
        }
    }
}
