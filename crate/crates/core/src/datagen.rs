//! Synthetic data with planted ground truth: concentric circles, parallel
//! lines, two disks, and a two-block stochastic block model.
//!
//! Every generator is a pure function of its parameters and seed. Cluster 0
//! always occupies the first indices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel_graph::{PointSet, WeightedGraph};
use crate::partition::Partition;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    CirclesDeterministic { n: usize, m: usize, r1: f64, kappa: f64 },
    CirclesRandom { n: usize, m: usize, r1: f64, delta: f64 },
    LinesDeterministic { n: usize, delta: f64 },
    LinesRandom { n: usize, delta: f64 },
    Balls { n: usize, delta: f64 },
    Sbm { n: usize, alpha: f64, beta: f64, p: f64, q: f64 },
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: PointSet,
    pub truth: Partition,
    pub params: ModelParams,
    pub seed: Option<u64>,
}

/// Two-block SBM adjacency; the diagonal is zero.
#[derive(Debug, Clone)]
pub struct SbmGraph {
    pub w: DMatrix<f64>,
    pub p: f64,
    pub q: f64,
    pub truth: Partition,
    pub zero_diagonal: bool,
    pub params: ModelParams,
    pub seed: u64,
}

impl SbmGraph {
    pub fn graph(&self) -> Result<WeightedGraph> {
        WeightedGraph::from_weights(self.w.clone())
    }
}

/// `⌊n κ⌋`, guarded against products like `50 * 1.5` landing just below an integer.
fn floor_product(n: usize, factor: f64) -> usize {
    (n as f64 * factor + 1e-9).floor() as usize
}

fn circle_point(r: f64, theta: f64) -> Vec<f64> {
    vec![r * theta.cos(), r * theta.sin()]
}

fn finite_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {x}")))
    }
}

/// Inner circle of radius `r1` with `n` equispaced points, outer circle of
/// radius `κ r1` with `m = ⌊nκ⌋` equispaced points.
pub fn gen_circles_deterministic(n: usize, r1: f64, kappa: f64) -> Result<Dataset> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    finite_positive("r1", r1)?;
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidInput(format!("need kappa > 1, got {kappa}")));
    }
    let m = floor_product(n, kappa);
    let mut pts: Vec<Vec<f64>> = (1..=n).map(|i| circle_point(r1, 2.0 * PI * i as f64 / n as f64)).collect();
    pts.extend((1..=m).map(|j| circle_point(kappa * r1, 2.0 * PI * j as f64 / m as f64)));
    Ok(Dataset {
        points: PointSet::new(pts)?,
        truth: Partition::contiguous(&[n, m])?,
        params: ModelParams::CirclesDeterministic { n, m, r1, kappa },
        seed: None,
    })
}

/// Angles i.i.d. uniform on `[0, 2π)`; radii `r1` and `r1 (1 + Δ)`; outer
/// size `⌊n (1 + Δ)⌋`.
pub fn gen_circles_random(n: usize, r1: f64, delta: f64, seed: u64) -> Result<Dataset> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    finite_positive("r1", r1)?;
    finite_positive("delta", delta)?;
    let m = floor_product(n, 1.0 + delta);
    let r2 = r1 * (1.0 + delta);
    let mut rng = SplitMix64::new(seed);
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| circle_point(r1, 2.0 * PI * rng.next_f64())).collect();
    pts.extend((0..m).map(|_| circle_point(r2, 2.0 * PI * rng.next_f64())));
    Ok(Dataset {
        points: PointSet::new(pts)?,
        truth: Partition::contiguous(&[n, m])?,
        params: ModelParams::CirclesRandom { n, m, r1, delta },
        seed: Some(seed),
    })
}

/// `[∓Δ/2, (i-1)/(n-1)]` for `i = 1..n`.
pub fn gen_lines_deterministic(n: usize, delta: f64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2, got {n}")));
    }
    finite_positive("delta", delta)?;
    let h = |i: usize| i as f64 / (n - 1) as f64;
    let mut pts: Vec<Vec<f64>> = (0..n).map(|i| vec![-delta / 2.0, h(i)]).collect();
    pts.extend((0..n).map(|i| vec![delta / 2.0, h(i)]));
    Ok(Dataset {
        points: PointSet::new(pts)?,
        truth: Partition::contiguous(&[n, n])?,
        params: ModelParams::LinesDeterministic { n, delta },
        seed: None,
    })
}

/// `[∓Δ/2, u]` with heights `u` i.i.d. uniform on `[0, 1)`.
pub fn gen_lines_random(n: usize, delta: f64, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need n >= 2, got {n}")));
    }
    finite_positive("delta", delta)?;
    let mut rng = SplitMix64::new(seed);
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| vec![-delta / 2.0, rng.next_f64()]).collect();
    pts.extend((0..n).map(|_| vec![delta / 2.0, rng.next_f64()]));
    Ok(Dataset {
        points: PointSet::new(pts)?,
        truth: Partition::contiguous(&[n, n])?,
        params: ModelParams::LinesRandom { n, delta },
        seed: Some(seed),
    })
}

/// Uniform samples from unit disks centred at `(∓(Δ/2 + 1), 0)`, drawn as
/// radius `√u` and angle `2πv`.
pub fn gen_balls(n: usize, delta: f64, seed: u64) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidInput(format!("delta must be nonnegative, got {delta}")));
    }
    let mut rng = SplitMix64::new(seed);
    let c = delta / 2.0 + 1.0;
    let mut disk = |cx: f64| {
        let r = rng.next_f64().sqrt();
        let t = 2.0 * PI * rng.next_f64();
        vec![cx + r * t.cos(), r * t.sin()]
    };
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| disk(-c)).collect();
    pts.extend((0..n).map(|_| disk(c)));
    Ok(Dataset {
        points: PointSet::new(pts)?,
        truth: Partition::contiguous(&[n, n])?,
        params: ModelParams::Balls { n, delta },
        seed: Some(seed),
    })
}

/// `N = 2n` vertices, `p = α ln N / N` within blocks and `q = β ln N / N`
/// across. Pairs `i < j` are drawn in row-major order.
pub fn gen_sbm(n: usize, alpha: f64, beta: f64, seed: u64) -> Result<SbmGraph> {
    if n < 1 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    let big_n = 2 * n;
    let scale = (big_n as f64).ln() / big_n as f64;
    let (p, q) = (alpha * scale, beta * scale);
    for (name, x) in [("p", p), ("q", q)] {
        if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidInput(format!(
                "{name} = {x} is not a probability (alpha={alpha}, beta={beta}, N={big_n})"
            )));
        }
    }
    let mut rng = SplitMix64::new(seed);
    let mut w = DMatrix::zeros(big_n, big_n);
    for i in 0..big_n {
        for j in (i + 1)..big_n {
            let prob = if (i < n) == (j < n) { p } else { q };
            if rng.bernoulli(prob) {
                w[(i, j)] = 1.0;
                w[(j, i)] = 1.0;
            }
        }
    }
    Ok(SbmGraph {
        w,
        p,
        q,
        truth: Partition::contiguous(&[n, n])?,
        zero_diagonal: true,
        params: ModelParams::Sbm { n, alpha, beta, p, q },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(p: &[f64]) -> f64 {
        (p[0] * p[0] + p[1] * p[1]).sqrt()
    }

    #[test]
    fn deterministic_circles_layout() {
        let d = gen_circles_deterministic(50, 1.0, 1.5).unwrap();
        assert_eq!(d.points.len(), 125);
        assert_eq!(d.truth.sizes(), &[50, 75]);
        for i in 0..50 {
            assert!((norm(d.points.point(i)) - 1.0).abs() < 1e-15);
        }
        for i in 50..125 {
            assert!((norm(d.points.point(i)) - 1.5).abs() < 1e-15);
        }
        let a = d.points.point(0);
        let b = d.points.point(1);
        let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!((chord - 2.0 * (PI / 50.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn random_circles_sizes_and_radii() {
        let d = gen_circles_random(250, 1.0, 0.2, 3).unwrap();
        assert_eq!(d.truth.sizes(), &[250, 300]);
        for i in 0..250 {
            assert!((norm(d.points.point(i)) - 1.0).abs() < 1e-14);
        }
        for i in 250..550 {
            assert!((norm(d.points.point(i)) - 1.2).abs() < 1e-14);
        }
        let again = gen_circles_random(250, 1.0, 0.2, 3).unwrap();
        assert_eq!(d.points, again.points);
        assert_ne!(d.points, gen_circles_random(250, 1.0, 0.2, 4).unwrap().points);
    }

    #[test]
    fn lines_geometry() {
        let d = gen_lines_deterministic(50, 0.49).unwrap();
        assert_eq!(d.points.len(), 100);
        let p = d.points.point(1);
        assert!((p[1] - 1.0 / 49.0).abs() < 1e-15);
        assert_eq!(d.points.point(0)[0], -0.245);
        assert_eq!(d.points.point(50)[0], 0.245);

        let r = gen_lines_random(250, 0.1, 8).unwrap();
        assert_eq!(r.points.len(), 500);
        let mut min_gap = f64::INFINITY;
        for i in 0..250 {
            for j in 250..500 {
                let (a, b) = (r.points.point(i), r.points.point(j));
                min_gap = min_gap.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        assert!(min_gap >= 0.1 - 1e-15);
        assert_eq!(r.points, gen_lines_random(250, 0.1, 8).unwrap().points);
    }

    #[test]
    fn balls_inside_disks_and_uniform() {
        let d = gen_balls(50_000, 0.3, 1).unwrap();
        let c = 1.15;
        let mut mean_r = 0.0;
        for i in 0..100_000 {
            let p = d.points.point(i);
            let cx = if i < 50_000 { -c } else { c };
            let r = ((p[0] - cx).powi(2) + p[1].powi(2)).sqrt();
            assert!(r <= 1.0 + 1e-15);
            mean_r += r;
        }
        // E r = 2/3 for the uniform disk
        assert!((mean_r / 100_000.0 - 2.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn sbm_structure() {
        let g = gen_sbm(50, 5.0, 0.0, 2).unwrap();
        for i in 0..50 {
            for j in 50..100 {
                assert_eq!(g.w[(i, j)], 0.0);
            }
        }
        for i in 0..100 {
            assert_eq!(g.w[(i, i)], 0.0);
        }
        assert_eq!(g.w, g.w.transpose());
        assert!(g.w.iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn sbm_rejects_probabilities_above_one() {
        // N = 200: ln(200)/200 ≈ 0.0265, so alpha = 58.9 gives p ≈ 1.56
        assert!(matches!(gen_sbm(100, 58.9, 1.0, 0), Err(Error::InvalidInput(_))));
        assert!(gen_sbm(100, 37.0, 1.0, 0).is_ok());
    }
}
