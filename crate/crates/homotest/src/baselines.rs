//! Persistence-based comparison tests: Wasserstein permutation test with a
//! joint loss, the mean-landscape test, and a plain diagram permutation
//! test. All share the Rips-filtration configuration (diameter threshold,
//! homology dimension) of the experiment suite.

use ordered_float::OrderedFloat;
use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres_min;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::build_rips_filtration;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::homology::{reduce_filtration, PersistenceDiagram};
use crate::stats::replication_rng;

/// Loss functions for the permutation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationLoss {
    /// Sum of Wasserstein distances over homology dimensions 0 and `dim`
    /// (Robinson-style joint loss).
    WassersteinJoint,
    /// Absolute difference of the means of the first landscape functions.
    MeanLandscapeDiff,
    /// Wasserstein distance in dimension `dim` only.
    WassersteinPlain,
}

/// `q`-th power of the `p`-th Wasserstein distance between the dimension-
/// `dim` parts of two diagrams, with L-infinity ground metric and diagonal
/// matching allowed. Infinite-death pairs are excluded. Exact via the
/// Hungarian algorithm on the augmented (points + diagonal copies) matrix.
pub fn wasserstein_distance(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    p: f64,
    q: f64,
    dim: usize,
) -> f64 {
    assert!(p >= 1.0 && q >= 1.0);
    let xs: Vec<(f64, f64)> = a.finite_pairs(dim).map(|x| (x.birth, x.death)).collect();
    let ys: Vec<(f64, f64)> = b.finite_pairs(dim).map(|x| (x.birth, x.death)).collect();
    let cost = matching_cost_pth_power(&xs, &ys, p);
    cost.powf(q / p)
}

/// Minimal total `cost^p` over matchings of `xs` and `ys` where any point
/// may instead match its diagonal projection.
fn matching_cost_pth_power(xs: &[(f64, f64)], ys: &[(f64, f64)], p: f64) -> f64 {
    let (m, n) = (xs.len(), ys.len());
    if m == 0 && n == 0 {
        return 0.0;
    }
    let diag_cost = |pt: &(f64, f64)| ((pt.1 - pt.0) / 2.0).powf(p);
    let pair_cost =
        |x: &(f64, f64), y: &(f64, f64)| (x.0 - y.0).abs().max((x.1 - y.1).abs()).powf(p);
    // A forbidden-entry bound: larger than any matching that avoids it.
    let big: f64 = xs.iter().map(diag_cost).sum::<f64>()
        + ys.iter().map(diag_cost).sum::<f64>()
        + 1.0;
    let size = m + n;
    // Rows: xs then diagonal copies of ys. Cols: ys then diagonal copies of xs.
    let mut rows = Vec::with_capacity(size);
    for (i, x) in xs.iter().enumerate() {
        let mut row = Vec::with_capacity(size);
        for y in ys {
            row.push(OrderedFloat(pair_cost(x, y)));
        }
        for j in 0..m {
            row.push(OrderedFloat(if i == j { diag_cost(x) } else { big }));
        }
        rows.push(row);
    }
    for (i, y) in ys.iter().enumerate() {
        let mut row = Vec::with_capacity(size);
        for j in 0..n {
            row.push(OrderedFloat(if i == j { diag_cost(y) } else { big }));
        }
        row.extend(std::iter::repeat(OrderedFloat(0.0)).take(m));
        rows.push(row);
    }
    let matrix = Matrix::from_rows(rows).expect("square cost matrix");
    let (total, _assignment) = kuhn_munkres_min(&matrix);
    total.into_inner()
}

/// A persistence landscape `λ_k` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeFunction {
    pub k: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl LandscapeFunction {
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }
}

/// `λ_k(t)`: the k-th largest tent value `max(0, min(t - b, d - t))` over
/// the finite dimension-`dim` pairs of the diagram.
pub fn landscape(
    diag: &PersistenceDiagram,
    dim: usize,
    k: usize,
    grid: &[f64],
) -> LandscapeFunction {
    assert!(k >= 1);
    let pairs: Vec<(f64, f64)> = diag.finite_pairs(dim).map(|p| (p.birth, p.death)).collect();
    let values = grid
        .iter()
        .map(|&t| {
            let mut tents: Vec<f64> = pairs
                .iter()
                .map(|&(b, d)| (t - b).min(d - t).max(0.0))
                .filter(|&v| v > 0.0)
                .collect();
            if tents.len() < k {
                0.0
            } else {
                tents.sort_by(|a, b| b.total_cmp(a));
                tents[k - 1]
            }
        })
        .collect();
    LandscapeFunction { k, grid: grid.to_vec(), values }
}

/// Equally spaced grid of `points` values on `[0, max_threshold]`.
pub fn landscape_grid(max_threshold: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| max_threshold * i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationTestResult {
    pub observed_loss: f64,
    pub permutation_losses: Vec<f64>,
    pub p_value: f64,
    pub n_permutations: usize,
}

/// Configuration shared by the three baseline tests.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub loss: PermutationLoss,
    pub n_permutations: usize,
    pub max_threshold: f64,
    pub dim: usize,
    pub landscape_grid_points: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            loss: PermutationLoss::WassersteinJoint,
            n_permutations: 30,
            max_threshold: 4.0,
            dim: 1,
            landscape_grid_points: 1000,
        }
    }
}

fn diagram_of(points: &[Vec<f64>], cfg: &BaselineConfig) -> Result<PersistenceDiagram> {
    let pc = PointCloud::new(points.to_vec())?;
    let fc = build_rips_filtration(&pc.pairwise_distances(), cfg.max_threshold, cfg.dim + 1);
    reduce_filtration(&fc)
}

fn loss_between(x: &[Vec<f64>], y: &[Vec<f64>], cfg: &BaselineConfig) -> Result<f64> {
    let dx = diagram_of(x, cfg)?;
    let dy = diagram_of(y, cfg)?;
    Ok(match cfg.loss {
        PermutationLoss::WassersteinJoint => {
            wasserstein_distance(&dx, &dy, 1.0, 1.0, 0)
                + wasserstein_distance(&dx, &dy, 1.0, 1.0, cfg.dim)
        }
        PermutationLoss::WassersteinPlain => wasserstein_distance(&dx, &dy, 1.0, 1.0, cfg.dim),
        PermutationLoss::MeanLandscapeDiff => {
            let grid = landscape_grid(cfg.max_threshold, cfg.landscape_grid_points);
            let lx = landscape(&dx, cfg.dim, 1, &grid);
            let ly = landscape(&dy, cfg.dim, 1, &grid);
            (lx.mean() - ly.mean()).abs()
        }
    })
}

/// Two-sample permutation test: the observed loss on the original labeling
/// against losses on uniformly random relabelings of the pooled cloud that
/// preserve group sizes. Add-one p-value.
pub fn permutation_two_sample_test(
    x: &PointCloud,
    y: &PointCloud,
    cfg: &BaselineConfig,
    seed: u64,
) -> Result<PermutationTestResult> {
    if cfg.n_permutations == 0 {
        return Err(Error::Domain("n_permutations must be >= 1".into()));
    }
    if x.dim() != y.dim() {
        return Err(Error::LengthMismatch(x.dim(), y.dim()));
    }
    let observed = loss_between(x.points(), y.points(), cfg)?;
    let mut pooled: Vec<Vec<f64>> = x.points().to_vec();
    pooled.extend_from_slice(y.points());
    let n1 = x.len();
    let permutation_losses = (0..cfg.n_permutations)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(seed, i as u64, 0);
            let mut relabeled = pooled.clone();
            relabeled.shuffle(&mut rng);
            loss_between(&relabeled[..n1], &relabeled[n1..], cfg)
        })
        .collect::<Result<Vec<f64>>>()?;
    let exceed = permutation_losses.iter().filter(|&&l| l >= observed).count();
    let p_value = (1 + exceed) as f64 / (1 + cfg.n_permutations) as f64;
    Ok(PermutationTestResult {
        observed_loss: observed,
        permutation_losses,
        p_value,
        n_permutations: cfg.n_permutations,
    })
}
