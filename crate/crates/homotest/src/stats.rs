//! Betti-number test statistics, threshold rules, Monte Carlo critical
//! values and power estimation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{build_rips, is_connected};
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Scaling};
use crate::homology::{betti_numbers, BettiVector};
use crate::samplers::{sample_with_rng, DistributionSpec};

/// Connectivity regime of the random complex as `n` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n * eps^d -> constant`; `eps = n^{-1/d}`.
    Critical,
    /// `n * eps^d -> infinity`; `eps = (ln n / n)^{1/d}`.
    Supercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Critical => write!(f, "critical"),
            Regime::Supercritical => write!(f, "supercritical"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "critical" => Ok(Regime::Critical),
            "supercritical" => Ok(Regime::Supercritical),
            other => Err(Error::Domain(format!("unknown regime `{other}`"))),
        }
    }
}

/// `eps(n) = n^{-1/d}`.
pub fn epsilon_critical(n: usize, d: usize) -> f64 {
    assert!(n >= 1 && d >= 1);
    (n as f64).powf(-1.0 / d as f64)
}

/// `eps(n) = ((ln n) / n)^{1/d}`; requires `n >= 2`.
pub fn epsilon_supercritical(n: usize, d: usize) -> Result<f64> {
    assert!(d >= 1);
    if n < 2 {
        return Err(Error::Domain(format!(
            "supercritical rule requires n >= 2, got {n}"
        )));
    }
    Ok(((n as f64).ln() / n as f64).powf(1.0 / d as f64))
}

/// A regime together with the data dimension, resolving `eps(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub regime: Regime,
    pub dim: usize,
}

impl ThresholdRule {
    pub fn new(regime: Regime, dim: usize) -> Self {
        Self { regime, dim }
    }

    pub fn epsilon(&self, n: usize) -> Result<f64> {
        match self.regime {
            Regime::Critical => Ok(epsilon_critical(n, self.dim)),
            Regime::Supercritical => epsilon_supercritical(n, self.dim),
        }
    }
}

/// `T_n = sum_i |est_i - hyp_i|`.
pub fn one_sample_statistic(est: &BettiVector, hyp: &BettiVector) -> Result<u64> {
    l1_distance(est, hyp)
}

/// `T_{n1,n2} = sum_i |a_i - b_i|`.
pub fn two_sample_statistic(a: &BettiVector, b: &BettiVector) -> Result<u64> {
    l1_distance(a, b)
}

fn l1_distance(a: &BettiVector, b: &BettiVector) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum())
}

/// Which empirical quantile estimates the critical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuantileMode {
    /// `(1 - alpha/2)` quantile.
    #[default]
    OneMinusHalfAlpha,
    /// `(1 - alpha)` quantile, the standard one-sided choice.
    OneMinusAlpha,
}

impl QuantileMode {
    fn level(self, alpha: f64) -> f64 {
        match self {
            QuantileMode::OneMinusHalfAlpha => 1.0 - alpha / 2.0,
            QuantileMode::OneMinusAlpha => 1.0 - alpha,
        }
    }
}

/// Empirical quantile as the order statistic at rank `ceil(r * q)`,
/// without interpolation.
pub fn estimate_critical_value(
    null_stats: &[f64],
    alpha: f64,
    mode: QuantileMode,
) -> Result<f64> {
    if null_stats.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    let mut sorted = null_stats.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = mode.level(alpha);
    let rank = ((sorted.len() as f64) * q).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Shared knobs for the seeded test and power procedures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TestConfig {
    pub rule: ThresholdRule,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    pub scaling: Scaling,
    pub quantile: QuantileMode,
}

/// Outcome of a single one- or two-sample test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: u64,
    pub critical_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub regime: Regime,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
}

/// Monte Carlo rejection fraction under a fixed alternative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub power: f64,
    pub replications: usize,
    pub alpha: f64,
    pub n: usize,
    pub seed: u64,
}

/// Per-replication RNG: stream `stream` of the generator seeded with
/// `seed + rep`, so parallel and serial runs agree.
pub(crate) fn replication_rng(seed: u64, rep: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(rep));
    rng.set_stream(stream);
    rng
}

/// Estimated Betti vector `(β_0..β_{d-1})` of the (scaled) cloud: Rips at
/// ball radius `eps(n)`, built to `max_dim = d`.
pub fn betti_estimate(pc: &PointCloud, rule: &ThresholdRule, scaling: Scaling) -> Result<BettiVector> {
    let scaled = pc.scaled(scaling)?;
    let epsilon = rule.epsilon(pc.len())?;
    let dm = scaled.pairwise_distances();
    let sc = build_rips(&dm, epsilon, rule.dim);
    Ok(betti_numbers(&sc, rule.dim))
}

/// One-sample test: `T_n` on the input against `hyp`, with the critical
/// value estimated from `replications` same-size draws of `null_sampler`.
pub fn one_sample_test(
    pc: &PointCloud,
    hyp: &BettiVector,
    null_sampler: &DistributionSpec,
    cfg: &TestConfig,
) -> Result<TestReport> {
    let n = pc.len();
    let statistic = one_sample_statistic(&betti_estimate(pc, &cfg.rule, cfg.scaling)?, hyp)?;
    let null_stats = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(cfg.seed, i as u64, 0);
            let draw = sample_with_rng(null_sampler, n, &mut rng)?;
            let est = betti_estimate(&draw, &cfg.rule, cfg.scaling)?;
            Ok(one_sample_statistic(&est, hyp)? as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let critical_value = estimate_critical_value(&null_stats, cfg.alpha, cfg.quantile)?;
    Ok(TestReport {
        statistic,
        critical_value,
        reject: statistic as f64 > critical_value,
        alpha: cfg.alpha,
        regime: cfg.rule.regime,
        n,
        n2: None,
    })
}

/// Two-sample test of two observed clouds; null replicate pairs are both
/// drawn from `null_sampler` at the observed sizes.
pub fn two_sample_test(
    pc1: &PointCloud,
    pc2: &PointCloud,
    null_sampler: &DistributionSpec,
    cfg: &TestConfig,
) -> Result<TestReport> {
    let a = betti_estimate(pc1, &cfg.rule, cfg.scaling)?;
    let b = betti_estimate(pc2, &cfg.rule, cfg.scaling)?;
    let statistic = two_sample_statistic(&a, &b)?;
    let null_stats = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let mut rng0 = replication_rng(cfg.seed, i as u64, 0);
            let mut rng1 = replication_rng(cfg.seed, i as u64, 1);
            let x = sample_with_rng(null_sampler, pc1.len(), &mut rng0)?;
            let y = sample_with_rng(null_sampler, pc2.len(), &mut rng1)?;
            let tx = betti_estimate(&x, &cfg.rule, cfg.scaling)?;
            let ty = betti_estimate(&y, &cfg.rule, cfg.scaling)?;
            Ok(two_sample_statistic(&tx, &ty)? as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let critical_value = estimate_critical_value(&null_stats, cfg.alpha, cfg.quantile)?;
    Ok(TestReport {
        statistic,
        critical_value,
        reject: statistic as f64 > critical_value,
        alpha: cfg.alpha,
        regime: cfg.rule.regime,
        n: pc1.len(),
        n2: Some(pc2.len()),
    })
}

/// Monte Carlo power of the one-sample test: per replication, one null and
/// one alternative draw of size `n`; the critical value comes from the `r`
/// null statistics.
pub fn one_sample_power(
    null_sampler: &DistributionSpec,
    alt_sampler: &DistributionSpec,
    hyp: &BettiVector,
    cfg: &TestConfig,
    n: usize,
) -> Result<PowerEstimate> {
    let stats = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let mut rng0 = replication_rng(cfg.seed, i as u64, 0);
            let mut rng1 = replication_rng(cfg.seed, i as u64, 1);
            let null_draw = sample_with_rng(null_sampler, n, &mut rng0)?;
            let alt_draw = sample_with_rng(alt_sampler, n, &mut rng1)?;
            let t0 = one_sample_statistic(&betti_estimate(&null_draw, &cfg.rule, cfg.scaling)?, hyp)?;
            let t1 = one_sample_statistic(&betti_estimate(&alt_draw, &cfg.rule, cfg.scaling)?, hyp)?;
            Ok((t0 as f64, t1 as f64))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let null_stats: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let critical = estimate_critical_value(&null_stats, cfg.alpha, cfg.quantile)?;
    let rejections = stats.iter().filter(|s| s.1 > critical).count();
    Ok(PowerEstimate {
        power: rejections as f64 / cfg.replications as f64,
        replications: cfg.replications,
        alpha: cfg.alpha,
        n,
        seed: cfg.seed,
    })
}

/// Monte Carlo power of the two-sample test: under the null both samples
/// come from `sampler1`; under the alternative one from each.
pub fn two_sample_power(
    sampler1: &DistributionSpec,
    sampler2: &DistributionSpec,
    cfg: &TestConfig,
    n: usize,
) -> Result<PowerEstimate> {
    let stats = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let mut rngs: Vec<ChaCha8Rng> =
                (0..4).map(|s| replication_rng(cfg.seed, i as u64, s)).collect();
            let x0 = sample_with_rng(sampler1, n, &mut rngs[0])?;
            let y0 = sample_with_rng(sampler1, n, &mut rngs[1])?;
            let x1 = sample_with_rng(sampler1, n, &mut rngs[2])?;
            let y1 = sample_with_rng(sampler2, n, &mut rngs[3])?;
            let t0 = two_sample_statistic(
                &betti_estimate(&x0, &cfg.rule, cfg.scaling)?,
                &betti_estimate(&y0, &cfg.rule, cfg.scaling)?,
            )?;
            let t1 = two_sample_statistic(
                &betti_estimate(&x1, &cfg.rule, cfg.scaling)?,
                &betti_estimate(&y1, &cfg.rule, cfg.scaling)?,
            )?;
            Ok((t0 as f64, t1 as f64))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let null_stats: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let critical = estimate_critical_value(&null_stats, cfg.alpha, cfg.quantile)?;
    let rejections = stats.iter().filter(|s| s.1 > critical).count();
    Ok(PowerEstimate {
        power: rejections as f64 / cfg.replications as f64,
        replications: cfg.replications,
        alpha: cfg.alpha,
        n,
        seed: cfg.seed,
    })
}

/// For each `n`, the fraction of replications whose Rips complex at
/// `eps(n)` is NOT connected (the empirical check behind the supercritical
/// consistency assumption). The cloud is used unscaled.
pub fn check_disconnection(
    sampler: &DistributionSpec,
    rule: &ThresholdRule,
    n_list: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if reps == 0 {
        return Err(Error::Domain("reps must be >= 1".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let disconnected = (0..reps)
                .into_par_iter()
                .map(|i| {
                    let mut rng = replication_rng(seed, i as u64, n as u64);
                    let pc = sample_with_rng(sampler, n, &mut rng)?;
                    let epsilon = rule.epsilon(n)?;
                    let sc = build_rips(&pc.pairwise_distances(), epsilon, 1);
                    Ok(usize::from(!is_connected(&sc)))
                })
                .collect::<Result<Vec<usize>>>()?
                .iter()
                .sum::<usize>();
            Ok((n, disconnected as f64 / reps as f64))
        })
        .collect()
}
