//! Experiment configs (versioned JSON) and the power-sweep runner shared by
//! the CLI and the test suite.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{permutation_two_sample_test, BaselineConfig, PermutationLoss};
use crate::error::{Error, Result};
use crate::homology::BettiVector;
use crate::samplers::{sample, DistributionSpec};
use crate::stats::{
    check_disconnection, one_sample_power, two_sample_power, PowerEstimate, QuantileMode, Regime,
    TestConfig, ThresholdRule,
};
use crate::geometry::Scaling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Betti,
    Robinson,
    Landscape,
    Permutation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Betti => "betti",
            Method::Robinson => "robinson",
            Method::Landscape => "landscape",
            Method::Permutation => "permutation",
        }
    }

    fn loss(self) -> Option<PermutationLoss> {
        match self {
            Method::Betti => None,
            Method::Robinson => Some(PermutationLoss::WassersteinJoint),
            Method::Landscape => Some(PermutationLoss::MeanLandscapeDiff),
            Method::Permutation => Some(PermutationLoss::WassersteinPlain),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    OneSample,
    TwoSample,
}

fn default_schema() -> u32 {
    1
}

fn default_methods() -> Vec<Method> {
    vec![Method::Betti]
}

fn default_reps() -> usize {
    50
}

/// A versioned experiment description: which scenario to run over which
/// sample sizes, with which regime, level, scaling and methods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub scenario: String,
    pub mode: TestMode,
    /// Null-hypothesis sampler (sampler 1 in the two-sample setting).
    pub null: DistributionSpec,
    /// Alternative sampler (sampler 2); required for power sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt: Option<DistributionSpec>,
    /// Hypothesized Betti vector; required in one-sample mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Vec<usize>>,
    pub regime: Regime,
    pub alpha: f64,
    pub r: usize,
    pub n_list: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub scaling: Scaling,
    #[serde(default)]
    pub quantile: QuantileMode,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Replications for the disconnection probe (`check-a2`).
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Permutations per baseline test replicate.
    #[serde(default)]
    pub baseline: BaselineSettings,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BaselineSettings {
    pub n_permutations: usize,
    pub max_threshold: f64,
    pub dim: usize,
    pub landscape_grid_points: usize,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        let b = BaselineConfig::default();
        Self {
            n_permutations: b.n_permutations,
            max_threshold: b.max_threshold,
            dim: b.dim,
            landscape_grid_points: b.landscape_grid_points,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Collects every violated invariant; errors with the full list.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.schema != 1 {
            problems.push(format!("schema: unsupported version {}", self.schema));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            problems.push(format!("alpha: must be in (0,1), got {}", self.alpha));
        }
        if self.r < 1 {
            problems.push("r: must be >= 1".to_string());
        }
        if self.n_list.is_empty() {
            problems.push("n_list: must be nonempty".to_string());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            problems.push("n_list: must be strictly increasing".to_string());
        }
        if let Err(e) = self.null.validate() {
            problems.push(format!("null: {e}"));
        }
        if let Some(alt) = &self.alt {
            if let Err(e) = alt.validate() {
                problems.push(format!("alt: {e}"));
            }
            if alt.ambient_dim() != self.null.ambient_dim() {
                problems.push("alt: ambient dimension differs from null".to_string());
            }
        }
        match self.mode {
            TestMode::OneSample => {
                match &self.hypothesis {
                    None => problems.push("hypothesis: required in one_sample mode".to_string()),
                    Some(h) if h.len() != self.null.ambient_dim() => problems.push(format!(
                        "hypothesis: length {} != data dimension {}",
                        h.len(),
                        self.null.ambient_dim()
                    )),
                    _ => {}
                }
                if self.methods.iter().any(|m| *m != Method::Betti) {
                    problems.push("methods: baselines are two-sample only".to_string());
                }
            }
            TestMode::TwoSample => {}
        }
        if self.methods.is_empty() {
            problems.push("methods: must be nonempty".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    pub fn rule(&self) -> ThresholdRule {
        ThresholdRule::new(self.regime, self.null.ambient_dim())
    }

    pub fn test_config(&self) -> TestConfig {
        TestConfig {
            rule: self.rule(),
            alpha: self.alpha,
            replications: self.r,
            seed: self.seed,
            scaling: self.scaling,
            quantile: self.quantile,
        }
    }

    fn baseline_config(&self, loss: PermutationLoss) -> BaselineConfig {
        BaselineConfig {
            loss,
            n_permutations: self.baseline.n_permutations,
            max_threshold: self.baseline.max_threshold,
            dim: self.baseline.dim,
            landscape_grid_points: self.baseline.landscape_grid_points,
        }
    }
}

/// One row of the power-curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub scenario: String,
    pub method: String,
    pub regime: Regime,
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub power: f64,
    pub seed: u64,
}

/// Runs the full (method x n) grid of the config.
pub fn run_power(cfg: &ExperimentConfig) -> Result<Vec<PowerRow>> {
    cfg.validate()?;
    let alt = cfg
        .alt
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig(vec!["alt: required for power sweeps".into()]))?;
    let tc = cfg.test_config();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &n in &cfg.n_list {
            let estimate = match method.loss() {
                None => match cfg.mode {
                    TestMode::OneSample => {
                        let hyp = BettiVector(cfg.hypothesis.clone().expect("validated"));
                        one_sample_power(&cfg.null, alt, &hyp, &tc, n)?
                    }
                    TestMode::TwoSample => two_sample_power(&cfg.null, alt, &tc, n)?,
                },
                Some(loss) => baseline_power(cfg, loss, n)?,
            };
            rows.push(PowerRow {
                scenario: cfg.scenario.clone(),
                method: method.name().to_string(),
                regime: cfg.regime,
                n,
                r: cfg.r,
                alpha: cfg.alpha,
                power: estimate.power,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

/// Power of a permutation baseline: fraction of replications whose p-value
/// falls at or below the level.
fn baseline_power(cfg: &ExperimentConfig, loss: PermutationLoss, n: usize) -> Result<PowerEstimate> {
    let alt = cfg.alt.as_ref().expect("checked by caller");
    let bcfg = cfg.baseline_config(loss);
    let mut rejections = 0usize;
    for i in 0..cfg.r {
        let draw_seed = cfg.seed.wrapping_add(i as u64).wrapping_mul(2654435761);
        let x = sample(&cfg.null, n, draw_seed)?;
        let y = sample(alt, n, draw_seed.wrapping_add(1))?;
        let res = permutation_two_sample_test(&x, &y, &bcfg, draw_seed.wrapping_add(2))?;
        if res.p_value <= cfg.alpha {
            rejections += 1;
        }
    }
    Ok(PowerEstimate {
        power: rejections as f64 / cfg.r as f64,
        replications: cfg.r,
        alpha: cfg.alpha,
        n,
        seed: cfg.seed,
    })
}

/// Runs the disconnection probe of the config over its `n_list`.
pub fn run_check_a2(cfg: &ExperimentConfig) -> Result<Vec<(usize, f64)>> {
    cfg.validate()?;
    check_disconnection(&cfg.null, &cfg.rule(), &cfg.n_list, cfg.reps, cfg.seed)
}

pub fn write_power_csv(rows: &[PowerRow], writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["scenario", "method", "regime", "n", "r", "alpha", "power", "seed"])?;
    for row in rows {
        wtr.write_record([
            row.scenario.clone(),
            row.method.clone(),
            row.regime.to_string(),
            row.n.to_string(),
            row.r.to_string(),
            row.alpha.to_string(),
            row.power.to_string(),
            row.seed.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_power_csv(reader: impl std::io::Read) -> Result<Vec<PowerRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let rec = record.map_err(|_| Error::ParseError(line))?;
        if rec.len() != 8 {
            return Err(Error::ParseError(line));
        }
        rows.push(PowerRow {
            scenario: rec[0].to_string(),
            method: rec[1].to_string(),
            regime: rec[2].parse().map_err(|_| Error::ParseError(line))?,
            n: rec[3].parse().map_err(|_| Error::ParseError(line))?,
            r: rec[4].parse().map_err(|_| Error::ParseError(line))?,
            alpha: rec[5].parse().map_err(|_| Error::ParseError(line))?,
            power: rec[6].parse().map_err(|_| Error::ParseError(line))?,
            seed: rec[7].parse().map_err(|_| Error::ParseError(line))?,
        });
    }
    Ok(rows)
}

pub fn write_check_a2_csv(rows: &[(usize, f64)], writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["n", "fraction_disconnected"])?;
    for (n, frac) in rows {
        wtr.write_record([n.to_string(), frac.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Power-vs-n SVG with one line per method.
pub fn power_svg(rows: &[PowerRow], title: &str) -> String {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in rows {
        match series.iter_mut().find(|(name, _)| *name == row.method) {
            Some((_, pts)) => pts.push((row.n as f64, row.power)),
            None => series.push((row.method.clone(), vec![(row.n as f64, row.power)])),
        }
    }
    crate::svg::line_chart(&series, title, "n", "power")
}
