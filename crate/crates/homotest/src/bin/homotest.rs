//! Command-line driver: sampling, Betti computation, homological
//! equivalence tests, power sweeps, baseline comparisons, and the
//! disconnection probe.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use homotest::complex::build_rips;
use homotest::experiment::{
    power_svg, run_check_a2, run_power, write_check_a2_csv, write_power_csv, ExperimentConfig,
    Method,
};
use homotest::homology::{betti_numbers, BettiVector};
use homotest::samplers::{sample, DistributionSpec};
use homotest::stats::{
    one_sample_test, two_sample_test, QuantileMode, Regime, TestConfig, ThresholdRule,
};
use homotest::{Error, PointCloud, Result, Scaling};

#[derive(Parser)]
#[command(name = "homotest", version, about = "Betti-number tests for homological equivalence")]
struct Cli {
    /// Worker threads for Monte Carlo replications (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a seeded sample from a distribution spec and write it as CSV.
    Sample {
        #[command(flatten)]
        spec: SpecArg,
        /// Number of points.
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Estimate the Betti vector of a point-cloud CSV.
    Betti {
        /// Input CSV, one point per row.
        #[arg(short, long)]
        input: PathBuf,
        /// Skip a header line in the input.
        #[arg(long)]
        header: bool,
        /// Explicit ball radius; mutually exclusive with --regime.
        #[arg(long, conflicts_with = "regime")]
        epsilon: Option<f64>,
        /// Resolve the radius from a regime rule.
        #[arg(long, value_parser = parse_regime)]
        regime: Option<Regime>,
        /// Maximum simplex dimension (default: data dimension).
        #[arg(long)]
        max_dim: Option<usize>,
        /// Scaling applied before building the complex.
        #[arg(long, value_parser = parse_scaling, default_value = "none")]
        scale: Scaling,
    },
    /// One-sample test of a cloud against hypothesized Betti numbers.
    TestOne {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        header: bool,
        /// Hypothesized Betti vector, comma separated (e.g. "1,1").
        #[arg(long)]
        hyp: String,
        /// JSON file with the null-model sampler spec.
        #[command(flatten)]
        null_spec: NullSpecArg,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Two-sample test of two clouds.
    TestTwo {
        #[arg(long)]
        input1: PathBuf,
        #[arg(long)]
        input2: PathBuf,
        #[arg(long)]
        header: bool,
        /// JSON file with the sampler spec used for null replicates.
        #[command(flatten)]
        null_spec: NullSpecArg,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Run the power sweep described by a config file.
    Power {
        #[arg(short, long)]
        config: PathBuf,
        /// Output CSV path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write an SVG power plot to this path.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Power sweep comparing the Betti test with all three baselines.
    Baselines {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Empirical disconnection probe for the supercritical assumption.
    CheckA2 {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpecArg {
    /// JSON file with a distribution spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Named preset: circle-mixture, sphere-mixture, mvn2, mvn3, disk,
    /// square, cube, sphere, torus, swiss-roll, spiral.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct NullSpecArg {
    #[arg(long)]
    null_spec: Option<PathBuf>,
    #[arg(long)]
    null_preset: Option<String>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long, value_parser = parse_regime, default_value = "critical")]
    regime: Regime,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Null replications for the critical-value estimate.
    #[arg(long, default_value_t = 100)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_scaling, default_value = "per_point_norm")]
    scale: Scaling,
    #[arg(long, value_parser = parse_quantile, default_value = "one_minus_half_alpha")]
    quantile: QuantileMode,
    /// Write the JSON report here as well as stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_regime(s: &str) -> Result<Regime> {
    s.parse()
}

fn parse_scaling(s: &str) -> Result<Scaling> {
    match s {
        "per_point_norm" => Ok(Scaling::PerPointNorm),
        "none" => Ok(Scaling::None),
        "max_norm" => Ok(Scaling::MaxNorm),
        other => Err(Error::Domain(format!("unknown scaling `{other}`"))),
    }
}

fn parse_quantile(s: &str) -> Result<QuantileMode> {
    match s {
        "one_minus_half_alpha" => Ok(QuantileMode::OneMinusHalfAlpha),
        "one_minus_alpha" => Ok(QuantileMode::OneMinusAlpha),
        other => Err(Error::Domain(format!("unknown quantile mode `{other}`"))),
    }
}

fn preset(name: &str) -> Result<DistributionSpec> {
    Ok(match name {
        "circle-mixture" | "circle" => DistributionSpec::circle_mixture(),
        "sphere-mixture" => DistributionSpec::sphere_mixture(),
        "mvn2" => DistributionSpec::mvn2(),
        "mvn3" => DistributionSpec::mvn3(),
        "disk" => DistributionSpec::UniformDisk,
        "square" => DistributionSpec::UniformSquare,
        "cube" => DistributionSpec::UniformCube,
        "sphere" => DistributionSpec::UniformSphereSurface,
        "torus" => DistributionSpec::torus_default(),
        "swiss-roll" => DistributionSpec::SwissRoll,
        "spiral" => DistributionSpec::Spiral { noise: 0.0 },
        other => return Err(Error::InvalidSpec(format!("unknown preset `{other}`"))),
    })
}

fn load_spec(file: &Option<PathBuf>, name: &Option<String>) -> Result<DistributionSpec> {
    match (file, name) {
        (Some(path), None) => {
            let spec: DistributionSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            spec.validate()?;
            Ok(spec)
        }
        (None, Some(n)) => preset(n),
        _ => Err(Error::InvalidSpec("exactly one of spec file or preset required".into())),
    }
}

fn parse_hyp(s: &str) -> Result<BettiVector> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Domain(format!("bad Betti entry `{t}`")))
        })
        .collect::<Result<Vec<usize>>>()?;
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(BettiVector(values))
}

fn write_or_stdout(path: &Option<PathBuf>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sample { spec, n, seed, output } => {
            let spec = load_spec(&spec.spec, &spec.preset)?;
            let pc = sample(&spec, n, seed)?;
            let mut buf = Vec::new();
            pc.to_csv(&mut buf)?;
            write_or_stdout(&output, std::str::from_utf8(&buf).expect("csv is utf8"))
        }
        Command::Betti { input, header, epsilon, regime, max_dim, scale } => {
            let pc = PointCloud::from_csv_path(&input, header)?;
            let scaled = pc.scaled(scale)?;
            let d = scaled.dim();
            let eps = match (epsilon, regime) {
                (Some(e), None) => {
                    if e < 0.0 {
                        return Err(Error::Domain("epsilon must be >= 0".into()));
                    }
                    e
                }
                (None, Some(r)) => ThresholdRule::new(r, d).epsilon(pc.len())?,
                _ => return Err(Error::Domain("exactly one of --epsilon/--regime required".into())),
            };
            let max_dim = max_dim.unwrap_or(d);
            let sc = build_rips(&scaled.pairwise_distances(), eps, max_dim);
            let betti = betti_numbers(&sc, max_dim);
            println!("{betti}");
            println!(
                "{}",
                serde_json::to_string(&serde_json::json!({
                    "betti": betti.0,
                    "epsilon": eps,
                    "n": pc.len(),
                    "dim": d,
                    "max_dim": max_dim,
                }))?
            );
            Ok(())
        }
        Command::TestOne { input, header, hyp, null_spec, test } => {
            let pc = PointCloud::from_csv_path(&input, header)?;
            let hyp = parse_hyp(&hyp)?;
            let null = load_spec(&null_spec.null_spec, &null_spec.null_preset)?;
            let cfg = test_config(&test, pc.dim());
            let report = one_sample_test(&pc, &hyp, &null, &cfg)?;
            let json = serde_json::to_string_pretty(&report)?;
            println!("{json}");
            if let Some(path) = &test.output {
                std::fs::write(path, json)?;
            }
            Ok(())
        }
        Command::TestTwo { input1, input2, header, null_spec, test } => {
            let pc1 = PointCloud::from_csv_path(&input1, header)?;
            let pc2 = PointCloud::from_csv_path(&input2, header)?;
            let null = load_spec(&null_spec.null_spec, &null_spec.null_preset)?;
            let cfg = test_config(&test, pc1.dim());
            let report = two_sample_test(&pc1, &pc2, &null, &cfg)?;
            let json = serde_json::to_string_pretty(&report)?;
            println!("{json}");
            if let Some(path) = &test.output {
                std::fs::write(path, json)?;
            }
            Ok(())
        }
        Command::Power { config, output, plot } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            run_power_command(&cfg, &output, &plot)
        }
        Command::Baselines { config, output, plot } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            cfg.methods =
                vec![Method::Betti, Method::Robinson, Method::Landscape, Method::Permutation];
            run_power_command(&cfg, &output, &plot)
        }
        Command::CheckA2 { config, output } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let rows = run_check_a2(&cfg)?;
            let mut buf = Vec::new();
            write_check_a2_csv(&rows, &mut buf)?;
            write_or_stdout(&output, std::str::from_utf8(&buf).expect("csv is utf8"))
        }
    }
}

fn run_power_command(
    cfg: &ExperimentConfig,
    output: &Option<PathBuf>,
    plot: &Option<PathBuf>,
) -> Result<()> {
    let rows = run_power(cfg)?;
    let mut buf = Vec::new();
    write_power_csv(&rows, &mut buf)?;
    write_or_stdout(output, std::str::from_utf8(&buf).expect("csv is utf8"))?;
    if let Some(path) = plot {
        std::fs::write(path, power_svg(&rows, &cfg.scenario))?;
    }
    Ok(())
}

fn test_config(args: &TestArgs, dim: usize) -> TestConfig {
    TestConfig {
        rule: ThresholdRule::new(args.regime, dim),
        alpha: args.alpha,
        replications: args.r,
        seed: args.seed,
        scaling: args.scale,
        quantile: args.quantile,
    }
}
