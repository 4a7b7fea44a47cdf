//! Betti-number tests for homological equivalence of distribution supports.
//!
//! Given point-cloud samples, this crate builds Vietoris-Rips and Čech
//! complexes, computes (persistent) Betti numbers over GF(2), and runs
//! one-sample and two-sample hypothesis tests whose statistic is the L1
//! distance between estimated and hypothesized Betti vectors. Monte Carlo
//! power estimation and three persistence-based baseline tests (Wasserstein
//! permutation, mean-landscape, plain diagram permutation) are included for
//! benchmarking.
//!
//! The threshold convention throughout: builders take a **ball radius**
//! `epsilon`, so the Rips edge criterion is `distance <= 2 * epsilon` and
//! filtrations are indexed by simplex diameter (`= 2 * epsilon`).

pub mod baselines;
pub mod complex;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod homology;
pub mod samplers;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
pub use geometry::{DistanceMatrix, PointCloud, Scaling};
pub use homology::{BettiVector, PersistenceDiagram};
pub use samplers::DistributionSpec;
pub use stats::{PowerEstimate, Regime, TestReport, ThresholdRule};
