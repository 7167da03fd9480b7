// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive weighted least squares estimation for heteroscedastic nonparametric
//! regression `y_j = S(x_j) + sigma_j(S) xi_j` on the design `x_j = j/n`, together
//! with Monte Carlo audits of its non-asymptotic oracle inequalities.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the audits use.
//!
//! ```
//! use hetero_oracle::*;
//!
//! let grid = Grid::new(101).unwrap();
//! let signal = Signal::sine(1.0, 1).unwrap();
//! let kind = VolatilityKind::budget(1.0, 1.0, 1.0).unwrap();
//! let vol = Volatility::calibrated(kind, &signal, &grid).unwrap();
//! let sample = generate_sample(&signal, &vol, NoiseSpec::Gaussian, &grid, 7).unwrap();
//! let fit = estimate(&sample, &Config::default()).unwrap();
//! let _s_hat = fit.eval(0.25);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod basis;
pub mod error;
pub mod estimator;
pub mod lemmas;
pub mod model;
pub mod scalar;
pub mod stats;
pub mod weights;

pub use audit::{
    audit_oracle, err_n, kappa_pair, psi_n, slow_variation_check, zeta_star, OracleConstants, OracleReport, PsiInputs,
    Scenario, SlowVariationTable,
};
pub use basis::{dft, empirical_inner, phi, phi_bar, reconstruct, BasisTable, DesignGrid};
pub use error::{Error, Result};
pub use estimator::{
    cost, default_m_n, default_rho, estimate, estimate_with_family, penalty, select, variance_estimate, AdaptiveFit,
    EstimatorConfig, FourierState, SelectionResult, VarianceMode,
};
pub use lemmas::{
    check_lemma_31, check_lemma_a1, check_lemma_a2, check_lemma_a3, check_lemma_a4, run_lemma_suite, LemmaCase,
    LemmaSuiteConfig, NoiseCoeffVariance,
};
pub use model::{
    fourier_tail, generate_sample, sobolev_norm, sobolev_weight, volatility_at, NoiseSpec, Sample, SampleGenerator,
    SignalSpec, SobolevClass, VolatilityKind, VolatilitySpec,
};
pub use scalar::Scalar;
pub use stats::McEstimate;
pub use weights::{
    build_sieve, family_stats, pinsker_weight, FamilyStats, SieveOverrides, SieveParams, WeightFamily, WeightVector,
};

pub type Grid = DesignGrid<f64>;
pub type Signal = SignalSpec<f64>;
pub type Volatility = VolatilitySpec<f64>;
pub type Weights = WeightVector<f64>;
pub type Family = WeightFamily<f64>;
pub type Config = EstimatorConfig<f64>;
pub type Fit = AdaptiveFit<f64>;
pub type State = FourierState<f64>;
pub type Report = OracleReport<f64>;
pub type Constants = OracleConstants<f64>;
pub type SampleF64 = Sample<f64>;
pub type ScenarioF64 = Scenario<f64>;

pub type Grid32 = DesignGrid<f32>;
pub type Signal32 = SignalSpec<f32>;
pub type Family32 = WeightFamily<f32>;
pub type Config32 = EstimatorConfig<f32>;
