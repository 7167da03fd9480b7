// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Explicit constants of the oracle inequalities and the Monte Carlo audit that
//! compares both sides at finite sample size.
//!
//! With `kappa(rho) = (6 rho - 2 rho^2)/(1 - 3 rho)` and
//! `kappa_*(rho) = 4 (1 - rho^2)/(1 - 3 rho)` the audited statement is
//!
//! ```text
//! E Err(lambda_hat) <= (1 + kappa) min_lambda E Err(lambda) + B_n / n,
//! B_n = Psi_n + kappa_* rho_n E|varsigma_hat - varsigma|
//! ```
//!
//! where the last term vanishes when the noise variance is known. Expectations
//! are replaced by Monte Carlo means and the comparison allows three combined
//! standard errors of slack.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{BasisTable, DesignGrid};
use crate::error::{check_len, Error, Result};
use crate::estimator::{check_rho, select, variance_estimate, EstimatorConfig, FourierState, VarianceMode};
use crate::model::{NoiseSpec, SampleGenerator, SignalSpec, VolatilityKind, VolatilitySpec};
use crate::scalar::{compensated_sum, Scalar};
use crate::stats::McEstimate;
use crate::weights::{FamilyStats, WeightFamily, WeightVector};

/// Empirical squared error through the coefficient expansion
/// `sum lambda^2 theta_hat^2 - 2 sum lambda theta_hat theta + sum theta^2`.
pub fn err_n<T: Scalar>(lambda: &[T], theta_hat: &[T], theta_true: &[T]) -> Result<T> {
    check_len(theta_true.len(), lambda.len())?;
    check_len(theta_true.len(), theta_hat.len())?;
    let a = compensated_sum(lambda.iter().zip(theta_hat).map(|(&l, &t)| l * l * t * t));
    let b = compensated_sum(
        lambda
            .iter()
            .zip(theta_hat)
            .zip(theta_true)
            .map(|((&l, &h), &t)| l * h * t),
    );
    let c = compensated_sum(theta_true.iter().map(|&t| t * t));
    Ok(a - T::lit(2.0) * b + c)
}

/// `(kappa(rho), kappa_*(rho))` for `0 < rho < 1/3`.
pub fn kappa_pair<T: Scalar>(rho: T) -> Result<(T, T)> {
    check_rho(rho)?;
    let one = T::one();
    let denom = one - T::lit(3.0) * rho;
    let kappa = (T::lit(6.0) * rho - T::lit(2.0) * rho * rho) / denom;
    let kappa_star = T::lit(4.0) * (one - rho * rho) / denom;
    Ok((kappa, kappa_star))
}

/// Inputs of `Psi_n` besides `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiInputs<T> {
    pub nu: usize,
    pub rho_n: T,
    pub rho_bar_1: T,
    pub rho_bar_2: T,
    pub xi_bar: T,
    pub sigma_star: T,
    pub n: usize,
}

impl<T: Scalar> PsiInputs<T> {
    pub fn from_stats(stats: &FamilyStats<T>, xi_bar: T, sigma_star: T, n: usize) -> Self {
        PsiInputs {
            nu: stats.nu,
            rho_n: stats.rho_n,
            rho_bar_1: stats.rho_bar_1,
            rho_bar_2: stats.rho_bar_2,
            xi_bar,
            sigma_star,
            n,
        }
    }
}

/// `(Upsilon_n^*(rho), Psi_n(rho))`.
pub fn psi_n<T: Scalar>(rho: T, inp: &PsiInputs<T>) -> Result<(T, T)> {
    check_rho(rho)?;
    if inp.nu == 0 {
        return Err(Error::domain("family size nu must be >= 1"));
    }
    if inp.n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    let nonneg = [inp.rho_n, inp.rho_bar_1, inp.rho_bar_2, inp.xi_bar];
    if nonneg.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::domain("family statistics and xi_bar must be finite and >= 0"));
    }
    if !(inp.sigma_star >= T::one()) {
        return Err(Error::domain("sigma_star must be >= 1"));
    }
    let one = T::one();
    let nu = T::from_usize_lossy(inp.nu);
    let root_n = T::from_usize_lossy(inp.n).sqrt();
    let xi_ratio = inp.xi_bar / root_n;
    let upsilon = T::lit(16.0) * nu / rho
        + T::lit(4.0) * inp.rho_bar_1 * (one + nu * xi_ratio)
        + T::lit(4.0) * nu * inp.rho_n * xi_ratio;
    let numer = rho * (one - rho) * upsilon + T::lit(2.0) * nu + T::lit(2.0) * rho * rho * (one - rho) * inp.rho_bar_2;
    let psi = numer * inp.sigma_star / (rho * (one - T::lit(3.0) * rho));
    Ok((upsilon, psi))
}

/// Tail-estimator deviation constants: `sigma_bar = 2 (xi_bar + sqrt 2) sigma_*` and
/// `zeta_n^*(r) = 4 r sqrt(n) / m_n^2 + 4 sqrt(r sigma_*) / m_n + (2 + m_n) sigma_* / sqrt(n)`.
pub fn zeta_star<T: Scalar>(r: T, m_n: usize, n: usize, sigma_star: T, xi_bar: T) -> Result<(T, T)> {
    if !(r > T::zero()) {
        return Err(Error::domain(format!("Sobolev radius r = {r} must be > 0")));
    }
    if n < 2 {
        return Err(Error::domain("n must be >= 2"));
    }
    if m_n < 1 || m_n > n {
        return Err(Error::domain(format!("m_n = {m_n} outside 1..={n}")));
    }
    if !(xi_bar >= T::zero()) || !(sigma_star > T::zero()) {
        return Err(Error::domain("xi_bar must be >= 0 and sigma_star > 0"));
    }
    let sigma_bar = T::lit(2.0) * (xi_bar + T::SQRT_2()) * sigma_star;
    let root_n = T::from_usize_lossy(n).sqrt();
    let m = T::from_usize_lossy(m_n);
    let zeta = T::lit(4.0) * r * root_n / (m * m)
        + T::lit(4.0) * (r * sigma_star).sqrt() / m
        + (T::lit(2.0) + m) * sigma_star / root_n;
    Ok((sigma_bar, zeta))
}

/// All closed-form constants for one `(scenario, n, rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConstants<T> {
    pub n: usize,
    pub rho: T,
    pub m_n: usize,
    pub kappa: T,
    pub kappa_star: T,
    pub upsilon_star: T,
    pub psi_n: T,
    /// `Psi_n + kappa_* rho_n * varsigma_abs_err`, with the deviation term supplied by the caller.
    pub b_n: T,
    pub varsigma_abs_err: T,
    pub sigma_bar: T,
    /// Present when the signal carries a Sobolev radius.
    pub zeta_star: Option<T>,
    /// `Psi_n + kappa_* (sigma_bar + zeta_star) rho_n / sqrt(n)`.
    pub d_n: Option<T>,
    pub inputs: PsiInputs<T>,
}

impl<T: Scalar> OracleConstants<T> {
    pub fn compute(rho: T, inputs: PsiInputs<T>, m_n: usize, radius: Option<T>, varsigma_abs_err: T) -> Result<Self> {
        let (kappa, kappa_star) = kappa_pair(rho)?;
        let (upsilon_star, psi) = psi_n(rho, &inputs)?;
        let sigma_bar = T::lit(2.0) * (inputs.xi_bar + T::SQRT_2()) * inputs.sigma_star;
        let zeta = match radius {
            Some(r) => Some(zeta_star(r, m_n, inputs.n, inputs.sigma_star, inputs.xi_bar)?.1),
            None => None,
        };
        let root_n = T::from_usize_lossy(inputs.n).sqrt();
        let d_n = zeta.map(|z| psi + kappa_star * (sigma_bar + z) * inputs.rho_n / root_n);
        Ok(OracleConstants {
            n: inputs.n,
            rho,
            m_n,
            kappa,
            kappa_star,
            upsilon_star,
            psi_n: psi,
            b_n: psi + kappa_star * inputs.rho_n * varsigma_abs_err,
            varsigma_abs_err,
            sigma_bar,
            zeta_star: zeta,
            d_n,
            inputs,
        })
    }

    /// Analytic bound on `E|varsigma_hat - varsigma|`, `(sigma_bar + zeta_star)/sqrt(n)`.
    pub fn deviation_bound(&self) -> Option<T> {
        let root_n = T::from_usize_lossy(self.n).sqrt();
        self.zeta_star.map(|z| (self.sigma_bar + z) / root_n)
    }
}

/// A simulation setting: truth, noise, sample size and tuning.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub name: String,
    pub signal: SignalSpec<T>,
    pub volatility: VolatilityKind<T>,
    /// Declared `sigma_*`; calibrated from the design when absent.
    pub sigma_star: Option<T>,
    pub noise: NoiseSpec,
    pub n: usize,
    /// `variance` is ignored here; audits take the mode explicitly.
    pub estimator: EstimatorConfig<T>,
    /// Explicit family; the Pinsker family is used when absent.
    pub family: Option<Vec<WeightVector<T>>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        name: impl Into<String>,
        signal: SignalSpec<T>,
        volatility: VolatilityKind<T>,
        noise: NoiseSpec,
        n: usize,
    ) -> Self {
        Scenario {
            name: name.into(),
            signal,
            volatility,
            sigma_star: None,
            noise,
            n,
            estimator: EstimatorConfig::default(),
            family: None,
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Scenario { n, ..self.clone() }
    }

    pub fn prepare(&self) -> Result<PreparedScenario<T>> {
        let grid = DesignGrid::new(self.n).map_err(|e| Error::Config(format!("n: {e}")))?;
        let volatility = match self.sigma_star {
            Some(s) => VolatilitySpec::new(self.volatility.clone(), s)?,
            None => VolatilitySpec::calibrated(self.volatility.clone(), &self.signal, &grid)?,
        };
        let generator = SampleGenerator::new(&self.signal, &volatility, self.noise, &grid)?;
        let family = match &self.family {
            Some(members) => WeightFamily::custom(members.clone())?,
            None => WeightFamily::pinsker(&grid, self.estimator.sieve)?,
        };
        if family.n() != grid.n() {
            return Err(Error::Config(format!(
                "family vectors have length {} but n = {}",
                family.n(),
                grid.n()
            )));
        }
        let table = grid.basis_table();
        let theta_true = generator.true_coefficients(&table)?;
        let rho = self.estimator.resolved_rho(self.n)?;
        let m_n = self.estimator.resolved_m_n(self.n)?;
        Ok(PreparedScenario {
            grid,
            table,
            volatility,
            generator,
            family,
            theta_true,
            rho,
            m_n,
            xi_bar: T::lit(self.noise.xi_bar()),
        })
    }
}

/// Scenario with everything that is fixed across replications precomputed.
#[derive(Debug, Clone)]
pub struct PreparedScenario<T> {
    pub grid: DesignGrid<T>,
    pub table: BasisTable<T>,
    pub volatility: VolatilitySpec<T>,
    pub generator: SampleGenerator<T>,
    pub family: WeightFamily<T>,
    pub theta_true: Vec<T>,
    pub rho: T,
    pub m_n: usize,
    pub xi_bar: T,
}

impl<T: Scalar> PreparedScenario<T> {
    pub fn sigma_star(&self) -> T {
        self.volatility.sigma_star()
    }

    pub fn psi_inputs(&self) -> PsiInputs<T> {
        PsiInputs::from_stats(self.family.stats(), self.xi_bar, self.sigma_star(), self.grid.n())
    }
}

/// Per-replication quantities.
#[derive(Debug, Clone)]
pub(crate) struct Replication<T> {
    pub errs: Vec<T>,
    pub chosen: usize,
    /// Tail estimate, whatever the mode.
    pub varsigma_tail: T,
}

pub(crate) fn replicate<T: Scalar>(
    prep: &PreparedScenario<T>,
    mode: VarianceMode,
    seed: u64,
) -> Result<Replication<T>> {
    let y = prep.generator.draw_y(seed);
    let theta_hat = prep.table.dft(&y)?;
    let varsigma_tail = variance_estimate(&theta_hat, prep.m_n)?;
    let known = match mode {
        VarianceMode::Estimated => None,
        VarianceMode::Known => Some(prep.generator.varsigma_n()),
    };
    let errs = prep
        .family
        .members()
        .iter()
        .map(|m| err_n(m.coeffs(), &theta_hat, &prep.theta_true))
        .collect::<Result<Vec<T>>>()?;
    let state = FourierState::new(theta_hat, prep.m_n, prep.rho, known)?;
    let chosen = select(&prep.family, &state)?.index;
    Ok(Replication {
        errs,
        chosen,
        varsigma_tail,
    })
}

/// Runs `replications` independent replications with seeds `seed + i`, in parallel,
/// returning them in index order.
pub(crate) fn run_replications<T: Scalar>(
    prep: &PreparedScenario<T>,
    mode: VarianceMode,
    replications: usize,
    seed: u64,
) -> Result<Vec<Replication<T>>> {
    (0..replications)
        .into_par_iter()
        .map(|i| replicate(prep, mode, seed.wrapping_add(i as u64)))
        .collect()
}

/// Monte Carlo comparison of both sides of the oracle inequality.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport<T> {
    pub scenario: String,
    pub n: usize,
    pub mode: VarianceMode,
    pub replication_count: usize,
    pub seed: u64,
    pub varsigma_n: T,
    pub constants: OracleConstants<T>,
    /// Mean `Err_n(lambda)` per family member, in family order.
    pub per_lambda_risk: Vec<McEstimate<T>>,
    /// Mean `Err_n(lambda_hat)`.
    pub adaptive_risk: McEstimate<T>,
    pub oracle_index: usize,
    pub oracle_risk: McEstimate<T>,
    /// Mean `|varsigma_hat - varsigma_n|` of the tail estimator.
    pub varsigma_abs_err: McEstimate<T>,
    /// Lemma bound `(sigma_bar + zeta_star)/sqrt(n)` shown next to the Monte Carlo deviation.
    pub deviation_bound: Option<T>,
    pub lhs: T,
    pub rhs: T,
    pub combined_std_err: T,
    pub slack: T,
    pub pass: bool,
    /// Right side with the Sobolev remainder `D_n`; estimated mode with a certified signal only.
    pub rhs_sobolev: Option<T>,
    pub pass_sobolev: Option<bool>,
    /// How often each member was selected.
    pub selection_counts: Vec<usize>,
}

impl<T: Scalar> OracleReport<T> {
    pub fn margin(&self) -> T {
        self.rhs + self.slack - self.lhs
    }
}

/// Monte Carlo audit of the oracle inequality for one scenario.
pub fn audit_oracle<T: Scalar>(
    scenario: &Scenario<T>,
    replications: usize,
    seed: u64,
    mode: VarianceMode,
) -> Result<OracleReport<T>> {
    if replications < 50 {
        return Err(Error::Config(format!(
            "replications = {replications} below the minimum of 50"
        )));
    }
    let prep = scenario.prepare()?;
    let reps = run_replications(&prep, mode, replications, seed)?;
    let nu = prep.family.len();
    let varsigma = prep.generator.varsigma_n();

    let per_lambda_risk: Vec<McEstimate<T>> = (0..nu)
        .map(|i| {
            let col: Vec<T> = reps.iter().map(|r| r.errs[i]).collect();
            McEstimate::from_samples(&col)
        })
        .collect();
    let adaptive: Vec<T> = reps.iter().map(|r| r.errs[r.chosen]).collect();
    let adaptive_risk = McEstimate::from_samples(&adaptive);
    let mut oracle_index = 0;
    for (i, est) in per_lambda_risk.iter().enumerate() {
        if est.mean < per_lambda_risk[oracle_index].mean {
            oracle_index = i;
        }
    }
    let oracle_risk = per_lambda_risk[oracle_index];
    let abs_errs: Vec<T> = reps.iter().map(|r| (r.varsigma_tail - varsigma).abs()).collect();
    let varsigma_abs_err = McEstimate::from_samples(&abs_errs);
    let mut selection_counts = vec![0usize; nu];
    for r in &reps {
        selection_counts[r.chosen] += 1;
    }

    let deviation_term = match mode {
        VarianceMode::Estimated => varsigma_abs_err.mean,
        VarianceMode::Known => T::zero(),
    };
    let radius = scenario.signal.sobolev().map(|s| s.r).filter(|r| *r > T::zero());
    let constants = OracleConstants::compute(prep.rho, prep.psi_inputs(), prep.m_n, radius, deviation_term)?;

    let nf = T::from_usize_lossy(prep.grid.n());
    let lead = T::one() + constants.kappa;
    let lhs = adaptive_risk.mean;
    let rhs = lead * oracle_risk.mean + constants.b_n / nf;
    let dev_se = match mode {
        VarianceMode::Estimated => constants.kappa_star * constants.inputs.rho_n / nf * varsigma_abs_err.std_err,
        VarianceMode::Known => T::zero(),
    };
    let combined_std_err =
        (adaptive_risk.std_err.powi(2) + (lead * oracle_risk.std_err).powi(2) + dev_se.powi(2)).sqrt();
    let slack = T::lit(3.0) * combined_std_err;
    let pass = lhs <= rhs + slack;

    let (rhs_sobolev, pass_sobolev) = match (mode, constants.d_n) {
        (VarianceMode::Estimated, Some(d)) => {
            let r = lead * oracle_risk.mean + d / nf;
            let se = (adaptive_risk.std_err.powi(2) + (lead * oracle_risk.std_err).powi(2)).sqrt();
            (Some(r), Some(lhs <= r + T::lit(3.0) * se))
        }
        _ => (None, None),
    };

    Ok(OracleReport {
        scenario: scenario.name.clone(),
        n: prep.grid.n(),
        mode,
        replication_count: replications,
        seed,
        varsigma_n: varsigma,
        deviation_bound: constants.deviation_bound(),
        constants,
        per_lambda_risk,
        adaptive_risk,
        oracle_index,
        oracle_risk,
        varsigma_abs_err,
        lhs,
        rhs,
        combined_std_err,
        slack,
        pass,
        rhs_sobolev,
        pass_sobolev,
        selection_counts,
    })
}

/// One row of the slow-variation table.
#[derive(Debug, Clone, Serialize)]
pub struct SlowVariationRow<T> {
    pub n: usize,
    pub epsilon: Option<T>,
    pub k_star: Option<u32>,
    pub stats: FamilyStats<T>,
    pub constants: OracleConstants<T>,
    /// `Psi_n / n^delta`.
    pub psi_ratio: T,
    /// `D_n / n^delta`, when the signal has a Sobolev radius.
    pub d_ratio: Option<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowVariationTable<T> {
    pub delta: T,
    pub tail_start: usize,
    pub rows: Vec<SlowVariationRow<T>>,
    pub psi_decreasing: bool,
    pub d_decreasing: Option<bool>,
}

impl<T> SlowVariationTable<T> {
    pub fn pass(&self) -> bool {
        self.psi_decreasing && self.d_decreasing.unwrap_or(true)
    }
}

fn strictly_decreasing<T: Scalar>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Tabulates `Psi_n / n^delta` and `D_n / n^delta` along `n_sequence` (default sieve and
/// `rho_n` unless the scenario overrides them) and checks strict decrease over the rows
/// from `tail_start` on. `B_n` in each row uses the analytic deviation bound.
pub fn slow_variation_check<T: Scalar>(
    base: &Scenario<T>,
    n_sequence: &[usize],
    delta: T,
    tail_start: usize,
) -> Result<SlowVariationTable<T>> {
    if !(delta > T::zero()) {
        return Err(Error::domain("delta must be > 0"));
    }
    if n_sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("n_sequence must be strictly increasing"));
    }
    let radius = base.signal.sobolev().map(|s| s.r).filter(|r| *r > T::zero());
    let rows = n_sequence
        .iter()
        .map(|&n| {
            let sc = base.with_n(n);
            let grid = DesignGrid::new(n)?;
            let volatility = match sc.sigma_star {
                Some(s) => VolatilitySpec::new(sc.volatility.clone(), s)?,
                None => VolatilitySpec::calibrated(sc.volatility.clone(), &sc.signal, &grid)?,
            };
            let family = match &sc.family {
                Some(m) => WeightFamily::custom(m.clone())?,
                None => WeightFamily::pinsker(&grid, sc.estimator.sieve)?,
            };
            let rho = sc.estimator.resolved_rho(n)?;
            let m_n = sc.estimator.resolved_m_n(n)?;
            let xi_bar = T::lit(sc.noise.xi_bar());
            let inputs = PsiInputs::from_stats(family.stats(), xi_bar, volatility.sigma_star(), n);
            let provisional = OracleConstants::compute(rho, inputs, m_n, radius, T::zero())?;
            let dev = provisional.deviation_bound().unwrap_or(T::zero());
            let constants = OracleConstants::compute(rho, inputs, m_n, radius, dev)?;
            let scale = T::from_usize_lossy(n).powf(delta);
            Ok(SlowVariationRow {
                n,
                epsilon: family.sieve().map(|s| s.epsilon),
                k_star: family.sieve().map(|s| s.k_star),
                stats: *family.stats(),
                psi_ratio: constants.psi_n / scale,
                d_ratio: constants.d_n.map(|d| d / scale),
                constants,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &rows[tail_start.min(rows.len())..];
    let psi: Vec<T> = tail.iter().map(|r| r.psi_ratio).collect();
    let d: Option<Vec<T>> = tail.iter().map(|r| r.d_ratio).collect();
    Ok(SlowVariationTable {
        delta,
        tail_start,
        psi_decreasing: strictly_decreasing(&psi),
        d_decreasing: d.map(|d| strictly_decreasing(&d)),
        rows,
    })
}
