// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical instantiations of the supporting inequalities.
//!
//! Deterministic checks use an absolute tolerance of `1e-9`; Monte Carlo checks
//! allow three standard errors.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{PreparedScenario, Scenario};
use crate::basis::{phi_bar_unchecked, BasisTable, DesignGrid};
use crate::error::{check_len, Error, Result};
use crate::estimator::{variance_estimate, VarianceMode};
use crate::model::{rng_for, tail_energy, NoiseSpec, SampleGenerator, SignalSpec, VolatilityKind, VolatilitySpec};
use crate::scalar::{compensated_sum, Scalar};
use crate::stats::McEstimate;
use crate::weights::WeightVector;

pub const DETERMINISTIC_TOL: f64 = 1e-9;
pub const MC_SIGMAS: f64 = 3.0;

/// `varsigma_{j,n} = E xi_{j,n}^2 = (1/n) sum_l sigma_l^2 phi_j(x_l)^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseCoeffVariance<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> NoiseCoeffVariance<T> {
    pub fn compute(sigma_sq: &[T], table: &BasisTable<T>) -> Result<Self> {
        let n = table.n();
        check_len(n, sigma_sq.len())?;
        let nf = T::from_usize_lossy(n);
        let values = (1..=n)
            .map(|j| compensated_sum(table.row(j).iter().zip(sigma_sq).map(|(&p, &s)| s * p * p)) / nf)
            .collect();
        Ok(NoiseCoeffVariance { values })
    }

    /// Largest `|varsigma_{j,n} - varsigma_n|`.
    pub fn max_deviation(&self, varsigma_n: T) -> T {
        self.values
            .iter()
            .map(|&v| (v - varsigma_n).abs())
            .fold(T::zero(), T::max)
    }
}

/// `N^{-m} sup_x |sum_{l=2}^N l^m phi_bar_l(x)|` against `2^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA2Row<T> {
    pub n_terms: usize,
    pub m: u32,
    pub sup: T,
    pub bound: T,
    pub pass: bool,
}

pub fn check_lemma_a2<T: Scalar>(n_max: usize, m_list: &[u32], grid_points: usize) -> Result<Vec<LemmaA2Row<T>>> {
    if n_max < 2 {
        return Err(Error::domain("N_max must be >= 2"));
    }
    if grid_points < 10_000 {
        return Err(Error::domain("grid_points must be >= 10^4"));
    }
    let denom = T::from_usize_lossy(grid_points - 1);
    // sup[mi][N - 2]
    let sup = (0..grid_points)
        .into_par_iter()
        .fold(
            || vec![vec![T::zero(); n_max - 1]; m_list.len()],
            |mut acc, g| {
                let x = T::from_usize_lossy(g) / denom;
                for (mi, &m) in m_list.iter().enumerate() {
                    let mut s = T::zero();
                    for l in 2..=n_max {
                        s = s + T::from_usize_lossy(l).powi(m as i32) * phi_bar_unchecked(l, x);
                        let slot = &mut acc[mi][l - 2];
                        *slot = slot.max(s.abs());
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![vec![T::zero(); n_max - 1]; m_list.len()],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(&b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x = x.max(*y);
                    }
                }
                a
            },
        );
    let tol = T::lit(DETERMINISTIC_TOL);
    let mut rows = Vec::with_capacity(m_list.len() * (n_max - 1));
    for (mi, &m) in m_list.iter().enumerate() {
        let bound = T::lit(2.0).powi(m as i32);
        for big_n in 2..=n_max {
            let normalized = sup[mi][big_n - 2] / T::from_usize_lossy(big_n).powi(m as i32);
            rows.push(LemmaA2Row {
                n_terms: big_n,
                m,
                sup: normalized,
                bound,
                pass: normalized <= bound + tol,
            });
        }
    }
    Ok(rows)
}

/// Worst case over `m` of `m^{2k} sum_{j>m} theta_{j,n}^2` against `4 r / pi^{2(k-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA3Outcome<T> {
    pub k: u32,
    pub r: T,
    pub bound: T,
    pub worst_m: usize,
    pub worst_ratio: T,
    pub pass: bool,
}

pub fn check_lemma_a3<T: Scalar>(signal: &SignalSpec<T>, grid: &DesignGrid<T>) -> Result<LemmaA3Outcome<T>> {
    let class = signal.sobolev().ok_or_else(|| {
        Error::UnsupportedSignal(format!("signal '{}' carries no Sobolev certificate", signal.name()))
    })?;
    let theta = grid.basis_table().dft(&signal.values_on(grid))?;
    let bound = T::lit(4.0) * class.r / T::PI().powi(2 * (class.k as i32 - 1));
    let mut worst_m = 1;
    let mut worst_ratio = T::neg_infinity();
    for m in 1..grid.n() {
        let ratio = T::from_usize_lossy(m).powi(2 * class.k as i32) * tail_energy(&theta, m);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_m = m;
        }
    }
    Ok(LemmaA3Outcome {
        k: class.k,
        r: class.r,
        bound,
        worst_m,
        worst_ratio,
        pass: worst_ratio <= bound + T::lit(DETERMINISTIC_TOL),
    })
}

/// `E (sum_j v_j xi_{j,n})^2` in closed form and by simulation, against `sigma_* |v|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA4Outcome<T> {
    pub exact_var: T,
    pub bound: T,
    pub mc_var: T,
    pub mc_std_err: T,
    pub pass: bool,
}

/// `mc_draws >= 10^4` simulated noise vectors; the noise law must not be [`NoiseSpec::Silent`].
pub fn check_lemma_a4<T: Scalar>(
    v: &[T],
    vol: &VolatilitySpec<T>,
    signal: &SignalSpec<T>,
    grid: &DesignGrid<T>,
    noise: NoiseSpec,
    mc_draws: usize,
    seed: u64,
) -> Result<LemmaA4Outcome<T>> {
    let n = grid.n();
    check_len(n, v.len())?;
    if mc_draws < 10_000 {
        return Err(Error::domain("mc_draws must be >= 10^4"));
    }
    if noise == NoiseSpec::Silent {
        return Err(Error::domain("lemma A.4 needs a unit-variance noise law"));
    }
    let generator = SampleGenerator::new(signal, vol, noise, grid)?;
    let table = grid.basis_table();
    let root_n = T::from_usize_lossy(n).sqrt();
    // v_tilde_l = n^{-1/2} sum_j v_j phi_j(x_l)
    let mut v_tilde = vec![T::zero(); n];
    for j in 1..=n {
        let c = v[j - 1];
        if c == T::zero() {
            continue;
        }
        for (o, &p) in v_tilde.iter_mut().zip(table.row(j)) {
            *o = *o + c * p;
        }
    }
    for o in v_tilde.iter_mut() {
        *o = *o / root_n;
    }
    let sigma_sq = generator.sigma_sq();
    let exact_var = compensated_sum(sigma_sq.iter().zip(&v_tilde).map(|(&s, &w)| s * w * w));
    let bound = vol.sigma_star() * compensated_sum(v.iter().map(|&x| x * x));

    let weights: Vec<T> = sigma_sq.iter().zip(&v_tilde).map(|(&s, &w)| s.sqrt() * w).collect();
    let draws: Vec<T> = (0..mc_draws)
        .map(|i| {
            let mut rng = rng_for(seed.wrapping_add(i as u64));
            compensated_sum(weights.iter().map(|&w| w * T::lit(noise.draw(&mut rng))))
        })
        .collect();
    let (mc_var, mc_std_err) = second_moment_with_std_err(&draws);
    let tol = T::lit(DETERMINISTIC_TOL) * bound.max(T::one());
    let pass = exact_var <= bound + tol && (mc_var - exact_var).abs() <= T::lit(MC_SIGMAS) * mc_std_err;
    Ok(LemmaA4Outcome {
        exact_var,
        bound,
        mc_var,
        mc_std_err,
        pass,
    })
}

/// Raw second moment (the mean is known to be zero) and its standard error.
fn second_moment_with_std_err<T: Scalar>(draws: &[T]) -> (T, T) {
    let sq: Vec<T> = draws.iter().map(|&z| z * z).collect();
    let est = McEstimate::from_samples(&sq);
    (est.mean, est.std_err)
}

/// Monte Carlo mean of `|varsigma_hat - varsigma_n|` against `(sigma_bar + zeta_star)/sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma31Outcome<T> {
    pub mean_abs_err: McEstimate<T>,
    pub sigma_bar: T,
    pub zeta_star: T,
    pub bound: T,
    pub slack: T,
    pub pass: bool,
}

/// The signal must carry a Sobolev certificate; any order `k >= 1` certifies `W_r^1`
/// with the same radius.
#[allow(clippy::too_many_arguments)]
pub fn check_lemma_31<T: Scalar>(
    signal: &SignalSpec<T>,
    volatility: &VolatilityKind<T>,
    noise: NoiseSpec,
    n: usize,
    m_n: usize,
    replications: usize,
    seed: u64,
) -> Result<Lemma31Outcome<T>> {
    let class = signal
        .sobolev()
        .ok_or_else(|| Error::UnsupportedSignal(format!("signal '{}' is not certified in W_r^1", signal.name())))?;
    if replications < 200 {
        return Err(Error::domain("lemma 3.1 check needs at least 200 replications"));
    }
    let grid = DesignGrid::new(n)?;
    let vol = VolatilitySpec::calibrated(volatility.clone(), signal, &grid)?;
    let generator = SampleGenerator::new(signal, &vol, noise, &grid)?;
    let table = grid.basis_table();
    let varsigma = generator.varsigma_n();
    let errs = (0..replications)
        .into_par_iter()
        .map(|i| {
            let y = generator.draw_y(seed.wrapping_add(i as u64));
            let theta_hat = table.dft(&y)?;
            Ok((variance_estimate(&theta_hat, m_n)? - varsigma).abs())
        })
        .collect::<Result<Vec<T>>>()?;
    let mean_abs_err = McEstimate::from_samples(&errs);
    let (sigma_bar, zeta) = crate::audit::zeta_star(class.r, m_n, n, vol.sigma_star(), T::lit(noise.xi_bar()))?;
    let bound = (sigma_bar + zeta) / T::from_usize_lossy(n).sqrt();
    let slack = T::lit(MC_SIGMAS) * mean_abs_err.std_err;
    Ok(Lemma31Outcome {
        pass: mean_abs_err.mean <= bound + slack,
        mean_abs_err,
        sigma_bar,
        zeta_star: zeta,
        bound,
        slack,
    })
}

/// One member of the family in the penalty-versus-risk check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaA1Row<T> {
    pub index: usize,
    /// Mean penalty `|lambda|^2 varsigma_hat / n`.
    pub lhs: T,
    /// `mean Err + (rho_n/n) mean|varsigma_hat - varsigma| + sigma_* rho_bar_2 / n`.
    pub rhs: T,
    /// Three standard errors of the paired difference.
    pub slack: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaA1Outcome<T> {
    pub rows: Vec<LemmaA1Row<T>>,
    pub pass: bool,
}

pub fn check_lemma_a1<T: Scalar>(
    scenario: &Scenario<T>,
    mode: VarianceMode,
    replications: usize,
    seed: u64,
) -> Result<LemmaA1Outcome<T>> {
    if replications < 200 {
        return Err(Error::domain("lemma A.1 check needs at least 200 replications"));
    }
    let prep = scenario.prepare()?;
    lemma_a1_prepared(&prep, mode, replications, seed)
}

fn lemma_a1_prepared<T: Scalar>(
    prep: &PreparedScenario<T>,
    mode: VarianceMode,
    replications: usize,
    seed: u64,
) -> Result<LemmaA1Outcome<T>> {
    let n = prep.grid.n();
    let nf = T::from_usize_lossy(n);
    let varsigma = prep.generator.varsigma_n();
    let stats = *prep.family.stats();
    let norms: Vec<T> = prep.family.members().iter().map(WeightVector::norm_sq).collect();
    // per replication: (penalties, errs, |varsigma_hat - varsigma|)
    let reps = (0..replications)
        .into_par_iter()
        .map(|i| {
            let y = prep.generator.draw_y(seed.wrapping_add(i as u64));
            let theta_hat = prep.table.dft(&y)?;
            let vhat = match mode {
                VarianceMode::Estimated => variance_estimate(&theta_hat, prep.m_n)?,
                VarianceMode::Known => varsigma,
            };
            let errs = prep
                .family
                .members()
                .iter()
                .map(|m| crate::audit::err_n(m.coeffs(), &theta_hat, &prep.theta_true))
                .collect::<Result<Vec<T>>>()?;
            Ok((vhat, errs))
        })
        .collect::<Result<Vec<(T, Vec<T>)>>>()?;
    let abs_dev: Vec<T> = reps.iter().map(|(v, _)| (*v - varsigma).abs()).collect();
    let dev = McEstimate::from_samples(&abs_dev);
    let floor = prep.sigma_star() * stats.rho_bar_2 / nf;
    let rows: Vec<LemmaA1Row<T>> = norms
        .iter()
        .enumerate()
        .map(|(i, &norm)| {
            let pen: Vec<T> = reps.iter().map(|(v, _)| norm * *v / nf).collect();
            let err: Vec<T> = reps.iter().map(|(_, e)| e[i]).collect();
            let diff: Vec<T> = pen
                .iter()
                .zip(&err)
                .zip(&abs_dev)
                .map(|((&p, &e), &d)| p - e - stats.rho_n / nf * d)
                .collect();
            let pen = McEstimate::from_samples(&pen);
            let err = McEstimate::from_samples(&err);
            let diff = McEstimate::from_samples(&diff);
            let lhs = pen.mean;
            let rhs = err.mean + stats.rho_n / nf * dev.mean + floor;
            let slack = T::lit(MC_SIGMAS) * diff.std_err;
            LemmaA1Row {
                index: i,
                lhs,
                rhs,
                slack,
                pass: lhs <= rhs + slack,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(LemmaA1Outcome { rows, pass })
}

/// One line of the lemma report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCase {
    pub lemma: String,
    pub case: String,
    pub lhs: f64,
    pub bound: f64,
    /// `bound + slack - lhs`; nonnegative iff the case passes.
    pub margin: f64,
    pub pass: bool,
}

impl LemmaCase {
    fn new(lemma: &str, case: String, lhs: f64, bound: f64, slack: f64, pass: bool) -> Self {
        LemmaCase {
            lemma: lemma.to_string(),
            case,
            lhs,
            bound,
            margin: bound + slack - lhs,
            pass,
        }
    }
}

/// Parameters of the full lemma suite. Defaults reproduce the standard desk-scale run.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuiteConfig {
    pub seed: u64,
    pub a2_n_max: usize,
    pub a2_m: Vec<u32>,
    pub a2_grid_points: usize,
    pub a3_n: Vec<usize>,
    pub a4_n: usize,
    pub a4_vectors: usize,
    pub a4_draws: usize,
    pub mc_n: usize,
    pub mc_m_n: usize,
    pub lemma31_replications: usize,
    pub a1_replications: usize,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        LemmaSuiteConfig {
            seed: 20_240_601,
            a2_n_max: 200,
            a2_m: vec![0, 1, 2],
            a2_grid_points: 10_000,
            a3_n: vec![101, 501],
            a4_n: 101,
            a4_vectors: 50,
            a4_draws: 10_000,
            mc_n: 101,
            mc_m_n: 5,
            lemma31_replications: 500,
            a1_replications: 200,
        }
    }
}

/// Random test vectors with entries uniform on `[-1, 1]`.
pub fn random_vectors(count: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

/// Runs every verifier and flattens the outcomes into report lines.
pub fn run_lemma_suite(cfg: &LemmaSuiteConfig) -> Result<Vec<LemmaCase>> {
    let mut out = Vec::new();

    for row in check_lemma_a2::<f64>(cfg.a2_n_max, &cfg.a2_m, cfg.a2_grid_points)? {
        out.push(LemmaCase::new(
            "A.2",
            format!("N={} m={}", row.n_terms, row.m),
            row.sup,
            row.bound,
            DETERMINISTIC_TOL,
            row.pass,
        ));
    }

    for &n in &cfg.a3_n {
        let grid = DesignGrid::<f64>::new(n)?;
        for k in [1u32, 2] {
            let signals = [
                SignalSpec::trig_mix(k)?,
                SignalSpec::sine(1.0, k)?,
                SignalSpec::slow_decay(1.0, k, 10_000)?,
            ];
            for s in &signals {
                let o = check_lemma_a3(s, &grid)?;
                out.push(LemmaCase::new(
                    "A.3",
                    format!("signal={} k={} n={} worst_m={}", s.name(), k, n, o.worst_m),
                    o.worst_ratio,
                    o.bound,
                    DETERMINISTIC_TOL,
                    o.pass,
                ));
            }
        }
    }

    let grid = DesignGrid::<f64>::new(cfg.a4_n)?;
    let sine = SignalSpec::sine(1.0, 1)?;
    let vols = [
        ("budget", VolatilityKind::budget(1.0, 1.0, 1.0)?),
        ("constant", VolatilityKind::constant(1.0)?),
    ];
    let vectors = random_vectors(cfg.a4_vectors, cfg.a4_n, cfg.seed);
    for (vname, kind) in &vols {
        let vol = VolatilitySpec::calibrated(kind.clone(), &sine, &grid)?;
        let outcomes = vectors
            .par_iter()
            .enumerate()
            .map(|(i, v)| {
                let seed = cfg.seed.wrapping_add(1_000_000 * (i as u64 + 1));
                check_lemma_a4(v, &vol, &sine, &grid, NoiseSpec::Gaussian, cfg.a4_draws, seed)
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, o) in outcomes.iter().enumerate() {
            let tol = DETERMINISTIC_TOL * o.bound.max(1.0);
            out.push(LemmaCase::new(
                "A.4",
                format!("vol={vname} v#{i} exact<=bound"),
                o.exact_var,
                o.bound,
                tol,
                o.exact_var <= o.bound + tol,
            ));
            let mc_slack = MC_SIGMAS * o.mc_std_err;
            out.push(LemmaCase::new(
                "A.4",
                format!("vol={vname} v#{i} |mc-exact|"),
                (o.mc_var - o.exact_var).abs(),
                0.0,
                mc_slack,
                (o.mc_var - o.exact_var).abs() <= mc_slack,
            ));
        }
    }

    let budget = VolatilityKind::budget(1.0, 1.0, 1.0)?;
    for noise in [NoiseSpec::Gaussian, NoiseSpec::Rademacher] {
        let o = check_lemma_31(
            &sine,
            &budget,
            noise,
            cfg.mc_n,
            cfg.mc_m_n,
            cfg.lemma31_replications,
            cfg.seed,
        )?;
        out.push(LemmaCase::new(
            "3.1",
            format!("noise={noise:?} n={} m_n={}", cfg.mc_n, cfg.mc_m_n),
            o.mean_abs_err.mean,
            o.bound,
            o.slack,
            o.pass,
        ));
    }

    for mode in [VarianceMode::Estimated, VarianceMode::Known] {
        let sc = Scenario::new("standard", sine.clone(), budget.clone(), NoiseSpec::Gaussian, cfg.mc_n);
        let o = check_lemma_a1(&sc, mode, cfg.a1_replications, cfg.seed)?;
        for row in &o.rows {
            out.push(LemmaCase::new(
                "A.1",
                format!("mode={mode:?} lambda#{}", row.index),
                row.lhs,
                row.rhs,
                row.slack,
                row.pass,
            ));
        }
    }

    let vol = VolatilitySpec::calibrated(budget.clone(), &sine, &grid)?;
    let gen = SampleGenerator::new(&sine, &vol, NoiseSpec::Gaussian, &grid)?;
    let ncv = NoiseCoeffVariance::compute(gen.sigma_sq(), &grid.basis_table())?;
    let first_gap = (ncv.values[0] - gen.varsigma_n()).abs();
    out.push(LemmaCase::new(
        "4.2",
        "varsigma_1n == varsigma_n".to_string(),
        first_gap,
        0.0,
        DETERMINISTIC_TOL,
        first_gap <= DETERMINISTIC_TOL,
    ));
    let dev = ncv.max_deviation(gen.varsigma_n());
    out.push(LemmaCase::new(
        "4.2",
        "max_j |varsigma_jn - varsigma_n| <= sigma_*".to_string(),
        dev,
        vol.sigma_star(),
        DETERMINISTIC_TOL,
        dev <= vol.sigma_star() + DETERMINISTIC_TOL,
    ));
    let top = ncv.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let low = ncv.values.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(LemmaCase::new(
        "4.2",
        "0 < varsigma_jn <= 2 sigma_*".to_string(),
        top,
        2.0 * vol.sigma_star(),
        DETERMINISTIC_TOL,
        low > 0.0 && top <= 2.0 * vol.sigma_star() + DETERMINISTIC_TOL,
    ));

    Ok(out)
}
