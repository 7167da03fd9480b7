// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive weighted least squares.
//!
//! The pipeline is: empirical Fourier coefficients, the tail variance estimate
//! `sum_{j > m_n} theta_hat_j^2`, the penalized cost
//! `J(lambda) = sum lambda^2 theta_hat^2 - 2 sum lambda (theta_hat^2 - varsigma_hat/n) + rho |lambda|^2 varsigma_hat / n`,
//! and the first minimizer of `J` over the family. The procedure only sees the
//! observations and its tuning parameters; it never reads the volatility bound,
//! noise moments, or Sobolev class of the truth.

use serde::Serialize;

use crate::basis::{phi_unchecked, BasisTable, DesignGrid};
use crate::error::{check_len, Error, Result};
use crate::model::{tail_energy, Sample};
use crate::scalar::{compensated_sum, Scalar};
use crate::weights::{SieveOverrides, WeightFamily, WeightVector};

/// Whether the summarized noise variance is estimated or supplied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    #[default]
    Estimated,
    Known,
}

/// Smallest `m` with `m^3 >= n`, i.e. `ceil(n^{1/3})`.
pub fn default_m_n(n: usize) -> usize {
    let mut m = (n as f64).cbrt().floor() as usize;
    while m.saturating_pow(3) < n {
        m += 1;
    }
    while m > 1 && (m - 1).pow(3) >= n {
        m -= 1;
    }
    m.clamp(1, n.max(1))
}

/// `min(1/ln n, 0.33 - 1e-6)`.
pub fn default_rho<T: Scalar>(n: usize) -> T {
    let r = T::one() / T::from_usize_lossy(n).ln();
    r.min(T::lit(0.33 - 1e-6))
}

/// Tail energy `sum_{j=m_n+1}^n theta_hat_j^2`.
pub fn variance_estimate<T: Scalar>(theta_hat: &[T], m_n: usize) -> Result<T> {
    let n = theta_hat.len();
    if m_n < 1 || m_n > n {
        return Err(Error::domain(format!("m_n = {m_n} outside 1..={n}")));
    }
    Ok(tail_energy(theta_hat, m_n))
}

/// `|lambda|^2 varsigma / n`.
pub fn penalty<T: Scalar>(lambda: &[T], varsigma: T, n: usize) -> T {
    compensated_sum(lambda.iter().map(|&v| v * v)) * varsigma / T::from_usize_lossy(n)
}

/// Everything the selection rule needs from one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierState<T> {
    pub theta_hat: Vec<T>,
    pub varsigma_hat: T,
    pub m_n: usize,
    pub rho: T,
    pub known_variance: Option<T>,
}

impl<T: Scalar> FourierState<T> {
    /// `known_variance = Some(v)` replaces the tail estimate by `v`.
    pub fn new(theta_hat: Vec<T>, m_n: usize, rho: T, known_variance: Option<T>) -> Result<Self> {
        check_rho(rho)?;
        let varsigma_hat = match known_variance {
            Some(v) if v >= T::zero() && v.is_finite() => v,
            Some(v) => return Err(Error::domain(format!("known variance {v} must be >= 0"))),
            None => variance_estimate(&theta_hat, m_n)?,
        };
        Ok(FourierState {
            theta_hat,
            varsigma_hat,
            m_n,
            rho,
            known_variance,
        })
    }

    pub fn n(&self) -> usize {
        self.theta_hat.len()
    }
}

pub(crate) fn check_rho<T: Scalar>(rho: T) -> Result<()> {
    if rho > T::zero() && rho < T::one() / T::lit(3.0) {
        Ok(())
    } else {
        Err(Error::domain(format!("rho = {rho} outside (0, 1/3)")))
    }
}

/// Penalized cost `J(lambda)`.
pub fn cost<T: Scalar>(lambda: &[T], state: &FourierState<T>) -> Result<T> {
    let n = state.n();
    check_len(n, lambda.len())?;
    let shift = state.varsigma_hat / T::from_usize_lossy(n);
    let quad = compensated_sum(lambda.iter().zip(&state.theta_hat).map(|(&l, &t)| l * l * t * t));
    let lin = compensated_sum(lambda.iter().zip(&state.theta_hat).map(|(&l, &t)| l * (t * t - shift)));
    Ok(quad - T::lit(2.0) * lin + state.rho * penalty(lambda, state.varsigma_hat, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult<T> {
    /// Position of the selected weight vector in family order.
    pub index: usize,
    #[serde(skip)]
    pub chosen: WeightVector<T>,
    /// `J(lambda)` for every member, in family order.
    pub costs: Vec<T>,
    /// `lambda_hat(j) theta_hat_j`.
    pub estimate_coeffs: Vec<T>,
}

/// First minimizer of the cost in family order.
pub fn select<T: Scalar>(family: &WeightFamily<T>, state: &FourierState<T>) -> Result<SelectionResult<T>> {
    if family.is_empty() {
        return Err(Error::domain("weight family must be nonempty"));
    }
    let costs = family
        .members()
        .iter()
        .map(|m| cost(m.coeffs(), state))
        .collect::<Result<Vec<T>>>()?;
    let mut index = 0;
    for (i, &c) in costs.iter().enumerate() {
        if c < costs[index] {
            index = i;
        }
    }
    let chosen = family.members()[index].clone();
    let estimate_coeffs = chosen
        .coeffs()
        .iter()
        .zip(&state.theta_hat)
        .map(|(&l, &t)| l * t)
        .collect();
    Ok(SelectionResult {
        index,
        chosen,
        costs,
        estimate_coeffs,
    })
}

/// Tuning parameters of the procedure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EstimatorConfig<T> {
    /// Defaults to [`default_rho`].
    pub rho: Option<T>,
    pub sieve: SieveOverrides<T>,
    /// Defaults to [`default_m_n`].
    pub m_n: Option<usize>,
    pub variance: VarianceMode,
}

impl<T: Scalar> EstimatorConfig<T> {
    pub fn resolved_rho(&self, n: usize) -> Result<T> {
        let rho = self.rho.unwrap_or_else(|| default_rho(n));
        check_rho(rho)?;
        Ok(rho)
    }

    /// Override is accepted as is; outside `[n^{1/4}, n^{1/2}]` only a warning is logged.
    pub fn resolved_m_n(&self, n: usize) -> Result<usize> {
        match self.m_n {
            None => Ok(default_m_n(n)),
            Some(m) if m >= 1 && m <= n => {
                let nf = n as f64;
                let mf = m as f64;
                if mf < nf.powf(0.25) || mf > nf.sqrt() {
                    log::warn!("m_n = {m} outside [n^(1/4), n^(1/2)] for n = {n}");
                }
                Ok(m)
            }
            Some(m) => Err(Error::domain(format!("m_n = {m} outside 1..={n}"))),
        }
    }
}

/// Fitted adaptive estimator.
#[derive(Debug, Clone)]
pub struct AdaptiveFit<T> {
    pub state: FourierState<T>,
    pub selection: SelectionResult<T>,
}

impl<T: Scalar> AdaptiveFit<T> {
    /// `S_*(x)` for any `x` in `[0, 1]`.
    pub fn eval(&self, x: T) -> T {
        compensated_sum(
            self.selection
                .estimate_coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != T::zero())
                .map(|(i, &c)| c * phi_unchecked(i + 1, x)),
        )
    }

    pub fn as_fn(&self) -> impl Fn(T) -> T + '_ {
        move |x| self.eval(x)
    }

    pub fn chosen(&self) -> &WeightVector<T> {
        &self.selection.chosen
    }
}

/// Runs the full procedure with the default Pinsker family.
pub fn estimate<T: Scalar>(sample: &Sample<T>, config: &EstimatorConfig<T>) -> Result<AdaptiveFit<T>> {
    let family = WeightFamily::pinsker(&sample.grid, config.sieve)?;
    estimate_with_family(sample, config, &family)
}

/// Runs the procedure over an explicit family.
pub fn estimate_with_family<T: Scalar>(
    sample: &Sample<T>,
    config: &EstimatorConfig<T>,
    family: &WeightFamily<T>,
) -> Result<AdaptiveFit<T>> {
    let table = sample.grid.basis_table();
    fit_observations(&sample.y, &sample.grid, &table, config, family, || sample.varsigma_n)
}

pub(crate) fn fit_observations<T: Scalar>(
    y: &[T],
    grid: &DesignGrid<T>,
    table: &BasisTable<T>,
    config: &EstimatorConfig<T>,
    family: &WeightFamily<T>,
    known: impl FnOnce() -> T,
) -> Result<AdaptiveFit<T>> {
    let n = grid.n();
    check_len(n, family.n())?;
    let rho = config.resolved_rho(n)?;
    let m_n = config.resolved_m_n(n)?;
    let theta_hat = table.dft(y)?;
    let known_variance = match config.variance {
        VarianceMode::Estimated => None,
        VarianceMode::Known => Some(known()),
    };
    let state = FourierState::new(theta_hat, m_n, rho, known_variance)?;
    let selection = select(family, &state)?;
    Ok(AdaptiveFit { state, selection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_sample, NoiseSpec, SignalSpec, VolatilityKind, VolatilitySpec};
    use approx::assert_abs_diff_eq;

    fn e1(n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v
    }

    #[test]
    fn m_n_examples() {
        assert_eq!(default_m_n(101), 5);
        assert_eq!(default_m_n(3), 2);
        assert_eq!(default_m_n(27), 3);
        assert_eq!(default_m_n(28), 4);
        let n = 1_000_001usize;
        let m = default_m_n(n) as f64;
        assert_abs_diff_eq!(m / (n as f64).sqrt(), 0.101, epsilon = 1e-3);
        assert_abs_diff_eq!(m * m / (n as f64).sqrt(), 10.2, epsilon = 0.1);
    }

    #[test]
    fn rho_default_is_clamped() {
        assert_abs_diff_eq!(default_rho::<f64>(101), 1.0 / 101f64.ln(), epsilon = 1e-15);
        assert_eq!(default_rho::<f64>(5), 0.33 - 1e-6);
    }

    #[test]
    fn variance_estimate_edges() {
        let theta = [1.0, 2.0, 3.0];
        assert_eq!(variance_estimate(&theta, 3).unwrap(), 0.0);
        assert_eq!(variance_estimate(&theta, 1).unwrap(), 13.0);
        assert!(variance_estimate(&theta, 0).is_err());
        assert!(variance_estimate(&theta, 4).is_err());
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(penalty(&[0.0; 4], 3.0, 4), 0.0);
        assert_abs_diff_eq!(penalty(&[1.0, 1.0, 1.0, 1.0], 2.0, 100), 0.08, epsilon = 1e-15);
        assert_abs_diff_eq!(penalty(&e1(5), 0.7, 5), 0.7 / 5.0, epsilon = 1e-15);
    }

    #[test]
    fn cost_examples() {
        let n = 7;
        let state = FourierState::new(e1(n), 3, 0.2, Some(0.0)).unwrap();
        assert_eq!(cost(&[0.0; 7], &state).unwrap(), 0.0);
        assert_abs_diff_eq!(cost(&e1(n), &state).unwrap(), -1.0, epsilon = 1e-15);
        assert!(cost(&[0.0; 3], &state).is_err());
    }

    #[test]
    fn cost_brute_force_with_zero_variance() {
        let theta = vec![0.3, -1.2, 0.5, 0.0, 2.0];
        let lambda = [1.0, 0.8, 0.4, 0.2, 0.1];
        let state = FourierState::new(theta.clone(), 5, 0.1, Some(0.0)).unwrap();
        let mut expected = 0.0;
        for j in 0..5 {
            expected += lambda[j] * lambda[j] * theta[j] * theta[j];
            expected -= 2.0 * lambda[j] * theta[j] * theta[j];
        }
        assert_abs_diff_eq!(cost(&lambda, &state).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn rho_validation() {
        assert!(FourierState::new(e1(3), 1, 0.0, None).is_err());
        assert!(FourierState::new(e1(3), 1, 1.0 / 3.0, None).is_err());
        assert!(FourierState::new(e1(3), 1, 0.3, Some(-1.0)).is_err());
    }

    #[test]
    fn select_examples() {
        // every member has j0 >= 1, hence lambda(1) = 1
        let n = 1001;
        let grid = DesignGrid::<f64>::new(n).unwrap();
        let fam = WeightFamily::pinsker(
            &grid,
            SieveOverrides {
                epsilon: Some(0.7),
                k_star: Some(1),
            },
        )
        .unwrap();
        assert_eq!(fam.len(), 2);
        assert!(fam.members().iter().all(|m| m.coeffs()[0] == 1.0));
        let state = FourierState::new(e1(n), 10, 0.2, None).unwrap();
        let sel = select(&fam, &state).unwrap();
        assert_eq!(sel.index, 0);
        assert!(sel.costs.iter().all(|&c| (c + 1.0).abs() < 1e-15));

        let fam = WeightFamily::custom(vec![WeightVector::zeros(n), WeightVector::ones(n)]).unwrap();
        let state = FourierState::new(e1(n), 5, 0.2, Some(0.0)).unwrap();
        let sel = select(&fam, &state).unwrap();
        assert_eq!(sel.index, 1);
        assert_eq!(sel.costs, vec![0.0, -1.0]);

        let fam = WeightFamily::custom(vec![WeightVector::zeros(n)]).unwrap();
        assert_eq!(select(&fam, &state).unwrap().index, 0);
    }

    #[test]
    fn noiseless_constant_is_recovered() {
        let grid = DesignGrid::new(101).unwrap();
        let s = SignalSpec::constant(2.5, 1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::constant(1.0).unwrap(), &s, &grid).unwrap();
        let sample = generate_sample(&s, &vol, NoiseSpec::Silent, &grid, 0).unwrap();
        let fit = estimate(&sample, &EstimatorConfig::default()).unwrap();
        assert_eq!(fit.chosen().coeffs()[0], 1.0);
        for &x in grid.points() {
            assert_abs_diff_eq!(fit.eval(x), 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn estimate_rejects_bad_rho() {
        let grid = DesignGrid::new(11).unwrap();
        let s = SignalSpec::constant(1.0, 1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::constant(1.0).unwrap(), &s, &grid).unwrap();
        let sample = generate_sample(&s, &vol, NoiseSpec::Gaussian, &grid, 0).unwrap();
        let cfg = EstimatorConfig {
            rho: Some(0.4),
            ..Default::default()
        };
        assert!(matches!(estimate(&sample, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn known_mode_uses_true_variance() {
        let grid = DesignGrid::new(51).unwrap();
        let s = SignalSpec::sine(1.0, 1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::budget(1.0, 1.0, 1.0).unwrap(), &s, &grid).unwrap();
        let sample = generate_sample(&s, &vol, NoiseSpec::Gaussian, &grid, 4).unwrap();
        let cfg = EstimatorConfig {
            variance: VarianceMode::Known,
            ..Default::default()
        };
        let fit = estimate(&sample, &cfg).unwrap();
        assert_eq!(fit.state.varsigma_hat, sample.varsigma_n);
        assert_eq!(fit.state.known_variance, Some(sample.varsigma_n));
    }
}
