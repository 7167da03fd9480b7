// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Regression functions, volatility and noise laws, and sample generation for
//! `y_j = S(x_j) + sigma_j(S) xi_j`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::basis::{phi_unchecked, BasisTable, DesignGrid};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Membership certificate for the Sobolev ball `W_r^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevClass<T> {
    pub k: u32,
    pub r: T,
}

/// Ellipsoid semi-axis weight `a_j = sum_{l=0}^k (2 pi [j/2])^{2l}`, with `0^0 = 1`.
pub fn sobolev_weight<T: Scalar>(j: usize, k: u32) -> T {
    let base = T::TAU() * T::from_usize_lossy(j / 2);
    let sq = base * base;
    let mut term = T::one();
    let mut total = T::one();
    for _ in 0..k {
        term = term * sq;
        total = total + term;
    }
    total
}

type EvalFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A regression function evaluable on `[0, 1]`, optionally backed by a finite
/// Fourier expansion in the trigonometric basis.
#[derive(Clone)]
pub struct SignalSpec<T> {
    name: String,
    eval: EvalFn<T>,
    /// `theta_j` at index `j - 1`.
    fourier_coeffs: Option<Arc<Vec<T>>>,
    sobolev: Option<SobolevClass<T>>,
}

impl<T: fmt::Debug> fmt::Debug for SignalSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignalSpec")
            .field("name", &self.name)
            .field("terms", &self.fourier_coeffs.as_ref().map(|c| c.len()))
            .field("sobolev", &self.sobolev)
            .finish()
    }
}

impl<T: Scalar> SignalSpec<T> {
    /// Finite trigonometric series `sum_j coeffs[j-1] phi_j`, certified in `W_r^k`
    /// with `r` equal to its exact ellipsoid functional.
    pub fn trig_polynomial(name: impl Into<String>, coeffs: Vec<T>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("Sobolev order k must be >= 1"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("Fourier coefficients must be finite"));
        }
        let coeffs = Arc::new(coeffs);
        let support: Vec<(usize, T)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != T::zero())
            .map(|(i, &c)| (i + 1, c))
            .collect();
        let eval: EvalFn<T> =
            Arc::new(move |x: T| compensated_sum(support.iter().map(|&(j, c)| c * phi_unchecked(j, x))));
        let mut spec = SignalSpec {
            name: name.into(),
            eval,
            fourier_coeffs: Some(coeffs),
            sobolev: None,
        };
        let r = ellipsoid_functional(spec.fourier_coeffs.as_deref().unwrap(), k);
        spec.sobolev = Some(SobolevClass { k, r });
        Ok(spec)
    }

    /// Arbitrary function with an optional caller-declared Sobolev certificate.
    pub fn custom<F>(name: impl Into<String>, f: F, sobolev: Option<SobolevClass<T>>) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        SignalSpec {
            name: name.into(),
            eval: Arc::new(f),
            fourier_coeffs: None,
            sobolev,
        }
    }

    pub fn zero(k: u32) -> Result<Self> {
        Self::trig_polynomial("zero", Vec::new(), k)
    }

    pub fn constant(c: T, k: u32) -> Result<Self> {
        Self::trig_polynomial("constant", vec![c], k)
    }

    /// A single basis function `phi_j`.
    pub fn basis_function(j: usize, k: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::domain("basis index j must be >= 1"));
        }
        let mut c = vec![T::zero(); j];
        c[j - 1] = T::one();
        Self::trig_polynomial(format!("phi{j}"), c, k)
    }

    /// `amplitude * sin(2 pi x)`, i.e. `amplitude / sqrt(2) * phi_3`.
    pub fn sine(amplitude: T, k: u32) -> Result<Self> {
        let mut spec = Self::trig_polynomial("sin", vec![T::zero(), T::zero(), amplitude / T::SQRT_2()], k)?;
        spec.eval = Arc::new(move |x: T| amplitude * (T::TAU() * x).sin());
        Ok(spec)
    }

    /// `1 + sin(2 pi x) + 0.5 cos(4 pi x)`: Fourier support `j <= 4`.
    pub fn trig_mix(k: u32) -> Result<Self> {
        let h = T::one() / T::SQRT_2();
        let coeffs = vec![T::one(), T::zero(), h, T::lit(0.5) * h];
        Self::trig_polynomial("trig_mix", coeffs, k)
    }

    /// Genuinely infinite-dimensional representative of `W_r^k`:
    /// `theta_1 = 0`, `theta_j = scale * [j/2]^{-(k+1)}` for `2 <= j <= j_max`.
    pub fn slow_decay(scale: T, k: u32, j_max: usize) -> Result<Self> {
        if j_max < 2 {
            return Err(Error::domain("j_max must be >= 2"));
        }
        let p = -(k as i32 + 1);
        let mut coeffs = vec![T::zero(); j_max];
        for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = scale * T::from_usize_lossy(i.div_ceil(2)).powi(p);
        }
        let mut spec = Self::trig_polynomial("slow_decay", coeffs, k)?;
        // Harmonic-pair form of the same series: l-th pair carries cos and sin with equal weight.
        let weights: Vec<(usize, T, T)> = (1..=j_max / 2)
            .map(|l| {
                let w = scale * T::from_usize_lossy(l).powi(p) * T::SQRT_2();
                let ws = if 2 * l < j_max { w } else { T::zero() };
                (l, w, ws)
            })
            .collect();
        spec.eval = Arc::new(move |x: T| {
            compensated_sum(weights.iter().map(|&(l, wc, ws)| {
                let (s, c) = (T::TAU() * T::from_usize_lossy(l) * x).sin_cos();
                wc * c + ws * s
            }))
        });
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }

    pub fn fourier_coeffs(&self) -> Option<&[T]> {
        self.fourier_coeffs.as_deref().map(|v| v.as_slice())
    }

    pub fn sobolev(&self) -> Option<SobolevClass<T>> {
        self.sobolev
    }

    /// Same function re-certified at Sobolev order `k` (requires Fourier coefficients).
    pub fn with_sobolev_order(&self, k: u32) -> Result<Self> {
        let coeffs = self
            .fourier_coeffs()
            .ok_or_else(|| Error::UnsupportedSignal(format!("signal '{}' has no Fourier coefficients", self.name)))?;
        if k == 0 {
            return Err(Error::domain("Sobolev order k must be >= 1"));
        }
        let mut out = self.clone();
        out.sobolev = Some(SobolevClass {
            k,
            r: ellipsoid_functional(coeffs, k),
        });
        Ok(out)
    }

    pub fn values_on(&self, grid: &DesignGrid<T>) -> Vec<T> {
        grid.points().iter().map(|&x| self.eval(x)).collect()
    }

    /// Compares `S(0)` with `S(1)`.
    pub fn is_periodic(&self, tol: T) -> bool {
        (self.eval(T::zero()) - self.eval(T::one())).abs() <= tol
    }
}

fn ellipsoid_functional<T: Scalar>(coeffs: &[T], k: u32) -> T {
    compensated_sum(
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| sobolev_weight::<T>(i + 1, k) * c * c),
    )
}

/// Ellipsoid functional `sum_j a_j theta_j^2` at the signal's certified order.
pub fn sobolev_norm<T: Scalar>(signal: &SignalSpec<T>) -> Result<T> {
    let coeffs = signal
        .fourier_coeffs()
        .ok_or_else(|| Error::UnsupportedSignal(format!("signal '{}' has no Fourier coefficients", signal.name())))?;
    let k = signal
        .sobolev()
        .map(|s| s.k)
        .ok_or_else(|| Error::UnsupportedSignal(format!("signal '{}' has no Sobolev order", signal.name())))?;
    Ok(ellipsoid_functional(coeffs, k))
}

/// Tail energy `sum_{j=m+1}^n theta_{j,n}^2` of the grid coefficients of `S`.
pub fn fourier_tail<T: Scalar>(signal: &SignalSpec<T>, grid: &DesignGrid<T>, m: usize) -> Result<T> {
    let n = grid.n();
    if m < 1 || m > n - 1 {
        return Err(Error::domain(format!("tail start m = {m} outside 1..={}", n - 1)));
    }
    let theta = grid.basis_table().dft(&signal.values_on(grid))?;
    Ok(tail_energy(&theta, m))
}

pub(crate) fn tail_energy<T: Scalar>(theta: &[T], m: usize) -> T {
    compensated_sum(theta.iter().skip(m).map(|&t| t * t))
}

type CustomVolFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// How `sigma^2` depends on the design point and the regression value.
#[derive(Clone)]
pub enum VolatilityKind<T> {
    /// `c0 + c1 x + c2 S(x)^2`.
    Budget {
        c0: T,
        c1: T,
        c2: T,
    },
    Constant(T),
    /// Caller-supplied `(x, S(x)) -> sigma^2`.
    Custom(CustomVolFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for VolatilityKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolatilityKind::Budget { c0, c1, c2 } => {
                write!(f, "Budget {{ c0: {c0:?}, c1: {c1:?}, c2: {c2:?} }}")
            }
            VolatilityKind::Constant(s) => write!(f, "Constant({s:?})"),
            VolatilityKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: Scalar> VolatilityKind<T> {
    pub fn budget(c0: T, c1: T, c2: T) -> Result<Self> {
        if !(c0 > T::zero()) || !(c1 >= T::zero()) || !(c2 >= T::zero()) {
            return Err(Error::domain("budget volatility needs c0 > 0 and c1, c2 >= 0"));
        }
        Ok(VolatilityKind::Budget { c0, c1, c2 })
    }

    pub fn constant(sigma_sq: T) -> Result<Self> {
        if !(sigma_sq > T::zero()) || !sigma_sq.is_finite() {
            return Err(Error::domain("constant volatility must be positive and finite"));
        }
        Ok(VolatilityKind::Constant(sigma_sq))
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(T, T) -> T + Send + Sync + 'static,
    {
        VolatilityKind::Custom(Arc::new(f))
    }

    #[inline]
    pub fn raw(&self, x: T, s_val: T) -> T {
        match self {
            VolatilityKind::Budget { c0, c1, c2 } => *c0 + *c1 * x + *c2 * s_val * s_val,
            VolatilityKind::Constant(s) => *s,
            VolatilityKind::Custom(f) => f(x, s_val),
        }
    }
}

/// Volatility law together with its declared upper bound `sigma_*`.
#[derive(Debug, Clone)]
pub struct VolatilitySpec<T> {
    kind: VolatilityKind<T>,
    sigma_star: T,
}

impl<T: Scalar> VolatilitySpec<T> {
    pub fn new(kind: VolatilityKind<T>, sigma_star: T) -> Result<Self> {
        if !(sigma_star >= T::one()) || !sigma_star.is_finite() {
            return Err(Error::domain("sigma_star must be finite and >= 1"));
        }
        Ok(VolatilitySpec { kind, sigma_star })
    }

    /// Simulation truth: `sigma_* = max(1, max_l sigma_l^2)` over the design.
    pub fn calibrated(kind: VolatilityKind<T>, signal: &SignalSpec<T>, grid: &DesignGrid<T>) -> Result<Self> {
        let mut sigma_star = T::one();
        for &x in grid.points() {
            let v = kind.raw(x, signal.eval(x));
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::SpecInconsistency(format!(
                    "volatility sigma^2({x}) = {v} is not positive and finite"
                )));
            }
            sigma_star = sigma_star.max(v);
        }
        Self::new(kind, sigma_star)
    }

    pub fn kind(&self) -> &VolatilityKind<T> {
        &self.kind
    }

    pub fn sigma_star(&self) -> T {
        self.sigma_star
    }
}

/// `sigma^2(x)` under the spec; fails if the declared bound or positivity is violated.
pub fn volatility_at<T: Scalar>(spec: &VolatilitySpec<T>, x: T, s_val: T) -> Result<T> {
    let v = spec.kind.raw(x, s_val);
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::SpecInconsistency(format!(
            "volatility sigma^2({x}) = {v} is not positive and finite"
        )));
    }
    if v > spec.sigma_star {
        return Err(Error::SpecInconsistency(format!(
            "volatility sigma^2({x}) = {v} exceeds declared sigma_star = {}",
            spec.sigma_star
        )));
    }
    Ok(v)
}

/// Standardized noise law: zero mean, unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    Gaussian,
    /// `+-1` with equal probability.
    Rademacher,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformCentered,
    /// `xi = 0` identically. Test hook for noiseless runs; not a valid noise law.
    Silent,
}

impl NoiseSpec {
    /// Fourth moment `E xi^4`.
    pub fn xi_star(self) -> f64 {
        match self {
            NoiseSpec::Gaussian => 3.0,
            NoiseSpec::Rademacher => 1.0,
            NoiseSpec::UniformCentered => 1.8,
            NoiseSpec::Silent => 1.0,
        }
    }

    /// `sqrt(E xi^4 - 1)`.
    pub fn xi_bar(self) -> f64 {
        (self.xi_star() - 1.0).sqrt()
    }

    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseSpec::Gaussian => rng.sample(StandardNormal),
            NoiseSpec::Rademacher => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseSpec::UniformCentered => {
                let a = 3f64.sqrt();
                rng.random_range(-a..a)
            }
            NoiseSpec::Silent => 0.0,
        }
    }
}

/// Deterministic RNG stream for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from the regression model, with the truth retained for auditing.
#[derive(Debug, Clone)]
pub struct Sample<T> {
    pub grid: DesignGrid<T>,
    pub y: Vec<T>,
    pub truth: SignalSpec<T>,
    /// `S(x_l)` on the design.
    pub signal_values: Vec<T>,
    pub sigma_sq: Vec<T>,
    /// Summarized noise variance `n^{-1} sum_l sigma_l^2`.
    pub varsigma_n: T,
    pub seed: u64,
}

/// Scenario truth precomputed once and reused for many replications.
#[derive(Debug, Clone)]
pub struct SampleGenerator<T> {
    grid: DesignGrid<T>,
    signal: SignalSpec<T>,
    noise: NoiseSpec,
    signal_values: Vec<T>,
    sigma: Vec<T>,
    sigma_sq: Vec<T>,
    varsigma_n: T,
}

impl<T: Scalar> SampleGenerator<T> {
    pub fn new(
        signal: &SignalSpec<T>,
        vol: &VolatilitySpec<T>,
        noise: NoiseSpec,
        grid: &DesignGrid<T>,
    ) -> Result<Self> {
        let signal_values = signal.values_on(grid);
        let sigma_sq = grid
            .points()
            .iter()
            .zip(&signal_values)
            .map(|(&x, &s)| volatility_at(vol, x, s))
            .collect::<Result<Vec<T>>>()?;
        let sigma = sigma_sq.iter().map(|v| v.sqrt()).collect();
        let varsigma_n = compensated_sum(sigma_sq.iter().copied()) / T::from_usize_lossy(grid.n());
        Ok(SampleGenerator {
            grid: grid.clone(),
            signal: signal.clone(),
            noise,
            signal_values,
            sigma,
            sigma_sq,
            varsigma_n,
        })
    }

    pub fn grid(&self) -> &DesignGrid<T> {
        &self.grid
    }

    pub fn signal_values(&self) -> &[T] {
        &self.signal_values
    }

    pub fn sigma_sq(&self) -> &[T] {
        &self.sigma_sq
    }

    pub fn varsigma_n(&self) -> T {
        self.varsigma_n
    }

    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    /// Observations only.
    pub fn draw_y(&self, seed: u64) -> Vec<T> {
        let mut rng = rng_for(seed);
        self.signal_values
            .iter()
            .zip(&self.sigma)
            .map(|(&s, &sd)| s + sd * T::lit(self.noise.draw(&mut rng)))
            .collect()
    }

    pub fn draw(&self, seed: u64) -> Sample<T> {
        Sample {
            grid: self.grid.clone(),
            y: self.draw_y(seed),
            truth: self.signal.clone(),
            signal_values: self.signal_values.clone(),
            sigma_sq: self.sigma_sq.clone(),
            varsigma_n: self.varsigma_n,
            seed,
        }
    }

    /// Grid coefficients `theta_{j,n} = (S, phi_j)_n` of the truth.
    pub fn true_coefficients(&self, table: &BasisTable<T>) -> Result<Vec<T>> {
        table.dft(&self.signal_values)
    }
}

/// Draws `y_j = S(x_j) + sigma_j xi_j`; deterministic given `seed`.
pub fn generate_sample<T: Scalar>(
    signal: &SignalSpec<T>,
    vol: &VolatilitySpec<T>,
    noise: NoiseSpec,
    grid: &DesignGrid<T>,
    seed: u64,
) -> Result<Sample<T>> {
    Ok(SampleGenerator::new(signal, vol, noise, grid)?.draw(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn budget_volatility_examples() {
        let kind = VolatilityKind::budget(1.0, 1.0, 1.0).unwrap();
        let spec = VolatilitySpec::new(kind, 3.0).unwrap();
        assert_abs_diff_eq!(volatility_at(&spec, 0.25, 1.0).unwrap(), 2.25, epsilon = 1e-15);
        let c = VolatilitySpec::new(VolatilityKind::constant(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(volatility_at(&c, 0.7, 5.0).unwrap(), 1.0);
        let d = VolatilitySpec::new(VolatilityKind::budget(2.0, 0.0, 0.0).unwrap(), 2.0).unwrap();
        assert_eq!(volatility_at(&d, 0.9, -4.0).unwrap(), 2.0);
    }

    #[test]
    fn volatility_bound_violation() {
        let kind = VolatilityKind::budget(1.0, 1.0, 1.0).unwrap();
        let spec = VolatilitySpec::new(kind, 1.5).unwrap();
        assert!(matches!(
            volatility_at(&spec, 1.0, 1.0),
            Err(Error::SpecInconsistency(_))
        ));
        let neg = VolatilitySpec::new(VolatilityKind::custom(|_x: f64, _s| -1.0), 2.0).unwrap();
        assert!(matches!(
            volatility_at(&neg, 0.5, 0.0),
            Err(Error::SpecInconsistency(_))
        ));
        assert!(VolatilitySpec::new(VolatilityKind::Constant(1.0), 0.5).is_err());
        assert!(VolatilityKind::budget(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn calibrated_sigma_star_is_design_max() {
        let grid = DesignGrid::new(11).unwrap();
        let s = SignalSpec::sine(1.0, 1).unwrap();
        let kind = VolatilityKind::budget(1.0, 1.0, 1.0).unwrap();
        let spec = VolatilitySpec::calibrated(kind.clone(), &s, &grid).unwrap();
        let max = grid
            .points()
            .iter()
            .map(|&x| kind.raw(x, s.eval(x)))
            .fold(1.0_f64, f64::max);
        assert_eq!(spec.sigma_star(), max);
    }

    #[test]
    fn sobolev_norm_examples() {
        let one = SignalSpec::<f64>::basis_function(1, 1).unwrap();
        assert_eq!(sobolev_norm(&one).unwrap(), 1.0);
        let p2 = SignalSpec::<f64>::basis_function(2, 1).unwrap();
        assert_abs_diff_eq!(sobolev_norm(&p2).unwrap(), 1.0 + 4.0 * PI * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(sobolev_norm(&p2).unwrap(), 40.4784176, epsilon = 1e-6);
        let z = SignalSpec::<f64>::zero(1).unwrap();
        assert_eq!(sobolev_norm(&z).unwrap(), 0.0);
        let c = SignalSpec::custom("c", |x: f64| x, None);
        assert!(matches!(sobolev_norm(&c), Err(Error::UnsupportedSignal(_))));
    }

    #[test]
    fn sobolev_weight_convention() {
        assert_eq!(sobolev_weight::<f64>(1, 1), 1.0);
        assert_eq!(sobolev_weight::<f64>(1, 3), 1.0);
        let w = 2.0 * PI;
        assert_abs_diff_eq!(
            sobolev_weight::<f64>(5, 2),
            1.0 + (2.0 * w).powi(2) + (2.0 * w).powi(4),
            epsilon = 1e-6
        );
    }

    #[test]
    fn fourier_tail_examples() {
        let grid = DesignGrid::new(51).unwrap();
        let p2 = SignalSpec::<f64>::basis_function(2, 1).unwrap();
        assert_abs_diff_eq!(fourier_tail(&p2, &grid, 2).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fourier_tail(&p2, &grid, 7).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fourier_tail(&p2, &grid, 1).unwrap(), 1.0, epsilon = 1e-10);
        assert!(fourier_tail(&p2, &grid, 0).is_err());
        assert!(fourier_tail(&p2, &grid, 51).is_err());
    }

    #[test]
    fn sine_tail_scaled_by_m_squared() {
        let grid = DesignGrid::new(101).unwrap();
        let s = SignalSpec::<f64>::sine(1.0, 1).unwrap();
        let r = s.sobolev().unwrap().r;
        for m in 1..101 {
            let t = fourier_tail(&s, &grid, m).unwrap();
            assert!((m * m) as f64 * t <= 4.0 * r + 1e-9);
        }
    }

    #[test]
    fn built_in_signals_are_periodic_and_match_coefficients() {
        let sigs = [
            SignalSpec::<f64>::sine(1.0, 1).unwrap(),
            SignalSpec::trig_mix(2).unwrap(),
            SignalSpec::slow_decay(1.0, 1, 400).unwrap(),
        ];
        for s in &sigs {
            assert!(s.is_periodic(1e-9), "{}", s.name());
            let coeffs = s.fourier_coeffs().unwrap().to_vec();
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let direct: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * crate::basis::phi(j + 1, x).unwrap())
                    .sum();
                assert_abs_diff_eq!(s.eval(x), direct, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn recertification_changes_radius() {
        let s = SignalSpec::<f64>::sine(1.0, 1).unwrap();
        let s2 = s.with_sobolev_order(2).unwrap();
        let w = 2.0 * PI;
        assert_abs_diff_eq!(s2.sobolev().unwrap().r, 0.5 * (1.0 + w * w + w.powi(4)), epsilon = 1e-9);
        assert!(SignalSpec::custom("f", |x: f64| x, None).with_sobolev_order(1).is_err());
    }

    #[test]
    fn silent_noise_gives_exact_signal() {
        let grid = DesignGrid::new(21).unwrap();
        let s = SignalSpec::trig_mix(1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::budget(1.0, 1.0, 1.0).unwrap(), &s, &grid).unwrap();
        let sample = generate_sample(&s, &vol, NoiseSpec::Silent, &grid, 3).unwrap();
        assert_eq!(sample.y, s.values_on(&grid));
    }

    #[test]
    fn same_seed_same_sample() {
        let grid = DesignGrid::<f64>::new(21).unwrap();
        let s = SignalSpec::sine(1.0, 1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::budget(1.0, 1.0, 1.0).unwrap(), &s, &grid).unwrap();
        for noise in [NoiseSpec::Gaussian, NoiseSpec::Rademacher, NoiseSpec::UniformCentered] {
            let a = generate_sample(&s, &vol, noise, &grid, 99).unwrap();
            let b = generate_sample(&s, &vol, noise, &grid, 99).unwrap();
            let c = generate_sample(&s, &vol, noise, &grid, 100).unwrap();
            assert_eq!(
                a.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                b.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_ne!(a.y, c.y);
        }
    }

    #[test]
    fn constant_volatility_varsigma_exact() {
        let grid = DesignGrid::new(101).unwrap();
        let s = SignalSpec::sine(1.0, 1).unwrap();
        let vol = VolatilitySpec::calibrated(VolatilityKind::constant(1.7).unwrap(), &s, &grid).unwrap();
        let sample = generate_sample(&s, &vol, NoiseSpec::Gaussian, &grid, 1).unwrap();
        assert_eq!(sample.varsigma_n, 1.7);
        let mean = sample.sigma_sq.iter().sum::<f64>() / 101.0;
        assert_abs_diff_eq!(sample.varsigma_n, mean, epsilon = 1e-12);
    }
}
