// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Candidate weight vectors: the Pinsker sieve and its summary statistics.

use serde::Serialize;

use crate::basis::DesignGrid;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Sieve index `alpha = (beta, t)` with the derived bandwidth `omega` and plateau end `j0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinskerLabel<T> {
    pub beta: u32,
    pub t: T,
    pub omega: T,
    pub j0: usize,
}

/// Shrinkage weights `lambda(1..=n)`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    coeffs: Vec<T>,
    label: Option<PinskerLabel<T>>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("weight vector must be nonempty"));
        }
        if let Some((j, v)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= T::zero() && v <= T::one()))
        {
            return Err(Error::domain(format!("weight lambda({}) = {v} outside [0, 1]", j + 1)));
        }
        Ok(WeightVector { coeffs, label: None })
    }

    pub fn ones(n: usize) -> Self {
        WeightVector {
            coeffs: vec![T::one(); n],
            label: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        WeightVector {
            coeffs: vec![T::zero(); n],
            label: None,
        }
    }

    /// Indicator of the single index `j` (one-based).
    pub fn unit(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::domain(format!("unit index {j} outside 1..={n}")));
        }
        let mut coeffs = vec![T::zero(); n];
        coeffs[j - 1] = T::one();
        Ok(WeightVector { coeffs, label: None })
    }

    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn label(&self) -> Option<&PinskerLabel<T>> {
        self.label.as_ref()
    }

    pub fn sum(&self) -> T {
        compensated_sum(self.coeffs.iter().copied())
    }

    /// `|lambda|^2 = sum_j lambda(j)^2`.
    pub fn norm_sq(&self) -> T {
        compensated_sum(self.coeffs.iter().map(|&v| v * v))
    }
}

/// Explicit sieve parameter overrides; unset fields take the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SieveOverrides<T> {
    pub epsilon: Option<T>,
    pub k_star: Option<u32>,
}

/// Parameters of the sieve `{1..k*} x {t_1..t_m}`, `t_i = i epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveParams<T> {
    pub epsilon: T,
    pub k_star: u32,
    pub m: usize,
    pub t: Vec<T>,
}

impl<T> SieveParams<T> {
    /// Family size `k* m`.
    pub fn nu(&self) -> usize {
        self.k_star as usize * self.m
    }
}

/// Defaults: `epsilon = 1/ln n`, `k* = ceil(sqrt(ln n))`, `m = floor(1/epsilon^2)`.
pub fn build_sieve<T: Scalar>(n: usize, overrides: SieveOverrides<T>) -> Result<SieveParams<T>> {
    if n < 3 {
        return Err(Error::domain(format!("sample size n = {n} must be at least 3")));
    }
    let ln_n = T::from_usize_lossy(n).ln();
    let epsilon = match overrides.epsilon {
        Some(e) if e > T::zero() && e <= T::one() => e,
        Some(e) => return Err(Error::domain(format!("epsilon = {e} outside (0, 1]"))),
        None => T::one() / ln_n,
    };
    let k_star = match overrides.k_star {
        Some(0) => return Err(Error::domain("k_star must be >= 1")),
        Some(k) => k,
        None => ln_n.sqrt().ceil().to_u32().unwrap_or(1).max(1),
    };
    let m = (T::one() / (epsilon * epsilon))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::domain("sieve size overflow"))?
        .max(1);
    let t = (1..=m).map(|i| T::from_usize_lossy(i) * epsilon).collect();
    Ok(SieveParams { epsilon, k_star, m, t })
}

/// `A_beta = (beta + 1)(2 beta + 1) / (pi^{2 beta} beta)`.
pub fn pinsker_constant<T: Scalar>(beta: u32) -> T {
    let b = T::from_u32(beta).unwrap();
    (b + T::one()) * (T::lit(2.0) * b + T::one()) / (T::PI().powi(2 * beta as i32) * b)
}

/// Pinsker weights for `alpha = (beta, t)`:
/// `lambda(j) = 1` for `j <= j0`, `1 - (j/omega)^beta` for `j0 < j <= omega`, `0` beyond,
/// with `omega = (A_beta t n)^{1/(2 beta + 1)}` and `j0 = floor(omega / ln n)`.
pub fn pinsker_weight<T: Scalar>(beta: u32, t: T, n: usize) -> Result<WeightVector<T>> {
    if beta == 0 {
        return Err(Error::domain("beta must be >= 1"));
    }
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    if n < 2 {
        return Err(Error::domain("n must be >= 2"));
    }
    let nf = T::from_usize_lossy(n);
    let exponent = T::one() / T::from_u32(2 * beta + 1).unwrap();
    let omega = (pinsker_constant::<T>(beta) * t * nf).powf(exponent);
    let j0 = (omega / nf.ln()).floor().to_usize().unwrap_or(0);
    let coeffs = (1..=n)
        .map(|j| {
            let jf = T::from_usize_lossy(j);
            if j <= j0 {
                T::one()
            } else if jf <= omega {
                (T::one() - (jf / omega).powi(beta as i32)).max(T::zero())
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(WeightVector {
        coeffs,
        label: Some(PinskerLabel { beta, t, omega, j0 }),
    })
}

/// Weight statistics entering the oracle constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyStats<T> {
    pub nu: usize,
    /// `max_lambda sum_j lambda(j)`.
    pub rho_n: T,
    /// `max_lambda sup_x |sum_j lambda(j) phi_bar_j(x)|`.
    pub rho_bar_1: T,
    /// Same with `lambda(j)^2`.
    pub rho_bar_2: T,
    pub sup_resolution: usize,
}

/// Finite family `Lambda` with its statistics, in a fixed order.
#[derive(Debug, Clone)]
pub struct WeightFamily<T> {
    members: Vec<WeightVector<T>>,
    n: usize,
    sieve: Option<SieveParams<T>>,
    stats: FamilyStats<T>,
}

/// Default sup-grid size `max(8n, 10^4)`.
pub fn default_sup_resolution(n: usize) -> usize {
    (8 * n).max(10_000)
}

impl<T: Scalar> WeightFamily<T> {
    /// Pinsker family over the sieve, emitted in lexicographic `(beta, t)` order.
    pub fn pinsker(grid: &DesignGrid<T>, overrides: SieveOverrides<T>) -> Result<Self> {
        let n = grid.n();
        let sieve = build_sieve(n, overrides)?;
        let mut members = Vec::with_capacity(sieve.nu());
        for beta in 1..=sieve.k_star {
            for &t in &sieve.t {
                members.push(pinsker_weight(beta, t, n)?);
            }
        }
        let stats = compute_stats(&members, default_sup_resolution(n))?;
        Ok(WeightFamily {
            members,
            n,
            sieve: Some(sieve),
            stats,
        })
    }

    /// Any explicit nonempty list of equal-length weight vectors.
    pub fn custom(members: Vec<WeightVector<T>>) -> Result<Self> {
        let n = members
            .first()
            .map(|m| m.len())
            .ok_or_else(|| Error::domain("weight family must be nonempty"))?;
        for m in &members {
            crate::error::check_len(n, m.len())?;
        }
        let stats = compute_stats(&members, default_sup_resolution(n))?;
        Ok(WeightFamily {
            members,
            n,
            sieve: None,
            stats,
        })
    }

    /// Appends a member and refreshes the statistics.
    pub fn with_member(mut self, member: WeightVector<T>) -> Result<Self> {
        crate::error::check_len(self.n, member.len())?;
        self.members.push(member);
        self.stats = compute_stats(&self.members, self.stats.sup_resolution)?;
        Ok(self)
    }

    pub fn members(&self) -> &[WeightVector<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sieve(&self) -> Option<&SieveParams<T>> {
        self.sieve.as_ref()
    }

    pub fn stats(&self) -> &FamilyStats<T> {
        &self.stats
    }
}

/// Recomputes the statistics of `family` with an explicit sup-grid size (`>= 8n`).
pub fn family_stats<T: Scalar>(
    family: &WeightFamily<T>,
    grid: &DesignGrid<T>,
    sup_resolution: usize,
) -> Result<FamilyStats<T>> {
    crate::error::check_len(grid.n(), family.n())?;
    if sup_resolution < 8 * grid.n() {
        return Err(Error::domain(format!(
            "sup_resolution = {sup_resolution} below 8n = {}",
            8 * grid.n()
        )));
    }
    compute_stats(family.members(), sup_resolution)
}

/// `sum_j w(j) phi_bar_j(x) = sum_{l >= 1} (w(2l) - w(2l+1)) cos(4 pi l x)`; returns the
/// cosine coefficients `c_l` at index `l - 1`, trimmed after the last nonzero.
fn cosine_coefficients<T: Scalar>(w: &[T]) -> Vec<T> {
    let n = w.len();
    let at = |j: usize| if j <= n { w[j - 1] } else { T::zero() };
    let mut c: Vec<T> = (1..=n / 2).map(|l| at(2 * l) - at(2 * l + 1)).collect();
    while c.last().is_some_and(|v| *v == T::zero()) {
        c.pop();
    }
    c
}

fn compute_stats<T: Scalar>(members: &[WeightVector<T>], sup_resolution: usize) -> Result<FamilyStats<T>> {
    if members.is_empty() {
        return Err(Error::domain("weight family must be nonempty"));
    }
    if sup_resolution < 2 {
        return Err(Error::domain("sup_resolution must be >= 2"));
    }
    let rho_n = members.iter().map(|m| m.sum()).fold(T::neg_infinity(), T::max);

    let first: Vec<Vec<T>> = members.iter().map(|m| cosine_coefficients(m.coeffs())).collect();
    let second: Vec<Vec<T>> = members
        .iter()
        .map(|m| {
            let sq: Vec<T> = m.coeffs().iter().map(|&v| v * v).collect();
            cosine_coefficients(&sq)
        })
        .collect();
    let l_max = first.iter().chain(&second).map(|c| c.len()).max().unwrap_or(0);

    let mut sup1 = vec![T::zero(); members.len()];
    let mut sup2 = vec![T::zero(); members.len()];
    if l_max > 0 {
        let four_pi = T::lit(2.0) * T::TAU();
        let denom = T::from_usize_lossy(sup_resolution - 1);
        let mut cosines = vec![T::zero(); l_max];
        for g in 0..sup_resolution {
            let x = T::from_usize_lossy(g) / denom;
            for (l, c) in cosines.iter_mut().enumerate() {
                *c = (four_pi * T::from_usize_lossy(l + 1) * x).cos();
            }
            for (i, (c1, c2)) in first.iter().zip(&second).enumerate() {
                let v1 = compensated_sum(c1.iter().zip(&cosines).map(|(&a, &b)| a * b)).abs();
                let v2 = compensated_sum(c2.iter().zip(&cosines).map(|(&a, &b)| a * b)).abs();
                sup1[i] = sup1[i].max(v1);
                sup2[i] = sup2[i].max(v2);
            }
        }
    }
    let max = |v: &[T]| v.iter().copied().fold(T::zero(), T::max);
    Ok(FamilyStats {
        nu: members.len(),
        rho_n,
        rho_bar_1: max(&sup1),
        rho_bar_2: max(&sup2),
        sup_resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn sieve_defaults() {
        let s = build_sieve::<f64>(1000, SieveOverrides::default()).unwrap();
        assert_abs_diff_eq!(s.epsilon, 0.14476, epsilon = 1e-5);
        assert_eq!((s.k_star, s.m, s.nu()), (3, 47, 141));
        let s = build_sieve::<f64>(3, SieveOverrides::default()).unwrap();
        assert_abs_diff_eq!(s.epsilon, 1.0 / 3f64.ln(), epsilon = 1e-12);
        assert!(s.epsilon <= 1.0);
        assert_eq!(s.k_star, 2);
    }

    #[test]
    fn sieve_overrides() {
        let s = build_sieve::<f64>(
            101,
            SieveOverrides {
                epsilon: Some(1.0),
                k_star: Some(1),
            },
        )
        .unwrap();
        assert_eq!((s.m, s.nu()), (1, 1));
        assert_eq!(s.t, vec![1.0]);
        assert!(build_sieve::<f64>(
            101,
            SieveOverrides {
                epsilon: Some(0.0),
                k_star: None
            }
        )
        .is_err());
        assert!(build_sieve::<f64>(
            101,
            SieveOverrides {
                epsilon: Some(1.5),
                k_star: None
            }
        )
        .is_err());
        assert!(build_sieve::<f64>(
            101,
            SieveOverrides {
                epsilon: None,
                k_star: Some(0)
            }
        )
        .is_err());
    }

    #[test]
    fn pinsker_constant_beta_one() {
        assert_abs_diff_eq!(pinsker_constant::<f64>(1), 6.0 / (PI * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(pinsker_constant::<f64>(1), 0.60793, epsilon = 1e-5);
        for b in 2..8 {
            assert!(pinsker_constant::<f64>(b) <= pinsker_constant::<f64>(1));
        }
    }

    #[test]
    fn pinsker_weight_example() {
        let w = pinsker_weight::<f64>(1, 1.0, 1001).unwrap();
        let label = *w.label().unwrap();
        assert_abs_diff_eq!(label.omega, 608.54_f64.cbrt(), epsilon = 1e-3);
        assert_abs_diff_eq!(label.omega, 8.475, epsilon = 1e-3);
        assert_eq!(label.j0, 1);
        assert_eq!(w.coeffs()[0], 1.0);
        assert_eq!(w.coeffs()[8], 0.0);
        assert_abs_diff_eq!(w.coeffs()[1], 1.0 - 2.0 / label.omega, epsilon = 1e-15);
        assert!(w.sum() <= label.omega);
    }

    #[test]
    fn degenerate_bandwidth_gives_zero_vector() {
        let w = pinsker_weight::<f64>(5, 1e-3, 5).unwrap();
        assert!(w.label().unwrap().omega < 1.0);
        assert!(w.coeffs().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stats_of_simple_families() {
        let n = 11;
        let fam = WeightFamily::custom(vec![WeightVector::<f64>::ones(n)]).unwrap();
        assert_abs_diff_eq!(fam.stats().rho_bar_1, 0.0, epsilon = 1e-9);
        assert_eq!(fam.stats().rho_n, 11.0);
        let fam = WeightFamily::custom(vec![WeightVector::<f64>::unit(n, 1).unwrap()]).unwrap();
        assert_eq!(fam.stats().rho_n, 1.0);
        assert_eq!(fam.stats().rho_bar_1, 0.0);
        // lambda = e_2 leaves cos(4 pi x) alone, whose sup is 1.
        let fam = WeightFamily::custom(vec![WeightVector::<f64>::unit(n, 2).unwrap()]).unwrap();
        assert_abs_diff_eq!(fam.stats().rho_bar_1, 1.0, epsilon = 1e-12);
        assert!(WeightFamily::<f64>::custom(vec![]).is_err());
    }

    #[test]
    fn family_stats_resolution_check() {
        let grid = DesignGrid::<f64>::new(101).unwrap();
        let fam = WeightFamily::pinsker(&grid, SieveOverrides::default()).unwrap();
        assert!(family_stats(&fam, &grid, 100).is_err());
        let s = family_stats(&fam, &grid, 808).unwrap();
        assert_eq!(s.nu, fam.len());
    }

    #[test]
    fn pinsker_family_order_and_size() {
        let grid = DesignGrid::<f64>::new(101).unwrap();
        let fam = WeightFamily::pinsker(&grid, SieveOverrides::default()).unwrap();
        let sieve = fam.sieve().unwrap();
        assert_eq!(fam.len(), sieve.nu());
        let labels: Vec<(u32, f64)> = fam
            .members()
            .iter()
            .map(|m| (m.label().unwrap().beta, m.label().unwrap().t))
            .collect();
        let mut sorted = labels.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(labels, sorted);
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![0.5_f64, 1.2]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::<f64>::new(vec![]).is_err());
        let w = WeightVector::new(vec![1.0_f64, 0.5]).unwrap();
        assert_eq!(w.norm_sq(), 1.25);
    }
}
