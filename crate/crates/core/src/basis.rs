// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Trigonometric basis on the equispaced design `x_j = j/n`.
//!
//! With `phi_1 = 1`, `phi_j(x) = sqrt(2) cos(2 pi [j/2] x)` for even `j` and
//! `sqrt(2) sin(2 pi [j/2] x)` for odd `j >= 3`, the first `n` functions are
//! orthonormal for the empirical inner product whenever `n` is odd. That is what
//! makes the discrete Fourier transform below exactly invertible.

use crate::error::{check_len, Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Odd sample size together with its design points `j/n`, `j = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrid<T> {
    n: usize,
    points: Vec<T>,
}

impl<T: Scalar> DesignGrid<T> {
    /// Rejects even `n` and `n < 3`; the caller decides how to make `n` odd.
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("sample size n = {n} must be at least 3")));
        }
        if n.is_multiple_of(2) {
            return Err(Error::domain(format!("sample size n = {n} must be odd")));
        }
        let nf = T::from_usize_lossy(n);
        let points = (1..=n).map(|j| T::from_usize_lossy(j) / nf).collect();
        Ok(DesignGrid { n, points })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Values of every basis function at every design point.
    pub fn basis_table(&self) -> BasisTable<T> {
        BasisTable::new(self)
    }
}

#[inline]
fn harmonic(j: usize) -> usize {
    j / 2
}

/// Basis function `phi_j(x)`; `j` is one-based.
pub fn phi<T: Scalar>(j: usize, x: T) -> Result<T> {
    if j == 0 {
        return Err(Error::domain("basis index j must be >= 1"));
    }
    Ok(phi_unchecked(j, x))
}

#[inline]
pub(crate) fn phi_unchecked<T: Scalar>(j: usize, x: T) -> T {
    if j == 1 {
        return T::one();
    }
    let arg = T::TAU() * T::from_usize_lossy(harmonic(j)) * x;
    let trig = if j.is_multiple_of(2) { arg.cos() } else { arg.sin() };
    T::SQRT_2() * trig
}

/// `phi_j(x)^2 - 1`, evaluated through the double-angle identity:
/// `+cos(4 pi [j/2] x)` for even `j`, `-cos(4 pi [j/2] x)` for odd `j >= 3`, zero for `j = 1`.
pub fn phi_bar<T: Scalar>(j: usize, x: T) -> Result<T> {
    if j == 0 {
        return Err(Error::domain("basis index j must be >= 1"));
    }
    Ok(phi_bar_unchecked(j, x))
}

#[inline]
pub(crate) fn phi_bar_unchecked<T: Scalar>(j: usize, x: T) -> T {
    if j == 1 {
        return T::zero();
    }
    let c = (T::lit(2.0) * T::TAU() * T::from_usize_lossy(harmonic(j)) * x).cos();
    if j.is_multiple_of(2) {
        c
    } else {
        -c
    }
}

/// Row-major table of `phi_j(x_l)`, rows indexed by `j - 1`.
#[derive(Debug, Clone)]
pub struct BasisTable<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> BasisTable<T> {
    pub fn new(grid: &DesignGrid<T>) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(n * n);
        for j in 1..=n {
            values.extend(grid.points().iter().map(|&x| phi_unchecked(j, x)));
        }
        BasisTable { n, values }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `phi_j` at all design points.
    #[inline]
    pub fn row(&self, j: usize) -> &[T] {
        &self.values[(j - 1) * self.n..j * self.n]
    }

    /// Empirical Fourier coefficients `(y, phi_j)_n`, `j = 1..=n`.
    pub fn dft(&self, y: &[T]) -> Result<Vec<T>> {
        check_len(self.n, y.len())?;
        let nf = T::from_usize_lossy(self.n);
        Ok((1..=self.n)
            .map(|j| {
                let row = self.row(j);
                compensated_sum(row.iter().zip(y).map(|(&p, &v)| p * v)) / nf
            })
            .collect())
    }

    /// `sum_j weights(j) theta(j) phi_j(x_l)` at every design point.
    pub fn reconstruct(&self, theta: &[T], weights: &[T]) -> Result<Vec<T>> {
        check_len(self.n, theta.len())?;
        check_len(self.n, weights.len())?;
        let mut out = vec![T::zero(); self.n];
        for j in 1..=self.n {
            let c = weights[j - 1] * theta[j - 1];
            if c == T::zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.row(j)) {
                *o = *o + c * p;
            }
        }
        Ok(out)
    }
}

/// Empirical inner product `(1/n) sum_l f(x_l) g(x_l)`.
pub fn empirical_inner<T: Scalar>(f: &[T], g: &[T], grid: &DesignGrid<T>) -> Result<T> {
    check_len(grid.n(), f.len())?;
    check_len(grid.n(), g.len())?;
    let s = compensated_sum(f.iter().zip(g).map(|(&a, &b)| a * b));
    Ok(s / T::from_usize_lossy(grid.n()))
}

/// Empirical norm squared `||f||_n^2`.
pub fn empirical_norm_sq<T: Scalar>(f: &[T], grid: &DesignGrid<T>) -> Result<T> {
    empirical_inner(f, f, grid)
}

/// Discrete Fourier transform: `theta_hat_j = (y, phi_j)_n` by `n` direct inner products.
pub fn dft<T: Scalar>(y: &[T], grid: &DesignGrid<T>) -> Result<Vec<T>> {
    check_len(grid.n(), y.len())?;
    let mut row = vec![T::zero(); grid.n()];
    (1..=grid.n())
        .map(|j| {
            for (r, &x) in row.iter_mut().zip(grid.points()) {
                *r = phi_unchecked(j, x);
            }
            empirical_inner(y, &row, grid)
        })
        .collect()
}

/// Weighted estimator `S_lambda(x) = sum_j lambda(j) theta(j) phi_j(x)`.
pub fn reconstruct<T: Scalar>(theta: &[T], lambda: &[T], x: T) -> Result<T> {
    check_len(theta.len(), lambda.len())?;
    Ok(theta
        .iter()
        .zip(lambda)
        .enumerate()
        .filter(|(_, (&t, &l))| t != T::zero() && l != T::zero())
        .map(|(i, (&t, &l))| l * t * phi_unchecked(i + 1, x))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> DesignGrid<f64> {
        DesignGrid::new(n).unwrap()
    }

    fn row(j: usize, g: &DesignGrid<f64>) -> Vec<f64> {
        g.points().iter().map(|&x| phi(j, x).unwrap()).collect()
    }

    #[test]
    fn grid_rejects_even_and_small() {
        assert!(matches!(DesignGrid::<f64>::new(4), Err(Error::Domain(_))));
        assert!(matches!(DesignGrid::<f64>::new(1), Err(Error::Domain(_))));
        let g = grid(5);
        assert_eq!(g.points(), &[0.2, 0.4, 0.6, 0.8, 1.0]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1, 0.3_f64).unwrap(), 1.0);
        assert_abs_diff_eq!(phi(2, 0.0_f64).unwrap(), std::f64::consts::SQRT_2, epsilon = 1e-10);
        assert_abs_diff_eq!(phi(3, 0.25_f64).unwrap(), std::f64::consts::SQRT_2, epsilon = 1e-10);
        assert!(matches!(phi(0, 0.5_f64), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_bar_matches_square_minus_one() {
        for j in 1..40 {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let p = phi(j, x).unwrap();
                assert_abs_diff_eq!(phi_bar(j, x).unwrap(), p * p - 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let g = grid(5);
        let p2 = row(2, &g);
        let p3 = row(3, &g);
        assert_abs_diff_eq!(empirical_inner(&p2, &p2, &g).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(empirical_inner(&p2, &p3, &g).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(empirical_inner(&[0.0; 5], &[0.0; 5], &g).unwrap(), 0.0);
        assert_eq!(
            empirical_inner(&[0.0; 4], &[0.0; 5], &g),
            Err(Error::Dimension { expected: 5, got: 4 })
        );
    }

    #[test]
    fn dft_examples() {
        let g = grid(7);
        let theta = dft(&[2.5; 7], &g).unwrap();
        assert_abs_diff_eq!(theta[0], 2.5, epsilon = 1e-14);
        for t in &theta[1..] {
            assert_abs_diff_eq!(*t, 0.0, epsilon = 1e-14);
        }
        let theta = dft(&row(3, &g), &g).unwrap();
        for (i, t) in theta.iter().enumerate() {
            let e = if i == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(*t, e, epsilon = 1e-14);
        }
        assert!(dft(&[1.0; 6], &g).is_err());
    }

    #[test]
    fn table_dft_matches_free_dft() {
        let g = grid(31);
        let y: Vec<f64> = (0..31).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let a = dft(&y, &g).unwrap();
        let b = g.basis_table().dft(&y).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-13);
        }
    }

    #[test]
    fn reconstruct_examples() {
        let n = 9;
        assert_eq!(reconstruct(&[0.0; 9], &[1.0; 9], 0.37).unwrap(), 0.0);
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        assert_eq!(reconstruct(&e1, &[1.0; 9], 0.81).unwrap(), 1.0);
        let mut theta = vec![0.0; n];
        theta[1] = 1.0;
        let mut lambda = vec![1.0; n];
        lambda[1] = 0.5;
        assert_abs_diff_eq!(
            reconstruct(&theta, &lambda, 0.0).unwrap(),
            0.5 * 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(reconstruct(&theta, &lambda[..3], 0.0).is_err());
    }

    #[test]
    fn round_trip_f32() {
        let g = DesignGrid::<f32>::new(11).unwrap();
        let y: Vec<f32> = (0..11).map(|i| (i as f32 * 0.3).sin()).collect();
        let table = g.basis_table();
        let theta = table.dft(&y).unwrap();
        let back = table.reconstruct(&theta, &[1.0; 11]).unwrap();
        for (a, b) in y.iter().zip(&back) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
