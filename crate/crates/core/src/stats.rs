// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo summaries.
//!
//! Replication results are collected in index order and reduced here, so the
//! outcome does not depend on how the replications were scheduled.

use serde::Serialize;

use crate::scalar::{compensated_sum, Scalar};

/// Sample mean together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub mean: T,
    pub std_err: T,
    pub count: usize,
}

impl<T: Scalar> McEstimate<T> {
    /// Two-pass mean and standard error (`sd / sqrt(count)`). Empty input gives zeros.
    pub fn from_samples(samples: &[T]) -> Self {
        let count = samples.len();
        if count == 0 {
            return McEstimate {
                mean: T::zero(),
                std_err: T::zero(),
                count,
            };
        }
        let nf = T::from_usize_lossy(count);
        let mean = compensated_sum(samples.iter().copied()) / nf;
        let std_err = if count > 1 {
            let ss = compensated_sum(samples.iter().map(|&x| (x - mean) * (x - mean)));
            (ss / (nf - T::one()) / nf).sqrt()
        } else {
            T::zero()
        };
        McEstimate { mean, std_err, count }
    }
}

/// Unbiased sample variance together with the standard error of that variance,
/// estimated from the fourth central moment.
pub fn variance_with_std_err<T: Scalar>(samples: &[T]) -> (T, T) {
    let count = samples.len();
    if count < 2 {
        return (T::zero(), T::zero());
    }
    let nf = T::from_usize_lossy(count);
    let mean = compensated_sum(samples.iter().copied()) / nf;
    let var = compensated_sum(samples.iter().map(|&x| (x - mean).powi(2))) / (nf - T::one());
    let m4 = compensated_sum(samples.iter().map(|&x| (x - mean).powi(4))) / nf;
    let se = ((m4 - var * var).max(T::zero()) / nf).sqrt();
    (var, se)
}
