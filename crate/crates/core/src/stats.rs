//! Cross-sectional diagnostics over a set of index values.
//!
//! Conventions are pinned so golden values stay exact across runs:
//! skewness is the biased moment estimator g1 = m3 / m2^(3/2), kurtosis is
//! the non-excess beta2 = m4 / m2^2 (a normal sample centers near 3), the
//! standard deviation uses the n-1 divisor, and quantiles use type-7 linear
//! interpolation between order statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag emitted into report metadata so consumers can detect methodology
/// drift between runs.
pub const QUARTILE_CONVENTION: &str = "type7-linear-interpolation";

/// Moment and quantile summary of one cross-section.
///
/// `skewness`, `kurtosis` and `cv` are `None` when undefined: the moment
/// statistics degenerate when every value is identical (m2 = 0) and the
/// coefficient of variation additionally needs a nonzero mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n-1 divisor).
    pub std_dev: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub cv: Option<f64>,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Type-7 quantile: linear interpolation at position p*(n-1) over the
/// sorted slice. Callers pass `sorted` already ascending.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        sorted[lo.min(sorted.len() - 1)]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            context: "distribution statistics input".to_string(),
        });
    }
    Ok(())
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values are totally ordered"));
    sorted
}

/// Summarize a cross-section of at least two finite values.
pub fn summarize(values: &[f64]) -> Result<DistributionSummary> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    check_finite(values)?;

    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let std_dev = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();

    let (skewness, kurtosis, cv) = if m2 == 0.0 {
        (None, None, None)
    } else {
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2);
        let cv = if mean == 0.0 {
            None
        } else {
            Some(std_dev / mean.abs())
        };
        (Some(skew), Some(kurt), cv)
    };

    let sorted = sorted_copy(values);
    Ok(DistributionSummary {
        n,
        mean,
        std_dev,
        skewness,
        kurtosis,
        cv,
        q1: quantile_type7(&sorted, 0.25),
        median: quantile_type7(&sorted, 0.5),
        q3: quantile_type7(&sorted, 0.75),
    })
}

/// (Q1, Q3) of a cross-section of at least four finite values, under the
/// same type-7 convention as `summarize`.
pub fn quartile_bounds(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: values.len(),
        });
    }
    check_finite(values)?;
    let sorted = sorted_copy(values);
    Ok((
        quantile_type7(&sorted, 0.25),
        quantile_type7(&sorted, 0.75),
    ))
}
