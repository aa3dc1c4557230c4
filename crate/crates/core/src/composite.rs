//! Geometric-mean composites, contribution decomposition, district
//! aggregation and the health-banking correlation.
//!
//! All geometric means run in log space: the direct 8-fold product under- or
//! overflows for extreme sub-index values, while exp(mean(ln v)) stays in
//! range and agrees with the k-th root of the product to machine precision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Period;
use crate::error::{Error, Result};
use crate::subindex::SubIndexValue;

/// Which composite family a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    BankingRbsp,
    EconomicHealth,
    Custom,
}

impl IndexKind {
    pub fn label(self) -> &'static str {
        match self {
            IndexKind::BankingRbsp => "banking_rbsp",
            IndexKind::EconomicHealth => "economic_health",
            IndexKind::Custom => "custom",
        }
    }
}

pub const BANKING_ARITY: usize = 8;
pub const HEALTH_ARITY: usize = 6;

/// An aggregated index value with its inputs and log-share contribution
/// breakdown attached for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeIndexValue {
    pub index_kind: IndexKind,
    pub region_code: String,
    pub period: Period,
    pub value: f64,
    pub subindices: Vec<SubIndexValue>,
    pub contributions: Vec<f64>,
}

/// A composite aggregated over the regions of one federal district.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictIndexValue {
    pub district_code: String,
    pub period: Period,
    pub value: f64,
    pub member_regions: Vec<String>,
    pub weight_kind: WeightKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Population,
    Grp,
    Unweighted,
}

/// Geometric mean of positive values, computed as exp of the mean log.
pub fn geometric_mean_log(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let sum: f64 = values.iter().map(|v| v.ln()).sum();
    (sum / values.len() as f64).exp()
}

fn log_shares(values: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let total: f64 = logs.iter().sum();
    if total == 0.0 {
        // Composite exactly 1: shares are uniform by convention.
        vec![1.0 / values.len() as f64; values.len()]
    } else {
        logs.iter().map(|l| l / total).collect()
    }
}

fn check_inputs(subindices: &[SubIndexValue], expected: usize) -> Result<()> {
    if subindices.len() != expected {
        return Err(Error::Arity {
            expected,
            got: subindices.len(),
        });
    }
    let first = &subindices[0];
    for s in subindices {
        if s.region_code != first.region_code || s.period != first.period {
            return Err(Error::MixedKey {
                detail: format!(
                    "sub-index '{}' is for ({}, {}), expected ({}, {})",
                    s.definition_id, s.region_code, s.period, first.region_code, first.period
                ),
            });
        }
        if !s.value.is_finite() {
            return Err(Error::Domain {
                context: format!("sub-index '{}'", s.definition_id),
            });
        }
        if s.value <= 0.0 {
            return Err(Error::NonPositiveValue {
                id: s.definition_id.clone(),
                value: s.value,
            });
        }
    }
    Ok(())
}

/// Aggregate sub-index values of one region/period into a composite of the
/// given kind. `compute_rbsp` and `compute_health` pin the arity; custom
/// registries may use any non-zero arity.
pub fn compute_composite(
    kind: IndexKind,
    expected_arity: usize,
    subindices: Vec<SubIndexValue>,
) -> Result<CompositeIndexValue> {
    if expected_arity == 0 {
        return Err(Error::Config("composite arity must be at least 1".to_string()));
    }
    check_inputs(&subindices, expected_arity)?;
    let values: Vec<f64> = subindices.iter().map(|s| s.value).collect();
    Ok(CompositeIndexValue {
        index_kind: kind,
        region_code: subindices[0].region_code.clone(),
        period: subindices[0].period,
        value: geometric_mean_log(&values),
        contributions: log_shares(&values),
        subindices,
    })
}

/// Banking-services provision composite: 8th root of the product of the
/// eight banking sub-indices.
pub fn compute_rbsp(subindices: Vec<SubIndexValue>) -> Result<CompositeIndexValue> {
    compute_composite(IndexKind::BankingRbsp, BANKING_ARITY, subindices)
}

/// Economic-health composite: 6th root of the product of the six health
/// sub-indices (cost components already inverted upstream).
pub fn compute_health(subindices: Vec<SubIndexValue>) -> Result<CompositeIndexValue> {
    compute_composite(IndexKind::EconomicHealth, HEALTH_ARITY, subindices)
}

/// Log-share contribution of each sub-index to the composite:
/// ln(v_i) / sum(ln(v_j)), or uniform 1/k when the log sum is zero.
pub fn decompose_contributions(composite: &CompositeIndexValue) -> Vec<f64> {
    let values: Vec<f64> = composite.subindices.iter().map(|s| s.value).collect();
    log_shares(&values)
}

/// Weighted geometric mean of member-region composite values.
pub fn aggregate_district(
    district_code: &str,
    period: Period,
    values: &[(String, f64)],
    weights: &BTreeMap<String, f64>,
    weight_kind: WeightKind,
) -> Result<DistrictIndexValue> {
    if values.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut members = Vec::with_capacity(values.len());
    for (region, value) in values {
        if !value.is_finite() {
            return Err(Error::Domain {
                context: format!("district member '{region}'"),
            });
        }
        if *value <= 0.0 {
            return Err(Error::NonPositiveValue {
                id: region.clone(),
                value: *value,
            });
        }
        let w = match weight_kind {
            WeightKind::Unweighted => 1.0,
            WeightKind::Population | WeightKind::Grp => *weights
                .get(region)
                .ok_or_else(|| Error::MissingWeight {
                    region: region.clone(),
                })?,
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::NonPositiveValue {
                id: format!("weight({region})"),
                value: w,
            });
        }
        num += w * value.ln();
        den += w;
        members.push(region.clone());
    }
    Ok(DistrictIndexValue {
        district_code: district_code.to_string(),
        period,
        value: (num / den).exp(),
        member_regions: members,
        weight_kind,
    })
}

/// Coefficient of determination (square of the Pearson correlation) over
/// (health, banking) pairs.
pub fn correlate_indices(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: pairs.len(),
        });
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Domain {
            context: "correlation input".to_string(),
        });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = pairs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in pairs {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 {
        return Err(Error::ZeroVariance {
            axis: "x".to_string(),
        });
    }
    if vy == 0.0 {
        return Err(Error::ZeroVariance {
            axis: "y".to_string(),
        });
    }
    let r2 = (cov * cov) / (vx * vy);
    Ok(r2.clamp(0.0, 1.0))
}
