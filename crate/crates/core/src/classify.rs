//! Quartile bands, leader/outsider groups and the four-type region
//! typology.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Period;
use crate::error::{Error, Result};
use crate::stats::quantile_type7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartileBand {
    Lower,
    MidLower,
    MidUpper,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderFlag {
    Leader,
    Outsider,
    Neither,
}

/// Behavioral region types. Only types I and II have classification rules;
/// III and IV are reserved and never assigned automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Typology {
    TypeI,
    TypeII,
    TypeIII,
    TypeIV,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionClassification {
    pub region_code: String,
    pub period: Period,
    pub quartile_band: QuartileBand,
    pub leader_flag: LeaderFlag,
    pub typology: Typology,
}

/// Assign every region to a quartile band of the cross-section.
///
/// Band edges use <= on the left thresholds, so the degenerate all-equal
/// cross-section deterministically lands everything in the lower band.
/// Leaders are exactly the upper band, outsiders exactly the lower.
pub fn classify_quartiles(
    values: &BTreeMap<String, f64>,
    period: Period,
) -> Result<BTreeMap<String, RegionClassification>> {
    if values.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: values.len(),
        });
    }
    if values.values().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            context: "quartile classification input".to_string(),
        });
    }
    let mut sorted: Vec<f64> = values.values().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let q1 = quantile_type7(&sorted, 0.25);
    let median = quantile_type7(&sorted, 0.5);
    let q3 = quantile_type7(&sorted, 0.75);

    Ok(values
        .iter()
        .map(|(region, &v)| {
            let band = if v <= q1 {
                QuartileBand::Lower
            } else if v <= median {
                QuartileBand::MidLower
            } else if v <= q3 {
                QuartileBand::MidUpper
            } else {
                QuartileBand::Upper
            };
            let flag = match band {
                QuartileBand::Upper => LeaderFlag::Leader,
                QuartileBand::Lower => LeaderFlag::Outsider,
                _ => LeaderFlag::Neither,
            };
            (
                region.clone(),
                RegionClassification {
                    region_code: region.clone(),
                    period,
                    quartile_band: band,
                    leader_flag: flag,
                    typology: Typology::Unassigned,
                },
            )
        })
        .collect())
}

/// Feature record for the typology rules. The mapping from source series to
/// these features is configuration, not built in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypologyProfile {
    pub income_level: f64,
    pub savings_propensity: f64,
    pub income_differentiation: f64,
    pub export_orientation: bool,
    pub infrastructure_score: f64,
}

/// Cutoffs for the typology rules. Always supplied explicitly; the source
/// text gives qualitative descriptions with no numbers, so defaults would
/// masquerade as published method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypologyThresholds {
    pub t_income: f64,
    pub t_save: f64,
    pub t_diff: f64,
    pub t_infra: f64,
}

/// Rule-based typology, evaluated in order I, II, else unassigned.
///
/// Type I: high income and high savings propensity ("profit centers").
/// Type II: high income differentiation, export orientation, weak
/// infrastructure. Types III/IV have no stated rules and are never
/// returned.
pub fn classify_typology(profile: &TypologyProfile, thresholds: &TypologyThresholds) -> Typology {
    if profile.income_level >= thresholds.t_income
        && profile.savings_propensity >= thresholds.t_save
    {
        return Typology::TypeI;
    }
    if profile.income_differentiation >= thresholds.t_diff
        && profile.export_orientation
        && profile.infrastructure_score < thresholds.t_infra
    {
        return Typology::TypeII;
    }
    Typology::Unassigned
}

/// Typology configuration file: the four threshold keys at the top level,
/// plus an optional `features` map of region code to profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TypologyConfig {
    pub thresholds: TypologyThresholds,
    pub features: BTreeMap<String, TypologyProfile>,
}

pub fn parse_typology_config(text: &str) -> Result<TypologyConfig> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("bad typology config: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Config("typology config must be a JSON object".to_string()))?;

    let threshold = |key: &str| -> Result<f64> {
        obj.get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::Config(format!("typology config missing numeric '{key}'")))
    };
    let thresholds = TypologyThresholds {
        t_income: threshold("t_income")?,
        t_save: threshold("t_save")?,
        t_diff: threshold("t_diff")?,
        t_infra: threshold("t_infra")?,
    };

    let mut features = BTreeMap::new();
    if let Some(raw) = obj.get("features") {
        let map = raw
            .as_object()
            .ok_or_else(|| Error::Config("'features' must be an object".to_string()))?;
        for (region, entry) in map {
            features.insert(region.clone(), parse_profile(region, entry)?);
        }
    }
    Ok(TypologyConfig {
        thresholds,
        features,
    })
}

fn parse_profile(region: &str, value: &serde_json::Value) -> Result<TypologyProfile> {
    let obj = value.as_object().ok_or_else(|| Error::MissingFeature {
        region: region.to_string(),
        field: "profile object".to_string(),
    })?;
    let field = |name: &str| -> Result<f64> {
        obj.get(name)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::MissingFeature {
                region: region.to_string(),
                field: name.to_string(),
            })
    };
    let income_level = field("income_level")?;
    let savings_propensity = field("savings_propensity")?;
    let income_differentiation = field("income_differentiation")?;
    let export_orientation = obj
        .get("export_orientation")
        .and_then(|v| v.as_bool())
        .ok_or_else(|| Error::MissingFeature {
            region: region.to_string(),
            field: "export_orientation".to_string(),
        })?;
    Ok(TypologyProfile {
        income_level,
        savings_propensity,
        income_differentiation,
        export_orientation,
        infrastructure_score: field("infrastructure_score")?,
    })
}

pub fn load_typology_config(path: &Path) -> Result<TypologyConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_typology_config(&text)
}
