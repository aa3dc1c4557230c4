//! Declarative sub-index definitions and their evaluation.
//!
//! A sub-index is a recipe: numerator indicator, optional denominator
//! (population or GRP), an optional year-over-year transform, a direction
//! (cost indicators are inverted by reciprocal so everything stays positive
//! for geometric aggregation), and normalization against the national
//! row-set. Registries are data: the built-ins below can be replaced by a
//! JSON file with the same shape.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{IndicatorDataset, Period};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    Population,
    Grp,
    None,
}

impl Denominator {
    pub fn indicator_id(self) -> Option<&'static str> {
        match self {
            Denominator::Population => Some("population"),
            Denominator::Grp => Some("grp"),
            Denominator::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Level,
    YoyGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Benefit,
    Cost,
}

/// Declarative recipe for one sub-index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubIndexDefinition {
    pub id: String,
    pub numerator: String,
    pub denominator: Denominator,
    pub transform: Transform,
    pub direction: Direction,
    pub normalize_national: bool,
}

impl SubIndexDefinition {
    fn new(
        id: &str,
        numerator: &str,
        denominator: Denominator,
        transform: Transform,
        direction: Direction,
    ) -> Self {
        SubIndexDefinition {
            id: id.to_string(),
            numerator: numerator.to_string(),
            denominator,
            transform,
            direction,
            normalize_national: true,
        }
    }

    /// Indicator ids this definition reads.
    pub fn indicator_ids(&self) -> Vec<&str> {
        let mut ids = vec![self.numerator.as_str()];
        if let Some(d) = self.denominator.indicator_id() {
            ids.push(d);
        }
        ids
    }

    /// Periods whose observations are needed to evaluate at `period`.
    pub fn periods_needed(&self, period: Period) -> Vec<Period> {
        match self.transform {
            Transform::Level => vec![period],
            Transform::YoyGrowth => vec![period, period.previous()],
        }
    }
}

/// A computed sub-index value with its pre-normalization ratios kept for
/// audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubIndexValue {
    pub definition_id: String,
    pub region_code: String,
    pub period: Period,
    pub value: f64,
    /// Transformed regional ratio before national normalization.
    pub raw_regional: f64,
    /// Same quantity for the national row-set; 1.0 when not normalizing.
    pub raw_national: f64,
}

/// Ratio of a regional value to the national value.
pub fn normalize_to_national(regional: f64, national: f64) -> Result<f64> {
    if !regional.is_finite() || !national.is_finite() {
        return Err(Error::Domain {
            context: "national normalization".to_string(),
        });
    }
    if national == 0.0 {
        return Err(Error::DivisionByZero {
            context: "national normalization".to_string(),
        });
    }
    Ok(regional / national)
}

/// Year-over-year growth as a plain ratio: 1.29 means 129%.
pub fn compute_yoy_growth(current: f64, previous: f64) -> Result<f64> {
    if !current.is_finite() || !previous.is_finite() {
        return Err(Error::Domain {
            context: "year-over-year growth".to_string(),
        });
    }
    if previous == 0.0 {
        return Err(Error::DivisionByZero {
            context: "year-over-year growth".to_string(),
        });
    }
    Ok(current / previous)
}

fn observation(
    dataset: &IndicatorDataset,
    region: &str,
    indicator: &str,
    period: Period,
) -> Result<f64> {
    dataset
        .get(region, indicator, period)
        .ok_or_else(|| Error::MissingObservation {
            region: region.to_string(),
            indicator: indicator.to_string(),
            period,
        })
}

fn transformed(
    dataset: &IndicatorDataset,
    region: &str,
    indicator: &str,
    transform: Transform,
    period: Period,
) -> Result<f64> {
    match transform {
        Transform::Level => observation(dataset, region, indicator, period),
        Transform::YoyGrowth => {
            let current = observation(dataset, region, indicator, period)?;
            let previous = observation(dataset, region, indicator, period.previous())?;
            compute_yoy_growth(current, previous).map_err(|e| match e {
                Error::DivisionByZero { .. } => Error::DivisionByZero {
                    context: format!("({region}, {indicator}, {}) is zero", period.previous()),
                },
                other => other,
            })
        }
    }
}

/// The transformed numerator/denominator ratio for one region, before
/// national normalization and direction handling.
fn raw_ratio(
    dataset: &IndicatorDataset,
    def: &SubIndexDefinition,
    region: &str,
    period: Period,
) -> Result<f64> {
    let numerator = transformed(dataset, region, &def.numerator, def.transform, period)?;
    match def.denominator.indicator_id() {
        None => Ok(numerator),
        Some(den_id) => {
            let denominator = transformed(dataset, region, den_id, def.transform, period)?;
            if denominator == 0.0 {
                return Err(Error::DivisionByZero {
                    context: format!("({region}, {den_id}, {period}) denominator"),
                });
            }
            Ok(numerator / denominator)
        }
    }
}

/// Evaluate one sub-index for one region and period.
pub fn compute_subindex(
    def: &SubIndexDefinition,
    dataset: &IndicatorDataset,
    region: &str,
    period: Period,
) -> Result<SubIndexValue> {
    let raw_regional = raw_ratio(dataset, def, region, period)?;
    let (raw_national, normalized) = if def.normalize_national {
        let national = raw_ratio(dataset, def, dataset.national_region_code(), period)?;
        (national, normalize_to_national(raw_regional, national)?)
    } else {
        (1.0, raw_regional)
    };
    if !normalized.is_finite() {
        return Err(Error::Domain {
            context: format!("sub-index '{}' for ({region}, {period})", def.id),
        });
    }
    if normalized <= 0.0 {
        return Err(Error::NonPositiveValue {
            id: def.id.clone(),
            value: normalized,
        });
    }
    let value = match def.direction {
        Direction::Benefit => normalized,
        Direction::Cost => 1.0 / normalized,
    };
    Ok(SubIndexValue {
        definition_id: def.id.clone(),
        region_code: region.to_string(),
        period,
        value,
        raw_regional,
        raw_national,
    })
}

/// The eight banking-provision sub-indices, in aggregation order.
///
/// Institutional provision is split per-population (I1) and per-GRP (I2);
/// loans to individuals are scaled by population rather than GRP, and
/// institutional security by GRP rather than population.
pub fn registry_banking() -> Vec<SubIndexDefinition> {
    use Denominator::*;
    use Direction::Benefit;
    use Transform::Level;
    vec![
        SubIndexDefinition::new(
            "I1_institutional_per_population",
            "credit_institutions_count",
            Population,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "I2_institutional_per_grp",
            "credit_institutions_count",
            Grp,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new("I3_assets_per_grp", "bank_assets", Grp, Level, Benefit),
        SubIndexDefinition::new("I4_capital_per_grp", "bank_capital", Grp, Level, Benefit),
        SubIndexDefinition::new(
            "I5_loans_individuals_per_population",
            "loans_individuals",
            Population,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "I6_loans_legal_per_grp",
            "loans_legal_entities",
            Grp,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "I7_deposits_per_population",
            "deposits_total",
            Population,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "I8_paid_services_per_population",
            "paid_services_volume",
            Population,
            Level,
            Benefit,
        ),
    ]
}

/// The six economic-health sub-indices. Unemployment and consumer-price
/// growth count against health, so they carry the cost direction; the price
/// component uses cpi only, ppi stays in the vocabulary for extensions.
pub fn registry_health() -> Vec<SubIndexDefinition> {
    use Denominator::*;
    use Direction::*;
    use Transform::*;
    vec![
        SubIndexDefinition::new(
            "H1_construction_volume",
            "construction_volume_index",
            None,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "H2_investment_dynamics",
            "fixed_capital_investment",
            None,
            YoyGrowth,
            Benefit,
        ),
        SubIndexDefinition::new(
            "H3_retail_per_population_dynamics",
            "retail_turnover",
            Population,
            YoyGrowth,
            Benefit,
        ),
        SubIndexDefinition::new(
            "H4_paid_services_volume",
            "paid_services_volume",
            None,
            Level,
            Benefit,
        ),
        SubIndexDefinition::new(
            "H5_unemployment_dynamics",
            "unemployment_rate",
            None,
            YoyGrowth,
            Cost,
        ),
        SubIndexDefinition::new("H6_cpi_dynamics", "cpi", None, YoyGrowth, Cost),
    ]
}

/// Indicator ids consumed by the built-in registries, numerators and
/// denominators both. Anything else in a dataset is "information garbage".
pub fn registered_indicator_ids() -> BTreeSet<String> {
    registry_banking()
        .iter()
        .chain(registry_health().iter())
        .flat_map(|def| def.indicator_ids())
        .map(|s| s.to_string())
        .collect()
}

fn check_registry(defs: &[SubIndexDefinition]) -> Result<()> {
    if defs.is_empty() {
        return Err(Error::Config("registry contains no definitions".to_string()));
    }
    let mut seen = BTreeSet::new();
    for def in defs {
        if !seen.insert(def.id.as_str()) {
            return Err(Error::Config(format!(
                "registry defines '{}' more than once",
                def.id
            )));
        }
    }
    Ok(())
}

/// Parse a registry from a JSON array of definition objects.
pub fn parse_registry<R: Read>(reader: R) -> Result<Vec<SubIndexDefinition>> {
    let defs: Vec<SubIndexDefinition> =
        serde_json::from_reader(reader).map_err(|e| Error::Config(format!("bad registry: {e}")))?;
    check_registry(&defs)?;
    Ok(defs)
}

pub fn load_registry(path: &Path) -> Result<Vec<SubIndexDefinition>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_registry(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Format, Loader};

    #[test]
    fn normalization_identity_and_ratios() {
        assert_eq!(normalize_to_national(3.7, 3.7).unwrap(), 1.0);
        assert_eq!(normalize_to_national(-2.0, -2.0).unwrap(), 1.0);
        // Moscow savings checkpoint: 1.41x the national per-capita figure.
        assert!((normalize_to_national(141.0, 100.0).unwrap() - 1.41).abs() < 1e-12);
        assert!((normalize_to_national(7.3, 2.5).unwrap() - 2.92).abs() < 1e-12);
        assert!(matches!(
            normalize_to_national(1.0, 0.0),
            Err(Error::DivisionByZero { .. })
        ));
        assert!(matches!(
            normalize_to_national(f64::INFINITY, 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn yoy_growth_ratios() {
        assert_eq!(compute_yoy_growth(5.5, 5.5).unwrap(), 1.0);
        // Yaroslavl unemployment dynamics: 129%.
        assert!((compute_yoy_growth(12.9, 10.0).unwrap() - 1.29).abs() < 1e-12);
        assert!((compute_yoy_growth(88.2, 84.0).unwrap() - 1.05).abs() < 1e-12);
        assert!(matches!(
            compute_yoy_growth(1.0, 0.0),
            Err(Error::DivisionByZero { .. })
        ));
    }

    #[test]
    fn banking_registry_contract() {
        let defs = registry_banking();
        assert_eq!(defs.len(), 8);
        let ids: BTreeSet<&str> = defs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids.len(), 8);
        // The two stated adjustments: individuals' loans per population,
        // institutional security per GRP.
        assert_eq!(defs[4].numerator, "loans_individuals");
        assert_eq!(defs[4].denominator, Denominator::Population);
        assert_eq!(defs[1].numerator, "credit_institutions_count");
        assert_eq!(defs[1].denominator, Denominator::Grp);
        for def in &defs {
            assert_eq!(def.direction, Direction::Benefit);
            assert_eq!(def.transform, Transform::Level);
            assert!(def.normalize_national);
        }
    }

    #[test]
    fn health_registry_contract() {
        let defs = registry_health();
        assert_eq!(defs.len(), 6);
        let ids: BTreeSet<&str> = defs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids.len(), 6);
        let unemployment = defs.iter().find(|d| d.numerator == "unemployment_rate").unwrap();
        assert_eq!(unemployment.direction, Direction::Cost);
        assert_eq!(unemployment.transform, Transform::YoyGrowth);
        let cpi = defs.iter().find(|d| d.numerator == "cpi").unwrap();
        assert_eq!(cpi.direction, Direction::Cost);
        let retail = defs.iter().find(|d| d.numerator == "retail_turnover").unwrap();
        assert_eq!(retail.denominator, Denominator::Population);
        assert_eq!(retail.transform, Transform::YoyGrowth);
        for def in &defs {
            assert!(def.normalize_national);
        }
        assert!(!defs.iter().any(|d| d.numerator == "ppi"));
    }

    fn tiny_dataset() -> IndicatorDataset {
        let text = "\
region_code,region_name,district_code,indicator_id,period,value,unit
A,Alpha,D,paid_services_volume,2019,515,rub
A,Alpha,D,paid_services_volume,2018,500,rub
A,Alpha,D,population,2019,100,persons
A,Alpha,D,population,2018,100,persons
RU,Russia,RU,paid_services_volume,2019,1000,rub
RU,Russia,RU,paid_services_volume,2018,950,rub
RU,Russia,RU,population,2019,1000,persons
RU,Russia,RU,population,2018,1000,persons
";
        Loader::new().load_reader(text.as_bytes(), Format::Csv).unwrap()
    }

    #[test]
    fn normalized_level_ratio_with_denominator() {
        // Per-capita paid services: (515/100) / (1000/1000) = 5.15, the
        // Crimea checkpoint ratio.
        let def = SubIndexDefinition::new(
            "I8_paid_services_per_population",
            "paid_services_volume",
            Denominator::Population,
            Transform::Level,
            Direction::Benefit,
        );
        let v = compute_subindex(&def, &tiny_dataset(), "A", Period::Year(2019)).unwrap();
        assert!((v.value - 5.15).abs() < 1e-12);
        assert!((v.raw_regional - 5.15).abs() < 1e-12);
        assert!((v.raw_national - 1.0).abs() < 1e-12);
    }

    #[test]
    fn national_region_is_the_anchor() {
        let def = &registry_banking()[7];
        let v = compute_subindex(def, &tiny_dataset(), "RU", Period::Year(2019)).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn cost_direction_inverts_by_reciprocal() {
        let mut def = SubIndexDefinition::new(
            "cost_psv",
            "paid_services_volume",
            Denominator::None,
            Transform::Level,
            Direction::Cost,
        );
        // Regional 515 vs national 1000: normalized 0.515, inverted.
        let v = compute_subindex(&def, &tiny_dataset(), "A", Period::Year(2019)).unwrap();
        assert!((v.value - 1.0 / 0.515).abs() < 1e-12);
        def.direction = Direction::Benefit;
        let b = compute_subindex(&def, &tiny_dataset(), "A", Period::Year(2019)).unwrap();
        assert!((v.value * b.value - 1.0).abs() < 1e-12 * b.value);
    }

    #[test]
    fn yoy_transform_applies_to_numerator_and_denominator() {
        let def = SubIndexDefinition::new(
            "psv_dynamics_per_capita",
            "paid_services_volume",
            Denominator::Population,
            Transform::YoyGrowth,
            Direction::Benefit,
        );
        let v = compute_subindex(&def, &tiny_dataset(), "A", Period::Year(2019)).unwrap();
        // Regional growth (515/500)/(100/100) = 1.03; national growth
        // (1000/950)/1 = 1.052631...; normalized = 1.03 * 950 / 1000.
        assert!((v.raw_regional - 1.03).abs() < 1e-12);
        assert!((v.value - 1.03 * 950.0 / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn audit_fields_reconstruct_the_direction_factor() {
        // value * raw_national / raw_regional is 1 for benefit sub-indices
        // and value^2 for cost sub-indices.
        let mut def = SubIndexDefinition::new(
            "audited",
            "paid_services_volume",
            Denominator::Population,
            Transform::Level,
            Direction::Benefit,
        );
        let ds = tiny_dataset();
        let v = compute_subindex(&def, &ds, "A", Period::Year(2019)).unwrap();
        assert!((v.value * v.raw_national / v.raw_regional - 1.0).abs() < 1e-12);

        def.direction = Direction::Cost;
        let v = compute_subindex(&def, &ds, "A", Period::Year(2019)).unwrap();
        assert!(
            (v.value * v.raw_national / v.raw_regional - v.value * v.value).abs()
                < 1e-12 * v.value * v.value
        );
    }

    #[test]
    fn missing_observation_names_the_triple() {
        let def = &registry_banking()[6]; // deposits: absent from tiny dataset
        match compute_subindex(def, &tiny_dataset(), "A", Period::Year(2019)).unwrap_err() {
            Error::MissingObservation {
                region,
                indicator,
                period,
            } => {
                assert_eq!(region, "A");
                assert_eq!(indicator, "deposits_total");
                assert_eq!(period, Period::Year(2019));
            }
            other => panic!("expected MissingObservation, got {other:?}"),
        }
    }

    #[test]
    fn registry_json_round_trip_and_duplicate_rejection() {
        let json = serde_json::to_string(&registry_banking()).unwrap();
        let parsed = parse_registry(json.as_bytes()).unwrap();
        assert_eq!(parsed, registry_banking());

        let mut doubled = registry_banking();
        doubled.push(doubled[0].clone());
        let json = serde_json::to_string(&doubled).unwrap();
        assert!(matches!(
            parse_registry(json.as_bytes()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn registry_json_uses_lowercase_enum_tokens() {
        let json = serde_json::to_string(&registry_health()).unwrap();
        assert!(json.contains("\"yoy_growth\""));
        assert!(json.contains("\"cost\""));
        assert!(json.contains("\"none\""));
        assert!(json.contains("\"population\""));
    }

    #[test]
    fn registered_ids_cover_both_registries() {
        let ids = registered_indicator_ids();
        assert!(ids.contains("population"));
        assert!(ids.contains("grp"));
        assert!(ids.contains("cpi"));
        assert!(!ids.contains("ppi"));
        assert_eq!(ids.len(), 14);
    }
}
