//! End-to-end pipeline: load, validate, compute sub-indices and composites,
//! aggregate districts, summarize distributions, classify, correlate, and
//! emit JSON/Markdown reports.
//!
//! The pipeline is deterministic for identical inputs: all iteration runs
//! over sorted keys and JSON is emitted with alphabetically ordered keys.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{classify_quartiles, LeaderFlag, QuartileBand, Typology};
use crate::composite::{
    aggregate_district, compute_composite, compute_health, compute_rbsp, correlate_indices,
    CompositeIndexValue, IndexKind, WeightKind,
};
use crate::dataset::{
    validate_dataset, Format, IndicatorDataset, Loader, Period, ValidationIssue, ValidationReport,
};
use crate::error::{Error, Result};
use crate::stats::{summarize, DistributionSummary, QUARTILE_CONVENTION};
use crate::subindex::{
    compute_subindex, registry_banking, registry_health, SubIndexDefinition, SubIndexValue,
};

/// Registry versioning tag embedded in report metadata.
pub const REGISTRY_VERSION: &str = "v1";

/// Which sub-index registries a run evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum RegistrySelection {
    /// Both built-in families: full bundle with correlation.
    BothBuiltin,
    BankingBuiltin,
    HealthBuiltin,
    /// User-supplied definitions evaluated as a single custom family.
    Custom {
        label: String,
        definitions: Vec<SubIndexDefinition>,
    },
}

impl RegistrySelection {
    pub fn label(&self) -> String {
        match self {
            RegistrySelection::BothBuiltin => {
                format!("builtin:banking+builtin:health@{REGISTRY_VERSION}")
            }
            RegistrySelection::BankingBuiltin => format!("builtin:banking@{REGISTRY_VERSION}"),
            RegistrySelection::HealthBuiltin => format!("builtin:health@{REGISTRY_VERSION}"),
            RegistrySelection::Custom { label, .. } => format!("custom:{label}"),
        }
    }

    fn families(&self) -> Vec<Family> {
        match self {
            RegistrySelection::BothBuiltin => vec![
                Family {
                    kind: IndexKind::BankingRbsp,
                    definitions: registry_banking(),
                },
                Family {
                    kind: IndexKind::EconomicHealth,
                    definitions: registry_health(),
                },
            ],
            RegistrySelection::BankingBuiltin => vec![Family {
                kind: IndexKind::BankingRbsp,
                definitions: registry_banking(),
            }],
            RegistrySelection::HealthBuiltin => vec![Family {
                kind: IndexKind::EconomicHealth,
                definitions: registry_health(),
            }],
            RegistrySelection::Custom { definitions, .. } => vec![Family {
                kind: IndexKind::Custom,
                definitions: definitions.clone(),
            }],
        }
    }
}

struct Family {
    kind: IndexKind,
    definitions: Vec<SubIndexDefinition>,
}

/// Run configuration for the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset_path: PathBuf,
    pub registry: RegistrySelection,
    pub periods: Vec<Period>,
    pub weight_kind: WeightKind,
}

impl RunConfig {
    pub fn new(dataset_path: impl Into<PathBuf>, periods: Vec<Period>) -> Self {
        RunConfig {
            dataset_path: dataset_path.into(),
            registry: RegistrySelection::BothBuiltin,
            periods,
            weight_kind: WeightKind::Population,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipNote {
    pub index: String,
    pub period: Period,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub dataset: String,
    pub national_region: String,
    pub quartile_convention: String,
    pub registry: String,
    pub periods_requested: Vec<Period>,
    pub skipped: Vec<SkipNote>,
    pub warnings: Vec<String>,
}

/// One composite index evaluated for one region, with classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCell {
    pub value: f64,
    pub subindices: Vec<SubIndexValue>,
    pub contributions: Vec<f64>,
    pub quartile_band: QuartileBand,
    pub leader_flag: LeaderFlag,
    pub typology: Typology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region_code: String,
    pub region_name: String,
    pub district_code: String,
    pub banking: Option<IndexCell>,
    pub health: Option<IndexCell>,
    pub custom: Option<IndexCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictCell {
    pub value: f64,
    pub member_regions: Vec<String>,
    pub weight_kind: WeightKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictReport {
    pub district_code: String,
    pub banking: Option<DistrictCell>,
    pub health: Option<DistrictCell>,
    pub custom: Option<DistrictCell>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionSection {
    pub banking: Option<DistributionSummary>,
    pub health: Option<DistributionSummary>,
    pub custom: Option<DistributionSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub period: Period,
    pub per_region: Vec<RegionReport>,
    pub per_district: Vec<DistrictReport>,
    pub distribution: DistributionSection,
    /// Health vs banking R-squared; present only when both families were
    /// computed for the period.
    pub correlation_r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub metadata: ReportMetadata,
    pub periods: Vec<PeriodReport>,
}

/// Results of one (family, period) evaluation before bundle assembly.
struct FamilyPeriod {
    composites: BTreeMap<String, CompositeIndexValue>,
    classifications: BTreeMap<String, crate::classify::RegionClassification>,
    districts: Vec<crate::composite::DistrictIndexValue>,
    distribution: DistributionSummary,
}

fn coverage_missing(
    dataset: &IndicatorDataset,
    region: &str,
    defs: &[SubIndexDefinition],
    period: Period,
) -> Vec<(String, Period)> {
    let mut missing = Vec::new();
    for def in defs {
        for id in def.indicator_ids() {
            for p in def.periods_needed(period) {
                if !dataset.contains(region, id, p) {
                    missing.push((id.to_string(), p));
                }
            }
        }
    }
    missing.sort();
    missing.dedup();
    missing
}

fn evaluate_family_period(
    dataset: &IndicatorDataset,
    family: &Family,
    period: Period,
    weight_kind: WeightKind,
) -> Result<FamilyPeriod> {
    let mut composites = BTreeMap::new();
    for region in dataset.region_codes() {
        let subindices: Vec<SubIndexValue> = family
            .definitions
            .iter()
            .map(|def| compute_subindex(def, dataset, region, period))
            .collect::<Result<_>>()?;
        let composite = match family.kind {
            IndexKind::BankingRbsp => compute_rbsp(subindices)?,
            IndexKind::EconomicHealth => compute_health(subindices)?,
            IndexKind::Custom => {
                compute_composite(IndexKind::Custom, family.definitions.len(), subindices)?
            }
        };
        composites.insert(region.to_string(), composite);
    }

    let cross_section: BTreeMap<String, f64> = composites
        .iter()
        .map(|(r, c)| (r.clone(), c.value))
        .collect();
    let classifications = classify_quartiles(&cross_section, period)?;
    let distribution = summarize(&cross_section.values().copied().collect::<Vec<_>>())?;

    // District aggregation runs over real regions only; the national
    // row-set is the baseline, not a district member.
    let mut by_district: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (region, value) in &cross_section {
        if region == dataset.national_region_code() {
            continue;
        }
        let info = dataset.region_info(region).expect("region has info");
        by_district
            .entry(info.district_code.clone())
            .or_default()
            .push((region.clone(), *value));
    }
    let mut districts = Vec::new();
    for (district, members) in &by_district {
        let weights: BTreeMap<String, f64> = match weight_kind {
            WeightKind::Unweighted => BTreeMap::new(),
            WeightKind::Population | WeightKind::Grp => {
                let id = if weight_kind == WeightKind::Population {
                    "population"
                } else {
                    "grp"
                };
                let mut map = BTreeMap::new();
                for (region, _) in members {
                    let w = dataset.get(region, id, period).ok_or_else(|| {
                        Error::MissingWeight {
                            region: region.clone(),
                        }
                    })?;
                    map.insert(region.clone(), w);
                }
                map
            }
        };
        districts.push(aggregate_district(
            district, period, members, &weights, weight_kind,
        )?);
    }

    Ok(FamilyPeriod {
        composites,
        classifications,
        districts,
        distribution,
    })
}

/// Load the dataset and compute everything the configuration asks for.
///
/// A (family, period) cell with complete coverage is computed; a cell where
/// no region has complete inputs is skipped and recorded in the metadata;
/// partial coverage is a validation failure listing every missing triple.
/// The national row-set is exempt from the coverage check — its absence
/// surfaces as a computation error during normalization.
pub fn run_pipeline(config: &RunConfig) -> Result<ReportBundle> {
    if config.periods.is_empty() {
        return Err(Error::Config("at least one period is required".to_string()));
    }
    let mut periods: Vec<Period> = config.periods.clone();
    periods.sort();
    periods.dedup();

    let families = config.registry.families();
    let format = Format::from_path(&config.dataset_path);
    let dataset = Loader::new().load_path(&config.dataset_path, format)?;

    let used_ids: BTreeSet<String> = families
        .iter()
        .flat_map(|f| f.definitions.iter().flat_map(|d| d.indicator_ids()))
        .map(|s| s.to_string())
        .collect();
    let garbage = validate_dataset(&dataset, &[], &[], &used_ids);

    let non_national: Vec<&str> = dataset
        .region_codes()
        .filter(|r| *r != dataset.national_region_code())
        .collect();

    let mut skipped = Vec::new();
    let mut coverage_errors: Vec<ValidationIssue> = Vec::new();
    let mut plan: Vec<(usize, Period)> = Vec::new();
    for (family_idx, family) in families.iter().enumerate() {
        for &period in &periods {
            let mut missing_by_region = Vec::new();
            for region in &non_national {
                let missing = coverage_missing(&dataset, region, &family.definitions, period);
                if !missing.is_empty() {
                    missing_by_region.push((region.to_string(), missing));
                }
            }
            if missing_by_region.is_empty() {
                plan.push((family_idx, period));
            } else if missing_by_region.len() == non_national.len() {
                skipped.push(SkipNote {
                    index: family.kind.label().to_string(),
                    period,
                    reason: "no region has complete inputs".to_string(),
                });
            } else {
                for (region, missing) in missing_by_region {
                    for (indicator, p) in missing {
                        coverage_errors.push(ValidationIssue {
                            row: 0,
                            rule: "required-coverage".to_string(),
                            message: format!("missing observation ({region}, {indicator}, {p})"),
                        });
                    }
                }
            }
        }
    }
    if !coverage_errors.is_empty() {
        return Err(Error::ValidationFailed {
            report: ValidationReport {
                errors: coverage_errors,
                warnings: garbage.warnings,
                row_count: dataset.len(),
            },
        });
    }
    if plan.is_empty() {
        return Err(Error::ValidationFailed {
            report: ValidationReport {
                errors: skipped
                    .iter()
                    .map(|s| ValidationIssue {
                        row: 0,
                        rule: "no-coverage".to_string(),
                        message: format!(
                            "index '{}' has no computable regions at {}",
                            s.index, s.period
                        ),
                    })
                    .collect(),
                warnings: garbage.warnings,
                row_count: dataset.len(),
            },
        });
    }

    let mut results: BTreeMap<(IndexKind, Period), FamilyPeriod> = BTreeMap::new();
    for (family_idx, period) in plan {
        let family = &families[family_idx];
        let result = evaluate_family_period(&dataset, family, period, config.weight_kind)?;
        results.insert((family.kind, period), result);
    }

    let mut period_reports = Vec::new();
    for &period in &periods {
        let kinds: Vec<IndexKind> = families
            .iter()
            .map(|f| f.kind)
            .filter(|k| results.contains_key(&(*k, period)))
            .collect();
        if kinds.is_empty() {
            continue;
        }

        let mut per_region = Vec::new();
        for region in dataset.region_codes() {
            let info = dataset.region_info(region).expect("region has info");
            let mut report = RegionReport {
                region_code: region.to_string(),
                region_name: info.name.clone(),
                district_code: info.district_code.clone(),
                banking: None,
                health: None,
                custom: None,
            };
            for kind in &kinds {
                let fp = &results[&(*kind, period)];
                let composite = &fp.composites[region];
                let classification = &fp.classifications[region];
                let cell = IndexCell {
                    value: composite.value,
                    subindices: composite.subindices.clone(),
                    contributions: composite.contributions.clone(),
                    quartile_band: classification.quartile_band,
                    leader_flag: classification.leader_flag,
                    typology: classification.typology,
                };
                match kind {
                    IndexKind::BankingRbsp => report.banking = Some(cell),
                    IndexKind::EconomicHealth => report.health = Some(cell),
                    IndexKind::Custom => report.custom = Some(cell),
                }
            }
            per_region.push(report);
        }

        let mut district_codes: BTreeSet<String> = BTreeSet::new();
        for kind in &kinds {
            for d in &results[&(*kind, period)].districts {
                district_codes.insert(d.district_code.clone());
            }
        }
        let mut per_district = Vec::new();
        for code in &district_codes {
            let mut report = DistrictReport {
                district_code: code.clone(),
                banking: None,
                health: None,
                custom: None,
            };
            for kind in &kinds {
                if let Some(d) = results[&(*kind, period)]
                    .districts
                    .iter()
                    .find(|d| &d.district_code == code)
                {
                    let cell = DistrictCell {
                        value: d.value,
                        member_regions: d.member_regions.clone(),
                        weight_kind: d.weight_kind,
                    };
                    match kind {
                        IndexKind::BankingRbsp => report.banking = Some(cell),
                        IndexKind::EconomicHealth => report.health = Some(cell),
                        IndexKind::Custom => report.custom = Some(cell),
                    }
                }
            }
            per_district.push(report);
        }

        let mut distribution = DistributionSection::default();
        for kind in &kinds {
            let summary = results[&(*kind, period)].distribution.clone();
            match kind {
                IndexKind::BankingRbsp => distribution.banking = Some(summary),
                IndexKind::EconomicHealth => distribution.health = Some(summary),
                IndexKind::Custom => distribution.custom = Some(summary),
            }
        }

        let correlation_r2 = match (
            results.get(&(IndexKind::EconomicHealth, period)),
            results.get(&(IndexKind::BankingRbsp, period)),
        ) {
            (Some(health), Some(banking)) => {
                let pairs: Vec<(f64, f64)> = health
                    .composites
                    .iter()
                    .map(|(region, h)| (h.value, banking.composites[region].value))
                    .collect();
                Some(correlate_indices(&pairs)?)
            }
            _ => None,
        };

        period_reports.push(PeriodReport {
            period,
            per_region,
            per_district,
            distribution,
            correlation_r2,
        });
    }

    Ok(ReportBundle {
        metadata: ReportMetadata {
            dataset: config.dataset_path.display().to_string(),
            national_region: dataset.national_region_code().to_string(),
            quartile_convention: QUARTILE_CONVENTION.to_string(),
            registry: config.registry.label(),
            periods_requested: periods,
            skipped,
            warnings: garbage.warnings.iter().map(|w| w.message.clone()).collect(),
        },
        periods: period_reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

/// Serialize the bundle to JSON with alphabetically ordered keys.
pub fn bundle_to_json(bundle: &ReportBundle) -> Result<String> {
    // Round-tripping through Value sorts map keys (serde_json's default
    // map is a BTreeMap), which pins the byte layout.
    let value = serde_json::to_value(bundle)
        .map_err(|e| Error::Config(format!("bundle serialization failed: {e}")))?;
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Config(format!("bundle serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn bundle_from_json(text: &str) -> Result<ReportBundle> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        row: e.line(),
        message: format!("bad report bundle: {e}"),
    })
}

fn fmt_value(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_value(v),
        None => "undefined".to_string(),
    }
}

fn family_sections(report: &PeriodReport) -> Vec<(&'static str, &'static str)> {
    let mut sections = Vec::new();
    if report.distribution.banking.is_some() {
        sections.push(("banking_rbsp", "Banking services provision"));
    }
    if report.distribution.health.is_some() {
        sections.push(("economic_health", "Economic health"));
    }
    if report.distribution.custom.is_some() {
        sections.push(("custom", "Custom index"));
    }
    sections
}

fn cell_of<'a>(region: &'a RegionReport, key: &str) -> Option<&'a IndexCell> {
    match key {
        "banking_rbsp" => region.banking.as_ref(),
        "economic_health" => region.health.as_ref(),
        _ => region.custom.as_ref(),
    }
}

fn district_cell_of<'a>(district: &'a DistrictReport, key: &str) -> Option<&'a DistrictCell> {
    match key {
        "banking_rbsp" => district.banking.as_ref(),
        "economic_health" => district.health.as_ref(),
        _ => district.custom.as_ref(),
    }
}

fn distribution_of<'a>(report: &'a PeriodReport, key: &str) -> Option<&'a DistributionSummary> {
    match key {
        "banking_rbsp" => report.distribution.banking.as_ref(),
        "economic_health" => report.distribution.health.as_ref(),
        _ => report.distribution.custom.as_ref(),
    }
}

/// Render the bundle as a Markdown report with leader/outsider tables.
pub fn render_markdown(bundle: &ReportBundle) -> String {
    let mut md = String::new();
    let m = &bundle.metadata;
    let _ = writeln!(md, "# Regional index report\n");
    let _ = writeln!(md, "- dataset: `{}`", m.dataset);
    let _ = writeln!(md, "- registry: `{}`", m.registry);
    let _ = writeln!(md, "- quartile convention: `{}`", m.quartile_convention);
    let _ = writeln!(md, "- national region: `{}`", m.national_region);
    let _ = writeln!(
        md,
        "- periods requested: {}",
        m.periods_requested
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    for s in &m.skipped {
        let _ = writeln!(md, "- skipped: {} at {} ({})", s.index, s.period, s.reason);
    }
    for w in &m.warnings {
        let _ = writeln!(md, "- warning: {w}");
    }

    for report in &bundle.periods {
        let _ = writeln!(md, "\n## Period {}\n", report.period);
        for (key, title) in family_sections(report) {
            let _ = writeln!(md, "### {title} ({key})\n");
            if let Some(d) = distribution_of(report, key) {
                let _ = writeln!(
                    md,
                    "n={} mean={} std_dev={} cv={} skewness={} kurtosis={} q1={} median={} q3={}\n",
                    d.n,
                    fmt_value(d.mean),
                    fmt_value(d.std_dev),
                    fmt_opt(d.cv),
                    fmt_opt(d.skewness),
                    fmt_opt(d.kurtosis),
                    fmt_value(d.q1),
                    fmt_value(d.median),
                    fmt_value(d.q3)
                );
            }

            let mut leaders: Vec<&RegionReport> = Vec::new();
            let mut outsiders: Vec<&RegionReport> = Vec::new();
            for region in &report.per_region {
                if let Some(cell) = cell_of(region, key) {
                    match cell.leader_flag {
                        LeaderFlag::Leader => leaders.push(region),
                        LeaderFlag::Outsider => outsiders.push(region),
                        LeaderFlag::Neither => {}
                    }
                }
            }
            let value_of = |r: &RegionReport| cell_of(r, key).map(|c| c.value).unwrap_or(f64::NAN);
            leaders.sort_by(|a, b| {
                value_of(b)
                    .partial_cmp(&value_of(a))
                    .unwrap()
                    .then_with(|| a.region_code.cmp(&b.region_code))
            });
            outsiders.sort_by(|a, b| {
                value_of(a)
                    .partial_cmp(&value_of(b))
                    .unwrap()
                    .then_with(|| a.region_code.cmp(&b.region_code))
            });

            let _ = writeln!(md, "#### Leaders (value > Q3)\n");
            let _ = writeln!(md, "| region | name | value |");
            let _ = writeln!(md, "|--------|------|-------|");
            for r in leaders {
                let _ = writeln!(
                    md,
                    "| {} | {} | {} |",
                    r.region_code,
                    r.region_name,
                    fmt_value(value_of(r))
                );
            }
            let _ = writeln!(md, "\n#### Outsiders (value <= Q1)\n");
            let _ = writeln!(md, "| region | name | value |");
            let _ = writeln!(md, "|--------|------|-------|");
            for r in outsiders {
                let _ = writeln!(
                    md,
                    "| {} | {} | {} |",
                    r.region_code,
                    r.region_name,
                    fmt_value(value_of(r))
                );
            }

            if !report.per_district.is_empty() {
                let _ = writeln!(md, "\n#### Federal districts\n");
                let _ = writeln!(md, "| district | value | members |");
                let _ = writeln!(md, "|----------|-------|---------|");
                for d in &report.per_district {
                    if let Some(cell) = district_cell_of(d, key) {
                        let _ = writeln!(
                            md,
                            "| {} | {} | {} |",
                            d.district_code,
                            fmt_value(cell.value),
                            cell.member_regions.len()
                        );
                    }
                }
            }
            md.push('\n');
        }
        if let Some(r2) = report.correlation_r2 {
            let _ = writeln!(md, "Health vs banking R^2: {}\n", fmt_value(r2));
        }
    }
    md
}

/// Write the bundle in the requested format.
pub fn emit_report(bundle: &ReportBundle, format: ReportFormat, out: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => bundle_to_json(bundle)?,
        ReportFormat::Markdown => render_markdown(bundle),
    };
    std::fs::write(out, text).map_err(|e| Error::io(out.display().to_string(), e))
}

/// A plottable quantity: a composite family or one sub-index by id.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotQuantity {
    Banking,
    Health,
    SubIndex(SubIndexDefinition),
}

/// Resolve a CLI token like `rbsp`, `health` or a sub-index id against the
/// built-in registries.
pub fn resolve_quantity(token: &str) -> Result<PlotQuantity> {
    match token {
        "rbsp" | "banking" | "banking_rbsp" => Ok(PlotQuantity::Banking),
        "health" | "economic_health" => Ok(PlotQuantity::Health),
        _ => registry_banking()
            .into_iter()
            .chain(registry_health())
            .find(|def| def.id == token)
            .map(PlotQuantity::SubIndex)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown index or sub-index id '{token}'; expected rbsp, health, or a registry id"
                ))
            }),
    }
}

/// Evaluate a plottable quantity for every region at one period.
pub fn quantity_values(
    dataset: &IndicatorDataset,
    quantity: &PlotQuantity,
    period: Period,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    match quantity {
        PlotQuantity::Banking | PlotQuantity::Health => {
            let defs = if matches!(quantity, PlotQuantity::Banking) {
                registry_banking()
            } else {
                registry_health()
            };
            for region in dataset.region_codes() {
                let subs: Vec<SubIndexValue> = defs
                    .iter()
                    .map(|def| compute_subindex(def, dataset, region, period))
                    .collect::<Result<_>>()?;
                let composite = if matches!(quantity, PlotQuantity::Banking) {
                    compute_rbsp(subs)?
                } else {
                    compute_health(subs)?
                };
                out.insert(region.to_string(), composite.value);
            }
        }
        PlotQuantity::SubIndex(def) => {
            for region in dataset.region_codes() {
                let v = compute_subindex(def, dataset, region, period)?;
                out.insert(region.to_string(), v.value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_labels() {
        assert_eq!(
            RegistrySelection::BothBuiltin.label(),
            "builtin:banking+builtin:health@v1"
        );
        assert_eq!(
            RegistrySelection::Custom {
                label: "mine.json".to_string(),
                definitions: registry_banking(),
            }
            .label(),
            "custom:mine.json"
        );
    }

    #[test]
    fn resolve_quantity_tokens() {
        assert_eq!(resolve_quantity("rbsp").unwrap(), PlotQuantity::Banking);
        assert_eq!(resolve_quantity("health").unwrap(), PlotQuantity::Health);
        match resolve_quantity("I8_paid_services_per_population").unwrap() {
            PlotQuantity::SubIndex(def) => assert_eq!(def.numerator, "paid_services_volume"),
            other => panic!("expected SubIndex, got {other:?}"),
        }
        assert!(resolve_quantity("nope").is_err());
    }

    #[test]
    fn empty_periods_fail_before_io() {
        let config = RunConfig::new("/definitely/not/there.csv", vec![]);
        assert!(matches!(run_pipeline(&config), Err(Error::Config(_))));
    }
}
