//! Loading, validation and keyed storage of regional indicator observations.
//!
//! Observations arrive as CSV or JSON rows keyed by (region, indicator,
//! period). The loader rejects duplicates, unknown indicator ids and
//! non-finite values, so downstream computation never has to re-check them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Reserved region code for the all-Russia aggregate row-set. National
/// values are published figures, never recomputed from regional rows.
pub const NATIONAL_REGION_CODE: &str = "RU";

/// Indicator ids accepted by the default loader.
pub const BUILTIN_VOCABULARY: [&str; 15] = [
    "construction_volume_index",
    "fixed_capital_investment",
    "retail_turnover",
    "paid_services_volume",
    "unemployment_rate",
    "cpi",
    "ppi",
    "credit_institutions_count",
    "bank_assets",
    "bank_capital",
    "loans_individuals",
    "loans_legal_entities",
    "deposits_total",
    "population",
    "grp",
];

const CSV_HEADER: [&str; 7] = [
    "region_code",
    "region_name",
    "district_code",
    "indicator_id",
    "period",
    "value",
    "unit",
];

const MIN_YEAR: u16 = 1990;
const MAX_YEAR: u16 = 2100;

/// Observation period: a calendar year, or a year-month for monthly series
/// such as price indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Period {
    Year(u16),
    Month(u16, u8),
}

impl Period {
    /// The immediately preceding period, used by year-over-year transforms.
    pub fn previous(self) -> Period {
        match self {
            Period::Year(y) => Period::Year(y - 1),
            Period::Month(y, 1) => Period::Month(y - 1, 12),
            Period::Month(y, m) => Period::Month(y, m - 1),
        }
    }

    pub fn year(self) -> u16 {
        match self {
            Period::Year(y) | Period::Month(y, _) => y,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Year(y) => write!(f, "{y}"),
            Period::Month(y, m) => write!(f, "{y}-{m:02}"),
        }
    }
}

impl FromStr for Period {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parsed = if let Some((y, m)) = s.split_once('-') {
            let year: u16 = y.parse().map_err(|_| format!("invalid period '{s}'"))?;
            let month: u8 = m.parse().map_err(|_| format!("invalid period '{s}'"))?;
            if m.len() != 2 || !(1..=12).contains(&month) {
                return Err(format!("invalid month in period '{s}'"));
            }
            Period::Month(year, month)
        } else {
            let year: u16 = s.parse().map_err(|_| format!("invalid period '{s}'"))?;
            Period::Year(year)
        };
        if !(MIN_YEAR..=MAX_YEAR).contains(&parsed.year()) {
            return Err(format!(
                "period '{s}' outside supported range {MIN_YEAR}-{MAX_YEAR}"
            ));
        }
        Ok(parsed)
    }
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// One raw (region, indicator, period) value with its unit tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorObservation {
    pub region_code: String,
    pub region_name: String,
    pub district_code: String,
    pub indicator_id: String,
    pub period: Period,
    pub value: f64,
    pub unit: String,
}

/// Region metadata derived from observation rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionInfo {
    pub name: String,
    pub district_code: String,
}

type ObservationKey = (String, String, Period);

/// Immutable keyed store of observations. Equal datasets compare equal
/// regardless of the row order they were loaded from.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorDataset {
    observations: BTreeMap<ObservationKey, IndicatorObservation>,
    regions: BTreeMap<String, RegionInfo>,
    national_region_code: String,
}

impl IndicatorDataset {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn national_region_code(&self) -> &str {
        &self.national_region_code
    }

    pub fn has_national(&self) -> bool {
        self.regions.contains_key(&self.national_region_code)
    }

    /// Region codes in sorted order, national row included if present.
    pub fn region_codes(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(|s| s.as_str())
    }

    pub fn region_info(&self, code: &str) -> Option<&RegionInfo> {
        self.regions.get(code)
    }

    pub fn get(&self, region: &str, indicator: &str, period: Period) -> Option<f64> {
        self.observations
            .get(&(region.to_string(), indicator.to_string(), period))
            .map(|o| o.value)
    }

    pub fn contains(&self, region: &str, indicator: &str, period: Period) -> bool {
        self.observations
            .contains_key(&(region.to_string(), indicator.to_string(), period))
    }

    pub fn observations(&self) -> impl Iterator<Item = &IndicatorObservation> {
        self.observations.values()
    }

    /// Distinct indicator ids present, sorted.
    pub fn indicator_ids(&self) -> BTreeSet<&str> {
        self.observations
            .values()
            .map(|o| o.indicator_id.as_str())
            .collect()
    }

    /// Distinct periods present, sorted.
    pub fn periods(&self) -> BTreeSet<Period> {
        self.observations.values().map(|o| o.period).collect()
    }
}

/// Interchange format of the source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess the format from a file extension; CSV is the canonical default.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Dataset loader with a configurable indicator vocabulary.
#[derive(Debug, Clone)]
pub struct Loader {
    vocabulary: BTreeSet<String>,
}

impl Default for Loader {
    fn default() -> Self {
        Loader {
            vocabulary: BUILTIN_VOCABULARY.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    /// Extend the accepted vocabulary beyond the built-in minimum set.
    pub fn with_extra_indicators<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.vocabulary.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn load_path(&self, path: &Path, format: Format) -> Result<IndicatorDataset> {
        let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.load_reader(BufReader::new(file), format)
    }

    pub fn load_reader<R: Read>(&self, reader: R, format: Format) -> Result<IndicatorDataset> {
        let rows = match format {
            Format::Csv => read_csv(reader)?,
            Format::Json => read_json(reader)?,
        };
        self.assemble(rows)
    }

    fn assemble(&self, rows: Vec<(usize, RawRecord)>) -> Result<IndicatorDataset> {
        let mut observations: BTreeMap<ObservationKey, IndicatorObservation> = BTreeMap::new();
        let mut first_row: BTreeMap<ObservationKey, usize> = BTreeMap::new();
        let mut regions: BTreeMap<String, (usize, RegionInfo)> = BTreeMap::new();

        for (row, raw) in rows {
            let obs = self.check_record(row, raw)?;
            let key = (
                obs.region_code.clone(),
                obs.indicator_id.clone(),
                obs.period,
            );
            if let Some(&seen) = first_row.get(&key) {
                return Err(Error::DuplicateKey {
                    region: obs.region_code,
                    indicator: obs.indicator_id,
                    period: obs.period,
                    first_row: seen.min(row),
                    second_row: seen.max(row),
                });
            }
            let info = RegionInfo {
                name: obs.region_name.clone(),
                district_code: obs.district_code.clone(),
            };
            match regions.get(&obs.region_code) {
                None => {
                    regions.insert(obs.region_code.clone(), (row, info));
                }
                Some((seen, existing)) if *existing != info => {
                    return Err(Error::Parse {
                        row: row.max(*seen),
                        message: format!(
                            "conflicting region_name/district_code for region '{}' (first seen row {})",
                            obs.region_code,
                            row.min(*seen)
                        ),
                    });
                }
                Some(_) => {}
            }
            first_row.insert(key.clone(), row);
            observations.insert(key, obs);
        }

        Ok(IndicatorDataset {
            observations,
            regions: regions.into_iter().map(|(k, (_, v))| (k, v)).collect(),
            national_region_code: NATIONAL_REGION_CODE.to_string(),
        })
    }

    fn check_record(&self, row: usize, raw: RawRecord) -> Result<IndicatorObservation> {
        for (field, value) in [
            ("region_code", &raw.region_code),
            ("indicator_id", &raw.indicator_id),
        ] {
            if value.trim().is_empty() {
                return Err(Error::Parse {
                    row,
                    message: format!("empty {field}"),
                });
            }
        }
        if !self.vocabulary.contains(&raw.indicator_id) {
            return Err(Error::UnknownIndicator {
                row,
                indicator: raw.indicator_id,
            });
        }
        let period: Period = raw
            .period
            .parse()
            .map_err(|e| Error::Parse { row, message: e })?;
        let value = parse_value(row, &raw.value)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteValue {
                row,
                region: raw.region_code,
                indicator: raw.indicator_id,
                period,
            });
        }
        Ok(IndicatorObservation {
            region_code: raw.region_code,
            region_name: raw.region_name,
            district_code: raw.district_code,
            indicator_id: raw.indicator_id,
            period,
            value,
            unit: raw.unit,
        })
    }
}

/// Load a dataset with the built-in vocabulary.
pub fn load_dataset(path: &Path, format: Format) -> Result<IndicatorDataset> {
    Loader::new().load_path(path, format)
}

struct RawRecord {
    region_code: String,
    region_name: String,
    district_code: String,
    indicator_id: String,
    period: String,
    value: String,
    unit: String,
}

fn parse_value(row: usize, text: &str) -> Result<f64> {
    let trimmed = text.trim();
    match trimmed.parse::<f64>() {
        Ok(v) => Ok(v),
        Err(_) if trimmed.contains(',') => Err(Error::Parse {
            row,
            message: format!(
                "value '{trimmed}' uses a comma decimal separator; use '.' instead"
            ),
        }),
        Err(_) => Err(Error::Parse {
            row,
            message: format!("value '{trimmed}' is not a decimal number"),
        }),
    }
}

fn read_csv<R: Read>(reader: R) -> Result<Vec<(usize, RawRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: format!("unreadable header: {e}"),
        })?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != CSV_HEADER {
        return Err(Error::Parse {
            row: 1,
            message: format!(
                "header must be exactly '{}', got '{}'",
                CSV_HEADER.join(","),
                got.join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        // Header occupies line 1; data rows are reported 2-based.
        let row = idx + 2;
        let record = record.map_err(|e| Error::Parse {
            row: e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(row),
            message: format!("malformed row: {e}"),
        })?;
        if record.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} columns, got {}", CSV_HEADER.len(), record.len()),
            });
        }
        rows.push((
            row,
            RawRecord {
                region_code: record[0].to_string(),
                region_name: record[1].to_string(),
                district_code: record[2].to_string(),
                indicator_id: record[3].to_string(),
                period: record[4].to_string(),
                value: record[5].to_string(),
                unit: record[6].to_string(),
            },
        ));
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    region_code: String,
    region_name: String,
    district_code: String,
    indicator_id: String,
    period: String,
    value: f64,
    unit: String,
}

fn read_json<R: Read>(reader: R) -> Result<Vec<(usize, RawRecord)>> {
    let records: Vec<JsonRecord> = serde_json::from_reader(reader).map_err(|e| Error::Parse {
        row: e.line(),
        message: format!("malformed JSON: {e}"),
    })?;
    Ok(records
        .into_iter()
        .enumerate()
        .map(|(idx, r)| {
            (
                idx + 1,
                RawRecord {
                    region_code: r.region_code,
                    region_name: r.region_name,
                    district_code: r.district_code,
                    indicator_id: r.indicator_id,
                    period: r.period,
                    // Uses the same textual path as CSV so finite/decimal
                    // rules apply identically.
                    value: format!("{}", r.value),
                    unit: r.unit,
                },
            )
        })
        .collect())
}

/// One validation finding. `row` is 0 for dataset-level rules that have no
/// originating file row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub row: usize,
    pub rule: String,
    pub message: String,
}

/// Outcome of `validate_dataset`; the dataset is accepted iff `errors` is
/// empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
    pub row_count: usize,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Check coverage of required (region, indicator, period) triples and flag
/// indicators no registered sub-index consumes.
///
/// Every region present in the dataset must carry every required indicator
/// for every listed period; missing triples are errors. Indicators present
/// in the dataset but absent from `registered` are warnings — data collected
/// that nothing uses.
pub fn validate_dataset(
    dataset: &IndicatorDataset,
    required: &[String],
    periods: &[Period],
    registered: &BTreeSet<String>,
) -> ValidationReport {
    let mut report = ValidationReport {
        row_count: dataset.len(),
        ..Default::default()
    };

    for region in dataset.region_codes() {
        for indicator in required {
            for &period in periods {
                if !dataset.contains(region, indicator, period) {
                    report.errors.push(ValidationIssue {
                        row: 0,
                        rule: "required-coverage".to_string(),
                        message: format!("missing observation ({region}, {indicator}, {period})"),
                    });
                }
            }
        }
    }

    for indicator in dataset.indicator_ids() {
        if !registered.contains(indicator) {
            report.warnings.push(ValidationIssue {
                row: 0,
                rule: "unused-indicator".to_string(),
                message: format!(
                    "indicator '{indicator}' is present but required by no registered sub-index"
                ),
            });
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "region_code,region_name,district_code,indicator_id,period,value,unit\n";

    fn csv_of(rows: &[&str]) -> String {
        let mut s = String::from(HEADER);
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    fn load(text: &str) -> Result<IndicatorDataset> {
        Loader::new().load_reader(text.as_bytes(), Format::Csv)
    }

    #[test]
    fn well_formed_three_rows() {
        let text = csv_of(&[
            "RU-MOW,Moscow,CFD,deposits_total,2019,100.5,rub",
            "RU-SPE,Saint Petersburg,NWFD,deposits_total,2019,55.25,rub",
            "RU,Russian Federation,RU,deposits_total,2019,1000,rub",
        ]);
        let ds = load(&text).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.get("RU-MOW", "deposits_total", Period::Year(2019)), Some(100.5));
        assert!(ds.has_national());
    }

    #[test]
    fn duplicate_key_cites_both_rows() {
        let text = csv_of(&[
            "RU-MOW,Moscow,CFD,deposits_total,2019,100,rub",
            "RU-SPE,Saint Petersburg,NWFD,deposits_total,2019,55,rub",
            "RU-MOW,Moscow,CFD,deposits_total,2019,101,rub",
        ]);
        match load(&text).unwrap_err() {
            Error::DuplicateKey {
                region,
                first_row,
                second_row,
                ..
            } => {
                assert_eq!(region, "RU-MOW");
                assert_eq!((first_row, second_row), (2, 4));
            }
            other => panic!("expected DuplicateKey, got {other:?}"),
        }
    }

    #[test]
    fn unknown_indicator_rejected() {
        let text = csv_of(&["RU-MOW,Moscow,CFD,mystery_series,2019,1,rub"]);
        match load(&text).unwrap_err() {
            Error::UnknownIndicator { row, indicator } => {
                assert_eq!(row, 2);
                assert_eq!(indicator, "mystery_series");
            }
            other => panic!("expected UnknownIndicator, got {other:?}"),
        }
    }

    #[test]
    fn comma_decimal_rejected_with_targeted_message() {
        let text = csv_of(&["RU-MOW,Moscow,CFD,deposits_total,2019,\"100,5\",rub"]);
        match load(&text).unwrap_err() {
            Error::Parse { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("comma decimal separator"), "{message}");
            }
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_value_rejected() {
        for bad in ["NaN", "inf", "-inf"] {
            let text = csv_of(&[&format!("RU-MOW,Moscow,CFD,deposits_total,2019,{bad},rub")]);
            match load(&text).unwrap_err() {
                Error::NonFiniteValue { row, .. } => assert_eq!(row, 2),
                other => panic!("expected NonFiniteValue for {bad}, got {other:?}"),
            }
        }
    }

    #[test]
    fn period_bounds_and_month_form() {
        assert!(load(&csv_of(&["R,Region,D,cpi,1800,1,p"])).is_err());
        assert!(load(&csv_of(&["R,Region,D,cpi,2101,1,p"])).is_err());
        assert!(load(&csv_of(&["R,Region,D,cpi,2019-13,1,p"])).is_err());
        let ds = load(&csv_of(&["R,Region,D,cpi,2019-05,104.1,index-points"])).unwrap();
        assert_eq!(ds.get("R", "cpi", Period::Month(2019, 5)), Some(104.1));
        assert_eq!(Period::Month(2019, 1).previous(), Period::Month(2018, 12));
    }

    #[test]
    fn header_must_match_exactly() {
        let text = "region,name,district,indicator,period,value,unit\nR,N,D,cpi,2019,1,p\n";
        match load(text).unwrap_err() {
            Error::Parse { row, .. } => assert_eq!(row, 1),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn conflicting_region_metadata_rejected() {
        let text = csv_of(&[
            "R,Region,D1,cpi,2019,1,p",
            "R,Region,D2,cpi,2018,1,p",
        ]);
        match load(&text).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("conflicting"), "{message}"),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn json_mirrors_csv_record_for_record() {
        let csv_text = csv_of(&[
            "RU-MOW,Moscow,CFD,deposits_total,2019,100.5,rub",
            "RU,Russian Federation,RU,deposits_total,2019,1000,rub",
        ]);
        let json_text = r#"[
            {"region_code":"RU-MOW","region_name":"Moscow","district_code":"CFD",
             "indicator_id":"deposits_total","period":"2019","value":100.5,"unit":"rub"},
            {"region_code":"RU","region_name":"Russian Federation","district_code":"RU",
             "indicator_id":"deposits_total","period":"2019","value":1000,"unit":"rub"}
        ]"#;
        let from_csv = load(&csv_text).unwrap();
        let from_json = Loader::new()
            .load_reader(json_text.as_bytes(), Format::Json)
            .unwrap();
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn row_permutation_yields_equal_dataset() {
        let rows = [
            "RU-MOW,Moscow,CFD,deposits_total,2019,100,rub",
            "RU-MOW,Moscow,CFD,population,2019,12000,persons",
            "RU-SPE,Saint Petersburg,NWFD,deposits_total,2019,55,rub",
            "RU,Russian Federation,RU,deposits_total,2019,1000,rub",
        ];
        let forward = load(&csv_of(&rows)).unwrap();
        let mut reversed = rows;
        reversed.reverse();
        let backward = load(&csv_of(&reversed)).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn validate_complete_coverage_has_no_errors() {
        let text = csv_of(&[
            "A,Alpha,D,deposits_total,2019,1,rub",
            "B,Beta,D,deposits_total,2019,2,rub",
        ]);
        let ds = load(&text).unwrap();
        let registered: BTreeSet<String> = ["deposits_total".to_string()].into();
        let report = validate_dataset(
            &ds,
            &["deposits_total".to_string()],
            &[Period::Year(2019)],
            &registered,
        );
        assert!(report.is_accepted());
        assert_eq!(report.row_count, 2);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn validate_reports_each_missing_triple() {
        let text = csv_of(&[
            "A,Alpha,D,deposits_total,2019,1,rub",
            "B,Beta,D,deposits_total,2018,2,rub",
        ]);
        let ds = load(&text).unwrap();
        let registered: BTreeSet<String> = ["deposits_total".to_string()].into();
        let report = validate_dataset(
            &ds,
            &["deposits_total".to_string()],
            &[Period::Year(2019)],
            &registered,
        );
        assert_eq!(report.errors.len(), 1);
        assert!(report.errors[0].message.contains("(B, deposits_total, 2019)"));
    }

    #[test]
    fn validate_warns_per_extraneous_indicator() {
        let text = csv_of(&[
            "A,Alpha,D,deposits_total,2019,1,rub",
            "A,Alpha,D,aux_series_one,2019,1,x",
            "A,Alpha,D,aux_series_two,2019,1,x",
            "A,Alpha,D,aux_series_three,2019,1,x",
        ]);
        let ds = Loader::new()
            .with_extra_indicators(["aux_series_one", "aux_series_two", "aux_series_three"])
            .load_reader(text.as_bytes(), Format::Csv)
            .unwrap();
        let registered: BTreeSet<String> = ["deposits_total".to_string()].into();
        let report = validate_dataset(&ds, &[], &[], &registered);
        assert_eq!(report.errors.len(), 0);
        assert_eq!(report.warnings.len(), 3);
    }
}
