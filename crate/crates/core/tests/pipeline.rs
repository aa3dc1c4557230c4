//! End-to-end pipeline tests over the committed fixture and a small
//! hand-built dataset.

use std::io::Write;
use std::path::PathBuf;

use shadow_core::composite::WeightKind;
use shadow_core::dataset::Period;
use shadow_core::error::Error;
use shadow_core::report::{
    bundle_from_json, bundle_to_json, render_markdown, run_pipeline, RegistrySelection, RunConfig,
};
use shadow_core::subindex::{Denominator, Direction, SubIndexDefinition, Transform};
use shadow_core::LeaderFlag;

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_85.csv")
}

/// Six-region dataset (five regions + national) covering both registries
/// for 2018-2019. Every banking sub-index of region r equals `factor(r)`,
/// so the banking composite is the factor itself.
fn mini_csv() -> String {
    let regions: [(&str, &str, &str, f64); 5] = [
        ("A", "Alpha", "D1", 0.5),
        ("B", "Beta", "D1", 0.8),
        ("C", "Gamma", "D2", 1.0),
        ("D", "Delta", "D2", 1.3),
        ("E", "Epsilon", "D2", 2.0),
    ];
    let ru_pop = 100_000.0;
    let per_pop: [(&str, f64); 4] = [
        ("credit_institutions_count", 100.0),
        ("loans_individuals", 8_000.0),
        ("deposits_total", 14_000.0),
        ("paid_services_volume", 5_000.0),
    ];
    let per_grp: [(&str, f64); 3] = [
        ("bank_assets", 40_000.0),
        ("bank_capital", 5_000.0),
        ("loans_legal_entities", 15_000.0),
    ];
    let mut rows = String::from("region_code,region_name,district_code,indicator_id,period,value,unit\n");
    let mut push = |code: &str, name: &str, district: &str, id: &str, year: u16, value: f64| {
        rows.push_str(&format!("{code},{name},{district},{id},{year},{value},u\n"));
    };

    for year in [2018u16, 2019] {
        let scale = if year == 2018 { 0.95 } else { 1.0 };
        push("RU", "Russia", "RU", "population", year, ru_pop);
        push("RU", "Russia", "RU", "grp", year, ru_pop * 500.0);
        for (id, base) in per_pop {
            push("RU", "Russia", "RU", id, year, base * scale);
        }
        for (id, base) in per_grp {
            push("RU", "Russia", "RU", id, year, base * scale);
        }
        push("RU", "Russia", "RU", "construction_volume_index", year, 102.0);
        push("RU", "Russia", "RU", "fixed_capital_investment", year, 10_000.0 * scale);
        push("RU", "Russia", "RU", "retail_turnover", year, 20_000.0 * scale);
        push("RU", "Russia", "RU", "unemployment_rate", year, 5.0);
        push("RU", "Russia", "RU", "cpi", year, 104.0);

        for (code, name, district, f) in regions {
            let pop = 1_000.0 * f;
            let grp = pop * 500.0;
            push(code, name, district, "population", year, pop);
            push(code, name, district, "grp", year, grp);
            for (id, base) in per_pop {
                push(code, name, district, id, year, f * base * scale * (pop / ru_pop));
            }
            for (id, base) in per_grp {
                push(code, name, district, id, year, f * base * scale * (grp / (ru_pop * 500.0)));
            }
            push(code, name, district, "construction_volume_index", year, 102.0 * f);
            push(code, name, district, "fixed_capital_investment", year, f * 10_000.0 * scale);
            push(code, name, district, "retail_turnover", year, f * 20_000.0 * scale * (pop / ru_pop));
            push(code, name, district, "unemployment_rate", year, 6.0);
            push(code, name, district, "cpi", year, 105.0);
        }
    }
    rows
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new()
        .suffix(".csv")
        .tempfile()
        .unwrap();
    file.write_all(content.as_bytes()).unwrap();
    file.flush().unwrap();
    file
}

#[test]
fn fixture_full_bundle_for_2019() {
    let config = RunConfig::new(fixture_path(), vec![Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    assert_eq!(bundle.periods.len(), 1);
    let report = &bundle.periods[0];
    assert_eq!(report.per_region.len(), 85);
    assert_eq!(report.per_district.len(), 8);
    assert!(report.correlation_r2.is_some());
    let r2 = report.correlation_r2.unwrap();
    assert!((0.0..=1.0).contains(&r2));

    let ru = report
        .per_region
        .iter()
        .find(|r| r.region_code == "RU")
        .unwrap();
    let banking = ru.banking.as_ref().unwrap();
    assert!((banking.value - 1.0).abs() < 1e-12);
    let health = ru.health.as_ref().unwrap();
    assert!((health.value - 1.0).abs() < 1e-12);
    for sub in banking.subindices.iter().chain(health.subindices.iter()) {
        assert!((sub.value - 1.0).abs() < 1e-12);
    }
    assert_eq!(bundle.metadata.quartile_convention, "type7-linear-interpolation");
    assert!(bundle.metadata.warnings.is_empty());
}

#[test]
fn fixture_checkpoints_reproduce_calibration() {
    let config = RunConfig::new(fixture_path(), vec![Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    let report = &bundle.periods[0];

    let subindex_of = |region: &str, id: &str| -> f64 {
        report
            .per_region
            .iter()
            .find(|r| r.region_code == region)
            .unwrap()
            .banking
            .as_ref()
            .unwrap()
            .subindices
            .iter()
            .find(|s| s.definition_id == id)
            .unwrap()
            .value
    };
    for (region, expected) in shadow_core::fixture::PAID_SERVICES_CHECKPOINTS {
        let got = subindex_of(region, "I8_paid_services_per_population");
        assert!((got - expected).abs() < 1e-9, "{region}: {got} vs {expected}");
    }
    let savings = subindex_of("MOSCOW-LIKE", "I7_deposits_per_population");
    assert!((savings - 1.41).abs() < 1e-9, "{savings}");

    let dist = report.distribution.banking.as_ref().unwrap();
    assert!((dist.q1 - 0.19).abs() < 1e-9, "Q1 {}", dist.q1);
    assert!((dist.q3 - 0.56).abs() < 1e-9, "Q3 {}", dist.q3);
}

#[test]
fn fixture_multi_period_skips_health_where_uncovered() {
    let periods: Vec<Period> = (2015..=2019).map(Period::Year).collect();
    let config = RunConfig::new(fixture_path(), periods);
    let bundle = run_pipeline(&config).unwrap();

    assert_eq!(bundle.periods.len(), 5);
    for report in &bundle.periods {
        assert!(report.distribution.banking.is_some());
        let health_expected = report.period >= Period::Year(2018);
        assert_eq!(report.distribution.health.is_some(), health_expected);
        assert_eq!(report.correlation_r2.is_some(), health_expected);
    }
    let skipped: Vec<_> = bundle
        .metadata
        .skipped
        .iter()
        .map(|s| (s.index.as_str(), s.period))
        .collect();
    assert_eq!(
        skipped,
        vec![
            ("economic_health", Period::Year(2015)),
            ("economic_health", Period::Year(2016)),
            ("economic_health", Period::Year(2017)),
        ]
    );
}

#[test]
fn mini_dataset_banking_composites_equal_factors() {
    let file = write_temp(&mini_csv());
    let config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    let report = &bundle.periods[0];
    assert_eq!(report.per_region.len(), 6);

    let factors = [("A", 0.5), ("B", 0.8), ("C", 1.0), ("D", 1.3), ("E", 2.0), ("RU", 1.0)];
    for (code, f) in factors {
        let region = report.per_region.iter().find(|r| r.region_code == code).unwrap();
        let banking = region.banking.as_ref().unwrap();
        assert!((banking.value - f).abs() < 1e-12, "{code}: {}", banking.value);
    }

    // Q3 of [0.5, 0.8, 1, 1, 1.3, 2] is 1.225: leaders are D and E.
    let leaders: Vec<&str> = report
        .per_region
        .iter()
        .filter(|r| r.banking.as_ref().unwrap().leader_flag == LeaderFlag::Leader)
        .map(|r| r.region_code.as_str())
        .collect();
    assert_eq!(leaders, vec!["D", "E"]);

    // District geometric means stay within member bounds.
    let d1 = report.per_district.iter().find(|d| d.district_code == "D1").unwrap();
    let cell = d1.banking.as_ref().unwrap();
    assert_eq!(cell.member_regions, vec!["A".to_string(), "B".to_string()]);
    assert!(cell.value >= 0.5 && cell.value <= 0.8);
    assert_eq!(cell.weight_kind, WeightKind::Population);
}

#[test]
fn mini_dataset_2019_only_health_needs_prior_year() {
    let file = write_temp(&mini_csv());
    let config = RunConfig::new(file.path(), vec![Period::Year(2018), Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    assert_eq!(bundle.periods.len(), 2);
    assert!(bundle.periods[0].distribution.health.is_none());
    assert!(bundle.periods[0].distribution.banking.is_some());
    assert!(bundle.periods[1].distribution.health.is_some());
    assert_eq!(bundle.metadata.skipped.len(), 1);
    assert_eq!(bundle.metadata.skipped[0].period, Period::Year(2018));
}

#[test]
fn partial_coverage_is_a_validation_failure() {
    let text: String = mini_csv()
        .lines()
        .filter(|line| !line.starts_with("B,Beta,D1,deposits_total,2019"))
        .map(|line| format!("{line}\n"))
        .collect();
    let file = write_temp(&text);
    let config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    match run_pipeline(&config).unwrap_err() {
        Error::ValidationFailed { report } => {
            assert_eq!(report.errors.len(), 1);
            assert!(report.errors[0].message.contains("(B, deposits_total, 2019)"));
        }
        other => panic!("expected ValidationFailed, got {other:?}"),
    }
}

#[test]
fn missing_national_rows_fail_at_normalization() {
    let text: String = mini_csv()
        .lines()
        .filter(|line| !line.starts_with("RU,"))
        .map(|line| format!("{line}\n"))
        .collect();
    let file = write_temp(&text);
    let config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    match run_pipeline(&config).unwrap_err() {
        Error::MissingObservation { region, .. } => assert_eq!(region, "RU"),
        other => panic!("expected MissingObservation for RU, got {other:?}"),
    }
}

#[test]
fn no_coverage_anywhere_is_reported() {
    let file = write_temp(&mini_csv());
    let config = RunConfig::new(file.path(), vec![Period::Year(2016)]);
    match run_pipeline(&config).unwrap_err() {
        Error::ValidationFailed { report } => {
            assert!(!report.errors.is_empty());
            assert!(report.errors.iter().all(|e| e.rule == "no-coverage"));
        }
        other => panic!("expected ValidationFailed, got {other:?}"),
    }
}

#[test]
fn single_family_and_custom_registry_runs() {
    let file = write_temp(&mini_csv());
    let mut config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    config.registry = RegistrySelection::BankingBuiltin;
    let bundle = run_pipeline(&config).unwrap();
    let report = &bundle.periods[0];
    assert!(report.distribution.banking.is_some());
    assert!(report.distribution.health.is_none());
    assert!(report.correlation_r2.is_none());
    assert!(report.per_region.iter().all(|r| r.health.is_none()));

    config.registry = RegistrySelection::Custom {
        label: "deposits-only".to_string(),
        definitions: vec![
            SubIndexDefinition {
                id: "deposits_per_capita".to_string(),
                numerator: "deposits_total".to_string(),
                denominator: Denominator::Population,
                transform: Transform::Level,
                direction: Direction::Benefit,
                normalize_national: true,
            },
            SubIndexDefinition {
                id: "assets_per_grp".to_string(),
                numerator: "bank_assets".to_string(),
                denominator: Denominator::Grp,
                transform: Transform::Level,
                direction: Direction::Benefit,
                normalize_national: true,
            },
        ],
    };
    let bundle = run_pipeline(&config).unwrap();
    let report = &bundle.periods[0];
    assert!(report.distribution.custom.is_some());
    let a = report.per_region.iter().find(|r| r.region_code == "A").unwrap();
    let cell = a.custom.as_ref().unwrap();
    assert_eq!(cell.subindices.len(), 2);
    assert!((cell.value - 0.5).abs() < 1e-12);
}

#[test]
fn json_round_trips_to_an_equal_bundle() {
    let file = write_temp(&mini_csv());
    let config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    let json = bundle_to_json(&bundle).unwrap();
    let parsed = bundle_from_json(&json).unwrap();
    assert_eq!(bundle, parsed);
}

#[test]
fn markdown_outsider_table_rows_match_classification() {
    let file = write_temp(&mini_csv());
    let config = RunConfig::new(file.path(), vec![Period::Year(2019)]);
    let bundle = run_pipeline(&config).unwrap();
    let outsiders = bundle.periods[0]
        .per_region
        .iter()
        .filter(|r| r.banking.as_ref().unwrap().leader_flag == LeaderFlag::Outsider)
        .count();
    assert_eq!(outsiders, 2);

    let md = render_markdown(&bundle);
    let section = md
        .split("#### Outsiders (value <= Q1)")
        .nth(1)
        .unwrap()
        .split("####")
        .next()
        .unwrap();
    let rows = section
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| region") && !l.starts_with("|--"))
        .count();
    assert_eq!(rows, outsiders);
}

#[test]
fn identical_runs_emit_identical_json() {
    let config = RunConfig::new(fixture_path(), vec![Period::Year(2019)]);
    let a = bundle_to_json(&run_pipeline(&config).unwrap()).unwrap();
    let b = bundle_to_json(&run_pipeline(&config).unwrap()).unwrap();
    assert_eq!(a, b);
}
