//! `shadow` — command-line front end for the regional composite-index
//! pipeline.
//!
//! Exit codes: 0 success, 1 validation errors (bad or incomplete input
//! data), 2 computation errors (missing national rows, degenerate inputs,
//! IO failures), 64 usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shadow_core::classify::{classify_quartiles, classify_typology, load_typology_config};
use shadow_core::composite::WeightKind;
use shadow_core::dataset::{validate_dataset, Format, Loader, Period};
use shadow_core::error::{Error, Result};
use shadow_core::plot::{emit_scatter, Highlight, ScatterPoint, ScatterSpec};
use shadow_core::report::{
    emit_report, quantity_values, resolve_quantity, run_pipeline, RegistrySelection, ReportFormat,
    RunConfig,
};
use shadow_core::subindex::{load_registry, registered_indicator_ids};
use shadow_core::{LeaderFlag, QuartileBand, Typology};

#[derive(Parser)]
#[command(
    name = "shadow",
    version,
    about = "Regional banking-provision and economic-health index toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Rbsp,
    Health,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write a report bundle
    Compute {
        /// Dataset file (.csv or .json)
        #[arg(long)]
        dataset: PathBuf,
        /// builtin:banking, builtin:health, builtin:both, or a registry JSON path
        #[arg(long, default_value = "builtin:both")]
        registry: String,
        /// Periods, comma separated (YYYY or YYYY-MM)
        #[arg(long, value_delimiter = ',')]
        period: Vec<String>,
        /// Output file
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Print distribution diagnostics for one index cross-section
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        index: IndexArg,
        #[arg(long)]
        period: String,
    },
    /// Print quartile/leader classification, optionally with typology
    Classify {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        index: IndexArg,
        #[arg(long)]
        period: String,
        /// Typology thresholds JSON (optionally with per-region features)
        #[arg(long)]
        typology: Option<PathBuf>,
    },
    /// Write an SVG scatter diagram of two indices or sub-indices
    Plot {
        #[arg(long)]
        dataset: PathBuf,
        /// Index or sub-index id for the x axis (rbsp, health, I1.., H1..)
        #[arg(long)]
        x: String,
        /// Index or sub-index id for the y axis
        #[arg(long)]
        y: String,
        #[arg(long)]
        period: String,
        /// Output SVG file
        #[arg(long)]
        out: PathBuf,
    },
    /// Check dataset coverage and report unused indicators
    Validate {
        #[arg(long)]
        dataset: PathBuf,
        /// Indicator ids that must be present for every region and period
        #[arg(long, value_delimiter = ',')]
        required: Option<Vec<String>>,
    },
}

fn parse_period(raw: &str) -> Result<Period> {
    raw.parse().map_err(Error::Config)
}

fn parse_periods(raw: &[String]) -> Result<Vec<Period>> {
    if raw.is_empty() {
        return Err(Error::Config("at least one period is required".to_string()));
    }
    raw.iter().map(|p| parse_period(p)).collect()
}

fn parse_registry_selection(raw: &str) -> Result<RegistrySelection> {
    match raw {
        "builtin:both" => Ok(RegistrySelection::BothBuiltin),
        "builtin:banking" => Ok(RegistrySelection::BankingBuiltin),
        "builtin:health" => Ok(RegistrySelection::HealthBuiltin),
        path if path.ends_with(".json") => Ok(RegistrySelection::Custom {
            label: path.to_string(),
            definitions: load_registry(Path::new(path))?,
        }),
        other => Err(Error::Config(format!(
            "unknown registry '{other}'; use builtin:banking, builtin:health, builtin:both, or a .json path"
        ))),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let value = serde_json::to_value(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    let text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

fn single_family_bundle(
    dataset: &Path,
    index: IndexArg,
    period: Period,
) -> Result<shadow_core::ReportBundle> {
    let config = RunConfig {
        dataset_path: dataset.to_path_buf(),
        registry: match index {
            IndexArg::Rbsp => RegistrySelection::BankingBuiltin,
            IndexArg::Health => RegistrySelection::HealthBuiltin,
        },
        periods: vec![period],
        weight_kind: WeightKind::Population,
    };
    run_pipeline(&config)
}

fn index_label(index: IndexArg) -> &'static str {
    match index {
        IndexArg::Rbsp => "rbsp",
        IndexArg::Health => "health",
    }
}

fn run_stats(dataset: &Path, index: IndexArg, period: Period) -> Result<()> {
    let bundle = single_family_bundle(dataset, index, period)?;
    let report = &bundle.periods[0];
    let summary = match index {
        IndexArg::Rbsp => report.distribution.banking.clone(),
        IndexArg::Health => report.distribution.health.clone(),
    }
    .expect("computed family has a distribution");

    #[derive(Serialize)]
    struct StatsOutput<'a> {
        index: &'a str,
        period: Period,
        quartile_convention: &'a str,
        summary: shadow_core::DistributionSummary,
    }
    print_json(&StatsOutput {
        index: index_label(index),
        period,
        quartile_convention: &bundle.metadata.quartile_convention,
        summary,
    })
}

#[derive(Serialize)]
struct ClassifyRow {
    region_code: String,
    region_name: String,
    value: f64,
    quartile_band: QuartileBand,
    leader_flag: LeaderFlag,
    typology: Typology,
}

fn run_classify(
    dataset: &Path,
    index: IndexArg,
    period: Period,
    typology: Option<&Path>,
) -> Result<()> {
    let bundle = single_family_bundle(dataset, index, period)?;
    let config = typology.map(load_typology_config).transpose()?;

    let mut rows = Vec::new();
    for region in &bundle.periods[0].per_region {
        let cell = match index {
            IndexArg::Rbsp => region.banking.as_ref(),
            IndexArg::Health => region.health.as_ref(),
        }
        .expect("computed family has cells");
        let typology = config
            .as_ref()
            .and_then(|c| {
                c.features
                    .get(&region.region_code)
                    .map(|profile| classify_typology(profile, &c.thresholds))
            })
            .unwrap_or(Typology::Unassigned);
        rows.push(ClassifyRow {
            region_code: region.region_code.clone(),
            region_name: region.region_name.clone(),
            value: cell.value,
            quartile_band: cell.quartile_band,
            leader_flag: cell.leader_flag,
            typology,
        });
    }

    #[derive(Serialize)]
    struct ClassifyOutput<'a> {
        index: &'a str,
        period: Period,
        regions: Vec<ClassifyRow>,
    }
    print_json(&ClassifyOutput {
        index: index_label(index),
        period,
        regions: rows,
    })
}

fn run_plot(dataset_path: &Path, x: &str, y: &str, period: Period, out: &Path) -> Result<()> {
    let format = Format::from_path(dataset_path);
    let dataset = Loader::new().load_path(dataset_path, format)?;
    let x_quantity = resolve_quantity(x)?;
    let y_quantity = resolve_quantity(y)?;
    let xs = quantity_values(&dataset, &x_quantity, period)?;
    let ys = quantity_values(&dataset, &y_quantity, period)?;

    // Leaders and outsiders are read off the plotted (y) cross-section.
    let classified = classify_quartiles(&ys, period)?;
    let points: Vec<ScatterPoint> = ys
        .iter()
        .map(|(region, &yv)| ScatterPoint {
            label: region.clone(),
            x: xs[region],
            y: yv,
            highlight: match classified[region].leader_flag {
                LeaderFlag::Leader => Highlight::Leader,
                LeaderFlag::Outsider => Highlight::Outsider,
                LeaderFlag::Neither => Highlight::None,
            },
        })
        .collect();

    let spec = ScatterSpec {
        title: format!("{y} vs {x} ({period})"),
        x_label: x.to_string(),
        y_label: y.to_string(),
        points,
    };
    emit_scatter(&spec, out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn run_validate(dataset_path: &Path, required: &[String]) -> Result<()> {
    let format = Format::from_path(dataset_path);
    let dataset = Loader::new().load_path(dataset_path, format)?;
    let periods: Vec<Period> = dataset.periods().into_iter().collect();
    let registered = registered_indicator_ids();
    let report = validate_dataset(&dataset, required, &periods, &registered);

    #[derive(Serialize)]
    struct ValidateOutput<'a> {
        accepted: bool,
        #[serde(flatten)]
        report: &'a shadow_core::ValidationReport,
    }
    print_json(&ValidateOutput {
        accepted: report.is_accepted(),
        report: &report,
    })?;
    if !report.is_accepted() {
        return Err(Error::ValidationFailed { report });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compute {
            dataset,
            registry,
            period,
            out,
            format,
        } => {
            let config = RunConfig {
                dataset_path: dataset,
                registry: parse_registry_selection(&registry)?,
                periods: parse_periods(&period)?,
                weight_kind: WeightKind::Population,
            };
            let bundle = run_pipeline(&config)?;
            let report_format = match format {
                OutputFormat::Json => ReportFormat::Json,
                OutputFormat::Markdown => ReportFormat::Markdown,
            };
            emit_report(&bundle, report_format, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Stats {
            dataset,
            index,
            period,
        } => run_stats(&dataset, index, parse_period(&period)?),
        Command::Classify {
            dataset,
            index,
            period,
            typology,
        } => run_classify(&dataset, index, parse_period(&period)?, typology.as_deref()),
        Command::Plot {
            dataset,
            x,
            y,
            period,
            out,
        } => run_plot(&dataset, &x, &y, parse_period(&period)?, &out),
        Command::Validate { dataset, required } => {
            run_validate(&dataset, &required.unwrap_or_default())
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 64,
        e if e.is_validation() => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("shadow: error: {err}");
            if let Error::ValidationFailed { report } = &err {
                for issue in report.errors.iter().take(20) {
                    eprintln!("  - [{}] {}", issue.rule, issue.message);
                }
                if report.errors.len() > 20 {
                    eprintln!("  ... and {} more", report.errors.len() - 20);
                }
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}
