//! Regional composite-index toolkit.
//!
//! Computes two composite indices over regional statistics — an eight-factor
//! banking-services provision index and a six-factor economic-health
//! indicator, both geometric means of sub-indices normalized against the
//! national row-set — plus the analytics around them: distribution
//! diagnostics, quartile/leader classification, federal-district
//! aggregation, health-banking correlation, and report/scatter emission.

pub mod classify;
pub mod composite;
pub mod dataset;
pub mod error;
pub mod fixture;
pub mod plot;
pub mod report;
pub mod stats;
pub mod subindex;

pub use classify::{LeaderFlag, QuartileBand, RegionClassification, Typology};
pub use composite::{CompositeIndexValue, DistrictIndexValue, IndexKind, WeightKind};
pub use dataset::{Format, IndicatorDataset, IndicatorObservation, Period, ValidationReport};
pub use error::{Error, Result};
pub use report::{ReportBundle, RunConfig};
pub use stats::DistributionSummary;
pub use subindex::{SubIndexDefinition, SubIndexValue};
