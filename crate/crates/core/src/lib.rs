//! Linguistic summaries of personal time series.
//!
//! Series are discretized with SAX or fixed raw ranges, mined for frequent
//! patterns and similar windows, and turned into quantified English
//! sentences with quality measures and chart specifications.

pub mod discretize;
pub mod frame;
pub mod fuzzy;
pub mod ingest;
pub mod metrics;
pub mod mining;
pub mod model;
pub mod pipeline;
pub mod protoforms;
pub mod provenance;

use thiserror::Error;

pub use discretize::{BinningScheme, DiscretizeError, RangeBin, SymbolicSeries};
pub use frame::{Frame, FrameError};
pub use fuzzy::{FuzzyError, Quantifier};
pub use ingest::{CsvOptions, Dataset, IngestError};
pub use metrics::{Metric, MetricSet};
pub use mining::MiningError;
pub use model::{
    Goal, Granularity, GranularityKind, Guideline, Letter, ModelError, RunConfig, TimeSeries,
    Vocabulary, WindowMode,
};
pub use pipeline::{summarize, summarize_cohort, Setup};
pub use protoforms::{GroupError, ProtoformError, ProtoformType, Summary, TemplateError};
pub use provenance::ChartSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("user {user}: {source}")]
    User {
        user: String,
        #[source]
        source: Box<Error>,
    },
}
