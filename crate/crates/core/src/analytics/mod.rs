//! Experiment pipelines: hits filtering, protein to gene mapping, family
//! subgraphs and GO over-representation.

mod experiment;
mod family;
mod filter;
mod mapping;
mod ora;
mod pipeline;
mod stats;

use std::path::PathBuf;

pub use experiment::{load_experiment, ColumnSpec, ExpRow, Experiment, IdKind};
pub use family::GeneFamily;
pub use filter::{filter_hits, Hit, HitsFilter, Regulation};
pub use mapping::{map_hits_to_genes, MappedHits};
pub use ora::{go_over_representation, ora_tsv, Adjustment, OraRow, ORA_HEADER};
pub use pipeline::{
    experiment_genes, family_string_graph, go_over_string_graphs, graph_file_name, select_family_genes,
    term_graph_file_name, write_graph, AnalysisOptions, ExperimentGenes, GoOver, TermGraphs,
};
pub use stats::{bh_adjust, bonferroni_adjust, hypergeom_tail, ln_choose};

use crate::graph::GraphError;
use crate::options::OptionError;
use crate::store::StoreError;

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Option(#[from] OptionError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{0}: file is empty")]
    EmptyFile(PathBuf),
    #[error("gene family {0} has no symbols")]
    EmptyFamily(String),
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("invalid hits filter: {0}")]
    InvalidFilter(String),
}

impl From<crate::relcore::RelError> for AnalyticsError {
    fn from(e: crate::relcore::RelError) -> Self {
        AnalyticsError::Store(StoreError::Rel(e))
    }
}
