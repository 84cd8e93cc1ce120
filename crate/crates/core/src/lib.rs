//! Biological identifier-mapping and interaction tables behind a uniform
//! relation store, with experiment analytics on top.

pub mod analytics;
pub mod graph;
pub mod ingest;
pub mod options;
pub mod relcore;
pub mod scalar;
pub mod store;

pub use scalar::Scalar;

pub type WGraph = graph::WGraph<f64>;
pub type RenderOptions = graph::RenderOptions<f64>;
pub type Experiment = analytics::Experiment<f64>;
pub type HitsFilter = analytics::HitsFilter<f64>;
pub type Hit = analytics::Hit<f64>;
pub type MappedHits = analytics::MappedHits<f64>;
pub type OraRow = analytics::OraRow<f64>;
pub type AnalysisOptions = analytics::AnalysisOptions<f64>;

/// Single-precision variants.
pub mod single {
    use super::{analytics, graph};

    pub type WGraph = graph::WGraph<f32>;
    pub type RenderOptions = graph::RenderOptions<f32>;
    pub type Experiment = analytics::Experiment<f32>;
    pub type HitsFilter = analytics::HitsFilter<f32>;
    pub type Hit = analytics::Hit<f32>;
    pub type MappedHits = analytics::MappedHits<f32>;
    pub type OraRow = analytics::OraRow<f32>;
    pub type AnalysisOptions = analytics::AnalysisOptions<f32>;
}
