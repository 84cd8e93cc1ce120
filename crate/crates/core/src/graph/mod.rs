//! Weighted undirected gene graphs, STRING subgraph extraction and
//! rendering.

mod render;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use render::{render, Color, RenderFormat, RenderOptions};

use crate::relcore::{ColumnType, OrgToken, RelName, Value};
use crate::scalar::Scalar;
use crate::store::{QueryPattern, Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("self-loop on {0}")]
    SelfLoop(String),
    #[error("edge endpoint {0} is not a node")]
    UnknownNode(String),
    #[error("weight {0} outside 1..=999")]
    WeightOutOfRange(i64),
    #[error("min_weight {0} outside 0..=1000")]
    MinWeightOutOfRange(i64),
    #[error("hit symbol {0} appears with conflicting signs")]
    DuplicateHitSymbol(String),
    #[error("nothing to render: no edges and isolated nodes excluded")]
    EmptyGraphNothingToRender,
    #[error("invalid render option: {0}")]
    InvalidOption(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Absent,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Absent => "absent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeAttrs<F> {
    pub direction: Direction,
    /// |log2 fold change|; zero when absent.
    pub magnitude: F,
}

impl<F: Scalar> Default for NodeAttrs<F> {
    fn default() -> Self {
        NodeAttrs { direction: Direction::Absent, magnitude: F::zero() }
    }
}

/// Undirected graph on gene symbols. Edges are keyed by the ordered pair
/// `(a, b)` with `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct WGraph<F> {
    nodes: BTreeMap<String, NodeAttrs<F>>,
    edges: BTreeMap<(String, String), i64>,
}

impl<F: Scalar> Default for WGraph<F> {
    fn default() -> Self {
        WGraph { nodes: BTreeMap::new(), edges: BTreeMap::new() }
    }
}

impl<F: Scalar> WGraph<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, symbol: &str) {
        self.nodes.entry(symbol.to_string()).or_default();
    }

    /// Adds or replaces the edge between `a` and `b`.
    pub fn add_edge(&mut self, a: &str, b: &str, weight: i64) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        if !(ColumnType::MIN_WEIGHT..=ColumnType::MAX_WEIGHT).contains(&weight) {
            return Err(GraphError::WeightOutOfRange(weight));
        }
        for end in [a, b] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::UnknownNode(end.to_string()));
            }
        }
        let key = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
        self.edges.insert(key, weight);
        Ok(())
    }

    pub fn set_attrs(&mut self, symbol: &str, attrs: NodeAttrs<F>) -> Result<(), GraphError> {
        let node = self.nodes.get_mut(symbol).ok_or_else(|| GraphError::UnknownNode(symbol.to_string()))?;
        *node = attrs;
        Ok(())
    }

    pub fn node(&self, symbol: &str) -> Option<&NodeAttrs<F>> {
        self.nodes.get(symbol)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, &NodeAttrs<F>)> {
        self.nodes.iter().map(|(s, a)| (s.as_str(), a))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, i64)> {
        self.edges.iter().map(|((a, b), w)| (a.as_str(), b.as_str(), *w))
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<i64> {
        let key = if a < b { (a.to_string(), b.to_string()) } else { (b.to_string(), a.to_string()) };
        self.edges.get(&key).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn count(&self, direction: Direction) -> usize {
        self.nodes.values().filter(|a| a.direction == direction).count()
    }

    /// Nodes incident to at least one edge.
    pub fn connected_nodes(&self) -> BTreeSet<&str> {
        self.edges.keys().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect()
    }

    /// The graph minus its isolated nodes.
    pub fn without_isolated(&self) -> Self {
        let keep = self.connected_nodes();
        WGraph {
            nodes: self.nodes.iter().filter(|(s, _)| keep.contains(s.as_str())).map(|(s, a)| (s.clone(), *a)).collect(),
            edges: self.edges.clone(),
        }
    }
}

/// STRING interactions among `symbols` with weight at least `min_weight`.
/// Every input symbol becomes a node, connected or not.
pub fn string_subgraph<F: Scalar, S: AsRef<str>>(
    store: &Store,
    symbols: &[S],
    org: OrgToken,
    min_weight: i64,
) -> Result<WGraph<F>, GraphError> {
    if !(0..=1000).contains(&min_weight) {
        return Err(GraphError::MinWeightOutOfRange(min_weight));
    }
    let mut graph = WGraph::new();
    let wanted: BTreeSet<&str> = symbols.iter().map(AsRef::as_ref).collect();
    if wanted.is_empty() {
        return Ok(graph);
    }
    for s in &wanted {
        graph.add_node(s);
    }
    let name = RelName::edge(crate::relcore::DbToken::Strg, org, "symb")?;
    // Rows are stored with the smaller symbol first, so probing each
    // symbol as the first column visits every candidate edge once.
    for s in &wanted {
        let pattern = QueryPattern::free(3).bind(0, *s);
        for row in store.query(&name, &pattern)? {
            let row = row?;
            let (Some(b), Some(w)) = (row[1].as_str(), row[2].as_int()) else { continue };
            if w >= min_weight && wanted.contains(b) && *s != b {
                graph.add_edge(s, b, w)?;
            }
        }
    }
    Ok(graph)
}

/// Colours nodes by regulation: up for positive, down for negative fold
/// change, absent for zero or no hit. A symbol listed more than once keeps
/// its largest magnitude; listing it with opposite signs is an error.
pub fn annotate_regulation<F: Scalar, S: AsRef<str>>(
    graph: &WGraph<F>,
    hits: &[(S, F)],
) -> Result<WGraph<F>, GraphError> {
    let mut by_symbol: HashMap<&str, F> = HashMap::new();
    for (s, lfc) in hits {
        let s = s.as_ref();
        match by_symbol.get(s) {
            Some(prev) if (*prev > F::zero() && *lfc < F::zero()) || (*prev < F::zero() && *lfc > F::zero()) => {
                return Err(GraphError::DuplicateHitSymbol(s.to_string()));
            }
            Some(prev) if prev.abs() >= lfc.abs() => {}
            _ => {
                by_symbol.insert(s, *lfc);
            }
        }
    }
    let mut out = graph.clone();
    for (symbol, attrs) in out.nodes.iter_mut() {
        *attrs = match by_symbol.get(symbol.as_str()) {
            Some(&lfc) if lfc > F::zero() => NodeAttrs { direction: Direction::Up, magnitude: lfc.abs() },
            Some(&lfc) if lfc < F::zero() => NodeAttrs { direction: Direction::Down, magnitude: lfc.abs() },
            _ => NodeAttrs::default(),
        };
    }
    Ok(out)
}

impl From<crate::relcore::RelError> for GraphError {
    fn from(e: crate::relcore::RelError) -> Self {
        GraphError::Store(StoreError::Rel(e))
    }
}

/// Edge rows of a graph, for comparisons against table scans.
pub fn edge_rows<F: Scalar>(graph: &WGraph<F>) -> Vec<Vec<Value>> {
    graph
        .edges()
        .map(|(a, b, w)| vec![Value::from(a), Value::from(b), Value::Int(w)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WGraph<f64> {
        let mut g = WGraph::new();
        for s in ["A", "B", "C", "D"] {
            g.add_node(s);
        }
        g.add_edge("B", "A", 500).unwrap();
        g.add_edge("B", "C", 700).unwrap();
        g
    }

    #[test]
    fn invariants_enforced() {
        let mut g = triangle();
        assert!(matches!(g.add_edge("A", "A", 5), Err(GraphError::SelfLoop(_))));
        assert!(matches!(g.add_edge("A", "Z", 5), Err(GraphError::UnknownNode(_))));
        assert!(matches!(g.add_edge("A", "C", 1000), Err(GraphError::WeightOutOfRange(1000))));
        assert_eq!(g.edge("A", "B"), Some(500));
        assert_eq!(g.edges().next(), Some(("A", "B", 500)));
        assert_eq!(g.without_isolated().node_count(), 3);
    }

    #[test]
    fn regulation_sign_rule() {
        let g = annotate_regulation(&triangle(), &[("A", 2.0), ("B", -0.5), ("C", 0.0), ("B", -1.5)]).unwrap();
        assert_eq!(g.node("A").unwrap(), &NodeAttrs { direction: Direction::Up, magnitude: 2.0 });
        assert_eq!(g.node("B").unwrap(), &NodeAttrs { direction: Direction::Down, magnitude: 1.5 });
        assert_eq!(g.node("C").unwrap().direction, Direction::Absent);
        assert_eq!(g.node("D").unwrap().direction, Direction::Absent);
        let err = annotate_regulation(&triangle(), &[("A", 1.0), ("A", -1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateHitSymbol(s) if s == "A"));
    }
}
