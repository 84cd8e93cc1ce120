use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::thread;

use super::ora::term_members;
use super::{
    filter_hits, go_over_representation, load_experiment, map_hits_to_genes, Adjustment, AnalyticsError, ColumnSpec,
    GeneFamily, HitsFilter, IdKind, MappedHits, OraRow, Regulation,
};
use crate::graph::{annotate_regulation, render, string_subgraph, Color, GraphError, RenderFormat, RenderOptions, WGraph};
use crate::options::{OptionError, Settings};
use crate::relcore::OrgToken;
use crate::scalar::Scalar;
use crate::store::Store;

/// Settings shared by every stage of an analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions<F> {
    pub columns: ColumnSpec,
    pub id_kind: IdKind,
    pub filter: HitsFilter<F>,
    pub org: OrgToken,
    pub min_weight: i64,
    /// Keep family genes that are not hits, uncoloured.
    pub include_absent: bool,
    pub alpha: F,
    pub adjustment: Adjustment,
    pub render: RenderOptions<F>,
    /// Where rendered graphs go; nothing is written when unset.
    pub out_dir: Option<PathBuf>,
}

impl<F: Scalar> Default for AnalysisOptions<F> {
    fn default() -> Self {
        AnalysisOptions {
            columns: ColumnSpec::default(),
            id_kind: IdKind::ProteinAccession,
            filter: HitsFilter::default(),
            org: OrgToken::Hs,
            min_weight: 400,
            include_absent: false,
            alpha: F::lit(0.05),
            adjustment: Adjustment::BenjaminiHochberg,
            render: RenderOptions::default(),
            out_dir: None,
        }
    }
}

fn real<F: Scalar>(s: &Settings, key: &str) -> Result<Option<F>, OptionError> {
    Ok(s.parse::<f64>(key)?.and_then(F::from_f64))
}

impl<F: Scalar> AnalysisOptions<F> {
    /// Options from layered settings; keys that are unset keep their
    /// defaults.
    pub fn from_settings(s: &Settings) -> Result<Self, AnalyticsError> {
        let mut o = AnalysisOptions::<F>::default();
        if let Some(v) = s.parse::<OrgToken>("organism")? {
            o.org = v;
        }
        if let Some(v) = s.parse::<IdKind>("id_kind")? {
            o.id_kind = v;
        }
        for (key, slot) in [
            ("id_column", &mut o.columns.id_col),
            ("fc_column", &mut o.columns.fc_col),
            ("pvalue_column", &mut o.columns.pval_col),
        ] {
            if let Some(v) = s.get(key) {
                *slot = v.to_string();
            }
        }
        let max_pvalue = real(s, "max_pvalue")?.unwrap_or(o.filter.max_pvalue);
        let min_abs = real(s, "min_abs_log2fc")?.unwrap_or(o.filter.min_abs_log2fc);
        let direction = s.parse::<Regulation>("direction")?.unwrap_or(o.filter.direction);
        o.filter = HitsFilter::new(max_pvalue, min_abs, direction)?;
        if let Some(v) = s.parse::<i64>("min_weight")? {
            o.min_weight = v;
        }
        if let Some(v) = s.flag("include_absent")? {
            o.include_absent = v;
        }
        if let Some(v) = real(s, "alpha")? {
            o.alpha = v;
        }
        if let Some(v) = s.parse::<Adjustment>("adjustment")? {
            o.adjustment = v;
        }
        if let Some(v) = s.parse::<RenderFormat>("format")? {
            o.render.format = v;
        }
        if let Some(v) = real(s, "node_size")? {
            o.render.node_size = v;
        }
        if let Some(v) = s.flag("include_isolated")? {
            o.render.include_isolated = v;
        }
        if let Some(v) = s.parse::<Color>("color_up")? {
            o.render.color_up = v;
        }
        if let Some(v) = s.parse::<Color>("color_down")? {
            o.render.color_down = v;
        }
        Ok(o)
    }
}

/// Genes of an experiment after mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGenes<F> {
    /// Usable rows read from the file.
    pub rows: usize,
    pub skipped: usize,
    /// Filtered rows, mapped and collapsed.
    pub hits: MappedHits<F>,
    /// All rows, mapped and collapsed.
    pub universe: MappedHits<F>,
}

/// load, filter and map, plus the mapped universe of all rows.
pub fn experiment_genes<F: Scalar>(
    store: &Store,
    csv_path: &Path,
    opts: &AnalysisOptions<F>,
) -> Result<ExperimentGenes<F>, AnalyticsError> {
    let exp = load_experiment::<F>(csv_path, &opts.columns, opts.id_kind)?;
    let hits = filter_hits(&exp, &opts.filter);
    let hits = map_hits_to_genes(store, &hits, exp.id_kind, opts.org)?;
    let everything = filter_hits(&exp, &HitsFilter::new(F::one(), F::zero(), Regulation::Both)?);
    let universe = map_hits_to_genes(store, &everything, exp.id_kind, opts.org)?;
    Ok(ExperimentGenes { rows: exp.rows.len(), skipped: exp.skipped, hits, universe })
}

/// Graph nodes for a family: hit genes in the family, plus every family
/// gene when `include_absent` is set. Sorted.
pub fn select_family_genes<F: Scalar>(hits: &MappedHits<F>, family: &GeneFamily, include_absent: bool) -> Vec<String> {
    let mut nodes: BTreeSet<String> =
        hits.genes.iter().filter(|h| family.symbols().contains(&h.id)).map(|h| h.id.clone()).collect();
    if include_absent {
        nodes.extend(family.symbols().iter().cloned());
    }
    nodes.into_iter().collect()
}

/// `<stem>.<ext>`, with path separators in the stem replaced.
pub fn graph_file_name(stem: &str, format: RenderFormat) -> String {
    let stem: String = stem.chars().map(|c| if matches!(c, '/' | '\\' | ':') || c.is_control() { '_' } else { c }).collect();
    format!("{stem}.{}", format.extension())
}

/// `GO_<7-digit id>.<ext>`
pub fn term_graph_file_name(term: i64, format: RenderFormat) -> String {
    format!("GO_{term:07}.{}", format.extension())
}

/// Renders `graph` to `path`. Returns false without writing when there is
/// nothing to render.
pub fn write_graph<F: Scalar>(graph: &WGraph<F>, path: &Path, opts: &RenderOptions<F>) -> Result<bool, AnalyticsError> {
    let text = match render(graph, opts) {
        Ok(t) => t,
        Err(GraphError::EmptyGraphNothingToRender) => {
            log::warn!("{}: nothing to render", path.display());
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AnalyticsError::Io { path: dir.to_path_buf(), source: e })?;
    }
    std::fs::write(path, text).map_err(|e| AnalyticsError::Io { path: path.to_path_buf(), source: e })?;
    Ok(true)
}

/// STRING graph of the experiment's hits within `family`, coloured by
/// regulation. Written to `out_dir` as `<family name>.<ext>` when set.
pub fn family_string_graph<F: Scalar>(
    store: &Store,
    csv_path: &Path,
    family: &GeneFamily,
    opts: &AnalysisOptions<F>,
) -> Result<WGraph<F>, AnalyticsError> {
    let exp = load_experiment::<F>(csv_path, &opts.columns, opts.id_kind)?;
    let hits = filter_hits(&exp, &opts.filter);
    let genes = map_hits_to_genes(store, &hits, exp.id_kind, opts.org)?;
    let nodes = select_family_genes(&genes, family, opts.include_absent);
    let graph = string_subgraph(store, &nodes, opts.org, opts.min_weight)?;
    let graph = annotate_regulation(&graph, &genes.fold_changes())?;
    if let Some(dir) = &opts.out_dir {
        write_graph(&graph, &dir.join(graph_file_name(family.name(), opts.render.format)), &opts.render)?;
    }
    Ok(graph)
}

/// Full result of a GO over-representation run.
#[derive(Debug, Clone, PartialEq)]
pub struct GoOver<F> {
    pub genes: ExperimentGenes<F>,
    /// Every tested term, by p-value.
    pub table: Vec<OraRow<F>>,
    /// Terms with adjusted p-value at most alpha, with their hit graphs.
    pub graphs: TermGraphs<F>,
    pub files: Vec<PathBuf>,
}

impl<F: Scalar> GoOver<F> {
    /// Runs the analysis behind [`go_over_string_graphs`], keeping the
    /// full table and the mapped genes.
    pub fn run(store: &Store, csv_path: &Path, opts: &AnalysisOptions<F>) -> Result<Self, AnalyticsError> {
        let genes = experiment_genes(store, csv_path, opts)?;
        let hit_symbols = genes.hits.symbols();
        let table = go_over_representation::<F, &str>(store, &hit_symbols, &genes.universe.symbols(), opts.org, opts.adjustment)?;
        let significant: Vec<OraRow<F>> = table.iter().filter(|r| r.adjusted_pvalue <= opts.alpha).cloned().collect();
        let members = if significant.is_empty() { Default::default() } else { term_members(store, &hit_symbols, opts.org)? };
        let fold_changes = genes.hits.fold_changes();

        let built: Vec<Result<WGraph<F>, AnalyticsError>> = thread::scope(|scope| {
            let handles: Vec<_> = significant
                .iter()
                .map(|row| {
                    let nodes: Vec<&str> = members.get(&row.term).map(|m| m.iter().map(String::as_str).collect()).unwrap_or_default();
                    let fold_changes = &fold_changes;
                    scope.spawn(move || {
                        let g = string_subgraph(store, &nodes, opts.org, opts.min_weight)?;
                        Ok(annotate_regulation(&g, fold_changes)?)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("graph worker panicked")).collect()
        });
        let mut graphs = Vec::with_capacity(built.len());
        for (row, g) in significant.into_iter().zip(built) {
            graphs.push((row, g?));
        }

        let mut files = Vec::new();
        if let Some(dir) = &opts.out_dir {
            for (row, g) in &graphs {
                let path = dir.join(term_graph_file_name(row.term, opts.render.format));
                if write_graph(g, &path, &opts.render)? {
                    files.push(path);
                }
            }
        }
        Ok(GoOver { genes, table, graphs, files })
    }
}

/// Significant rows, each with its term graph.
pub type TermGraphs<F> = Vec<(OraRow<F>, WGraph<F>)>;

/// Significant GO terms of the experiment's hits, each with the STRING
/// graph of its hit genes. Graphs are written to `out_dir` as
/// `GO_<id>.<ext>` when set.
pub fn go_over_string_graphs<F: Scalar>(
    store: &Store,
    csv_path: &Path,
    opts: &AnalysisOptions<F>,
) -> Result<TermGraphs<F>, AnalyticsError> {
    Ok(GoOver::run(store, csv_path, opts)?.graphs)
}

