use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use super::AnalyticsError;
use crate::relcore::{format_go_id, parse_rel_name, OrgToken};
use crate::store::{QueryPattern, Store};

/// A named, non-empty set of gene symbols: a pathway or a GO term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneFamily {
    name: String,
    symbols: BTreeSet<String>,
}

impl GeneFamily {
    pub fn new(name: &str, symbols: impl IntoIterator<Item = String>) -> Result<Self, AnalyticsError> {
        let symbols: BTreeSet<String> = symbols.into_iter().filter(|s| !s.is_empty()).collect();
        if symbols.is_empty() {
            return Err(AnalyticsError::EmptyFamily(name.to_string()));
        }
        Ok(GeneFamily { name: name.to_string(), symbols })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &BTreeSet<String> {
        &self.symbols
    }

    /// One symbol per line, or the first column of a CSV. A first line
    /// reading `symbol` is a header. The family is named after the file
    /// stem.
    pub fn from_file(path: &Path) -> Result<Self, AnalyticsError> {
        let file = File::open(path).map_err(|e| AnalyticsError::Io { path: path.to_path_buf(), source: e })?;
        let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file);
        let mut symbols = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| AnalyticsError::Csv { path: path.to_path_buf(), message: e.to_string() })?;
            let Some(first) = record.get(0).map(str::trim) else { continue };
            if i == 0 && first.eq_ignore_ascii_case("symbol") {
                continue;
            }
            symbols.push(first.to_string());
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        GeneFamily::new(&name, symbols)
    }

    /// Genes directly annotated to a GO term.
    pub fn from_go_term(store: &Store, term: i64, org: OrgToken) -> Result<Self, AnalyticsError> {
        let name = match org {
            OrgToken::Hs => parse_rel_name("map_gont_symb_gont")?,
            OrgToken::Mouse => parse_rel_name("map_gont_mouse_symb_gont")?,
        };
        let mut symbols = Vec::new();
        for row in store.query(&name, &QueryPattern::free(2).bind(1, term))? {
            symbols.push(row?[0].to_string());
        }
        GeneFamily::new(&format_go_id(term), symbols)
    }
}
