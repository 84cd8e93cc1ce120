//! The built-in table registry, organised in two tiers: organism, then
//! source database.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::{
    parse_rel_name, Column, ColumnType, DbToken, OrgToken, RelError, RelName, RelationSchema,
};

/// Selects a cell of the two-tier hierarchy. Empty selects everything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CellSelector {
    org: Option<OrgToken>,
    db: Option<DbToken>,
}

impl CellSelector {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn org(org: OrgToken) -> Self {
        CellSelector { org: Some(org), db: None }
    }

    pub fn cell(org: OrgToken, db: DbToken) -> Self {
        CellSelector { org: Some(org), db: Some(db) }
    }

    pub fn org_token(&self) -> Option<OrgToken> {
        self.org
    }

    pub fn db_token(&self) -> Option<DbToken> {
        self.db
    }

    pub fn matches(&self, path: &CellPath) -> bool {
        self.org.is_none_or(|o| o == path.org) && self.db.is_none_or(|d| d == path.db)
    }
}

impl fmt::Display for CellSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.org, self.db) {
            (None, _) => Ok(()),
            (Some(org), None) => write!(f, "{org}"),
            (Some(org), Some(db)) => write!(f, "{org}/{db}"),
        }
    }
}

impl FromStr for CellSelector {
    type Err = RelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        selector_parse(s)
    }
}

/// Parses `""`, `"org"` or `"org/db"`.
pub fn selector_parse(text: &str) -> Result<CellSelector, RelError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(CellSelector::all());
    }
    match text.split_once('/') {
        None => Ok(CellSelector::org(text.parse()?)),
        Some(("", _)) => Err(RelError::MalformedSelector(text.to_string())),
        Some((org, db)) => {
            let org: OrgToken = org.parse()?;
            if db.is_empty() || db.contains('/') {
                return Err(RelError::MalformedSelector(text.to_string()));
            }
            Ok(CellSelector::cell(org, db.parse()?))
        }
    }
}

/// `org/db` location of a table, both in the catalog and on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellPath {
    pub org: OrgToken,
    pub db: DbToken,
}

impl fmt::Display for CellPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.org, self.db)
    }
}

/// Whether the artifact can produce a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Emitted by a builder from upstream dumps.
    Built,
    /// Emitted by a builder, but the relation label is a placeholder not
    /// confirmed against the upstream serving system.
    Unverified,
    /// Token registered, builder not implemented.
    Stub,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: RelName,
    pub org: OrgToken,
    pub cell_path: CellPath,
    pub schema: RelationSchema,
    pub provenance: Provenance,
}

impl CatalogEntry {
    /// Listing line: `name/arity org org/db`.
    pub fn listing(&self) -> String {
        format!("{} {} {}", self.name.indicator(), self.org, self.cell_path)
    }
}

use ColumnType::{Integer as I, Symbol as S, Text as T, Weight as W};
use Provenance::{Built, Stub, Unverified};

type Row = (&'static str, &'static [(&'static str, ColumnType)], Provenance);

const REGISTRY: &[Row] = &[
    // hs
    ("map_ense_ensg_symb", &[("ensg", S), ("symb", S)], Stub),
    ("map_gont_gont_gonm", &[("gont", I), ("gonm", T)], Built),
    ("map_gont_symb_gont", &[("symb", S), ("gont", I)], Built),
    ("edge_gont_is_a", &[("gont", I), ("gont_parent", I)], Built),
    ("edge_gont_part_of", &[("gont", I), ("gont_parent", I)], Unverified),
    ("edge_gont_regulates", &[("gont", I), ("gont_target", I)], Unverified),
    ("edge_gont_positively_regulates", &[("gont", I), ("gont_target", I)], Unverified),
    ("edge_gont_negatively_regulates", &[("gont", I), ("gont_target", I)], Unverified),
    ("map_hgnc_hgnc_symb", &[("hgnc", I), ("symb", S)], Built),
    ("map_hgnc_symb_hgnc", &[("symb", S), ("hgnc", I)], Built),
    ("map_hgnc_hgnc_ensg", &[("hgnc", I), ("ensg", S)], Built),
    ("map_hgnc_hgnc_ncbi", &[("hgnc", I), ("ncbi", I)], Built),
    ("map_hgnc_hgnc_name", &[("hgnc", I), ("name", T)], Built),
    ("map_ncbi_ncbi_symb", &[("ncbi", I), ("symb", S)], Stub),
    ("map_pros_pros_unip", &[("pros", S), ("unip", S)], Stub),
    ("edge_strg_hs_symb", &[("symb_a", S), ("symb_b", S), ("weight", W)], Built),
    ("map_unip_hgnc_unip", &[("hgnc", I), ("unip", S)], Built),
    ("map_unip_unip_hgnc", &[("unip", S), ("hgnc", I)], Built),
    // mouse
    ("map_ense_mouse_ensg_symb", &[("ensg", S), ("symb", S)], Stub),
    ("map_gont_mouse_symb_gont", &[("symb", S), ("gont", I)], Built),
    ("map_mgim_mouse_mgim_symb", &[("mgim", I), ("symb", S)], Built),
    ("map_mgim_mouse_symb_mgim", &[("symb", S), ("mgim", I)], Built),
    ("map_mgim_mouse_mgim_unip", &[("mgim", I), ("unip", S)], Built),
    ("map_mgim_mouse_unip_mgim", &[("unip", S), ("mgim", I)], Built),
    ("map_ncbi_mouse_ncbi_symb", &[("ncbi", I), ("symb", S)], Stub),
    ("edge_strg_mouse_symb", &[("symb_a", S), ("symb_b", S), ("weight", W)], Built),
];

fn registry() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mut entries: Vec<CatalogEntry> = REGISTRY
            .iter()
            .map(|(text, cols, provenance)| {
                let name = parse_rel_name(text).expect("registry names parse");
                let columns = cols.iter().map(|(n, ty)| Column::new(n, *ty)).collect();
                let schema = RelationSchema::with_default_keys(name.clone(), columns)
                    .expect("registry schemas are consistent");
                CatalogEntry {
                    org: name.org(),
                    cell_path: CellPath { org: name.org(), db: name.db() },
                    name,
                    schema,
                    provenance: *provenance,
                }
            })
            .collect();
        entries.sort_by(|a, b| {
            (a.org, a.cell_path.db, a.name.to_string()).cmp(&(b.org, b.cell_path.db, b.name.to_string()))
        });
        entries
    })
}

/// Entries matching `selector`, ordered by (org, db, name).
pub fn catalog_list(selector: &CellSelector) -> Vec<&'static CatalogEntry> {
    registry().iter().filter(|e| selector.matches(&e.cell_path)).collect()
}

pub fn catalog_lookup(name: &RelName) -> Option<&'static CatalogEntry> {
    registry()
        .iter()
        .find(|e| e.name.kind() == name.kind() && e.name.to_string() == name.to_string())
}

pub fn catalog_entry(name: &RelName) -> Result<&'static CatalogEntry, RelError> {
    catalog_lookup(name).ok_or_else(|| RelError::NotInCatalog(name.to_string()))
}
