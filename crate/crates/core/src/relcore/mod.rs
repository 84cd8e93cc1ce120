//! Relation identities, naming convention, catalog and schema types.

mod catalog;
mod name;
mod schema;

pub use catalog::{
    catalog_entry, catalog_list, catalog_lookup, selector_parse, CatalogEntry, CellPath, CellSelector,
    Provenance,
};
pub use name::{format_rel_name, parse_rel_name, DbToken, NameStyle, OrgToken, RelKind, RelName};
pub use schema::{
    format_go_id, parse_go_id, Column, ColumnType, RelationInfo, RelationSchema, Row, Value,
};

#[derive(Debug, thiserror::Error)]
pub enum RelError {
    #[error("malformed relation name: {0}")]
    MalformedName(String),
    #[error("unknown database token {0:?}")]
    UnknownDbToken(String),
    #[error("unknown organism token {0:?}")]
    UnknownOrgToken(String),
    #[error("malformed selector {0:?}: expected \"\", \"org\" or \"org/db\"")]
    MalformedSelector(String),
    #[error("relation {0} is not in the catalog")]
    NotInCatalog(String),
    #[error("value {text:?} is not a valid {ty}")]
    BadValue { ty: ColumnType, text: String },
    #[error("malformed GO term id {0:?}")]
    MalformedTermId(String),
    #[error("schema error: {0}")]
    Schema(String),
}
