use std::fmt;

use super::{RelError, RelKind, RelName};

/// Column type of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Integer,
    /// Atom-like identifier text.
    Symbol,
    /// Interaction confidence, an integer strictly between 0 and 1000.
    Weight,
    Text,
}

impl ColumnType {
    pub const MIN_WEIGHT: i64 = 1;
    pub const MAX_WEIGHT: i64 = 999;

    pub fn as_str(self) -> &'static str {
        match self {
            ColumnType::Integer => "integer",
            ColumnType::Symbol => "symbol",
            ColumnType::Weight => "weight",
            ColumnType::Text => "text",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "integer" => ColumnType::Integer,
            "symbol" => ColumnType::Symbol,
            "weight" => ColumnType::Weight,
            "text" => ColumnType::Text,
            _ => return None,
        })
    }

    pub fn is_integral(self) -> bool {
        matches!(self, ColumnType::Integer | ColumnType::Weight)
    }

    /// True when `value` is a legal cell of this column.
    pub fn admits(self, value: &Value) -> bool {
        match (self, value) {
            (ColumnType::Integer, Value::Int(_)) => true,
            (ColumnType::Weight, Value::Int(w)) => (Self::MIN_WEIGHT..=Self::MAX_WEIGHT).contains(w),
            (ColumnType::Symbol, Value::Str(s)) => !s.is_empty(),
            (ColumnType::Text, Value::Str(_)) => true,
            _ => false,
        }
    }

    /// Parses a textual cell (as found in canonical files or on a command line).
    pub fn parse_value(self, text: &str) -> Result<Value, RelError> {
        let value = if self.is_integral() {
            text.trim()
                .parse::<i64>()
                .map(Value::Int)
                .map_err(|_| RelError::BadValue { ty: self, text: text.to_string() })?
        } else {
            Value::Str(text.to_string())
        };
        if self.admits(&value) {
            Ok(value)
        } else {
            Err(RelError::BadValue { ty: self, text: text.to_string() })
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

pub type Row = Vec<Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

impl Column {
    pub fn new(name: &str, ty: ColumnType) -> Self {
        Column { name: name.to_string(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSchema {
    name: RelName,
    columns: Vec<Column>,
    key_columns: Vec<usize>,
}

impl RelationSchema {
    pub fn new(name: RelName, columns: Vec<Column>, key_columns: Vec<usize>) -> Result<Self, RelError> {
        if columns.len() != name.arity() {
            return Err(RelError::Schema(format!(
                "{} declares arity {} but has {} columns",
                name,
                name.arity(),
                columns.len()
            )));
        }
        if key_columns.is_empty() || key_columns.iter().any(|&k| k >= columns.len()) {
            return Err(RelError::Schema(format!("{name}: bad key columns {key_columns:?}")));
        }
        Ok(RelationSchema { name, columns, key_columns })
    }

    /// Default keys: first column for maps, both node columns for edges.
    pub fn with_default_keys(name: RelName, columns: Vec<Column>) -> Result<Self, RelError> {
        let keys = match name.kind() {
            RelKind::Map => vec![0],
            RelKind::Edge => vec![0, 1],
        };
        Self::new(name, columns, keys)
    }

    pub fn name(&self) -> &RelName {
        &self.name
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_types(&self) -> Vec<ColumnType> {
        self.columns.iter().map(|c| c.ty).collect()
    }

    pub fn key_columns(&self) -> &[usize] {
        &self.key_columns
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Two-column maps are indexed in both directions.
    pub fn is_binary_map(&self) -> bool {
        self.name.kind() == RelKind::Map && self.columns.len() == 2
    }

    pub fn check_row(&self, row: &[Value]) -> Result<(), RelError> {
        if row.len() != self.columns.len() {
            return Err(RelError::Schema(format!(
                "{}: row has {} cells, expected {}",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        for (cell, col) in row.iter().zip(&self.columns) {
            if !col.ty.admits(cell) {
                return Err(RelError::BadValue { ty: col.ty, text: cell.to_string() });
            }
        }
        Ok(())
    }

    /// `name:type,name:type` as written in canonical headers.
    pub fn columns_spec(&self) -> String {
        self.columns
            .iter()
            .map(|c| format!("{}:{}", c.name, c.ty))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_columns_spec(spec: &str) -> Result<Vec<Column>, RelError> {
        spec.split(',')
            .map(|part| {
                let (name, ty) = part
                    .split_once(':')
                    .ok_or_else(|| RelError::Schema(format!("bad column spec {part:?}")))?;
                let ty = ColumnType::from_name(ty)
                    .ok_or_else(|| RelError::Schema(format!("unknown column type {ty:?}")))?;
                Ok(Column::new(name, ty))
            })
            .collect()
    }
}

/// Metadata sidecar of a table. Keys are unique; insertion order is kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationInfo {
    entries: Vec<(String, String)>,
}

impl RelationInfo {
    pub const ROW_COUNT: &'static str = "row_count";
    pub const SOURCE_DB: &'static str = "source_db";
    pub const ORGANISM: &'static str = "organism";
    pub const SOURCE_URL: &'static str = "source_url";
    pub const BUILD_DATE: &'static str = "build_date";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn row_count(&self) -> Option<u64> {
        self.get(Self::ROW_COUNT).and_then(|v| v.parse().ok())
    }
}

/// Renders an integer GO id as `GO:0000139`.
pub fn format_go_id(id: i64) -> String {
    format!("GO:{id:07}")
}

/// Accepts `GO:0000139`, `0000139` or `139`.
pub fn parse_go_id(text: &str) -> Result<i64, RelError> {
    let digits = text.trim().strip_prefix("GO:").unwrap_or(text.trim());
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RelError::MalformedTermId(text.to_string()));
    }
    digits.parse().map_err(|_| RelError::MalformedTermId(text.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::parse_rel_name;

    #[test]
    fn weight_bounds() {
        assert!(ColumnType::Weight.admits(&Value::Int(1)));
        assert!(ColumnType::Weight.admits(&Value::Int(999)));
        assert!(!ColumnType::Weight.admits(&Value::Int(0)));
        assert!(!ColumnType::Weight.admits(&Value::Int(1000)));
        assert!(ColumnType::Weight.parse_value("1000").is_err());
    }

    #[test]
    fn value_parsing() {
        assert_eq!(ColumnType::Integer.parse_value("19295").unwrap(), Value::Int(19295));
        assert!(ColumnType::Integer.parse_value("LMTK3").is_err());
        assert_eq!(ColumnType::Symbol.parse_value("LMTK3").unwrap(), Value::from("LMTK3"));
        assert!(ColumnType::Symbol.parse_value("").is_err());
        assert_eq!(ColumnType::Text.parse_value("").unwrap(), Value::from(""));
    }

    #[test]
    fn schema_arity_must_match() {
        let name = parse_rel_name("map_hgnc_hgnc_symb").unwrap();
        let cols = vec![Column::new("hgnc", ColumnType::Integer)];
        assert!(RelationSchema::with_default_keys(name.clone(), cols).is_err());
        let cols = vec![Column::new("hgnc", ColumnType::Integer), Column::new("symb", ColumnType::Symbol)];
        let schema = RelationSchema::with_default_keys(name.clone(), cols.clone()).unwrap();
        assert_eq!(schema.columns_spec(), "hgnc:integer,symb:symbol");
        assert_eq!(RelationSchema::parse_columns_spec(&schema.columns_spec()).unwrap(), cols);
        assert!(RelationSchema::new(name, cols, vec![]).is_err());
    }

    #[test]
    fn info_entries() {
        let mut info = RelationInfo::new();
        info.set(RelationInfo::ROW_COUNT, "5");
        info.set(RelationInfo::SOURCE_DB, "hgnc");
        info.set(RelationInfo::ROW_COUNT, "7");
        assert_eq!(info.row_count(), Some(7));
        assert_eq!(info.entries().len(), 2);
    }

    #[test]
    fn go_ids() {
        assert_eq!(format_go_id(139), "GO:0000139");
        assert_eq!(parse_go_id("GO:0000139").unwrap(), 139);
        assert_eq!(parse_go_id("139").unwrap(), 139);
        assert!(parse_go_id("GO:BROKEN").is_err());
        assert!(parse_go_id("GO:").is_err());
    }
}
