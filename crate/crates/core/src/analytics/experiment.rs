use std::fmt;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use super::AnalyticsError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdKind {
    #[default]
    ProteinAccession,
    GeneSymbol,
}

impl IdKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IdKind::ProteinAccession => "protein",
            IdKind::GeneSymbol => "symbol",
        }
    }
}

impl FromStr for IdKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "protein" => Ok(IdKind::ProteinAccession),
            "symbol" => Ok(IdKind::GeneSymbol),
            _ => Err(format!("unknown id kind {s:?} (protein, symbol)")),
        }
    }
}

impl fmt::Display for IdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Header names of the id, fold change and p-value columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub id_col: String,
    pub fc_col: String,
    pub pval_col: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec { id_col: "Protein".into(), fc_col: "log2FC".into(), pval_col: "p.value".into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpRow<F> {
    pub id: String,
    pub log2fc: F,
    pub pvalue: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment<F> {
    pub rows: Vec<ExpRow<F>>,
    pub id_kind: IdKind,
    /// Data rows dropped for an empty id or unusable numbers.
    pub skipped: usize,
}

fn number<F: Scalar>(text: &str) -> Option<F> {
    let x: F = text.trim().parse().ok()?;
    x.is_finite().then_some(x)
}

/// Reads a differential expression CSV. Rows whose id is empty, whose
/// numbers do not parse, or whose p-value lies outside [0, 1] are skipped
/// and counted.
pub fn load_experiment<F: Scalar>(path: &Path, spec: &ColumnSpec, id_kind: IdKind) -> Result<Experiment<F>, AnalyticsError> {
    let file = File::open(path).map_err(|e| AnalyticsError::Io { path: path.to_path_buf(), source: e })?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let csv_err = |e: csv::Error| AnalyticsError::Csv { path: path.to_path_buf(), message: e.to_string() };
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(AnalyticsError::EmptyFile(path.to_path_buf()));
    }
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| AnalyticsError::MissingColumn { path: path.to_path_buf(), column: name.to_string() })
    };
    let (ic, fc, pc) = (column(&spec.id_col)?, column(&spec.fc_col)?, column(&spec.pval_col)?);

    let mut exp = Experiment { rows: Vec::new(), id_kind, skipped: 0 };
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let id = record.get(ic).map(str::trim).unwrap_or("");
        let log2fc = record.get(fc).and_then(number::<F>);
        let pvalue = record.get(pc).and_then(number::<F>).filter(|p| *p >= F::zero() && *p <= F::one());
        match (id.is_empty(), log2fc, pvalue) {
            (false, Some(log2fc), Some(pvalue)) => exp.rows.push(ExpRow { id: id.to_string(), log2fc, pvalue }),
            _ => exp.skipped += 1,
        }
    }
    if exp.skipped > 0 {
        log::info!("{}: skipped {} unusable rows", path.display(), exp.skipped);
    }
    Ok(exp)
}
