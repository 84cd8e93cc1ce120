use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use super::{column_index, emit, prefixed_int, tsv_reader, BuildContext, BuildReport, IngestError, SourceDump};
use crate::relcore::{Row, Value};

/// HGNC complete-set TSV to the human gene identifier tables.
///
/// Emits `map_hgnc_hgnc_symb` and `map_hgnc_symb_hgnc`, plus the Ensembl,
/// NCBI and name tables when the corresponding columns exist. Withdrawn
/// entries are excluded.
pub fn build_hgnc(dump: &SourceDump, out_dir: &Path, ctx: &BuildContext) -> Result<BuildReport, IngestError> {
    let path = dump.require("complete_set")?;
    let mut report = BuildReport::default();
    let mut symb = BTreeSet::new();
    let mut symb_rev = BTreeSet::new();
    let mut ensg = BTreeSet::new();
    let mut ncbi = BTreeSet::new();
    let mut names = BTreeSet::new();
    let mut optional = (false, false, false);

    if fs::metadata(path)?.len() > 0 {
        let mut rdr = tsv_reader(path, true)?;
        let headers = rdr.headers().map_err(|e| std::io::Error::other(e.to_string()))?.clone();
        let id_col = column_index(&headers, path, "hgnc_id")?;
        let symbol_col = column_index(&headers, path, "symbol")?;
        let status_col = column_index(&headers, path, "status").ok();
        let name_col = column_index(&headers, path, "name").ok();
        let ncbi_col = column_index(&headers, path, "entrez_id").ok();
        let ensg_col = column_index(&headers, path, "ensembl_gene_id").ok();
        optional = (ensg_col.is_some(), ncbi_col.is_some(), name_col.is_some());

        for (i, record) in rdr.records().enumerate() {
            let Ok(record) = record else {
                report.malformed += 1;
                continue;
            };
            let field = |col: Option<usize>| col.and_then(|c| record.get(c)).map(str::trim).unwrap_or("");
            let id = field(Some(id_col));
            let symbol = field(Some(symbol_col));
            let Some(hgnc) = prefixed_int(id, "HGNC:") else {
                log::warn!("{}: row {}: unparseable HGNC id {id:?}", path.display(), i + 2);
                report.malformed += 1;
                continue;
            };
            if symbol.is_empty() {
                report.malformed += 1;
                continue;
            }
            if field(status_col).to_ascii_lowercase().contains("withdrawn") {
                report.excluded += 1;
                continue;
            }
            symb.insert(vec![Value::Int(hgnc), Value::from(symbol)]);
            symb_rev.insert(vec![Value::from(symbol), Value::Int(hgnc)]);
            let e = field(ensg_col);
            if !e.is_empty() {
                ensg.insert(vec![Value::Int(hgnc), Value::from(e)]);
            }
            if let Ok(n) = field(ncbi_col).parse::<i64>() {
                ncbi.insert(vec![Value::Int(hgnc), Value::Int(n)]);
            }
            if name_col.is_some() {
                names.insert(vec![Value::Int(hgnc), Value::from(field(name_col))]);
            }
        }
    }
    if report.excluded > 0 {
        log::info!("{}: excluded {} withdrawn entries", path.display(), report.excluded);
    }

    emit(out_dir, dump, ctx, "map_hgnc_hgnc_symb", symb, &mut report)?;
    emit(out_dir, dump, ctx, "map_hgnc_symb_hgnc", symb_rev, &mut report)?;
    let extra: [(bool, &str, BTreeSet<Row>); 3] = [
        (optional.0, "map_hgnc_hgnc_ensg", ensg),
        (optional.1, "map_hgnc_hgnc_ncbi", ncbi),
        (optional.2, "map_hgnc_hgnc_name", names),
    ];
    for (present, name, rows) in extra {
        if present {
            emit(out_dir, dump, ctx, name, rows, &mut report)?;
        }
    }
    Ok(report)
}
