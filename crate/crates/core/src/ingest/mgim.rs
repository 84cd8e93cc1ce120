use std::collections::BTreeSet;
use std::path::Path;

use super::{column_index, emit, prefixed_int, tsv_reader, BuildContext, BuildReport, IngestError, SourceDump};
use crate::relcore::{OrgToken, Value};

/// MGI marker report (role `report`) and, optionally, the MGI to
/// UniProt report (role `uniprot`) to the mouse gene tables.
///
/// Symbols are kept verbatim: mouse nomenclature is not uniformly
/// capitalised.
pub fn build_mgim(dump: &SourceDump, out_dir: &Path, ctx: &BuildContext) -> Result<BuildReport, IngestError> {
    if dump.org != OrgToken::Mouse {
        return Err(IngestError::UnsupportedOrganism { db: dump.db, org: dump.org });
    }
    let path = dump.require("report")?;
    let mut report = BuildReport::default();
    let mut symb = BTreeSet::new();
    let mut symb_rev = BTreeSet::new();

    let mut rdr = tsv_reader(path, true)?;
    let headers = rdr.headers().map_err(|e| std::io::Error::other(e.to_string()))?.clone();
    let id_col = column_index(&headers, path, "MGI Accession ID")?;
    let symbol_col = column_index(&headers, path, "Marker Symbol")?;
    let status_col = column_index(&headers, path, "Status").ok();
    for record in rdr.records() {
        let Ok(record) = record else {
            report.malformed += 1;
            continue;
        };
        let id = record.get(id_col).and_then(|t| prefixed_int(t, "MGI:"));
        let symbol = record.get(symbol_col).map(str::trim).unwrap_or("");
        let (Some(id), false) = (id, symbol.is_empty()) else {
            report.malformed += 1;
            continue;
        };
        if status_col.and_then(|c| record.get(c)).map(str::trim) == Some("W") {
            report.excluded += 1;
            continue;
        }
        symb.insert(vec![Value::Int(id), Value::from(symbol)]);
        symb_rev.insert(vec![Value::from(symbol), Value::Int(id)]);
    }
    emit(out_dir, dump, ctx, "map_mgim_mouse_mgim_symb", symb, &mut report)?;
    emit(out_dir, dump, ctx, "map_mgim_mouse_symb_mgim", symb_rev, &mut report)?;

    if let Some(path) = dump.file("uniprot") {
        let mut unip = BTreeSet::new();
        let mut unip_rev = BTreeSet::new();
        let mut rdr = tsv_reader(path, false)?;
        for record in rdr.records() {
            let Ok(record) = record else {
                report.malformed += 1;
                continue;
            };
            let id = record.get(0).and_then(|t| prefixed_int(t, "MGI:"));
            let (Some(id), true) = (id, record.len() >= 3) else {
                report.malformed += 1;
                continue;
            };
            let accessions = record.get(record.len() - 1).unwrap_or("");
            for acc in accessions.split_whitespace() {
                unip.insert(vec![Value::Int(id), Value::from(acc)]);
                unip_rev.insert(vec![Value::from(acc), Value::Int(id)]);
            }
        }
        emit(out_dir, dump, ctx, "map_mgim_mouse_mgim_unip", unip, &mut report)?;
        emit(out_dir, dump, ctx, "map_mgim_mouse_unip_mgim", unip_rev, &mut report)?;
    }
    Ok(report)
}
