use std::collections::BTreeSet;
use std::path::Path;

use super::{emit, prefixed_int, tsv_reader, BuildContext, BuildReport, IngestError, SourceDump};
use crate::relcore::{OrgToken, Value};

/// UniProt id-mapping slice (`accession<TAB>id_type<TAB>id`) to the
/// gene/protein tables in both directions. Reviewed and unreviewed
/// accessions are kept alike.
pub fn build_unip(dump: &SourceDump, out_dir: &Path, ctx: &BuildContext) -> Result<BuildReport, IngestError> {
    if dump.org != OrgToken::Hs {
        return Err(IngestError::UnsupportedOrganism { db: dump.db, org: dump.org });
    }
    let path = dump.require("idmapping")?;
    let mut report = BuildReport::default();
    let mut by_gene = BTreeSet::new();
    let mut by_protein = BTreeSet::new();
    let mut rdr = tsv_reader(path, false)?;
    for (i, record) in rdr.records().enumerate() {
        let Ok(record) = record else {
            report.malformed += 1;
            continue;
        };
        if record.len() < 3 {
            if i == 0 {
                return Err(IngestError::MissingColumn { file: path.to_path_buf(), column: "id".into() });
            }
            report.malformed += 1;
            continue;
        }
        if record[1].trim() != "HGNC" {
            continue;
        }
        let acc = record[0].trim();
        match prefixed_int(&record[2], "HGNC:") {
            Some(hgnc) if !acc.is_empty() => {
                by_gene.insert(vec![Value::Int(hgnc), Value::from(acc)]);
                by_protein.insert(vec![Value::from(acc), Value::Int(hgnc)]);
            }
            _ => report.malformed += 1,
        }
    }
    emit(out_dir, dump, ctx, "map_unip_hgnc_unip", by_gene, &mut report)?;
    emit(out_dir, dump, ctx, "map_unip_unip_hgnc", by_protein, &mut report)?;
    Ok(report)
}
