use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use super::{emit, BuildContext, BuildReport, IngestError, SourceDump};
use crate::relcore::{ColumnType, OrgToken, Value};

/// STRING protein links (role `links`) mapped to gene symbols through the
/// alias file (role `aliases`).
///
/// Each undirected pair is stored once with the lexicographically smaller
/// symbol first. Protein pairs collapsing onto the same symbol pair keep the
/// highest score; pairs collapsing onto a single symbol are dropped. The
/// optional `alias_source` setting restricts which alias sources count
/// (comma separated); the first accepted alias of a protein wins.
pub fn build_strg(
    dump: &SourceDump,
    org: OrgToken,
    out_dir: &Path,
    ctx: &BuildContext,
) -> Result<BuildReport, IngestError> {
    let links = dump.require("links")?;
    let aliases = dump.require("aliases")?;
    let accepted: Option<BTreeSet<&str>> = dump.setting("alias_source").map(|s| s.split(',').map(str::trim).collect());
    let mut report = BuildReport::default();

    let mut symbol_of: HashMap<String, String> = HashMap::new();
    for line in fs::read_to_string(aliases)?.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            report.malformed += 1;
            continue;
        }
        let source = fields.get(2).copied().unwrap_or("");
        if accepted.as_ref().is_some_and(|a| !a.contains(source)) {
            continue;
        }
        symbol_of.entry(fields[0].to_string()).or_insert_with(|| fields[1].to_string());
    }

    let mut best: BTreeMap<(String, String), i64> = BTreeMap::new();
    for (i, line) in fs::read_to_string(links)?.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() || (i == 0 && fields[0] == "protein1") {
            continue;
        }
        if fields.len() < 3 {
            report.malformed += 1;
            continue;
        }
        let score = match fields[2].parse::<i64>() {
            Ok(s) if (ColumnType::MIN_WEIGHT..=ColumnType::MAX_WEIGHT).contains(&s) => s,
            _ => {
                log::warn!("{}: line {}: malformed score {:?}", links.display(), i + 1, fields[2]);
                report.malformed += 1;
                continue;
            }
        };
        let (Some(a), Some(b)) = (symbol_of.get(fields[0]), symbol_of.get(fields[1])) else {
            log::debug!("{}: line {}: no alias for an endpoint", links.display(), i + 1);
            report.dropped += 1;
            continue;
        };
        if a == b {
            report.excluded += 1;
            continue;
        }
        let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let w = best.entry(key).or_insert(score);
        *w = (*w).max(score);
    }
    if report.dropped > 0 {
        log::info!("{}: dropped {} links with unmappable endpoints", links.display(), report.dropped);
    }
    let rows = best
        .into_iter()
        .map(|((a, b), w)| vec![Value::Str(a), Value::Str(b), Value::Int(w)])
        .collect();
    emit(out_dir, dump, ctx, &format!("edge_strg_{org}_symb"), rows, &mut report)?;
    Ok(report)
}
