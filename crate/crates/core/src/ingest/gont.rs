use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{emit, BuildContext, BuildReport, IngestError, SourceDump};
use crate::relcore::{catalog_lookup, parse_go_id, parse_rel_name, OrgToken, Row, Value};

#[derive(Debug, Default)]
struct Stanza {
    id: Option<String>,
    name: Option<String>,
    obsolete: bool,
    /// (label, target id text)
    links: Vec<(String, String)>,
}

/// Minimal OBO reader: `[Term]` stanzas with `id`, `name`, `is_a`,
/// `relationship` and `is_obsolete` tags.
fn read_obo(text: &str) -> Vec<Stanza> {
    let mut out = Vec::new();
    let mut current: Option<Stanza> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') {
            out.extend(current.take());
            if line == "[Term]" {
                current = Some(Stanza::default());
            }
            continue;
        }
        let Some(stanza) = current.as_mut() else { continue };
        let Some((tag, value)) = line.split_once(':') else { continue };
        let value = value.split(" ! ").next().unwrap_or("").trim();
        match tag.trim() {
            "id" => stanza.id = Some(value.to_string()),
            "name" => stanza.name = Some(value.to_string()),
            "is_obsolete" => stanza.obsolete = value == "true",
            "is_a" => {
                let target = value.split_whitespace().next().unwrap_or("");
                stanza.links.push(("is_a".into(), target.to_string()));
            }
            "relationship" => {
                let mut parts = value.split_whitespace();
                if let (Some(label), Some(target)) = (parts.next(), parts.next()) {
                    stanza.links.push((label.to_string(), target.to_string()));
                }
            }
            _ => {}
        }
    }
    out.extend(current);
    out
}

/// Gene Ontology terms (role `obo`) and gene annotations (role `gaf`).
///
/// The ontology relations (term names, `edge_gont_is_a` and any other
/// registered relation label present in the dump) belong to the human cell;
/// annotations go to the dump organism's symbol-to-term table. Annotations
/// with a `NOT` qualifier are excluded.
pub fn build_gont(dump: &SourceDump, out_dir: &Path, ctx: &BuildContext) -> Result<BuildReport, IngestError> {
    let obo = dump.file("obo");
    let gaf = dump.file("gaf");
    if obo.is_none() && gaf.is_none() {
        return Err(IngestError::MissingRole("obo or gaf".into()));
    }
    let mut report = BuildReport::default();

    if let Some(path) = obo {
        let mut names = BTreeSet::new();
        let mut edges: BTreeMap<String, BTreeSet<Row>> = BTreeMap::new();
        edges.insert("is_a".into(), BTreeSet::new());
        for stanza in read_obo(&fs::read_to_string(path)?) {
            let Some(Ok(id)) = stanza.id.as_deref().map(parse_go_id) else {
                log::warn!("{}: term with malformed id {:?}", path.display(), stanza.id);
                report.malformed += 1;
                continue;
            };
            if stanza.obsolete {
                report.excluded += 1;
                continue;
            }
            if let Some(name) = stanza.name {
                names.insert(vec![Value::Int(id), Value::Str(name)]);
            }
            for (label, target) in stanza.links {
                let relation = format!("edge_gont_{label}");
                let registered = parse_rel_name(&relation).ok().and_then(|r| catalog_lookup(&r)).is_some();
                if !registered {
                    continue;
                }
                match parse_go_id(&target) {
                    Ok(parent) => {
                        edges.entry(label).or_default().insert(vec![Value::Int(id), Value::Int(parent)]);
                    }
                    Err(_) => report.malformed += 1,
                }
            }
        }
        let ontology = SourceDump { org: OrgToken::Hs, ..dump.clone() };
        emit(out_dir, &ontology, ctx, "map_gont_gont_gonm", names, &mut report)?;
        for (label, rows) in edges {
            emit(out_dir, &ontology, ctx, &format!("edge_gont_{label}"), rows, &mut report)?;
        }
    }

    if let Some(path) = gaf {
        let mut members = BTreeSet::new();
        for line in fs::read_to_string(path)?.lines() {
            if line.starts_with('!') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 5 || fields[2].trim().is_empty() {
                report.malformed += 1;
                continue;
            }
            if fields[3].split('|').any(|q| q == "NOT") {
                report.excluded += 1;
                continue;
            }
            match parse_go_id(fields[4]) {
                Ok(term) => {
                    members.insert(vec![Value::from(fields[2].trim()), Value::Int(term)]);
                }
                Err(e) => {
                    log::warn!("{}: {e}", path.display());
                    report.malformed += 1;
                }
            }
        }
        let relation = match dump.org {
            OrgToken::Hs => "map_gont_symb_gont",
            OrgToken::Mouse => "map_gont_mouse_symb_gont",
        };
        emit(out_dir, dump, ctx, relation, members, &mut report)?;
    }
    Ok(report)
}
