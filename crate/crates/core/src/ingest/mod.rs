//! Builders turning upstream dumps into canonical relation files, remote
//! fetching of canonical files, and population statistics.

pub mod canonical;
mod fetch;
mod gont;
mod hgnc;
mod mgim;
mod stats;
mod strg;
mod unip;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

pub use canonical::{cell_file, read_canonical, write_canonical, CanonicalFile, CanonicalReader};
pub use fetch::{fetch_remote, fetch_remote_outcome, relation_url, FetchOutcome};
pub use gont::build_gont;
pub use hgnc::build_hgnc;
pub use mgim::build_mgim;
pub use stats::{stats, stats_tsv, PopulationStat};
pub use strg::build_strg;
pub use unip::build_unip;

use crate::relcore::{catalog_entry, parse_rel_name, DbToken, OrgToken, RelError, RelName, RelationInfo, Row};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("corrupt canonical file: {0}")]
    Corrupt(String),
    #[error("declared row_count {declared} but {actual} rows present")]
    RowCountMismatch { declared: u64, actual: u64 },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("{file}: missing column {column:?}")]
    MissingColumn { file: PathBuf, column: String },
    #[error("dump lacks required role {0:?}")]
    MissingRole(String),
    #[error("bad build manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },
    #[error("no builder for {0}")]
    NotImplemented(DbToken),
    #[error("builder {db} does not support organism {org}")]
    UnsupportedOrganism { db: DbToken, org: OrgToken },
    #[error("fetching {name} failed: {reason}")]
    FetchFailed { name: String, reason: String },
    #[error("downloaded {name} failed verification: {reason}")]
    ChecksumMismatch { name: String, reason: String },
}

/// Upstream files for one database and organism.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDump {
    pub db: DbToken,
    pub org: OrgToken,
    pub files: Vec<(String, PathBuf)>,
    pub format_version: String,
    pub source_url: String,
    /// Builder-specific settings, e.g. `alias_source` for STRING.
    pub extra: Vec<(String, String)>,
}

impl SourceDump {
    pub fn new(db: DbToken, org: OrgToken) -> Self {
        SourceDump {
            db,
            org,
            files: Vec::new(),
            format_version: String::new(),
            source_url: String::new(),
            extra: Vec::new(),
        }
    }

    pub fn with_file(mut self, role: &str, path: impl Into<PathBuf>) -> Self {
        self.files.push((role.to_string(), path.into()));
        self
    }

    /// Reads a build manifest: `role<TAB>path` lines, with `#key<TAB>value`
    /// lines for `db`, `org`, `source_url`, `format_version` and builder
    /// settings. Relative paths resolve against the manifest's directory.
    pub fn from_manifest(path: &Path) -> Result<Self, IngestError> {
        let bad = |reason: String| IngestError::Manifest { path: path.to_path_buf(), reason };
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let (mut db, mut org) = (None, None);
        let mut dump = SourceDump::new(DbToken::Hgnc, OrgToken::Hs);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| bad(format!("line {} lacks a tab", i + 1)))?;
            match key.strip_prefix('#') {
                Some("db") => db = Some(value.parse::<DbToken>()?),
                Some("org") => org = Some(value.parse::<OrgToken>()?),
                Some("source_url") => dump.source_url = value.to_string(),
                Some("format_version") => dump.format_version = value.to_string(),
                Some(other) => dump.extra.push((other.to_string(), value.to_string())),
                None => dump.files.push((key.to_string(), base.join(value))),
            }
        }
        dump.db = db.ok_or_else(|| bad("no #db line".into()))?;
        dump.org = org.ok_or_else(|| bad("no #org line".into()))?;
        Ok(dump)
    }

    pub fn file(&self, role: &str) -> Option<&Path> {
        self.files.iter().find(|(r, _)| r == role).map(|(_, p)| p.as_path())
    }

    pub fn require(&self, role: &str) -> Result<&Path, IngestError> {
        self.file(role).ok_or_else(|| IngestError::MissingRole(role.to_string()))
    }

    pub fn setting(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildContext {
    /// Written to the `build_date` header entry.
    pub build_date: String,
}

impl BuildContext {
    pub fn new(build_date: impl Into<String>) -> Self {
        BuildContext { build_date: build_date.into() }
    }
}

/// Outcome of one builder run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub files: Vec<PathBuf>,
    pub relations: Vec<(RelName, usize)>,
    /// Unparseable upstream rows, skipped.
    pub malformed: usize,
    /// Rows excluded on purpose (withdrawn entries, negated annotations).
    pub excluded: usize,
    /// Rows whose identifiers could not be mapped.
    pub dropped: usize,
}

impl BuildReport {
    pub fn rows_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().find(|(n, _)| n.to_string() == name).map(|(_, c)| *c)
    }

    fn log_summary(&self, dump: &SourceDump) {
        log::info!(
            "built {}/{}: {} relations, {} malformed, {} excluded, {} dropped",
            dump.org,
            dump.db,
            self.relations.len(),
            self.malformed,
            self.excluded,
            self.dropped
        );
    }
}

/// Writes one relation of a dump into `out_dir` at its cell path.
pub(crate) fn emit(
    out_dir: &Path,
    dump: &SourceDump,
    ctx: &BuildContext,
    name: &str,
    rows: BTreeSet<Row>,
    report: &mut BuildReport,
) -> Result<(), IngestError> {
    let name = parse_rel_name(name)?;
    let entry = catalog_entry(&name)?;
    let mut info = RelationInfo::new();
    info.set(RelationInfo::ROW_COUNT, rows.len().to_string());
    info.set(RelationInfo::SOURCE_DB, dump.db.as_str());
    info.set(RelationInfo::ORGANISM, name.org().as_str());
    info.set(RelationInfo::SOURCE_URL, dump.source_url.clone());
    info.set(RelationInfo::BUILD_DATE, ctx.build_date.clone());
    if !dump.format_version.is_empty() {
        info.set("format_version", dump.format_version.clone());
    }
    let rows: Vec<Row> = rows.into_iter().collect();
    let path = cell_file(out_dir, &name);
    write_canonical(&path, &entry.schema, &info, &rows)?;
    report.files.push(path);
    report.relations.push((name, rows.len()));
    Ok(())
}

/// Dispatches on the dump's database token.
pub fn build(dump: &SourceDump, out_dir: &Path, ctx: &BuildContext) -> Result<BuildReport, IngestError> {
    let report = match dump.db {
        DbToken::Hgnc => build_hgnc(dump, out_dir, ctx)?,
        DbToken::Mgim => build_mgim(dump, out_dir, ctx)?,
        DbToken::Unip => build_unip(dump, out_dir, ctx)?,
        DbToken::Gont => build_gont(dump, out_dir, ctx)?,
        DbToken::Strg => build_strg(dump, dump.org, out_dir, ctx)?,
        db @ (DbToken::Ense | DbToken::Ncbi | DbToken::Pros) => return Err(IngestError::NotImplemented(db)),
    };
    report.log_summary(dump);
    Ok(report)
}

/// Builds every `manifest.tsv` found below `dumps_root` into `out_dir`.
pub fn build_tree(dumps_root: &Path, out_dir: &Path, ctx: &BuildContext) -> Result<Vec<BuildReport>, IngestError> {
    let mut manifests = Vec::new();
    collect_manifests(dumps_root, &mut manifests)?;
    manifests.sort();
    manifests
        .iter()
        .map(|m| build(&SourceDump::from_manifest(m)?, out_dir, ctx))
        .collect()
}

fn collect_manifests(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), IngestError> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_manifests(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "manifest.tsv") {
            out.push(path);
        }
    }
    Ok(())
}

/// Tab-separated reader over an upstream file; quoting disabled.
pub(crate) fn tsv_reader(path: &Path, headers: bool) -> Result<csv::Reader<fs::File>, IngestError> {
    Ok(csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .has_headers(headers)
        .comment(None)
        .from_path(path)
        .map_err(|e| std::io::Error::other(e.to_string()))?)
}

pub(crate) fn column_index(
    headers: &csv::StringRecord,
    path: &Path,
    column: &str,
) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| IngestError::MissingColumn { file: path.to_path_buf(), column: column.to_string() })
}

/// Numeric part of a prefixed accession: `HGNC:19295` and `MGI:3039582`
/// give 19295 and 3039582.
pub(crate) fn prefixed_int(text: &str, prefix: &str) -> Option<i64> {
    text.trim().strip_prefix(prefix).unwrap_or(text.trim()).parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("manifest.tsv");
        fs::write(
            &m,
            "#db\tstrg\n#org\tmouse\n#source_url\thttps://example.org/x\n#alias_source\tEnsembl_MGI\nlinks\tl.txt\naliases\t/abs/a.txt\n",
        )
        .unwrap();
        let dump = SourceDump::from_manifest(&m).unwrap();
        assert_eq!(dump.db, DbToken::Strg);
        assert_eq!(dump.org, OrgToken::Mouse);
        assert_eq!(dump.file("links").unwrap(), dir.path().join("l.txt"));
        assert_eq!(dump.file("aliases").unwrap(), Path::new("/abs/a.txt"));
        assert_eq!(dump.setting("alias_source"), Some("Ensembl_MGI"));
        assert!(matches!(dump.require("nope"), Err(IngestError::MissingRole(_))));

        fs::write(&m, "#org\ths\nx\ty\n").unwrap();
        assert!(matches!(SourceDump::from_manifest(&m), Err(IngestError::Manifest { .. })));
    }

    #[test]
    fn stub_builders() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = BuildContext::new("2019-07-01");
        for db in [DbToken::Ense, DbToken::Ncbi, DbToken::Pros] {
            let dump = SourceDump::new(db, OrgToken::Hs);
            assert!(matches!(build(&dump, dir.path(), &ctx), Err(IngestError::NotImplemented(d)) if d == db));
        }
    }

    #[test]
    fn prefixed_ints() {
        assert_eq!(prefixed_int("HGNC:19295", "HGNC:"), Some(19295));
        assert_eq!(prefixed_int("MGI:3039582", "MGI:"), Some(3039582));
        assert_eq!(prefixed_int("HGNC:abc", "HGNC:"), None);
    }
}
