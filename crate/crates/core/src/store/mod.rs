//! Backend-agnostic relation store with lazy table acquisition.
//!
//! A table is a stub until first used. [`Store::ensure_table`] locates its
//! canonical file in the data directory, fetches it from the repository
//! when allowed, imports it into the configured backend and registers a
//! handle; every later call returns that handle.

mod bench;
pub mod keycodec;
mod kv;
mod memory;
mod prompt;
mod sql;

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub use bench::{bench_backends, synthetic_map, BenchReport, BenchRow, Workload};
pub use prompt::{NoPrompt, Prompter, TtyPrompter};

use crate::ingest::{self, CanonicalReader, IngestError};
use crate::relcore::{catalog_entry, ColumnType, RelError, RelName, RelationInfo, RelationSchema, Row, Value};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("data directory {path} unavailable: {source}")]
    DataDirUnavailable { path: PathBuf, source: std::io::Error },
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("{0} is not cached and the fetch policy is never")]
    TableMissingAndFetchForbidden(String),
    #[error("download of {0} declined")]
    UserDeclined(String),
    #[error(transparent)]
    FetchFailed(IngestError),
    #[error("import of {name} failed: {source}")]
    ImportFailed { name: String, source: Box<StoreError> },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("corrupt canonical file: {0}")]
    CorruptFile(String),
    #[error("pattern has {got} positions but {name} has arity {expected}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("column {column} of {name} is {expected} but bound to {value:?}")]
    TypeMismatch { name: String, column: usize, expected: ColumnType, value: Value },
    #[error("{0} is already registered")]
    AlreadyRegistered(String),
    #[error("store is read-only")]
    ReadOnly,
}

impl From<IngestError> for StoreError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::SchemaMismatch(s) => StoreError::SchemaMismatch(s),
            IngestError::Rel(r) => StoreError::Rel(r),
            other => StoreError::CorruptFile(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackendKind {
    Memory,
    Kv,
    Sql,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Memory, BackendKind::Kv, BackendKind::Sql];

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Memory => "memory",
            BackendKind::Kv => "kv",
            BackendKind::Sql => "sql",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BackendKind::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown backend {s:?} (memory, kv, sql)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FetchPolicy {
    Auto,
    Prompt,
    Never,
}

impl FetchPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FetchPolicy::Auto => "auto",
            FetchPolicy::Prompt => "prompt",
            FetchPolicy::Never => "never",
        }
    }
}

impl fmt::Display for FetchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FetchPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(FetchPolicy::Auto),
            "prompt" => Ok(FetchPolicy::Prompt),
            "never" => Ok(FetchPolicy::Never),
            _ => Err(format!("unknown fetch policy {s:?} (auto, prompt, never)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreConfig {
    pub backend: BackendKind,
    pub data_dir: PathBuf,
    pub repo_url: String,
    pub fetch_policy: FetchPolicy,
    /// Open persistent backends without taking the writer lock; only
    /// tables already imported by a writer are served.
    pub read_only: bool,
}

impl StoreConfig {
    pub fn new(backend: BackendKind, data_dir: impl Into<PathBuf>) -> Self {
        StoreConfig {
            backend,
            data_dir: data_dir.into(),
            repo_url: DEFAULT_REPO_URL.to_string(),
            fetch_policy: FetchPolicy::Never,
            read_only: false,
        }
    }

    pub fn with_repo(mut self, url: impl Into<String>, policy: FetchPolicy) -> Self {
        self.repo_url = url.into();
        self.fetch_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        let scheme_ok = ["http://", "https://", "file://"].iter().any(|s| self.repo_url.starts_with(s));
        if self.fetch_policy != FetchPolicy::Never && !scheme_ok {
            return Err(StoreError::BackendUnavailable(format!("malformed repository URL {:?}", self.repo_url)));
        }
        Ok(())
    }

    /// Directory holding persistent backend files.
    pub fn backend_dir(&self) -> PathBuf {
        self.data_dir.join(".biorel")
    }
}

pub const DEFAULT_REPO_URL: &str = "http://stoics.org.uk/~nicos/sware/packs/bio_db_repo/data";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    LocalCache,
    RemoteFetch,
    Fixture,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::LocalCache => "local_cache",
            Origin::RemoteFetch => "remote_fetch",
            Origin::Fixture => "fixture",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableHandle {
    pub name: RelName,
    pub backend: BackendKind,
    pub info: RelationInfo,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Bound(Value),
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPattern(pub Vec<Binding>);

impl QueryPattern {
    pub fn free(arity: usize) -> Self {
        QueryPattern(vec![Binding::Free; arity])
    }

    pub fn bind(mut self, column: usize, value: impl Into<Value>) -> Self {
        self.0[column] = Binding::Bound(value.into());
        self
    }

    /// Parses per-column arguments: `?` is free, anything else a literal of
    /// the column's type.
    pub fn parse_args(schema: &RelationSchema, args: &[&str]) -> Result<Self, StoreError> {
        if args.len() != schema.arity() {
            return Err(StoreError::ArityMismatch {
                name: schema.name().to_string(),
                expected: schema.arity(),
                got: args.len(),
            });
        }
        args.iter()
            .zip(schema.columns())
            .map(|(a, col)| match *a {
                "?" => Ok(Binding::Free),
                text => Ok(Binding::Bound(col.ty.parse_value(text)?)),
            })
            .collect::<Result<Vec<_>, StoreError>>()
            .map(QueryPattern)
    }

    pub fn bound(&self, column: usize) -> Option<&Value> {
        match self.0.get(column) {
            Some(Binding::Bound(v)) => Some(v),
            _ => None,
        }
    }

    pub fn matches(&self, row: &[Value]) -> bool {
        self.0.iter().zip(row).all(|(b, v)| match b {
            Binding::Bound(x) => x == v,
            Binding::Free => true,
        })
    }

    fn check(&self, schema: &RelationSchema) -> Result<(), StoreError> {
        if self.0.len() != schema.arity() {
            return Err(StoreError::ArityMismatch {
                name: schema.name().to_string(),
                expected: schema.arity(),
                got: self.0.len(),
            });
        }
        for (i, (b, col)) in self.0.iter().zip(schema.columns()).enumerate() {
            if let Binding::Bound(v) = b {
                if !col.ty.admits(v) {
                    return Err(StoreError::TypeMismatch {
                        name: schema.name().to_string(),
                        column: i,
                        expected: col.ty,
                        value: v.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Streamed query answers.
pub type RowStream = Box<dyn Iterator<Item = Result<Row, StoreError>> + Send>;

/// Rows fed to a backend import; an `Err` aborts the import.
pub(crate) type RowSource<'a> = &'a mut dyn Iterator<Item = Result<Row, StoreError>>;

pub(crate) trait Backend: Send + Sync {
    /// Replaces any stored table of the same name. Returns the row count.
    fn import(&self, schema: &RelationSchema, info: &RelationInfo, rows: RowSource<'_>) -> Result<u64, StoreError>;
    /// Metadata of a table imported earlier, possibly by another process.
    fn stored_info(&self, name: &RelName) -> Result<Option<RelationInfo>, StoreError>;
    fn scan(&self, schema: &RelationSchema, pattern: &QueryPattern) -> Result<RowStream, StoreError>;
}

type Slot = Arc<Mutex<Option<Arc<TableHandle>>>>;

pub struct Store {
    config: StoreConfig,
    backend: Box<dyn Backend>,
    registry: Mutex<HashMap<RelName, Slot>>,
    imports: AtomicUsize,
    prompter: Box<dyn Prompter>,
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Store").field("config", &self.config).finish_non_exhaustive()
    }
}

pub fn open_store(config: StoreConfig) -> Result<Store, StoreError> {
    Store::open(config)
}

impl Store {
    pub fn open(config: StoreConfig) -> Result<Store, StoreError> {
        config.validate()?;
        let dir_err = |source| StoreError::DataDirUnavailable { path: config.data_dir.clone(), source };
        if config.read_only {
            if !config.data_dir.is_dir() {
                return Err(dir_err(std::io::Error::new(std::io::ErrorKind::NotFound, "no such directory")));
            }
        } else {
            fs::create_dir_all(&config.data_dir).map_err(dir_err)?;
        }
        let backend: Box<dyn Backend> = match config.backend {
            BackendKind::Memory => Box::new(memory::MemoryBackend::default()),
            BackendKind::Kv => Box::new(kv::KvBackend::open(&config.backend_dir(), config.read_only)?),
            BackendKind::Sql => Box::new(sql::SqlBackend::open(&config.backend_dir(), config.read_only)?),
        };
        Ok(Store {
            config,
            backend,
            registry: Mutex::new(HashMap::new()),
            imports: AtomicUsize::new(0),
            prompter: Box::new(TtyPrompter),
        })
    }

    pub fn with_prompter(mut self, prompter: impl Prompter + 'static) -> Self {
        self.prompter = Box::new(prompter);
        self
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn backend_kind(&self) -> BackendKind {
        self.config.backend
    }

    /// Number of imports performed by this store.
    pub fn import_count(&self) -> usize {
        self.imports.load(Ordering::SeqCst)
    }

    /// Handles registered so far, in name order.
    pub fn handles(&self) -> Vec<Arc<TableHandle>> {
        let slots: Vec<Slot> = self.registry.lock().unwrap().values().cloned().collect();
        let mut out: Vec<_> = slots.iter().filter_map(|s| s.lock().unwrap().clone()).collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    fn slot(&self, name: &RelName) -> Slot {
        self.registry.lock().unwrap().entry(name.clone()).or_default().clone()
    }

    /// Cache path of a relation's canonical file.
    pub fn cache_file(&self, name: &RelName) -> PathBuf {
        ingest::cell_file(&self.config.data_dir, name)
    }

    /// Returns the table's handle, acquiring the table on first use.
    ///
    /// Concurrent first calls for one table block on a single loader.
    pub fn ensure_table(&self, name: &RelName) -> Result<Arc<TableHandle>, StoreError> {
        let entry = catalog_entry(name)?;
        let name = &entry.name;
        let slot = self.slot(name);
        let mut guard = slot.lock().unwrap();
        if let Some(handle) = guard.as_ref() {
            return Ok(handle.clone());
        }
        let path = self.cache_file(name);
        let stored = self.backend.stored_info(name)?;

        let (info, origin) = if path.is_file() {
            let header = CanonicalReader::open(&path).map_err(|e| import_failed(name, e.into()))?;
            match stored {
                Some(info) if &info == header.info() => {
                    log::debug!("{name}: reusing stored table");
                    (info, Origin::LocalCache)
                }
                _ => (self.import_file(&entry.schema, &path)?, Origin::LocalCache),
            }
        } else if let Some(info) = stored {
            (info, Origin::LocalCache)
        } else {
            if self.config.read_only {
                return Err(StoreError::TableMissingAndFetchForbidden(name.to_string()));
            }
            self.acquire(name)?;
            (self.import_file(&entry.schema, &path)?, Origin::RemoteFetch)
        };
        let origin = if info.get(RelationInfo::SOURCE_URL).is_some_and(|u| u.starts_with("fixture:")) {
            Origin::Fixture
        } else {
            origin
        };
        let handle = Arc::new(TableHandle { name: name.clone(), backend: self.config.backend, info, origin });
        *guard = Some(handle.clone());
        Ok(handle)
    }

    fn acquire(&self, name: &RelName) -> Result<(), StoreError> {
        let url = ingest::relation_url(&self.config.repo_url, name);
        match self.config.fetch_policy {
            FetchPolicy::Never => return Err(StoreError::TableMissingAndFetchForbidden(name.to_string())),
            FetchPolicy::Prompt if self.prompter.interactive() => {
                if !self.prompter.confirm(name, &url) {
                    return Err(StoreError::UserDeclined(name.to_string()));
                }
            }
            FetchPolicy::Prompt | FetchPolicy::Auto => {}
        }
        ingest::fetch_remote(name, &self.config.repo_url, &self.config.data_dir).map_err(StoreError::FetchFailed)?;
        Ok(())
    }

    fn import_file(&self, schema: &RelationSchema, path: &Path) -> Result<RelationInfo, StoreError> {
        if self.config.read_only {
            return Err(StoreError::ReadOnly);
        }
        let name = schema.name();
        let reader = CanonicalReader::open(path).map_err(|e| import_failed(name, e.into()))?;
        let file_schema = reader.schema();
        if file_schema.name() != name || file_schema.columns() != schema.columns() {
            return Err(StoreError::SchemaMismatch(format!(
                "{} declares {}({}), expected {}({})",
                path.display(),
                file_schema.name(),
                file_schema.columns_spec(),
                name,
                schema.columns_spec()
            )));
        }
        let info = reader.info().clone();
        let declared = info.row_count().unwrap_or(0);
        let mut rows = Counted { inner: reader, seen: 0, declared, done: false };
        self.backend
            .import(schema, &info, &mut rows)
            .map_err(|e| import_failed(name, e))?;
        self.imports.fetch_add(1, Ordering::SeqCst);
        log::info!("imported {name} ({declared} rows) into {}", self.config.backend);
        Ok(info)
    }

    /// Imports a canonical file under `name` and registers its handle.
    pub fn import_canonical(&self, name: &RelName, file: &Path) -> Result<Arc<TableHandle>, StoreError> {
        let entry = catalog_entry(name)?;
        let slot = self.slot(&entry.name);
        let mut guard = slot.lock().unwrap();
        if guard.is_some() {
            return Err(StoreError::AlreadyRegistered(entry.name.to_string()));
        }
        let info = self.import_file(&entry.schema, file).map_err(|e| match e {
            StoreError::ImportFailed { source, .. } => *source,
            other => other,
        })?;
        let origin = if info.get(RelationInfo::SOURCE_URL).is_some_and(|u| u.starts_with("fixture:")) {
            Origin::Fixture
        } else {
            Origin::LocalCache
        };
        let handle = Arc::new(TableHandle { name: entry.name.clone(), backend: self.config.backend, info, origin });
        *guard = Some(handle.clone());
        Ok(handle)
    }

    /// Rows matching every bound position. Acquires the table first.
    pub fn query(&self, name: &RelName, pattern: &QueryPattern) -> Result<RowStream, StoreError> {
        let entry = catalog_entry(name)?;
        pattern.check(&entry.schema)?;
        self.ensure_table(name)?;
        self.backend.scan(&entry.schema, pattern)
    }

    /// Collects [`Store::query`].
    pub fn query_rows(&self, name: &RelName, pattern: &QueryPattern) -> Result<Vec<Row>, StoreError> {
        self.query(name, pattern)?.collect()
    }

    pub fn table_info(&self, name: &RelName) -> Result<RelationInfo, StoreError> {
        Ok(self.ensure_table(name)?.info.clone())
    }
}

fn import_failed(name: &RelName, e: StoreError) -> StoreError {
    match e {
        e @ StoreError::SchemaMismatch(_) => e,
        e => StoreError::ImportFailed { name: name.to_string(), source: Box::new(e) },
    }
}

/// Yields the reader's rows, then an error if their count differs from
/// the declared one.
struct Counted<I> {
    inner: I,
    seen: u64,
    declared: u64,
    done: bool,
}

impl<I: Iterator<Item = Result<Row, IngestError>>> Iterator for Counted<I> {
    type Item = Result<Row, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.inner.next() {
            Some(Ok(row)) => {
                self.seen += 1;
                Some(Ok(row))
            }
            Some(Err(e)) => {
                self.done = true;
                Some(Err(e.into()))
            }
            None => {
                self.done = true;
                (self.seen != self.declared).then(|| {
                    Err(StoreError::CorruptFile(format!(
                        "declared row_count {} but {} rows present",
                        self.declared, self.seen
                    )))
                })
            }
        }
    }
}
