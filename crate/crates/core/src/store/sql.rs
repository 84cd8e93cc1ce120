//! SQLite backend. One table per relation with an index on each key
//! column, plus the second column of maps. A writer holds an exclusive
//! lock file next to the database for its lifetime; readers take no lock.

use std::collections::VecDeque;
use std::fs::{self, File, OpenOptions};
use std::path::Path;
use std::sync::{Arc, Mutex};

use rusqlite::types::Value as SqlValue;
use rusqlite::{params_from_iter, Connection, OpenFlags, OptionalExtension};

use super::{Backend, QueryPattern, RowSource, RowStream, StoreError};
use crate::relcore::{ColumnType, RelKind, RelName, RelationInfo, RelationSchema, Row, Value};

const PAGE: usize = 1024;

pub(crate) struct SqlBackend {
    conn: Arc<Mutex<Connection>>,
    _lock: Option<File>,
}

fn backend_err(e: impl std::fmt::Display) -> StoreError {
    StoreError::Backend(e.to_string())
}

fn table(name: &RelName) -> String {
    format!("\"t_{name}\"")
}

fn to_sql(v: &Value) -> SqlValue {
    match v {
        Value::Int(i) => SqlValue::Integer(*i),
        Value::Str(s) => SqlValue::Text(s.clone()),
    }
}

impl SqlBackend {
    pub fn open(dir: &Path, read_only: bool) -> Result<Self, StoreError> {
        let path = dir.join("sql.sqlite");
        let unavailable = |e: &dyn std::fmt::Display| StoreError::BackendUnavailable(format!("{}: {e}", path.display()));
        if read_only {
            let conn = Connection::open_with_flags(&path, OpenFlags::SQLITE_OPEN_READ_ONLY)
                .map_err(|e| unavailable(&e))?;
            return Ok(SqlBackend { conn: Arc::new(Mutex::new(conn)), _lock: None });
        }
        fs::create_dir_all(dir).map_err(|e| StoreError::DataDirUnavailable { path: dir.to_path_buf(), source: e })?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join("sql.sqlite.lock"))
            .map_err(|e| unavailable(&e))?;
        if let Err(e) = lock.try_lock() {
            return Err(unavailable(&format!("another writer holds the lock ({e})")));
        }
        let conn = Connection::open(&path).map_err(|e| unavailable(&e))?;
        conn.pragma_update(None, "journal_mode", "WAL").map_err(|e| unavailable(&e))?;
        conn.execute("CREATE TABLE IF NOT EXISTS __info (name TEXT PRIMARY KEY, entries TEXT NOT NULL)", [])
            .map_err(|e| unavailable(&e))?;
        Ok(SqlBackend { conn: Arc::new(Mutex::new(conn)), _lock: Some(lock) })
    }
}

fn encode_info(info: &RelationInfo) -> String {
    use crate::ingest::canonical::escape_field;
    info.entries().iter().map(|(k, v)| format!("{}\t{}\n", escape_field(k), escape_field(v))).collect()
}

fn decode_info(text: &str) -> Result<RelationInfo, StoreError> {
    use crate::ingest::canonical::unescape_field;
    let mut info = RelationInfo::new();
    for line in text.lines() {
        let (k, v) = line.split_once('\t').ok_or_else(|| backend_err("malformed stored info"))?;
        info.set(&unescape_field(k)?, unescape_field(v)?);
    }
    Ok(info)
}

impl Backend for SqlBackend {
    fn import(&self, schema: &RelationSchema, info: &RelationInfo, rows: RowSource<'_>) -> Result<u64, StoreError> {
        if self._lock.is_none() {
            return Err(StoreError::ReadOnly);
        }
        let name = schema.name();
        let t = table(name);
        let mut conn = self.conn.lock().unwrap();
        let tx = conn.transaction().map_err(backend_err)?;
        let cols: Vec<String> = schema
            .columns()
            .iter()
            .enumerate()
            .map(|(i, c)| format!("c{i} {}", if c.ty.is_integral() { "INTEGER" } else { "TEXT" }))
            .collect();
        tx.execute_batch(&format!("DROP TABLE IF EXISTS {t}; CREATE TABLE {t} ({});", cols.join(", ")))
            .map_err(backend_err)?;
        let mut n = 0u64;
        {
            let marks: Vec<String> = (1..=schema.arity()).map(|i| format!("?{i}")).collect();
            let mut insert = tx
                .prepare(&format!("INSERT INTO {t} VALUES ({})", marks.join(", ")))
                .map_err(backend_err)?;
            for row in rows {
                let row = row?;
                insert.execute(params_from_iter(row.iter().map(to_sql))).map_err(backend_err)?;
                n += 1;
            }
        }
        let mut indexed: Vec<usize> = schema.key_columns().to_vec();
        if name.kind() == RelKind::Map && !indexed.contains(&1) {
            indexed.push(1);
        }
        for c in indexed {
            tx.execute(&format!("CREATE INDEX \"i_{name}_{c}\" ON {t} (c{c})"), []).map_err(backend_err)?;
        }
        tx.execute(
            "INSERT OR REPLACE INTO __info (name, entries) VALUES (?1, ?2)",
            [name.to_string(), encode_info(info)],
        )
        .map_err(backend_err)?;
        tx.commit().map_err(backend_err)?;
        Ok(n)
    }

    fn stored_info(&self, name: &RelName) -> Result<Option<RelationInfo>, StoreError> {
        let conn = self.conn.lock().unwrap();
        let exists: Option<String> = conn
            .query_row("SELECT name FROM sqlite_master WHERE type = 'table' AND name = '__info'", [], |r| r.get(0))
            .optional()
            .map_err(backend_err)?;
        if exists.is_none() {
            return Ok(None);
        }
        let text: Option<String> = conn
            .query_row("SELECT entries FROM __info WHERE name = ?1", [name.to_string()], |r| r.get(0))
            .optional()
            .map_err(backend_err)?;
        text.map(|t| decode_info(&t)).transpose()
    }

    fn scan(&self, schema: &RelationSchema, pattern: &QueryPattern) -> Result<RowStream, StoreError> {
        let cols: Vec<String> = (0..schema.arity()).map(|i| format!("c{i}")).collect();
        let mut filters = vec!["rowid > ?1".to_string()];
        let mut params = Vec::new();
        for c in 0..schema.arity() {
            if let Some(v) = pattern.bound(c) {
                params.push(to_sql(v));
                filters.push(format!("c{c} = ?{}", params.len() + 1));
            }
        }
        let sql = format!(
            "SELECT rowid, {} FROM {} WHERE {} ORDER BY rowid LIMIT {PAGE}",
            cols.join(", "),
            table(schema.name()),
            filters.join(" AND ")
        );
        let mut rows = SqlRows {
            conn: self.conn.clone(),
            sql,
            params,
            types: schema.column_types(),
            last: i64::MIN,
            buf: VecDeque::new(),
            done: false,
        };
        rows.fill()?;
        Ok(Box::new(rows))
    }
}

/// Pages through a result set by rowid so that no statement outlives a
/// call.
struct SqlRows {
    conn: Arc<Mutex<Connection>>,
    sql: String,
    params: Vec<SqlValue>,
    types: Vec<ColumnType>,
    last: i64,
    buf: VecDeque<Row>,
    done: bool,
}

impl SqlRows {
    fn fill(&mut self) -> Result<(), StoreError> {
        let conn = self.conn.lock().unwrap();
        let mut stmt = conn.prepare_cached(&self.sql).map_err(backend_err)?;
        let params = std::iter::once(SqlValue::Integer(self.last)).chain(self.params.iter().cloned());
        let mut rows = stmt.query(params_from_iter(params)).map_err(backend_err)?;
        let mut got = 0;
        while let Some(r) = rows.next().map_err(backend_err)? {
            self.last = r.get(0).map_err(backend_err)?;
            let row = self
                .types
                .iter()
                .enumerate()
                .map(|(i, ty)| {
                    if ty.is_integral() {
                        r.get::<_, i64>(i + 1).map(Value::Int)
                    } else {
                        r.get::<_, String>(i + 1).map(Value::Str)
                    }
                })
                .collect::<Result<Row, _>>()
                .map_err(backend_err)?;
            self.buf.push_back(row);
            got += 1;
        }
        self.done = got < PAGE;
        Ok(())
    }
}

impl Iterator for SqlRows {
    type Item = Result<Row, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.buf.is_empty() && !self.done {
            if let Err(e) = self.fill() {
                self.done = true;
                return Some(Err(e));
            }
        }
        self.buf.pop_front().map(Ok)
    }
}
