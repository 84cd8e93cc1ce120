//! Embedded key-value backend on redb.
//!
//! Table `rel:<name>` maps the encoded key columns followed by a
//! big-endian sequence number to the encoded remaining columns, so
//! duplicate keys coexist. Binary maps also get `rev:<name>`, keyed on the
//! second column. Metadata lives in `__info`.

use std::fs;
use std::path::Path;

use redb::{Database, ReadOnlyDatabase, ReadOnlyTable, ReadableDatabase, TableDefinition, TableError};

use super::keycodec::{self, decode_n};
use super::{Backend, QueryPattern, RowSource, RowStream, StoreError};
use crate::ingest::canonical::{escape_field, unescape_field};
use crate::relcore::{RelName, RelationInfo, RelationSchema, Row, Value};

const INFO: TableDefinition<&str, &str> = TableDefinition::new("__info");
type BytesTable = ReadOnlyTable<&'static [u8], &'static [u8]>;

enum Db {
    Rw(Database),
    Ro(ReadOnlyDatabase),
}

pub(crate) struct KvBackend {
    db: Db,
}

fn backend_err(e: impl std::fmt::Display) -> StoreError {
    StoreError::Backend(e.to_string())
}

impl KvBackend {
    pub fn open(dir: &Path, read_only: bool) -> Result<Self, StoreError> {
        let path = dir.join("kv.redb");
        let opened = if read_only {
            ReadOnlyDatabase::open(&path).map(Db::Ro)
        } else {
            fs::create_dir_all(dir).map_err(|e| StoreError::DataDirUnavailable { path: dir.to_path_buf(), source: e })?;
            Database::create(&path).map(Db::Rw)
        };
        let db = opened.map_err(|e| StoreError::BackendUnavailable(format!("{}: {e}", path.display())))?;
        Ok(KvBackend { db })
    }

    fn begin_read(&self) -> Result<redb::ReadTransaction, StoreError> {
        match &self.db {
            Db::Rw(db) => db.begin_read(),
            Db::Ro(db) => db.begin_read(),
        }
        .map_err(backend_err)
    }

    fn open_read(&self, name: &str) -> Result<Option<BytesTable>, StoreError> {
        let def: TableDefinition<&[u8], &[u8]> = TableDefinition::new(name);
        match self.begin_read()?.open_table(def) {
            Ok(t) => Ok(Some(t)),
            Err(TableError::TableDoesNotExist(_)) => Ok(None),
            Err(e) => Err(backend_err(e)),
        }
    }
}

fn main_table(name: &RelName) -> String {
    format!("rel:{name}")
}

fn rev_table(name: &RelName) -> String {
    format!("rev:{name}")
}

fn encode_info(info: &RelationInfo) -> String {
    info.entries().iter().map(|(k, v)| format!("{}\t{}\n", escape_field(k), escape_field(v))).collect()
}

fn decode_info(text: &str) -> Result<RelationInfo, StoreError> {
    let mut info = RelationInfo::new();
    for line in text.lines() {
        let (k, v) = line.split_once('\t').ok_or_else(|| backend_err("malformed stored info"))?;
        info.set(&unescape_field(k)?, unescape_field(v)?);
    }
    Ok(info)
}

/// Reassembles a row from its key and value parts.
fn assemble(schema: &RelationSchema, key: &[u8], value: &[u8]) -> Result<Row, StoreError> {
    let keys = schema.key_columns();
    let corrupt = || backend_err(format!("undecodable entry in {}", schema.name()));
    let (key_vals, _) = decode_n(key, keys.len()).ok_or_else(corrupt)?;
    let (rest_vals, _) = decode_n(value, schema.arity() - keys.len()).ok_or_else(corrupt)?;
    let mut row = vec![Value::Int(0); schema.arity()];
    for (&c, v) in keys.iter().zip(key_vals) {
        row[c] = v;
    }
    let others = (0..schema.arity()).filter(|c| !keys.contains(c));
    for (c, v) in others.zip(rest_vals) {
        row[c] = v;
    }
    Ok(row)
}

impl Backend for KvBackend {
    fn import(&self, schema: &RelationSchema, info: &RelationInfo, rows: RowSource<'_>) -> Result<u64, StoreError> {
        let Db::Rw(db) = &self.db else {
            return Err(StoreError::ReadOnly);
        };
        let name = schema.name();
        let keys = schema.key_columns();
        let main_name = main_table(name);
        let rev_name = rev_table(name);
        let main_def: TableDefinition<&[u8], &[u8]> = TableDefinition::new(&main_name);
        let rev_def: TableDefinition<&[u8], &[u8]> = TableDefinition::new(&rev_name);
        let txn = db.begin_write().map_err(backend_err)?;
        let mut n = 0u64;
        {
            txn.delete_table(main_def).map_err(backend_err)?;
            txn.delete_table(rev_def).map_err(backend_err)?;
            let mut main = txn.open_table(main_def).map_err(backend_err)?;
            let mut rev = if schema.is_binary_map() { Some(txn.open_table(rev_def).map_err(backend_err)?) } else { None };
            for row in rows {
                // An error drops the uncommitted transaction.
                let row = row?;
                let seq = n.to_be_bytes();
                let mut key = keycodec::encode(keys.iter().map(|&c| &row[c]));
                key.extend_from_slice(&seq);
                let value = keycodec::encode((0..row.len()).filter(|c| !keys.contains(c)).map(|c| &row[c]));
                main.insert(key.as_slice(), value.as_slice()).map_err(backend_err)?;
                if let Some(rev) = rev.as_mut() {
                    let mut rkey = keycodec::encode([&row[1]]);
                    rkey.extend_from_slice(&seq);
                    rev.insert(rkey.as_slice(), keycodec::encode([&row[0]]).as_slice()).map_err(backend_err)?;
                }
                n += 1;
            }
            let mut meta = txn.open_table(INFO).map_err(backend_err)?;
            meta.insert(name.to_string().as_str(), encode_info(info).as_str()).map_err(backend_err)?;
        }
        txn.commit().map_err(backend_err)?;
        Ok(n)
    }

    fn stored_info(&self, name: &RelName) -> Result<Option<RelationInfo>, StoreError> {
        let txn = self.begin_read()?;
        let table = match txn.open_table(INFO) {
            Ok(t) => t,
            Err(TableError::TableDoesNotExist(_)) => return Ok(None),
            Err(e) => return Err(backend_err(e)),
        };
        let text = table.get(name.to_string().as_str()).map_err(backend_err)?;
        text.map(|t| decode_info(t.value())).transpose()
    }

    fn scan(&self, schema: &RelationSchema, pattern: &QueryPattern) -> Result<RowStream, StoreError> {
        let name = schema.name();
        let missing = || backend_err(format!("{name} not loaded"));
        let prefix: Vec<&Value> = schema.key_columns().iter().map_while(|&c| pattern.bound(c)).collect();
        let schema = schema.clone();
        let pattern = pattern.clone();

        if prefix.is_empty() && schema.is_binary_map() && pattern.bound(1).is_some() {
            let table = self.open_read(&rev_table(name))?.ok_or_else(missing)?;
            let start = keycodec::encode([pattern.bound(1).expect("checked")]);
            let range = bounded_range(&table, &start)?;
            let subject = pattern.bound(1).cloned().expect("checked");
            return Ok(Box::new(range.filter_map(move |entry| {
                let row = entry.map_err(backend_err).and_then(|(_, v)| {
                    let (obj, _) = decode_n(v.value(), 1).ok_or_else(|| backend_err("undecodable reverse entry"))?;
                    Ok(vec![obj.into_iter().next().expect("one value"), subject.clone()])
                });
                keep(row, &pattern)
            })));
        }

        let table = self.open_read(&main_table(name))?.ok_or_else(missing)?;
        let start = keycodec::encode(prefix);
        let range = bounded_range(&table, &start)?;
        Ok(Box::new(range.filter_map(move |entry| {
            let row = entry.map_err(backend_err).and_then(|(k, v)| assemble(&schema, k.value(), v.value()));
            keep(row, &pattern)
        })))
    }
}

type Entries = redb::Range<'static, &'static [u8], &'static [u8]>;

fn bounded_range(table: &ReadOnlyTable<&'static [u8], &'static [u8]>, prefix: &[u8]) -> Result<Entries, StoreError> {
    let range = match keycodec::prefix_successor(prefix) {
        Some(end) if !prefix.is_empty() => table.range::<&[u8]>(prefix..end.as_slice()),
        _ => table.range::<&[u8]>(prefix..),
    };
    range.map_err(backend_err)
}

fn keep(row: Result<Row, StoreError>, pattern: &QueryPattern) -> Option<Result<Row, StoreError>> {
    match row {
        Ok(r) if pattern.matches(&r) => Some(Ok(r)),
        Ok(_) => None,
        Err(e) => Some(Err(e)),
    }
}
