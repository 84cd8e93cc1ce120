use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::{QueryPattern, Store, StoreConfig, StoreError};
use crate::ingest::{read_canonical, write_canonical};
use crate::relcore::{catalog_entry, parse_rel_name, RelName, RelationInfo, Row, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    /// Import the file `n_ops` times.
    Load,
    /// `n_ops` unbound scans.
    FullScan,
    /// `n_ops` lookups with the first column bound.
    KeyedLookup,
    /// `n_ops` lookups with the second column bound.
    ReverseLookup,
}

impl Workload {
    pub const ALL: [Workload; 4] = [Workload::Load, Workload::FullScan, Workload::KeyedLookup, Workload::ReverseLookup];

    pub fn as_str(self) -> &'static str {
        match self {
            Workload::Load => "load",
            Workload::FullScan => "full_scan",
            Workload::KeyedLookup => "keyed_lookup",
            Workload::ReverseLookup => "reverse_lookup",
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Workload {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Workload::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| format!("unknown workload {s:?} (load, full_scan, keyed_lookup, reverse_lookup)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub backend: super::BackendKind,
    pub workload: Workload,
    pub n_ops: usize,
    pub total: Duration,
    /// Rows returned or imported over all operations.
    pub rows: u64,
}

impl BenchRow {
    pub fn mean(&self) -> Duration {
        self.total / self.n_ops.max(1) as u32
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn get(&self, backend: super::BackendKind, workload: Workload) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.backend == backend && r.workload == workload)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("backend\tworkload\tn_ops\ttotal_ms\tmean_us\trows\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.3}\t{:.3}\t{}",
                r.backend,
                r.workload,
                r.n_ops,
                r.total.as_secs_f64() * 1e3,
                r.mean().as_secs_f64() * 1e6,
                r.rows
            );
        }
        out
    }
}

/// Times `workload` against a store opened from each config. The file is
/// imported once before the query workloads. Lookup keys cycle through
/// the file's rows with a fixed stride, identically for every backend.
pub fn bench_backends(
    configs: &[StoreConfig],
    name: &RelName,
    file: &Path,
    workload: Workload,
    n_ops: usize,
) -> Result<BenchReport, StoreError> {
    let mut report = BenchReport::default();
    if n_ops == 0 {
        return Ok(report);
    }
    let schema = &catalog_entry(name)?.schema;
    let data = read_canonical(file)?;
    let stride = data.rows.len() / 7 + 1;
    let key = |i: usize, col: usize| data.rows[(i * stride) % data.rows.len()][col].clone();

    for config in configs {
        let store = Store::open(config.clone())?;
        let start = Instant::now();
        let mut rows = 0u64;
        if workload == Workload::Load {
            for _ in 0..n_ops {
                store.import_file(schema, file)?;
                rows += data.rows.len() as u64;
            }
        } else {
            store.import_canonical(name, file)?;
            if data.rows.is_empty() && workload != Workload::FullScan {
                continue;
            }
            let column = match workload {
                Workload::ReverseLookup => Some(1),
                Workload::KeyedLookup => Some(0),
                _ => None,
            };
            let patterns: Vec<QueryPattern> = (0..n_ops)
                .map(|i| match column {
                    Some(c) => QueryPattern::free(schema.arity()).bind(c, key(i, c)),
                    None => QueryPattern::free(schema.arity()),
                })
                .collect();
            let t0 = Instant::now();
            for p in &patterns {
                for row in store.query(name, p)? {
                    row?;
                    rows += 1;
                }
            }
            report.rows.push(BenchRow { backend: config.backend, workload, n_ops, total: t0.elapsed(), rows });
            continue;
        }
        report.rows.push(BenchRow { backend: config.backend, workload, n_ops, total: start.elapsed(), rows });
    }
    Ok(report)
}

/// Writes a `map_hgnc_hgnc_symb` file of `rows` generated rows
/// (`i`, `SYM<i>`) and returns the relation name.
pub fn synthetic_map(path: &Path, rows: usize) -> Result<RelName, StoreError> {
    let name = parse_rel_name("map_hgnc_hgnc_symb")?;
    let schema = &catalog_entry(&name)?.schema;
    let data: Vec<Row> = (1..=rows as i64).map(|i| vec![Value::Int(i), Value::Str(format!("SYM{i}"))]).collect();
    let mut info = RelationInfo::new();
    info.set(RelationInfo::SOURCE_DB, "hgnc");
    info.set(RelationInfo::SOURCE_URL, "synthetic:");
    write_canonical(path, schema, &info, &data)?;
    Ok(name)
}
