use std::collections::HashSet;
use std::fmt::Write;

use crate::relcore::{catalog_list, CellSelector, Provenance, RelName, Value};
use crate::store::{QueryPattern, Store, StoreError};

/// Row and distinct-value counts of one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationStat {
    pub relation: RelName,
    pub rows: u64,
    /// Distinct values in the first column.
    pub distinct_objects: u64,
    /// Distinct values in the second column.
    pub distinct_subjects: u64,
}

/// One stat per selected relation, in catalog order. Relations without a
/// builder are skipped.
pub fn stats(store: &Store, selector: &CellSelector) -> Result<Vec<PopulationStat>, StoreError> {
    let mut out = Vec::new();
    for entry in catalog_list(selector) {
        if entry.provenance == Provenance::Stub {
            continue;
        }
        let mut rows = 0u64;
        let mut objects: HashSet<Value> = HashSet::new();
        let mut subjects: HashSet<Value> = HashSet::new();
        for row in store.query(&entry.name, &QueryPattern::free(entry.name.arity()))? {
            let mut row = row?;
            rows += 1;
            row.truncate(2);
            let subject = row.pop().expect("relations have two node columns");
            subjects.insert(subject);
            objects.insert(row.pop().expect("relations have two node columns"));
        }
        out.push(PopulationStat {
            relation: entry.name.clone(),
            rows,
            distinct_objects: objects.len() as u64,
            distinct_subjects: subjects.len() as u64,
        });
    }
    Ok(out)
}

pub fn stats_tsv(stats: &[PopulationStat]) -> String {
    let mut out = String::from("relation\trows\tdistinct_objects\tdistinct_subjects\n");
    for s in stats {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", s.relation, s.rows, s.distinct_objects, s.distinct_subjects);
    }
    out
}
