use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{Backend, QueryPattern, RowSource, RowStream, StoreError};
use crate::relcore::{RelName, RelationInfo, RelationSchema, Row, Value};

struct Table {
    rows: Vec<Row>,
    /// Per column: value to row positions, ascending.
    index: Vec<HashMap<Value, Vec<u32>>>,
}

#[derive(Default)]
pub(crate) struct MemoryBackend {
    tables: RwLock<HashMap<RelName, Arc<Table>>>,
}

impl Backend for MemoryBackend {
    fn import(&self, schema: &RelationSchema, _info: &RelationInfo, rows: RowSource<'_>) -> Result<u64, StoreError> {
        let rows: Vec<Row> = rows.collect::<Result<_, _>>()?;
        let mut index = vec![HashMap::<Value, Vec<u32>>::new(); schema.arity()];
        for (i, row) in rows.iter().enumerate() {
            for (col, v) in row.iter().enumerate() {
                index[col].entry(v.clone()).or_default().push(i as u32);
            }
        }
        let n = rows.len() as u64;
        self.tables.write().unwrap().insert(schema.name().clone(), Arc::new(Table { rows, index }));
        Ok(n)
    }

    fn stored_info(&self, _name: &RelName) -> Result<Option<RelationInfo>, StoreError> {
        Ok(None)
    }

    fn scan(&self, schema: &RelationSchema, pattern: &QueryPattern) -> Result<RowStream, StoreError> {
        let table = self
            .tables
            .read()
            .unwrap()
            .get(schema.name())
            .cloned()
            .ok_or_else(|| StoreError::Backend(format!("{} not loaded", schema.name())))?;
        let pattern = pattern.clone();
        // Probe the bound column with the fewest candidates.
        let probe = (0..schema.arity())
            .filter_map(|c| pattern.bound(c).map(|v| table.index[c].get(v).map_or(0, Vec::len)).map(|n| (n, c)))
            .min();
        match probe {
            None => Ok(Box::new((0..table.rows.len()).map(move |i| Ok(table.rows[i].clone())))),
            Some((_, col)) => {
                let key = pattern.bound(col).expect("probe column is bound").clone();
                let hits = table.index[col].get(&key).cloned().unwrap_or_default();
                Ok(Box::new(hits.into_iter().filter_map(move |i| {
                    let row = &table.rows[i as usize];
                    pattern.matches(row).then(|| Ok(row.clone()))
                })))
            }
        }
    }
}
