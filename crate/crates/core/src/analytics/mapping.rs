use std::collections::HashMap;

use super::{AnalyticsError, Hit, IdKind};
use crate::relcore::{parse_rel_name, OrgToken, RelName, Value};
use crate::scalar::Scalar;
use crate::store::{QueryPattern, Store};

#[derive(Debug, Clone, PartialEq)]
pub struct MappedHits<F> {
    /// One entry per gene symbol, in order of first appearance.
    pub genes: Vec<Hit<F>>,
    /// Input ids with no gene.
    pub unmapped: usize,
}

impl<F: Scalar> MappedHits<F> {
    pub fn symbols(&self) -> Vec<&str> {
        self.genes.iter().map(|h| h.id.as_str()).collect()
    }

    pub fn fold_changes(&self) -> Vec<(&str, F)> {
        self.genes.iter().map(|h| (h.id.as_str(), h.log2fc)).collect()
    }
}

/// (protein to gene id, gene id to symbol) for an organism.
fn hops(org: OrgToken) -> (RelName, RelName) {
    let (a, b) = match org {
        OrgToken::Hs => ("map_unip_unip_hgnc", "map_hgnc_hgnc_symb"),
        OrgToken::Mouse => ("map_mgim_mouse_unip_mgim", "map_mgim_mouse_mgim_symb"),
    };
    (parse_rel_name(a).expect("catalog name"), parse_rel_name(b).expect("catalog name"))
}

fn lookup(store: &Store, name: &RelName, key: Value) -> Result<Vec<Value>, AnalyticsError> {
    let pattern = QueryPattern::free(2).bind(0, key);
    let mut out = Vec::new();
    for row in store.query(name, &pattern)? {
        let mut row = row?;
        out.push(row.swap_remove(1));
    }
    Ok(out)
}

/// Maps hit ids to gene symbols. Protein accessions go through the gene
/// id tables of `org`; symbols map to themselves. When several entries
/// land on one gene the entry with the smallest p-value wins, the earlier
/// one on ties.
pub fn map_hits_to_genes<F: Scalar>(
    store: &Store,
    hits: &[Hit<F>],
    id_kind: IdKind,
    org: OrgToken,
) -> Result<MappedHits<F>, AnalyticsError> {
    let (to_gene, to_symbol) = hops(org);
    let mut genes: Vec<Hit<F>> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    let mut unmapped = 0;
    let mut symbol_cache: HashMap<Value, Vec<Value>> = HashMap::new();

    for hit in hits {
        let symbols: Vec<String> = match id_kind {
            IdKind::GeneSymbol => vec![hit.id.clone()],
            IdKind::ProteinAccession => {
                let mut found = Vec::new();
                for gene in lookup(store, &to_gene, Value::from(hit.id.as_str()))? {
                    if !symbol_cache.contains_key(&gene) {
                        let symbols = lookup(store, &to_symbol, gene.clone())?;
                        symbol_cache.insert(gene.clone(), symbols);
                    }
                    found.extend(symbol_cache[&gene].iter().filter_map(|v| v.as_str().map(String::from)));
                }
                found.sort();
                found.dedup();
                found
            }
        };
        if symbols.is_empty() {
            unmapped += 1;
            continue;
        }
        for symbol in symbols {
            match slot.get(&symbol) {
                Some(&i) => {
                    if hit.pvalue < genes[i].pvalue {
                        genes[i].log2fc = hit.log2fc;
                        genes[i].pvalue = hit.pvalue;
                    }
                }
                None => {
                    slot.insert(symbol.clone(), genes.len());
                    genes.push(Hit { id: symbol, log2fc: hit.log2fc, pvalue: hit.pvalue });
                }
            }
        }
    }
    if unmapped > 0 {
        log::info!("{unmapped} ids without a gene were dropped");
    }
    Ok(MappedHits { genes, unmapped })
}
