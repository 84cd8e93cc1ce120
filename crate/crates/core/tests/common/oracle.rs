//! Reference computations written independently of the library code.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use biorel::store::{QueryPattern, Store};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::rel;

pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// P[X >= k] by summing C(K,i) C(N-K,n-i) / C(N,n) exactly.
#[allow(non_snake_case)]
pub fn exact_tail(k: u64, n: u64, K: u64, N: u64) -> BigRational {
    let mut num = BigUint::zero();
    for i in k..=n.min(K) {
        if n - i <= N - K {
            num += binom(K, i) * binom(N - K, n - i);
        }
    }
    BigRational::new(num.into(), binom(N, n).into())
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// Benjamini-Hochberg by definition: for each p, the smallest p_j m / r_j
/// over p_j >= p, r_j counting the p-values <= p_j.
pub fn bh(p: &[f64]) -> Vec<f64> {
    let m = p.len() as f64;
    p.iter()
        .map(|&pi| {
            p.iter()
                .filter(|&&pj| pj >= pi)
                .map(|&pj| pj * m / p.iter().filter(|&&pl| pl <= pj).count() as f64)
                .fold(1.0f64, f64::min)
        })
        .collect()
}

pub struct ExpRecord {
    pub id: String,
    pub lfc: f64,
    pub p: f64,
}

/// Reads `id,_,lfc,p` lines of the fixture CSV shape, dropping rows whose
/// numbers do not parse.
pub fn read_experiment(path: &Path) -> Vec<ExpRecord> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .filter_map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            Some(ExpRecord { id: f[0].to_string(), lfc: f[2].parse().ok()?, p: f[3].parse().ok()? })
        })
        .collect()
}

/// accession -> symbols, from full scans of the human tables.
pub fn accession_symbols(store: &Store) -> HashMap<String, BTreeSet<String>> {
    let hgnc_symbol: HashMap<i64, String> = store
        .query_rows(&rel("map_hgnc_hgnc_symb"), &QueryPattern::free(2))
        .unwrap()
        .into_iter()
        .map(|r| (r[0].as_int().unwrap(), r[1].to_string()))
        .collect();
    let mut out: HashMap<String, BTreeSet<String>> = HashMap::new();
    for r in store.query_rows(&rel("map_unip_hgnc_unip"), &QueryPattern::free(2)).unwrap() {
        if let Some(s) = hgnc_symbol.get(&r[0].as_int().unwrap()) {
            out.entry(r[1].to_string()).or_default().insert(s.clone());
        }
    }
    out
}

/// symbol -> (lfc, p) keeping the smallest p per symbol over `records`.
pub fn collapse(records: &[&ExpRecord], map: &HashMap<String, BTreeSet<String>>) -> BTreeMap<String, (f64, f64)> {
    let mut best: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for r in records {
        for s in map.get(&r.id).into_iter().flatten() {
            match best.get(s) {
                Some((_, p)) if *p <= r.p => {}
                _ => {
                    best.insert(s.clone(), (r.lfc, r.p));
                }
            }
        }
    }
    best
}

pub struct OraExpect {
    pub term: i64,
    pub k: u64,
    pub n: u64,
    pub big_k: u64,
    pub big_n: u64,
    pub p: f64,
    pub adj: f64,
}

/// Over-representation of `hits` in `universe` with term membership from
/// a full scan of the human GO annotation table.
pub fn ora(store: &Store, hits: &BTreeSet<String>, universe: &BTreeSet<String>) -> Vec<OraExpect> {
    let mut members: BTreeMap<i64, BTreeSet<String>> = BTreeMap::new();
    for r in store.query_rows(&rel("map_gont_symb_gont"), &QueryPattern::free(2)).unwrap() {
        let s = r[0].to_string();
        if universe.contains(&s) {
            members.entry(r[1].as_int().unwrap()).or_default().insert(s);
        }
    }
    let (n, big_n) = (hits.len() as u64, universe.len() as u64);
    let mut rows: Vec<OraExpect> = members
        .into_iter()
        .filter_map(|(term, m)| {
            let k = m.intersection(hits).count() as u64;
            (k > 0).then(|| {
                let big_k = m.len() as u64;
                let p = ratio_f64(&exact_tail(k, n, big_k, big_n));
                OraExpect { term, k, n, big_k, big_n, p, adj: 0.0 }
            })
        })
        .collect();
    let adj = bh(&rows.iter().map(|r| r.p).collect::<Vec<_>>());
    for (r, a) in rows.iter_mut().zip(adj) {
        r.adj = a;
    }
    rows
}

/// Hits and universe of the bundled experiment under the default filter.
pub fn fixture_genes(store: &Store, csv: &Path, max_p: f64, min_lfc: f64) -> (BTreeMap<String, (f64, f64)>, BTreeSet<String>) {
    let records = read_experiment(csv);
    let map = accession_symbols(store);
    let all: Vec<&ExpRecord> = records.iter().collect();
    let universe: BTreeSet<String> = collapse(&all, &map).into_keys().collect();
    let passing: Vec<&ExpRecord> = records.iter().filter(|r| r.p <= max_p && r.lfc.abs() >= min_lfc).collect();
    (collapse(&passing, &map), universe)
}

pub fn close(a: f64, b: f64, rel_tol: f64) -> bool {
    a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}
