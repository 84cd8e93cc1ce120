use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{bh_adjust, bonferroni_adjust, hypergeom_tail, AnalyticsError};
use crate::relcore::{format_go_id, parse_rel_name, OrgToken, RelName};
use crate::scalar::Scalar;
use crate::store::{QueryPattern, Store};

pub const ORA_HEADER: &str = "term\tname\tk\tn\tK\tN\tpvalue\tadj_pvalue";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Adjustment {
    #[default]
    BenjaminiHochberg,
    Bonferroni,
    None,
}

impl Adjustment {
    pub fn as_str(self) -> &'static str {
        match self {
            Adjustment::BenjaminiHochberg => "bh",
            Adjustment::Bonferroni => "bonferroni",
            Adjustment::None => "none",
        }
    }

    pub fn apply<F: Scalar>(self, pvalues: &[F]) -> Vec<F> {
        match self {
            Adjustment::BenjaminiHochberg => bh_adjust(pvalues),
            Adjustment::Bonferroni => bonferroni_adjust(pvalues),
            Adjustment::None => pvalues.to_vec(),
        }
    }
}

impl FromStr for Adjustment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bh" => Ok(Adjustment::BenjaminiHochberg),
            "bonferroni" => Ok(Adjustment::Bonferroni),
            "none" => Ok(Adjustment::None),
            _ => Err(format!("unknown adjustment {s:?} (bh, bonferroni, none)")),
        }
    }
}

impl fmt::Display for Adjustment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tested GO term.
#[derive(Debug, Clone, PartialEq)]
pub struct OraRow<F> {
    pub term: i64,
    pub term_name: String,
    /// k: hits annotated to the term.
    pub hits_in_term: u64,
    /// n
    pub hits_total: u64,
    /// K
    pub term_size_in_universe: u64,
    /// N
    pub universe_size: u64,
    pub pvalue: F,
    pub adjusted_pvalue: F,
}

fn membership_relation(org: OrgToken) -> RelName {
    let text = match org {
        OrgToken::Hs => "map_gont_symb_gont",
        OrgToken::Mouse => "map_gont_mouse_symb_gont",
    };
    parse_rel_name(text).expect("catalog name")
}

/// Term members of `genes`, by direct annotation.
pub(crate) fn term_members<S: AsRef<str>>(
    store: &Store,
    genes: &[S],
    org: OrgToken,
) -> Result<BTreeMap<i64, BTreeSet<String>>, AnalyticsError> {
    let name = membership_relation(org);
    let mut members: BTreeMap<i64, BTreeSet<String>> = BTreeMap::new();
    for gene in genes {
        let gene = gene.as_ref();
        for row in store.query(&name, &QueryPattern::free(2).bind(0, gene))? {
            if let Some(term) = row?[1].as_int() {
                members.entry(term).or_default().insert(gene.to_string());
            }
        }
    }
    Ok(members)
}

fn term_name(store: &Store, term: i64) -> Result<String, AnalyticsError> {
    let name = parse_rel_name("map_gont_gont_gonm")?;
    let rows = store.query_rows(&name, &QueryPattern::free(2).bind(0, term))?;
    Ok(rows.first().map(|r| r[1].to_string()).unwrap_or_default())
}

/// Tests every GO term holding at least one hit for over-representation
/// against `universe`. Hits outside the universe are ignored. Rows are
/// sorted by p-value, then term id.
pub fn go_over_representation<F: Scalar, S: AsRef<str>>(
    store: &Store,
    gene_hits: &[S],
    universe: &[S],
    org: OrgToken,
    adjustment: Adjustment,
) -> Result<Vec<OraRow<F>>, AnalyticsError> {
    let universe: BTreeSet<&str> = universe.iter().map(AsRef::as_ref).collect();
    if universe.is_empty() {
        return Err(AnalyticsError::EmptyUniverse);
    }
    let hits: BTreeSet<&str> = gene_hits.iter().map(AsRef::as_ref).filter(|s| universe.contains(s)).collect();
    let universe: Vec<&str> = universe.into_iter().collect();
    let big_n = universe.len() as u64;
    let n = hits.len() as u64;

    let mut rows = Vec::new();
    for (term, members) in term_members(store, &universe, org)? {
        let k = members.iter().filter(|s| hits.contains(s.as_str())).count() as u64;
        if k == 0 {
            continue;
        }
        let big_k = members.len() as u64;
        rows.push(OraRow {
            term,
            term_name: term_name(store, term)?,
            hits_in_term: k,
            hits_total: n,
            term_size_in_universe: big_k,
            universe_size: big_n,
            pvalue: hypergeom_tail(k, n, big_k, big_n)?,
            adjusted_pvalue: F::zero(),
        });
    }
    let pvalues: Vec<F> = rows.iter().map(|r| r.pvalue).collect();
    for (row, adj) in rows.iter_mut().zip(adjustment.apply(&pvalues)) {
        row.adjusted_pvalue = adj;
    }
    rows.sort_by(|a, b| a.pvalue.partial_cmp(&b.pvalue).expect("p-values are not NaN"));
    Ok(rows)
}

/// Renders rows as a TSV report with [`ORA_HEADER`].
pub fn ora_tsv<F: Scalar>(rows: &[OraRow<F>]) -> String {
    let mut out = format!("{ORA_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6e}\t{:.6e}",
            format_go_id(r.term),
            r.term_name,
            r.hits_in_term,
            r.hits_total,
            r.term_size_in_universe,
            r.universe_size,
            r.pvalue.to_f64().unwrap_or(f64::NAN),
            r.adjusted_pvalue.to_f64().unwrap_or(f64::NAN),
        );
    }
    out
}
