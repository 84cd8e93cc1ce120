use std::fmt;
use std::str::FromStr;

use super::{AnalyticsError, Experiment};
use crate::scalar::Scalar;

/// Which sign of fold change counts as a hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regulation {
    #[default]
    Both,
    Up,
    Down,
}

impl Regulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Regulation::Both => "both",
            Regulation::Up => "up",
            Regulation::Down => "down",
        }
    }

    fn admits<F: Scalar>(self, lfc: F) -> bool {
        match self {
            Regulation::Both => true,
            Regulation::Up => lfc > F::zero(),
            Regulation::Down => lfc < F::zero(),
        }
    }
}

impl FromStr for Regulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "both" => Ok(Regulation::Both),
            "up" => Ok(Regulation::Up),
            "down" => Ok(Regulation::Down),
            _ => Err(format!("unknown direction {s:?} (both, up, down)")),
        }
    }
}

impl fmt::Display for Regulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsFilter<F> {
    pub max_pvalue: F,
    pub min_abs_log2fc: F,
    pub direction: Regulation,
}

impl<F: Scalar> HitsFilter<F> {
    pub fn new(max_pvalue: F, min_abs_log2fc: F, direction: Regulation) -> Result<Self, AnalyticsError> {
        if !(max_pvalue > F::zero() && max_pvalue <= F::one()) {
            return Err(AnalyticsError::InvalidFilter(format!("max_pvalue {max_pvalue} outside (0, 1]")));
        }
        if !(min_abs_log2fc >= F::zero() && min_abs_log2fc.is_finite()) {
            return Err(AnalyticsError::InvalidFilter(format!("min_abs_log2fc {min_abs_log2fc} is negative")));
        }
        Ok(HitsFilter { max_pvalue, min_abs_log2fc, direction })
    }

    pub fn accepts(&self, log2fc: F, pvalue: F) -> bool {
        pvalue <= self.max_pvalue && log2fc.abs() >= self.min_abs_log2fc && self.direction.admits(log2fc)
    }
}

impl<F: Scalar> Default for HitsFilter<F> {
    fn default() -> Self {
        HitsFilter { max_pvalue: F::lit(0.05), min_abs_log2fc: F::one(), direction: Regulation::Both }
    }
}

/// An identifier with its fold change and p-value.
#[derive(Debug, Clone, PartialEq)]
pub struct Hit<F> {
    pub id: String,
    pub log2fc: F,
    pub pvalue: F,
}

/// Rows passing the filter, in input order.
pub fn filter_hits<F: Scalar>(exp: &Experiment<F>, f: &HitsFilter<F>) -> Vec<Hit<F>> {
    exp.rows
        .iter()
        .filter(|r| f.accepts(r.log2fc, r.pvalue))
        .map(|r| Hit { id: r.id.clone(), log2fc: r.log2fc, pvalue: r.pvalue })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{ExpRow, IdKind};

    #[test]
    fn conjunction() {
        let exp = Experiment {
            rows: vec![
                ExpRow { id: "X".into(), log2fc: 1.2, pvalue: 0.04 },
                ExpRow { id: "Y".into(), log2fc: -1.2, pvalue: 0.04 },
                ExpRow { id: "Z".into(), log2fc: 0.0, pvalue: 0.9 },
            ],
            id_kind: IdKind::GeneSymbol,
            skipped: 0,
        };
        let up = HitsFilter::new(0.05, 1.0, Regulation::Up).unwrap();
        assert_eq!(filter_hits(&exp, &up).iter().map(|h| h.id.as_str()).collect::<Vec<_>>(), ["X"]);
        let all = HitsFilter::new(1.0, 0.0, Regulation::Both).unwrap();
        assert_eq!(filter_hits(&exp, &all).len(), 3);
        assert!(HitsFilter::new(0.0, 0.0, Regulation::Both).is_err());
        assert!(HitsFilter::new(0.5, -1.0, Regulation::Both).is_err());
    }
}
