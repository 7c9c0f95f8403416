//! Batch scans over ranges of moduli.
//!
//! Pairs are always visited in `(q, a)` order and every aggregate is
//! an integer count or a list in that order, so a scan is reproducible
//! byte for byte.

use num_integer::Integer as _;

use crate::arith::Integer;
use crate::contfrac::Convention;
use crate::error::Result;
use crate::stats::is_prime;
use crate::sum::{
    decompose_with_sum, reciprocity_fp, reciprocity_sp, s_fast, ReciprocityReport, SumDecomposition,
};

pub const CONVENTIONS: [Convention; 2] = [Convention::LastAtLeastTwo, Convention::LastEqualsOne];

/// Inclusive range of moduli, written `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    pub lo: u64,
    pub hi: u64,
}

impl std::str::FromStr for QRange {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            crate::error::Error::InvalidParameter(
                "q range must look like lo..hi with 2 <= lo <= hi",
            )
        };
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let lo: u64 = lo.parse().map_err(|_| bad())?;
        let hi: u64 = hi.parse().map_err(|_| bad())?;
        if lo < 2 || lo > hi {
            return Err(bad());
        }
        Ok(QRange { lo, hi })
    }
}

impl QRange {
    pub fn moduli(self, primes_only: bool) -> impl Iterator<Item = u64> {
        (self.lo..=self.hi).filter(move |q| !primes_only || is_prime(*q))
    }
}

/// All `(a, q)` with `1 <= a < q`, `gcd(a, q) = 1`, in `(q, a)` order.
pub fn coprime_pairs(range: QRange, primes_only: bool) -> impl Iterator<Item = (u64, u64)> {
    range
        .moduli(primes_only)
        .flat_map(|q| (1..q).filter(move |a| a.gcd(&q) == 1).map(move |a| (a, q)))
}

/// Everything the scan reports for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub a: u64,
    pub q: u64,
    pub s: Integer,
    pub last2: SumDecomposition,
    pub last1: SumDecomposition,
    pub fp: ReciprocityReport,
    pub sp: ReciprocityReport,
}

impl PairRecord {
    pub fn decomposition(&self, convention: Convention) -> &SumDecomposition {
        match convention {
            Convention::LastAtLeastTwo => &self.last2,
            Convention::LastEqualsOne => &self.last1,
        }
    }
}

pub fn scan_pair(a: u64, q: u64) -> Result<PairRecord> {
    let (ai, qi) = (Integer::from(a), Integer::from(q));
    let s = s_fast(&ai, &qi)?;
    let fp = reciprocity_fp(&ai, &qi)?;
    let sp = reciprocity_sp(&ai, &qi)?;
    Ok(PairRecord {
        last2: decompose_with_sum(&ai, &qi, s.clone(), Convention::LastAtLeastTwo),
        last1: decompose_with_sum(&ai, &qi, s.clone(), Convention::LastEqualsOne),
        a,
        q,
        s,
        fp,
        sp,
    })
}

/// A pair whose remainder `E` falls outside `0 <= E <= (3/2) k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub a: u64,
    pub q: u64,
    pub error_e: Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionTally {
    pub convention: Convention,
    pub upper_violations: Vec<BoundViolation>,
    pub lower_violations: Vec<BoundViolation>,
}

/// Bound check of the continued-fraction decomposition under both
/// conventions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub pairs_checked: u64,
    pub tallies: [ConventionTally; 2],
}

impl DecompositionReport {
    pub fn tally(&self, convention: Convention) -> &ConventionTally {
        self.tallies
            .iter()
            .find(|t| t.convention == convention)
            .expect("both conventions tallied")
    }
}

pub fn decomposition_scan(
    pairs: impl IntoIterator<Item = (u64, u64)>,
) -> Result<DecompositionReport> {
    let mut tallies = CONVENTIONS.map(|convention| ConventionTally {
        convention,
        upper_violations: Vec::new(),
        lower_violations: Vec::new(),
    });
    let mut pairs_checked = 0;
    for (a, q) in pairs {
        let (ai, qi) = (Integer::from(a), Integer::from(q));
        let s = s_fast(&ai, &qi)?;
        for tally in &mut tallies {
            let d = decompose_with_sum(&ai, &qi, s.clone(), tally.convention);
            let violation = || BoundViolation {
                a,
                q,
                error_e: d.error_e.clone(),
            };
            if !d.upper_bound_holds() {
                tally.upper_violations.push(violation());
            }
            if !d.lower_bound_holds() {
                tally.lower_violations.push(violation());
            }
        }
        pairs_checked += 1;
    }
    Ok(DecompositionReport {
        pairs_checked,
        tallies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_range_parsing() {
        assert_eq!("2..10".parse::<QRange>().unwrap(), QRange { lo: 2, hi: 10 });
        for bad in ["1..10", "10..2", "2-10", "..", "a..b"] {
            assert!(bad.parse::<QRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn pairs_are_ordered_and_coprime() {
        let pairs: Vec<_> = coprime_pairs(QRange { lo: 2, hi: 6 }, false).collect();
        assert_eq!(
            pairs,
            [
                (1, 2),
                (1, 3),
                (2, 3),
                (1, 4),
                (3, 4),
                (1, 5),
                (2, 5),
                (3, 5),
                (4, 5),
                (1, 6),
                (5, 6)
            ]
        );
        let primes: Vec<_> = QRange { lo: 2, hi: 12 }.moduli(true).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11]);
    }

    #[test]
    fn small_scan_reports_quarter() {
        let rep = decomposition_scan(coprime_pairs(QRange { lo: 2, hi: 30 }, false)).unwrap();
        let last2 = rep.tally(Convention::LastAtLeastTwo);
        assert!(last2
            .lower_violations
            .iter()
            .any(|v| (v.a, v.q) == (1, 4) && v.error_e == Integer::from(-1)));
        assert!(last2.upper_violations.is_empty());
        assert!(rep
            .tally(Convention::LastEqualsOne)
            .upper_violations
            .is_empty());
    }

    #[test]
    fn pair_record_agrees_with_direct_calls() {
        let r = scan_pair(81, 307).unwrap();
        assert_eq!(r.s, Integer::from(7));
        assert_eq!(r.last2.error_e, Integer::from(4));
        assert_eq!(r.decomposition(Convention::LastEqualsOne).cf.len(), 7);
        assert_eq!(r.fp.k_last2, 6);
    }
}
