//! Finite continued fractions, convergents and the one-sided best
//! approximations they generate.
//!
//! A reduced `c/d` with `0 != |x - c/d| < 1/d^2` is either a convergent
//! of `x` or a semi-convergent `(h_j + g h_{j+1}) / (k_j + g k_{j+1})`
//! with `g = 1` or `g = b_{j+2} - 1`. [`approx_candidates`] enumerates
//! exactly that set; the solution filters below only ever test it with
//! integer inequalities.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{gcd, isqrt, Integer, Rational};
use crate::error::{Error, Result};

/// Which of the two expansions of a rational is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Convention {
    /// Last partial quotient at least 2 (`3/7 = [0;2,3]`).
    #[default]
    LastAtLeastTwo,
    /// Last partial quotient rewritten as `(b_k - 1, 1)` (`3/7 = [0;2,2,1]`).
    LastEqualsOne,
}

/// `[b0; b1, ..., bk]` with `b0` any integer and every `b_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    b0: Integer,
    coeffs: Vec<Integer>,
    convention: Convention,
}

/// Convergent `h_j / k_j` of an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub j: isize,
    pub h: Integer,
    pub k: Integer,
}

impl Convergent {
    /// The `j = -1` seed `1/0`.
    pub fn seed() -> Self {
        Convergent {
            j: -1,
            h: Integer::one(),
            k: Integer::zero(),
        }
    }

    pub fn fraction(&self) -> Rational {
        Rational::new_reduced(self.h.clone(), self.k.clone())
    }
}

impl ContinuedFraction {
    /// Euclid with floor division; `b0 = floor(x)`, negative allowed.
    pub fn expand(x: &Rational, convention: Convention) -> Self {
        let mut num = x.numer().clone();
        let mut den = x.denom().clone();
        let (b0, r) = num.div_mod_floor(&den);
        let mut coeffs = Vec::new();
        num = den;
        den = r;
        while !den.is_zero() {
            let (b, r) = num.div_mod_floor(&den);
            coeffs.push(b);
            num = den;
            den = r;
        }
        ContinuedFraction {
            b0,
            coeffs,
            convention: Convention::LastAtLeastTwo,
        }
        .to_convention(convention)
    }

    /// Builds an expansion from explicit partial quotients. The
    /// convention is inferred from the last coefficient.
    pub fn from_parts(b0: Integer, coeffs: Vec<Integer>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|b| !b.is_positive()) {
            return Err(Error::MalformedContinuedFraction(format!(
                "partial quotient {bad} is not positive"
            )));
        }
        let convention = match coeffs.last() {
            Some(last) if last.is_one() => Convention::LastEqualsOne,
            _ => Convention::LastAtLeastTwo,
        };
        Ok(ContinuedFraction {
            b0,
            coeffs,
            convention,
        })
    }

    /// Canonical `LastAtLeastTwo` form of `[b0; raw...]`, where `raw` may
    /// hold interior zeros. Uses `[..., x, 0, y, ...] = [..., x + y, ...]`.
    fn canonical(b0: Integer, raw: Vec<Integer>) -> Self {
        let mut terms = Vec::with_capacity(raw.len() + 1);
        terms.push(b0);
        let mut pending_splice = false;
        for b in raw {
            if pending_splice {
                *terms.last_mut().expect("nonempty") += b;
                pending_splice = false;
            } else if b.is_zero() {
                pending_splice = true;
            } else {
                terms.push(b);
            }
        }
        debug_assert!(!pending_splice, "trailing zero partial quotient");
        if terms.len() >= 2 && terms.last().is_some_and(|b| b.is_one()) {
            terms.pop();
            *terms.last_mut().expect("nonempty") += 1u32;
        }
        let mut it = terms.into_iter();
        let b0 = it.next().expect("nonempty");
        ContinuedFraction {
            b0,
            coeffs: it.collect(),
            convention: Convention::LastAtLeastTwo,
        }
    }

    /// The same value written under `convention`.
    pub fn to_convention(&self, convention: Convention) -> Self {
        let base = if self.convention == Convention::LastAtLeastTwo {
            self.clone()
        } else {
            Self::canonical(self.b0.clone(), self.coeffs.clone())
        };
        match convention {
            Convention::LastAtLeastTwo => base,
            Convention::LastEqualsOne => {
                let ContinuedFraction {
                    mut b0, mut coeffs, ..
                } = base;
                match coeffs.last_mut() {
                    Some(last) => *last -= 1u32,
                    None => b0 -= 1u32,
                }
                coeffs.push(Integer::one());
                ContinuedFraction {
                    b0,
                    coeffs,
                    convention,
                }
            }
        }
    }

    pub fn b0(&self) -> &Integer {
        &self.b0
    }

    /// `b1, ..., bk`.
    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Partial quotient `b_i` for `0 <= i <= k`.
    pub fn coeff(&self, i: usize) -> &Integer {
        if i == 0 {
            &self.b0
        } else {
            &self.coeffs[i - 1]
        }
    }

    /// Number of partial quotients after `b0`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Exact value; evaluated from the innermost quotient outwards.
    pub fn value(&self) -> Rational {
        let mut num = Integer::one();
        let mut den = Integer::zero();
        for b in self.coeffs.iter().rev().chain(std::iter::once(&self.b0)) {
            // b + den/num
            let next = b * &num + &den;
            den = num;
            num = next;
        }
        Rational::new_reduced(num, den)
    }

    /// Convergents for `j = 0..=k`; the last one equals [`Self::value`].
    pub fn convergents(&self) -> Vec<Convergent> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let (mut h_prev, mut k_prev) = (Integer::zero(), Integer::one());
        let (mut h, mut k) = (Integer::one(), Integer::zero());
        for (j, b) in std::iter::once(&self.b0).chain(&self.coeffs).enumerate() {
            let h_next = b * &h + &h_prev;
            let k_next = b * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            out.push(Convergent {
                j: j as isize,
                h: h.clone(),
                k: k.clone(),
            });
        }
        out
    }

    /// `-x`.
    pub fn negate(&self) -> Self {
        let cf = self.to_convention(Convention::LastAtLeastTwo);
        let out = if cf.coeffs.is_empty() {
            ContinuedFraction { b0: -cf.b0, ..cf }
        } else {
            // -[c0; c1, c2, ...] = [-c0 - 1; 1, c1 - 1, c2, ...]
            let mut raw = Vec::with_capacity(cf.coeffs.len() + 1);
            raw.push(Integer::one());
            let mut rest = cf.coeffs.into_iter();
            raw.push(rest.next().expect("k >= 1") - 1u32);
            raw.extend(rest);
            Self::canonical(-cf.b0 - 1u32, raw)
        };
        out.to_convention(self.convention)
    }

    /// `1/x`, for `x > 0`.
    fn reciprocal_positive(&self) -> Self {
        let cf = self.to_convention(Convention::LastAtLeastTwo);
        debug_assert!(cf.b0.is_positive() || (cf.b0.is_zero() && !cf.coeffs.is_empty()));
        if cf.b0.is_zero() {
            let mut rest = cf.coeffs.into_iter();
            let b0 = rest.next().expect("x > 0");
            Self::canonical(b0, rest.collect())
        } else {
            let mut raw = Vec::with_capacity(cf.coeffs.len() + 1);
            raw.push(cf.b0);
            raw.extend(cf.coeffs);
            Self::canonical(Integer::zero(), raw)
        }
    }

    /// Expansion of `-q/a` from the expansion of `a/q`, built by the
    /// negation and reciprocal identities alone (no re-expansion). The
    /// result keeps the input's convention.
    pub fn negate_reciprocal(&self) -> Result<Self> {
        let positive = if self.b0.is_positive() {
            true
        } else if self.b0.is_zero() {
            if self.coeffs.is_empty() {
                return Err(Error::InvalidParameter("a = 0 has no reciprocal"));
            }
            true
        } else {
            false
        };
        let out = if positive {
            self.reciprocal_positive().negate()
        } else {
            self.negate().reciprocal_positive()
        };
        Ok(out.to_convention(self.convention))
    }
}

pub fn cf_expand(x: &Rational, convention: Convention) -> ContinuedFraction {
    ContinuedFraction::expand(x, convention)
}

pub fn cf_value(cf: &ContinuedFraction) -> Rational {
    cf.value()
}

pub fn convergents(cf: &ContinuedFraction) -> Vec<Convergent> {
    cf.convergents()
}

pub fn negate_reciprocal_cf(cf: &ContinuedFraction) -> Result<ContinuedFraction> {
    cf.negate_reciprocal()
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.b0)?;
        for (i, b) in self.coeffs.iter().enumerate() {
            f.write_str(if i == 0 { ";" } else { "," })?;
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// Parses `[b0;b1,...,bk]` or `[b0]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedContinuedFraction(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (head, tail) = match inner.split_once(';') {
            Some((h, t)) => (h, Some(t)),
            None => (inner, None),
        };
        let b0: Integer = head.trim().parse().map_err(|_| bad())?;
        let coeffs = match tail {
            None => Vec::new(),
            Some(t) => t
                .split(',')
                .map(|c| c.trim().parse::<Integer>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?,
        };
        Self::from_parts(b0, coeffs)
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which side of `x` an approximation lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Below,
    Above,
}

/// Side filter for candidate and solution enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideFilter {
    Below,
    Above,
    Both,
}

impl SideFilter {
    fn admits(self, side: Side) -> bool {
        match self {
            SideFilter::Both => true,
            SideFilter::Below => side == Side::Below,
            SideFilter::Above => side == Side::Above,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CandidateKind {
    Convergent { j: isize },
    SemiConvergent { j: isize, g: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxCandidate {
    pub fraction: Rational,
    pub kind: CandidateKind,
    pub side: Side,
}

/// A reduced solution `c/d` of `0 < |x - c/d| < 1/d^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxSolution {
    pub fraction: Rational,
    pub side: Side,
    pub kind: CandidateKind,
    /// `d^2 |x - c/d|`.
    pub gap_eps: Rational,
    /// `d |a d - c q|` for `x = a/q`.
    pub gap_num: Integer,
    /// `#{t >= 1 : t^2 gap_num < q}`.
    pub multiplicity: Integer,
}

fn side_of(j: isize) -> Side {
    if j.rem_euclid(2) == 0 {
        Side::Below
    } else {
        Side::Above
    }
}

/// Raw candidate `(c, d, kind, side)` tuples, sorted by `(d, c)`.
fn candidate_pairs(
    x: &Rational,
    filter: SideFilter,
) -> Vec<(Integer, Integer, CandidateKind, Side)> {
    let cf = ContinuedFraction::expand(x, Convention::LastAtLeastTwo);
    let k = cf.len();
    let mut convs = Vec::with_capacity(k + 2);
    convs.push(Convergent::seed());
    convs.extend(cf.convergents());
    // convs[j + 1] is the convergent with index j.
    let mut out = Vec::new();
    for j in 0..k as isize {
        let side = side_of(j);
        if filter.admits(side) {
            let c = &convs[(j + 1) as usize];
            out.push((
                c.h.clone(),
                c.k.clone(),
                CandidateKind::Convergent { j },
                side,
            ));
        }
    }
    for j in -1..(k as isize - 1) {
        let side = side_of(j);
        if !filter.admits(side) {
            continue;
        }
        let b = cf.coeff((j + 2) as usize);
        if *b < Integer::from(2u32) {
            continue;
        }
        let lo = &convs[(j + 1) as usize];
        let hi = &convs[(j + 2) as usize];
        let last = b - 1u32;
        let mut gs = vec![Integer::one()];
        if !last.is_one() {
            gs.push(last);
        }
        for g in gs {
            let c = &lo.h + &g * &hi.h;
            let d = &lo.k + &g * &hi.k;
            let g = g.to_u64().unwrap_or(u64::MAX);
            out.push((c, d, CandidateKind::SemiConvergent { j, g }, side));
        }
    }
    out.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
    out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    out
}

/// Convergents (other than `x`) and the `g = 1`, `g = b_{j+2} - 1`
/// semi-convergents on the requested side, sorted by denominator.
pub fn approx_candidates(x: &Rational, filter: SideFilter) -> Vec<ApproxCandidate> {
    candidate_pairs(x, filter)
        .into_iter()
        .map(|(c, d, kind, side)| ApproxCandidate {
            fraction: Rational::new_reduced(c, d),
            kind,
            side,
        })
        .collect()
}

/// `(c, d, kind, side, gap_num)` for every candidate with
/// `d |a d - c q| < q`.
fn solution_pairs(
    x: &Rational,
    filter: SideFilter,
) -> Vec<(Integer, Integer, CandidateKind, Side, Integer)> {
    let (a, q) = (x.numer(), x.denom());
    candidate_pairs(x, filter)
        .into_iter()
        .filter_map(|(c, d, kind, side)| {
            let gap = (a * &d - &c * q).abs() * &d;
            (gap < *q).then_some((c, d, kind, side, gap))
        })
        .collect()
}

fn multiplicity(q: &Integer, gap_num: &Integer) -> Integer {
    isqrt(&((q - 1u32) / gap_num)).expect("nonnegative")
}

/// Sum of multiplicities of the solutions below `x`, without
/// materializing the solution records.
pub(crate) fn below_multiplicity_sum(x: &Rational) -> Integer {
    solution_pairs(x, SideFilter::Below)
        .iter()
        .map(|(.., gap)| multiplicity(x.denom(), gap))
        .sum()
}

/// Reduced solutions of `0 != |x - c/d| < 1/d^2` on the requested side.
pub fn approx_solutions(x: &Rational, filter: SideFilter) -> Vec<ApproxSolution> {
    let q = x.denom();
    solution_pairs(x, filter)
        .into_iter()
        .map(|(c, d, kind, side, gap_num)| ApproxSolution {
            fraction: Rational::new_reduced(c, d),
            side,
            kind,
            gap_eps: Rational::new(gap_num.clone(), q.clone()).expect("q > 0"),
            multiplicity: multiplicity(q, &gap_num),
            gap_num,
        })
        .collect()
}

/// Reduced `c/d` with `0 < x - c/d < 1/d^2`, with gap data and blow-up
/// multiplicities relative to `q = denom(x)`.
pub fn best_approx_below(x: &Rational) -> Vec<ApproxSolution> {
    approx_solutions(x, SideFilter::Below)
}

/// `d^2 |x - c/d|`.
pub fn khinchin_eps(x: &Rational, cd: &Rational) -> Result<Rational> {
    if x == cd {
        return Err(Error::Coincident);
    }
    let d = Rational::from_integer(cd.denom().clone());
    Ok(&(&d * &d) * &(x - cd).abs())
}

/// Direct scan over `d = 1..=d_max` of the best candidate numerator on
/// each side. Test oracle for [`approx_candidates`] completeness.
pub fn best_approx_bruteforce(x: &Rational, d_max: u64, filter: SideFilter) -> Vec<Rational> {
    let (a, q) = (x.numer(), x.denom());
    let mut out = Vec::new();
    if let (Some(a), Some(q), true) = (a.to_i64(), q.to_i64(), d_max <= u32::MAX as u64) {
        // a d = (s d + t) q + r with r = (a mod q) d mod q tracked incrementally
        let (s, a_mod) = (a.div_euclid(q) as i128, a.rem_euclid(q) as u64);
        let qu = q as u64;
        let (mut r, mut t) = (0u64, 0i128);
        let hit = |c: i128, d: u64, out: &mut Vec<Rational>| {
            if gcd_i128(c, d as i128) == 1 {
                out.push(Rational::new_reduced(c.into(), d.into()));
            }
        };
        for d in 1..=d_max {
            r += a_mod;
            if r >= qu {
                r -= qu;
                t += 1;
            }
            let base = s * d as i128 + t;
            if filter.admits(Side::Below) {
                let (c, diff) = if r > 0 { (base, r) } else { (base - 1, qu) };
                if (d as u128) * (diff as u128) < qu as u128 {
                    hit(c, d, &mut out);
                }
            }
            if filter.admits(Side::Above) && (d as u128) * ((qu - r) as u128) < qu as u128 {
                hit(base + 1, d, &mut out);
            }
        }
        return out;
    }
    scan_big(a, q, d_max, filter)
}

fn scan_big(a: &Integer, q: &Integer, d_max: u64, filter: SideFilter) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut d = Integer::one();
    let d_max = Integer::from(d_max);
    while d <= d_max {
        let ad = a * &d;
        if filter.admits(Side::Below) {
            let c = (&ad - 1u32).div_floor(q);
            if &d * (&ad - &c * q) < *q && gcd(&c, &d).is_one() {
                out.push(Rational::new_reduced(c, d.clone()));
            }
        }
        if filter.admits(Side::Above) {
            let c = ad.div_floor(q) + 1u32;
            if &d * (&c * q - &ad) < *q && gcd(&c, &d).is_one() {
                out.push(Rational::new_reduced(c, d.clone()));
            }
        }
        d += 1u32;
    }
    out
}

pub fn best_approx_below_bruteforce(x: &Rational, d_max: u64) -> Vec<Rational> {
    best_approx_bruteforce(x, d_max, SideFilter::Below)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
