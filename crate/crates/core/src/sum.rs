//! The congruence sum
//!
//! `S(a/q) = #{(m, n) : 0 < m, n <= q, a m = n (mod q), m n < q}`
//!
//! computed by direct enumeration, by counting best approximations from
//! below, and through its continued-fraction main term.

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{check_coprime, gcd, isqrt, normalize_mod, Integer, Rational};
use crate::contfrac::{self, ApproxSolution, ContinuedFraction, Convention, SideFilter};
use crate::error::{Error, Result};

/// Validates `(a, q)` and returns `a mod q`.
fn reduced_numerator(a: &Integer, q: &Integer) -> Result<Integer> {
    check_coprime(a, q)?;
    normalize_mod(a, q)
}

/// Brute-force count over `m = 1..q`. O(q).
pub fn s_bruteforce(a: &Integer, q: &Integer) -> Result<Integer> {
    let a = reduced_numerator(a, q)?;
    if let (Some(a), Some(q)) = (a.to_u64(), q.to_u64()) {
        if q < 1 << 63 {
            return Ok(bruteforce_u64(a, q).into());
        }
    }
    Ok(bruteforce_big(&a, q))
}

fn bruteforce_big(a: &Integer, q: &Integer) -> Integer {
    let mut count = Integer::zero();
    let mut n = Integer::zero();
    let mut m = Integer::one();
    while &m < q {
        n += a;
        if &n >= q {
            n -= q;
        }
        if &m * &n < *q {
            count += 1u32;
        }
        m += 1u32;
    }
    count
}

fn bruteforce_u64(a: u64, q: u64) -> u64 {
    let mut count = 0;
    let mut n = 0u64;
    for m in 1..q {
        n += a;
        if n >= q {
            n -= q;
        }
        count += ((m as u128) * (n as u128) < q as u128) as u64;
    }
    count
}

/// One point `(m, a m mod q)` of the line in `(Z/qZ)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticePoint {
    pub m: u64,
    pub n: u64,
    /// `m n < q`.
    pub below_hyperbola: bool,
}

/// The `q - 1` points `(m, a m mod q)` for `m = 1..q`.
pub fn lattice_points(a: &Integer, q: &Integer) -> Result<Vec<LatticePoint>> {
    let a = reduced_numerator(a, q)?;
    let (a, q) = match (a.to_u64(), q.to_u64()) {
        (Some(a), Some(q)) if q < 1 << 63 => (a, q),
        _ => return Err(Error::InvalidParameter("q too large to enumerate")),
    };
    let mut n = 0u64;
    Ok((1..q)
        .map(|m| {
            n += a;
            if n >= q {
                n -= q;
            }
            LatticePoint {
                m,
                n,
                below_hyperbola: (m as u128) * (n as u128) < q as u128,
            }
        })
        .collect())
}

/// `S(a/q)` as the sum of blow-up multiplicities of the reduced best
/// approximations from below. Cost is linear in the continued-fraction
/// length of `a/q`.
pub fn s_fast(a: &Integer, q: &Integer) -> Result<Integer> {
    let a = reduced_numerator(a, q)?;
    let x = Rational::new_reduced(a, q.clone());
    Ok(contfrac::below_multiplicity_sum(&x))
}

/// `(c/d, eps, weight)` for every reduced solution below `a/q`, where
/// `weight = #{t >= 1 : t^2 eps < 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedTerm {
    pub fraction: Rational,
    pub eps: Rational,
    #[serde(serialize_with = "crate::ser::integer")]
    pub weight: Integer,
}

pub fn s_weighted_terms(a: &Integer, q: &Integer) -> Result<Vec<WeightedTerm>> {
    let a = reduced_numerator(a, q)?;
    let x = Rational::new_reduced(a, q.clone());
    Ok(contfrac::best_approx_below(&x)
        .into_iter()
        .map(|s: ApproxSolution| WeightedTerm {
            fraction: s.fraction,
            eps: s.gap_eps,
            weight: s.multiplicity,
        })
        .collect())
}

/// `S(a/q)` split into `sum_j [sqrt(b_{2j+1})]` and the remainder `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumDecomposition {
    pub s_value: Integer,
    pub cf: ContinuedFraction,
    pub main_term: Integer,
    pub error_e: Integer,
    /// `(3/2) k + 1`.
    pub bound: Rational,
}

impl SumDecomposition {
    pub fn upper_bound_holds(&self) -> bool {
        Rational::from_integer(self.error_e.clone()) <= self.bound
    }

    pub fn lower_bound_holds(&self) -> bool {
        !self.error_e.is_negative()
    }
}

/// Decomposes `S(a/q)` along the expansion `[0; b1, ..., bk]` of
/// `(a mod q)/q` under `convention`.
pub fn theorem2_decompose(
    a: &Integer,
    q: &Integer,
    convention: Convention,
) -> Result<SumDecomposition> {
    let a = reduced_numerator(a, q)?;
    if *q < Integer::from(2u32) {
        return Err(Error::InvalidParameter("q must be at least 2"));
    }
    let s_value = s_fast(&a, q)?;
    Ok(decompose_with_sum(&a, q, s_value, convention))
}

/// Decomposition of an already computed `S(a/q)`; `a` must be reduced
/// into `[1, q)`.
pub(crate) fn decompose_with_sum(
    a: &Integer,
    q: &Integer,
    s_value: Integer,
    convention: Convention,
) -> SumDecomposition {
    let cf = ContinuedFraction::expand(&Rational::new_reduced(a.clone(), q.clone()), convention);
    let main_term: Integer = cf
        .coeffs()
        .iter()
        .step_by(2)
        .map(|b| isqrt(b).expect("positive quotient"))
        .sum();
    let k = cf.len() as i64;
    let bound = Rational::from_i64(3 * k + 2, 2).expect("nonzero denominator");
    SumDecomposition {
        error_e: &s_value - &main_term,
        s_value,
        cf,
        main_term,
        bound,
    }
}

/// `sqrt(num / den)` kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtRatio {
    pub num: Integer,
    pub den: Integer,
}

impl SqrtRatio {
    pub fn to_f64(&self) -> f64 {
        Rational::new(self.num.clone(), self.den.clone())
            .expect("den > 0")
            .to_f64()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReciprocityKind {
    /// `S(a/q) - S(-q/a) = sqrt(q/a) + E+`.
    Plus,
    /// `S(-a/q) - S(q/a) = E-`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocityReport {
    pub kind: ReciprocityKind,
    pub a: Integer,
    pub q: Integer,
    pub s_left: Integer,
    pub s_right: Integer,
    /// Present for [`ReciprocityKind::Plus`].
    pub main: Option<SqrtRatio>,
    /// Euclid steps of `q/a`, i.e. the expansion length of `a/q`, under
    /// each convention. The two differ by one.
    pub k_last2: usize,
    pub k_last1: usize,
}

impl ReciprocityReport {
    pub fn difference(&self) -> Integer {
        &self.s_left - &self.s_right
    }

    pub fn k_len(&self, convention: Convention) -> usize {
        match convention {
            Convention::LastAtLeastTwo => self.k_last2,
            Convention::LastEqualsOne => self.k_last1,
        }
    }

    /// `(3/2) k + 3`.
    pub fn bound(&self, convention: Convention) -> Rational {
        Rational::from_i64(3 * self.k_len(convention) as i64 + 6, 2).expect("nonzero denominator")
    }

    /// Residual `E+` or `E-` in floating point, for display.
    pub fn residual_f64(&self) -> f64 {
        let d = self.difference().to_f64().unwrap_or(f64::NAN);
        match &self.main {
            Some(root) => d - root.to_f64(),
            None => d,
        }
    }

    /// Exact `|residual| <= bound`.
    pub fn within_bound(&self, convention: Convention) -> bool {
        let bound = self.bound(convention);
        let d = Rational::from_integer(self.difference());
        match &self.main {
            None => d.abs() <= bound,
            Some(root) => {
                use std::cmp::Ordering::*;
                let hi = &d + &bound;
                let lo = &d - &bound;
                crate::arith::cmp_sqrt_ratio(&root.num, &root.den, &hi) != Greater
                    && crate::arith::cmp_sqrt_ratio(&root.num, &root.den, &lo) != Less
            }
        }
    }
}

fn check_reciprocity_args(a: &Integer, q: &Integer) -> Result<()> {
    check_coprime(a, q)?;
    if !a.is_positive() || a >= q {
        return Err(Error::OutOfRange {
            a: a.to_string(),
            q: q.to_string(),
        });
    }
    Ok(())
}

fn euclid_lengths(a: &Integer, q: &Integer) -> (usize, usize) {
    let k = ContinuedFraction::expand(
        &Rational::new_reduced(a.clone(), q.clone()),
        Convention::LastAtLeastTwo,
    )
    .len();
    (k, k + 1)
}

/// `S(a/q) - S(-q/a)` against `sqrt(q/a)`, for `1 <= a < q`.
pub fn reciprocity_fp(a: &Integer, q: &Integer) -> Result<ReciprocityReport> {
    check_reciprocity_args(a, q)?;
    let (k_last2, k_last1) = euclid_lengths(a, q);
    Ok(ReciprocityReport {
        kind: ReciprocityKind::Plus,
        s_left: s_fast(a, q)?,
        s_right: s_fast(&-q, a)?,
        main: Some(SqrtRatio {
            num: q.clone(),
            den: a.clone(),
        }),
        a: a.clone(),
        q: q.clone(),
        k_last2,
        k_last1,
    })
}

/// `S(-a/q) - S(q/a)`, for `1 <= a < q`.
pub fn reciprocity_sp(a: &Integer, q: &Integer) -> Result<ReciprocityReport> {
    check_reciprocity_args(a, q)?;
    let (k_last2, k_last1) = euclid_lengths(a, q);
    Ok(ReciprocityReport {
        kind: ReciprocityKind::Minus,
        s_left: s_fast(&-a, q)?,
        s_right: s_fast(q, a)?,
        main: None,
        a: a.clone(),
        q: q.clone(),
        k_last2,
        k_last1,
    })
}

/// `#{(m, n, sign) : m, n > 0, m n < q, gcd(m, n) = 1, a m = sign n (mod q)}`
/// by direct enumeration. O(q).
///
/// The two congruence signs are counted separately. They only select the
/// same pair when `n = q - n`, which for coprime `a` happens only for
/// `q = 2`; there `1/2` has the two solutions `0/1` and `1/1`.
pub fn s_coprime_twosided(a: &Integer, q: &Integer) -> Result<Integer> {
    let a = reduced_numerator(a, q)?;
    if let (Some(a), Some(q)) = (a.to_u64(), q.to_u64()) {
        if q < 1 << 63 {
            return Ok(coprime_twosided_u64(a, q).into());
        }
    }
    Ok(coprime_twosided_big(&a, q))
}

fn coprime_twosided_big(a: &Integer, q: &Integer) -> Integer {
    let mut count = Integer::zero();
    let mut n = Integer::zero();
    let mut m = Integer::one();
    while &m < q {
        n += a;
        if &n >= q {
            n -= q;
        }
        let minus = q - &n;
        if &m * &n < *q && gcd(&m, &n).is_one() {
            count += 1u32;
        }
        if &m * &minus < *q && gcd(&m, &minus).is_one() {
            count += 1u32;
        }
        m += 1u32;
    }
    count
}

fn coprime_twosided_u64(a: u64, q: u64) -> u64 {
    let mut count = 0;
    let mut n = 0u64;
    for m in 1..q {
        n += a;
        if n >= q {
            n -= q;
        }
        let minus = q - n;
        let (mm, qq) = (m as u128, q as u128);
        if mm * (n as u128) < qq && m.gcd(&n) == 1 {
            count += 1;
        }
        if mm * (minus as u128) < qq && m.gcd(&minus) == 1 {
            count += 1;
        }
    }
    count
}

/// `#{reduced c/d : 0 != |a/q - c/d| < 1/d^2}`, optionally restricted to
/// `gcd(d, q) = 1`.
pub fn approx_twosided_count(
    a: &Integer,
    q: &Integer,
    require_d_coprime_q: bool,
) -> Result<Integer> {
    Ok(twosided_solutions(a, q, require_d_coprime_q)?.len().into())
}

/// The solution set counted by [`approx_twosided_count`].
pub fn twosided_solutions(
    a: &Integer,
    q: &Integer,
    require_d_coprime_q: bool,
) -> Result<Vec<ApproxSolution>> {
    let a = reduced_numerator(a, q)?;
    let x = Rational::new_reduced(a, q.clone());
    let mut sols = contfrac::approx_solutions(&x, SideFilter::Both);
    if require_d_coprime_q {
        sols.retain(|s| gcd(s.fraction.denom(), q).is_one());
    }
    Ok(sols)
}
