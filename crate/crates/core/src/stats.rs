//! Averages and counts over all reduced residues of a fixed modulus.
//!
//! Everything is accumulated exactly; the `f64` fields exist only so the
//! reports can be compared against asymptotic predictions.

use num_traits::{ToPrimitive, Zero};

use crate::arith::{Integer, Rational};
use crate::contfrac::CandidateKind;
use crate::error::{Error, Result};
use crate::sum::{s_coprime_twosided, s_fast, twosided_solutions};

/// `(prime, exponent)` pairs by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    matches!(factorize(n).as_slice(), [(p, 1)] if *p == n)
}

fn nonzero(n: u64) -> Result<u64> {
    if n == 0 {
        Err(Error::ZeroArgument)
    } else {
        Ok(n)
    }
}

fn require_prime(q: u64) -> Result<()> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(Error::NotPrime(q))
    }
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let n = nonzero(n)?;
    Ok(factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1)))
}

/// `sum_{d | n} 1/d`.
pub fn sigma_minus_one(n: u64) -> Result<Rational> {
    let n = nonzero(n)?;
    // sigma_{-1}(n) = sigma_1(n) / n
    let sigma1: u128 = factorize(n)
        .into_iter()
        .map(|(p, e)| (0..=e).map(|i| (p as u128).pow(i)).sum::<u128>())
        .product();
    Rational::new(sigma1.into(), n.into())
}

pub fn divisor_count(n: u64) -> Result<u64> {
    let n = nonzero(n)?;
    Ok(factorize(n)
        .into_iter()
        .map(|(_, e)| e as u64 + 1)
        .product())
}

/// `sum_{n <= x} d(n) = sum_{k <= x} floor(x / k)`.
pub fn divisor_summatory(x: u64) -> Integer {
    (1..=x).map(|k| Integer::from(x / k)).sum()
}

fn coprime_residues(q: u64) -> impl Iterator<Item = u64> {
    use num_integer::Integer as _;
    (1..q).filter(move |a| a.gcd(&q) == 1)
}

/// Mean of `S(a/q)` over reduced residues, against
/// `phi(q) sigma_{-1}(q) / q * ln q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageReport {
    pub q: u64,
    pub phi: u64,
    pub sigma_minus1: Rational,
    pub sum_s: Integer,
    pub mean_s: Rational,
    pub predicted_main: f64,
    pub ratio: f64,
    pub max_s: Integer,
    pub a_star: u64,
}

pub fn average_s(q: u64) -> Result<AverageReport> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be at least 2"));
    }
    let phi = euler_phi(q)?;
    let sigma_minus1 = sigma_minus_one(q)?;
    let qi = Integer::from(q);
    let mut sum_s = Integer::zero();
    let mut best: Option<(u64, Integer)> = None;
    for a in coprime_residues(q) {
        let s = s_fast(&a.into(), &qi)?;
        sum_s += &s;
        if best.as_ref().is_none_or(|(_, m)| s > *m) {
            best = Some((a, s));
        }
    }
    let (a_star, max_s) = best.expect("q >= 2 has a unit");
    let mean_s = Rational::new(sum_s.clone(), phi.into())?;
    let predicted_main = phi as f64 * sigma_minus1.to_f64() / q as f64 * (q as f64).ln();
    Ok(AverageReport {
        q,
        phi,
        ratio: mean_s.to_f64() / predicted_main,
        sigma_minus1,
        sum_s,
        mean_s,
        predicted_main,
        max_s,
        a_star,
    })
}

/// `(sum_{(a,q)=1} S(a/q), sum_{n<q} d(n))` for prime `q`.
pub fn divisor_identity_check(q: u64) -> Result<(Integer, Integer)> {
    require_prime(q)?;
    let qi = Integer::from(q);
    let mut lhs = Integer::zero();
    for a in coprime_residues(q) {
        lhs += s_fast(&a.into(), &qi)?;
    }
    Ok((lhs, divisor_summatory(q - 1)))
}

/// Mean number of coprime two-sided solutions, with `12/pi^2 ln q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArdAverage {
    pub q: u64,
    pub mean: Rational,
    pub predicted: f64,
}

impl ArdAverage {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64()
    }
}

pub fn ard_average(q: u64) -> Result<ArdAverage> {
    require_prime(q)?;
    let qi = Integer::from(q);
    let mut total = Integer::zero();
    for a in coprime_residues(q) {
        total += s_coprime_twosided(&a.into(), &qi)?;
    }
    Ok(ArdAverage {
        q,
        mean: Rational::new(total, (q - 1).into())?,
        predicted: 12.0 / (std::f64::consts::PI * std::f64::consts::PI) * (q as f64).ln(),
    })
}

/// How many two-sided solutions are convergents rather than
/// semi-convergents.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergentShare {
    pub convergents: Integer,
    pub total: Integer,
}

impl ConvergentShare {
    pub fn fraction(&self) -> Option<Rational> {
        if self.total.is_zero() {
            None
        } else {
            Rational::new(self.convergents.clone(), self.total.clone()).ok()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.fraction().map_or(f64::NAN, |r| r.to_f64())
    }
}

/// Convergent share among the two-sided solutions of a single `a/q`.
pub fn convergent_split(a: &Integer, q: &Integer) -> Result<ConvergentShare> {
    let sols = twosided_solutions(a, q, false)?;
    let convergents = sols
        .iter()
        .filter(|s| matches!(s.kind, CandidateKind::Convergent { .. }))
        .count();
    Ok(ConvergentShare {
        convergents: convergents.into(),
        total: sols.len().into(),
    })
}

/// Convergent share pooled over every reduced residue mod prime `q`.
pub fn convergent_fraction(q: u64) -> Result<ConvergentShare> {
    require_prime(q)?;
    let qi = Integer::from(q);
    let mut pooled = ConvergentShare {
        convergents: Integer::zero(),
        total: Integer::zero(),
    };
    for a in coprime_residues(q) {
        let s = convergent_split(&a.into(), &qi)?;
        pooled.convergents += s.convergents;
        pooled.total += s.total;
    }
    Ok(pooled)
}

/// Maximizer of `S(a/q)` over reduced residues; smallest `a` on ties.
pub fn max_s(q: u64) -> Result<(u64, Integer)> {
    if q < 2 {
        return Err(Error::InvalidParameter("q must be at least 2"));
    }
    let qi = Integer::from(q);
    let mut best: Option<(u64, Integer)> = None;
    for a in coprime_residues(q) {
        let s = s_fast(&a.into(), &qi)?;
        if best.as_ref().is_none_or(|(_, m)| s > *m) {
            best = Some((a, s));
        }
    }
    Ok(best.expect("q >= 2 has a unit"))
}

/// Lossy but convenient for reports.
pub fn to_f64(n: &Integer) -> f64 {
    n.to_f64().unwrap_or(f64::NAN)
}
