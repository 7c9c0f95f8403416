//! Explicit witnesses for the density of `(a/q, S(a/q) / ln^kappa(2 + q))`.
//!
//! Given a target `(x, y)`, fix an even-length prefix `[0; b1..b2r]` close
//! to the fractional part of `x` and append `[m, n]` with
//! `n = floor(exp(m^(1/(2 kappa)) y^(-1/kappa)))`. The main term of `S` is
//! then dominated by `[sqrt(m)]` while `ln q` is dominated by `ln n`, so
//! the normalized value tends to `y` as `m` grows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::arith::{ln_big, Integer, Rational};
use crate::contfrac::{ContinuedFraction, Convention};
use crate::error::{Error, Result};
use crate::sum::s_fast;

/// Largest `m` tried before giving up.
pub const DEFAULT_MAX_M: u64 = 1_000_000_000_000;

/// Bisection steps spent between two geometric iterates that straddle `y`.
const REFINE_STEPS: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub target_x: Rational,
    pub target_y: f64,
    pub kappa: f64,
    pub eps: f64,
    /// `b1, ..., b2r`.
    pub prefix: Vec<Integer>,
    pub achieved_fraction: Rational,
    pub s_value: Integer,
    /// `S(a/q) / ln^kappa(2 + q)`.
    pub achieved_value: f64,
    pub m_used: Integer,
    pub n_used: Integer,
}

/// `floor(e^t)` for `t >= 0`, accurate to f64 relative precision when the
/// result exceeds 2^53.
pub(crate) fn floor_exp(t: f64) -> Integer {
    if t < 700.0 {
        return BigInt::from_f64(t.exp().floor()).unwrap_or_else(Integer::zero);
    }
    let log2 = t / std::f64::consts::LN_2;
    let whole = log2.floor();
    let mantissa = (log2 - whole).exp2() * (1u64 << 52) as f64;
    let mantissa = BigInt::from_f64(mantissa.floor()).expect("finite mantissa");
    let shift = whole as i64 - 52;
    if shift >= 0 {
        mantissa << shift as u64
    } else {
        mantissa >> (-shift) as u64
    }
}

fn exact(v: f64) -> Rational {
    Rational::from_inner(BigRational::from_float(v).expect("finite"))
}

/// Shortest even-length truncation of the expansion of `frac` within
/// `half_eps`. An expansion of either convention has even length, so an
/// exact prefix always exists.
fn even_prefix(frac: &Rational, half_eps: &Rational) -> Vec<Integer> {
    let last2 = ContinuedFraction::expand(frac, Convention::LastAtLeastTwo);
    let full = if last2.len().is_multiple_of(2) {
        last2
    } else {
        last2.to_convention(Convention::LastEqualsOne)
    };
    let coeffs = full.coeffs();
    for r in 0..=coeffs.len() / 2 {
        let prefix = coeffs[..2 * r].to_vec();
        let value = ContinuedFraction::from_parts(Integer::zero(), prefix.clone())
            .expect("positive quotients")
            .value();
        if (frac - &value).abs() <= *half_eps {
            return prefix;
        }
    }
    coeffs.to_vec()
}

struct Setup {
    x: Rational,
    floor_x: Integer,
    prefix: Vec<Integer>,
    eps_exact: Rational,
    y: f64,
    kappa: f64,
    eps: f64,
}

impl Setup {
    fn evaluate(&self, m: u64) -> DensityResult {
        let exponent = (m as f64).powf(1.0 / (2.0 * self.kappa)) * self.y.powf(-1.0 / self.kappa);
        let n = floor_exp(exponent).max(Integer::one());
        let m_big = Integer::from(m);
        let mut coeffs = self.prefix.clone();
        coeffs.push(m_big.clone());
        coeffs.push(n.clone());
        let tail = ContinuedFraction::from_parts(Integer::zero(), coeffs)
            .expect("positive quotients")
            .value();
        let fraction = &Rational::from_integer(self.floor_x.clone()) + &tail;
        let s_value = s_fast(fraction.numer(), fraction.denom()).expect("reduced fraction");
        let ln = ln_big(&(fraction.denom() + 2u32));
        let achieved_value = s_value.to_f64().unwrap_or(f64::NAN) / ln.powf(self.kappa);
        DensityResult {
            target_x: self.x.clone(),
            target_y: self.y,
            kappa: self.kappa,
            eps: self.eps,
            prefix: self.prefix.clone(),
            achieved_fraction: fraction,
            s_value,
            achieved_value,
            m_used: m_big,
            n_used: n,
        }
    }

    fn accepts(&self, r: &DensityResult) -> bool {
        (&r.achieved_fraction - &self.x).abs() < self.eps_exact
            && (r.achieved_value - self.y).abs() < self.eps
    }
}

pub fn density_construct(x: &Rational, y: f64, kappa: f64, eps: f64) -> Result<DensityResult> {
    density_construct_with_budget(x, y, kappa, eps, DEFAULT_MAX_M)
}

/// Searches `m = 1, 2, 4, ...` up to `max_m`, bisecting between
/// consecutive iterates whose normalized values straddle `y`.
pub fn density_construct_with_budget(
    x: &Rational,
    y: f64,
    kappa: f64,
    eps: f64,
    max_m: u64,
) -> Result<DensityResult> {
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidParameter("kappa must exceed 1"));
    }
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::InvalidParameter("y must be positive"));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    if max_m == 0 {
        return Err(Error::InvalidParameter("budget must allow m >= 1"));
    }
    let floor_x = x.floor();
    let frac = x - &Rational::from_integer(floor_x.clone());
    let eps_exact = exact(eps);
    let half = &eps_exact * &Rational::from_i64(1, 2).expect("nonzero");
    let setup = Setup {
        x: x.clone(),
        floor_x,
        prefix: even_prefix(&frac, &half),
        eps_exact,
        y,
        kappa,
        eps,
    };

    let mut prev: Option<(u64, f64)> = None;
    let mut m = 1u64;
    let mut last = setup.evaluate(m);
    loop {
        if setup.accepts(&last) {
            return Ok(last);
        }
        let dev = last.achieved_value - y;
        if let Some((m_prev, dev_prev)) = prev {
            if dev.signum() != dev_prev.signum() {
                let (mut lo, mut hi) = (m_prev, m);
                for _ in 0..REFINE_STEPS {
                    if hi - lo <= 1 {
                        break;
                    }
                    let mid = lo + (hi - lo) / 2;
                    let r = setup.evaluate(mid);
                    if setup.accepts(&r) {
                        return Ok(r);
                    }
                    if (r.achieved_value - y).signum() == dev_prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
        }
        prev = Some((m, dev));
        if m >= max_m {
            return Err(Error::BudgetExceeded(Box::new(last)));
        }
        m = m.saturating_mul(2).min(max_m);
        last = setup.evaluate(m);
    }
}
