//! Exact computation of the congruence sum
//!
//! `S(a/q) = #{(m, n) : 0 < m, n <= q, a m = n (mod q), m n < q}`
//!
//! together with the continued-fraction machinery that makes it cheap:
//! `S(a/q)` equals the number of pairs `(c, d)` with
//! `0 < a/q - c/d < 1/d^2`, and every reduced such pair is a convergent or
//! an extreme semi-convergent of `a/q`.
//!
//! All core arithmetic is exact over arbitrary-precision integers.

pub mod arith;
pub mod contfrac;
pub mod density;
pub mod error;
pub mod scan;
mod ser;
pub mod stats;
pub mod sum;

pub use arith::{gcd, isqrt, normalize_mod, FractionInput, Integer, Rational};
pub use contfrac::{
    approx_candidates, approx_solutions, best_approx_below, best_approx_below_bruteforce,
    best_approx_bruteforce, cf_expand, cf_value, convergents, khinchin_eps, negate_reciprocal_cf,
    ApproxCandidate, ApproxSolution, CandidateKind, ContinuedFraction, Convention, Convergent,
    Side, SideFilter,
};
pub use density::{density_construct, DensityResult};
pub use error::{Error, Result};
pub use stats::{
    ard_average, average_s, convergent_fraction, divisor_count, divisor_identity_check, euler_phi,
    max_s, sigma_minus_one, AverageReport,
};
pub use sum::{
    approx_twosided_count, lattice_points, reciprocity_fp, reciprocity_sp, s_bruteforce,
    s_coprime_twosided, s_fast, s_weighted_terms, theorem2_decompose, LatticePoint,
    ReciprocityReport, SumDecomposition,
};
