//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p csum-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use csum_cli::run_captured;
use csum_core::arith::ln_big;
use csum_core::scan::{coprime_pairs, decomposition_scan, QRange};
use csum_core::stats::is_prime;
use csum_core::{
    approx_candidates, approx_solutions, approx_twosided_count, ard_average, average_s,
    best_approx_bruteforce, cf_expand, cf_value, convergent_fraction, density_construct,
    divisor_identity_check, khinchin_eps, max_s, negate_reciprocal_cf, reciprocity_fp,
    reciprocity_sp, s_bruteforce, s_coprime_twosided, s_fast, s_weighted_terms, CandidateKind,
    Convention, Integer, Rational, SideFilter,
};
use num_integer::Integer as _;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerances for the asymptotic diagnostics at q = 10007.
const AVERAGE_RATIO_TOL: f64 = 0.25;
const ARD_ABS_TOL: f64 = 2.0;
const CONVERGENT_SHARE_TOL: f64 = 0.08;
/// Target, tolerance and exponent of the density construction.
const DENSITY_Y: f64 = 1.0;
const DENSITY_EPS: f64 = 0.25;
const DENSITY_KAPPA: f64 = 2.0;

const CONVENTIONS: [Convention; 2] = [Convention::LastAtLeastTwo, Convention::LastEqualsOne];

struct Outcome {
    pass: bool,
    detail: String,
    parts: Vec<(String, bool, String)>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            parts: Vec::new(),
        }
    }

    fn from_parts(parts: Vec<(String, bool, String)>) -> Self {
        Outcome {
            pass: parts.iter().all(|p| p.1),
            detail: String::new(),
            parts,
        }
    }
}

fn i(v: i64) -> Integer {
    v.into()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from_i64(n, d).unwrap()
}

fn pairs_upto(q_max: u64) -> impl Iterator<Item = (u64, u64)> {
    coprime_pairs(QRange { lo: 2, hi: q_max }, false)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn criterion(
    id: u32,
    title: &str,
    limit: Option<Duration>,
    body: impl FnOnce() -> Outcome,
) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let mut outcome = outcome.unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Outcome::new(false, format!("panicked: {msg}"))
    });
    if let Some(limit) = limit {
        if elapsed > limit {
            outcome.pass = false;
            outcome.detail = format!("{} [over the {}s limit]", outcome.detail, limit.as_secs());
        }
    }
    println!(
        "{} {id:>2} {title} ({:.2}s){}{}",
        verdict(outcome.pass),
        elapsed.as_secs_f64(),
        if outcome.detail.is_empty() { "" } else { ": " },
        outcome.detail
    );
    for (name, pass, detail) in &outcome.parts {
        println!("     {} {id}{name}: {detail}", verdict(*pass));
    }
    outcome.pass
}

fn c1() -> Outcome {
    let mut parts = Vec::new();
    let values: Vec<_> = [(-226, 307), (307, 226)]
        .iter()
        .flat_map(|&(a, q)| {
            [
                s_fast(&i(a), &i(q)).unwrap(),
                s_bruteforce(&i(a), &i(q)).unwrap(),
            ]
        })
        .collect();
    parts.push((
        "a".into(),
        values.iter().all(|v| *v == i(7)),
        format!("S(-226/307), S(307/226) by fast and brute force = {values:?}"),
    ));
    let (a_star, max) = max_s(307).unwrap();
    parts.push((
        "b".into(),
        max == i(17),
        format!("max S(a/307) = {max} at a = {a_star}"),
    ));
    let worst = (1..307i64)
        .map(|a| {
            (s_fast(&i(-a), &i(307)).unwrap() - s_fast(&i(307), &i(a)).unwrap())
                .magnitude()
                .clone()
        })
        .max()
        .unwrap();
    parts.push((
        "c".into(),
        worst <= 3u32.into(),
        format!("max |S(-a/307) - S(307/a)| = {worst}"),
    ));
    Outcome::from_parts(parts)
}

fn c2() -> Outcome {
    let mut exhaustive = 0u64;
    let mut bad = Vec::new();
    for (a, q) in pairs_upto(300) {
        let (a, q) = (a.into(), q.into());
        exhaustive += 1;
        if s_fast(&a, &q).unwrap() != s_bruteforce(&a, &q).unwrap() {
            bad.push((a, q));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut random = 0;
    while random < 10_000 {
        let q: u64 = rng.random_range(2..=1_000_000);
        let a: u64 = rng.random_range(1..q);
        if a.gcd(&q) != 1 {
            continue;
        }
        random += 1;
        let (a, q) = (a.into(), q.into());
        if s_fast(&a, &q).unwrap() != s_bruteforce(&a, &q).unwrap() {
            bad.push((a, q));
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{exhaustive} exhaustive pairs (q <= 300) + {random} random pairs (q <= 10^6), mismatches {bad:?}"),
    )
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut qs: Vec<u64> = index::sample(&mut rng, 1999, 50)
        .into_iter()
        .map(|k| k as u64 + 2)
        .collect();
    qs.sort_unstable();
    let mut pairs = 0u64;
    let mut bad = Vec::new();
    for &q in &qs {
        for a in (1..q).filter(|a| a.gcd(&q) == 1) {
            pairs += 1;
            let (a, q) = (a.into(), q.into());
            let total: Integer = s_weighted_terms(&a, &q)
                .unwrap()
                .into_iter()
                .map(|t| t.weight)
                .sum();
            if total != s_bruteforce(&a, &q).unwrap() {
                bad.push((a, q));
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} moduli in [{}, {}], {pairs} pairs, mismatches {bad:?}",
            qs.len(),
            qs[0],
            qs[qs.len() - 1]
        ),
    )
}

fn c4() -> Outcome {
    let filters = [
        ("below", SideFilter::Below),
        ("above", SideFilter::Above),
        ("two-sided", SideFilter::Both),
    ];
    let mut missing = [0u64; 3];
    let mut found = [0u64; 3];
    let mut pairs = 0u64;
    for (a, q) in pairs_upto(2000) {
        pairs += 1;
        let x = r(a as i64, q as i64);
        for (k, (_, filter)) in filters.iter().enumerate() {
            let cands: Vec<Rational> = approx_candidates(&x, *filter)
                .into_iter()
                .map(|c| c.fraction)
                .collect();
            // any solution has d |a d - c q| < q, so d < q
            for b in best_approx_bruteforce(&x, q, *filter) {
                found[k] += 1;
                if !cands.contains(&b) {
                    missing[k] += 1;
                }
            }
        }
    }
    let parts = filters
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            (
                format!(" {name}"),
                missing[k] == 0,
                format!(
                    "{} brute-force approximations over {pairs} pairs, {} outside the candidates",
                    found[k], missing[k]
                ),
            )
        })
        .collect();
    Outcome::from_parts(parts)
}

fn c5() -> Outcome {
    let mut failures = [[0u64; 2]; 2];
    let mut pairs = 0u64;
    for (a, q) in pairs_upto(2000) {
        pairs += 1;
        let (a, q) = (a.into(), q.into());
        let fp = reciprocity_fp(&a, &q).unwrap();
        let sp = reciprocity_sp(&a, &q).unwrap();
        for (c, conv) in CONVENTIONS.iter().enumerate() {
            failures[0][c] += !fp.within_bound(*conv) as u64;
            failures[1][c] += !sp.within_bound(*conv) as u64;
        }
    }
    Outcome::new(
        failures.iter().flatten().all(|f| *f == 0),
        format!(
            "{pairs} pairs; bound violations E+ (last2, last1) = {:?}, E- (last2, last1) = {:?}",
            failures[0], failures[1]
        ),
    )
}

fn c6() -> Outcome {
    let report = decomposition_scan(pairs_upto(2000)).unwrap();
    let mut parts = Vec::new();
    for conv in CONVENTIONS {
        let t = report.tally(conv);
        parts.push((
            format!(" upper {conv:?}"),
            t.upper_violations.is_empty(),
            format!(
                "E > 3k/2 + 1 for {} of {} pairs",
                t.upper_violations.len(),
                report.pairs_checked
            ),
        ));
    }
    for conv in CONVENTIONS {
        let t = report.tally(conv);
        let shown: Vec<String> = t
            .lower_violations
            .iter()
            .take(12)
            .map(|v| format!("{}/{} E={}", v.a, v.q, v.error_e))
            .collect();
        println!(
            "     info 6 lower bound {conv:?}: E < 0 for {} pairs; first: {}",
            t.lower_violations.len(),
            shown.join(", ")
        );
    }
    let known = report
        .tally(Convention::LastAtLeastTwo)
        .lower_violations
        .iter()
        .any(|v| (v.a, v.q) == (1, 4) && v.error_e == i(-1));
    parts.push((
        " known case".into(),
        known,
        format!("(1, 4) with E = -1 under LastAtLeastTwo reported: {known}"),
    ));
    Outcome::from_parts(parts)
}

fn c7() -> Outcome {
    let mut checked = [0u64; 2];
    let mut bad = Vec::new();
    for (a, q) in pairs_upto(2000) {
        for (branch, num) in [(0, a), (1, a + q)] {
            let x = r(num as i64, q as i64);
            let expected = r(-(q as i64), num as i64);
            for conv in CONVENTIONS {
                let cf = cf_expand(&x, conv);
                assert_eq!(cf.b0().is_zero(), branch == 0);
                checked[branch] += 1;
                if cf_value(&negate_reciprocal_cf(&cf).unwrap()) != expected {
                    bad.push((num, q, conv));
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "b0 = 0: {} expansions, b0 > 0: {} expansions, both conventions; failures {bad:?}",
            checked[0], checked[1]
        ),
    )
}

fn c8() -> Outcome {
    let two = Rational::from_integer(i(2));
    let half = r(1, 2);
    let (mut convergents, mut gap_bad, mut gap_bad_last, mut coeff_bad) = (0u64, 0u64, 0u64, 0u64);
    let (mut small_eps, mut small_eps_bad) = (0u64, 0u64);
    for (a, q) in pairs_upto(2000) {
        let x = r(a as i64, q as i64);
        let cf = cf_expand(&x, Convention::LastAtLeastTwo);
        let convs = cf.convergents();
        for j in 0..cf.len() {
            convergents += 1;
            let (c, n) = (&convs[j], &convs[j + 1]);
            let gap = (&c.fraction() - &x).abs();
            let lo = Rational::new(Integer::one(), &c.k * (&n.k + &c.k)).unwrap();
            let hi = Rational::new(Integer::one(), &c.k * &n.k).unwrap();
            if !(lo < gap && gap < hi) {
                gap_bad += 1;
                if j + 1 == cf.len() && gap == hi {
                    gap_bad_last += 1;
                }
            }
            let inv = khinchin_eps(&x, &c.fraction()).unwrap().recip().unwrap();
            let b = Rational::from_integer(cf.coeff(j + 1).clone());
            if !(b <= inv && inv <= &b + &two) {
                coeff_bad += 1;
            }
        }
        let fractions: Vec<Rational> = convs.iter().map(|c| c.fraction()).collect();
        for s in approx_solutions(&x, SideFilter::Both) {
            if s.gap_eps < half {
                small_eps += 1;
                let is_convergent = matches!(s.kind, CandidateKind::Convergent { .. })
                    && fractions.contains(&s.fraction);
                small_eps_bad += !is_convergent as u64;
            }
        }
    }
    let gap_detail = if gap_bad == 0 {
        format!("1/(k_j(k_j+k_j+1)) < |h_j/k_j - a/q| < 1/(k_j k_j+1) for all {convergents} convergents j < k")
    } else {
        format!(
            "strict sandwich fails for {gap_bad} of {convergents} convergents j < k; {gap_bad_last} of them are \
             j = k-1 with |h_j/k_j - a/q| = 1/(k_j k_j+1) exactly, as forced by h_k/k_k = a/q and \
             |h_k k_j - h_j k_k| = 1"
        )
    };
    Outcome::from_parts(vec![
        ("a gap sandwich".into(), gap_bad == 0, gap_detail),
        (
            "b coefficient sandwich".into(),
            coeff_bad == 0,
            format!(
                "b_j+1 <= 1/eps <= b_j+1 + 2 fails for {coeff_bad} of {convergents} convergents"
            ),
        ),
        (
            "c eps < 1/2".into(),
            small_eps_bad == 0,
            format!("{small_eps} solutions with eps < 1/2, {small_eps_bad} not convergents"),
        ),
    ])
}

fn c9() -> Outcome {
    let (l7, r7) = divisor_identity_check(7).unwrap();
    let mut primes = 0;
    let mut bad = Vec::new();
    for q in (2..=10_000u64).filter(|q| is_prime(*q)) {
        primes += 1;
        let (lhs, rhs) = divisor_identity_check(q).unwrap();
        if lhs != rhs {
            bad.push(q);
        }
    }
    Outcome::new(
        bad.is_empty() && l7 == i(14) && r7 == i(14),
        format!("q = 7: {l7} = {r7}; {primes} primes q <= 10^4, failures {bad:?}"),
    )
}

fn c10() -> Outcome {
    let (mut prime_pairs, mut composite_pairs) = (0u64, 0u64);
    let (mut prime_bad, mut composite_bad) = (Vec::new(), Vec::new());
    for (a, q) in pairs_upto(2000) {
        let (ai, qi) = (a.into(), q.into());
        let lhs = s_coprime_twosided(&ai, &qi).unwrap();
        if is_prime(q) {
            prime_pairs += 1;
            if lhs != approx_twosided_count(&ai, &qi, false).unwrap() {
                prime_bad.push((a, q));
            }
        } else {
            composite_pairs += 1;
            if lhs != approx_twosided_count(&ai, &qi, true).unwrap() {
                composite_bad.push((a, q));
            }
        }
    }
    Outcome::from_parts(vec![
        (
            " prime q".into(),
            prime_bad.is_empty(),
            format!("{prime_pairs} pairs, mismatches {prime_bad:?}"),
        ),
        (
            " composite q, (q, d) = 1".into(),
            composite_bad.is_empty(),
            format!("{composite_pairs} pairs, mismatches {composite_bad:?}"),
        ),
    ])
}

fn c11() -> Outcome {
    const Q: u64 = 10_007;
    let avg = average_s(Q).unwrap();
    let ard = ard_average(Q).unwrap();
    let share = convergent_fraction(Q).unwrap().to_f64();
    let ln2 = std::f64::consts::LN_2;
    Outcome::from_parts(vec![
        (
            "a average".into(),
            (avg.ratio - 1.0).abs() <= AVERAGE_RATIO_TOL,
            format!(
                "mean S / predicted = {:.6}, tolerance {AVERAGE_RATIO_TOL}",
                avg.ratio
            ),
        ),
        (
            "b two-sided average".into(),
            (ard.mean_f64() - ard.predicted).abs() <= ARD_ABS_TOL,
            format!(
                "mean {:.6} vs 12/pi^2 ln q = {:.6}, difference {:.6}, tolerance {ARD_ABS_TOL}",
                ard.mean_f64(),
                ard.predicted,
                ard.mean_f64() - ard.predicted
            ),
        ),
        (
            "c convergent share".into(),
            (share - ln2).abs() <= CONVERGENT_SHARE_TOL,
            format!("{share:.6} vs ln 2 = {ln2:.6}, tolerance {CONVERGENT_SHARE_TOL}"),
        ),
    ])
}

fn c12() -> Outcome {
    let x = r(1, 2);
    let res = match density_construct(&x, DENSITY_Y, DENSITY_KAPPA, DENSITY_EPS) {
        Ok(res) => res,
        Err(e) => return Outcome::new(false, format!("construction failed: {e}")),
    };
    let frac = &res.achieved_fraction;
    let close_x = (frac - &x).abs() < r(1, 4);
    let s = s_fast(frac.numer(), frac.denom()).unwrap();
    let value =
        s.to_string().parse::<f64>().unwrap() / ln_big(&(frac.denom() + 2u32)).powf(DENSITY_KAPPA);
    Outcome::from_parts(vec![
        (
            "a fraction".into(),
            close_x,
            format!(
                "|a/q - 1/2| < 1/4 exactly: {close_x} (q has {} digits)",
                frac.denom().to_string().len()
            ),
        ),
        (
            "b normalized sum".into(),
            s == res.s_value && (value - DENSITY_Y).abs() < DENSITY_EPS,
            format!(
                "independent S = {s} (reported {}), S / ln^2(2 + q) = {value:.6}, m = {}",
                res.s_value, res.m_used
            ),
        ),
    ])
}

fn csum_bin(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_csum"))
        .args(args)
        .output()
        .expect("spawn csum");
    (out.status.code(), out.stdout)
}

fn attr(svg: &str, name: &str) -> Option<u64> {
    let key = format!("{name}=\"");
    let start = svg.find(&key)? + key.len();
    let end = start + svg[start..].find('"')?;
    svg[start..end].parse().ok()
}

fn c13() -> Outcome {
    let sum1 = csum_bin(&["sum", "-226/307"]);
    let sum2 = csum_bin(&["sum", "-226/307"]);
    let plot1 = csum_bin(&["plot", "-226/307"]);
    let plot2 = csum_bin(&["plot", "-226/307"]);
    let svg = String::from_utf8_lossy(&plot1.1).into_owned();
    let (points, flagged) = (attr(&svg, "data-points"), attr(&svg, "data-flagged"));
    let circles = svg.matches("<circle").count();
    let red = svg.matches("class=\"pt below\"").count();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0013);
    let (mut smoke, mut smoke_bad) = (0, Vec::new());
    while smoke < 500 {
        let q: i64 = rng.random_range(2..=20_000);
        let a: i64 = rng.random_range(-3 * q..3 * q);
        if a.gcd(&q) != 1 {
            continue;
        }
        smoke += 1;
        let frac = format!("{a}/{q}");
        let (code, out, _) = run_captured(["csum", "sum", &frac, "--method", "both"]);
        let expected = s_bruteforce(&i(a), &i(q)).unwrap().to_string();
        if code != 0 || out.lines().next() != Some(expected.as_str()) {
            smoke_bad.push(frac);
        }
    }
    let (bin_code, _) = csum_bin(&["sum", "17/2003", "--method", "both"]);

    Outcome::from_parts(vec![
        (
            "a sum".into(),
            sum1 == (Some(0), b"7\n".to_vec()),
            format!("`csum sum -226/307` printed {:?}", String::from_utf8_lossy(&sum1.1)),
        ),
        (
            "b plot".into(),
            plot1.0 == Some(0) && points == Some(306) && flagged == Some(7) && circles == 306 && red == 7,
            format!("metadata points {points:?}, flagged {flagged:?}; {circles} point elements, {red} flagged"),
        ),
        (
            "c agreement guard".into(),
            smoke_bad.is_empty() && bin_code == Some(0),
            format!("{smoke} random pairs with --method both, failures {smoke_bad:?}"),
        ),
        (
            "d byte stability".into(),
            sum1 == sum2 && plot1 == plot2,
            format!("two runs identical: sum {}, plot {} ({} bytes)", sum1 == sum2, plot1 == plot2, plot1.1.len()),
        ),
    ])
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "reference values for q = 307", Some(secs(1)), c1),
        criterion(2, "fast sum equals brute force", Some(secs(120)), c2),
        criterion(3, "weighted terms sum to S", None, c3),
        criterion(4, "candidate completeness", None, c4),
        criterion(5, "reciprocity residual bounds", None, c5),
        criterion(6, "continued-fraction decomposition bounds", None, c6),
        criterion(7, "negation identity for -q/a", None, c7),
        criterion(8, "Khinchin inequalities", None, c8),
        criterion(9, "divisor identity for prime q", Some(secs(180)), c9),
        criterion(10, "two-sided count equivalence", None, c10),
        criterion(
            11,
            "asymptotic diagnostics at q = 10007",
            Some(secs(60)),
            c11,
        ),
        criterion(12, "density construction", Some(secs(30)), c12),
        criterion(13, "command line and plot", None, c13),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
