//! Per-subcommand computation and rendering.

use std::fmt::Write as _;

use csum_core::arith::render_decimal;
use csum_core::density::{density_construct_with_budget, DEFAULT_MAX_M};
use csum_core::scan::{scan_pair, PairRecord, QRange, CONVENTIONS};
use csum_core::{
    approx_candidates, approx_solutions, approx_twosided_count, average_s, negate_reciprocal_cf,
    reciprocity_fp, reciprocity_sp, s_bruteforce, s_coprime_twosided, s_fast, s_weighted_terms,
    CandidateKind, ContinuedFraction, Convention, Integer, Rational, ReciprocityReport, Side,
};
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{parse_fraction, parse_range, Cli, CmdResult, Command, Failure, Method, OutputFormat};

pub(crate) fn dispatch(cli: &Cli) -> CmdResult {
    let conv: Convention = cli.common.convention.into();
    let fmt = cli.common.output;
    match &cli.command {
        Command::Sum { fraction, method } => {
            sum(fraction, *method, pick(fmt, "sum", &[Text, Json])?)
        }
        Command::Terms { fraction } => terms(fraction, pick(fmt, "terms", &[Text, Json, Csv])?),
        Command::Cf { input } => cf(input, conv, pick(fmt, "cf", &[Text, Json])?),
        Command::Neg { fraction } => neg(fraction, conv, pick(fmt, "neg", &[Text, Json])?),
        Command::Approx { fraction, side } => approx(
            fraction,
            (*side).into(),
            pick(fmt, "approx", &[Text, Json, Csv])?,
        ),
        Command::Reciprocity { fraction } => {
            reciprocity(fraction, pick(fmt, "reciprocity", &[Text, Json])?)
        }
        Command::Ard { fraction } => ard(fraction, pick(fmt, "ard", &[Text, Json])?),
        Command::Scan {
            q_range,
            primes_only,
            all_a: _,
            sample,
            seed,
        } => {
            let sampling = sample.zip(*seed);
            scan(
                parse_range(q_range)?,
                *primes_only,
                sampling,
                pick(fmt, "scan", &[Csv, Json, Text])?,
            )
        }
        Command::Average {
            q_range,
            primes_only,
        } => average(
            parse_range(q_range)?,
            *primes_only,
            pick(fmt, "average", &[Csv, Json, Text])?,
        ),
        Command::Density {
            x,
            y,
            kappa,
            eps,
            max_m,
        } => density(
            x,
            *y,
            *kappa,
            *eps,
            max_m.unwrap_or(DEFAULT_MAX_M),
            pick(fmt, "density", &[Json, Text])?,
        ),
        Command::Plot { fraction } => {
            pick(fmt, "plot", &[Svg])?;
            let (input, _) = parse_fraction(fraction)?;
            Ok(crate::render_lattice_svg(&input.num, &input.den)?)
        }
    }
}

use OutputFormat::{Csv, Json, Svg, Text};

/// The requested format if the subcommand supports it; the first
/// supported format otherwise.
fn pick(
    fmt: Option<OutputFormat>,
    name: &str,
    allowed: &[OutputFormat],
) -> Result<OutputFormat, Failure> {
    match fmt {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Failure::Usage(format!(
            "{name} does not support --output {}",
            format_name(f)
        ))),
    }
}

fn format_name(f: OutputFormat) -> &'static str {
    match f {
        Text => "text",
        Json => "json",
        Csv => "csv",
        Svg => "svg",
    }
}

fn conv_name(c: Convention) -> &'static str {
    match c {
        Convention::LastAtLeastTwo => "last2",
        Convention::LastEqualsOne => "last1",
    }
}

/// Exact integer: a JSON number when it fits in 64 bits, a string otherwise.
fn int(v: &Integer) -> Value {
    match v.to_i64() {
        Some(n) => Value::from(n),
        None => Value::from(v.to_string()),
    }
}

fn dec(v: f64) -> Value {
    Value::from(render_decimal(v))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn kind_parts(kind: &CandidateKind) -> (&'static str, isize, Option<u64>) {
    match *kind {
        CandidateKind::Convergent { j } => ("convergent", j, None),
        CandidateKind::SemiConvergent { j, g } => ("semiconvergent", j, Some(g)),
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Below => "below",
        Side::Above => "above",
    }
}

fn sum(fraction: &str, method: Method, fmt: OutputFormat) -> CmdResult {
    let (input, _) = parse_fraction(fraction)?;
    let (a, q) = (&input.num, &input.den);
    let (brute, fast) = match method {
        Method::Brute => (Some(s_bruteforce(a, q)?), None),
        Method::Fast => (None, Some(s_fast(a, q)?)),
        Method::Both => (Some(s_bruteforce(a, q)?), Some(s_fast(a, q)?)),
    };
    if let (Some(b), Some(f)) = (&brute, &fast) {
        if b != f {
            return Err(Failure::Mismatch(format!(
                "S({a}/{q}): brute force gives {b}, fast gives {f}"
            )));
        }
    }
    let s = fast
        .clone()
        .or(brute.clone())
        .expect("at least one method ran");
    match fmt {
        Json => {
            let terms: Vec<Value> = s_weighted_terms(a, q)?
                .iter()
                .map(|t| json!({"fraction": t.fraction.to_string(), "eps": t.eps.to_string(), "weight": int(&t.weight)}))
                .collect();
            let mut v = json!({
                "a": int(a),
                "q": int(q),
                "s": int(&s),
                "method": match method { Method::Brute => "brute", Method::Fast => "fast", Method::Both => "both" },
                "terms": terms,
            });
            if method == Method::Both {
                v["brute"] = int(brute.as_ref().expect("ran"));
                v["fast"] = int(fast.as_ref().expect("ran"));
            }
            Ok(to_json(&v))
        }
        _ => Ok(match method {
            Method::Both => format!(
                "{s}\nbrute {} fast {} agree\n",
                brute.expect("ran"),
                fast.expect("ran")
            ),
            _ => format!("{s}\n"),
        }),
    }
}

fn terms(fraction: &str, fmt: OutputFormat) -> CmdResult {
    let (input, _) = parse_fraction(fraction)?;
    let terms = s_weighted_terms(&input.num, &input.den)?;
    Ok(match fmt {
        Json => to_json(&Value::from(
            terms
                .iter()
                .map(|t| json!({"fraction": t.fraction.to_string(), "eps": t.eps.to_string(), "weight": int(&t.weight)}))
                .collect::<Vec<_>>(),
        )),
        Csv => {
            let mut s = String::from("fraction,eps,eps_decimal,weight\n");
            for t in &terms {
                let _ = writeln!(s, "{},{},{},{}", t.fraction, t.eps, render_decimal(t.eps.to_f64()), t.weight);
            }
            s
        }
        _ => {
            let mut s = String::new();
            for t in &terms {
                let _ = writeln!(s, "{} eps={} weight={}", t.fraction, t.eps, t.weight);
            }
            s
        }
    })
}

fn cf_json(x: &Rational, cf: &ContinuedFraction) -> Value {
    let convergents: Vec<Value> = cf
        .convergents()
        .iter()
        .map(|c| json!({"j": c.j, "h": int(&c.h), "k": int(&c.k)}))
        .collect();
    json!({
        "value": x.to_string(),
        "cf": cf.to_string(),
        "convention": conv_name(cf.convention()),
        "k": cf.len(),
        "convergents": convergents,
    })
}

fn cf(input: &str, conv: Convention, fmt: OutputFormat) -> CmdResult {
    if input.trim_start().starts_with('[') {
        let cf: ContinuedFraction = input.parse()?;
        let x = cf.value();
        return Ok(match fmt {
            Json => to_json(&cf_json(&x, &cf)),
            _ => format!("{x}\n"),
        });
    }
    let (_, x) = parse_fraction(input)?;
    let cf = ContinuedFraction::expand(&x, conv);
    Ok(match fmt {
        Json => to_json(&cf_json(&x, &cf)),
        _ => format!("{cf}\n"),
    })
}

fn neg(fraction: &str, conv: Convention, fmt: OutputFormat) -> CmdResult {
    let (_, x) = parse_fraction(fraction)?;
    let cf = ContinuedFraction::expand(&x, conv);
    let n = negate_reciprocal_cf(&cf)?;
    let v = n.value();
    Ok(match fmt {
        Json => to_json(&json!({
            "input": x.to_string(),
            "input_cf": cf.to_string(),
            "cf": n.to_string(),
            "value": v.to_string(),
        })),
        _ => format!("{n} = {v}\n"),
    })
}

fn approx(fraction: &str, filter: csum_core::SideFilter, fmt: OutputFormat) -> CmdResult {
    let (_, x) = parse_fraction(fraction)?;
    let candidates = approx_candidates(&x, filter);
    let solutions = approx_solutions(&x, filter);
    let rows: Vec<_> = candidates
        .iter()
        .map(|c| (c, solutions.iter().find(|s| s.fraction == c.fraction)))
        .collect();
    Ok(match fmt {
        Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(c, sol)| {
                    let (kind, j, g) = kind_parts(&c.kind);
                    let mut v = json!({
                        "fraction": c.fraction.to_string(),
                        "kind": kind,
                        "j": j,
                        "side": side_name(c.side),
                        "solution": sol.is_some(),
                    });
                    if let Some(g) = g {
                        v["g"] = Value::from(g);
                    }
                    if let Some(s) = sol {
                        v["eps"] = Value::from(s.gap_eps.to_string());
                        v["multiplicity"] = int(&s.multiplicity);
                    }
                    v
                })
                .collect();
            to_json(&json!({"x": x.to_string(), "candidates": items}))
        }
        Csv => {
            let mut s = String::from("fraction,kind,j,g,side,solution,eps,multiplicity\n");
            for (c, sol) in &rows {
                let (kind, j, g) = kind_parts(&c.kind);
                let _ = writeln!(
                    s,
                    "{},{kind},{j},{},{},{},{},{}",
                    c.fraction,
                    g.map(|g| g.to_string()).unwrap_or_default(),
                    side_name(c.side),
                    sol.is_some(),
                    sol.map(|s| s.gap_eps.to_string()).unwrap_or_default(),
                    sol.map(|s| s.multiplicity.to_string()).unwrap_or_default(),
                );
            }
            s
        }
        _ => {
            let mut s = String::new();
            for (c, sol) in &rows {
                let (kind, j, g) = kind_parts(&c.kind);
                let _ = write!(s, "{} {kind} j={j}", c.fraction);
                if let Some(g) = g {
                    let _ = write!(s, " g={g}");
                }
                let _ = write!(s, " {}", side_name(c.side));
                if let Some(sol) = sol {
                    let _ = write!(
                        s,
                        " solution eps={} multiplicity={}",
                        sol.gap_eps, sol.multiplicity
                    );
                }
                s.push('\n');
            }
            s
        }
    })
}

fn reciprocity_json(r: &ReciprocityReport) -> Value {
    let mut v = json!({
        "s_left": int(&r.s_left),
        "s_right": int(&r.s_right),
        "difference": int(&r.difference()),
        "residual": dec(r.residual_f64()),
    });
    if let Some(root) = &r.main {
        v["sqrt_ratio"] =
            json!({"num": int(&root.num), "den": int(&root.den), "decimal": dec(root.to_f64())});
    }
    for c in CONVENTIONS {
        v[format!("k_{}", conv_name(c))] = Value::from(r.k_len(c));
        v[format!("bound_{}", conv_name(c))] = Value::from(r.bound(c).to_string());
        v[format!("within_{}", conv_name(c))] = Value::from(r.within_bound(c));
    }
    v
}

fn reciprocity(fraction: &str, fmt: OutputFormat) -> CmdResult {
    let (input, _) = parse_fraction(fraction)?;
    let (a, q) = (&input.num, &input.den);
    let fp = reciprocity_fp(a, q)?;
    let sp = reciprocity_sp(a, q)?;
    Ok(match fmt {
        Json => to_json(
            &json!({"a": int(a), "q": int(q), "plus": reciprocity_json(&fp), "minus": reciprocity_json(&sp)}),
        ),
        _ => {
            let mut s = String::new();
            let root = fp.main.as_ref().expect("plus report carries the root");
            let _ = writeln!(
                s,
                "S({a}/{q}) - S({}/{a}) = {} - {} = {}; sqrt({q}/{a}) = {}; E+ = {}",
                -q,
                fp.s_left,
                fp.s_right,
                fp.difference(),
                render_decimal(root.to_f64()),
                render_decimal(fp.residual_f64())
            );
            let _ = writeln!(
                s,
                "S({}/{q}) - S({q}/{a}) = {} - {} = {}; E- = {}",
                -a,
                sp.s_left,
                sp.s_right,
                sp.difference(),
                sp.difference()
            );
            for c in CONVENTIONS {
                let _ = writeln!(
                    s,
                    "{}: k = {}, bound = {}, |E+| within: {}, |E-| within: {}",
                    conv_name(c),
                    fp.k_len(c),
                    fp.bound(c),
                    fp.within_bound(c),
                    sp.within_bound(c)
                );
            }
            s
        }
    })
}

fn ard(fraction: &str, fmt: OutputFormat) -> CmdResult {
    let (input, _) = parse_fraction(fraction)?;
    let (a, q) = (&input.num, &input.den);
    let lhs = s_coprime_twosided(a, q)?;
    let all = approx_twosided_count(a, q, false)?;
    let coprime_d = approx_twosided_count(a, q, true)?;
    Ok(match fmt {
        Json => to_json(&json!({
            "a": int(a),
            "q": int(q),
            "coprime_twosided": int(&lhs),
            "approx_twosided": int(&all),
            "approx_twosided_d_coprime_q": int(&coprime_d),
            "agree": lhs == coprime_d,
        })),
        _ => format!(
            "coprime two-sided count {lhs}\napproximations {all}\napproximations with (d, q) = 1 {coprime_d}\nagree {}\n",
            lhs == coprime_d
        ),
    })
}

fn scan_pairs(range: QRange, primes_only: bool, sampling: Option<(usize, u64)>) -> Vec<(u64, u64)> {
    let mut rng = sampling.map(|(_, seed)| ChaCha8Rng::seed_from_u64(seed));
    let mut pairs = Vec::new();
    for q in range.moduli(primes_only) {
        let residues: Vec<u64> = (1..q)
            .filter(|a| csum_core::gcd(&(*a).into(), &q.into()) == 1.into())
            .collect();
        match (&mut rng, sampling) {
            (Some(rng), Some((n, _))) if n < residues.len() => {
                let mut picked = index::sample(rng, residues.len(), n).into_vec();
                picked.sort_unstable();
                pairs.extend(picked.into_iter().map(|i| (residues[i], q)));
            }
            _ => pairs.extend(residues.into_iter().map(|a| (a, q))),
        }
    }
    pairs.sort_unstable_by_key(|&(a, q)| (q, a));
    pairs
}

fn scan(
    range: QRange,
    primes_only: bool,
    sampling: Option<(usize, u64)>,
    fmt: OutputFormat,
) -> CmdResult {
    let records = scan_pairs(range, primes_only, sampling)
        .into_iter()
        .map(|(a, q)| scan_pair(a, q))
        .collect::<csum_core::Result<Vec<PairRecord>>>()?;
    Ok(match fmt {
        Csv => {
            let mut s = String::from("q,a,s");
            for c in CONVENTIONS {
                let n = conv_name(c);
                let _ = write!(s, ",k_{n},main_{n},e_{n},e_lower_ok_{n},e_upper_ok_{n}");
            }
            s.push_str(",e_plus,e_minus");
            for c in CONVENTIONS {
                let n = conv_name(c);
                let _ = write!(s, ",plus_within_{n},minus_within_{n}");
            }
            s.push('\n');
            for r in &records {
                let _ = write!(s, "{},{},{}", r.q, r.a, r.s);
                for c in CONVENTIONS {
                    let d = r.decomposition(c);
                    let _ = write!(
                        s,
                        ",{},{},{},{},{}",
                        d.cf.len(),
                        d.main_term,
                        d.error_e,
                        d.lower_bound_holds(),
                        d.upper_bound_holds()
                    );
                }
                let _ = write!(
                    s,
                    ",{},{}",
                    render_decimal(r.fp.residual_f64()),
                    r.sp.difference()
                );
                for c in CONVENTIONS {
                    let _ = write!(s, ",{},{}", r.fp.within_bound(c), r.sp.within_bound(c));
                }
                s.push('\n');
            }
            s
        }
        Json => {
            let pairs: Vec<Value> = records
                .iter()
                .map(|r| {
                    let mut v = json!({
                        "q": r.q,
                        "a": r.a,
                        "s": int(&r.s),
                        "e_plus": dec(r.fp.residual_f64()),
                        "e_minus": int(&r.sp.difference()),
                    });
                    for c in CONVENTIONS {
                        let d = r.decomposition(c);
                        v[conv_name(c)] = json!({
                            "k": d.cf.len(),
                            "main": int(&d.main_term),
                            "e": int(&d.error_e),
                            "bound": d.bound.to_string(),
                            "lower_ok": d.lower_bound_holds(),
                            "upper_ok": d.upper_bound_holds(),
                            "plus_within": r.fp.within_bound(c),
                            "minus_within": r.sp.within_bound(c),
                        });
                    }
                    v
                })
                .collect();
            to_json(&json!({"pairs": pairs, "summary": summary_json(&records)}))
        }
        _ => summary_text(&records),
    })
}

struct Violations<'a> {
    convention: Convention,
    lower: Vec<&'a PairRecord>,
    upper: Vec<&'a PairRecord>,
}

fn violations(records: &[PairRecord]) -> Vec<Violations<'_>> {
    CONVENTIONS
        .iter()
        .map(|&c| Violations {
            convention: c,
            lower: records
                .iter()
                .filter(|r| !r.decomposition(c).lower_bound_holds())
                .collect(),
            upper: records
                .iter()
                .filter(|r| !r.decomposition(c).upper_bound_holds())
                .collect(),
        })
        .collect()
}

fn summary_json(records: &[PairRecord]) -> Value {
    let per: Vec<Value> = violations(records)
        .iter()
        .map(|v| {
            let list = |rs: &[&PairRecord]| -> Vec<Value> {
                rs.iter()
                    .map(|r| json!({"a": r.a, "q": r.q, "e": int(&r.decomposition(v.convention).error_e)}))
                    .collect()
            };
            json!({
                "convention": conv_name(v.convention),
                "lower_violations": list(&v.lower),
                "upper_violations": list(&v.upper),
            })
        })
        .collect();
    json!({"pairs_checked": records.len(), "conventions": per})
}

fn summary_text(records: &[PairRecord]) -> String {
    let mut s = format!("pairs checked {}\n", records.len());
    for v in violations(records) {
        let n = conv_name(v.convention);
        let _ = writeln!(
            s,
            "{n}: E < 0 for {} pairs, E > 3k/2 + 1 for {} pairs",
            v.lower.len(),
            v.upper.len()
        );
        for (label, rs) in [("E < 0", &v.lower), ("E > 3k/2 + 1", &v.upper)] {
            for r in rs.iter() {
                let _ = writeln!(
                    s,
                    "{n} {label}: {}/{} E = {}",
                    r.a,
                    r.q,
                    r.decomposition(v.convention).error_e
                );
            }
        }
    }
    s
}

fn average(range: QRange, primes_only: bool, fmt: OutputFormat) -> CmdResult {
    let reports = range
        .moduli(primes_only)
        .map(average_s)
        .collect::<csum_core::Result<Vec<_>>>()?;
    Ok(match fmt {
        Json => to_json(&Value::from(
            reports
                .iter()
                .map(|r| {
                    json!({
                        "q": r.q,
                        "phi": r.phi,
                        "sigma_minus1": r.sigma_minus1.to_string(),
                        "sum_s": int(&r.sum_s),
                        "mean_s": r.mean_s.to_string(),
                        "mean_s_decimal": dec(r.mean_s.to_f64()),
                        "predicted": dec(r.predicted_main),
                        "ratio": dec(r.ratio),
                        "max_s": int(&r.max_s),
                        "a_star": r.a_star,
                    })
                })
                .collect::<Vec<_>>(),
        )),
        Csv => {
            let mut s =
                String::from("q,phi,sum_s,mean_s,mean_s_decimal,predicted,ratio,max_s,a_star\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.q,
                    r.phi,
                    r.sum_s,
                    r.mean_s,
                    render_decimal(r.mean_s.to_f64()),
                    render_decimal(r.predicted_main),
                    render_decimal(r.ratio),
                    r.max_s,
                    r.a_star
                );
            }
            s
        }
        _ => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(
                    s,
                    "q = {}: mean S = {} ({}), predicted {}, ratio {}, max S = {} at a = {}",
                    r.q,
                    r.mean_s,
                    render_decimal(r.mean_s.to_f64()),
                    render_decimal(r.predicted_main),
                    render_decimal(r.ratio),
                    r.max_s,
                    r.a_star
                );
            }
            s
        }
    })
}

fn density(x: &str, y: f64, kappa: f64, eps: f64, max_m: u64, fmt: OutputFormat) -> CmdResult {
    let (_, target) = parse_fraction(x)?;
    let r = density_construct_with_budget(&target, y, kappa, eps, max_m)?;
    let distance = (&r.achieved_fraction - &target).abs();
    Ok(match fmt {
        Text => format!(
            "a/q = {}\nprefix [{}]\nm = {}, n = {}\nS = {}\nS / ln^{kappa}(2 + q) = {}\n|a/q - x| = {}\n",
            r.achieved_fraction,
            r.prefix.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
            r.m_used,
            r.n_used,
            r.s_value,
            render_decimal(r.achieved_value),
            render_decimal(distance.to_f64())
        ),
        _ => to_json(&json!({
            "x": target.to_string(),
            "y": dec(y),
            "kappa": dec(kappa),
            "eps": dec(eps),
            "prefix": r.prefix.iter().map(int).collect::<Vec<_>>(),
            "m": int(&r.m_used),
            "n": int(&r.n_used),
            "a": int(r.achieved_fraction.numer()),
            "q": int(r.achieved_fraction.denom()),
            "s": int(&r.s_value),
            "achieved_value": dec(r.achieved_value),
            "distance_x": dec(distance.to_f64()),
        })),
    })
}
