//! Self-contained SVG rendering of the lattice `(m, a m mod q)`.

use std::fmt::Write as _;

use csum_core::{lattice_points, Error, Integer, Result};
use num_traits::ToPrimitive;

/// Largest modulus the plot accepts.
pub const PLOT_MAX_Q: u64 = 100_000;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;
const HYPERBOLA_SAMPLES: usize = 400;

/// SVG for the points `(m, a m mod q)`, `0 < m < q`, with the points
/// under `m n = q` in class `below`. Counts are carried on the root
/// element as `data-points` and `data-flagged`.
pub fn render_lattice_svg(a: &Integer, q: &Integer) -> Result<String> {
    let qv = q
        .to_u64()
        .filter(|q| *q <= PLOT_MAX_Q)
        .ok_or(Error::InvalidParameter("plot requires q <= 100000"))?;
    let points = lattice_points(a, q)?;
    let flagged = points.iter().filter(|p| p.below_hyperbola).count();
    let side = CANVAS - 2.0 * MARGIN;
    let scale = side / qv as f64;
    let px = |m: f64| MARGIN + m * scale;
    let py = |n: f64| CANVAS - MARGIN - n * scale;
    let radius = (scale * 0.4).clamp(0.6, 4.0);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800" data-a="{a}" data-q="{q}" data-points="{}" data-flagged="{flagged}">"#,
        points.len()
    );
    svg.push_str(
        "<style>.frame{fill:none;stroke:#999;stroke-width:1}.hyp{fill:none;stroke:#1f4e9e;stroke-width:1.5}\
         .pt{fill:#555}.pt.below{fill:#d62728}text{font:14px sans-serif;fill:#222}</style>\n",
    );
    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{MARGIN:.2}" y="{MARGIN:.2}" width="{side:.2}" height="{side:.2}"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN:.2}" y="{:.2}">S({a}/{q}) = {flagged}</text>"#,
        MARGIN - 12.0
    );

    // n = q/m from m = 1 to m = q, geometrically spaced
    let mut path = String::new();
    for i in 0..=HYPERBOLA_SAMPLES {
        let m = (qv as f64).powf(i as f64 / HYPERBOLA_SAMPLES as f64);
        let n = qv as f64 / m;
        let _ = write!(
            path,
            "{}{:.2},{:.2}",
            if i == 0 { "M" } else { " L" },
            px(m),
            py(n)
        );
    }
    let _ = writeln!(svg, r#"<path class="hyp" d="{path}"/>"#);

    for p in &points {
        let class = if p.below_hyperbola { "pt below" } else { "pt" };
        let _ = writeln!(
            svg,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{radius:.2}" data-m="{}" data-n="{}"/>"#,
            px(p.m as f64),
            py(p.n as f64),
            p.m,
            p.n
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
