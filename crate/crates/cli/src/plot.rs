//! Plots drawn from persisted result rows: a self-contained SVG, or a
//! gnuplot script with the data inlined.
//!
//! Both put `log10 x` on the horizontal axis and `log10` of the moment (solid)
//! and of each bound total (dashed) on the vertical axis, one colour per
//! `(ρ, K or y)` series.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::rows::ResultRow;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];
const DASHES: [&str; 6] = ["6,3", "2,3", "8,3,2,3", "12,4", "1,2", "4,4,1,4"];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 300.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// A polyline in `(log10 x, log10 value)` coordinates.
#[derive(Debug)]
struct Series {
    label: String,
    group: usize,
    bound: Option<usize>,
    points: Vec<(f64, f64)>,
}

fn series_label(row: &ResultRow) -> String {
    if row.k.is_empty() || row.has_flag("k_derived") {
        format!("rho={} y={}", row.rho, row.y)
    } else {
        format!("rho={} K={}", row.rho, row.k)
    }
}

fn collect(rows: &[ResultRow]) -> Vec<Series> {
    let mut groups: BTreeMap<String, usize> = BTreeMap::new();
    let mut bounds: BTreeMap<String, usize> = BTreeMap::new();
    let mut map: BTreeMap<(usize, Option<usize>), Series> = BTreeMap::new();
    let mut push = |label: String, key: (usize, Option<usize>), x: u64, v: f64| {
        if x < 2 || !(v > 0.0 && v.is_finite()) {
            return;
        }
        let s = map.entry(key).or_insert_with(|| Series {
            label,
            group: key.0,
            bound: key.1,
            points: Vec::new(),
        });
        let p = ((x as f64).log10(), v.log10());
        if !s.points.iter().any(|q| q.0 == p.0) {
            s.points.push(p);
        }
    };
    for row in rows {
        let label = series_label(row);
        let n = groups.len();
        let g = *groups.entry(label.clone()).or_insert(n);
        push(format!("{label} moment"), (g, None), row.x, row.moment);
        if !row.bound_id.is_empty() {
            let n = bounds.len();
            let b = *bounds.entry(row.bound_id.clone()).or_insert(n);
            push(format!("{label} {}", row.bound_id), (g, Some(b)), row.x, row.bound_total);
        }
    }
    let mut out: Vec<Series> = map.into_values().collect();
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Tick positions covering `[lo, hi]` with at most about eight steps.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-9);
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn bounds_of(series: &[Series]) -> Option<(f64, f64, f64, f64)> {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return None;
    }
    let pad = |a: f64, b: f64| if b - a < 1e-9 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    Some((x0, x1, y0, y1))
}

/// Renders rows as a standalone SVG document.
pub fn render_svg(rows: &[ResultRow]) -> String {
    let series = collect(rows);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let Some((x0, x1, y0, y1)) = bounds_of(&series) else {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no finite rows</text>"#, WIDTH / 2.0, HEIGHT / 2.0);
        svg.push_str("</svg>\n");
        return svg;
    };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let _ = writeln!(svg, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ticks(x0, x1) {
        let px = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">10^{}</text>"##,
            TOP + ph,
            TOP + ph + 18.0,
            trim(t)
        );
    }
    for t in ticks(y0, y1) {
        let py = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">10^{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            trim(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x</text><text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">moment / bound</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[s.group % PALETTE.len()];
        let dash = s
            .bound
            .map(|b| format!(r#" stroke-dasharray="{}""#, DASHES[b % DASHES.len()]))
            .unwrap_or_default();
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
            pts.join(" ")
        );
        if s.bound.is_none() {
            for &(x, y) in &s.points {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, sx(x), sy(y));
            }
        }
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn trim(t: f64) -> String {
    let s = format!("{t:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// A gnuplot script that reproduces the SVG plot; `output` names the SVG it
/// writes when run.
pub fn render_gnuplot(rows: &[ResultRow], output: &str) -> String {
    let series = collect(rows);
    let mut gp = String::new();
    let _ = writeln!(gp, "set terminal svg size {WIDTH},{HEIGHT}");
    let _ = writeln!(gp, "set output '{}'", output.replace('\'', "''"));
    gp.push_str("set logscale xy\nset xlabel 'x'\nset ylabel 'moment / bound'\nset key outside right\n");
    for (i, s) in series.iter().enumerate() {
        let _ = writeln!(gp, "$s{i} << EOD");
        for &(x, y) in &s.points {
            let _ = writeln!(gp, "{} {}", crate::number::fmt17(10f64.powf(x)), crate::number::fmt17(10f64.powf(y)));
        }
        gp.push_str("EOD\n");
    }
    let plots: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let style = if s.bound.is_some() { "lines dt 2" } else { "linespoints pt 7" };
            format!(
                "$s{i} using 1:2 with {style} lc rgb '{}' title '{}'",
                PALETTE[s.group % PALETTE.len()],
                s.label.replace('\'', "''")
            )
        })
        .collect();
    if plots.is_empty() {
        gp.push_str("set label 'no finite rows' at graph 0.5,0.5 center\nplot NaN notitle\n");
    } else {
        let _ = writeln!(gp, "plot {}", plots.join(", \\\n     "));
    }
    gp
}
