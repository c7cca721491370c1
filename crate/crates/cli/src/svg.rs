//! Self-contained SVG plots on a fixed 800x500 canvas.

use std::fmt::Write;

use wtv1d::analytic::Regime;
use wtv1d::Signal;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Thin,
    Thick,
    Dashed,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub style: Style,
    pub color: &'a str,
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub series: Vec<Series<'a>>,
}

fn header(out: &mut String) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    out.push('\n');
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Stacked panels sharing the horizontal axis.
pub fn plot(panels: &[Panel]) -> String {
    let mut out = String::new();
    header(&mut out);
    let (x0, x1) = bounds(panels.iter().flat_map(|p| p.series.iter().flat_map(|s| s.xs.iter().copied())));
    let slot = (HEIGHT - MARGIN) / panels.len().max(1) as f64;
    for (i, panel) in panels.iter().enumerate() {
        let top = MARGIN / 2.0 + i as f64 * slot;
        let h = slot - MARGIN / 2.0;
        let w = WIDTH - 2.0 * MARGIN;
        let (y0, y1) = bounds(panel.series.iter().flat_map(|s| s.ys.iter().copied()));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * w;
        let py = |y: f64| top + h - (y - y0) / (y1 - y0) * h;
        let _ = writeln!(out, r##"<rect x="{MARGIN}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#999"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, MARGIN + 4.0, top + 14.0, panel.title);
        let _ = writeln!(out, r##"<text x="4" y="{:.2}" fill="#555">{y1:.3}</text>"##, top + 10.0);
        let _ = writeln!(out, r##"<text x="4" y="{:.2}" fill="#555">{y0:.3}</text>"##, top + h);
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#ddd"/>"##,
                py(0.0),
                MARGIN + w
            );
        }
        for (k, s) in panel.series.iter().enumerate() {
            let (width, dash) = match s.style {
                Style::Thin => (1.0, ""),
                Style::Thick => (2.5, ""),
                Style::Dashed => (1.0, r#" stroke-dasharray="6 4""#),
            };
            let mut points = String::new();
            for (x, y) in s.xs.iter().zip(s.ys) {
                let _ = write!(points, "{:.2},{:.2} ", px(*x), py(*y));
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="{width}"{dash} points="{}"/>"#,
                s.color,
                points.trim_end()
            );
            let lx = MARGIN + w - 120.0;
            let ly = top + 16.0 + 14.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="{2}" stroke-width="{width}"{dash}/><text x="{3:.2}" y="{4:.2}">{5}</text>"#,
                ly - 4.0,
                lx + 24.0,
                s.color,
                lx + 30.0,
                ly,
                s.label
            );
        }
    }
    let _ = writeln!(out, r##"<text x="{MARGIN}" y="{:.2}" fill="#555">{x0:.3}</text>"##, HEIGHT - 6.0);
    let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" fill="#555" text-anchor="end">{x1:.3}</text>"##, WIDTH - MARGIN, HEIGHT - 6.0);
    out.push_str("</svg>\n");
    out
}

/// Data and solution on top, dual variable inside its box below.
pub fn solution_plot(f: &Signal, u: &Signal, v: &[f64], radii: &[f64]) -> String {
    let grid = f.grid();
    let xs = grid.centers();
    let nodes: Vec<f64> = (0..=grid.n()).map(|k| grid.node(k)).collect();
    let neg: Vec<f64> = radii.iter().map(|r| -r).collect();
    plot(&[
        Panel {
            title: "data and solution",
            series: vec![
                Series { label: "f", xs: &xs, ys: f.values(), style: Style::Thin, color: "#1f77b4" },
                Series { label: "u", xs: &xs, ys: u.values(), style: Style::Thick, color: "#d62728" },
            ],
        },
        Panel {
            title: "dual variable",
            series: vec![
                Series { label: "v", xs: &nodes, ys: v, style: Style::Thin, color: "#2ca02c" },
                Series { label: "+radius", xs: &nodes, ys: radii, style: Style::Dashed, color: "#555" },
                Series { label: "-radius", xs: &nodes, ys: &neg, style: Style::Dashed, color: "#555" },
            ],
        },
    ])
}

fn regime_color(r: Regime) -> &'static str {
    match r {
        Regime::TwoPlateausWithJump => "#8fbcd4",
        Regime::PureStep => "#f4b183",
        Regime::Zero => "#d9d9d9",
    }
}

/// Colored cells over the `(mu, c)` plane, with the two regime boundaries drawn as lines.
/// `regimes` is indexed `[i_mu * cs.len() + i_c]`.
pub fn regime_map(mus: &[f64], cs: &[f64], regimes: &[Regime], lambda: f64, l: f64) -> String {
    let mut out = String::new();
    header(&mut out);
    let (m0, m1) = bounds(mus.iter().copied());
    let (c0, c1) = bounds(cs.iter().copied());
    let w = WIDTH - 2.0 * MARGIN - 160.0;
    let h = HEIGHT - 2.0 * MARGIN;
    let px = |m: f64| MARGIN + (m - m0) / (m1 - m0) * w;
    let py = |c: f64| MARGIN + h - (c - c0) / (c1 - c0) * h;
    let cw = w / mus.len() as f64;
    let ch = h / cs.len() as f64;
    for (i, &m) in mus.iter().enumerate() {
        for (j, &c) in cs.iter().enumerate() {
            let r = regimes[i * cs.len() + j];
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                px(m) - cw / 2.0,
                py(c) - ch / 2.0,
                cw,
                ch,
                regime_color(r)
            );
        }
    }
    let t = lambda * l * l / 2.0;
    // mu L + c = t and c = t
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"#,
        px(m0),
        py(t - m0 * l),
        px(m1),
        py(t - m1 * l)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
        px(m0),
        py(t),
        px(m1),
        py(t)
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">mu</text>"#, MARGIN + w / 2.0, HEIGHT - 12.0);
    let _ = writeln!(out, r#"<text x="14" y="{:.2}">c</text>"#, MARGIN + h / 2.0);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="{:.2}">{m0:.3}</text>"#, HEIGHT - 30.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{m1:.3}</text>"#, MARGIN + w, HEIGHT - 30.0);
    let _ = writeln!(out, r#"<text x="4" y="{:.2}">{c0:.3}</text>"#, MARGIN + h);
    let _ = writeln!(out, r#"<text x="4" y="{:.2}">{c1:.3}</text>"#, MARGIN + 10.0);
    for (k, (r, name)) in [
        (Regime::TwoPlateausWithJump, "jump of 2 mu"),
        (Regime::PureStep, "pure step"),
        (Regime::Zero, "zero"),
    ]
    .into_iter()
    .enumerate()
    {
        let y = MARGIN + 20.0 * k as f64;
        let x = WIDTH - MARGIN - 140.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="14" height="14" fill="{}"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            regime_color(r),
            x + 20.0,
            y + 11.0
        );
    }
    out.push_str("</svg>\n");
    out
}
