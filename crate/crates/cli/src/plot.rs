//! Log-log scatter of a report as a standalone SVG document.

use std::fmt::Write as _;

use crate::report::{FitVariable, ReportDocument};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlotError {
    #[error("a plot needs at least 2 samples, the report has {0}")]
    TooFewSamples(usize),
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn covering(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn unit(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter of `ratio` against the primary fit's variable (smallest degree
/// when there is no fit), the fitted power law and the growth factor scaled
/// by the empirical constant. Output depends only on `doc`.
pub fn plot_svg(doc: &ReportDocument) -> Result<Vec<u8>, PlotError> {
    let samples = &doc.grid.samples;
    if samples.len() < 2 {
        return Err(PlotError::TooFewSamples(samples.len()));
    }
    let primary = doc.fits.first();
    let variable = match primary.map(|f| f.variable) {
        None | Some(FitVariable::Listed) => FitVariable::MinDegree,
        Some(v) => v,
    };
    let floor = samples.iter().map(|s| s.ratio).filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };
    let points: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|s| {
            let x = variable.of(s).unwrap_or(1.0).max(1.0).log10();
            (x, s.ratio.max(floor).log10(), s.bound.log10())
        })
        .collect();
    let c_emp = doc.grid.empirical_constant().unwrap_or(1.0).log10();
    let xa = Axis::covering(points.iter().map(|p| p.0));
    let ya = Axis::covering(points.iter().flat_map(|p| [p.1, p.2 + c_emp]));
    let px = |x: f64| LEFT + xa.unit(x) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - ya.unit(y) * (HEIGHT - TOP - BOTTOM);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .unwrap();
    writeln!(w, r#"<text x="{LEFT}" y="24" font-size="14">{}</text>"#, escape(doc.study().tag())).unwrap();
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">log10 {}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 14.0,
        variable.label()
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">log10 ratio</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    )
    .unwrap();
    for (value, anchor_x) in [(xa.lo, "start"), (xa.hi, "end")] {
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor_x}">{:.3}</text>"#,
            px(value),
            HEIGHT - BOTTOM + 16.0,
            value
        )
        .unwrap();
    }
    for value in [ya.lo, ya.hi] {
        writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#, LEFT - 6.0, py(value) + 4.0, value)
            .unwrap();
    }

    // growth factor times the empirical constant, one vertex per abscissa
    let mut reference: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.2 + c_emp)).collect();
    reference.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    reference.dedup_by(|a, b| a.0 == b.0);
    let path: Vec<String> = reference.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    writeln!(
        w,
        r##"<polyline points="{}" fill="none" stroke="#888888" stroke-dasharray="6 4"><title>bound slope reference</title></polyline>"##,
        path.join(" ")
    )
    .unwrap();

    if let Some(fit) = primary {
        let (alpha, beta) = (fit.fit.exponent, fit.fit.intercept / std::f64::consts::LN_10);
        let line = |x: f64| beta + alpha * x;
        writeln!(
            w,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
            px(xa.lo),
            py(line(xa.lo)),
            px(xa.hi),
            py(line(xa.hi))
        )
        .unwrap();
        writeln!(
            w,
            r##"<text class="slope" x="{:.2}" y="{:.2}" fill="#c0392b">{} slope = {alpha:.4}</text>"##,
            LEFT + 8.0,
            TOP + 16.0,
            escape(&fit.label)
        )
        .unwrap();
    }
    writeln!(
        w,
        r##"<text x="{:.2}" y="{:.2}" fill="#888888">dashed: bound × {:.4}</text>"##,
        LEFT + 8.0,
        TOP + 32.0,
        10f64.powf(c_emp)
    )
    .unwrap();

    for &(x, y, _) in &points {
        writeln!(w, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#2c3e50"/>"##, px(x), py(y)).unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg.into_bytes())
}
