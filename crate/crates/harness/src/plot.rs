//! Log-log SVG of error against noise level, written by hand so the harness
//! needs no plotting stack.

use std::fmt::Write as _;

use lpvsc::tikhonov::{fit_rate, RatePoint};

use crate::error::{HarnessError, Result};
use crate::report::Summary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;

/// Decimal places of slopes in the legend.
pub const SLOPE_DIGITS: usize = 3;

/// Lines drawn through the centroid of the log data: the least-squares fit
/// passes through it, and the theoretical line is anchored there too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slopes {
    pub fitted: f64,
    pub theoretical: Option<f64>,
}

pub fn legend_label(kind: &str, slope: f64) -> String {
    format!("{kind} slope {slope:.SLOPE_DIGITS$}")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, lx: f64) -> f64 {
        MARGIN + (lx - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, ly: f64) -> f64 {
        HEIGHT - MARGIN - (ly - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Pads a degenerate or tight range to whole decades.
fn decade_range(lo: f64, hi: f64) -> (f64, f64) {
    let (lo, hi) = (lo.floor(), hi.ceil());
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Slopes for the plot: the summary's when present, else a fresh fit, else
/// none (fewer than three usable points).
pub fn slopes_for(points: &[RatePoint], summary: Option<&Summary>) -> Option<Slopes> {
    if let Some(fitted) = summary.and_then(|s| s.slope) {
        return Some(Slopes { fitted, theoretical: summary.and_then(|s| s.theoretical_exponent) });
    }
    let pairs: Vec<(f64, f64)> = points.iter().filter(|p| !p.stalled).map(|p| (p.delta, p.error)).collect();
    fit_rate(&pairs).ok().map(|f| Slopes { fitted: f.slope, theoretical: None })
}

pub fn render_svg(title: &str, points: &[RatePoint], slopes: Option<Slopes>) -> Result<String> {
    let usable: Vec<&RatePoint> = points.iter().filter(|p| p.delta > 0.0 && p.error > 0.0).collect();
    if usable.is_empty() {
        return Err(HarnessError::NoData);
    }
    let lx: Vec<f64> = usable.iter().map(|p| p.delta.log10()).collect();
    let ly: Vec<f64> = usable.iter().map(|p| p.error.log10()).collect();
    let (cx, cy) = (lx.iter().sum::<f64>() / lx.len() as f64, ly.iter().sum::<f64>() / ly.len() as f64);
    let slopes = if usable.len() > 1 { slopes } else { None };

    let mut ymin = ly.iter().copied().fold(f64::INFINITY, f64::min);
    let mut ymax = ly.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let x = decade_range(
        lx.iter().copied().fold(f64::INFINITY, f64::min),
        lx.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut lines: Vec<(&str, &str, f64)> = Vec::new();
    if let Some(s) = slopes {
        lines.push(("fitted", "#1f77b4", s.fitted));
        if let Some(t) = s.theoretical {
            lines.push(("theoretical", "#d62728", t));
        }
    }
    for &(_, _, k) in &lines {
        for end in [x.0, x.1] {
            let v = cy + k * (end - cx);
            ymin = ymin.min(v);
            ymax = ymax.max(v);
        }
    }
    let frame = Frame { x, y: decade_range(ymin, ymax) };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (frame.px(x.0), frame.px(x.1), frame.py(frame.y.0), frame.py(frame.y.1));
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for d in (x.0 as i32)..=(x.1 as i32) {
        let px = frame.px(d as f64);
        let _ = writeln!(svg, r##"<line x1="{px}" y1="{y1}" x2="{px}" y2="{y0}" stroke="#ddd"/>"##);
        let _ = writeln!(svg, r#"<text x="{px}" y="{}" text-anchor="middle">1e{d}</text>"#, y0 + 18.0);
    }
    for d in (frame.y.0 as i32)..=(frame.y.1 as i32) {
        let py = frame.py(d as f64);
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{py}" x2="{x1}" y2="{py}" stroke="#ddd"/>"##);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">1e{d}</text>"#, x0 - 6.0, py + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">noise level</text>"#, WIDTH / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">error</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let path: Vec<String> =
        lx.iter().zip(&ly).map(|(a, b)| format!("{:.2},{:.2}", frame.px(*a), frame.py(*b))).collect();
    let _ = writeln!(svg, r#"<polyline class="error" points="{}" fill="none" stroke="black"/>"#, path.join(" "));
    for ((a, b), p) in lx.iter().zip(&ly).zip(&usable) {
        let fill = if p.stalled { "white" } else { "black" };
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="black"/>"#,
            frame.px(*a),
            frame.py(*b)
        );
    }
    for (i, (kind, colour, k)) in lines.iter().enumerate() {
        let (ya, yb) = (cy + k * (x.0 - cx), cy + k * (x.1 - cx));
        let _ = writeln!(
            svg,
            r#"<line class="{kind}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-dasharray="6 4"/>"#,
            frame.px(x.0),
            frame.py(ya),
            frame.px(x.1),
            frame.py(yb)
        );
        let ly = y1 + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-dasharray="6 4"/>"#,
            x0 + 10.0,
            x0 + 40.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{}">{}</text>"#,
            x0 + 46.0,
            ly + 4.0,
            legend_label(kind, *k)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
