//! Minimal standalone SVG charts.
//!
//! Each mark carries its data value in `data-*` attributes, formatted the
//! same way as the CSV written next to it.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Range padded so that a single value still spans a visible interval.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str, x_ticks: bool) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(out, r#"<g class="axes" stroke="black">"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(out, "</g>");
    for i in 0..=4 {
        let v = f.y.0 + (f.y.1 - f.y.0) * i as f64 / 4.0;
        let py = f.py(v);
        let _ = writeln!(out, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.3}</text>"#, x0 - 6.0, py + 4.0);
        if x_ticks {
            let u = f.x.0 + (f.x.1 - f.x.0) * i as f64 / 4.0;
            let px = f.px(u);
            let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y0 + 4.0);
            let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{u:.3}</text>"#, y0 + 18.0);
        }
    }
    let _ = writeln!(
        out,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text class="y-label" x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

/// Scatter plot of `(x, y)` points.
pub fn scatter(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let bounds = |sel: fn(&(f64, f64)) -> f64| {
        let lo = points.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            padded(lo, hi)
        } else {
            (0.0, 1.0)
        }
    };
    let frame = Frame { x: bounds(|p| p.0), y: bounds(|p| p.1) };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, true);
    let _ = writeln!(out, r##"<g class="points" fill="#1f77b4">"##);
    for &(x, y) in points {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" data-x="{x}" data-y="{y}"/>"#, frame.px(x), frame.py(y));
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

/// Bar chart with one bar per `(label, value)`; negative values hang below
/// the zero line.
pub fn bars(title: &str, x_label: &str, y_label: &str, data: &[(String, f64)]) -> String {
    let lo = data.iter().map(|d| d.1).fold(0.0, f64::min);
    let hi = data.iter().map(|d| d.1).fold(0.0, f64::max);
    let frame = Frame { x: (0.0, data.len().max(1) as f64), y: padded(lo, hi) };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, false);
    let zero = frame.py(0.0);
    let slot = frame.px(1.0) - frame.px(0.0);
    let _ = writeln!(out, r##"<g class="bars" fill="#ff7f0e">"##);
    for (i, (label, v)) in data.iter().enumerate() {
        let y = frame.py(*v);
        let (top, h) = if *v >= 0.0 { (y, zero - y) } else { (zero, y - zero) };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{h:.2}" data-label="{}" data-value="{v}"/>"#,
            frame.px(i as f64) + 0.1 * slot,
            0.8 * slot,
            escape(label)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{zero:.2}" x2="{}" y2="{zero:.2}" stroke="gray"/>"#, WIDTH - RIGHT);
    out.push_str("</svg>\n");
    out
}
