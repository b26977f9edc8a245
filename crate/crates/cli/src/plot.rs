//! Minimal static SVG line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) if hi > lo => (lo, hi),
        (true, true) => (lo - 0.5, hi + 0.5),
        _ => (0.0, 1.0),
    }
}

/// Axes, tick labels at both ends, a polyline through `(xs, ys)` and titles.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x0, x1) = range(xs);
    let (y0, y1) = range(ys);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 2.0 + 8.0, HEIGHT - MARGIN);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(w, r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(w, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#);
    let _ = writeln!(w, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>"#);
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(w, r#"<text x="{:.1}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"#, px(x), bottom + 16.0, fmt_tick(x));
    }
    for y in [y0, y1] {
        let _ = writeln!(w, r#"<text x="{}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#, left - 6.0, py(y) + 4.0, fmt_tick(y));
    }
    let _ = writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#, (left + right) / 2.0, HEIGHT - 14.0, escape(xlabel));
    let _ = writeln!(w, r#"<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{}</text>"#, (top + bottom) / 2.0, (top + bottom) / 2.0, escape(ylabel));
    let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(w, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.2" points="{}"/>"#, points.join(" "));
    svg.push_str("</svg>\n");
    svg
}

fn fmt_tick(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e9 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_has_axes_and_polyline() {
        let svg = line_chart("T <1>", "episode", "epsilon", &[0.0, 1.0, 2.0], &[1.0, 0.5, 0.25]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<line").count(), 2);
        assert!(svg.contains("T &lt;1&gt;"));
        assert!(svg.contains(r#"points="56.00,36.00 "#));
    }

    #[test]
    fn flat_and_empty_series() {
        assert!(line_chart("flat", "x", "y", &[0.0, 1.0], &[2.0, 2.0]).contains("polyline"));
        assert!(line_chart("empty", "x", "y", &[], &[]).contains(r#"points="""#));
    }
}
