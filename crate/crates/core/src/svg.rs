//! Minimal SVG 1.1 charts, written by hand.

use std::fmt::Write as _;

use crate::engine::{MetricsSeries, Tracked};

const WIDTH: f64 = 760.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 40.0;

const COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#222222", "#a6761d"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Axis bounds padded so a flat series still gets a visible band.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5e-3, hi + 0.5e-3);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

struct Panel<'a> {
    title: &'a str,
    top: f64,
    series: Vec<(&'a str, Vec<f64>)>,
}

fn panel(out: &mut String, p: &Panel<'_>, ticks: &[u64]) {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let x0 = MARGIN_L;
    let y0 = p.top + MARGIN_T;
    let t_max = ticks.last().copied().unwrap_or(0).max(1) as f64;
    let (lo, hi) = bounds(p.series.iter().flat_map(|(_, v)| v.iter().copied()));
    let sx = |t: u64| x0 + plot_w * t as f64 / t_max;
    let sy = |v: f64| y0 + plot_h * (hi - v) / (hi - lo);

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        x0 + plot_w / 2.0,
        p.top + 22.0,
        escape(p.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#888"/>"##
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            out,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{v:.3}</text>"##,
            x0 + plot_w,
            x0 - 6.0,
            y + 3.0
        );
    }
    for i in 0..=5 {
        let t = (t_max * i as f64 / 5.0).round() as u64;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{t}</text>"#,
            sx(t),
            y0 + plot_h + 14.0
        );
    }
    if lo < 0.0 && hi > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            out,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#888" stroke-dasharray="4 3"/>"##,
            x0 + plot_w
        );
    }
    for (i, (name, values)) in p.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for (t, v) in ticks.iter().zip(values) {
            let _ = write!(points, "{:.2},{:.2} ", sx(*t), sy(*v));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let ly = y0 + 14.0 + 16.0 * i as f64;
        let lx = x0 + plot_w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
}

/// Net change and variance of every tracked mean against tick.
pub fn lines_svg(metrics: &MetricsSeries, title: &str) -> String {
    let height = 2.0 * PANEL_H + 30.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let net = Panel {
        title: "net change of mean",
        top: 20.0,
        series: Tracked::ALL.iter().map(|&w| (w.name(), metrics.net_change(w))).collect(),
    };
    let var = Panel {
        title: "variance",
        top: 20.0 + PANEL_H,
        series: Tracked::ALL
            .iter()
            .map(|&w| (w.name(), metrics.variance(w).to_vec()))
            .collect(),
    };
    panel(&mut out, &net, &metrics.ticks);
    panel(&mut out, &var, &metrics.ticks);
    out.push_str("</svg>\n");
    out
}

/// Bar chart of purchase-probability bin counts over [0, 1].
pub fn histogram_svg(counts: &[usize], title: &str) -> String {
    let height = PANEL_H + 20.0;
    let plot_w = WIDTH - MARGIN_L - 40.0;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, y0) = (MARGIN_L, 20.0 + MARGIN_T);
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bar_w = plot_w / counts.len().max(1) as f64;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, &c) in counts.iter().enumerate() {
        let h = plot_h * c as f64 / max;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="#7570b3" stroke="white"><title>{c}</title></rect>"##,
            x0 + bar_w * i as f64,
            y0 + plot_h - h,
            bar_w
        );
    }
    let _ = writeln!(
        out,
        r##"<line x1="{x0:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#444"/>"##,
        y0 + plot_h,
        x0 + plot_w,
        y0 + plot_h
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{v:.2}</text>"#,
            x0 + plot_w * v,
            y0 + plot_h + 14.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
        x0 - 6.0,
        y0 + 4.0,
        max as usize
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">purchase probability</text>"#,
        x0 + plot_w / 2.0,
        y0 + plot_h + 32.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_has_one_bar_per_bin() {
        let svg = histogram_svg(&[1, 0, 3, 2], "a <b>");
        assert_eq!(svg.matches("<rect x=").count(), 4);
        assert!(svg.contains("a &lt;b&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_bounds_are_padded() {
        let (lo, hi) = bounds([0.3, 0.3].into_iter());
        assert!(lo < 0.3 && hi > 0.3);
        assert_eq!(bounds(std::iter::empty()), (0.0, 1.0));
    }
}
