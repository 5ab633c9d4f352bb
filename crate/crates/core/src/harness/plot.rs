//! Minimal SVG line plots of experiment curves.

use std::fmt::Write;

use super::report::{DeviceKey, ExperimentResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// One polyline of `metric` means per (sweep name, device) pair.
pub fn render_svg(result: &ExperimentResult, metric: &str, devices: &[DeviceKey]) -> String {
    let mut series = Vec::new();
    for name in result.sweep_names() {
        for &d in devices {
            let pts: Vec<(f64, f64)> = result
                .curve(name, d, metric)
                .into_iter()
                .filter(|(_, s)| s.mean.is_finite())
                .map(|(x, s)| (x, s.mean))
                .collect();
            if !pts.is_empty() {
                series.push((format!("{name} / device {d}"), pts));
            }
        }
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (_, pts) in &series {
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if series.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + y0.abs().max(1e-12);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{} : {}</text>"#,
        WIDTH / 2.0,
        result.experiment,
        metric
    );
    let _ = writeln!(
        svg,
        r#"<polyline points="{m},{t} {m},{b} {r},{b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, anchor_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.4e}</text>"#,
            MARGIN - 4.0,
            anchor_y + 4.0
        );
    }
    for v in [x0, x1] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{v}</text>"#,
            sx(v),
            HEIGHT - MARGIN + 16.0
        );
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        let ly = MARGIN + 14.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{color}">{label}</text>"#,
            WIDTH - MARGIN - 200.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
