//! Minimal static SVG rendering of a chart spec, one panel per series.

use std::fmt::Write;

use super::ChartSpec;

const WIDTH: f64 = 900.0;
const PANEL: f64 = 220.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(spec: &ChartSpec) -> String {
    let panels = spec.series.len().max(1);
    let height = MARGIN * 2.0 + PANEL * panels as f64;
    let n = spec.series.first().map_or(1, |s| s.points.len().max(1));
    let sx = |x: f64| MARGIN + (x + 0.5) / n as f64 * (WIDTH - 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r##"<text x="{MARGIN}" y="20">{}</text>"##, escape(&spec.title));
    for (p, series) in spec.series.iter().enumerate() {
        let top = MARGIN + PANEL * p as f64;
        let bottom = top + PANEL - 20.0;
        let bands: Vec<_> = spec.bands.iter().filter(|b| b.attribute == series.attribute).collect();
        let goals: Vec<_> = spec.goal_lines.iter().filter(|g| g.attribute == series.attribute).collect();
        let ys = series
            .points
            .iter()
            .map(|pt| pt.y)
            .chain(bands.iter().flat_map(|b| [b.y_lo, b.y_hi]))
            .chain(goals.iter().map(|g| g.y));
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let sy = |y: f64| bottom - (y - lo) / span * (bottom - top);

        for b in &bands {
            let fill = if b.role == "summarizer" { "#fde68a" } else { "#f3f4f6" };
            let _ = writeln!(
                out,
                r##"<rect x="{MARGIN}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="white"/>"##,
                sy(b.y_hi),
                WIDTH - 2.0 * MARGIN,
                (sy(b.y_lo) - sy(b.y_hi)).max(0.0)
            );
        }
        for w in &spec.windows {
            let stroke = if w.role == "focus" { "#2563eb" } else { "#9333ea" };
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{top}" width="{:.2}" height="{:.2}" fill="none" stroke="{stroke}" stroke-dasharray="4 2"/>"##,
                sx(w.x_lo),
                sx(w.x_hi) - sx(w.x_lo),
                bottom - top
            );
        }
        for g in &goals {
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="#16a34a"/>"##,
                WIDTH - MARGIN,
                y = sy(g.y)
            );
        }
        let line: Vec<String> = series
            .points
            .iter()
            .map(|pt| format!("{:.2},{:.2}", sx(pt.x), sy(pt.y)))
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#374151"/>"##,
            line.join(" ")
        );
        for s in spec.segments.iter().filter(|s| s.attribute == series.attribute) {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="#ea580c" stroke-width="2"/>"##,
                sx(s.x_lo),
                sx(s.x_hi),
                y = sy(s.y)
            );
        }
        for &i in &spec.highlighted_points {
            if let Some(pt) = series.points.get(i) {
                let _ = writeln!(
                    out,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#dc2626"/>"##,
                    sx(pt.x),
                    sy(pt.y)
                );
            }
        }
        let _ = writeln!(
            out,
            r##"<text x="{MARGIN}" y="{:.2}">{}</text>"##,
            bottom + 14.0,
            escape(&series.attribute)
        );
    }
    out.push_str("</svg>\n");
    out
}
