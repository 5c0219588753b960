//! Minimal SVG line charts with a logarithmic x axis, one panel per method.

use std::fmt::Write;

use propci_core::report::format_significant;

#[derive(Debug, Clone)]
pub struct Series {
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub x_label: String,
    pub y_label: String,
    /// Horizontal reference lines.
    pub hlines: Vec<f64>,
    /// Legend entries: colour and label.
    pub legend: Vec<(&'static str, String)>,
    pub panels: Vec<Panel>,
}

const PALETTE: [&str; 6] = ["#8c564b", "#9467bd", "#ff7f0e", "#17becf", "#7f7f7f", "#bcbd22"];

/// Red, green and blue for the standard sizes; the palette for the rest.
pub fn color_for(n: u64, index: usize) -> &'static str {
    match n {
        32 => "#d62728",
        64 => "#2ca02c",
        2048 => "#1f77b4",
        _ => PALETTE[index % PALETTE.len()],
    }
}

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 12.0;
const MARGIN_T: f64 = 26.0;
const MARGIN_B: f64 = 36.0;
const COLUMNS: usize = 3;
const LEGEND_H: f64 = 28.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn decades(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().ceil() as i32, hi.log10().floor() as i32);
    (a..=b).map(|e| 10f64.powi(e)).collect()
}

pub fn render(fig: &Figure) -> String {
    let cols = COLUMNS.min(fig.panels.len().max(1));
    let rows = fig.panels.len().div_ceil(cols).max(1);
    let (w, h) = (cols as f64 * PANEL_W, rows as f64 * PANEL_H + LEGEND_H);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    let mut lx = 10.0;
    for (color, label) in &fig.legend {
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="14" x2="{}" y2="14" stroke="{color}" stroke-width="2"/><text x="{}" y="18">{}</text>"#,
            lx + 18.0,
            lx + 22.0,
            escape(label)
        );
        lx += 30.0 + 6.5 * label.len() as f64;
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="end">dashed: lower, solid: upper</text>"#,
        w - 10.0
    );

    let (x0, x1) = (fig.x_range.0.log10(), fig.x_range.1.log10());
    let (y0, y1) = fig.y_range;
    let pw = PANEL_W - MARGIN_L - MARGIN_R;
    let ph = PANEL_H - MARGIN_T - MARGIN_B;

    for (i, panel) in fig.panels.iter().enumerate() {
        let ox = (i % cols) as f64 * PANEL_W + MARGIN_L;
        let oy = (i / cols) as f64 * PANEL_H + MARGIN_T + LEGEND_H;
        let sx = |x: f64| ox + (x.log10() - x0) / (x1 - x0) * pw;
        let sy = |y: f64| oy + ph - (y - y0) / (y1 - y0) * ph;

        let _ = writeln!(
            out,
            r#"<clipPath id="clip{i}"><rect x="{ox}" y="{oy}" width="{pw}" height="{ph}"/></clipPath>"#
        );
        let _ = writeln!(
            out,
            r##"<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#,
            ox + pw / 2.0,
            oy - 6.0,
            escape(&panel.title)
        );
        for d in decades(fig.x_range.0, fig.x_range.1) {
            let x = sx(d);
            let _ = writeln!(
                out,
                r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#444"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"##,
                oy + ph,
                oy + ph + 4.0,
                oy + ph + 14.0,
                format_significant(d)
            );
        }
        for k in 0..=4 {
            let v = y0 + (y1 - y0) * k as f64 / 4.0;
            let y = sy(v);
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{y}" x2="{ox}" y2="{y}" stroke="#444"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
                ox - 4.0,
                ox - 6.0,
                y + 3.0,
                format_significant((v * 1e6).round() / 1e6)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            ox + pw / 2.0,
            oy + ph + 28.0,
            escape(&fig.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text transform="translate({},{}) rotate(-90)" text-anchor="middle">{}</text>"#,
            ox - 42.0,
            oy + ph / 2.0,
            escape(&fig.y_label)
        );
        for &r in &fig.hlines {
            if r > y0 && r < y1 {
                let y = sy(r);
                let _ = writeln!(
                    out,
                    r##"<line x1="{ox}" y1="{y}" x2="{}" y2="{y}" stroke="#888" stroke-dasharray="2,3"/>"##,
                    ox + pw
                );
            }
        }
        for s in &panel.series {
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| *x > 0.0 && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y.clamp(y0 - (y1 - y0), y1 + (y1 - y0)))))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline clip-path="url(#clip{i})" fill="none" stroke="{}" stroke-width="1.3"{dash} points="{}"/>"#,
                s.color,
                pts.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
