//! Deterministic CSV and SVG writers shared by the CLI and the validation
//! suite.
//!
//! Every file starts with `#`-prefixed metadata lines (command line, seed,
//! version, tolerances) so a run can be reproduced from its outputs alone.
//! Numbers are serialized with 12 significant digits; identical inputs
//! produce byte-identical files.

use std::io::Write;
use std::path::Path;

/// 12 significant digits, scientific notation.
pub fn fmt_number(v: f64) -> String {
    format!("{v:.11e}")
}

/// A rectangular table with optional cells, ready for CSV rendering.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }
}

/// Render metadata plus table to CSV bytes (UTF-8, comma separated, one
/// header row, `#` metadata lines first).
pub fn render_csv(metadata: &[(String, String)], table: &Table) -> Vec<u8> {
    let mut out = Vec::new();
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}").expect("write to Vec cannot fail");
    }
    writeln!(out, "{}", table.columns.join(",")).expect("write to Vec cannot fail");
    for row in &table.rows {
        let line: Vec<String> = row
            .iter()
            .map(|c| c.map(fmt_number).unwrap_or_default())
            .collect();
        writeln!(out, "{}", line.join(",")).expect("write to Vec cannot fail");
    }
    out
}

/// Write CSV to disk.
pub fn write_csv(
    path: &Path,
    metadata: &[(String, String)],
    table: &Table,
) -> std::io::Result<()> {
    std::fs::write(path, render_csv(metadata, table))
}

/// One line series for the SVG plot.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal log-y line chart. CSV remains the authoritative artifact; this
/// is a quick-look rendering only.
pub fn render_svg_logy(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 760.0;
    const H: f64 = 520.0;
    const ML: f64 = 70.0; // margins
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 55.0;
    const PALETTE: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
    ];

    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && *y > 0.0 && y.is_finite())
        .collect();
    let (x_min, x_max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| {
            (lo.min(*x), hi.max(*x))
        });
    let (mut ly_min, mut ly_max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, y)| {
            (lo.min(y.log10()), hi.max(y.log10()))
        });
    if !ly_min.is_finite() {
        ly_min = -1.0;
        ly_max = 0.0;
    }
    ly_min = ly_min.floor();
    ly_max = ly_max.ceil();
    if ly_max - ly_min < 1.0 {
        ly_max = ly_min + 1.0;
    }
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };

    let px = |x: f64| ML + (x - x_min) / x_span * (W - ML - MR);
    let py = |y: f64| {
        let ly = y.log10().clamp(ly_min, ly_max);
        H - MB - (ly - ly_min) / (ly_max - ly_min) * (H - MT - MB)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n",
        W / 2.0
    ));

    // y grid lines per decade
    let mut dec = ly_min as i64;
    while dec <= ly_max as i64 {
        let y = py(10f64.powi(dec as i32));
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n",
            W - MR
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e{dec}</text>\n",
            ML - 6.0,
            y + 4.0
        ));
        dec += 1;
    }
    // x ticks: 5 evenly spaced
    for i in 0..=4 {
        let x = x_min + x_span * i as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{x:.0}</text>\n",
            px(x),
            H - MB + 18.0
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{x_label}</text>\n",
        W / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {:.1})\">{y_label}</text>\n",
        H / 2.0,
        H / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && *y > 0.0 && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        if pts.len() > 1 {
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                pts.join(" ")
            ));
        }
        let ly = MT + 16.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            ML + 10.0,
            ML + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            ML + 40.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg_logy(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    std::fs::write(path, render_svg_logy(title, x_label, y_label, series))
}
