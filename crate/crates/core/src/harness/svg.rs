//! Standalone SVG summary plots. Everything is written with fixed-precision
//! formatting so outputs are byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::harness::report::{LeaderboardReport, SensitivityReport};

const PANEL_W: f64 = 220.0;
const PANEL_H: f64 = 140.0;
const MARGIN: f64 = 40.0;
const BINS: usize = 16;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Small-multiple histograms of each team's DSC and HD distributions.
pub fn write_metric_histograms(
    report: &LeaderboardReport,
    dsc_path: &Path,
    hd_path: &Path,
) -> Result<()> {
    let dsc: Vec<(&str, &[f64])> = report
        .entries
        .iter()
        .map(|e| (e.team.as_str(), e.dsc_values.as_slice()))
        .collect();
    std::fs::write(dsc_path, histogram_panel_svg("DSC per team", &dsc, Some((0.0, 1.0))))?;
    let hd: Vec<(&str, &[f64])> = report
        .entries
        .iter()
        .map(|e| (e.team.as_str(), e.hd_values.as_slice()))
        .collect();
    std::fs::write(hd_path, histogram_panel_svg("HD (mm) per team", &hd, None))?;
    Ok(())
}

fn histogram_panel_svg(title: &str, series: &[(&str, &[f64])], range: Option<(f64, f64)>) -> String {
    let cols = 3usize.min(series.len().max(1));
    let rows = series.len().div_ceil(cols.max(1)).max(1);
    let width = MARGIN * 2.0 + cols as f64 * (PANEL_W + MARGIN);
    let height = MARGIN * 2.0 + rows as f64 * (PANEL_H + MARGIN) + 20.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        fmt(width),
        fmt(height)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="16">{}</text>"#,
        fmt(MARGIN),
        title
    );

    for (i, (team, values)) in series.iter().enumerate() {
        let x0 = MARGIN + (i % cols) as f64 * (PANEL_W + MARGIN);
        let y0 = 40.0 + (i / cols) as f64 * (PANEL_H + MARGIN);
        let (lo, hi) = range.unwrap_or_else(|| data_range(values));
        let counts = bin(values, lo, hi);
        let peak = counts.iter().copied().max().unwrap_or(1).max(1) as f64;

        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
            fmt(x0),
            fmt(y0),
            fmt(PANEL_W),
            fmt(PANEL_H)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12">{} (n={})</text>"#,
            fmt(x0),
            fmt(y0 - 6.0),
            team,
            values.len()
        );
        for (b, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let bw = PANEL_W / BINS as f64;
            let bh = PANEL_H * count as f64 / peak;
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#4878a8"/>"##,
                fmt(x0 + b as f64 * bw),
                fmt(y0 + PANEL_H - bh),
                fmt(bw.max(1.0) - 0.5),
                fmt(bh)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="10">{}</text>"#,
            fmt(x0),
            fmt(y0 + PANEL_H + 12.0),
            fmt(lo)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#,
            fmt(x0 + PANEL_W),
            fmt(y0 + PANEL_H + 12.0),
            fmt(hi)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn data_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn bin(values: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    let mut counts = vec![0usize; BINS];
    let span = hi - lo;
    for &v in values {
        let t = ((v - lo) / span).clamp(0.0, 1.0);
        let b = ((t * BINS as f64) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    counts
}

/// Grouped bar chart of first- and total-order indices per factor, one row
/// of panels per team, DSC and HD side by side.
pub fn write_sobol_chart(report: &SensitivityReport, path: &Path) -> Result<()> {
    let teams = &report.teams;
    let panel_w = 260.0;
    let panel_h = 150.0;
    let width = MARGIN * 2.0 + 2.0 * (panel_w + MARGIN);
    let height = MARGIN + teams.len().max(1) as f64 * (panel_h + MARGIN) + 30.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        fmt(width),
        fmt(height)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="16">Sobol' indices (dark: first-order, light: total-order)</text>"#,
        fmt(MARGIN)
    );

    for (ti, team) in teams.iter().enumerate() {
        for (oi, output) in team.outputs.iter().enumerate() {
            let x0 = MARGIN + oi as f64 * (panel_w + MARGIN);
            let y0 = 44.0 + ti as f64 * (panel_h + MARGIN);
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
                fmt(x0),
                fmt(y0),
                fmt(panel_w),
                fmt(panel_h)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12">{} — {}</text>"#,
                fmt(x0),
                fmt(y0 - 6.0),
                team.team,
                output.output
            );
            // indices live in [0,1] up to estimator noise; clamp for drawing
            let n = output.factors.len().max(1) as f64;
            let group_w = panel_w / n;
            for (fi, factor) in output.factors.iter().enumerate() {
                let gx = x0 + fi as f64 * group_w;
                for (which, value, color) in
                    [(0.0, factor.s1, "#2b5d8c"), (1.0, factor.st, "#77a8d0")]
                {
                    let h = panel_h * value.clamp(0.0, 1.0);
                    let bw = group_w * 0.35;
                    let _ = writeln!(
                        svg,
                        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"##,
                        fmt(gx + group_w * 0.1 + which * bw),
                        fmt(y0 + panel_h - h),
                        fmt(bw - 1.0),
                        fmt(h),
                        color
                    );
                }
                let _ = writeln!(
                    svg,
                    r#"<text x="{}" y="{}" font-size="10">{}</text>"#,
                    fmt(gx + group_w * 0.1),
                    fmt(y0 + panel_h + 12.0),
                    factor.factor
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}
