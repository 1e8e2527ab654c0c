//! CSV and SVG writers for the result bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use shapebench_core::{BoxplotStats, RunTrace};

use crate::error::{Error, Result};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub(crate) fn component_headers(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("x{i}"))
}

/// `index,x1..xn,f_kwh,best_so_far_kwh`.
pub fn write_trace(path: &Path, trace: &RunTrace, n: usize) -> Result<()> {
    let header: Vec<String> = std::iter::once("index".to_string())
        .chain(component_headers(n))
        .chain(["f_kwh".to_string(), "best_so_far_kwh".to_string()])
        .collect();
    let rows: Vec<Vec<String>> = trace
        .records()
        .iter()
        .map(|r| {
            std::iter::once(r.index.to_string())
                .chain(r.x.iter().map(|v| fmt_f64(*v)))
                .chain([fmt_f64(r.f.value()), fmt_f64(r.best_so_far.value())])
                .collect()
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Reads a trace file back as `(x, f)` pairs.
pub fn read_trace(path: &Path) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut r =
        csv::Reader::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    let n = r.headers()?.len().saturating_sub(3);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::InvalidData, e),
                )
            })
        };
        let x = (1..=n)
            .map(|i| parse(&rec[i]))
            .collect::<Result<Vec<_>>>()?;
        out.push((x, parse(&rec[n + 1])?));
    }
    Ok(out)
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Minimal static boxplot: one box (q1..q3) with a median line and whiskers
/// to min/max per group.
pub fn boxplot_svg(title: &str, groups: &[(String, BoxplotStats)]) -> String {
    const PLOT_H: f64 = 260.0;
    const TOP: f64 = 40.0;
    const LEFT: f64 = 70.0;
    const SLOT: f64 = 110.0;
    let width = LEFT + SLOT * groups.len().max(1) as f64 + 20.0;
    let height = TOP + PLOT_H + 50.0;

    let lo = groups
        .iter()
        .map(|(_, s)| s.min)
        .fold(f64::INFINITY, f64::min);
    let hi = groups
        .iter()
        .map(|(_, s)| s.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    };
    let y = |v: f64| TOP + PLOT_H * (1.0 - (v - lo) / (hi - lo));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape_xml(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        TOP + PLOT_H
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0,
            v
        );
    }
    for (i, (label, s)) in groups.iter().enumerate() {
        let cx = LEFT + SLOT * (i as f64 + 0.5);
        let half = 25.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{cx}" y1="{:.2}" x2="{cx}" y2="{:.2}" stroke="black"/>"#,
            y(s.max),
            y(s.min)
        );
        for v in [s.min, s.max] {
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="black"/>"#,
                cx - half / 2.0,
                y(v),
                cx + half / 2.0,
                y(v)
            );
        }
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{:.2}" width="{}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            cx - half,
            y(s.q3),
            2.0 * half,
            (y(s.q1) - y(s.q3)).max(0.5)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            y(s.median),
            cx + half,
            y(s.median)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{cx}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + PLOT_H + 20.0,
            escape_xml(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
