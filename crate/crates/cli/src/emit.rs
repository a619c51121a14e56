//! CSV, SVG and metadata output for [`ReportTable`]s.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gqc_core::report::{Cell, ReportTable};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

pub fn parse_formats(items: &[String]) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let f = match item.trim() {
            "csv" => Format::Csv,
            "svg" => Format::Svg,
            other => return Err(CliError::Validation(format!("--format: unknown format '{other}'"))),
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        out.push(Format::Csv);
    }
    Ok(out)
}

pub const SIGNIFICANT_DIGITS: usize = 12;

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.12g`-style rendering: shortest of fixed or scientific notation with
/// twelve significant digits and trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_sig(*x),
        Cell::Text(s) => s.clone(),
    }
}

pub fn csv_bytes(table: &ReportTable) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text)).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn metadata_list(table: &ReportTable, key: &str) -> Option<Vec<String>> {
    let v = table.metadata.get(key)?.as_array()?;
    Some(v.iter().filter_map(|x| x.as_str().map(String::from)).collect())
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn collect_series(table: &ReportTable, x_col: usize) -> Vec<Series> {
    let group_cols: Vec<usize> = metadata_list(table, "plot_group")
        .unwrap_or_default()
        .iter()
        .filter_map(|c| table.column_index(c))
        .collect();
    let y_cols: Vec<usize> = match metadata_list(table, "plot_series") {
        Some(names) => names.iter().filter_map(|c| table.column_index(c)).collect(),
        None => (0..table.columns.len())
            .filter(|&i| i != x_col && table.rows.iter().all(|r| r[i].as_f64().is_some()))
            .collect(),
    };
    let mut series: Vec<Series> = Vec::new();
    for row in &table.rows {
        let Some(x) = row[x_col].as_f64() else { continue };
        let group: Vec<String> = group_cols.iter().map(|&g| cell_text(&row[g])).collect();
        for &y in &y_cols {
            let Some(v) = row[y].as_f64() else { continue };
            let mut label = table.columns[y].clone();
            if !group.is_empty() {
                label = format!("{} [{}]", label, group.join(" "));
            }
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((x, v)),
                None => series.push(Series { label, points: vec![(x, v)] }),
            }
        }
    }
    series
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static line plot of every numeric series against column `t`. Returns
/// `None` when there is nothing to draw.
pub fn svg_string(table: &ReportTable) -> Option<String> {
    let x_col = table.column_index("t")?;
    let series = collect_series(table, x_col);
    if series.is_empty() {
        return None;
    }
    let (w, h, left, right, top, bottom) = (720.0, 420.0, 70.0, 230.0, 30.0, 50.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">t</text>"#, left + pw / 2.0, h - 12.0);
    for (v, anchor, x) in [(x0, "start", left), (x1, "end", left + pw)] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" font-size="11" text-anchor="{anchor}">{}</text>"#,
            top + ph + 16.0,
            format_sig(v)
        );
    }
    for (v, y) in [(y0, top + ph), (y1, top + 10.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            format_sig(v)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 14.0 * (i as f64 + 1.0);
        let lx = w - right + 12.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#, ly - 4.0, lx + 16.0, ly - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{ly}" font-size="10">{}</text>"#, lx + 20.0, xml_escape(&s.label));
    }
    out.push_str("</svg>\n");
    Some(out)
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Writes `<stem>.csv` and, when requested and non-empty, `<stem>.svg`.
pub fn emit_report(table: &ReportTable, out_dir: &Path, stem: &str, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    if formats.contains(&Format::Csv) {
        files.push(write(out_dir.join(format!("{stem}.csv")), &csv_bytes(table)?)?);
    }
    if formats.contains(&Format::Svg) {
        if let Some(svg) = svg_string(table) {
            files.push(write(out_dir.join(format!("{stem}.svg")), svg.as_bytes())?);
        }
    }
    Ok(files)
}

/// Writes `<stem>.meta.json`; the only output that carries a timestamp.
pub fn write_meta(out_dir: &Path, stem: &str, meta: &serde_json::Value) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let text = serde_json::to_string_pretty(meta).map_err(|e| CliError::Io(e.to_string()))?;
    write(out_dir.join(format!("{stem}.meta.json")), text.as_bytes())
}
