//! Report emitters: pretty JSON, CSV rows and a static SVG decay plot.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::certificate::MixingCertificate;
use crate::Result;

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// Writes a header and raw string records.
pub fn write_csv_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

/// Formats a float with a fixed number of significant digits, so reports
/// are stable across platforms.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.12e}")
    }
}

/// `log₁₀` of the certified distances against `n`, with the claimed bound
/// `offset·rateⁿ` as a dashed line.
pub fn decay_svg(cert: &MixingCertificate, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 56.0;
    let pts: Vec<(f64, f64)> = cert
        .chain
        .iter()
        .filter(|e| e.distance.upper > 0.0)
        .map(|e| (e.n as f64, e.distance.upper.log10()))
        .collect();
    let bound: Vec<(f64, f64)> = cert
        .chain
        .iter()
        .map(|e| (e.n as f64, cert.offset * cert.rate.powi(e.n as i32)))
        .filter(|(_, b)| *b > 0.0)
        .map(|(n, b)| (n, b.log10()))
        .collect();
    let all = pts.iter().chain(&bound);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    if x1 - x0 < 1.0 {
        x1 = x0 + 1.0;
    }
    y0 = y0.floor();
    y1 = y1.ceil();
    if y1 - y0 < 1.0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let path = |v: &[(f64, f64)]| {
        v.iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(x), sy(y)))
            .collect::<String>()
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{PAD} L{PAD},{b} L{r},{b}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let step = ((y1 - y0) / 8.0).ceil().max(1.0);
    let mut t = y0;
    while t <= y1 + 1e-9 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#,
            PAD - 6.0,
            sy(t) + 4.0,
            t as i64
        );
        t += step;
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(x0), H - PAD + 18.0, x0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(x1), H - PAD + 18.0, x1);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, W / 2.0, H - 12.0);
    if !bound.is_empty() {
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="gray" stroke-dasharray="6 4"/>"#, path(&bound));
    }
    if !pts.is_empty() {
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path(&pts));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" fill="steelblue">distance to base (upper)</text>"#,
        W - PAD - 190.0,
        PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" fill="gray">offset·rateⁿ</text>"#, W - PAD - 190.0, PAD + 16.0);
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
