//! CSV and SVG renderings of a power table.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{PowerRow, PowerTable, TestKind};
use crate::error::{Error, Result};

const HEADER: [&str; 8] = ["test", "alternative", "n", "alpha", "trials", "rejections", "power", "se"];

/// `x` rounded to 6 significant digits, in shortest round-trip form.
fn sig6(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn ensure_nonempty(table: &PowerTable) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(())
}

fn record(table: &PowerTable, r: &PowerRow) -> [String; 8] {
    [
        table.test.to_string(),
        r.alternative.clone(),
        r.n.to_string(),
        sig6(table.alpha),
        r.trials.to_string(),
        r.rejections.to_string(),
        sig6(r.power),
        sig6(r.se),
    ]
}

pub fn write_power_csv<W: Write>(table: &PowerTable, out: W) -> Result<()> {
    ensure_nonempty(table)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &table.rows {
        w.write_record(record(table, r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_power_csv(table: &PowerTable, path: impl AsRef<Path>) -> Result<()> {
    ensure_nonempty(table)?;
    let mut buf = Vec::new();
    write_power_csv(table, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// The standard columns plus `reference`, filled from `reference(label, n)`
/// and left blank where it returns `None`.
pub fn emit_reference_csv<W: Write, F: Fn(&str, usize) -> Option<f64>>(
    table: &PowerTable,
    out: W,
    reference: F,
) -> Result<()> {
    ensure_nonempty(table)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = HEADER.to_vec();
    header.push("reference");
    w.write_record(&header)?;
    for r in &table.rows {
        let mut rec = record(table, r).to_vec();
        rec.push(reference(&r.alternative, r.n).map(sig6).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a CSV written by [`write_power_csv`]. Failures are not recorded in
/// the file and read back as zero.
pub fn read_power_csv<R: Read>(input: R) -> Result<PowerTable> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().take(HEADER.len()).ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut test: Option<TestKind> = None;
    let mut alpha = f64::NAN;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize| -> Result<&str> {
            rec.get(k).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing column {}", HEADER[k]),
            })
        };
        let num = |k: usize| -> Result<f64> {
            field(k)?.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {}", HEADER[k]),
            })
        };
        let int = |k: usize| -> Result<usize> {
            field(k)?.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad {}", HEADER[k]),
            })
        };
        test = Some(field(0)?.parse()?);
        alpha = num(3)?;
        rows.push(PowerRow {
            alternative: field(1)?.to_string(),
            n: int(2)?,
            trials: int(4)?,
            rejections: int(5)?,
            failures: 0,
            power: num(6)?,
            se: num(7)?,
        });
    }
    let test = test.ok_or(Error::EmptyData)?;
    Ok(PowerTable { test, alpha, rows })
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f",
];

/// Power curves over n, one polyline per alternative, with a dashed red
/// line at α. The n axis is logarithmic when all sizes are positive and
/// distinct sizes span more than a factor of two.
pub fn render_svg(table: &PowerTable) -> Result<String> {
    ensure_nonempty(table)?;
    let (w, h) = (720.0, 460.0);
    let (left, right, top, bottom) = (60.0, 180.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let mut sizes: Vec<usize> = table.rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let (lo, hi) = (sizes[0] as f64, *sizes.last().unwrap() as f64);
    let log = lo > 0.0 && hi / lo > 2.0;
    let t = |n: f64| if log { n.ln() } else { n };
    let (tlo, thi) = (t(lo), t(hi));
    let x_of = |n: usize| {
        if thi > tlo {
            left + pw * (t(n as f64) - tlo) / (thi - tlo)
        } else {
            left + pw / 2.0
        }
    };
    let y_of = |p: f64| top + ph * (1.0 - p.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle">{} power, alpha = {}</text>"#,
        left + pw / 2.0,
        table.test,
        sig6(table.alpha)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let p = i as f64 / 5.0;
        let y = y_of(p);
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{left}\" y2=\"{y:.2}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{p:.1}</text>",
            left - 5.0,
            left - 8.0,
            y + 4.0
        );
    }
    for &n in &sizes {
        let x = x_of(n);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>\
             <text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\">{n}</text>",
            top + ph,
            top + ph + 5.0,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let ya = y_of(table.alpha);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{ya:.2}" x2="{}" y2="{ya:.2}" stroke="red" stroke-dasharray="6,4"/>"#,
        left + pw
    );
    for (i, alt) in table.alternatives().into_iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut rows: Vec<&PowerRow> = table.rows.iter().filter(|r| r.alternative == alt).collect();
        rows.sort_by_key(|r| r.n);
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.n), y_of(r.power)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 15.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{colour}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\">{}</text>",
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(alt)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_power_svg(table: &PowerTable, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(table)?;
    fs::write(path, svg)?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
