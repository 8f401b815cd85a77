//! CSV and SVG writers. Everything is built in memory with fixed precision
//! and written in one call, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ppsf::SweepRecord;

use crate::error::CliError;

pub struct Table {
    precision: usize,
    text: String,
}

impl Table {
    pub fn new(header: &[&str], precision: usize) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { precision, text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::Int(v) => write!(self.text, "{v}"),
                Cell::Float(v) => write!(self.text, "{:.*}", self.precision, v),
                Cell::Bool(v) => write!(self.text, "{v}"),
            }
            .expect("writing to a String cannot fail");
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub enum Cell {
    Int(usize),
    Float(f64),
    Bool(bool),
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// `8` for 8.0, `2.5` for 2.5.
pub fn r_label(r: f64) -> String {
    format!("{r}")
}

pub const SWEEP_HEADER: [&str; 14] = [
    "r",
    "epsilon",
    "sigma",
    "gamma",
    "n",
    "m",
    "count",
    "lp_count",
    "slope",
    "target",
    "lp_slope",
    "lp_target",
    "max_residual",
    "valid",
];

pub fn sweep_table(records: &[SweepRecord], precision: usize) -> Table {
    let mut t = Table::new(&SWEEP_HEADER, precision);
    for rec in records {
        t.row(&[
            Cell::Float(rec.r),
            Cell::Float(rec.epsilon),
            Cell::Float(rec.sigma),
            Cell::Float(rec.gamma),
            Cell::Int(rec.n),
            Cell::Int(rec.m),
            Cell::Int(rec.count),
            Cell::Int(rec.lp_count),
            Cell::Float(rec.slope),
            Cell::Float(rec.target),
            Cell::Float(rec.lp_slope),
            Cell::Float(rec.lp_target),
            Cell::Float(rec.max_residual),
            Cell::Bool(rec.valid),
        ]);
    }
    t
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const PAD: f64 = 56.0;

/// Slope-versus-r plot with the reference lines `D`, `(1+ε)D`,
/// `(1−2ε)⁻¹D` and `(1−ε)⁻¹D`.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let first = &records[0];
    let d = first.lp_target;
    let mut lines = vec![
        ("D", d, "#555555"),
        ("(1+eps)D", first.lower_bound, "#1f77b4"),
        ("(1-eps)^-1 D", first.target, "#2ca02c"),
    ];
    if first.upper_bound.is_finite() {
        lines.push(("(1-2eps)^-1 D", first.upper_bound, "#d62728"));
    }

    let xs: Vec<f64> = records.iter().map(|r| r.r.ln()).collect();
    let (x0, x1) = (xs[0], xs[xs.len() - 1].max(xs[0] + 1e-9));
    let mut ys: Vec<f64> = records.iter().flat_map(|r| [r.slope, r.lp_slope]).collect();
    ys.extend(lines.iter().map(|l| l.1));
    let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min) * 0.95;
    let y1 = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) * 1.05;
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let py = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r##"<path d="M{PAD:.2},{:.2} H{:.2} M{PAD:.2},{:.2} V{PAD:.2}" stroke="black" fill="none"/>"##,
        HEIGHT - PAD,
        WIDTH - PAD,
        HEIGHT - PAD
    );
    for (label, y, colour) in &lines {
        let yy = py(*y);
        let _ = writeln!(
            w,
            r#"<line x1="{PAD:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{colour}" stroke-dasharray="4 3"/>"#,
            WIDTH - PAD
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" fill="{colour}">{label}</text>"#,
            WIDTH - PAD + 4.0,
            yy + 4.0
        );
    }
    for (series, colour, pick) in [
        ("count/r", "#000000", 0usize),
        ("lp_count/r", "#9467bd", 1usize),
    ] {
        let pts: Vec<String> = records
            .iter()
            .zip(&xs)
            .map(|(rec, &x)| {
                let y = if pick == 0 { rec.slope } else { rec.lp_slope };
                format!("{:.2},{:.2}", px(x), py(y))
            })
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline points="{}" stroke="{colour}" fill="none" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (cx, cy) = p.split_once(',').expect("formatted as x,y");
            let _ = writeln!(w, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{colour}"/>"#);
        }
        let ly = PAD - 24.0 + 14.0 * pick as f64;
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{ly:.2}" fill="{colour}">{series}</text>"#,
            PAD + 8.0
        );
    }
    for (rec, &x) in records.iter().zip(&xs) {
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            HEIGHT - PAD + 16.0,
            r_label(rec.r)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">r (log scale)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(w, "</svg>");
    s
}
