//! File formats: specs, reports, curve CSV, raw fields and SVG overlays.
//!
//! Floating point values in CSV files are written with 17 significant
//! digits so that they round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::capacitor::{CapacitorSpec, Role, Shape};
use crate::equipotential::LevelCurve;
use crate::pipeline::AnalysisReport;
use crate::solver::PotentialField;
use crate::{Error, Point, Result};

pub const FIELD_SCHEMA: &str = "capq-field/1";

/// Reads a spec, rejecting unknown fields and foreign schema versions.
pub fn read_spec(path: &Path) -> Result<CapacitorSpec> {
    let spec = CapacitorSpec::from_json(&fs::read_to_string(path)?)?;
    if spec.schema != crate::capacitor::SPEC_SCHEMA {
        return Err(Error::InvalidSpec(format!(
            "unsupported schema {:?}",
            spec.schema
        )));
    }
    Ok(spec)
}

pub fn write_spec(spec: &CapacitorSpec, path: &Path) -> Result<()> {
    fs::write(path, spec.to_json() + "\n")?;
    Ok(())
}

fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

/// `x,y` rows of a closed polyline.
pub fn points_csv(points: &[Point]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        push_row(&mut out, &[p.re, p.im]);
    }
    out
}

pub fn write_curve_csv(curve: &LevelCurve, path: &Path) -> Result<()> {
    fs::write(path, points_csv(&curve.points))?;
    Ok(())
}

/// Parses the output of [`points_csv`].
pub fn read_points_csv(text: &str) -> Result<Vec<Point>> {
    let mut lines = text.lines();
    if lines.next() != Some("x,y") {
        return Err(Error::InvalidSpec("curve CSV must start with an x,y header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (x, y) = l
                .split_once(',')
                .ok_or_else(|| Error::InvalidSpec(format!("bad CSV row {l:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("bad number {s:?}")))
            };
            Ok(Point::new(parse(x)?, parse(y)?))
        })
        .collect()
}

/// JSON summary of a curve, written next to its CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub level: f64,
    pub arc_length: f64,
    pub points: usize,
    pub csv: String,
}

/// File stem of the sidecar for the `index`-th level of a report.
pub fn curve_stem(index: usize) -> String {
    format!("level_{index:03}")
}

/// Writes `report.json` and one CSV/JSON pair per level curve into `dir`.
pub fn write_report(report: &AnalysisReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    fs::write(&path, report.to_json()?)?;
    written.push(path);
    for (k, rec) in report.levels.iter().enumerate() {
        let stem = curve_stem(k);
        let csv = dir.join(format!("{stem}.csv"));
        write_curve_csv(&rec.points, &csv)?;
        let meta = CurveRecord {
            level: rec.level,
            arc_length: rec.curve.arc_length,
            points: rec.curve.points,
            csv: format!("{stem}.csv"),
        };
        let json = dir.join(format!("{stem}.json"));
        fs::write(&json, serde_json::to_string_pretty(&meta)? + "\n")?;
        written.push(csv);
        written.push(json);
    }
    Ok(written)
}

/// Metadata for `field.bin`: `n × n` little-endian `f64`, row `j` after
/// row `j − 1`, `NaN` on cells inside `E` or `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub schema: String,
    pub n: usize,
    pub x_centers: Vec<f64>,
    pub y_centers: Vec<f64>,
    pub capacity: f64,
    pub dirichlet_functional: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub fn write_field(field: &PotentialField, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(8 * field.values.len());
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(dir.join("field.bin"), bytes)?;
    let header = FieldHeader {
        schema: FIELD_SCHEMA.into(),
        n: field.mask.n,
        x_centers: field.mask.xs.centers.clone(),
        y_centers: field.mask.ys.centers.clone(),
        capacity: field.capacity,
        dirichlet_functional: field.dirichlet_functional,
        residual: field.residual,
        iterations: field.iterations,
    };
    fs::write(dir.join("field.json"), serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(())
}

pub fn read_field(dir: &Path) -> Result<(FieldHeader, Vec<f64>)> {
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(dir.join("field.json"))?)?;
    let bytes = fs::read(dir.join("field.bin"))?;
    if bytes.len() != 8 * header.n * header.n {
        return Err(Error::InvalidSpec(format!(
            "field.bin holds {} bytes, expected {}",
            bytes.len(),
            8 * header.n * header.n
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

/// Sampled images of circles under the conformal chain: `rho,x,y` rows.
pub fn chain_csv(curves: &[(f64, Vec<Point>)]) -> String {
    let mut out = String::from("rho,x,y\n");
    for (rho, pts) in curves {
        for p in pts {
            push_row(&mut out, &[*rho, p.re, p.im]);
        }
    }
    out
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Svg {
    body: String,
    view: [f64; 4],
}

impl Svg {
    fn new(view: [f64; 4]) -> Self {
        Svg {
            body: String::new(),
            view,
        }
    }

    fn stroke(&self) -> f64 {
        (self.view[2] - self.view[0]).max(self.view[3] - self.view[1]) / 500.0
    }

    // y is flipped so that the picture has the usual orientation.
    fn xy(p: [f64; 2]) -> String {
        format!("{:.6},{:.6}", p[0], -p[1])
    }

    fn polyline(&mut self, pts: &[Point], closed: bool, style: &str) {
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            d.push(if k == 0 { 'M' } else { 'L' });
            d.push_str(&Self::xy([p.re, p.im]));
        }
        if closed {
            d.push('Z');
        }
        writeln!(self.body, r#"<path d="{d}" {style}/>"#).unwrap();
    }

    fn shape(&mut self, shape: &Shape, fill: &str) {
        let [x0, y0, x1, y1] = self.view;
        match shape {
            Shape::Disc { center, radius } => {
                let c = Self::xy(*center);
                let (cx, cy) = c.split_once(',').unwrap();
                writeln!(
                    self.body,
                    r#"<circle cx="{cx}" cy="{cy}" r="{radius:.6}" fill="{fill}"/>"#
                )
                .unwrap();
            }
            Shape::DiscComplement { center, radius } => {
                let c = Self::xy(*center);
                let (cx, cy) = c.split_once(',').unwrap();
                let cx: f64 = cx.parse().unwrap();
                let cy: f64 = cy.parse().unwrap();
                writeln!(
                    self.body,
                    concat!(
                        r#"<path fill-rule="evenodd" fill="{}" d="M{:.6},{:.6}H{:.6}V{:.6}H{:.6}Z "#,
                        r#"M{:.6},{:.6}a{r:.6},{r:.6} 0 1,0 {d:.6},0a{r:.6},{r:.6} 0 1,0 {md:.6},0Z"/>"#
                    ),
                    fill,
                    x0,
                    -y1,
                    x1,
                    -y0,
                    x0,
                    cx - radius,
                    cy,
                    r = radius,
                    d = 2.0 * radius,
                    md = -2.0 * radius
                )
                .unwrap();
            }
            Shape::Polygon { vertices } => {
                let pts: Vec<Point> = vertices.iter().map(|v| Point::new(v[0], v[1])).collect();
                self.polyline(&pts, true, &format!(r#"fill="{fill}""#));
            }
            Shape::SlitSegment {
                start,
                end,
                half_width,
            } => {
                let w = (2.0 * half_width).max(2.0 * self.stroke());
                let pts = [Point::new(start[0], start[1]), Point::new(end[0], end[1])];
                self.polyline(
                    &pts,
                    false,
                    &format!(r#"fill="none" stroke="{fill}" stroke-width="{w:.6}" stroke-linecap="round""#),
                );
            }
        }
    }

    fn finish(self) -> String {
        let [x0, y0, x1, y1] = self.view;
        format!(
            concat!(
                r#"<?xml version="1.0" encoding="UTF-8"?>"#,
                "\n",
                r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
                "\n{}</svg>\n"
            ),
            x0,
            -y1,
            x1 - x0,
            y1 - y0,
            self.body
        )
    }
}

fn continua(svg: &mut Svg, spec: &CapacitorSpec) {
    for (role, fill) in [(Role::E, "#4d4d4d"), (Role::F, "#a6a6a6")] {
        for shape in spec.shapes(role) {
            svg.shape(shape, fill);
        }
    }
}

/// SVG overlay of the continua and every level curve in `report`.
/// The view box is the grid rectangle of `spec`.
pub fn render_svg(report: &AnalysisReport, spec: &CapacitorSpec) -> Result<String> {
    if report.levels.is_empty() {
        return Err(Error::EmptyReport);
    }
    let g = &spec.grid;
    let mut svg = Svg::new([g.min[0], g.min[1], g.max[0], g.max[1]]);
    continua(&mut svg, spec);
    let w = svg.stroke();
    for (k, rec) in report.levels.iter().enumerate() {
        let style = format!(
            r#"fill="none" stroke="{}" stroke-width="{w:.6}" data-level="{}""#,
            PALETTE[k % PALETTE.len()],
            rec.level
        );
        svg.polyline(rec.points.vertices(), true, &style);
    }
    Ok(svg.finish())
}

pub fn emit_svg(report: &AnalysisReport, spec: &CapacitorSpec, path: &Path) -> Result<()> {
    let text = render_svg(report, spec)?;
    fs::write(path, text)?;
    Ok(())
}

/// SVG of sampled chain images; the view box encloses all samples.
pub fn render_chain_svg(curves: &[(f64, Vec<Point>)]) -> Result<String> {
    let pts = curves.iter().flat_map(|(_, c)| c.iter());
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for p in pts {
        b = [b[0].min(p.re), b[1].min(p.im), b[2].max(p.re), b[3].max(p.im)];
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(Error::EmptyReport);
    }
    let pad = 0.05 * (b[2] - b[0]).max(b[3] - b[1]).max(1e-9);
    let mut svg = Svg::new([b[0] - pad, b[1] - pad, b[2] + pad, b[3] + pad]);
    let w = svg.stroke();
    for (k, (rho, c)) in curves.iter().enumerate() {
        let style = format!(
            r#"fill="none" stroke="{}" stroke-width="{w:.6}" data-rho="{rho}""#,
            PALETTE[k % PALETTE.len()]
        );
        svg.polyline(c, true, &style);
    }
    Ok(svg.finish())
}
