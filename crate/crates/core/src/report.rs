//! SVG figures and CSV tables.
//!
//! All numbers are written with [`fmt_num`], which keeps six significant
//! digits, so the same inputs always produce the same bytes. Every data
//! series becomes exactly one SVG element carrying `class="series"`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::camera::{smoothness, ViewModel};
use crate::geo::{project_all, KeyPoint, Projection};
use crate::spline::{CurveKind, PathCurve, Tension};
use crate::stats::RegressionFit;
use crate::{Error, Result};

pub const MIN_SAMPLES_PER_SPAN: usize = 16;
const BAND_SAMPLES: usize = 64;

const PANEL_WIDTH: u32 = 360;
const PANEL_HEIGHT: u32 = 320;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 48.0;
const TICKS: usize = 5;

/// Formats `v` with six significant digits and no trailing zeros.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    PathCompare,
    ScatterBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStyle {
    Line,
    /// Dashed gray line, used for confidence-band edges.
    BandEdge,
    Markers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub style: SeriesStyle,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

/// A figure made of side-by-side panels sharing one pair of axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub width: u32,
    pub height: u32,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub panels: Vec<Panel>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bounds {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Bounds {
    fn padded(self) -> Self {
        let pad = |lo: f64, hi: f64| {
            let span = hi - lo;
            let p = if span > 0.0 { 0.05 * span } else { lo.abs().max(1.0) * 0.05 };
            (lo - p, hi + p)
        };
        let (x0, x1) = pad(self.x0, self.x1);
        let (y0, y1) = pad(self.y0, self.y1);
        Bounds { x0, x1, y0, y1 }
    }
}

impl FigureSpec {
    pub fn series_count(&self) -> usize {
        self.panels.iter().map(|p| p.series.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("figure dimensions must be positive"));
        }
        if self.panels.is_empty() || self.panels.iter().any(|p| p.series.is_empty()) {
            return Err(Error::invalid("figure needs at least one series per panel"));
        }
        for s in self.panels.iter().flat_map(|p| &p.series) {
            if s.points.is_empty() {
                return Err(Error::invalid(format!("series '{}' is empty", s.label)));
            }
            if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(Error::invalid(format!("series '{}' has non-finite points", s.label)));
            }
        }
        Ok(())
    }

    fn bounds(&self) -> Bounds {
        let mut b = Bounds { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
        for &(x, y) in self.panels.iter().flat_map(|p| &p.series).flat_map(|s| &s.points) {
            b.x0 = b.x0.min(x);
            b.x1 = b.x1.max(x);
            b.y0 = b.y0.min(y);
            b.y1 = b.y1.max(y);
        }
        b.padded()
    }

    pub fn to_svg(&self) -> Result<String> {
        self.validate()?;
        let bounds = self.bounds();
        let (w, h) = (f64::from(self.width), f64::from(self.height));
        let panel_w = w / self.panels.len() as f64;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, self.width, self.height);
        for (i, panel) in self.panels.iter().enumerate() {
            let frame = Frame {
                left: i as f64 * panel_w + MARGIN_LEFT,
                right: (i + 1) as f64 * panel_w - MARGIN_RIGHT,
                top: MARGIN_TOP,
                bottom: h - MARGIN_BOTTOM,
                bounds,
            };
            write_panel(&mut out, panel, &frame, &self.x_label, &self.y_label);
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

struct Frame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    bounds: Bounds,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.bounds.x0) / (self.bounds.x1 - self.bounds.x0) * (self.right - self.left)
    }

    fn py(&self, y: f64) -> f64 {
        self.bottom - (y - self.bounds.y0) / (self.bounds.y1 - self.bounds.y0) * (self.bottom - self.top)
    }
}

fn write_panel(out: &mut String, panel: &Panel, f: &Frame, x_label: &str, y_label: &str) {
    let _ = writeln!(out, "<g class=\"panel\">");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14" font-family="sans-serif">{}</text>"#,
        fmt_num((f.left + f.right) / 2.0),
        fmt_num(f.top - 12.0),
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<rect class="axes" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        fmt_num(f.left),
        fmt_num(f.top),
        fmt_num(f.right - f.left),
        fmt_num(f.bottom - f.top)
    );
    for k in 0..TICKS {
        let t = k as f64 / (TICKS - 1) as f64;
        let xv = f.bounds.x0 + t * (f.bounds.x1 - f.bounds.x0);
        let yv = f.bounds.y0 + t * (f.bounds.y1 - f.bounds.y0);
        let (px, py) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle" font-size="10" font-family="sans-serif">{4}</text>"#,
            fmt_num(px),
            fmt_num(f.bottom),
            fmt_num(f.bottom + 4.0),
            fmt_num(f.bottom + 16.0),
            fmt_num(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" text-anchor="end" font-size="10" font-family="sans-serif">{5}</text>"#,
            fmt_num(f.left - 4.0),
            fmt_num(py),
            fmt_num(f.left),
            fmt_num(f.left - 6.0),
            fmt_num(py + 3.0),
            fmt_num(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12" font-family="sans-serif">{}</text>"#,
        fmt_num((f.left + f.right) / 2.0),
        fmt_num(f.bottom + 36.0),
        escape(x_label)
    );
    let (yx, yy) = (f.left - 48.0, (f.top + f.bottom) / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{0}" y="{1}" transform="rotate(-90 {0} {1})" text-anchor="middle" font-size="12" font-family="sans-serif">{2}</text>"#,
        fmt_num(yx),
        fmt_num(yy),
        escape(y_label)
    );
    for s in &panel.series {
        write_series(out, s, f);
    }
    out.push_str("</g>\n");
}

fn write_series(out: &mut String, s: &Series, f: &Frame) {
    let label = escape(&s.label);
    let color = escape(&s.color);
    match s.style {
        SeriesStyle::Line | SeriesStyle::BandEdge => {
            let pts: Vec<String> =
                s.points.iter().map(|&(x, y)| format!("{},{}", fmt_num(f.px(x)), fmt_num(f.py(y)))).collect();
            let dash = if s.style == SeriesStyle::BandEdge { r#" stroke-dasharray="4 3""# } else { "" };
            let _ = writeln!(
                out,
                r#"<polyline class="series" data-label="{label}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                pts.join(" ")
            );
        }
        SeriesStyle::Markers => {
            let _ = writeln!(out, r#"<g class="series" data-label="{label}" fill="{color}">"#);
            for &(x, y) in &s.points {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3"/>"#, fmt_num(f.px(x)), fmt_num(f.py(y)));
            }
            out.push_str("</g>\n");
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn curve_color(kind: CurveKind) -> &'static str {
    match kind {
        CurveKind::Polyline => "#1f77b4",
        CurveKind::Bezier => "#2ca02c",
        CurveKind::CatmullRom => "#d62728",
    }
}

/// Samples every curve kind over `keypoints` (`x` = longitude,
/// `y` = latitude) into one panel each.
pub fn path_compare_figure(keypoints: &[KeyPoint], tension: Tension, samples_per_span: usize) -> Result<FigureSpec> {
    if samples_per_span < MIN_SAMPLES_PER_SPAN {
        return Err(Error::invalid(format!(
            "need at least {MIN_SAMPLES_PER_SPAN} samples per span, got {samples_per_span}"
        )));
    }
    let points = project_all(keypoints, Projection::Raw)?;
    let markers: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
    let mut panels = Vec::with_capacity(3);
    for kind in CurveKind::ALL {
        let curve = PathCurve::new(kind, points.clone(), tension)?;
        let total = samples_per_span * curve.span_count();
        let line =
            (0..=total).map(|j| curve.eval(j as f64 / total as f64).map(|p| (p.x, p.y))).collect::<Result<Vec<_>>>()?;
        panels.push(Panel {
            title: kind.as_str().to_string(),
            series: vec![
                Series {
                    label: kind.as_str().to_string(),
                    style: SeriesStyle::Line,
                    color: curve_color(kind).into(),
                    points: line,
                },
                Series {
                    label: "keypoints".into(),
                    style: SeriesStyle::Markers,
                    color: "black".into(),
                    points: markers.clone(),
                },
            ],
        });
    }
    Ok(FigureSpec {
        kind: FigureKind::PathCompare,
        width: PANEL_WIDTH * 3,
        height: PANEL_HEIGHT,
        title: "path comparison".into(),
        x_label: "longitude".into(),
        y_label: "latitude".into(),
        panels,
    })
}

pub fn render_path_compare(keypoints: &[KeyPoint], tension: Tension, samples_per_span: usize) -> Result<String> {
    path_compare_figure(keypoints, tension, samples_per_span)?.to_svg()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterLabels {
    pub title: String,
    pub x: String,
    pub y: String,
}

impl ScatterLabels {
    pub fn new(title: impl Into<String>, x: impl Into<String>, y: impl Into<String>) -> Self {
        Self { title: title.into(), x: x.into(), y: y.into() }
    }
}

/// Points, fitted line and the two band edges of `fit`.
pub fn scatter_band_figure(x: &[f64], y: &[f64], fit: &RegressionFit, labels: &ScatterLabels) -> Result<FigureSpec> {
    if x.is_empty() {
        return Err(Error::invalid("scatter plot needs at least one point"));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid: Vec<f64> = (0..BAND_SAMPLES).map(|k| lo + (hi - lo) * k as f64 / (BAND_SAMPLES - 1) as f64).collect();
    let edge = |upper: bool| -> Vec<(f64, f64)> {
        grid.iter()
            .map(|&xv| {
                let (l, u) = fit.band(xv);
                (xv, if upper { u } else { l })
            })
            .collect()
    };
    let series = vec![
        Series {
            label: "observations".into(),
            style: SeriesStyle::Markers,
            color: "#1f77b4".into(),
            points: x.iter().copied().zip(y.iter().copied()).collect(),
        },
        Series {
            label: "fit".into(),
            style: SeriesStyle::Line,
            color: "black".into(),
            points: vec![(lo, fit.fitted(lo)), (hi, fit.fitted(hi))],
        },
        Series { label: "band lower".into(), style: SeriesStyle::BandEdge, color: "gray".into(), points: edge(false) },
        Series { label: "band upper".into(), style: SeriesStyle::BandEdge, color: "gray".into(), points: edge(true) },
    ];
    Ok(FigureSpec {
        kind: FigureKind::ScatterBand,
        width: 480,
        height: 400,
        title: labels.title.clone(),
        x_label: labels.x.clone(),
        y_label: labels.y.clone(),
        panels: vec![Panel { title: labels.title.clone(), series }],
    })
}

pub fn render_scatter_band(x: &[f64], y: &[f64], fit: &RegressionFit, labels: &ScatterLabels) -> Result<String> {
    scatter_band_figure(x, y, fit, labels)?.to_svg()
}

/// `variable,mean,sd` table; `sd` uses `n - 1` and is 0 for a single value.
pub fn metrics_csv<S: AsRef<str>>(rows: &[(S, Vec<f64>)]) -> Result<String> {
    let mut out = String::from("variable,mean,sd\n");
    for (name, values) in rows {
        if values.is_empty() {
            return Err(Error::invalid(format!("no values for '{}'", name.as_ref())));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let _ = writeln!(out, "{},{},{}", name.as_ref(), fmt_num(mean), fmt_num(sd));
    }
    Ok(out)
}

/// One row per curve kind and view model, measured on the projected
/// keypoints. Corner angles are in radians and separated by `;`.
pub fn smoothness_csv(
    keypoints: &[KeyPoint],
    projection: Projection,
    tension: Tension,
    samples_per_span: usize,
) -> Result<String> {
    let points = project_all(keypoints, projection)?;
    let mut out = String::from("kind,view_model,max_angular_jump,mean_angular_speed,max_angular_speed,corner_angles\n");
    for kind in CurveKind::ALL {
        let curve = PathCurve::new(kind, points.clone(), tension)?;
        for model in ViewModel::ALL {
            let rep = smoothness(&curve, model, samples_per_span)?;
            let corners: Vec<String> = rep.corner_angles.iter().map(|&a| fmt_num(a)).collect();
            let _ = writeln!(
                out,
                "{kind},{model},{},{},{},{}",
                fmt_num(rep.max_angular_jump),
                fmt_num(rep.mean_angular_speed),
                fmt_num(rep.max_angular_speed),
                corners.join(";")
            );
        }
    }
    Ok(out)
}
