use std::fmt::Write as _;
use std::path::Path;

use super::{atomic_write, sig6, TRACE_HEADER};
use crate::error::{Error, Result};
use crate::solver::{MotionTrace, TraceRow};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefLine {
    /// Solid horizontal line, e.g. the 0 mm closure reference.
    Horizontal { y: f64, label: String },
    /// Dashed vertical line, e.g. a switching temperature.
    Vertical { x: f64, label: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub series: Vec<Series>,
    pub x_label: String,
    pub y_label: String,
    pub ref_lines: Vec<RefLine>,
}

impl PlotSpec {
    /// Both tip positions over temperature with a 0 mm line and one dashed line per switching temperature.
    pub fn tips(switching: &[(String, f64)]) -> Self {
        let mut ref_lines = vec![RefLine::Horizontal {
            y: 0.0,
            label: "0 mm".into(),
        }];
        for (name, t) in switching {
            ref_lines.push(RefLine::Vertical {
                x: *t,
                label: format!("T_sw {name}"),
            });
        }
        Self {
            series: vec![
                Series {
                    label: "left tip".into(),
                    x: "temp_C".into(),
                    y: "x_left_mm".into(),
                },
                Series {
                    label: "right tip".into(),
                    x: "temp_C".into(),
                    y: "x_right_mm".into(),
                },
            ],
            x_label: "temperature (°C)".into(),
            y_label: "tip displacement (mm)".into(),
            ref_lines,
        }
    }
}

fn column(name: &str) -> Option<fn(&TraceRow) -> f64> {
    let f: fn(&TraceRow) -> f64 = match name {
        "time_s" => |r| r.time_s,
        "temp_C" => |r| r.temp_c,
        "q_left" => |r| r.q_left,
        "q_right" => |r| r.q_right,
        "x_left_mm" => |r| r.x_left_mm,
        "x_right_mm" => |r| r.x_right_mm,
        _ => return None,
    };
    Some(f)
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Renders the plot; fails before producing anything if a column is unknown.
pub fn render_plot(trace: &MotionTrace, spec: &PlotSpec) -> Result<String> {
    let mut cols = Vec::with_capacity(spec.series.len());
    for s in &spec.series {
        let fx = column(&s.x).ok_or_else(|| Error::config("plot.series.x", format!("unknown column `{}`; expected one of {TRACE_HEADER}", s.x)))?;
        let fy = column(&s.y).ok_or_else(|| Error::config("plot.series.y", format!("unknown column `{}`; expected one of {TRACE_HEADER}", s.y)))?;
        cols.push((fx, fy));
    }

    let xr = range(cols.iter().flat_map(|(fx, _)| trace.rows.iter().map(fx))).unwrap_or((0.0, 1.0));
    let yr = range(
        cols.iter()
            .flat_map(|(_, fy)| trace.rows.iter().map(fy))
            .chain(spec.ref_lines.iter().filter_map(|l| match l {
                RefLine::Horizontal { y, .. } => Some(*y),
                RefLine::Vertical { .. } => None,
            })),
    )
    .unwrap_or((0.0, 1.0));
    let (x0, x1) = if cols.is_empty() { xr } else { widen(xr) };
    let (y0, y1) = widen(yr);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (bx0, bx1, by0, by1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path class="axis" d="M{bx0:.2},{by0:.2} L{bx0:.2},{by1:.2} L{bx1:.2},{by1:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(fx),
            by1 + 16.0,
            sig6((fx * 100.0).round() / 100.0)
        );
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx0 - 6.0,
            py(fy) + 4.0,
            sig6((fy * 100.0).round() / 100.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (bx0 + bx1) / 2.0,
        H - 12.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (by0 + by1) / 2.0,
        (by0 + by1) / 2.0,
        escape(&spec.y_label)
    );

    for line in &spec.ref_lines {
        match line {
            RefLine::Horizontal { y, label } => {
                let _ = writeln!(
                    s,
                    r##"<line class="ref" x1="{bx0:.2}" y1="{yy:.2}" x2="{bx1:.2}" y2="{yy:.2}" stroke="#999999" stroke-dasharray="1,3"><title>{}</title></line>"##,
                    escape(label),
                    yy = py(*y)
                );
            }
            RefLine::Vertical { x, label } => {
                let _ = writeln!(
                    s,
                    r##"<line class="ref" x1="{xx:.2}" y1="{by0:.2}" x2="{xx:.2}" y2="{by1:.2}" stroke="#555555" stroke-dasharray="6,4"><title>{}</title></line>"##,
                    escape(label),
                    xx = px(*x)
                );
            }
        }
    }

    for (k, ((fx, fy), series)) in cols.iter().zip(&spec.series).enumerate() {
        let mut pts = String::new();
        for r in &trace.rows {
            if !pts.is_empty() {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.2},{:.2}", px(fx(r)), py(fy(r)));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{pts}"><title>{}</title></polyline>"#,
            COLORS[k % COLORS.len()],
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(trace: &MotionTrace, spec: &PlotSpec, path: &Path) -> Result<()> {
    let doc = render_plot(trace, spec)?;
    atomic_write(path, doc.as_bytes())
}
