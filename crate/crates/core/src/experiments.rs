//! Motion metrics, design sweeps and the named demonstrators.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::mechanics::{AvfAssembly, LayoutChoice};
use crate::solver::{detect_events, run_ramp, Event, MotionTrace, ThermalProtocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapClass {
    Smooth,
    Snap,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub closure_pct: f64,
    pub reopening_pct: f64,
    pub rom_pct: f64,
    pub snap_class: SnapClass,
    pub onset_temp_c: Option<f64>,
    pub closure_temp_c: Option<f64>,
    pub reopening_temp_c: Option<f64>,
    pub snap_events: usize,
}

/// Closure and reopening of one tip series, in percent.
fn tip_metrics(xs: &[f64], x_open: f64) -> (f64, f64) {
    let (imin, xmin) = xs
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
    let closure = 100.0 * (x_open - xmin) / x_open;
    let xmax_after = xs[imin..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = x_open - xmin;
    let reopening = if span > 0.0 {
        100.0 * (xmax_after - xmin) / span
    } else {
        0.0
    };
    (closure, reopening)
}

pub fn compute_metrics(trace: &MotionTrace, asm: &AvfAssembly) -> Result<MetricsReport> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let x_open = asm.x_open;
    // The tips meet at the midline; positions past it count as fully closed.
    let left: Vec<f64> = trace.rows.iter().map(|r| r.x_left_mm.max(0.0)).collect();
    let right: Vec<f64> = trace.rows.iter().map(|r| r.x_right_mm.max(0.0)).collect();
    let (cl, rl) = tip_metrics(&left, x_open);
    let (cr, rr) = tip_metrics(&right, x_open);
    let closure_pct = (cl + cr) / 2.0;
    let reopening_pct = (rl + rr) / 2.0;

    let ev = detect_events(trace, x_open);
    let snap_class = if ev.closure_temp.is_none() {
        SnapClass::Failed
    } else if ev.snaps.iter().any(|&(_, e)| e == Event::SnapClose) {
        SnapClass::Snap
    } else {
        SnapClass::Smooth
    };
    Ok(MetricsReport {
        closure_pct,
        reopening_pct,
        rom_pct: (closure_pct + reopening_pct) / 2.0,
        snap_class,
        onset_temp_c: ev.onset_temp,
        closure_temp_c: ev.closure_temp,
        reopening_temp_c: ev.reopening_temp,
        snap_events: ev.snaps.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Fail,
    Close,
    SnapClose,
}

impl Outcome {
    pub fn glyph(self) -> &'static str {
        match self {
            Outcome::Fail => "×",
            Outcome::Close => "✓",
            Outcome::SnapClose => "✓✓",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Fail => "Fail",
            Outcome::Close => "Close",
            Outcome::SnapClose => "SnapClose",
        }
    }

    pub fn from_trace(trace: &MotionTrace, x_open: f64) -> Self {
        let ev = detect_events(trace, x_open);
        match ev.closure_temp {
            None => Outcome::Fail,
            Some(_) if ev.snaps.iter().any(|&(_, e)| e == Event::SnapClose) => Outcome::SnapClose,
            Some(_) => Outcome::Close,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub a_mm: f64,
    pub b_mm: f64,
    pub material: String,
    pub outcome: Outcome,
}

/// Mono-material ramp for every `(a, b)` pair; cells come back ordered by length, then thickness.
///
/// `jobs = None` uses the global rayon pool.
pub fn design_sweep(lengths: &[f64], thicknesses: &[f64], base: &RunConfig, jobs: Option<usize>) -> Result<Vec<SweepCell>> {
    if lengths.is_empty() || thicknesses.is_empty() {
        return Err(Error::config("sweep", "length and thickness grids must be nonempty"));
    }
    let grid: Vec<(f64, f64)> = lengths
        .iter()
        .flat_map(|&a| thicknesses.iter().map(move |&b| (a, b)))
        .collect();
    let run_cell = |&(a, b): &(f64, f64)| -> Result<SweepCell> {
        let mut cfg = base.clone();
        cfg.demonstrator.length_mm = a;
        cfg.demonstrator.thickness_mm = b;
        cfg.demonstrator.layout = LayoutChoice::None;
        let wrap = |e: Error| Error::Cell {
            a,
            b,
            source: Box::new(e),
        };
        let asm = cfg.assembly().map_err(wrap)?;
        let trace = run_ramp(&asm, &cfg.protocol, &cfg.solver).map_err(wrap)?;
        Ok(SweepCell {
            a_mm: a,
            b_mm: b,
            material: cfg.demonstrator.lobe_material.clone(),
            outcome: Outcome::from_trace(&trace, asm.x_open),
        })
    };
    match jobs {
        Some(1) => grid.iter().map(run_cell).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config("jobs", e.to_string()))?;
            pool.install(|| grid.par_iter().map(run_cell).collect())
        }
        None => grid.par_iter().map(run_cell).collect(),
    }
}

pub fn preset(name: &str) -> Result<(AvfAssembly, ThermalProtocol)> {
    let cfg = RunConfig::preset(name)?;
    Ok((cfg.assembly()?, cfg.protocol))
}
