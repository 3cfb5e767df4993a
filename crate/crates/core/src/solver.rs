//! Temperature-ramp continuation with fold (snap-through) detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanics::{tip_displacement, AvfAssembly};

/// A one-dimensional energy landscape with analytic derivatives.
pub trait Energy1D {
    fn energy(&self, q: f64) -> f64;
    fn gradient(&self, q: f64) -> f64;
    fn curvature(&self, q: f64) -> f64;
}

/// Tilted quartic double well `k (q² - 1)² - m q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWell {
    pub k: f64,
    pub m: f64,
}

impl Energy1D for DoubleWell {
    fn energy(&self, q: f64) -> f64 {
        let s = q * q - 1.0;
        self.k * s * s - self.m * q
    }
    fn gradient(&self, q: f64) -> f64 {
        4.0 * self.k * q * (q * q - 1.0) - self.m
    }
    fn curvature(&self, q: f64) -> f64 {
        self.k * (12.0 * q * q - 4.0)
    }
}

/// Critical tilt at which the q < 0 well of a double well with stiffness `k` vanishes.
pub fn fold_threshold(k: f64) -> f64 {
    8.0 * k / (3.0 * 3f64.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalProtocol {
    pub t_start_c: f64,
    pub t_end_c: f64,
    pub rate_c_per_min: f64,
    pub dt_step_c: f64,
}

impl Default for ThermalProtocol {
    fn default() -> Self {
        Self {
            t_start_c: 20.0,
            t_end_c: 70.0,
            rate_c_per_min: 1.0,
            dt_step_c: 0.05,
        }
    }
}

impl ThermalProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start_c.is_finite() && self.t_end_c.is_finite()) {
            return Err(Error::config("protocol.t_start_c", "temperatures must be finite"));
        }
        if !(self.t_end_c > self.t_start_c) {
            return Err(Error::config("protocol.t_end_c", "must exceed t_start_c"));
        }
        if !(self.rate_c_per_min > 0.0 && self.rate_c_per_min.is_finite()) {
            return Err(Error::config("protocol.rate_c_per_min", "must be positive"));
        }
        if !(self.dt_step_c > 0.0 && self.dt_step_c <= 1.0) {
            return Err(Error::config("protocol.dt_step_c", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_end_c - self.t_start_c) / self.dt_step_c + 1e-9).floor() as usize + 1
    }

    /// Temperature of step `i`, computed from the index so that rounding never accumulates.
    pub fn temperature(&self, i: usize) -> f64 {
        self.t_start_c + i as f64 * self.dt_step_c
    }

    pub fn time_s(&self, t: f64) -> f64 {
        (t - self.t_start_c) / self.rate_c_per_min * 60.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub grad_tol: f64,
    pub max_iter: usize,
    pub q_scan_min: f64,
    pub q_scan_max: f64,
    pub q_scan_points: usize,
    pub snap_window_s: f64,
    pub snap_fraction: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iter: 100,
            q_scan_min: -1.5,
            q_scan_max: 1.5,
            q_scan_points: 2001,
            snap_window_s: 0.04,
            snap_fraction: 0.3,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, key: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("solver.{key}"), "must be positive"))
            }
        };
        pos(self.grad_tol, "grad_tol")?;
        pos(self.snap_window_s, "snap_window_s")?;
        pos(self.snap_fraction, "snap_fraction")?;
        if self.max_iter == 0 {
            return Err(Error::config("solver.max_iter", "must be positive"));
        }
        if self.q_scan_points < 3 {
            return Err(Error::config("solver.q_scan_points", "needs at least 3 points"));
        }
        if !(self.q_scan_max > self.q_scan_min) {
            return Err(Error::config("solver.q_scan_max", "must exceed q_scan_min"));
        }
        Ok(())
    }
}

/// Largest Newton step in q. Keeps continuation inside the current basin.
const MAX_STEP: f64 = 0.05;

/// Finds the equilibrium reached from `q_prev`; `t` is only used for error context.
///
/// Damped Newton with backtracking. Reaching a point of non-positive curvature
/// while descending means the basin of `q_prev` has vanished (a fold), in which
/// case the global minimiser is located by a dense scan and polished.
pub fn equilibrate_step<E: Energy1D + ?Sized>(q_prev: f64, t: f64, e: &E, s: &SolverSettings) -> Result<(f64, bool)> {
    let mut q = q_prev;
    for _ in 0..s.max_iter {
        let g = e.gradient(q);
        if g.abs() < s.grad_tol {
            return Ok((q, false));
        }
        let h = e.curvature(q);
        if h <= 0.0 {
            return global_minimum(t, e, s).map(|q| (q, true));
        }
        let mut d = (-g / h).clamp(-MAX_STEP, MAX_STEP);
        let v0 = e.energy(q);
        let mut moved = false;
        for _ in 0..60 {
            let qn = q + d;
            if e.energy(qn) <= v0 || e.gradient(qn).abs() < g.abs() {
                q = qn;
                moved = true;
                break;
            }
            d *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Err(Error::Convergence {
        t,
        q,
        iters: s.max_iter,
    })
}

fn global_minimum<E: Energy1D + ?Sized>(t: f64, e: &E, s: &SolverSettings) -> Result<f64> {
    let n = s.q_scan_points;
    let span = s.q_scan_max - s.q_scan_min;
    let mut best = (f64::INFINITY, s.q_scan_min);
    for i in 0..n {
        let q = s.q_scan_min + span * i as f64 / (n - 1) as f64;
        let v = e.energy(q);
        if v < best.0 {
            best = (v, q);
        }
    }
    let mut q = best.1;
    for _ in 0..s.max_iter {
        let g = e.gradient(q);
        if g.abs() < s.grad_tol {
            return Ok(q);
        }
        let h = e.curvature(q);
        if h <= 0.0 {
            break;
        }
        q -= g / h;
    }
    Err(Error::Convergence {
        t,
        q,
        iters: s.max_iter,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    None,
    SnapClose,
    SnapOpen,
}

impl Event {
    pub fn token(self) -> &'static str {
        match self {
            Event::None => "none",
            Event::SnapClose => "snap_close",
            Event::SnapOpen => "snap_open",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Event::None),
            "snap_close" => Some(Event::SnapClose),
            "snap_open" => Some(Event::SnapOpen),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub time_s: f64,
    pub temp_c: f64,
    pub q_left: f64,
    pub q_right: f64,
    pub x_left_mm: f64,
    pub x_right_mm: f64,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MotionTrace {
    pub rows: Vec<TraceRow>,
}

impl MotionTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Fast-motion rule: a tip that moves at least `snap_fraction · x_open` within
/// one snap window (or one row, when rows are further apart than a window)
/// marks a snap. Returns the direction, or `None` for smooth motion.
fn jump_event(rows: &[TraceRow], i: usize, x_open: f64, s: &SolverSettings) -> Option<Event> {
    if i == 0 {
        return None;
    }
    let mut j = i - 1;
    while j > 0 && rows[i].time_s - rows[j - 1].time_s <= s.snap_window_s {
        j -= 1;
    }
    let jump = s.snap_fraction * x_open;
    let dl = rows[i].x_left_mm - rows[j].x_left_mm;
    let dr = rows[i].x_right_mm - rows[j].x_right_mm;
    let dx = [dl, dr].iter().filter(|d| d.abs() >= jump).sum::<f64>();
    if dl.abs() < jump && dr.abs() < jump {
        return None;
    }
    Some(if dx < 0.0 { Event::SnapClose } else { Event::SnapOpen })
}

pub fn run_ramp(asm: &AvfAssembly, proto: &ThermalProtocol, s: &SolverSettings) -> Result<MotionTrace> {
    proto.validate()?;
    s.validate()?;
    let n = proto.steps();

    let mut rows: Vec<TraceRow> = Vec::with_capacity(n);
    let (mut ql, mut qr) = (-1.0, -1.0);
    let mut previous_fast = false;
    for i in 0..n {
        let t = proto.temperature(i);
        let (nl, snap_l) = equilibrate_step(ql, t, &asm.left.landscape(t, asm.layout.as_ref()), s)?;
        let (nr, snap_r) = equilibrate_step(qr, t, &asm.right.landscape(t, asm.layout.as_ref()), s)?;
        rows.push(TraceRow {
            time_s: proto.time_s(t),
            temp_c: t,
            q_left: nl,
            q_right: nr,
            x_left_mm: tip_displacement(nl, asm),
            x_right_mm: tip_displacement(nr, asm),
            event: Event::None,
        });

        let event = if snap_l || snap_r {
            let prev = &rows[i.saturating_sub(1)];
            let row = &rows[i];
            let mut dx = 0.0;
            if snap_l {
                dx += row.x_left_mm - prev.x_left_mm;
            }
            if snap_r {
                dx += row.x_right_mm - prev.x_right_mm;
            }
            Some(if dx < 0.0 { Event::SnapClose } else { Event::SnapOpen })
        } else if previous_fast {
            // One event per jump, even if several rows share its window.
            None
        } else {
            jump_event(&rows, i, asm.x_open, s)
        };
        previous_fast = jump_event(&rows, i, asm.x_open, s).is_some();
        rows[i].event = event.unwrap_or(Event::None);
        ql = nl;
        qr = nr;
    }
    Ok(MotionTrace { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventReport {
    /// First temperature at which either tip has moved 5 % of the open gap from its starting position.
    pub onset_temp: Option<f64>,
    pub closure_temp: Option<f64>,
    pub reopening_temp: Option<f64>,
    pub snaps: Vec<(f64, Event)>,
    pub final_x_left_mm: f64,
    pub final_x_right_mm: f64,
}

/// Fraction of the open gap used for the onset, closure and reopening thresholds.
pub const EVENT_THRESHOLD: f64 = 0.05;

pub fn detect_events(trace: &MotionTrace, x_open: f64) -> EventReport {
    let tol = EVENT_THRESHOLD * x_open;
    let rows = &trace.rows;
    let onset_temp = rows.first().and_then(|first| {
        rows.iter()
            .find(|r| (r.x_left_mm - first.x_left_mm).abs() >= tol || (r.x_right_mm - first.x_right_mm).abs() >= tol)
            .map(|r| r.temp_c)
    });
    let closure_idx = rows
        .iter()
        .position(|r| r.x_left_mm.abs() <= tol && r.x_right_mm.abs() <= tol);

    let argmin = |f: fn(&TraceRow) -> f64| {
        rows.iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |acc, (i, r)| if f(r) < acc.1 { (i, f(r)) } else { acc })
    };
    let (il, min_l) = argmin(|r| r.x_left_mm);
    let (ir, min_r) = argmin(|r| r.x_right_mm);
    let from = il.max(ir).max(closure_idx.unwrap_or(0));
    let reopening_temp = rows
        .iter()
        .skip(from)
        .find(|r| r.x_left_mm - min_l >= tol && r.x_right_mm - min_r >= tol)
        .map(|r| r.temp_c);

    // Recorded events, plus fast motion in traces that were not produced by `run_ramp`.
    let s = SolverSettings::default();
    let mut snaps = Vec::new();
    let mut previous_fast = false;
    for (i, r) in rows.iter().enumerate() {
        let fast = jump_event(rows, i, x_open, &s);
        if r.event != Event::None {
            snaps.push((r.temp_c, r.event));
        } else if let (Some(e), false) = (fast, previous_fast) {
            snaps.push((r.temp_c, e));
        }
        previous_fast = fast.is_some() || r.event != Event::None;
    }
    let last = rows.last();
    EventReport {
        onset_temp,
        closure_temp: closure_idx.map(|i| rows[i].temp_c),
        reopening_temp,
        snaps,
        final_x_left_mm: last.map_or(x_open, |r| r.x_left_mm),
        final_x_right_mm: last.map_or(x_open, |r| r.x_right_mm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_rows() {
        assert_eq!(ThermalProtocol::default().steps(), 1001);
        let p = ThermalProtocol {
            dt_step_c: 0.3,
            ..Default::default()
        };
        assert_eq!(p.steps(), 167);
    }

    #[test]
    fn event_tokens_round_trip() {
        for e in [Event::None, Event::SnapClose, Event::SnapOpen] {
            assert_eq!(Event::from_token(e.token()), Some(e));
        }
        assert_eq!(Event::from_token("snap"), None);
    }

    #[test]
    fn settings_validation() {
        let s = SolverSettings {
            q_scan_points: 2,
            ..Default::default()
        };
        assert!(s.validate().is_err());
        assert!(SolverSettings::default().validate().is_ok());
    }
}
