//! Fitting material constants to force–temperature curves, and tuning the
//! mechanical gains against behavioral targets.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::material::{blocked_recovery_force, frozen_fraction, MaterialParams, ProgrammedState};
use crate::mechanics::LayoutChoice;
use crate::solver::{detect_events, run_ramp, Event};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub t_c: f64,
    pub f_n: f64,
}

/// Blocked-force test conditions shared by all samples of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceTest {
    pub area_mm2: f64,
    pub eps_prog: f64,
    pub t_fix: f64,
}

impl Default for ForceTest {
    fn default() -> Self {
        Self {
            area_mm2: 0.36,
            eps_prog: 0.40,
            t_fix: 20.0,
        }
    }
}

impl ForceTest {
    fn state(&self, p: &MaterialParams) -> ProgrammedState {
        ProgrammedState {
            eps_prog: self.eps_prog,
            t_fix: self.t_fix,
            phi_fix: frozen_fraction(self.t_fix, p),
            eps_retained_at_fix: p.r_f * self.eps_prog,
        }
    }

    /// Force per MPa of rubbery modulus on the plateau.
    fn plateau_per_mpa(&self, p: &MaterialParams) -> f64 {
        self.area_mm2 * (p.r_f - (1.0 - p.r_r)) * self.eps_prog
    }

    pub fn plateau(&self, p: &MaterialParams) -> f64 {
        p.e_rubbery_mpa * self.plateau_per_mpa(p)
    }
}

pub fn residuals(params: &MaterialParams, prog: &ProgrammedState, area_mm2: f64, samples: &[ForceSample]) -> Result<Vec<f64>> {
    samples
        .iter()
        .map(|s| Ok(blocked_recovery_force(s.t_c, prog, params, area_mm2)? - s.f_n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitBounds {
    pub t_sw: (f64, f64),
    pub w: (f64, f64),
    pub plateau: (f64, f64),
}

impl FitBounds {
    /// Generous box around an initial guess.
    pub fn around(init: &MaterialParams, test: &ForceTest) -> Self {
        let s = test.plateau(init);
        Self {
            t_sw: (init.t_sw_c - 20.0, init.t_sw_c + 20.0),
            w: (0.1, 4.0 * init.w_c),
            plateau: (1e-3 * s, (10.0 * s).min(0.999 * init.e_glassy_mpa * test.plateau_per_mpa(init))),
        }
    }

    fn lo(&self) -> [f64; 3] {
        [self.t_sw.0, self.w.0, self.plateau.0]
    }

    fn hi(&self) -> [f64; 3] {
        [self.t_sw.1, self.w.1, self.plateau.1]
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        let (lo, hi) = (self.lo(), self.hi());
        (0..3).all(|i| x[i] >= lo[i] && x[i] <= hi[i])
    }

    fn clamp(&self, x: [f64; 3]) -> [f64; 3] {
        let (lo, hi) = (self.lo(), self.hi());
        [x[0].clamp(lo[0], hi[0]), x[1].clamp(lo[1], hi[1]), x[2].clamp(lo[2], hi[2])]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: MaterialParams,
    pub plateau_n: f64,
    pub rss: f64,
    pub rss_init: f64,
    pub iterations: usize,
    /// Simplex collapsed and the switching parameters are identifiable from the data.
    pub converged: bool,
    pub restart: usize,
}

/// Restart offsets applied to every coordinate of the best point so far.
const RESTARTS: [f64; 3] = [0.05, -0.05, 0.15];
const MAX_ITER: usize = 4000;
const DIAMETER_TOL: f64 = 1e-8;

fn with_coords(init: &MaterialParams, test: &ForceTest, x: &[f64; 3]) -> MaterialParams {
    let mut p = init.clone();
    p.t_sw_c = x[0];
    p.w_c = x[1];
    p.e_rubbery_mpa = x[2] / test.plateau_per_mpa(init);
    p
}

fn rss_at(init: &MaterialParams, test: &ForceTest, samples: &[ForceSample], x: &[f64; 3]) -> f64 {
    let p = with_coords(init, test, x);
    let st = test.state(&p);
    match residuals(&p, &st, test.area_mm2, samples) {
        Ok(r) => r.iter().map(|v| v * v).sum(),
        Err(_) => f64::INFINITY,
    }
}

struct Simplex {
    best: [f64; 3],
    value: f64,
    iterations: usize,
    collapsed: bool,
}

/// Bounded Nelder–Mead in coordinates scaled by `scale`.
fn nelder_mead(f: &dyn Fn(&[f64; 3]) -> f64, start: [f64; 3], scale: [f64; 3], bounds: &FitBounds) -> Simplex {
    let to_x = |u: &[f64; 3]| bounds.clamp([u[0] * scale[0], u[1] * scale[1], u[2] * scale[2]]);
    let to_u = |x: &[f64; 3]| [x[0] / scale[0], x[1] / scale[1], x[2] / scale[2]];
    let eval = |u: &[f64; 3]| {
        let x = to_x(u);
        (to_u(&x), f(&x))
    };

    let u0 = to_u(&bounds.clamp(start));
    let mut pts: Vec<([f64; 3], f64)> = vec![eval(&u0)];
    for i in 0..3 {
        let mut u = u0;
        u[i] *= 1.05;
        if u[i] == u0[i] {
            u[i] = 2.5e-4;
        }
        // Step inward if the vertex would leave the box.
        if !bounds.contains(&[u[0] * scale[0], u[1] * scale[1], u[2] * scale[2]]) {
            u[i] = u0[i] - (u[i] - u0[i]);
        }
        pts.push(eval(&u));
    }

    let mut iterations = 0;
    let mut collapsed = false;
    while iterations < MAX_ITER {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = (1..4)
            .map(|i| (0..3).map(|k| (pts[i].0[k] - pts[0].0[k]).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let size = (0..3).map(|k| pts[0].0[k].powi(2)).sum::<f64>().sqrt().max(1.0);
        if diameter < DIAMETER_TOL * size {
            collapsed = true;
            break;
        }
        iterations += 1;

        let mut c = [0.0; 3];
        for p in &pts[..3] {
            for (ck, pk) in c.iter_mut().zip(p.0) {
                *ck += pk / 3.0;
            }
        }
        let along = |t: f64| {
            let w = pts[3].0;
            [c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1]), c[2] + t * (w[2] - c[2])]
        };
        let r = eval(&along(-1.0));
        if r.1 < pts[0].1 {
            let e = eval(&along(-2.0));
            pts[3] = if e.1 < r.1 { e } else { r };
        } else if r.1 < pts[2].1 {
            pts[3] = r;
        } else {
            let k = if r.1 < pts[3].1 {
                eval(&along(-0.5))
            } else {
                eval(&along(0.5))
            };
            if k.1 < pts[3].1.min(r.1) {
                pts[3] = k;
            } else {
                let b = pts[0].0;
                for p in pts.iter_mut().skip(1) {
                    let u = [(p.0[0] + b[0]) / 2.0, (p.0[1] + b[1]) / 2.0, (p.0[2] + b[2]) / 2.0];
                    *p = eval(&u);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    Simplex {
        best: to_x(&pts[0].0),
        value: pts[0].1,
        iterations,
        collapsed,
    }
}

/// Minimises the squared force residual over `(T_sw, w, plateau)`.
///
/// The first pass starts at `init`; each restart starts from the best point so
/// far shifted by a fixed relative offset. `E_glassy`, `R_f` and `R_r` stay at
/// their initial values.
pub fn fit_material(samples: &[ForceSample], init: &MaterialParams, test: &ForceTest, bounds: &FitBounds) -> Result<FitResult> {
    if samples.len() < 4 {
        return Err(Error::config("samples", "at least four samples are required"));
    }
    if let Some(s) = samples.iter().find(|s| s.t_c < test.t_fix) {
        return Err(Error::Domain {
            t: s.t_c,
            t_fix: test.t_fix,
        });
    }
    init.validate()?;
    let x0 = [init.t_sw_c, init.w_c, test.plateau(init)];
    if !bounds.contains(&x0) {
        return Err(Error::config("bounds", "initial parameters lie outside the fit bounds"));
    }
    let f = |x: &[f64; 3]| rss_at(init, test, samples, x);
    let rss_init = f(&x0);
    let scale = x0.map(|v| if v.abs() > 0.0 { v.abs() } else { 1.0 });

    let mut best: Option<(Simplex, usize)> = None;
    let mut total = 0;
    for run in 0..=RESTARTS.len() {
        let start = match (&best, run) {
            (None, _) | (_, 0) => x0,
            (Some((b, _)), k) => b.best.map(|v| v * (1.0 + RESTARTS[k - 1])),
        };
        let s = nelder_mead(&f, start, scale, bounds);
        total += s.iterations;
        let better = match &best {
            None => true,
            Some((b, _)) => s.value < b.value,
        };
        if better {
            best = Some((s, run));
        }
    }
    let (best, restart) = best.expect("at least one run");
    if !best.value.is_finite() || best.value > rss_init {
        return Err(Error::NoProgress);
    }

    let params = with_coords(init, test, &best.best);
    let converged = best.collapsed && identifiable(init, test, samples, &best.best);
    Ok(FitResult {
        plateau_n: best.best[2],
        params,
        rss: best.value,
        rss_init,
        iterations: total,
        converged,
        restart,
    })
}

/// True when the curve responds to both switching parameters, relative to its
/// response to the plateau scale.
fn identifiable(init: &MaterialParams, test: &ForceTest, samples: &[ForceSample], x: &[f64; 3]) -> bool {
    let model = |x: &[f64; 3]| -> Vec<f64> {
        let p = with_coords(init, test, x);
        let st = test.state(&p);
        samples
            .iter()
            .map(|s| blocked_recovery_force(s.t_c, &st, &p, test.area_mm2).unwrap_or(f64::NAN))
            .collect()
    };
    let column = |k: usize| {
        let h = 1e-6 * x[k].abs().max(1e-3);
        let (mut a, mut b) = (*x, *x);
        a[k] += h;
        b[k] -= h;
        let (fa, fb) = (model(&a), model(&b));
        // Sensitivity to a relative change of the parameter.
        fa.iter().zip(&fb).map(|(p, m)| ((p - m) / (2.0 * h) * x[k]).powi(2)).sum::<f64>().sqrt()
    };
    let plateau = column(2);
    plateau > 0.0 && column(0) > 1e-6 * plateau && column(1) > 1e-6 * plateau
}

/// Behavioral anchors for [`tune_gains`]. Temperatures in °C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorTargets {
    pub l20_onset_c: f64,
    pub l20_closure_c: f64,
    pub sme25_snap_c: f64,
    pub bidir_reopening_c: f64,
    pub l20_snaps: bool,
    pub sme25_snaps: bool,
}

impl Default for BehaviorTargets {
    fn default() -> Self {
        Self {
            l20_onset_c: 30.0,
            l20_closure_c: 40.0,
            sme25_snap_c: 45.0,
            bidir_reopening_c: 55.0,
            l20_snaps: false,
            sme25_snaps: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub c_geom: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedGains {
    pub beta: f64,
    pub gamma: f64,
    pub c_geom: f64,
    pub score: f64,
}

/// Penalty added when a targeted event never happens.
const MISSING: f64 = 25.0;

fn miss(measured: Option<f64>, target: f64) -> f64 {
    measured.map_or(MISSING, |m| (m - target).abs())
}

/// Score of one gain triple, or `None` when a hard snap constraint fails.
fn score_point(base: &RunConfig, targets: &BehaviorTargets, beta: f64, gamma: f64, c_geom: f64) -> Result<Option<f64>> {
    let mut cfg = base.clone();
    cfg.gains.beta = beta;
    cfg.gains.c_geom = c_geom;
    cfg.demonstrator.strand.gamma = gamma;
    cfg.demonstrator.length_mm = 60.0;
    cfg.demonstrator.thickness_mm = 2.0;

    let run = |lobe: &str, layout: LayoutChoice| -> Result<_> {
        let mut c = cfg.clone();
        c.demonstrator.lobe_material = lobe.to_string();
        c.demonstrator.layout = layout;
        let asm = c.assembly()?;
        let trace = run_ramp(&asm, &c.protocol, &c.solver)?;
        Ok(detect_events(&trace, asm.x_open))
    };

    let l20 = run("L20", LayoutChoice::None)?;
    let l20_snapped = l20.snaps.iter().any(|&(_, e)| e == Event::SnapClose);
    if l20_snapped != targets.l20_snaps || l20.closure_temp.is_none() {
        return Ok(None);
    }
    let sme = run("SME25", LayoutChoice::None)?;
    let sme_snap = sme.snaps.iter().find(|&&(_, e)| e == Event::SnapClose).map(|&(t, _)| t);
    if sme_snap.is_some() != targets.sme25_snaps {
        return Ok(None);
    }
    let bidir = run("L20", LayoutChoice::Diamond)?;

    let mut score = miss(l20.onset_temp, targets.l20_onset_c) + miss(l20.closure_temp, targets.l20_closure_c);
    if targets.sme25_snaps {
        score += miss(sme_snap, targets.sme25_snap_c);
    }
    score += miss(bidir.reopening_temp, targets.bidir_reopening_c);
    Ok(Some(score))
}

/// Grid search over `(beta, gamma, c_geom)`, followed by `refine` rounds on a
/// 3×3×3 grid of half the previous spacing around the incumbent. Ties keep the
/// first point in lexicographic grid order.
pub fn tune_gains(targets: &BehaviorTargets, grid: &GainGrid, base: &RunConfig, refine: usize) -> Result<TunedGains> {
    if grid.beta.is_empty() || grid.gamma.is_empty() || grid.c_geom.is_empty() {
        return Err(Error::config("grid", "every gain axis needs at least one value"));
    }
    let search = |g: &GainGrid| -> Result<Option<TunedGains>> {
        let mut best: Option<TunedGains> = None;
        for &beta in &g.beta {
            for &gamma in &g.gamma {
                for &c_geom in &g.c_geom {
                    if let Some(score) = score_point(base, targets, beta, gamma, c_geom)? {
                        if best.is_none_or(|b| score < b.score) {
                            best = Some(TunedGains {
                                beta,
                                gamma,
                                c_geom,
                                score,
                            });
                        }
                    }
                }
            }
        }
        Ok(best)
    };

    let mut best = search(grid)?.ok_or_else(|| Error::Infeasible("snap flags cannot be met on this grid".into()))?;
    let spacing = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
    };
    let mut h = [spacing(&grid.beta), spacing(&grid.gamma), spacing(&grid.c_geom)];
    for _ in 0..refine {
        h = h.map(|d| d / 2.0);
        let axis = |c: f64, d: f64| {
            if d.is_finite() {
                vec![c, c - d, c + d].into_iter().filter(|v| *v > 0.0).collect()
            } else {
                vec![c]
            }
        };
        let g = GainGrid {
            beta: axis(best.beta, h[0]),
            gamma: axis(best.gamma, h[1]),
            c_geom: axis(best.c_geom, h[2]),
        };
        if let Some(b) = search(&g)? {
            if b.score < best.score {
                best = b;
            }
        }
    }
    Ok(best)
}
