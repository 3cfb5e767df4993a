//! Phenomenological one-way shape-memory model.
//!
//! A logistic frozen fraction `phi(T)` mixes the glassy and rubbery moduli
//! linearly and controls how much of the programmed strain is still locked in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    #[serde(skip)]
    pub name: String,
    pub e_glassy_mpa: f64,
    pub e_rubbery_mpa: f64,
    pub t_sw_c: f64,
    pub w_c: f64,
    pub r_f: f64,
    pub r_r: f64,
    pub eps_max: f64,
}

impl MaterialParams {
    /// Closing lobe material (acrylate network, lauryl acrylate 20 wt%).
    pub fn l20() -> Self {
        Self {
            name: "L20".into(),
            e_glassy_mpa: 29.5,
            e_rubbery_mpa: 3.0,
            t_sw_c: 38.1,
            w_c: 2.69,
            r_f: 0.97,
            r_r: 0.99,
            eps_max: 1.0,
        }
    }

    /// Shape memory elastomer used for the reopening strands.
    pub fn sme25() -> Self {
        Self {
            name: "SME25".into(),
            e_glassy_mpa: 6.43,
            e_rubbery_mpa: 5.0,
            t_sw_c: 49.05,
            w_c: 4.93,
            r_f: 0.97,
            r_r: 0.99,
            eps_max: 4.0,
        }
    }

    /// Higher-transition elastomer, kept for comparison only.
    pub fn sme40() -> Self {
        Self {
            name: "SME40".into(),
            t_sw_c: 52.0,
            ..Self::sme25()
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "L20" => Some(Self::l20()),
            "SME25" => Some(Self::sme25()),
            "SME40" => Some(Self::sme40()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidMaterial {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        let all_finite = [
            self.e_glassy_mpa,
            self.e_rubbery_mpa,
            self.t_sw_c,
            self.w_c,
            self.r_f,
            self.r_r,
            self.eps_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("all parameters must be finite");
        }
        if !(self.e_rubbery_mpa > 0.0) {
            return bad("e_rubbery_mpa must be positive");
        }
        if !(self.e_glassy_mpa > self.e_rubbery_mpa) {
            return bad("e_glassy_mpa must exceed e_rubbery_mpa");
        }
        if !(self.w_c > 0.0) {
            return bad("w_c must be positive");
        }
        if !(self.r_f > 0.0 && self.r_f <= 1.0) {
            return bad("r_f must lie in (0, 1]");
        }
        if !(self.r_r > 0.0 && self.r_r <= 1.0) {
            return bad("r_r must lie in (0, 1]");
        }
        if !(self.eps_max > 0.0) {
            return bad("eps_max must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CyclePhase {
    Deformation,
    CoolingFixing,
    Unloading,
    Recovery,
}

impl CyclePhase {
    /// The phase that follows this one, or `None` once recovery is reached.
    pub fn next(self) -> Option<Self> {
        match self {
            CyclePhase::Deformation => Some(CyclePhase::CoolingFixing),
            CyclePhase::CoolingFixing => Some(CyclePhase::Unloading),
            CyclePhase::Unloading => Some(CyclePhase::Recovery),
            CyclePhase::Recovery => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgrammedState {
    pub eps_prog: f64,
    pub t_fix: f64,
    pub phi_fix: f64,
    pub eps_retained_at_fix: f64,
}

pub fn frozen_fraction(t: f64, p: &MaterialParams) -> f64 {
    1.0 / (1.0 + ((t - p.t_sw_c) / p.w_c).exp())
}

pub fn modulus(t: f64, p: &MaterialParams) -> f64 {
    let e = p.e_rubbery_mpa + (p.e_glassy_mpa - p.e_rubbery_mpa) * frozen_fraction(t, p);
    // Rounding must not leave the [E_r, E_g] band.
    e.clamp(p.e_rubbery_mpa.min(p.e_glassy_mpa), p.e_glassy_mpa.max(p.e_rubbery_mpa))
}

/// Runs the deformation / cooling / unloading part of the cycle.
pub fn program(p: &MaterialParams, eps_applied: f64, t_hot: f64, t_fix: f64) -> Result<ProgrammedState> {
    if eps_applied.abs() > p.eps_max {
        return Err(Error::Overstrain {
            applied: eps_applied,
            max: p.eps_max,
        });
    }
    if !(t_hot > p.t_sw_c + p.w_c) {
        return Err(Error::Protocol(format!(
            "deformation temperature {t_hot} °C must exceed T_sw + w = {} °C",
            p.t_sw_c + p.w_c
        )));
    }
    if !(t_fix < p.t_sw_c - p.w_c) {
        return Err(Error::Protocol(format!(
            "fixing temperature {t_fix} °C must be below T_sw - w = {} °C",
            p.t_sw_c - p.w_c
        )));
    }
    Ok(ProgrammedState {
        eps_prog: eps_applied,
        t_fix,
        phi_fix: frozen_fraction(t_fix, p),
        eps_retained_at_fix: p.r_f * eps_applied,
    })
}

fn check_domain(t: f64, s: &ProgrammedState) -> Result<()> {
    if t < s.t_fix {
        return Err(Error::Domain { t, t_fix: s.t_fix });
    }
    Ok(())
}

pub fn retained_strain(t: f64, s: &ProgrammedState, p: &MaterialParams) -> Result<f64> {
    check_domain(t, s)?;
    let lo = (1.0 - p.r_r) * s.eps_prog;
    let hi = p.r_f * s.eps_prog;
    let ratio = frozen_fraction(t, p) / s.phi_fix;
    let eps = lo + (hi - lo) * ratio;
    let (min, max) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    Ok(eps.clamp(min, max))
}

/// Fraction of the recoverable strain released so far, in `[0, 1]`.
pub fn release_ratio(t: f64, s: &ProgrammedState, p: &MaterialParams) -> Result<f64> {
    let eps = retained_strain(t, s, p)?;
    let span = (p.r_f - (1.0 - p.r_r)) * s.eps_prog;
    if span == 0.0 {
        return Ok(0.0);
    }
    Ok(((p.r_f * s.eps_prog - eps) / span).clamp(0.0, 1.0))
}

/// Fixed-grip recovery force in N (MPa times mm²).
pub fn blocked_recovery_force(t: f64, s: &ProgrammedState, p: &MaterialParams, area_mm2: f64) -> Result<f64> {
    let eps = retained_strain(t, s, p)?;
    Ok(modulus(t, p) * area_mm2 * (p.r_f * s.eps_prog - eps))
}
