//! Reduced-order structural model: one curvature coordinate per lobe.
//!
//! `q = -1` is the programmed (open, inverted) shape and `q = +1` the permanent
//! closed shape. Each lobe carries a quartic barrier from its rubbery network,
//! a constant closing tilt, and a glassy anchor that drags the lobe toward its
//! natural curvature as the programmed strain is released. The midrib adds a
//! weak spring toward the open shape. Strands are stretched by closing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{modulus, program, release_ratio, retained_strain, MaterialParams, ProgrammedState};
use crate::solver::Energy1D;

/// Geometric and coupling gains shared by all lobes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Gains {
    /// Prefactor of the barrier scale, mJ per (MPa mm⁴) after dividing by `l_norm_mm⁴`.
    pub c_geom: f64,
    pub l_norm_mm: f64,
    /// Anchor stiffness of the glassy network relative to the barrier scale.
    pub beta: f64,
    /// Closing bias of the permanent network relative to the rubbery barrier.
    pub tilt: f64,
    /// Midrib spring toward the open shape, mJ.
    pub restraint_mj: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            c_geom: 10.0 * 40f64.powi(4) / (MaterialParams::l20().e_glassy_mpa * 60.0 * 8.0),
            l_norm_mm: 40.0,
            beta: 0.712,
            tilt: 1.505,
            restraint_mj: 0.258,
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        let check = |v: f64, key: &str, allow_zero: bool| {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("gains.{key}"), "must be positive"))
            }
        };
        check(self.c_geom, "c_geom", false)?;
        check(self.l_norm_mm, "l_norm_mm", false)?;
        check(self.beta, "beta", false)?;
        check(self.tilt, "tilt", true)?;
        check(self.restraint_mj, "restraint_mj", true)
    }
}

/// Fixing temperature of every programmed part, °C.
pub const T_FIX: f64 = 20.0;

fn programming_temperature(p: &MaterialParams) -> f64 {
    p.t_sw_c + 10.0 * p.w_c
}

#[derive(Debug, Clone, PartialEq)]
pub struct LobeSpec {
    pub a_mm: f64,
    pub b_mm: f64,
    pub r1_mm: f64,
    pub r2_mm: f64,
    pub material: MaterialParams,
    pub programmed: ProgrammedState,
}

impl LobeSpec {
    /// Programs the curvature inversion; the surface strain of the inversion is `b / R1`.
    pub fn new(a_mm: f64, b_mm: f64, r1_mm: f64, r2_mm: f64, material: MaterialParams) -> Result<Self> {
        for (v, key) in [
            (a_mm, "demonstrator.length_mm"),
            (b_mm, "demonstrator.thickness_mm"),
            (r1_mm, "demonstrator.r1_mm"),
            (r2_mm, "demonstrator.r2_mm"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        material.validate()?;
        let programmed = program(&material, b_mm / r1_mm, programming_temperature(&material), T_FIX)?;
        Ok(Self {
            a_mm,
            b_mm,
            r1_mm,
            r2_mm,
            material,
            programmed,
        })
    }

    pub fn gaussian_curvature(&self) -> f64 {
        1.0 / (self.r1_mm * self.r2_mm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrandSpec {
    pub l0_mm: f64,
    pub area_mm2: f64,
    pub material: MaterialParams,
    pub programmed: ProgrammedState,
    /// Relative stretch per unit closing at unit lever.
    pub gamma: f64,
    /// Share of the lobe motion transmitted to this strand.
    pub lever: f64,
    pub count_weight: f64,
}

impl StrandSpec {
    pub fn new(l0_mm: f64, area_mm2: f64, prestrain: f64, gamma: f64, material: MaterialParams) -> Result<Self> {
        if !(l0_mm > 0.0 && l0_mm.is_finite()) {
            return Err(Error::config("demonstrator.strand.length_mm", "must be positive"));
        }
        if !(area_mm2 > 0.0 && area_mm2.is_finite()) {
            return Err(Error::config("demonstrator.strand.area_mm2", "must be positive"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::config("demonstrator.strand.gamma", "must be non-negative"));
        }
        material.validate()?;
        let programmed = program(&material, prestrain, programming_temperature(&material), T_FIX)?;
        Ok(Self {
            l0_mm,
            area_mm2,
            material,
            programmed,
            gamma,
            lever: 1.0,
            count_weight: 1.0,
        })
    }

    fn term(&self, t: f64) -> StrandTerm {
        let p = &self.material;
        let eps_ret = retained_strain(t.max(self.programmed.t_fix), &self.programmed, p)
            .expect("temperature clamped to the fixing temperature");
        StrandTerm {
            stiffness: self.count_weight * modulus(t, p) * self.area_mm2 * self.l0_mm,
            programmed: 1.0 + p.r_f * self.programmed.eps_prog,
            natural: 1.0 + eps_ret,
            stretch: self.gamma * self.lever,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Single,
    Cross,
    Diamond,
}

/// Width-to-height ratio of the diamond layout.
pub const DIAMOND_ASPECT: f64 = 0.5;
/// Tuned lever factors, see [`LayoutKind::levers`].
pub const CROSS_LEVER: f64 = 0.589;
pub const DIAMOND_LEVER: f64 = 0.3212;

impl LayoutKind {
    pub fn count(self) -> usize {
        match self {
            LayoutKind::Single => 1,
            LayoutKind::Cross => 2,
            LayoutKind::Diamond => 4,
        }
    }

    /// Lever factor of each strand: the fraction of lobe closing that stretches it.
    ///
    /// The single strand spans the full opening. Crossed strands are anchored
    /// closer to the hinge; the diamond's four short edges (1:2 aspect) pick up
    /// the least stretch each but act together.
    pub fn levers(self) -> Vec<f64> {
        match self {
            LayoutKind::Single => vec![1.0],
            LayoutKind::Cross => vec![CROSS_LEVER; 2],
            LayoutKind::Diamond => vec![DIAMOND_LEVER; 4],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Single => "single",
            LayoutKind::Cross => "cross",
            LayoutKind::Diamond => "diamond",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrandLayout {
    pub kind: LayoutKind,
    pub strands: Vec<StrandSpec>,
}

impl StrandLayout {
    pub fn new(kind: LayoutKind, template: &StrandSpec) -> Self {
        let strands = kind
            .levers()
            .into_iter()
            .map(|lever| StrandSpec {
                lever,
                ..template.clone()
            })
            .collect();
        Self { kind, strands }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BistableLobeElement {
    pub spec: LobeSpec,
    pub k_ref: f64,
    pub beta: f64,
    pub tilt: f64,
    pub restraint: f64,
}

impl BistableLobeElement {
    pub fn new(spec: LobeSpec, gains: &Gains) -> Self {
        let k_ref = gains.c_geom * spec.material.e_glassy_mpa * spec.a_mm * spec.b_mm.powi(3) / gains.l_norm_mm.powi(4);
        Self {
            spec,
            k_ref,
            beta: gains.beta,
            tilt: gains.tilt,
            restraint: gains.restraint_mj,
        }
    }

    /// Energy landscape in `q` at temperature `t`, including the strands acting on this lobe.
    pub fn landscape(&self, t: f64, layout: Option<&StrandLayout>) -> LobeLandscape {
        let p = &self.spec.material;
        // Nothing has been released below the fixing temperature.
        let rho = release_ratio(t.max(self.spec.programmed.t_fix), &self.spec.programmed, p)
            .expect("temperature clamped to the fixing temperature");
        LobeLandscape {
            barrier: self.k_ref * p.e_rubbery_mpa / p.e_glassy_mpa,
            tilt: self.tilt,
            anchor: self.beta * self.k_ref * modulus(t, p) / p.e_glassy_mpa,
            q_natural: -1.0 + 2.0 * rho,
            restraint: self.restraint,
            strands: layout
                .map(|l| l.strands.iter().map(|s| s.term(t)).collect())
                .unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrandTerm {
    /// `count_weight · E · A · L0`, mJ.
    pub stiffness: f64,
    /// Programmed length over `L0`.
    pub programmed: f64,
    /// Natural length over `L0`.
    pub natural: f64,
    pub stretch: f64,
}

impl StrandTerm {
    fn strain(&self, q: f64) -> f64 {
        self.programmed * (1.0 + self.stretch * (q + 1.0) / 2.0) / self.natural - 1.0
    }

    fn dstrain(&self) -> f64 {
        self.programmed * self.stretch / (2.0 * self.natural)
    }

    pub fn energy(&self, q: f64) -> f64 {
        let e = self.strain(q);
        0.5 * self.stiffness * e * e
    }
}

/// Per-lobe energy at a fixed temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct LobeLandscape {
    pub barrier: f64,
    pub tilt: f64,
    pub anchor: f64,
    pub q_natural: f64,
    pub restraint: f64,
    pub strands: Vec<StrandTerm>,
}

impl LobeLandscape {
    /// Lobe part only, without strands.
    pub fn lobe_energy(&self, q: f64) -> f64 {
        let s = q * q - 1.0;
        let dn = q - self.q_natural;
        let dr = q + 1.0;
        self.barrier * (s * s - self.tilt * q) + 0.5 * self.anchor * dn * dn + 0.5 * self.restraint * dr * dr
    }
}

impl Energy1D for LobeLandscape {
    fn energy(&self, q: f64) -> f64 {
        self.lobe_energy(q) + self.strands.iter().map(|s| s.energy(q)).sum::<f64>()
    }

    fn gradient(&self, q: f64) -> f64 {
        let mut g = self.barrier * (4.0 * q * (q * q - 1.0) - self.tilt)
            + self.anchor * (q - self.q_natural)
            + self.restraint * (q + 1.0);
        for s in &self.strands {
            g += s.stiffness * s.strain(q) * s.dstrain();
        }
        g
    }

    fn curvature(&self, q: f64) -> f64 {
        let mut h = self.barrier * (12.0 * q * q - 4.0) + self.anchor + self.restraint;
        for s in &self.strands {
            let d = s.dstrain();
            h += s.stiffness * d * d;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvfAssembly {
    pub left: BistableLobeElement,
    pub right: BistableLobeElement,
    pub layout: Option<StrandLayout>,
    pub x_open: f64,
    pub midrib: bool,
}

impl AvfAssembly {
    pub fn new(lobe: LobeSpec, gains: &Gains, layout: Option<StrandLayout>) -> Result<Self> {
        gains.validate()?;
        let x_open = lobe.a_mm * lobe.a_mm / (8.0 * lobe.r1_mm);
        let left = BistableLobeElement::new(lobe, gains);
        Ok(Self {
            right: left.clone(),
            left,
            layout,
            x_open,
            midrib: true,
        })
    }

    pub fn strand_count(&self) -> usize {
        self.layout.as_ref().map_or(0, |l| l.strands.len())
    }
}

/// Strand parameters as written in the config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrandConfig {
    pub material: String,
    pub length_mm: f64,
    pub area_mm2: f64,
    pub prestrain: f64,
    pub gamma: f64,
}

impl Default for StrandConfig {
    fn default() -> Self {
        Self {
            material: "SME25".into(),
            length_mm: 34.17,
            area_mm2: 0.36,
            prestrain: 0.40,
            gamma: 0.1326,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutChoice {
    None,
    Single,
    Cross,
    Diamond,
}

impl LayoutChoice {
    pub fn kind(self) -> Option<LayoutKind> {
        match self {
            LayoutChoice::None => None,
            LayoutChoice::Single => Some(LayoutKind::Single),
            LayoutChoice::Cross => Some(LayoutKind::Cross),
            LayoutChoice::Diamond => Some(LayoutKind::Diamond),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemonstratorConfig {
    pub lobe_material: String,
    pub length_mm: f64,
    pub thickness_mm: f64,
    pub r1_mm: f64,
    pub r2_mm: f64,
    pub layout: LayoutChoice,
    pub strand: StrandConfig,
}

impl Default for DemonstratorConfig {
    fn default() -> Self {
        Self {
            lobe_material: "L20".into(),
            length_mm: 60.0,
            thickness_mm: 2.0,
            r1_mm: 40.0,
            r2_mm: 110.0,
            layout: LayoutChoice::None,
            strand: StrandConfig::default(),
        }
    }
}

fn lookup(materials: &BTreeMap<String, MaterialParams>, name: &str, key: &str) -> Result<MaterialParams> {
    materials
        .get(name)
        .cloned()
        .ok_or_else(|| Error::config(key, format!("unknown material `{name}`")))
}

pub fn build_assembly(
    cfg: &DemonstratorConfig,
    materials: &BTreeMap<String, MaterialParams>,
    gains: &Gains,
) -> Result<AvfAssembly> {
    let lobe_mat = lookup(materials, &cfg.lobe_material, "demonstrator.lobe_material")?;
    let lobe = LobeSpec::new(cfg.length_mm, cfg.thickness_mm, cfg.r1_mm, cfg.r2_mm, lobe_mat)?;
    let layout = match cfg.layout.kind() {
        None => None,
        Some(kind) => {
            let s = &cfg.strand;
            let mat = lookup(materials, &s.material, "demonstrator.strand.material")?;
            let template = StrandSpec::new(s.length_mm, s.area_mm2, s.prestrain, s.gamma, mat)?;
            Some(StrandLayout::new(kind, &template))
        }
    };
    AvfAssembly::new(lobe, gains, layout)
}

pub fn lobe_energy(q: f64, t: f64, lobe: &BistableLobeElement) -> f64 {
    lobe.landscape(t, None).lobe_energy(q)
}

/// Energy stored in one strand acting on a lobe at coordinate `q`.
pub fn strand_energy(q: f64, t: f64, strand: &StrandSpec) -> f64 {
    strand.term(t).energy(q)
}

pub fn tip_displacement(q: f64, asm: &AvfAssembly) -> f64 {
    asm.x_open * (1.0 - q) / 2.0
}

pub fn total_energy(q_left: f64, q_right: f64, t: f64, asm: &AvfAssembly) -> f64 {
    let layout = asm.layout.as_ref();
    asm.left.landscape(t, layout).energy(q_left) + asm.right.landscape(t, layout).energy(q_right)
}
