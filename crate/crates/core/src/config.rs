//! Run configuration: one TOML document with unit-suffixed keys.
//!
//! A document may name a `preset`; its own tables are merged key by key over
//! the expansion of that preset (`L20_mono` when none is named).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::mechanics::{build_assembly, AvfAssembly, DemonstratorConfig, Gains, LayoutChoice};
use crate::solver::{SolverSettings, ThermalProtocol};

pub const PRESETS: [&str; 5] = ["L20_mono", "SME25_mono", "bidir_single", "bidir_cross", "bidir_diamond"];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub materials: BTreeMap<String, MaterialParams>,
    pub demonstrator: DemonstratorConfig,
    pub gains: Gains,
    pub protocol: ThermalProtocol,
    pub solver: SolverSettings,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn builtin_materials() -> BTreeMap<String, MaterialParams> {
    [MaterialParams::l20(), MaterialParams::sme25(), MaterialParams::sme40()]
        .into_iter()
        .map(|m| (m.name.clone(), m))
        .collect()
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let mut demonstrator = DemonstratorConfig::default();
        match name {
            "L20_mono" => {}
            "SME25_mono" => demonstrator.lobe_material = "SME25".into(),
            "bidir_single" => demonstrator.layout = LayoutChoice::Single,
            "bidir_cross" => demonstrator.layout = LayoutChoice::Cross,
            "bidir_diamond" => demonstrator.layout = LayoutChoice::Diamond,
            _ => return Err(Error::UnknownPreset(name.to_string())),
        }
        Ok(Self {
            materials: builtin_materials(),
            demonstrator,
            gains: Gains::default(),
            protocol: ThermalProtocol::default(),
            solver: SolverSettings::default(),
            outputs: OutputConfig::default(),
        })
    }

    pub fn assembly(&self) -> Result<AvfAssembly> {
        build_assembly(&self.demonstrator, &self.materials, &self.gains)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in &self.materials {
            m.validate().map_err(|e| Error::config(format!("materials.{name}"), e.to_string()))?;
        }
        self.gains.validate()?;
        self.protocol.validate()?;
        self.solver.validate()?;
        if self.protocol.t_start_c < crate::mechanics::T_FIX {
            return Err(Error::config(
                "protocol.t_start_c",
                format!("must not be below the fixing temperature {} °C", crate::mechanics::T_FIX),
            ));
        }
        self.assembly().map(|_| ())
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let msg = e.message().to_string();
        Error::parse("<document>", msg)
    })?;
    let preset = match doc.remove("preset") {
        None => "L20_mono".to_string(),
        Some(toml::Value::String(s)) => s,
        Some(_) => return Err(Error::parse("preset", "expected a string")),
    };
    let base = RunConfig::preset(&preset)?;
    let mut table = toml::Table::try_from(&base).map_err(|e| Error::parse("<preset>", e.to_string()))?;
    merge(&mut table, doc);

    let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })?;
    let cfg = name_materials(cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn name_materials(mut cfg: RunConfig) -> RunConfig {
    for (name, m) in cfg.materials.iter_mut() {
        m.name = name.clone();
    }
    cfg
}

pub fn serialize_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::parse("<config>", e.to_string()))
}
