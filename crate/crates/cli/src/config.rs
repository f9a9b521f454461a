//! JSON run configuration: schema-validated before any computation,
//! unknown keys rejected. All user-facing units are SI (plus nm for
//! wavelengths and um for the core radius); conversion to the internal
//! geometric units happens exactly once, here.

use gbfiber_core::fiber_modes::{FiberSpec, ModeFamily};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub fiber: FiberConfig,
    #[serde(default)]
    pub mode_diagram: Option<ModeDiagramConfig>,
    #[serde(default)]
    pub solve: Option<SolveConfig>,
    #[serde(default)]
    pub interfere: Option<InterfereConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

/// Fiber geometry; defaults to the reference single-mode fiber
/// (n1 = 1.4712, n2 = 1.4659, rho = 4.1 um).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    #[serde(default = "default_n_core")]
    pub n_core: f64,
    #[serde(default = "default_n_clad")]
    pub n_clad: f64,
    #[serde(default = "default_core_radius")]
    pub core_radius_um: f64,
}

fn default_n_core() -> f64 {
    1.4712
}
fn default_n_clad() -> f64 {
    1.4659
}
fn default_core_radius() -> f64 {
    4.1
}

impl Default for FiberConfig {
    fn default() -> Self {
        Self {
            n_core: default_n_core(),
            n_clad: default_n_clad(),
            core_radius_um: default_core_radius(),
        }
    }
}

impl FiberConfig {
    pub fn to_spec(&self) -> Result<FiberSpec, String> {
        FiberSpec::new(self.n_core, self.n_clad, self.core_radius_um)
            .map_err(|e| format!("invalid fiber parameters: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Physical,
    Gauge,
    Ghost,
}

impl FamilyName {
    pub fn to_family(self) -> ModeFamily {
        match self {
            FamilyName::Physical => ModeFamily::Physical,
            FamilyName::Gauge => ModeFamily::Gauge,
            FamilyName::Ghost => ModeFamily::Ghost,
        }
    }

    pub fn all() -> Vec<FamilyName> {
        vec![FamilyName::Physical, FamilyName::Gauge, FamilyName::Ghost]
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDiagramConfig {
    pub v_min: f64,
    pub v_max: f64,
    pub v_samples: usize,
    #[serde(default = "default_m_max")]
    pub m_max: i32,
    /// Empty or absent means all three families.
    #[serde(default)]
    pub families: Vec<FamilyName>,
}

fn default_m_max() -> i32 {
    3
}

impl ModeDiagramConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.v_min > 0.1 && self.v_max <= 12.0 && self.v_min < self.v_max) {
            return Err(format!(
                "V range ({}, {}) must lie within (0.1, 12]",
                self.v_min, self.v_max
            ));
        }
        if self.v_samples < 2 {
            return Err("v_samples must be at least 2".into());
        }
        if !(0..=10).contains(&self.m_max) {
            return Err(format!("m_max {} outside supported range 0..=10", self.m_max));
        }
        Ok(())
    }

    pub fn families(&self) -> Vec<FamilyName> {
        if self.families.is_empty() {
            FamilyName::all()
        } else {
            self.families.clone()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub wavelength_nm: f64,
    #[serde(default = "default_m_values")]
    pub m_values: Vec<i32>,
    #[serde(default)]
    pub families: Vec<FamilyName>,
}

fn default_m_values() -> Vec<i32> {
    vec![0, 1, 2, 3]
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.wavelength_nm > 0.0) {
            return Err("wavelength_nm must be positive".into());
        }
        if self.m_values.iter().any(|m| m.abs() > 10) {
            return Err("m_values outside supported range |m| <= 10".into());
        }
        Ok(())
    }

    pub fn families(&self) -> Vec<FamilyName> {
        if self.families.is_empty() {
            FamilyName::all()
        } else {
            self.families.clone()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "layout")]
pub enum InterfereConfig {
    MachZehnder(MachZehnderConfig),
    TimeBin(TimeBinConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachZehnderConfig {
    pub wavelength_nm: f64,
    pub g_m_per_s2: f64,
    pub arm_length_m: f64,
    pub height_separation_m: f64,
    /// Effective index; solved from the fiber's fundamental mode when
    /// absent.
    #[serde(default)]
    pub n_eff: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBinConfig {
    pub wavelength_nm: f64,
    pub delay_lower_m: f64,
    pub delay_upper_m: f64,
    /// Potential difference phi' - phi'' between the two stages.
    pub potential_difference: f64,
    #[serde(default)]
    pub n_eff: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}
