//! Serializable output records. JSON output round-trips through these
//! types; CSV rendering pins floats at 17 significant digits so identical
//! configurations produce byte-identical files.

use serde::{Deserialize, Serialize};

/// 17-significant-digit rendering used by every CSV cell.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiagramRow {
    pub family: String,
    pub m: i32,
    pub kappa: u32,
    pub v: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeRecord {
    pub family: String,
    pub m: i32,
    pub kappa: u32,
    pub wavelength_nm: f64,
    pub omega_rad_per_um: f64,
    pub beta_rad_per_um: f64,
    pub v: f64,
    pub b: f64,
    pub u: f64,
    pub w: f64,
    /// Klein-Gordon normalization factor N (physical) or N' (gauge/ghost).
    pub norm_factor: f64,
    /// The normalization integral behind the factor: I1 or I2.
    pub normalization_integral: f64,
    /// max |chi| / max |a| over the sampling grid.
    pub chi_residual: f64,
    /// chi / a_t as [re, im]; the gauge-violation ratio of ghost modes
    /// (2 beta^2 / omega on the imaginary axis), null for other families.
    pub chi_to_a_t_ratio: Option<[f64; 2]>,
    /// Reduced coefficient matrix against the normalized radial profiles;
    /// rows core/cladding, columns (t, par, +, -), entries [re, im].
    pub q: [[[f64; 2]; 4]; 2],
    /// Momentum coefficient matrix, same layout.
    pub p: [[[f64; 2]; 4]; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MachZehnderResult {
    pub layout: String,
    pub n_eff: f64,
    pub phase_shift_rad: f64,
    pub single_photon_p1: f64,
    pub two_photon_p2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeBinResult {
    pub layout: String,
    pub n_eff: f64,
    pub beta_lower_rad_per_um: f64,
    pub beta_upper_rad_per_um: f64,
    pub interference_phase_rad: f64,
    pub p_a: f64,
    pub p_b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InterfereResult {
    MachZehnder(MachZehnderResult),
    TimeBin(TimeBinResult),
}
