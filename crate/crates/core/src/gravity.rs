//! Weak-field gravity on fiber modes: PPN-to-Newtonian metric reduction,
//! the uniform-potential index substitution with renormalization, Killing
//! remapping of propagation constants, wave-function redshift, and the
//! gravitational phase-shift formula.
//!
//! Everything is expressed in geometric units: gravitational acceleration
//! is stored pre-divided by c^2 (units 1/um), potentials are dimensionless.

use crate::error::{Error, Result};
use crate::fiber_modes::{FiberSpec, ModeSolution};
use crate::klein_gordon::{reduced_kg_product, ModeField};
use num_complex::Complex64;

/// Speed of light, exact by SI definition.
pub const C_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Convert an acceleration in m/s^2 to geometric units of 1/um.
pub fn acceleration_si_to_geometric(g_m_per_s2: f64) -> f64 {
    g_m_per_s2 / (C_LIGHT_M_PER_S * C_LIGHT_M_PER_S) * 1e-6
}

/// Convert a vacuum wavelength in nm to an angular frequency in rad/um.
pub fn wavelength_nm_to_omega(lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI / (lambda_nm * 1e-3)
}

/// Linear gravitational potential phi = phi0 + g z along the vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialContext {
    /// Potential offset at z = 0 (dimensionless).
    pub phi0: f64,
    /// Gravitational acceleration over c^2, in 1/um.
    pub g_acc: f64,
}

impl PotentialContext {
    /// Weak-field guards: |phi0| < 1e-3, and g rho < 1e-6 for any
    /// micrometre-scale core radius (Earth surface values sit twelve
    /// orders of magnitude below both limits).
    pub fn new(phi0: f64, g_acc: f64) -> Result<Self> {
        if !(phi0.abs() < 1e-3) {
            return Err(Error::Domain(format!(
                "potential {phi0} outside the weak-field regime |phi| < 1e-3"
            )));
        }
        if !(g_acc.abs() < 1e-7) {
            return Err(Error::Domain(format!(
                "acceleration {g_acc} /um outside the weak-field regime"
            )));
        }
        Ok(Self { phi0, g_acc })
    }

    pub fn potential_at(&self, z: f64) -> f64 {
        self.phi0 + self.g_acc * z
    }
}

/// Linearized parametrized-post-Newtonian metric data.
///
/// alpha_lpi scales the time-time potential, gamma the spatial one;
/// general relativity has both equal to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpnMetric {
    pub alpha_lpi: f64,
    pub gamma: f64,
    pub potential: PotentialContext,
}

impl PpnMetric {
    pub fn general_relativity(potential: PotentialContext) -> Self {
        Self {
            alpha_lpi: 1.0,
            gamma: 1.0,
            potential,
        }
    }
}

/// Outcome of reducing the PPN spatial metric to Euclidean form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpnReduction {
    /// max_ij |g''_ij - delta_ij| after the coordinate change and rescale.
    pub residual: f64,
    /// Quadratic error budget 10 (gamma^2 |phi0 phi| + gamma^2 g^2 |x|^2).
    pub bound: f64,
}

/// Generator of the flattening coordinate change,
/// xi = (x z, y z, (z^2 - x^2 - y^2)/2).
pub fn xi_field(x: [f64; 3]) -> [f64; 3] {
    let [a, b, c] = x;
    [a * c, b * c, 0.5 * (c * c - a * a - b * b)]
}

/// Jacobian d xi^k / d x^i, laid out as grad[k][i].
pub fn xi_jacobian(x: [f64; 3]) -> [[f64; 3]; 3] {
    let [a, b, c] = x;
    [[c, 0.0, a], [0.0, c, b], [-a, -b, c]]
}

/// Apply x = x' + gamma g xi(x') followed by the sqrt(1 - 2 gamma phi0)
/// rescale, and report how far the transformed spatial metric sits from
/// delta_ij.
///
/// The deviation is assembled from its explicitly quadratic terms, so
/// residuals far below one ulp of 1.0 are still meaningful.
pub fn ppn_reduce(metric: &PpnMetric, point: [f64; 3]) -> Result<PpnReduction> {
    let gamma = metric.gamma;
    let g = metric.potential.g_acc;
    let phi0 = metric.potential.phi0;
    let norm_x = (point[0] * point[0] + point[1] * point[1] + point[2] * point[2]).sqrt();
    if !((gamma * g).abs() * norm_x < 1e-3) {
        return Err(Error::Domain(format!(
            "point at |x'| = {norm_x} um outside the linearization box"
        )));
    }
    let xi = xi_field(point);
    let grad = xi_jacobian(point);
    let z_new = point[2] + gamma * g * xi[2];
    let phi = phi0 + g * z_new;

    // g''_ij - delta_ij = numerator_ij / (1 - 2 gamma phi0), where
    // numerator = -2 gamma^2 g^2 xi_z delta - 4 gamma^2 g phi z' delta
    //             + (1 - 2 gamma phi) gamma^2 g^2 Q,
    // with Q_ij = sum_k d_i xi^k d_j xi^k. Every term carries gamma^2.
    let g2 = gamma * gamma;
    let mut residual = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let mut q = 0.0;
            for row in &grad {
                q += row[i] * row[j];
            }
            let delta = if i == j { 1.0 } else { 0.0 };
            let numerator = -2.0 * g2 * g * g * xi[2] * delta
                - 4.0 * g2 * g * phi * point[2] * delta
                + (1.0 - 2.0 * gamma * phi) * g2 * g * g * q;
            residual = residual.max((numerator / (1.0 - 2.0 * gamma * phi0)).abs());
        }
    }
    let bound = 10.0 * (g2 * (phi0 * phi).abs() + g2 * g * g * norm_x * norm_x);
    Ok(PpnReduction { residual, bound })
}

/// Transplant a flat-space mode to a uniform potential phi: the indices
/// rescale as n -> (1 - phi) n, the mode is re-solved at the same
/// coordinate frequency and (family, m, kappa), and the normalization
/// factor picks up the (1 + phi) canonical-momentum measure factor.
pub fn apply_uniform_potential(mode: &ModeSolution, phi: f64) -> Result<ModeSolution> {
    if !(phi.abs() < 1e-3) {
        return Err(Error::Domain(format!(
            "potential {phi} outside the weak-field regime"
        )));
    }
    let spec = &mode.spec;
    let scaled = FiberSpec::new(
        (1.0 - phi) * spec.n_core,
        (1.0 - phi) * spec.n_clad,
        spec.core_radius,
    )?;
    let roots = crate::fiber_modes::solve_modes(
        &scaled,
        mode.point.omega,
        mode.key.m,
        mode.key.family,
    )?;
    let root = roots
        .get(mode.key.kappa as usize - 1)
        .copied()
        .ok_or_else(|| {
            Error::Domain(format!(
                "mode kappa={} no longer guided after the index rescale",
                mode.key.kappa
            ))
        })?;
    let mut new_mode = ModeSolution::assemble(&scaled, root.key, root.point)?;
    // N -> (1 + phi) N; stored coefficients carry 1/N
    let shrink = Complex64::new(1.0 / (1.0 + phi), 0.0);
    for row in new_mode.coeffs.q.iter_mut().chain(new_mode.coeffs.p.iter_mut()) {
        for entry in row.iter_mut() {
            *entry *= shrink;
        }
    }
    new_mode.coeffs.norm_factor *= 1.0 + phi;
    Ok(new_mode)
}

/// Klein-Gordon self-product of a mode under the uniform-potential
/// measure: the momentum density rescales by (1 + phi), so the curved
/// product is (1 + phi) times the flat-formula product.
pub fn curved_kg_norm(mode: &ModeSolution, phi: f64) -> Result<Complex64> {
    let field = ModeField::plain(mode);
    Ok((1.0 + phi) * reduced_kg_product(&field, &field)?.total)
}

/// Rescale a mode's stored normalization by the square root of its actual
/// curved-measure norm, restoring unit norm exactly.
pub fn renormalize_curved(mode: &ModeSolution, phi: f64) -> Result<ModeSolution> {
    let norm = curved_kg_norm(mode, phi)?.re;
    if !(norm > 0.0) {
        return Err(Error::DataIntegrity(format!(
            "curved KG norm {norm} is not positive"
        )));
    }
    let mut out = mode.clone();
    let scale = Complex64::new(1.0 / norm.sqrt(), 0.0);
    for row in out.coeffs.q.iter_mut().chain(out.coeffs.p.iter_mut()) {
        for entry in row.iter_mut() {
            *entry *= scale;
        }
    }
    out.coeffs.norm_factor *= norm.sqrt();
    Ok(out)
}

/// Killing propagation constant from a local one: beta = (1 + phi) beta'.
pub fn killing_remap(beta_local: f64, phi: f64) -> f64 {
    (1.0 + phi) * beta_local
}

/// Local propagation constant from the Killing one.
pub fn killing_unmap(beta_killing: f64, phi: f64) -> f64 {
    beta_killing / (1.0 + phi)
}

/// One bin of a single-photon wave function over propagation constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketBin {
    pub beta: f64,
    pub width: f64,
    pub amplitude: Complex64,
}

/// A square-summable amplitude function over disjoint beta bins.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WavePacket {
    pub bins: Vec<PacketBin>,
}

impl WavePacket {
    pub fn new(bins: Vec<PacketBin>) -> Self {
        Self { bins }
    }

    /// sum |psi|^2 dbeta
    pub fn norm_squared(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| b.amplitude.norm_sqr() * b.width)
            .sum()
    }
}

/// Redshift a wave function between potentials: amplitudes pick up the
/// square-root factor sqrt(1 - phi' + phi'') and the bins move along the
/// shared Killing propagation constant, beta'' = beta (1 + phi')/(1 + phi'').
pub fn redshift_wavefunction(packet: &WavePacket, phi_from: f64, phi_to: f64) -> WavePacket {
    let factor = (1.0 - phi_from + phi_to).sqrt();
    let jacobian = (1.0 + phi_from) / (1.0 + phi_to);
    WavePacket {
        bins: packet
            .bins
            .iter()
            .map(|b| PacketBin {
                beta: b.beta * jacobian,
                width: b.width * jacobian,
                amplitude: b.amplitude * factor,
            })
            .collect(),
    }
}

/// Express a locally parametrized wave function in the Killing
/// parametrization, where no further transformation is needed between
/// potentials.
pub fn to_killing_parametrization(packet: &WavePacket, phi: f64) -> WavePacket {
    let stretch = 1.0 + phi;
    let factor = 1.0 / (stretch * (1.0 - phi).sqrt());
    WavePacket {
        bins: packet
            .bins
            .iter()
            .map(|b| PacketBin {
                beta: b.beta * stretch,
                width: b.width * stretch,
                amplitude: b.amplitude * factor,
            })
            .collect(),
    }
}

/// Gravitational phase shift of a horizontal Mach-Zehnder interferometer:
/// delta psi = - n_bar omega g L delta z (all geometric units, result in
/// radians).
pub fn gravitational_phase_shift(
    n_bar: f64,
    omega: f64,
    g_acc: f64,
    fiber_length: f64,
    height_separation: f64,
) -> f64 {
    -n_bar * omega * g_acc * fiber_length * height_separation
}
