//! Gauge-fixed electromagnetic modes of a step-index fiber: dispersion
//! relations for the physical and gauge/ghost families, the interface
//! matrix, coefficient matrices, and radial field/momentum profiles.
//!
//! Conventions: cylindrical coordinates with the fiber axis along z, the
//! complex transverse frame e_pm = (e_r -+ i e_theta)/sqrt(2), and mode
//! phase exp(i(beta z + m theta - omega t)). A mode is labeled by its
//! family, propagation constant beta, azimuthal index m, and radial index
//! kappa (kappa = 1 is the root with the largest normalized guide index b).

use crate::error::{Error, Result};
use crate::klein_gordon;
use crate::specfun;
use nalgebra::SMatrix;
use num_complex::Complex64;

pub type Matrix8 = SMatrix<Complex64, 8, 8>;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Scan resolution and refinement target for dispersion root finding.
const SCAN_INTERVALS: usize = 2000;
const B_LO: f64 = 1e-9;
const B_HI: f64 = 1.0 - 1e-9;
const B_REL_TOL: f64 = 1e-12;

/// Step-index fiber geometry and material data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    /// Core refractive index n1.
    pub n_core: f64,
    /// Cladding refractive index n2.
    pub n_clad: f64,
    /// Core radius rho in micrometres.
    pub core_radius: f64,
}

impl FiberSpec {
    pub fn new(n_core: f64, n_clad: f64, core_radius: f64) -> Result<Self> {
        if !(n_clad > 0.0) || !(n_core > n_clad) {
            return Err(Error::Domain(format!(
                "require n_core > n_clad > 0, got n_core={n_core}, n_clad={n_clad}"
            )));
        }
        if !(core_radius > 0.0) {
            return Err(Error::Domain(format!(
                "core radius must be positive, got {core_radius}"
            )));
        }
        Ok(Self {
            n_core,
            n_clad,
            core_radius,
        })
    }

    /// Fiber of Fig-2 type single-mode data: n1 = 1.4712, n2 = 1.4659,
    /// rho = 4.1 um.
    pub fn smf28_like() -> Self {
        Self {
            n_core: 1.4712,
            n_clad: 1.4659,
            core_radius: 4.1,
        }
    }

    /// Effective index from the normalized guide index b.
    pub fn n_bar(&self, b: f64) -> f64 {
        (b * self.n_core * self.n_core + (1.0 - b) * self.n_clad * self.n_clad).sqrt()
    }
}

/// Mode family of the gauge-fixed wave equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeFamily {
    Physical,
    Gauge,
    Ghost,
}

impl ModeFamily {
    pub fn label(&self) -> &'static str {
        match self {
            ModeFamily::Physical => "physical",
            ModeFamily::Gauge => "gauge",
            ModeFamily::Ghost => "ghost",
        }
    }
}

/// Identity of one solved mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeKey {
    pub family: ModeFamily,
    /// Propagation constant in rad/um.
    pub beta: f64,
    /// Azimuthal index.
    pub m: i32,
    /// Radial index, 1-based, ordered by descending b.
    pub kappa: u32,
}

/// Dimensionless dispersion data at one solved point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    /// Angular frequency in rad/um (c = 1).
    pub omega: f64,
    /// Normalized guide index, 0 < b < 1.
    pub b: f64,
    /// Normalized frequency V = rho omega sqrt(n1^2 - n2^2).
    pub v: f64,
    /// Core transverse parameter U = rho sqrt(n1^2 omega^2 - beta^2).
    pub u: f64,
    /// Cladding decay parameter W = rho sqrt(beta^2 - n2^2 omega^2).
    pub w: f64,
    /// Reduced azimuthal parameter m (beta/omega)(U^-2 + W^-2).
    pub m_tilde: f64,
}

impl DispersionPoint {
    pub fn from_b(spec: &FiberSpec, omega: f64, m: i32, b: f64) -> Self {
        let v = normalized_frequency_unchecked(spec, omega);
        let u = v * (1.0 - b).sqrt();
        let w = v * b.sqrt();
        let n_bar = spec.n_bar(b);
        let beta = n_bar * omega;
        let m_tilde = m as f64 * (beta / omega) * (1.0 / (u * u) + 1.0 / (w * w));
        Self {
            omega,
            b,
            v,
            u,
            w,
            m_tilde,
        }
    }

    pub fn n_bar(&self, spec: &FiberSpec) -> f64 {
        spec.n_bar(self.b)
    }

    pub fn beta(&self, spec: &FiberSpec) -> f64 {
        self.n_bar(spec) * self.omega
    }
}

/// One root of a dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRoot {
    pub key: ModeKey,
    pub point: DispersionPoint,
}

/// Normalized frequency V = rho omega sqrt(n1^2 - n2^2).
pub fn normalized_frequency(spec: &FiberSpec, omega: f64) -> Result<f64> {
    if !(spec.n_core > spec.n_clad) {
        return Err(Error::Domain("n_core must exceed n_clad".into()));
    }
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("omega must be non-negative, got {omega}")));
    }
    Ok(normalized_frequency_unchecked(spec, omega))
}

fn normalized_frequency_unchecked(spec: &FiberSpec, omega: f64) -> f64 {
    spec.core_radius
        * omega
        * (spec.n_core * spec.n_core - spec.n_clad * spec.n_clad).sqrt()
}

/// Pole-free building blocks of both dispersion determinants at (m, b).
///
/// jd = J'_m(U)/U and kd = K'_m(W)/W keep every expression finite across
/// zeros of J_m; the printed script-J and script-K are jd/Jm and kd/Km.
struct DispersionParts {
    u: f64,
    w: f64,
    jm: f64,
    km: f64,
    jd: f64,
    kd: f64,
    m_tilde: f64,
}

impl DispersionParts {
    fn new(spec: &FiberSpec, m: i32, omega: f64, b: f64) -> DispersionParts {
        let point = DispersionPoint::from_b(spec, omega, m, b);
        let (jm1, jm, jp1) = specfun::j_neighbors_raw(m, point.u);
        let (km1, km, kp1) = specfun::k_neighbors_raw(m, point.w);
        DispersionParts {
            u: point.u,
            w: point.w,
            jm,
            km,
            jd: 0.5 * (jm1 - jp1) / point.u,
            kd: -0.5 * (km1 + kp1) / point.w,
            m_tilde: point.m_tilde,
        }
    }

    /// Jm Km (scriptJ + scriptK)
    fn factor_sum(&self) -> f64 {
        self.jd * self.km + self.kd * self.jm
    }

    /// Jm Km (n1^2 scriptJ + n2^2 scriptK)
    fn factor_weighted(&self, spec: &FiberSpec) -> f64 {
        spec.n_core * spec.n_core * self.jd * self.km
            + spec.n_clad * spec.n_clad * self.kd * self.jm
    }

    fn d1(&self, spec: &FiberSpec) -> f64 {
        self.factor_sum() * self.factor_weighted(spec)
            - self.m_tilde * self.m_tilde * self.jm * self.jm * self.km * self.km
    }

    fn d1_scale(&self, spec: &FiberSpec) -> f64 {
        // term-magnitude scale; the naive |D1| collapses at m = 0 roots
        // where one factor vanishes
        let sum_scale = (self.jd * self.km).abs() + (self.kd * self.jm).abs();
        let weighted_scale = spec.n_core * spec.n_core * (self.jd * self.km).abs()
            + spec.n_clad * spec.n_clad * (self.kd * self.jm).abs();
        sum_scale * weighted_scale
            + (self.m_tilde * self.m_tilde * self.jm * self.jm * self.km * self.km).abs()
    }

    fn d2(&self) -> f64 {
        self.u
            * self.w
            * (self.u * self.u * self.jd * self.km - self.w * self.w * self.kd * self.jm)
    }

    fn d2_scale(&self) -> f64 {
        self.u
            * self.w
            * ((self.u * self.u * self.jd * self.km).abs()
                + (self.w * self.w * self.kd * self.jm).abs())
    }
}

fn guided_b(spec: &FiberSpec, omega: f64, beta: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let n_bar = (beta / omega).abs();
    let (n1, n2) = (spec.n_core, spec.n_clad);
    if !(n_bar > n2 && n_bar < n1) {
        return Err(Error::Domain(format!(
            "beta outside the guided window n2 omega < |beta| < n1 omega \
             (n_bar = {n_bar}, n1 = {n1}, n2 = {n2})"
        )));
    }
    Ok((n_bar * n_bar - n2 * n2) / (n1 * n1 - n2 * n2))
}

/// Dispersion determinant of the physical family,
/// D1 = Jm^2 Km^2 [(scriptJ + scriptK)(n1^2 scriptJ + n2^2 scriptK) - mt^2],
/// evaluated in a form that stays finite at zeros of J_m.
pub fn dispersion_d1(spec: &FiberSpec, m: i32, omega: f64, beta: f64) -> Result<f64> {
    let b = guided_b(spec, omega, beta)?;
    Ok(DispersionParts::new(spec, m, omega, b).d1(spec))
}

/// Dispersion determinant of the gauge/ghost family,
/// D2 = U W Jm Km [U^2 scriptJ - W^2 scriptK].
pub fn dispersion_d2(spec: &FiberSpec, m: i32, omega: f64, beta: f64) -> Result<f64> {
    let b = guided_b(spec, omega, beta)?;
    Ok(DispersionParts::new(spec, m, omega, b).d2())
}

/// Reduced azimuthal parameter of the printed determinant.
pub fn m_tilde(spec: &FiberSpec, m: i32, omega: f64, beta: f64) -> Result<f64> {
    let b = guided_b(spec, omega, beta)?;
    Ok(DispersionPoint::from_b(spec, omega, m, b).m_tilde)
}

/// Bracket sign changes of `f` on [B_LO, B_HI] and bisect each to
/// B_REL_TOL relative accuracy in b.
fn scan_and_refine<F: Fn(f64) -> f64>(f: F, intervals: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (B_HI - B_LO) / intervals as f64;
    let mut x0 = B_LO;
    let mut f0 = f(x0);
    for i in 1..=intervals {
        let x1 = B_LO + step * i as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi) = (x0, x1);
            let mut flo = f0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= B_REL_TOL * mid {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn family_roots(spec: &FiberSpec, omega: f64, m: i32, family: ModeFamily) -> Vec<f64> {
    match family {
        ModeFamily::Gauge | ModeFamily::Ghost => {
            scan_and_refine(|b| DispersionParts::new(spec, m, omega, b).d2(), SCAN_INTERVALS)
        }
        ModeFamily::Physical if m == 0 => {
            // At m = 0 the determinant factorizes into TE/TM-type branches.
            // For weakly guiding fibers the two roots of the product lie so
            // close together that a fixed scan can step over the pair, so
            // each factor is scanned on its own.
            let mut roots = scan_and_refine(
                |b| DispersionParts::new(spec, m, omega, b).factor_sum(),
                SCAN_INTERVALS,
            );
            roots.extend(scan_and_refine(
                |b| DispersionParts::new(spec, m, omega, b).factor_weighted(spec),
                SCAN_INTERVALS,
            ));
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            roots.dedup_by(|a, b| (*a - *b).abs() < 1e-11);
            roots
        }
        ModeFamily::Physical => {
            scan_and_refine(|b| DispersionParts::new(spec, m, omega, b).d1(spec), SCAN_INTERVALS)
        }
    }
}

/// All guided roots of the family's dispersion relation at fixed frequency.
///
/// Returns an empty list when no guided root exists. Roots are ordered by
/// descending b and kappa is assigned 1-based in that order.
pub fn solve_modes(
    spec: &FiberSpec,
    omega: f64,
    m: i32,
    family: ModeFamily,
) -> Result<Vec<ModeRoot>> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let v = normalized_frequency_unchecked(spec, omega);
    if v > 90.0 {
        return Err(Error::Domain(format!(
            "normalized frequency V = {v} outside the supported special-function box"
        )));
    }
    if m.unsigned_abs() > specfun::MAX_ORDER as u32 - 1 {
        return Err(Error::Domain(format!(
            "azimuthal index {m} outside supported range"
        )));
    }
    let mut roots = family_roots(spec, omega, m, family);
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let point = DispersionPoint::from_b(spec, omega, m, b);
            ModeRoot {
                key: ModeKey {
                    family,
                    beta: point.beta(spec),
                    m,
                    kappa: (i + 1) as u32,
                },
                point,
            }
        })
        .collect())
}

/// All guided roots at fixed propagation constant: the frequency window
/// beta/n1 < omega < beta/n2 is swept through the same b parametrization
/// with omega(b) = beta / n_bar(b). Modes returned here share (beta, m)
/// exactly, which is the setting of the orthogonality relations.
pub fn solve_modes_at_beta(
    spec: &FiberSpec,
    beta: f64,
    m: i32,
    family: ModeFamily,
) -> Result<Vec<ModeRoot>> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let omega_of_b = |b: f64| beta / spec.n_bar(b);
    if normalized_frequency_unchecked(spec, omega_of_b(B_LO)) > 90.0 {
        return Err(Error::Domain(
            "normalized frequency outside the supported special-function box".into(),
        ));
    }
    let eval = |b: f64, family: ModeFamily| -> f64 {
        let parts = DispersionParts::new(spec, m, omega_of_b(b), b);
        match family {
            ModeFamily::Physical => parts.d1(spec),
            _ => parts.d2(),
        }
    };
    let mut roots = match family {
        ModeFamily::Physical if m == 0 => {
            let mut r = scan_and_refine(
                |b| DispersionParts::new(spec, m, omega_of_b(b), b).factor_sum(),
                SCAN_INTERVALS,
            );
            r.extend(scan_and_refine(
                |b| DispersionParts::new(spec, m, omega_of_b(b), b).factor_weighted(spec),
                SCAN_INTERVALS,
            ));
            r.sort_by(|a, b| a.partial_cmp(b).unwrap());
            r.dedup_by(|a, b| (*a - *b).abs() < 1e-11);
            r
        }
        f => scan_and_refine(|b| eval(b, f), SCAN_INTERVALS),
    };
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let point = DispersionPoint::from_b(spec, omega_of_b(b), m, b);
            ModeRoot {
                key: ModeKey {
                    family,
                    beta,
                    m,
                    kappa: (i + 1) as u32,
                },
                point,
            }
        })
        .collect())
}

/// The interface system M N q = 0 from the alpha = 1 matching conditions.
///
/// Row order: continuity of a_t, continuity of a_par, continuity of a_plus,
/// continuity of a_minus, normal inhomogeneous (G) row, normal potential
/// row, tangential field-strength row, and the gauge-function row. N is the
/// diagonal of J_m(U) (four times) and K_m(W) (four times).
pub fn interface_matrix_factors(
    spec: &FiberSpec,
    m: i32,
    omega: f64,
    beta: f64,
) -> Result<(Matrix8, Matrix8)> {
    let b = guided_b(spec, omega, beta)?;
    let point = DispersionPoint::from_b(spec, omega, m, b);
    let (u, w) = (point.u, point.w);
    let (jm1, jm, jp1) = specfun::j_neighbors_raw(m, u);
    let (km1, km, kp1) = specfun::k_neighbors_raw(m, w);
    let sj = 0.5 * (jm1 - jp1) / (u * jm); // scriptJ
    let sk = -0.5 * (km1 + kp1) / (w * km); // scriptK
    let mf = m as f64;
    let (sj_p, sj_m) = (sj - mf / (u * u), sj + mf / (u * u));
    let (sk_p, sk_m) = (sk - mf / (w * w), sk + mf / (w * w));
    let (n1s, n2s) = (spec.n_core * spec.n_core, spec.n_clad * spec.n_clad);
    let rho = spec.core_radius;
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let z = Complex64::new(0.0, 0.0);

    #[rustfmt::skip]
    let m_mat = Matrix8::from_row_slice(&[
        re(1.0), z, z, z, re(-1.0), z, z, z,
        z, re(1.0), z, z, z, re(-1.0), z, z,
        z, z, re(-u * sj_p), z, z, z, re(w * sk_p), z,
        z, z, z, re(u * sj_m), z, z, z, re(w * sk_m),
        re(-n1s * u * u * sj), z,
            i * (n1s * rho * omega / SQRT2 * u * sj_p),
            -i * (n1s * rho * omega / SQRT2 * u * sj_m),
            re(n2s * w * w * sk), z,
            -i * (n2s * rho * omega / SQRT2 * w * sk_p),
            -i * (n2s * rho * omega / SQRT2 * w * sk_m),
        z, z, -i * re(u / SQRT2), -i * re(u / SQRT2),
            z, z, -i * re(w / SQRT2), i * re(w / SQRT2),
        z, re(u * u * sj),
            i * (rho * beta / SQRT2 * u * sj_p),
            -i * (rho * beta / SQRT2 * u * sj_m),
            z, re(-w * w * sk),
            -i * (rho * beta / SQRT2 * w * sk_p),
            -i * (rho * beta / SQRT2 * w * sk_m),
        i * re(n1s * rho * omega), i * re(beta * rho), re(u / SQRT2), re(-u / SQRT2),
            -i * re(n2s * rho * omega), -i * re(beta * rho), re(w / SQRT2), re(w / SQRT2),
    ]);

    let mut n_mat = Matrix8::zeros();
    for k in 0..4 {
        n_mat[(k, k)] = re(jm);
        n_mat[(k + 4, k + 4)] = re(km);
    }
    Ok((m_mat, n_mat))
}

/// The product M N of the interface system.
pub fn interface_matrix(spec: &FiberSpec, m: i32, omega: f64, beta: f64) -> Result<Matrix8> {
    let (m_mat, n_mat) = interface_matrix_factors(spec, m, omega, beta)?;
    Ok(m_mat * n_mat)
}

/// Reduced coefficient matrices of one mode.
///
/// `q` and `p` are the 2x4 matrices printed against the normalized radial
/// profiles J_nu(U r/rho)/J_m(U) (row 0, core) and K_nu(W r/rho)/K_m(W)
/// (row 1, cladding); columns are the frame labels (t, par, +, -). Both
/// already carry the factor 1/N; `norm_factor` records N itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    pub q: [[Complex64; 4]; 2],
    pub p: [[Complex64; 4]; 2],
    pub norm_factor: f64,
}

/// Maximum admissible relative dispersion residual in assemble_coefficients.
const ON_SHELL_LIMIT: f64 = 1e-8;

/// Populate the family's coefficient matrices at an on-shell point and
/// attach the Klein-Gordon normalization factor.
pub fn assemble_coefficients(
    spec: &FiberSpec,
    key: &ModeKey,
    point: &DispersionPoint,
) -> Result<ModeCoefficients> {
    let parts = DispersionParts::new(spec, key.m, point.omega, point.b);
    let (residual, scale) = match key.family {
        ModeFamily::Physical => (parts.d1(spec).abs(), parts.d1_scale(spec)),
        _ => (parts.d2().abs(), parts.d2_scale()),
    };
    if residual > ON_SHELL_LIMIT * scale {
        return Err(Error::OffShell {
            residual: residual / scale,
            limit: ON_SHELL_LIMIT,
        });
    }

    if (key.beta.abs() - point.beta(spec)).abs() > 1e-6 * point.beta(spec) {
        return Err(Error::Domain(format!(
            "key beta {} does not match the dispersion point ({})",
            key.beta,
            point.beta(spec)
        )));
    }
    // beta enters the coefficient matrices with its sign; solve_* produce
    // beta > 0 and conjugate partners carry the reflected labels
    let (omega, beta) = (point.omega, key.beta);
    let (u, w) = (point.u, point.w);
    let (n1s, n2s) = (
        spec.n_core * spec.n_core,
        spec.n_clad * spec.n_clad,
    );
    let rho = spec.core_radius;
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let z = Complex64::new(0.0, 0.0);
    // I1/I2 are invariant under (m, beta) -> (-m, -beta); evaluate them in
    // the beta > 0 convention
    let m_norm = if key.beta >= 0.0 { key.m } else { -key.m };

    let (norm, mut q, mut p) = match key.family {
        ModeFamily::Physical => {
            let sj = parts.jd / parts.jm;
            let sk = parts.kd / parts.km;
            let m_tilde =
                key.m as f64 * (beta / omega) * (1.0 / (u * u) + 1.0 / (w * w));
            // The printed matrices carry the ratio t = mt/(scriptJ+scriptK).
            // At m = 0 that ratio is 0/0: the dispersion factorizes and t
            // has the two branch limits t = 0 (TM type) and t -> inf (TE
            // type). The matrices and I1 are homogeneous in the direction
            // (alpha, tau) ~ (1, t), so the TE branch is the direction
            // (0, 1); everywhere else the printed parametrization applies
            // as is.
            let d_sum = sj + sk;
            let d_weighted = n1s * sj + n2s * sk;
            let (alpha, tau) = if key.m == 0 {
                if d_sum.abs() >= d_weighted.abs() {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            } else {
                (1.0, m_tilde / d_sum)
            };
            let i1 = klein_gordon::normalization_i1_direction(
                spec, point, m_norm, alpha, tau,
            )?;
            let norm = 2.0 * std::f64::consts::PI * rho * beta.abs() * (2.0 * omega * i1).sqrt();
            let q = [
                [
                    re(alpha),
                    z,
                    -i * re(rho * omega / (SQRT2 * u) * (n1s * alpha + tau * beta / omega)),
                    i * re(rho * omega / (SQRT2 * u) * (n1s * alpha - tau * beta / omega)),
                ],
                [
                    re(alpha),
                    z,
                    i * re(rho * omega / (SQRT2 * w) * (n2s * alpha + tau * beta / omega)),
                    i * re(rho * omega / (SQRT2 * w) * (n2s * alpha - tau * beta / omega)),
                ],
            ];
            let p = [
                [
                    z,
                    i * re(n1s * beta * alpha),
                    re(-n1s * rho * beta * beta / (SQRT2 * u)
                        * (alpha + tau * omega / beta)),
                    re(n1s * rho * beta * beta / (SQRT2 * u)
                        * (alpha - tau * omega / beta)),
                ],
                [
                    z,
                    i * re(n2s * beta * alpha),
                    re(n2s * rho * beta * beta / (SQRT2 * w)
                        * (alpha + tau * omega / beta)),
                    re(n2s * rho * beta * beta / (SQRT2 * w)
                        * (alpha - tau * omega / beta)),
                ],
            ];
            (norm, q, p)
        }
        ModeFamily::Gauge => {
            let i2 = klein_gordon::normalization_i2(spec, point, m_norm)?;
            let norm = 2.0 * std::f64::consts::PI * rho * beta.abs() * (2.0 * omega * i2).sqrt();
            let q = [
                [
                    -i * re(omega),
                    i * re(beta),
                    re(-u / (SQRT2 * rho)),
                    re(u / (SQRT2 * rho)),
                ],
                [
                    -i * re(omega),
                    i * re(beta),
                    re(-w / (SQRT2 * rho)),
                    re(-w / (SQRT2 * rho)),
                ],
            ];
            let p = [[z; 4], [z; 4]];
            (norm, q, p)
        }
        ModeFamily::Ghost => {
            let i2 = klein_gordon::normalization_i2(spec, point, m_norm)?;
            let norm = 2.0 * std::f64::consts::PI * rho * beta.abs() * (2.0 * omega * i2).sqrt();
            let q = [
                [
                    i * re(omega),
                    i * re(beta),
                    re(u / (SQRT2 * rho)),
                    re(-u / (SQRT2 * rho)),
                ],
                [
                    i * re(omega),
                    i * re(beta),
                    re(w / (SQRT2 * rho)),
                    re(w / (SQRT2 * rho)),
                ],
            ];
            let p = [
                [
                    re(-2.0 * n1s * beta * beta),
                    re(2.0 * n1s * beta * omega),
                    z,
                    z,
                ],
                [
                    re(-2.0 * n2s * beta * beta),
                    re(2.0 * n2s * beta * omega),
                    z,
                    z,
                ],
            ];
            (norm, q, p)
        }
    };
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DataIntegrity(format!(
            "normalization factor came out {norm}"
        )));
    }
    let inv = re(1.0 / norm);
    for row in q.iter_mut().chain(p.iter_mut()) {
        for entry in row.iter_mut() {
            *entry *= inv;
        }
    }
    Ok(ModeCoefficients {
        q,
        p,
        norm_factor: norm,
    })
}

/// One fully assembled guided mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub spec: FiberSpec,
    pub key: ModeKey,
    pub point: DispersionPoint,
    pub coeffs: ModeCoefficients,
    /// (J_m(U), K_m(W)) profile denominators, cached for field evaluation.
    profile_norm: (f64, f64),
}

/// Instantaneous samples of the mode at a single radius (phase factor
/// exp(i(beta z + m theta - omega t)) stripped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// Potential components (a_t, a_par, a_plus, a_minus) in the coframe.
    pub a: [Complex64; 4],
    /// Conjugate-momentum components (pi_t, pi_par, pi_plus, pi_minus) in
    /// the frame, i.e. the coefficients of the conjugated momentum field.
    pub pi: [Complex64; 4],
    /// Gauge function chi at this radius.
    pub chi: Complex64,
}

impl ModeSolution {
    pub fn assemble(spec: &FiberSpec, key: ModeKey, point: DispersionPoint) -> Result<Self> {
        let coeffs = assemble_coefficients(spec, &key, &point)?;
        let jm = specfun::j_profile(key.m, point.u);
        let km = specfun::k_profile(key.m, point.w);
        Ok(Self {
            spec: *spec,
            key,
            point,
            coeffs,
            profile_norm: (jm, km),
        })
    }

    /// Solve, then assemble every mode of the family at fixed frequency.
    pub fn solve_all(
        spec: &FiberSpec,
        omega: f64,
        m: i32,
        family: ModeFamily,
    ) -> Result<Vec<Self>> {
        solve_modes(spec, omega, m, family)?
            .into_iter()
            .map(|root| Self::assemble(spec, root.key, root.point))
            .collect()
    }

    /// The mode at the reflected labels (-beta, -m): the solution whose
    /// complex conjugate carries the same (beta, m, omega) as this one.
    /// The dispersion data is label-sign blind, so the point is reused.
    pub fn conjugate_partner(&self) -> Result<Self> {
        Self::assemble(
            &self.spec,
            ModeKey {
                family: self.key.family,
                beta: -self.key.beta,
                m: -self.key.m,
                kappa: self.key.kappa,
            },
            self.point,
        )
    }

    pub fn omega(&self) -> f64 {
        self.point.omega
    }

    pub fn beta(&self) -> f64 {
        self.key.beta
    }

    /// Normalized radial profile for a component of Bessel order `nu`:
    /// J_nu(U r/rho)/J_m(U) in the core, K_nu(W r/rho)/K_m(W) outside.
    fn profile(&self, nu: i32, r: f64) -> f64 {
        let rho = self.spec.core_radius;
        if r <= rho {
            specfun::j_profile(nu, self.point.u * r / rho) / self.profile_norm.0
        } else {
            specfun::k_profile(nu, self.point.w * r / rho) / self.profile_norm.1
        }
    }

    /// Gauge-function coefficients (core, cladding) against the order-m
    /// normalized profile.
    pub fn chi_coefficients(&self) -> [Complex64; 2] {
        let spec = &self.spec;
        let (omega, beta) = (self.point.omega, self.key.beta);
        let (u, w) = (self.point.u, self.point.w);
        let rho = spec.core_radius;
        let i = Complex64::new(0.0, 1.0);
        let q = &self.coeffs.q;
        let core = i * (spec.n_core * spec.n_core * omega * q[0][0] + beta * q[0][1])
            + (u / (SQRT2 * rho)) * (q[0][2] - q[0][3]);
        let clad = i * (spec.n_clad * spec.n_clad * omega * q[1][0] + beta * q[1][1])
            - (w / (SQRT2 * rho)) * (q[1][2] + q[1][3]);
        [core, clad]
    }

    /// Sample all components at one radius. Radii r <= rho use the core
    /// branch, so evaluating at exactly rho from both sides probes the
    /// interface matching.
    pub fn field_at(&self, r: f64) -> FieldSample {
        let m = self.key.m;
        let row = if r <= self.spec.core_radius { 0 } else { 1 };
        let orders = [m, m, m + 1, m - 1];
        let mut a = [Complex64::new(0.0, 0.0); 4];
        let mut pi = [Complex64::new(0.0, 0.0); 4];
        for c in 0..4 {
            let prof = self.profile(orders[c], r);
            a[c] = self.coeffs.q[row][c] * prof;
            pi[c] = self.coeffs.p[row][c] * prof;
        }
        let chi = self.chi_coefficients()[row] * self.profile(m, r);
        FieldSample { a, pi, chi }
    }

    /// Sample the mode on a radial grid.
    pub fn sample_radial_field(&self, grid: &[f64]) -> RadialField {
        let mut field = RadialField::with_capacity(grid.len());
        for &r in grid {
            let s = self.field_at(r);
            field.grid.push(r);
            field.a_t.push(s.a[0]);
            field.a_par.push(s.a[1]);
            field.a_plus.push(s.a[2]);
            field.a_minus.push(s.a[3]);
            field.pi_t.push(s.pi[0]);
            field.pi_par.push(s.pi[1]);
            field.pi_plus.push(s.pi[2]);
            field.pi_minus.push(s.pi[3]);
            field.chi.push(s.chi);
        }
        field
    }

    /// Largest |chi| over the grid relative to the largest potential
    /// component; zero (to rounding) for physical and gauge modes.
    pub fn chi_residual(&self, grid: &[f64]) -> f64 {
        let mut max_chi = 0.0_f64;
        let mut max_a = 0.0_f64;
        for &r in grid {
            let s = self.field_at(r);
            max_chi = max_chi.max(s.chi.norm());
            for c in 0..4 {
                max_a = max_a.max(s.a[c].norm());
            }
        }
        max_chi / max_a.max(f64::MIN_POSITIVE)
    }

    /// The 8-vector (N q) of reduced coefficients in the interface-system
    /// ordering (core t, par, +, -; cladding t, par, +, -), scaled back up
    /// by the normalization factor.
    pub fn interface_vector(&self) -> SMatrix<Complex64, 8, 1> {
        let n = Complex64::new(self.coeffs.norm_factor, 0.0);
        SMatrix::<Complex64, 8, 1>::from_column_slice(&[
            self.coeffs.q[0][0] * n,
            self.coeffs.q[0][1] * n,
            self.coeffs.q[0][2] * n,
            self.coeffs.q[0][3] * n,
            self.coeffs.q[1][0] * n,
            self.coeffs.q[1][1] * n,
            self.coeffs.q[1][2] * n,
            self.coeffs.q[1][3] * n,
        ])
    }
}

/// Sampled complex field data on an ascending radial grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadialField {
    pub grid: Vec<f64>,
    pub a_t: Vec<Complex64>,
    pub a_par: Vec<Complex64>,
    pub a_plus: Vec<Complex64>,
    pub a_minus: Vec<Complex64>,
    pub pi_t: Vec<Complex64>,
    pub pi_par: Vec<Complex64>,
    pub pi_plus: Vec<Complex64>,
    pub pi_minus: Vec<Complex64>,
    pub chi: Vec<Complex64>,
}

impl RadialField {
    fn with_capacity(n: usize) -> Self {
        Self {
            grid: Vec::with_capacity(n),
            a_t: Vec::with_capacity(n),
            a_par: Vec::with_capacity(n),
            a_plus: Vec::with_capacity(n),
            a_minus: Vec::with_capacity(n),
            pi_t: Vec::with_capacity(n),
            pi_par: Vec::with_capacity(n),
            pi_plus: Vec::with_capacity(n),
            pi_minus: Vec::with_capacity(n),
            chi: Vec::with_capacity(n),
        }
    }
}

/// Uniform radial grid from just above the axis out to `r_max`.
pub fn radial_grid(r_max: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| r_max * i as f64 / points as f64)
        .collect()
}
