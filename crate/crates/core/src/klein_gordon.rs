//! Reduced Klein-Gordon products of fiber modes, the closed-form
//! normalization integrals, and pairwise orthogonality reports.
//!
//! The products of two modes sharing (beta, m) factor out delta_{m,m'}
//! delta(beta - beta'); everything returned here is the coefficient of that
//! delta pair, so a correctly normalized physical mode has total product 1
//! and the gauge/ghost pair has mutual product 1. Delta factors themselves
//! are never represented numerically; wave-packet code books them as bin
//! weights.

use crate::error::{Error, Result};
use crate::fiber_modes::{DispersionPoint, FiberSpec, ModeSolution};
use crate::quadrature::integrate_complex;
use crate::specfun;
use num_complex::Complex64;

const TWO_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Split of a reduced Klein-Gordon product into its volume term and the
/// core-cladding interface term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedProduct {
    pub bulk: Complex64,
    pub interface: Complex64,
    pub total: Complex64,
}

/// A mode or its complex conjugate, presented with a uniform component
/// convention so both enter product formulas identically.
///
/// Conjugating a mode swaps the transverse components (the complex frame
/// covectors conjugate into each other) and flips the sign of all three
/// phase labels.
#[derive(Clone, Copy)]
pub struct ModeField<'a> {
    solution: &'a ModeSolution,
    conjugated: bool,
}

impl<'a> ModeField<'a> {
    pub fn plain(solution: &'a ModeSolution) -> Self {
        Self {
            solution,
            conjugated: false,
        }
    }

    pub fn conjugate(solution: &'a ModeSolution) -> Self {
        Self {
            solution,
            conjugated: true,
        }
    }

    pub fn omega(&self) -> f64 {
        if self.conjugated {
            -self.solution.omega()
        } else {
            self.solution.omega()
        }
    }

    pub fn beta(&self) -> f64 {
        if self.conjugated {
            -self.solution.beta()
        } else {
            self.solution.beta()
        }
    }

    pub fn m(&self) -> i32 {
        if self.conjugated {
            -self.solution.key.m
        } else {
            self.solution.key.m
        }
    }

    fn spec(&self) -> &FiberSpec {
        &self.solution.spec
    }

    fn w(&self) -> f64 {
        self.solution.point.w
    }

    fn a_at(&self, r: f64) -> [Complex64; 4] {
        let s = self.solution.field_at(r);
        if self.conjugated {
            [s.a[0].conj(), s.a[1].conj(), s.a[3].conj(), s.a[2].conj()]
        } else {
            s.a
        }
    }

    fn pi_at(&self, r: f64) -> [Complex64; 4] {
        let s = self.solution.field_at(r);
        if self.conjugated {
            [
                s.pi[0].conj(),
                s.pi[1].conj(),
                s.pi[3].conj(),
                s.pi[2].conj(),
            ]
        } else {
            s.pi
        }
    }
}

fn require_shared_labels(a: &ModeField, b: &ModeField) -> Result<()> {
    let beta_scale = a.beta().abs().max(b.beta().abs()).max(1e-30);
    if a.m() != b.m() || (a.beta() - b.beta()).abs() > 1e-9 * beta_scale {
        return Err(Error::Domain(format!(
            "reduced products require shared (beta, m); got ({}, {}) vs ({}, {})",
            a.beta(),
            a.m(),
            b.beta(),
            b.m()
        )));
    }
    if a.spec() != b.spec() {
        return Err(Error::Domain(
            "reduced products require modes of the same fiber".into(),
        ));
    }
    Ok(())
}

/// Cladding truncation radius: far enough out that the slowest-decaying
/// K profile has fallen below 1e-18 of its interface value.
fn truncation_radius(spec: &FiberSpec, w_min: f64) -> f64 {
    spec.core_radius * (1.0 + 24.0 / w_min)
}

/// Reduced Klein-Gordon product of two (possibly conjugated) modes sharing
/// (beta, m): the bulk term
/// (2 pi)^2 (omega + omega') int r n^2 g_opt(a*, a') dr, quadrature split at
/// r = rho, plus the interface term (2 pi)^2 i rho [[n^2 (a*_t a'_r - a'_t a*_r)]].
pub fn reduced_kg_product(a: &ModeField, b: &ModeField) -> Result<ReducedProduct> {
    require_shared_labels(a, b)?;
    let spec = *a.spec();
    let rho = spec.core_radius;
    let (n1s, n2s) = (
        spec.n_core * spec.n_core,
        spec.n_clad * spec.n_clad,
    );
    let r_max = truncation_radius(&spec, a.w().min(b.w()));
    let omega_sum = a.omega() + b.omega();

    let pairing = |r: f64| -> Complex64 {
        let fa = a.a_at(r);
        let fb = b.a_at(r);
        let ns = if r <= rho { n1s } else { n2s };
        let g = -ns * fa[0].conj() * fb[0]
            + fa[1].conj() * fb[1]
            + fa[2].conj() * fb[2]
            + fa[3].conj() * fb[3];
        ns * r * g
    };
    // Magnitude integral sets the absolute tolerance so that products which
    // vanish by cancellation still converge.
    let magnitude = |r: f64| -> Complex64 {
        let fa = a.a_at(r);
        let fb = b.a_at(r);
        let ns = if r <= rho { n1s } else { n2s };
        let m = fa
            .iter()
            .zip(fb.iter())
            .map(|(x, y)| x.norm() * y.norm())
            .sum::<f64>();
        Complex64::new(ns * ns * r * m, 0.0)
    };
    let scale = integrate_complex(magnitude, 0.0, rho, 1e-8, 1e-300)?.re
        + integrate_complex(magnitude, rho, r_max, 1e-8, 1e-300)?.re;
    let abs_tol = 1e-12 * scale.max(1e-300);
    let core = integrate_complex(pairing, 0.0, rho, 1e-11, abs_tol)?;
    let clad = integrate_complex(pairing, rho, r_max, 1e-11, abs_tol)?;
    let bulk = TWO_PI_SQ * omega_sum * (core + clad);

    let jump_term = |r: f64| -> Complex64 {
        let fa = a.a_at(r);
        let fb = b.a_at(r);
        let ar_a = (fa[2] + fa[3]) / std::f64::consts::SQRT_2;
        let ar_b = (fb[2] + fb[3]) / std::f64::consts::SQRT_2;
        fa[0].conj() * ar_b - fb[0] * ar_a.conj()
    };
    // field_at uses the core branch for r <= rho, so rho itself is the core
    // limit and the next float up is the cladding limit
    let x_core = jump_term(rho);
    let x_clad = jump_term(rho * (1.0 + 1e-14));
    let interface =
        TWO_PI_SQ * Complex64::new(0.0, rho) * (n1s * x_core - n2s * x_clad);

    Ok(ReducedProduct {
        bulk,
        interface,
        total: bulk + interface,
    })
}

/// The same product evaluated through the canonical momenta:
/// (2 pi)^2 i int r (a* . pi' - a' . pi*) dr. No interface term arises on
/// this route; it must agree with [`reduced_kg_product`] on shell.
pub fn momentum_kg_product(a: &ModeField, b: &ModeField) -> Result<Complex64> {
    require_shared_labels(a, b)?;
    let spec = *a.spec();
    let rho = spec.core_radius;
    let r_max = truncation_radius(&spec, a.w().min(b.w()));
    let integrand = |r: f64| -> Complex64 {
        let fa = a.a_at(r);
        let fb = b.a_at(r);
        let pa = a.pi_at(r);
        let pb = b.pi_at(r);
        let mut s = Complex64::new(0.0, 0.0);
        for c in 0..4 {
            s += fa[c].conj() * pb[c].conj() - fb[c] * pa[c];
        }
        Complex64::new(0.0, r) * s
    };
    let magnitude = |r: f64| -> Complex64 {
        let fa = a.a_at(r);
        let fb = b.a_at(r);
        let pa = a.pi_at(r);
        let pb = b.pi_at(r);
        let mut s = 0.0;
        for c in 0..4 {
            s += fa[c].norm() * pb[c].norm() + fb[c].norm() * pa[c].norm();
        }
        Complex64::new(r * s, 0.0)
    };
    let scale = integrate_complex(magnitude, 0.0, rho, 1e-8, 1e-300)?.re
        + integrate_complex(magnitude, rho, r_max, 1e-8, 1e-300)?.re;
    let abs_tol = 1e-12 * scale.max(1e-300);
    let core = integrate_complex(integrand, 0.0, rho, 1e-11, abs_tol)?;
    let clad = integrate_complex(integrand, rho, r_max, 1e-11, abs_tol)?;
    Ok(TWO_PI_SQ * (core + clad))
}

/// Normalization integral I_1 of the physical family, from the closed-form
/// radial square integrals, as the four-term expression in
/// t = mt/(scriptJ + scriptK). Positive for every guided physical mode; a
/// non-positive value is reported as corrupted input.
///
/// At m = 0, t = 0 parametrizes the TM-type branch; TE-type m = 0 modes
/// (where t diverges) are reached through
/// [`normalization_i1_direction`], the homogeneous form of the same
/// expression.
pub fn normalization_i1(spec: &FiberSpec, point: &DispersionPoint, m: i32) -> Result<f64> {
    let (u, w) = (point.u, point.w);
    let (omega, beta) = (point.omega, point.beta(spec));
    let (jm1, jm, jp1) = specfun::j_neighbors_raw(m, u);
    let (km1, km, kp1) = specfun::k_neighbors_raw(m, w);
    let sj = 0.5 * (jm1 - jp1) / (u * jm);
    let sk = -0.5 * (km1 + kp1) / (w * km);
    // m_tilde in the beta > 0 convention of this function's arguments
    let m_tilde = m as f64 * (beta / omega) * (1.0 / (u * u) + 1.0 / (w * w));
    let t = m_tilde / (sj + sk);
    normalization_i1_direction(spec, point, m, 1.0, t)
}

/// I_1 with the printed factors (1 +- t omega/beta)(n^2 +- t beta/omega)
/// homogenized to (alpha +- tau omega/beta)(n^2 alpha +- tau beta/omega):
/// degree two in the branch direction (alpha, tau) ~ (1, t), which stays
/// finite on TE-type branches where t itself diverges.
pub fn normalization_i1_direction(
    spec: &FiberSpec,
    point: &DispersionPoint,
    m: i32,
    alpha: f64,
    tau: f64,
) -> Result<f64> {
    let (u, w) = (point.u, point.w);
    let rho = spec.core_radius;
    let (omega, beta) = (point.omega, point.beta(spec));
    let (n1s, n2s) = (
        spec.n_core * spec.n_core,
        spec.n_clad * spec.n_clad,
    );
    let jm = specfun::j_neighbors_raw(m, u).1;
    let km = specfun::k_neighbors_raw(m, w).1;
    let jint = |nu: i32| -> Result<f64> {
        Ok(specfun::radial_j_square_integral(nu, u, rho)? / (jm * jm))
    };
    let kint = |nu: i32| -> Result<f64> {
        Ok(specfun::radial_k_square_integral(nu, w, rho)? / (km * km))
    };
    let plus = alpha + tau * omega / beta;
    let minus = alpha - tau * omega / beta;
    let wplus = |ns: f64| ns * alpha + tau * beta / omega;
    let wminus = |ns: f64| ns * alpha - tau * beta / omega;
    let i1 = n1s / (2.0 * u * u) * plus * wplus(n1s) * jint(m + 1)?
        + n1s / (2.0 * u * u) * minus * wminus(n1s) * jint(m - 1)?
        + n2s / (2.0 * w * w) * plus * wplus(n2s) * kint(m + 1)?
        + n2s / (2.0 * w * w) * minus * wminus(n2s) * kint(m - 1)?;
    if !(i1 > 0.0) {
        return Err(Error::DataIntegrity(format!(
            "normalization integral I1 = {i1} is not positive (m={m}, V={})",
            point.v
        )));
    }
    Ok(i1)
}

/// Normalization integral I_2 of the gauge/ghost family (closed form).
pub fn normalization_i2(spec: &FiberSpec, point: &DispersionPoint, m: i32) -> Result<f64> {
    let (u, w) = (point.u, point.w);
    let rho = spec.core_radius;
    let beta = point.beta(spec);
    let (n1s, n2s) = (
        spec.n_core * spec.n_core,
        spec.n_clad * spec.n_clad,
    );
    let (jm1, jm, jp1) = specfun::j_neighbors_raw(m, u);
    let (km1, km, kp1) = specfun::k_neighbors_raw(m, w);
    let sj = 0.5 * (jm1 - jp1) / (u * jm);
    let sk = -0.5 * (km1 + kp1) / (w * km);
    let mf = m as f64;
    let i2 = n1s * u * u * sj * sj + n2s * w * w * sk * sk
        + (n1s - n2s) * (1.0 - mf * mf * rho * rho * beta * beta / (u * u * w * w));
    if !(i2 > 0.0) {
        return Err(Error::DataIntegrity(format!(
            "normalization integral I2 = {i2} is not positive (m={m}, V={})",
            point.v
        )));
    }
    Ok(i2)
}

/// I_2 through its defining integrals, (2 n1^2/rho^2) times the core
/// J_m^2 square integral plus (2 n2^2/rho^2) times the cladding K_m^2
/// one (each against its interface value squared): an independent
/// on-shell route to the closed form above.
pub fn normalization_i2_integral(
    spec: &FiberSpec,
    point: &DispersionPoint,
    m: i32,
) -> Result<f64> {
    let (u, w) = (point.u, point.w);
    let rho = spec.core_radius;
    let (n1s, n2s) = (
        spec.n_core * spec.n_core,
        spec.n_clad * spec.n_clad,
    );
    let jm = specfun::bessel_j(m, u)?;
    let km = specfun::bessel_k(m, w)?;
    Ok(
        2.0 * n1s / (rho * rho) * specfun::radial_j_square_integral(m, u, rho)? / (jm * jm)
            + 2.0 * n2s / (rho * rho) * specfun::radial_k_square_integral(m, w, rho)?
                / (km * km),
    )
}

/// Pairwise reduced products of a family of modes sharing (beta, m),
/// evaluated at two times to witness time independence.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    /// products[i][j] = reduced KG product of modes i and j (at t = 0).
    pub products: Vec<Vec<Complex64>>,
    /// Largest |product| over pairs with distinct frequencies.
    pub max_cross: f64,
    /// Largest |product(t=1/omega) - product(t=0)| over all pairs.
    pub max_time_drift: f64,
}

/// Evaluate all pairwise reduced products among `modes` (which must share
/// beta and m). The product of modes with frequencies omega, omega' carries
/// the phase exp(i (omega - omega') t); it is evaluated at t = 0 and
/// t = 1/omega to verify time independence.
pub fn orthogonality_report(modes: &[ModeSolution]) -> Result<OrthogonalityReport> {
    let n = modes.len();
    let mut products = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut max_cross = 0.0_f64;
    let mut max_drift = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let total = reduced_kg_product(
                &ModeField::plain(&modes[i]),
                &ModeField::plain(&modes[j]),
            )?
            .total;
            products[i][j] = total;
            let domega = modes[i].omega() - modes[j].omega();
            if domega.abs() > 1e-9 * modes[i].omega() {
                max_cross = max_cross.max(total.norm());
            }
            let t = 1.0 / modes[i].omega();
            let at_t = total * Complex64::new(0.0, domega * t).exp();
            max_drift = max_drift.max((at_t - total).norm());
        }
    }
    Ok(OrthogonalityReport {
        products,
        max_cross,
        max_time_drift: max_drift,
    })
}
