//! Mach-Zehnder and time-bin interferometer transfer relations and output
//! probabilities for single photons, photon pairs, and coherent states.
//!
//! Both beam splitters are the fixed symmetric lossless coupler
//! (1/sqrt 2) [[1, i], [i, 1]]; the gravitational influence enters only
//! through the accumulated arm phases.

use crate::error::{Error, Result};
use nalgebra::Matrix2;
use num_complex::Complex64;

type CMatrix2 = Matrix2<Complex64>;

/// Mach-Zehnder interferometer with two horizontal arms at (possibly
/// different) uniform potentials. Arm phases at the second beam splitter
/// may be supplied directly or derived from the gravitational phase-shift
/// formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziSpec {
    /// Potential of the upper arm (bookkeeping only; probabilities depend
    /// on the phases).
    pub phi_upper: f64,
    /// Potential of the lower arm.
    pub phi_lower: f64,
    /// Phase psi' accumulated along the upper arm.
    pub psi_upper: f64,
    /// Phase psi'' accumulated along the lower arm.
    pub psi_lower: f64,
}

impl MziSpec {
    pub fn from_phases(psi_upper: f64, psi_lower: f64) -> Self {
        Self {
            phi_upper: 0.0,
            phi_lower: 0.0,
            psi_upper,
            psi_lower,
        }
    }

    pub fn phase_difference(&self) -> f64 {
        self.psi_upper - self.psi_lower
    }
}

/// The symmetric lossless beam-splitter matrix (1/sqrt 2)[[1, i],[i, 1]].
pub fn beam_splitter() -> CMatrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix2::new(
        Complex64::new(s, 0.0),
        Complex64::new(0.0, s),
        Complex64::new(0.0, s),
        Complex64::new(s, 0.0),
    )
}

/// Arm-phase propagation matrix diag(e^{i psi'}, e^{i psi''}).
pub fn arm_phases(psi_upper: f64, psi_lower: f64) -> CMatrix2 {
    CMatrix2::new(
        Complex64::new(0.0, psi_upper).exp(),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, psi_lower).exp(),
    )
}

/// Creation-operator relation between input and output modes:
/// (a_in^dag, b_in^dag)^T = M (a_out^dag, b_out^dag)^T with
/// M = [[ (e^{i psi'} - e^{i psi''})/2,  i (e^{i psi'} + e^{i psi''})/2 ],
///      [ i (e^{i psi'} + e^{i psi''})/2, -(e^{i psi'} - e^{i psi''})/2 ]].
pub fn mzi_transfer(spec: &MziSpec) -> CMatrix2 {
    let eu = Complex64::new(0.0, spec.psi_upper).exp();
    let el = Complex64::new(0.0, spec.psi_lower).exp();
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    CMatrix2::new(
        half * (eu - el),
        ihalf * (eu + el),
        ihalf * (eu + el),
        -half * (eu - el),
    )
}

/// Largest entry of |M M^dag - 1|; zero for a unitary transfer matrix.
pub fn unitarity_defect(m: &CMatrix2) -> f64 {
    let product = m * m.adjoint();
    let mut defect = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            defect = defect.max((product[(i, j)] - expect).norm());
        }
    }
    defect
}

/// Transform coherent-state amplitudes through the interferometer. The
/// total mean photon number |alpha_1|^2 + |alpha_2|^2 is conserved.
pub fn coherent_transform(
    alpha_1: Complex64,
    alpha_2: Complex64,
    spec: &MziSpec,
) -> (Complex64, Complex64) {
    let m = mzi_transfer(spec);
    (
        m[(0, 0)] * alpha_1 + m[(0, 1)] * alpha_2,
        m[(1, 0)] * alpha_1 + m[(1, 1)] * alpha_2,
    )
}

/// Probability of detecting the photon in the first output mode for a
/// single-photon input: p1 = (1 - cos dpsi)/2.
pub fn single_photon_probability(delta_psi: f64) -> f64 {
    0.5 * (1.0 - delta_psi.cos())
}

/// Probability of finding both photons in the same output mode for the
/// |1,1> input: p2 = (1 - cos 2 dpsi)/2, the doubled-fringe pattern
/// p2(dpsi) = p1(2 dpsi).
pub fn two_photon_probability(delta_psi: f64) -> f64 {
    0.5 * (1.0 - (2.0 * delta_psi).cos())
}

/// Time-bin interferometer data: two unbalanced Mach-Zehnder stages at
/// different potentials, linked by a common path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBinSpec {
    /// Local propagation constant in the lower stage (rad/um).
    pub beta_lower: f64,
    /// Local propagation constant in the upper stage (rad/um).
    pub beta_upper: f64,
    /// Delay-arm length of the lower stage (um).
    pub delay_lower: f64,
    /// Delay-arm length of the upper stage (um).
    pub delay_upper: f64,
    /// Potential difference phi' - phi'' between the stages.
    pub delta_phi: f64,
}

impl TimeBinSpec {
    pub fn new(
        beta_lower: f64,
        beta_upper: f64,
        delay_lower: f64,
        delay_upper: f64,
        delta_phi: f64,
    ) -> Result<Self> {
        if !(delay_lower > 0.0 && delay_upper > 0.0) {
            return Err(Error::Domain(
                "time-bin delay lengths must be positive".into(),
            ));
        }
        Ok(Self {
            beta_lower,
            beta_upper,
            delay_lower,
            delay_upper,
            delta_phi,
        })
    }
}

/// Output probabilities (p_a, p_b) of the time-bin layout. Equal delays
/// use the closed form p_a = cos^2(beta' l' dphi / 2); unequal delays use
/// the general interference phase beta' l' - beta'' l''. The pair always
/// sums to one.
pub fn time_bin_probabilities(spec: &TimeBinSpec) -> (f64, f64) {
    let theta = if spec.delay_lower == spec.delay_upper {
        spec.beta_lower * spec.delay_lower * spec.delta_phi
    } else {
        spec.beta_lower * spec.delay_lower - spec.beta_upper * spec.delay_upper
    };
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    (c * c, s * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_arms_swap_with_phase() {
        let m = mzi_transfer(&MziSpec::from_phases(0.0, 0.0));
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(0.0, 0.0));
        assert!((m[(0, 1)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn transfer_matches_beam_splitter_factorization() {
        let spec = MziSpec::from_phases(0.37, -1.12);
        let factored = beam_splitter() * arm_phases(spec.psi_upper, spec.psi_lower)
            * beam_splitter();
        let direct = mzi_transfer(&spec);
        for i in 0..2 {
            for j in 0..2 {
                assert!((factored[(i, j)] - direct[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn beam_splitter_is_unitary() {
        assert!(unitarity_defect(&beam_splitter()) < 1e-15);
    }

    #[test]
    fn coherent_energy_conservation_and_swap_case() {
        let alpha = Complex64::new(0.8, -0.3);
        let spec = MziSpec::from_phases(0.9, 0.9);
        let (o1, o2) = coherent_transform(alpha, Complex64::new(0.0, 0.0), &spec);
        // equal phases: all light exits the second port with phase i e^{i psi}
        assert!(o1.norm() < 1e-15);
        let expect = Complex64::new(0.0, 1.0) * Complex64::new(0.0, 0.9).exp() * alpha;
        assert!((o2 - expect).norm() < 1e-15);
    }

    #[test]
    fn fringe_formulas() {
        assert_eq!(single_photon_probability(0.0), 0.0);
        assert!((single_photon_probability(std::f64::consts::PI) - 1.0).abs() < 1e-15);
        assert_eq!(two_photon_probability(0.0), 0.0);
        // p2(pi/2) = 1 while p1(pi/2) = 1/2
        let hp = std::f64::consts::FRAC_PI_2;
        assert!((two_photon_probability(hp) - 1.0).abs() < 1e-15);
        assert!((single_photon_probability(hp) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn time_bin_limits() {
        let flat = TimeBinSpec::new(5.9, 5.9, 1e6, 1e6, 0.0).unwrap();
        let (pa, pb) = time_bin_probabilities(&flat);
        assert_eq!((pa, pb), (1.0, 0.0));
        // beta' l' dphi = pi  ->  (0, 1)
        let pi_point =
            TimeBinSpec::new(5.9, 5.9, 1e6, 1e6, std::f64::consts::PI / 5.9e6).unwrap();
        let (pa, pb) = time_bin_probabilities(&pi_point);
        assert!(pa.abs() < 1e-12 && (pb - 1.0).abs() < 1e-12);
        assert!(TimeBinSpec::new(5.9, 5.9, 0.0, 1.0, 0.0).is_err());
    }
}
