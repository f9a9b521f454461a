//! Behaviour of solved modes under a uniform gravitational potential:
//! index substitution with renormalization, effective-index invariance,
//! interface conditions, and the redshift bookkeeping.

use gbfiber_core::fiber_modes::{solve_modes, FiberSpec, ModeFamily, ModeSolution};
use gbfiber_core::gravity::{
    apply_uniform_potential, curved_kg_norm, killing_remap, killing_unmap, renormalize_curved,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fundamental(spec: &FiberSpec, omega: f64) -> ModeSolution {
    let root = solve_modes(spec, omega, 1, ModeFamily::Physical).unwrap()[0];
    ModeSolution::assemble(spec, root.key, root.point).unwrap()
}

#[test]
fn zero_potential_is_identity() {
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    let same = apply_uniform_potential(&mode, 0.0).unwrap();
    assert!((same.key.beta - mode.key.beta).abs() <= 1e-12 * mode.key.beta);
    assert!(
        (same.coeffs.norm_factor - mode.coeffs.norm_factor).abs()
            <= 1e-10 * mode.coeffs.norm_factor
    );
    assert_eq!(same.spec, spec);
}

#[test]
fn physical_effective_index_is_invariant() {
    // beta_ph / omega_ph equals the flat-space effective index at the
    // proper normalized frequency, within the weak-guidance budget
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    let phi = 1e-6;
    let shifted = apply_uniform_potential(&mode, phi).unwrap();
    // proper frequency and propagation constant of the shifted mode
    let omega_ph = (1.0 - phi) * omega;
    let n_bar_ph = shifted.key.beta / omega_ph;
    // flat-space effective index at the same proper frequency
    let reference = fundamental(&spec, omega_ph);
    let n_bar_flat = reference.key.beta / omega_ph;
    let n1s = spec.n_core * spec.n_core;
    let n2s = spec.n_clad * spec.n_clad;
    let budget = 10.0 * phi * (n1s - n2s) / (n_bar_flat * n_bar_flat);
    assert!(
        (n_bar_ph - n_bar_flat).abs() <= budget,
        "effective index moved by {} (budget {budget})",
        (n_bar_ph - n_bar_flat).abs()
    );
}

#[test]
fn interface_conditions_survive_the_substitution() {
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    let shifted = apply_uniform_potential(&mode, 5e-4).unwrap();
    let rho = spec.core_radius;
    let core = shifted.field_at(rho);
    let clad = shifted.field_at(rho * (1.0 + 1e-15));
    let scale = core.a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in 0..4 {
        assert!((core.a[c] - clad.a[c]).norm() <= 1e-8 * scale);
    }
}

#[test]
fn curved_norm_follows_the_momentum_measure() {
    // with N -> (1 + phi) N the curved-measure norm is 1/(1 + phi); at
    // phi = 1e-6 that is within the 1e-6 contract of unity
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    let phi = 1e-6;
    let shifted = apply_uniform_potential(&mode, phi).unwrap();
    let norm = curved_kg_norm(&shifted, phi).unwrap();
    assert!(
        (norm.re - 1.0).abs() <= 1e-6 && norm.im.abs() <= 1e-8,
        "curved norm {norm}"
    );
}

#[test]
fn renormalized_modes_have_exact_unit_norm_for_random_potentials() {
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let phi: f64 = rng.random_range(-1e-4..1e-4);
        let shifted = apply_uniform_potential(&mode, phi).unwrap();
        let fixed = renormalize_curved(&shifted, phi).unwrap();
        let norm = curved_kg_norm(&fixed, phi).unwrap();
        assert!(
            (norm.re - 1.0).abs() <= 1e-9,
            "phi={phi}: renormalized norm {norm}"
        );
    }
}

#[test]
fn gauge_family_survives_the_substitution() {
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let root = solve_modes(&spec, omega, 0, ModeFamily::Gauge).unwrap()[0];
    let gauge = ModeSolution::assemble(&spec, root.key, root.point).unwrap();
    let shifted = apply_uniform_potential(&gauge, 1e-5).unwrap();
    assert_eq!(shifted.key.family, ModeFamily::Gauge);
    for row in &shifted.coeffs.p {
        for entry in row {
            assert_eq!(*entry, num_complex::Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn killing_remap_connects_time_bin_potentials() {
    // beta' - beta'' ~ beta' (phi'' - phi') through the shared Killing
    // propagation constant (first order in the potentials)
    let beta_killing = 5.95;
    let (phi_lo, phi_hi) = (-4e-10, 3e-10);
    let beta_lo = killing_unmap(beta_killing, phi_lo);
    let beta_hi = killing_unmap(beta_killing, phi_hi);
    let predicted = beta_lo * (phi_hi - phi_lo);
    // the comparison is first order in phi and the difference of two
    // nearly equal betas costs one ulp of beta itself
    let tolerance = (phi_lo.abs() + phi_hi.abs()) * predicted.abs() + 4.0 * f64::EPSILON * beta_killing;
    assert!(
        ((beta_lo - beta_hi) - predicted).abs() <= tolerance,
        "difference {} vs predicted {predicted}",
        beta_lo - beta_hi
    );
    // round trip through remap
    assert!((killing_remap(beta_lo, phi_lo) - killing_remap(beta_hi, phi_hi)).abs() <= 1e-15 * beta_killing);
}

#[test]
fn weak_field_guards() {
    let spec = FiberSpec::smf28_like();
    let omega = 2.0 * std::f64::consts::PI / 1.55;
    let mode = fundamental(&spec, omega);
    assert!(apply_uniform_potential(&mode, 2e-3).is_err());
}
