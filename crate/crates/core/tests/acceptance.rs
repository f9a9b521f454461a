//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//! Tolerances are pinned in the assertions.

use gbfiber_core::fiber_modes::{
    dispersion_d1, dispersion_d2, interface_matrix, radial_grid, solve_modes, solve_modes_at_beta,
    FiberSpec, ModeFamily, ModeSolution,
};
use gbfiber_core::gravity::{
    acceleration_si_to_geometric, gravitational_phase_shift, ppn_reduce, wavelength_nm_to_omega,
    xi_jacobian, PotentialContext, PpnMetric,
};
use gbfiber_core::interferometry::{
    mzi_transfer, single_photon_probability, time_bin_probabilities, two_photon_probability,
    MziSpec, TimeBinSpec,
};
use gbfiber_core::klein_gordon::{momentum_kg_product, orthogonality_report, ModeField};
use gbfiber_core::quantum_states::{
    BinSet, ExcitationKind, KreinState, ModeBin, Occupation, StateClass, WavepacketCreator,
};
use gbfiber_core::fiber_modes::ModeKey;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

fn fig2() -> FiberSpec {
    FiberSpec::smf28_like()
}

fn omega_of_v(spec: &FiberSpec, v: f64) -> f64 {
    v / (spec.core_radius * (spec.n_core * spec.n_core - spec.n_clad * spec.n_clad).sqrt())
}

const V_1550: f64 = 2.073_620_741_896_067;

#[test]
fn criterion_1_determinant_factorization() {
    let start = Instant::now();
    let spec = fig2();
    let mut rng = ChaCha8Rng::seed_from_u64(314159);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let m: i32 = rng.random_range(0..=3);
        let b: f64 = rng.random_range(0.05..0.95);
        let v: f64 = rng.random_range(0.5..10.0);
        let omega = omega_of_v(&spec, v);
        let beta = spec.n_bar(b) * omega;
        let det = interface_matrix(&spec, m, omega, beta).unwrap().determinant();
        let d1 = dispersion_d1(&spec, m, omega, beta).unwrap();
        let d2 = dispersion_d2(&spec, m, omega, beta).unwrap();
        let expect = Complex64::new(0.0, 1.0) * d1 * d2 * d2;
        let rel = (det - expect).norm() / det.norm().max(expect.norm());
        worst = worst.max(rel);
        assert!(rel <= 1e-8, "m={m}, b={b}, V={v}: relative error {rel:.3e}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 (determinant factorization, 100 draws, worst {worst:.2e}, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_2_mode_census() {
    let start = Instant::now();
    let spec = fig2();
    let omega = omega_of_v(&spec, V_1550);
    // V derived from rho = 4.1 um, lambda = 1550 nm: ~2.074
    assert!((V_1550 - 2.074).abs() < 5e-4);
    let mut physical = Vec::new();
    let mut gauge = Vec::new();
    let mut ghost = Vec::new();
    for m in 0..=3 {
        for root in solve_modes(&spec, omega, m, ModeFamily::Physical).unwrap() {
            physical.push((m, root.key.kappa));
        }
        for root in solve_modes(&spec, omega, m, ModeFamily::Gauge).unwrap() {
            gauge.push((m, root.key.kappa));
        }
        for root in solve_modes(&spec, omega, m, ModeFamily::Ghost).unwrap() {
            ghost.push((m, root.key.kappa));
        }
    }
    assert_eq!(physical, vec![(1, 1)], "physical census {physical:?}");
    assert_eq!(gauge, vec![(0, 1)], "gauge census {gauge:?}");
    assert_eq!(ghost, vec![(0, 1)], "ghost census {ghost:?}");
    // a second physical branch appears between V = 2.3 and V = 2.5
    let count = |v: f64| -> usize {
        let om = omega_of_v(&spec, v);
        (0..=3)
            .map(|m| solve_modes(&spec, om, m, ModeFamily::Physical).unwrap().len())
            .sum()
    };
    let at_23 = count(2.3);
    let at_25 = count(2.5);
    assert_eq!(at_23, 1);
    assert!(at_25 >= 2, "no second branch by V = 2.5: {at_25}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 (mode census: single physical m=1 and gauge/ghost pair m=0 at V=2.074, \
         second branch in (2.3, 2.5), {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_3_gauge_condition_residuals() {
    let spec = fig2();
    let grid = radial_grid(5.0 * spec.core_radius, 120);
    let mut physical_worst = 0.0_f64;
    let mut ghost_worst = 0.0_f64;
    let mut n_modes = 0;
    for i in 0..50 {
        let v = 0.3 + (6.0 - 0.3) * i as f64 / 49.0;
        let omega = omega_of_v(&spec, v);
        for m in 0..=2 {
            for root in solve_modes(&spec, omega, m, ModeFamily::Physical).unwrap() {
                let mode = ModeSolution::assemble(&spec, root.key, root.point).unwrap();
                let res = mode.chi_residual(&grid);
                physical_worst = physical_worst.max(res);
                assert!(res <= 1e-8, "V={v}, m={m}: physical chi residual {res:.3e}");
                n_modes += 1;
            }
            for root in solve_modes(&spec, omega, m, ModeFamily::Ghost).unwrap() {
                let mode = ModeSolution::assemble(&spec, root.key, root.point).unwrap();
                let factor = Complex64::new(0.0, 2.0 * root.key.beta * root.key.beta / omega);
                for &r in &grid {
                    let s = mode.field_at(r);
                    let expect = factor * s.a[0];
                    let denom = expect.norm().max(1e-300);
                    let rel = (s.chi - expect).norm() / denom;
                    if expect.norm() > 1e-280 {
                        ghost_worst = ghost_worst.max(rel);
                        assert!(rel <= 1e-8, "V={v}, m={m}, r={r}: ghost chi {rel:.3e}");
                    }
                }
            }
        }
    }
    assert!(n_modes >= 50);
    println!(
        "ACCEPTANCE 3 (gauge condition: physical worst {physical_worst:.2e}, \
         ghost relation worst {ghost_worst:.2e} over 50-point V grid): PASS"
    );
}

#[test]
fn criterion_4_normalization_and_gram() {
    let spec = fig2();
    // twenty modes: quadrature of the full product against the analytic
    // normalization (unit product certifies I1/I2 at the same relative
    // accuracy, since N is built from the analytic integrals)
    let mut checked = 0;
    let mut worst = 0.0_f64;
    'outer: for &v in &[1.6, V_1550, 3.1, 4.2, 5.0, 6.0, 7.3] {
        let omega = omega_of_v(&spec, v);
        for m in 0..=2 {
            for family in [ModeFamily::Physical, ModeFamily::Gauge] {
                for root in solve_modes(&spec, omega, m, family).unwrap() {
                    let mode = ModeSolution::assemble(&spec, root.key, root.point).unwrap();
                    let dev = match family {
                        ModeFamily::Physical => {
                            let f = ModeField::plain(&mode);
                            (momentum_kg_product(&f, &f).unwrap()
                                - Complex64::new(1.0, 0.0))
                            .norm()
                        }
                        _ => {
                            // gauge modes certify I2 through the pairing
                            // with their ghost partner at the same root
                            let hkey = ModeKey {
                                family: ModeFamily::Ghost,
                                ..root.key
                            };
                            let ghost =
                                ModeSolution::assemble(&spec, hkey, root.point).unwrap();
                            let g = ModeField::plain(&mode);
                            let h = ModeField::plain(&ghost);
                            (momentum_kg_product(&g, &h).unwrap()
                                - Complex64::new(1.0, 0.0))
                            .norm()
                        }
                    };
                    worst = worst.max(dev);
                    assert!(dev <= 1e-8, "V={v}, m={m}, {family:?}: deviation {dev:.3e}");
                    checked += 1;
                    if checked >= 20 {
                        break 'outer;
                    }
                }
            }
        }
    }
    assert!(checked >= 20);

    // normalized Gram over (physical, gauge, ghost) sharing (beta, m)
    let omega6 = omega_of_v(&spec, 6.0);
    let seed = solve_modes(&spec, omega6, 1, ModeFamily::Physical).unwrap()[0];
    let beta = seed.key.beta;
    let mut trio = Vec::new();
    for family in [ModeFamily::Physical, ModeFamily::Gauge, ModeFamily::Ghost] {
        let root = solve_modes_at_beta(&spec, beta, 0, family).unwrap()[0];
        trio.push(ModeSolution::assemble(&spec, root.key, root.point).unwrap());
    }
    let expect = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
    let mut gram_worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let p = gbfiber_core::klein_gordon::reduced_kg_product(
                &ModeField::plain(&trio[i]),
                &ModeField::plain(&trio[j]),
            )
            .unwrap();
            let dev = (p.total - Complex64::new(expect[i][j], 0.0)).norm();
            gram_worst = gram_worst.max(dev);
            assert!(dev <= 1e-6, "gram ({i},{j}) = {} vs {}", p.total, expect[i][j]);
        }
    }
    println!(
        "ACCEPTANCE 4 (normalization quadrature on {checked} modes, worst {worst:.2e}; \
         KG Gram to {gram_worst:.2e}): PASS"
    );
}

#[test]
fn criterion_5_orthogonality_at_v6() {
    let spec = fig2();
    let omega = omega_of_v(&spec, 6.0);
    let seed = solve_modes(&spec, omega, 1, ModeFamily::Physical).unwrap()[0];
    let beta = seed.key.beta;
    let mut modes = Vec::new();
    for m in [0, 1] {
        for family in [ModeFamily::Physical, ModeFamily::Gauge, ModeFamily::Ghost] {
            for root in solve_modes_at_beta(&spec, beta, m, family).unwrap() {
                modes.push(ModeSolution::assemble(&spec, root.key, root.point).unwrap());
            }
        }
        let set: Vec<ModeSolution> = modes
            .iter()
            .filter(|md| md.key.m == m)
            .cloned()
            .collect();
        assert!(set.len() >= 3, "m={m}: only {} modes", set.len());
        let report = orthogonality_report(&set).unwrap();
        assert!(
            report.max_cross <= 1e-6,
            "m={m}: cross product {:.3e}",
            report.max_cross
        );
        assert!(
            report.max_time_drift <= 1e-10,
            "m={m}: time drift {:.3e}",
            report.max_time_drift
        );
        modes.clear();
    }
    println!("ACCEPTANCE 5 (orthogonality and time independence at V=6): PASS");
}

#[test]
fn criterion_6_krein_sector() {
    let key = ModeKey {
        family: ModeFamily::Physical,
        beta: 5.9,
        m: 1,
        kappa: 1,
    };
    let bins = BinSet::new(vec![
        ModeBin {
            key,
            beta_center: 5.9,
            width: 0.5,
        },
        ModeBin {
            key,
            beta_center: 6.5,
            width: 0.25,
        },
    ])
    .unwrap();
    let vac = KreinState::vacuum(bins.clone());
    // classification examples
    assert_eq!(vac.gupta_bleuler_classify().unwrap(), StateClass::Physical);
    let a = vac.create(ExcitationKind::Physical, 0).unwrap();
    assert_eq!(a.gupta_bleuler_classify().unwrap(), StateClass::Physical);
    let b = vac.create(ExcitationKind::Gauge, 0).unwrap();
    assert_eq!(b.gupta_bleuler_classify().unwrap(), StateClass::Gauge);
    let c = vac.create(ExcitationKind::Ghost, 0).unwrap();
    assert_eq!(c.gupta_bleuler_classify().unwrap(), StateClass::Ghost);
    // indefiniteness witness: (b+ - c+)|0> has negative pseudo-norm
    let witness = b.add(&c.scaled(Complex64::new(-1.0, 0.0))).unwrap();
    let wnorm = witness.pseudo_norm();
    assert!(wnorm < 0.0, "witness norm {wnorm}");
    assert!((wnorm + 2.0 / 0.5).abs() <= 1e-12);
    // 1000 random a/b-built states satisfy the condition with
    // non-negative pseudo-norm
    let mut rng = ChaCha8Rng::seed_from_u64(271828);
    for _ in 0..1000 {
        let mut state = KreinState::zero(bins.clone());
        for _ in 0..rng.random_range(1..=3) {
            let mut term = vac.clone();
            for _ in 0..rng.random_range(0..=4u32) {
                let kind = if rng.random_bool(0.5) {
                    ExcitationKind::Physical
                } else {
                    ExcitationKind::Gauge
                };
                term = term.create(kind, rng.random_range(0..2)).unwrap();
            }
            let coeff =
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            state = state.add(&term.scaled(coeff)).unwrap();
        }
        let class = state.gupta_bleuler_classify().expect("negative-norm GB state");
        assert_ne!(class, StateClass::Ghost);
        assert!(state.pseudo_norm() >= -1e-12);
    }
    println!("ACCEPTANCE 6 (Krein sector classification and positivity): PASS");
}

#[test]
fn criterion_7_interferometry() {
    // fringe doubling identity, exactly, over 1000 phases
    for i in 0..1000 {
        let dpsi = -6.5 + 13.0 * i as f64 / 999.0;
        assert_eq!(two_photon_probability(dpsi), single_photon_probability(2.0 * dpsi));
    }
    // end-to-end Fock simulation against the closed forms
    let key = ModeKey {
        family: ModeFamily::Physical,
        beta: 5.9,
        m: 1,
        kappa: 1,
    };
    let bins: Arc<BinSet> = BinSet::new(vec![
        ModeBin {
            key,
            beta_center: 5.9,
            width: 1.0,
        },
        ModeBin {
            key,
            beta_center: 7.0,
            width: 1.0,
        },
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1618);
    for _ in 0..60 {
        let spec = MziSpec::from_phases(
            rng.random_range(-3.1..3.1),
            rng.random_range(-3.1..3.1),
        );
        let m = mzi_transfer(&spec);
        let a_in = WavepacketCreator::from_coefficients(
            ExcitationKind::Physical,
            vec![(0, m[(0, 0)]), (1, m[(0, 1)])],
        );
        let b_in = WavepacketCreator::from_coefficients(
            ExcitationKind::Physical,
            vec![(0, m[(1, 0)]), (1, m[(1, 1)])],
        );
        let vac = KreinState::vacuum(bins.clone());
        let one = a_in.create(&vac).unwrap();
        let occ10 = Occupation::from_counts(vec![(0, ExcitationKind::Physical, 1)]);
        let p1 = one.amplitude(&occ10).norm_sqr();
        assert!((p1 - single_photon_probability(spec.phase_difference())).abs() <= 1e-12);
        let pair = b_in.create(&one).unwrap();
        let occ20 = Occupation::from_counts(vec![(0, ExcitationKind::Physical, 2)]);
        let occ02 = Occupation::from_counts(vec![(1, ExcitationKind::Physical, 2)]);
        let p2 = pair.amplitude(&occ20).norm_sqr() + pair.amplitude(&occ02).norm_sqr();
        assert!((p2 - two_photon_probability(spec.phase_difference())).abs() <= 1e-12);
    }
    // time-bin partition
    let tb = TimeBinSpec::new(5.9, 5.9, 1e9, 1e9, 3.3e-10).unwrap();
    let (pa, pb) = time_bin_probabilities(&tb);
    assert!((pa + pb - 1.0).abs() <= 1e-12);
    // desk-scale gravitational phase against an independent SI-unit
    // hand conversion: dpsi = n omega_SI (g/c^2) L dz with everything in
    // metres
    let n_bar = 1.468;
    let omega = wavelength_nm_to_omega(1550.0);
    let g_geo = acceleration_si_to_geometric(9.81);
    let dpsi = gravitational_phase_shift(n_bar, omega, g_geo, 1e11, 1e6);
    let c = 299_792_458.0_f64;
    let hand = -n_bar * (2.0 * std::f64::consts::PI / 1550e-9) * (9.81 / (c * c)) * 1e5 * 1.0;
    assert!(
        (dpsi - hand).abs() <= 1e-10 * hand.abs(),
        "module {dpsi} vs hand conversion {hand}"
    );
    assert!((dpsi.abs() - 6.5e-5).abs() < 1e-6);
    println!(
        "ACCEPTANCE 7 (interferometry: fringe doubling, Fock vs closed form, \
         time-bin partition, desk-scale phase {dpsi:.4e} rad): PASS"
    );
}

#[test]
#[allow(clippy::needless_range_loop)]
fn criterion_8_ppn_reduction() {
    // symmetrized-derivative identity of xi on a grid, 1e-12
    for &p in &[
        [0.5, 0.5, 0.5],
        [1.0, -2.0, 3.0],
        [-4.0, 0.1, -0.7],
        [10.0, 20.0, -30.0],
    ] {
        let grad = xi_jacobian(p);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 * p[2] } else { 0.0 };
                assert!(
                    (grad[j][i] + grad[i][j] - expect).abs() <= 1e-12 * (1.0 + expect.abs())
                );
            }
        }
    }
    // transformed metric residual obeys the quadratic bound across three
    // dyadic acceleration levels
    let point = [3e5, -2e5, 7e5];
    let mut prev: Option<f64> = None;
    for k in 0..3 {
        let g = 2e-22 / f64::powi(2.0, k);
        let metric = PpnMetric::general_relativity(PotentialContext::new(7e-10, g).unwrap());
        let r = ppn_reduce(&metric, point).unwrap();
        assert!(r.residual <= r.bound, "residual {} > bound {}", r.residual, r.bound);
        if let Some(p) = prev {
            // the g^2 term of the bound quarters exactly
            let term_prev = p;
            let term_now = 10.0 * g * g * (point[0] * point[0] + point[1] * point[1] + point[2] * point[2]);
            assert!((term_prev / term_now - 4.0).abs() <= 1e-12 * 4.0);
        }
        prev = Some(10.0 * g * g * (point[0] * point[0] + point[1] * point[1] + point[2] * point[2]));
    }
    println!("ACCEPTANCE 8 (PPN reduction: xi identity and quadratic bound): PASS");
}
