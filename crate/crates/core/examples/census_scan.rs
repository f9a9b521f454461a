use gbfiber_core::fiber_modes::{solve_modes, FiberSpec, ModeFamily};

fn main() {
    let spec = FiberSpec::smf28_like();
    let omega_of_v = |v: f64| {
        v / (spec.core_radius * (spec.n_core * spec.n_core - spec.n_clad * spec.n_clad).sqrt())
    };
    for v in [2.074, 2.3, 2.41, 2.5, 3.0, 3.5, 3.9, 4.5, 6.0] {
        let om = omega_of_v(v);
        print!("V={v:5.3}  physical:");
        for m in 0..=3 {
            let n = solve_modes(&spec, om, m, ModeFamily::Physical).unwrap().len();
            print!(" m{m}:{n}");
        }
        print!("   gauge:");
        for m in 0..=3 {
            let n = solve_modes(&spec, om, m, ModeFamily::Gauge).unwrap().len();
            print!(" m{m}:{n}");
        }
        println!();
    }
}
