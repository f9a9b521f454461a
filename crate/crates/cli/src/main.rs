//! gbfiber: mode diagrams, gauge-fixed mode solving, and interferometer
//! probabilities for step-index optical fibers in weak gravitational
//! fields.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

// domain guards are written as !(x > 0.0) so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod records;

use clap::{Parser, Subcommand};
use config::{InterfereConfig, OutputFormat, RunConfig};
use gbfiber_core::fiber_modes::{radial_grid, solve_modes, FiberSpec, ModeSolution};
use gbfiber_core::gravity::{
    acceleration_si_to_geometric, gravitational_phase_shift, killing_unmap,
    wavelength_nm_to_omega,
};
use gbfiber_core::interferometry::{
    single_photon_probability, time_bin_probabilities, two_photon_probability, TimeBinSpec,
};
use records::{fmt17, DiagramRow, InterfereResult, MachZehnderResult, ModeRecord, TimeBinResult};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gbfiber",
    about = "Step-index fiber modes (physical, gauge, ghost) and gravitational fiber interferometry",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; each command has its natural default.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample dispersion curves (b against V) for all requested families.
    ModeDiagram(CommonArgs),
    /// Solve and normalize every guided mode at one wavelength.
    Solve(CommonArgs),
    /// Evaluate interferometer output probabilities.
    Interfere(CommonArgs),
}

enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn numerical_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ModeDiagram(args) => run(args, cmd_mode_diagram),
        Command::Solve(args) => run(args, cmd_solve),
        Command::Interfere(args) => run(args, cmd_interfere),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

type CommandFn = fn(&RunConfig, OutputFormat) -> Result<(String, OutputFormat), CliError>;

fn run(args: &CommonArgs, command: CommandFn) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| config_err(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(config_err)?;
    let format = args
        .format
        .or(cfg.output.as_ref().and_then(|o| o.format))
        .unwrap_or(OutputFormat::Json);
    let (rendered, _) = command(&cfg, format)?;
    let out_path = args
        .out
        .clone()
        .or(cfg.output.as_ref().and_then(|o| o.path.clone().map(PathBuf::from)));
    match out_path {
        Some(path) => std::fs::write(&path, rendered)
            .map_err(|e| numerical_err(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn fiber_of(cfg: &RunConfig) -> Result<FiberSpec, CliError> {
    cfg.fiber.to_spec().map_err(CliError::Config)
}

fn cmd_mode_diagram(
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<(String, OutputFormat), CliError> {
    let section = cfg
        .mode_diagram
        .as_ref()
        .ok_or_else(|| CliError::Config("missing mode_diagram section".into()))?;
    section.validate().map_err(CliError::Config)?;
    let spec = fiber_of(cfg)?;
    let families = section.families();
    let mut rows: Vec<DiagramRow> = Vec::new();
    for i in 0..section.v_samples {
        let v = section.v_min
            + (section.v_max - section.v_min) * i as f64 / (section.v_samples - 1) as f64;
        let omega = v
            / (spec.core_radius
                * (spec.n_core * spec.n_core - spec.n_clad * spec.n_clad).sqrt());
        for &family in &families {
            for m in 0..=section.m_max {
                let roots =
                    solve_modes(&spec, omega, m, family.to_family()).map_err(numerical_err)?;
                for root in roots {
                    rows.push(DiagramRow {
                        family: root.key.family.label().to_string(),
                        m,
                        kappa: root.key.kappa,
                        v,
                        b: root.point.b,
                    });
                }
            }
        }
    }
    let rendered = match format {
        OutputFormat::Csv => {
            let mut out = String::from("family,m,kappa,V,b\r\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\r\n",
                    csv_field(&row.family),
                    row.m,
                    row.kappa,
                    fmt17(row.v),
                    fmt17(row.b)
                ));
            }
            out
        }
        OutputFormat::Json => to_json(&rows)?,
    };
    Ok((rendered, format))
}

fn mode_record(mode: &ModeSolution, wavelength_nm: f64) -> ModeRecord {
    let spec = &mode.spec;
    let grid = radial_grid(5.0 * spec.core_radius, 120);
    let cplx = |z: num_complex::Complex64| [z.re, z.im];
    let pack = |mat: &[[num_complex::Complex64; 4]; 2]| {
        [
            [cplx(mat[0][0]), cplx(mat[0][1]), cplx(mat[0][2]), cplx(mat[0][3])],
            [cplx(mat[1][0]), cplx(mat[1][1]), cplx(mat[1][2]), cplx(mat[1][3])],
        ]
    };
    let ratio = match mode.key.family {
        gbfiber_core::fiber_modes::ModeFamily::Ghost => {
            let s = mode.field_at(0.5 * spec.core_radius);
            Some(cplx(s.chi / s.a[0]))
        }
        _ => None,
    };
    // report the integral consistent with the stored normalization
    let n = mode.coeffs.norm_factor;
    let denom = 2.0 * std::f64::consts::PI * spec.core_radius * mode.key.beta.abs();
    let integral = (n / denom) * (n / denom) / (2.0 * mode.point.omega);
    ModeRecord {
        family: mode.key.family.label().to_string(),
        m: mode.key.m,
        kappa: mode.key.kappa,
        wavelength_nm,
        omega_rad_per_um: mode.point.omega,
        beta_rad_per_um: mode.key.beta,
        v: mode.point.v,
        b: mode.point.b,
        u: mode.point.u,
        w: mode.point.w,
        norm_factor: mode.coeffs.norm_factor,
        normalization_integral: integral,
        chi_residual: mode.chi_residual(&grid),
        chi_to_a_t_ratio: ratio,
        q: pack(&mode.coeffs.q),
        p: pack(&mode.coeffs.p),
    }
}

fn cmd_solve(cfg: &RunConfig, format: OutputFormat) -> Result<(String, OutputFormat), CliError> {
    let section = cfg
        .solve
        .as_ref()
        .ok_or_else(|| CliError::Config("missing solve section".into()))?;
    section.validate().map_err(CliError::Config)?;
    let spec = fiber_of(cfg)?;
    let omega = wavelength_nm_to_omega(section.wavelength_nm);
    let mut records = Vec::new();
    for &family in &section.families() {
        for &m in &section.m_values {
            let roots =
                solve_modes(&spec, omega, m, family.to_family()).map_err(numerical_err)?;
            for root in roots {
                let mode =
                    ModeSolution::assemble(&spec, root.key, root.point).map_err(numerical_err)?;
                records.push(mode_record(&mode, section.wavelength_nm));
            }
        }
    }
    let rendered = match format {
        OutputFormat::Json => to_json(&records)?,
        OutputFormat::Csv => {
            let mut out = String::from(
                "family,m,kappa,V,b,beta_rad_per_um,omega_rad_per_um,norm_factor,normalization_integral,chi_residual\r\n",
            );
            for r in &records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\r\n",
                    csv_field(&r.family),
                    r.m,
                    r.kappa,
                    fmt17(r.v),
                    fmt17(r.b),
                    fmt17(r.beta_rad_per_um),
                    fmt17(r.omega_rad_per_um),
                    fmt17(r.norm_factor),
                    fmt17(r.normalization_integral),
                    fmt17(r.chi_residual)
                ));
            }
            out
        }
    };
    Ok((rendered, format))
}

/// Effective index: supplied directly or taken from the fundamental
/// (m = 1, kappa = 1) physical mode at the given wavelength.
fn effective_index(
    spec: &FiberSpec,
    wavelength_nm: f64,
    supplied: Option<f64>,
) -> Result<f64, CliError> {
    if let Some(n) = supplied {
        if !(n > 0.0) {
            return Err(CliError::Config(format!("n_eff must be positive, got {n}")));
        }
        return Ok(n);
    }
    let omega = wavelength_nm_to_omega(wavelength_nm);
    let roots = solve_modes(spec, omega, 1, gbfiber_core::fiber_modes::ModeFamily::Physical)
        .map_err(numerical_err)?;
    let root = roots
        .first()
        .ok_or_else(|| CliError::Numerical("no guided fundamental mode at this wavelength".into()))?;
    Ok(root.key.beta / omega)
}

fn cmd_interfere(
    cfg: &RunConfig,
    format: OutputFormat,
) -> Result<(String, OutputFormat), CliError> {
    let section = cfg
        .interfere
        .as_ref()
        .ok_or_else(|| CliError::Config("missing interfere section".into()))?;
    let spec = fiber_of(cfg)?;
    let result = match section {
        InterfereConfig::MachZehnder(mz) => {
            if !(mz.wavelength_nm > 0.0 && mz.arm_length_m >= 0.0) {
                return Err(CliError::Config(
                    "wavelength and arm length must be positive".into(),
                ));
            }
            let n_eff = effective_index(&spec, mz.wavelength_nm, mz.n_eff)?;
            let omega = wavelength_nm_to_omega(mz.wavelength_nm);
            let g = acceleration_si_to_geometric(mz.g_m_per_s2);
            let dpsi = gravitational_phase_shift(
                n_eff,
                omega,
                g,
                mz.arm_length_m * 1e6,
                mz.height_separation_m * 1e6,
            );
            InterfereResult::MachZehnder(MachZehnderResult {
                layout: "mach-zehnder".into(),
                n_eff,
                phase_shift_rad: dpsi,
                single_photon_p1: single_photon_probability(dpsi),
                two_photon_p2: two_photon_probability(dpsi),
            })
        }
        InterfereConfig::TimeBin(tb) => {
            if !(tb.delay_lower_m > 0.0 && tb.delay_upper_m > 0.0) {
                return Err(CliError::Config("delay lengths must be positive".into()));
            }
            let n_eff = effective_index(&spec, tb.wavelength_nm, tb.n_eff)?;
            let omega = wavelength_nm_to_omega(tb.wavelength_nm);
            // local propagation constants from the shared Killing value
            let beta_killing = n_eff * omega;
            let beta_lower = killing_unmap(beta_killing, 0.0);
            let beta_upper = killing_unmap(beta_killing, -tb.potential_difference);
            let tb_spec = TimeBinSpec::new(
                beta_lower,
                beta_upper,
                tb.delay_lower_m * 1e6,
                tb.delay_upper_m * 1e6,
                tb.potential_difference,
            )
            .map_err(numerical_err)?;
            let (pa, pb) = time_bin_probabilities(&tb_spec);
            let phase = if tb_spec.delay_lower == tb_spec.delay_upper {
                tb_spec.beta_lower * tb_spec.delay_lower * tb_spec.delta_phi
            } else {
                tb_spec.beta_lower * tb_spec.delay_lower
                    - tb_spec.beta_upper * tb_spec.delay_upper
            };
            InterfereResult::TimeBin(TimeBinResult {
                layout: "time-bin".into(),
                n_eff,
                beta_lower_rad_per_um: beta_lower,
                beta_upper_rad_per_um: beta_upper,
                interference_phase_rad: phase,
                p_a: pa,
                p_b: pb,
            })
        }
    };
    let rendered = match format {
        OutputFormat::Json => to_json(&result)?,
        OutputFormat::Csv => {
            let mut out = String::from("key,value\r\n");
            let value = serde_json::to_value(&result).map_err(numerical_err)?;
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    let rendered_value = match v {
                        serde_json::Value::Number(n) => {
                            fmt17(n.as_f64().unwrap_or(f64::NAN))
                        }
                        serde_json::Value::String(s) => csv_field(&s),
                        other => csv_field(&other.to_string()),
                    };
                    out.push_str(&format!("{k},{rendered_value}\r\n"));
                }
            }
            out
        }
    };
    Ok((rendered, format))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(numerical_err)?;
    text.push('\n');
    Ok(text)
}

/// RFC 4180 quoting: fields containing separators, quotes, or line breaks
/// are wrapped and inner quotes doubled.
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') || raw.contains('\r') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}
