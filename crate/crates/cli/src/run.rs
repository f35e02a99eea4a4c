//! Subcommand implementations: each builds the data table for one run.
//!
//! Sweeps fan out over the worker pool; every point is an independent pure
//! computation and the results are merged back in grid order, so the bytes
//! emitted do not depend on the worker count.

use crate::config::RunConfig;
use crate::output::{Cell, Table};
use rayon::prelude::*;
use squidsim_core::gain_analysis::{
    gain_sweep, renormalized_loop_inductance, screening_ratio, validate_linear_response,
};
use squidsim_core::input_circuit::{forward_impedance, validity_warn};
use squidsim_core::squid_dynamics::{run_to_steady, transfer_functions};
use squidsim_core::transmission_line::mode;
use squidsim_core::{SimError, StriplineParams};

pub const MODES_COLUMNS: &[&str] = &[
    "n",
    "wavenumber_per_m",
    "omega_rad_s",
    "inductance_h",
    "capacitance_f",
    "mutual_h",
];
pub const IMPEDANCE_COLUMNS: &[&str] =
    &["omega_rad_s", "re_z_ohm", "im_z_ohm", "abs_z_ohm", "warn_flag"];
pub const IV_COLUMNS: &[&str] = &[
    "bias_current_a",
    "mean_voltage_v",
    "circulating_current_a",
    "josephson_omega_rad_s",
    "converged",
];
pub const TRANSFER_COLUMNS: &[&str] = &[
    "flux_wb",
    "v_phi_v_per_wb",
    "j_phi_a_per_wb",
    "mean_voltage_v",
    "josephson_omega_rad_s",
];
pub const GAIN_COLUMNS: &[&str] = &[
    "omega_rad_s",
    "re_gain",
    "im_gain",
    "abs_gain",
    "re_z",
    "im_z",
    "abs_z_loaded",
    "screening_ratio",
    "warn_flag",
];
pub const SCREENING_COLUMNS: &[&str] = &[
    "mean_voltage_v",
    "josephson_omega_rad_s",
    "omega1_rad_s",
    "screening_ratio",
];
pub const VALIDATE_COLUMNS: &[&str] = &[
    "omega_rad_s",
    "static_abs_gain",
    "dynamic_abs_gain",
    "rel_deviation",
];

fn below_fundamental_note(line: &StriplineParams, freqs: &[f64]) {
    let omega1 = line.omega1();
    let n = freqs.iter().filter(|&&w| w < omega1).count();
    if n > 0 {
        eprintln!(
            "note: {n} sweep points lie below the fundamental omega_1 = {omega1:.6e} rad/s; \
             the lumped reduction is extrapolated there and the coupling is clamped to M_1"
        );
    }
}

pub fn modes(cfg: &RunConfig, count: u32) -> Result<Table, SimError> {
    if count == 0 {
        return Err(SimError::InvalidArgument(
            "--count must be at least 1".into(),
        ));
    }
    let rows = (1..=count)
        .map(|n| {
            let m = mode(&cfg.line, n)?;
            Ok(vec![
                Cell::U(u64::from(m.index)),
                Cell::F(m.wavenumber),
                Cell::F(m.frequency),
                Cell::F(m.inductance),
                Cell::F(m.capacitance),
                Cell::F(m.mutual),
            ])
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(Table {
        columns: MODES_COLUMNS,
        rows,
    })
}

pub fn impedance(cfg: &RunConfig) -> Result<Table, SimError> {
    let freqs = cfg.frequencies();
    let rows = freqs
        .par_iter()
        .map(|&omega| {
            let z = forward_impedance(&cfg.line, &cfg.input, omega)?;
            Ok(vec![
                Cell::F(omega),
                Cell::F(z.re),
                Cell::F(z.im),
                Cell::F(z.norm()),
                Cell::U(u64::from(validity_warn(&cfg.line, omega))),
            ])
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    below_fundamental_note(&cfg.line, &freqs);
    Ok(Table {
        columns: IMPEDANCE_COLUMNS,
        rows,
    })
}

pub fn iv(
    cfg: &RunConfig,
    min_current: Option<f64>,
    max_current: Option<f64>,
    points: u32,
) -> Result<Table, SimError> {
    if points < 2 {
        return Err(SimError::InvalidArgument(
            "--points must be at least 2".into(),
        ));
    }
    let lo = min_current.unwrap_or(0.0);
    let hi = max_current.unwrap_or(3.0 * cfg.squid.critical_current);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(SimError::InvalidArgument(format!(
            "current range must satisfy min < max, got [{lo}, {hi}]"
        )));
    }
    let currents: Vec<f64> = (0..points)
        .map(|k| lo + (hi - lo) * f64::from(k) / f64::from(points - 1))
        .collect();
    let rows = currents
        .par_iter()
        .map(|&bias| {
            let op = run_to_steady(&cfg.squid.with_bias(bias), &cfg.sim)?;
            Ok(vec![
                Cell::F(bias),
                Cell::F(op.mean_voltage),
                Cell::F(op.circulating_current),
                Cell::F(op.josephson_frequency),
                Cell::U(u64::from(op.converged)),
            ])
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(Table {
        columns: IV_COLUMNS,
        rows,
    })
}

pub fn transfer(cfg: &RunConfig) -> Result<Table, SimError> {
    let op = run_to_steady(&cfg.squid, &cfg.sim)?;
    let tf = transfer_functions(&cfg.squid, &cfg.sim)?;
    Ok(Table {
        columns: TRANSFER_COLUMNS,
        rows: vec![vec![
            Cell::F(cfg.squid.external_flux),
            Cell::F(tf.v_phi),
            Cell::F(tf.j_phi),
            Cell::F(op.mean_voltage),
            Cell::F(op.josephson_frequency),
        ]],
    })
}

pub fn gain(cfg: &RunConfig, renormalized: bool) -> Result<Table, SimError> {
    let freqs = cfg.frequencies();
    let squid = if renormalized {
        let reduced = renormalized_loop_inductance(&cfg.squid, &cfg.line)?;
        let mut s = cfg.squid;
        s.loop_inductance = reduced;
        s
    } else {
        cfg.squid
    };
    let sweep = gain_sweep(&squid, &cfg.line, &cfg.input, &cfg.sim, &freqs)?;
    if renormalized {
        // Comparison mode: rows below use the reduced inductance; report
        // the bare-device derivatives next to them for the diff.
        let bare = transfer_functions(&cfg.squid, &cfg.sim)?;
        let alpha2 = 1.0 - squid.loop_inductance / cfg.squid.loop_inductance;
        eprintln!(
            "renormalized comparison (external convention, not used by the gain contract): \
             alpha^2 = {alpha2:.6e}, L_J' = {:.6e} H; \
             bare V_Phi = {:.6e} V/Wb, J_Phi = {:.6e} A/Wb; \
             renormalized V_Phi = {:.6e} V/Wb, J_Phi = {:.6e} A/Wb",
            squid.loop_inductance, bare.v_phi, bare.j_phi, sweep.transfer.v_phi, sweep.transfer.j_phi
        );
    }
    below_fundamental_note(&cfg.line, &freqs);
    let rows = sweep
        .points
        .iter()
        .map(|p| {
            vec![
                Cell::F(p.frequency),
                Cell::F(p.gain.re),
                Cell::F(p.gain.im),
                Cell::F(p.gain.norm()),
                Cell::F(p.z.re),
                Cell::F(p.z.im),
                Cell::F(p.z_loaded.norm()),
                Cell::F(p.screening_ratio),
                Cell::U(u64::from(validity_warn(&cfg.line, p.frequency))),
            ]
        })
        .collect();
    Ok(Table {
        columns: GAIN_COLUMNS,
        rows,
    })
}

pub fn screening(cfg: &RunConfig) -> Result<Table, SimError> {
    let op = run_to_steady(&cfg.squid, &cfg.sim)?;
    let ratio = screening_ratio(&op, &cfg.line)?;
    let omega1 = cfg.line.omega1();
    if op.josephson_frequency.abs() < omega1 {
        eprintln!(
            "note: omega_J = {:.6e} rad/s is below the fundamental omega_1 = {omega1:.6e} rad/s; \
             screening ratio clamped to 1",
            op.josephson_frequency.abs()
        );
    }
    Ok(Table {
        columns: SCREENING_COLUMNS,
        rows: vec![vec![
            Cell::F(op.mean_voltage),
            Cell::F(op.josephson_frequency),
            Cell::F(omega1),
            Cell::F(ratio),
        ]],
    })
}

pub fn validate(cfg: &RunConfig, omega: Option<f64>) -> Result<Table, SimError> {
    let omega = match omega {
        Some(w) => w,
        None => {
            let op = run_to_steady(&cfg.squid, &cfg.sim)?;
            if op.josephson_frequency == 0.0 {
                return Err(SimError::ZeroVoltage);
            }
            op.josephson_frequency.abs() / 100.0
        }
    };
    let report = validate_linear_response(&cfg.squid, &cfg.line, &cfg.input, &cfg.sim, omega)?;
    Ok(Table {
        columns: VALIDATE_COLUMNS,
        rows: vec![vec![
            Cell::F(report.frequency),
            Cell::F(report.static_abs_gain),
            Cell::F(report.dynamic_abs_gain),
            Cell::F(report.rel_deviation),
        ]],
    })
}

/// Stderr warning for the regime where dc characteristics may depend on
/// the initial conditions.
pub fn hysteresis_warning(cfg: &RunConfig) {
    let beta_c = cfg.squid.beta_c();
    if beta_c > 1.0 {
        eprintln!(
            "warning: beta_c = {beta_c:.3} exceeds 1 (hysteretic regime); reported \
             characteristics depend on the fixed initial state delta_1 = delta_2 = 0"
        );
    }
}
