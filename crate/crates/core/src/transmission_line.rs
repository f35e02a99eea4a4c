//! Resonant modes of the open-ended strip and their lumped equivalents.
//!
//! The strip of length Lambda with both ends open carries standing waves
//! with wavenumber k_n = pi n / Lambda. Each mode behaves as a series LC
//! with L_n = L_1/n, C_n = C_1/n, and couples to the loop through a mutual
//! inductance that falls off the same way, M_n = M_1/n, because the mode
//! current changes sign along the strip and the overlapping segments cancel.

use crate::error::SimError;
use crate::params::StriplineParams;
use std::f64::consts::PI;

/// One standing-wave mode of the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Mode number, 1-based.
    pub index: u32,
    /// Wavenumber k_n = pi n / Lambda, 1/m.
    pub wavenumber: f64,
    /// Resonant frequency omega_n = k_n (l c)^(-1/2), rad/s.
    pub frequency: f64,
    /// Lumped inductance L_n = L_1/n, henry.
    pub inductance: f64,
    /// Lumped capacitance C_n = C_1/n, farad.
    pub capacitance: f64,
    /// Mutual inductance to the loop M_n = M_1/n, henry.
    pub mutual: f64,
}

/// Lumped description of the n-th mode.
pub fn mode(line: &StriplineParams, n: u32) -> Result<Mode, SimError> {
    line.validate()?;
    if n == 0 {
        return Err(SimError::InvalidArgument(
            "mode index must be at least 1".into(),
        ));
    }
    let nf = f64::from(n);
    let k = PI * nf / line.length;
    let omega = k / (line.inductance_per_length * line.capacitance_per_length).sqrt();
    Ok(Mode {
        index: n,
        wavenumber: k,
        frequency: omega,
        inductance: line.l1() / nf,
        capacitance: line.c1() / nf,
        mutual: line.fundamental_mutual / nf,
    })
}

fn strip_length(mode: &Mode) -> f64 {
    PI * f64::from(mode.index) / mode.wavenumber
}

fn check_position(mode: &Mode, x: f64) -> Result<(), SimError> {
    let lambda = strip_length(mode);
    if x.is_finite() && x >= 0.0 && x <= lambda * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(SimError::InvalidArgument(format!(
            "position {x} m is outside the strip [0, {lambda} m]"
        )))
    }
}

/// Current standing-wave amplitude sin(n pi x / Lambda) at position x.
pub fn current_profile(mode: &Mode, x: f64) -> Result<f64, SimError> {
    check_position(mode, x)?;
    Ok((mode.wavenumber * x).sin())
}

/// Voltage standing-wave amplitude cos(n pi x / Lambda) at position x.
pub fn voltage_profile(mode: &Mode, x: f64) -> Result<f64, SimError> {
    check_position(mode, x)?;
    Ok((mode.wavenumber * x).cos())
}

/// Effective strip-to-loop mutual inductance at frequency omega.
///
/// Above the fundamental this interpolates the mode values as
/// M(omega) = M_1 omega_1 / omega. Below the fundamental the interpolation
/// would exceed M_1, which has no physical support; the value is clamped
/// to M_1 there (the fundamental is the maximal-coupling flux geometry).
pub fn mutual_at(line: &StriplineParams, omega: f64) -> Result<f64, SimError> {
    line.validate()?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(SimError::InvalidArgument(format!(
            "frequency must be positive, got {omega} rad/s"
        )));
    }
    let omega1 = line.omega1();
    if omega <= omega1 {
        Ok(line.fundamental_mutual)
    } else {
        Ok(line.fundamental_mutual * (omega1 / omega))
    }
}

/// Effective lumped (L, C) of the strip at frequency omega, interpolated
/// and clamped exactly like [`mutual_at`].
pub fn effective_lc_at(line: &StriplineParams, omega: f64) -> Result<(f64, f64), SimError> {
    line.validate()?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(SimError::InvalidArgument(format!(
            "frequency must be positive, got {omega} rad/s"
        )));
    }
    let omega1 = line.omega1();
    let scale = if omega <= omega1 { 1.0 } else { omega1 / omega };
    Ok((line.l1() * scale, line.c1() * scale))
}
