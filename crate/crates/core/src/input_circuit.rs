//! Input network seen from the drive: the strip near its fundamental,
//! reduced to lumped L_1 and C_1, in series with the coupling capacitor
//! C_i, loaded by the shunt R and fed through the source resistance R_i.
//!
//! Complex time convention: drives are e^{+i omega t}, so an inductive
//! reactance appears as +i omega L.

use crate::error::SimError;
use crate::params::{InputCircuitParams, StriplineParams};
use num_complex::Complex64;

/// Impedance sample of a frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedancePoint {
    /// Frequency, rad/s.
    pub frequency: f64,
    /// Forward impedance, ohm.
    pub z: Complex64,
}

fn check_omega(omega: f64) -> Result<(), SimError> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidArgument(format!(
            "frequency must be positive, got {omega} rad/s"
        )))
    }
}

/// Forward impedance of the input network at frequency omega:
///
/// Z = (L_1/C_i) { i [ omega (C_1 + C_i + C_i R_i / R) - 1/(omega L_1) ]
///                 + 1/R - R_i C_i (omega^2 C_1 - 1/L_1) }
///
/// The lumped reduction behind this expression holds near the fundamental;
/// see [`validity_warn`] for the flag marking points outside that window.
pub fn forward_impedance(
    line: &StriplineParams,
    ic: &InputCircuitParams,
    omega: f64,
) -> Result<Complex64, SimError> {
    line.validate()?;
    ic.validate()?;
    check_omega(omega)?;
    let l1 = line.l1();
    let c1 = line.c1();
    let ci = ic.coupling_capacitance;
    let r = ic.shunt_resistance;
    let ri = ic.source_resistance;
    let reactive = omega * (c1 + ci + ci * ri / r) - 1.0 / (omega * l1);
    let resistive = 1.0 / r - ri * ci * (omega * omega * c1 - 1.0 / l1);
    Ok(l1 / ci * Complex64::new(resistive, reactive))
}

/// True when omega lies outside the window [0.5, 1.5] omega_1 where the
/// fixed-(L_1, C_1) reduction is trustworthy.
pub fn validity_warn(line: &StriplineParams, omega: f64) -> bool {
    let omega1 = line.omega1();
    omega > 1.5 * omega1 || omega < 0.5 * omega1
}

/// Input impedance with the SQUID's flux response folded back in:
/// Z + i omega M_1^2 (C_1/C_i) J_Phi.
///
/// `j_phi` is the circulating-current transfer function in A/Wb (1/H).
pub fn loaded_impedance(
    z: Complex64,
    j_phi: f64,
    omega: f64,
    m1: f64,
    c1: f64,
    ci: f64,
) -> Complex64 {
    z + Complex64::new(0.0, omega * m1 * m1 * (c1 / ci) * j_phi)
}

/// Frequency minimizing |forward impedance| inside the bracket, located by
/// golden-section search to a relative tolerance of 1e-9.
///
/// If the minimum over the bracket sits on an endpoint there is no interior
/// resonance to report and the search fails with a bracket error naming the
/// offending edge.
pub fn find_resonance(
    line: &StriplineParams,
    ic: &InputCircuitParams,
    bracket: (f64, f64),
) -> Result<f64, SimError> {
    line.validate()?;
    ic.validate()?;
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(SimError::InvalidArgument(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let f = |omega: f64| {
        forward_impedance(line, ic, omega)
            .expect("bracket is positive, so impedance evaluation cannot fail")
            .norm()
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > 1e-9 * 0.5 * (a + b) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let star = 0.5 * (a + b);
    if star <= lo * (1.0 + 1e-7) {
        return Err(SimError::Bracket { boundary: "lower" });
    }
    if star >= hi * (1.0 - 1e-7) {
        return Err(SimError::Bracket { boundary: "upper" });
    }
    Ok(star)
}
