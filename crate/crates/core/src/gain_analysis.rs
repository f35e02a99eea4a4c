//! Small-signal gain of the coupled amplifier and its diagnostics.
//!
//! The voltage gain at drive frequency omega is
//!
//! ```text
//! V/V_i = M_1 V_Phi / (Z + i omega M_1^2 (C_1/C_i) J_Phi)
//! ```
//!
//! where Z is the forward impedance of the input network and the extra
//! denominator term is the SQUID's back-action through its circulating
//! current. The transfer functions V_Phi and J_Phi entering here are the
//! static derivatives of the bare device, with the unreduced loop
//! inductance: at the Josephson frequency the strip-to-loop coupling has
//! already fallen off as M_1 omega_1/omega_J, so the screening that would
//! renormalize L_J is suppressed by (omega_1/omega_J)^2. That suppression
//! factor is reported with every gain point so the premise can be audited
//! per run.

use crate::error::SimError;
use crate::input_circuit::{forward_impedance, loaded_impedance};
use crate::params::{InputCircuitParams, SimConfig, SquidParams, StriplineParams, FLUX_QUANTUM};
use crate::squid_dynamics::{
    ac_response, steady_stats, transfer_functions, OperatingPoint, TransferFunctions,
};
use num_complex::Complex64;

/// Gain and supporting quantities at one sweep frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    /// Drive frequency, rad/s.
    pub frequency: f64,
    /// Forward impedance of the bare input network, ohm.
    pub z: Complex64,
    /// Impedance with the back-action term, ohm.
    pub z_loaded: Complex64,
    /// Voltage gain V/V_i, dimensionless.
    pub gain: Complex64,
    /// Flux swing per unit drive voltage, Wb/V.
    pub delta_flux_per_volt: Complex64,
    /// (omega_1/omega_J)^2 at the bias point, clamped to 1 below the
    /// fundamental. Identical for every point of one sweep.
    pub screening_ratio: f64,
}

/// One bias-point extraction plus the per-frequency gain evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub operating_point: OperatingPoint,
    pub transfer: TransferFunctions,
    pub points: Vec<GainPoint>,
}

/// Static gain against the dynamically measured one at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearResponseReport {
    /// Probe frequency, rad/s.
    pub frequency: f64,
    /// |gain| built from the static flux derivatives.
    pub static_abs_gain: f64,
    /// |gain| built from the lock-in response at the probe frequency.
    pub dynamic_abs_gain: f64,
    /// |static - dynamic| / static (zero when both vanish).
    pub rel_deviation: f64,
}

/// Factor (omega_1/omega_J)^2 by which flux coupling at the Josephson
/// frequency is suppressed relative to the fundamental; clamped to 1 when
/// omega_J is below omega_1.
pub fn screening_ratio(op: &OperatingPoint, line: &StriplineParams) -> Result<f64, SimError> {
    line.validate()?;
    if op.josephson_frequency == 0.0 {
        return Err(SimError::ZeroVoltage);
    }
    let wj = op.josephson_frequency.abs();
    let w1 = line.omega1();
    if wj < w1 {
        Ok(1.0)
    } else {
        let r = w1 / wj;
        Ok(r * r)
    }
}

/// Evaluate the gain expression at one frequency from an already extracted
/// bias point.
pub fn gain_at(
    tf: &TransferFunctions,
    op: &OperatingPoint,
    line: &StriplineParams,
    ic: &InputCircuitParams,
    omega: f64,
) -> Result<GainPoint, SimError> {
    if !(tf.v_phi.is_finite() && tf.j_phi.is_finite()) {
        return Err(SimError::InvalidArgument(format!(
            "transfer functions must be finite, got V_Phi = {}, J_Phi = {}",
            tf.v_phi, tf.j_phi
        )));
    }
    let screening = screening_ratio(op, line)?;
    let z = forward_impedance(line, ic, omega)?;
    let m1 = line.fundamental_mutual;
    let z_loaded = loaded_impedance(z, tf.j_phi, omega, m1, line.c1(), ic.coupling_capacitance);
    let abs_z = z_loaded.norm();
    if abs_z < 1e-12 {
        return Err(SimError::SingularGain { abs_z });
    }
    Ok(GainPoint {
        frequency: omega,
        z,
        z_loaded,
        gain: Complex64::from(m1 * tf.v_phi) / z_loaded,
        delta_flux_per_volt: Complex64::from(m1) / z_loaded,
        screening_ratio: screening,
    })
}

/// Extract the bias point once, then evaluate the gain on the whole grid.
pub fn gain_sweep(
    params: &SquidParams,
    line: &StriplineParams,
    ic: &InputCircuitParams,
    cfg: &SimConfig,
    omegas: &[f64],
) -> Result<SweepResult, SimError> {
    if omegas.is_empty() {
        return Err(SimError::InvalidArgument("empty frequency grid".into()));
    }
    for pair in omegas.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(SimError::InvalidArgument(
                "frequency grid must be strictly increasing".into(),
            ));
        }
    }
    if !(omegas[0].is_finite() && omegas[0] > 0.0) {
        return Err(SimError::InvalidArgument(format!(
            "frequencies must be positive, got {}",
            omegas[0]
        )));
    }
    let (op, stats) = steady_stats(params, cfg)?;
    if !op.converged {
        return Err(SimError::NotConverged {
            flux_frac: params.external_flux / FLUX_QUANTUM,
            delta: stats.split_delta,
        });
    }
    let tf = transfer_functions(params, cfg)?;
    let points = omegas
        .iter()
        .map(|&omega| gain_at(&tf, &op, line, ic, omega))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        operating_point: op,
        transfer: tf,
        points,
    })
}

/// Cross-check the static-derivative gain against a lock-in measurement at
/// the probe frequency.
pub fn validate_linear_response(
    params: &SquidParams,
    line: &StriplineParams,
    ic: &InputCircuitParams,
    cfg: &SimConfig,
    omega: f64,
) -> Result<LinearResponseReport, SimError> {
    let (op, stats) = steady_stats(params, cfg)?;
    if !op.converged {
        return Err(SimError::NotConverged {
            flux_frac: params.external_flux / FLUX_QUANTUM,
            delta: stats.split_delta,
        });
    }
    let tf = transfer_functions(params, cfg)?;
    let point = gain_at(&tf, &op, line, ic, omega)?;
    let response = ac_response(params, cfg, omega)?;
    let static_abs_gain = point.gain.norm();
    let dynamic_abs_gain =
        line.fundamental_mutual * response.norm() / point.z_loaded.norm();
    let rel_deviation = if static_abs_gain == 0.0 && dynamic_abs_gain == 0.0 {
        0.0
    } else {
        (static_abs_gain - dynamic_abs_gain).abs() / static_abs_gain.max(dynamic_abs_gain)
    };
    Ok(LinearResponseReport {
        frequency: omega,
        static_abs_gain,
        dynamic_abs_gain,
        rel_deviation,
    })
}

/// Loop inductance reduced by the screening of the input circuit,
/// L_J (1 - alpha^2) with alpha^2 = M_1^2/(L_J L_1).
///
/// This reduction is an external convention used only by the comparison
/// mode of the gain sweep; the gain expression itself always takes the
/// bare-inductance transfer functions.
pub fn renormalized_loop_inductance(
    squid: &SquidParams,
    line: &StriplineParams,
) -> Result<f64, SimError> {
    squid.validate()?;
    line.validate()?;
    let m1 = line.fundamental_mutual;
    let alpha2 = m1 * m1 / (squid.loop_inductance * line.l1());
    if alpha2 >= 1.0 {
        return Err(SimError::InvalidArgument(format!(
            "coupling alpha^2 = M_1^2/(L_J L_1) = {alpha2:.3} must be below 1 \
             for the reduced inductance to stay positive"
        )));
    }
    Ok(squid.loop_inductance * (1.0 - alpha2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_line(m1: f64) -> StriplineParams {
        StriplineParams {
            inductance_per_length: 1.0,
            capacitance_per_length: 1.0,
            length: PI,
            fundamental_mutual: m1,
        }
    }

    fn op_at(josephson_frequency: f64) -> OperatingPoint {
        OperatingPoint {
            mean_voltage: 1e-5,
            circulating_current: 0.0,
            josephson_frequency,
            converged: true,
        }
    }

    #[test]
    fn screening_values() {
        let line = unit_line(0.1);
        assert!((screening_ratio(&op_at(100.0), &line).unwrap() - 1e-4).abs() <= 1e-16);
        assert_eq!(screening_ratio(&op_at(1.0), &line).unwrap(), 1.0);
        assert_relative_eq!(
            screening_ratio(&op_at(10.0), &line).unwrap(),
            0.01,
            max_relative = 1e-12
        );
        assert_eq!(screening_ratio(&op_at(0.5), &line).unwrap(), 1.0);
        assert!(matches!(
            screening_ratio(&op_at(0.0), &line),
            Err(SimError::ZeroVoltage)
        ));
    }

    #[test]
    fn gain_arithmetic_value() {
        // Z is purely resistive 1 ohm at the series resonance of L_1
        // against C_1 + C_i when R = 1 and R_i = 0.
        let line = unit_line(1e-9);
        let ic = InputCircuitParams {
            source_resistance: 0.0,
            shunt_resistance: 1.0,
            coupling_capacitance: 1.0,
            input_amplitude: 1.0,
        };
        let tf = TransferFunctions {
            v_phi: 1e6,
            j_phi: 0.0,
        };
        let p = gain_at(&tf, &op_at(100.0), &line, &ic, 1.0 / 2f64.sqrt()).unwrap();
        assert_relative_eq!(p.gain.norm(), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(p.z.re, 1.0, max_relative = 1e-12);
        assert!(p.z.im.abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_means_zero_gain() {
        let line = unit_line(0.0);
        let ic = InputCircuitParams {
            source_resistance: 0.0,
            shunt_resistance: 1.0,
            coupling_capacitance: 1.0,
            input_amplitude: 1.0,
        };
        let tf = TransferFunctions {
            v_phi: 3e6,
            j_phi: 4e5,
        };
        let p = gain_at(&tf, &op_at(50.0), &line, &ic, 0.9).unwrap();
        assert_eq!(p.gain, Complex64::new(0.0, 0.0));
        assert_eq!(p.z_loaded, p.z);
    }

    #[test]
    fn stored_fields_stay_consistent() {
        let line = unit_line(2e-2);
        let ic = InputCircuitParams {
            source_resistance: 0.05,
            shunt_resistance: 7.0,
            coupling_capacitance: 0.4,
            input_amplitude: 1.0,
        };
        let tf = TransferFunctions {
            v_phi: 8.2e5,
            j_phi: 3.1e5,
        };
        for k in 1..=40 {
            let omega = 0.3 + 0.05 * k as f64;
            let p = gain_at(&tf, &op_at(80.0), &line, &ic, omega).unwrap();
            let lhs = p.gain * p.z_loaded;
            let rhs = Complex64::from(line.fundamental_mutual * tf.v_phi);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
            assert!((p.delta_flux_per_volt * p.z_loaded
                - Complex64::from(line.fundamental_mutual))
            .norm()
                <= 1e-12 * line.fundamental_mutual);
        }
    }

    #[test]
    fn lossless_resonance_is_singular() {
        let line = unit_line(0.1);
        let ic = InputCircuitParams {
            source_resistance: 0.0,
            shunt_resistance: f64::INFINITY,
            coupling_capacitance: 1.0,
            input_amplitude: 1.0,
        };
        let tf = TransferFunctions {
            v_phi: 1e6,
            j_phi: 0.0,
        };
        match gain_at(&tf, &op_at(100.0), &line, &ic, 1.0 / 2f64.sqrt()) {
            Err(SimError::SingularGain { abs_z }) => assert!(abs_z < 1e-12),
            other => panic!("expected singular gain, got {other:?}"),
        }
    }

    #[test]
    fn back_action_vanishes_linearly_with_capacitance_ratio() {
        let line = unit_line(0.05);
        let tf = TransferFunctions {
            v_phi: 1e6,
            j_phi: 2e5,
        };
        let base = InputCircuitParams {
            source_resistance: 0.02,
            shunt_resistance: 5.0,
            coupling_capacitance: 1.0,
            input_amplitude: 1.0,
        };
        let omega = 0.8;
        let shift = |ci: f64| {
            let ic = InputCircuitParams {
                coupling_capacitance: ci,
                ..base
            };
            let p = gain_at(&tf, &op_at(60.0), &line, &ic, omega).unwrap();
            (p.z_loaded - p.z).norm()
        };
        // C_1/C_i halves when C_i doubles, so the loading term must halve.
        let d1 = shift(1.0);
        let d2 = shift(2.0);
        let d4 = shift(4.0);
        assert_relative_eq!(d1 / d2, 2.0, max_relative = 1e-12);
        assert_relative_eq!(d2 / d4, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn renormalized_inductance_value() {
        let squid = SquidParams {
            critical_current: 5e-6,
            junction_resistance: 4.0,
            junction_capacitance: 0.0,
            loop_inductance: 6.58e-11,
            bias_current: 1e-5,
            external_flux: 0.0,
        };
        let line = StriplineParams {
            inductance_per_length: 2e-7,
            capacitance_per_length: 5e-10,
            length: 0.1,
            fundamental_mutual: 1e-10,
        };
        // alpha^2 = 1e-20 / (6.58e-11 * 6.3662e-9) = 0.023872, by hand.
        let lj = renormalized_loop_inductance(&squid, &line).unwrap();
        assert_relative_eq!(lj, 6.4229e-11, max_relative = 1e-4);
        let strong = StriplineParams {
            fundamental_mutual: 1e-8,
            ..line
        };
        assert!(renormalized_loop_inductance(&squid, &strong).is_err());
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let squid = SquidParams {
            critical_current: 5e-6,
            junction_resistance: 4.0,
            junction_capacitance: 0.0,
            loop_inductance: 6.58e-11,
            bias_current: 1e-5,
            external_flux: FLUX_QUANTUM / 4.0,
        };
        let line = unit_line(0.1);
        let ic = InputCircuitParams {
            source_resistance: 0.0,
            shunt_resistance: 1.0,
            coupling_capacitance: 1.0,
            input_amplitude: 1.0,
        };
        let cfg = SimConfig::default();
        assert!(gain_sweep(&squid, &line, &ic, &cfg, &[]).is_err());
        assert!(gain_sweep(&squid, &line, &ic, &cfg, &[2.0, 1.0]).is_err());
    }
}
