//! Parameter records and the dimensionless reduction.
//!
//! Every public operation takes SI quantities. The integrator itself works
//! in reduced units: time in units of tau_0 = Phi_0/(2 pi I_c R_J), voltage
//! in units of I_c R_J, current in units of I_c, flux in units of Phi_0.
//! [`DimensionlessSquid`] is the bridge between the two pictures.

use crate::error::SimError;
use std::f64::consts::PI;

/// Magnetic flux quantum h/2e, in weber.
pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;

fn check(
    name: &'static str,
    constraint: &'static str,
    ok: bool,
    value: f64,
) -> Result<(), SimError> {
    if ok {
        Ok(())
    } else {
        Err(SimError::InvalidParameter {
            name,
            constraint,
            value,
        })
    }
}

/// Two identical resistively shunted junctions in a superconducting loop,
/// together with the dc bias point applied to them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidParams {
    /// Critical current of each junction, ampere.
    pub critical_current: f64,
    /// Shunt resistance of each junction, ohm.
    pub junction_resistance: f64,
    /// Capacitance of each junction, farad.
    pub junction_capacitance: f64,
    /// Inductance of the superconducting loop, henry.
    pub loop_inductance: f64,
    /// Total bias current fed symmetrically into the loop, ampere.
    pub bias_current: f64,
    /// Externally applied flux through the loop, weber.
    pub external_flux: f64,
}

impl SquidParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        check(
            "critical_current",
            "I_c > 0",
            finite_pos(self.critical_current),
            self.critical_current,
        )?;
        check(
            "junction_resistance",
            "R_J > 0",
            finite_pos(self.junction_resistance),
            self.junction_resistance,
        )?;
        check(
            "junction_capacitance",
            "C_J >= 0",
            self.junction_capacitance.is_finite() && self.junction_capacitance >= 0.0,
            self.junction_capacitance,
        )?;
        check(
            "loop_inductance",
            "L_J > 0",
            finite_pos(self.loop_inductance),
            self.loop_inductance,
        )?;
        check(
            "bias_current",
            "finite",
            self.bias_current.is_finite(),
            self.bias_current,
        )?;
        check(
            "external_flux",
            "finite",
            self.external_flux.is_finite(),
            self.external_flux,
        )?;
        Ok(())
    }

    /// Screening parameter beta_L = 2 pi L_J I_c / Phi_0.
    ///
    /// Convention note: the 2 pi form is used so the circulating current in
    /// reduced units is j = (delta_1 - delta_2 - 2 pi phi_e)/beta_L with no
    /// stray factors. Some texts use 2 L_J I_c / Phi_0 instead.
    pub fn beta_l(&self) -> f64 {
        2.0 * PI * self.loop_inductance * self.critical_current / FLUX_QUANTUM
    }

    /// Stewart-McCumber parameter beta_c = 2 pi I_c R_J^2 C_J / Phi_0.
    pub fn beta_c(&self) -> f64 {
        2.0 * PI
            * self.critical_current
            * self.junction_resistance
            * self.junction_resistance
            * self.junction_capacitance
            / FLUX_QUANTUM
    }

    /// Time unit tau_0 = Phi_0/(2 pi I_c R_J), seconds.
    pub fn time_unit(&self) -> f64 {
        FLUX_QUANTUM / (2.0 * PI * self.critical_current * self.junction_resistance)
    }

    /// Voltage unit I_c R_J, volts.
    pub fn voltage_unit(&self) -> f64 {
        self.critical_current * self.junction_resistance
    }

    /// Reduce to the dimensionless groups used by the integrator.
    pub fn normalize(&self) -> Result<DimensionlessSquid, SimError> {
        self.validate()?;
        Ok(DimensionlessSquid {
            beta_c: self.beta_c(),
            beta_l: self.beta_l(),
            bias: self.bias_current / self.critical_current,
            flux: self.external_flux / FLUX_QUANTUM,
        })
    }

    /// Same junctions and bias current, different applied flux.
    pub fn with_flux(&self, external_flux: f64) -> SquidParams {
        SquidParams {
            external_flux,
            ..*self
        }
    }

    /// Same junctions and flux, different bias current.
    pub fn with_bias(&self, bias_current: f64) -> SquidParams {
        SquidParams {
            bias_current,
            ..*self
        }
    }
}

/// Reduced parameter set: everything the equations of motion depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessSquid {
    /// Stewart-McCumber parameter.
    pub beta_c: f64,
    /// Screening parameter (2 pi convention, see [`SquidParams::beta_l`]).
    pub beta_l: f64,
    /// Bias current in units of I_c.
    pub bias: f64,
    /// External flux in units of Phi_0.
    pub flux: f64,
}

impl DimensionlessSquid {
    /// Invert the reduction given the two scale-fixing parameters.
    pub fn denormalize(&self, critical_current: f64, junction_resistance: f64) -> SquidParams {
        let ic = critical_current;
        let rj = junction_resistance;
        SquidParams {
            critical_current: ic,
            junction_resistance: rj,
            junction_capacitance: self.beta_c * FLUX_QUANTUM / (2.0 * PI * ic * rj * rj),
            loop_inductance: self.beta_l * FLUX_QUANTUM / (2.0 * PI * ic),
            bias_current: self.bias * ic,
            external_flux: self.flux * FLUX_QUANTUM,
        }
    }
}

/// Open-ended superconducting microstrip over the loop, described by its
/// per-length constants and the mutual inductance of the fundamental mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StriplineParams {
    /// Inductance per unit length, henry per meter.
    pub inductance_per_length: f64,
    /// Capacitance per unit length, farad per meter.
    pub capacitance_per_length: f64,
    /// Strip length, meters.
    pub length: f64,
    /// Mutual inductance between the fundamental mode current and the loop,
    /// henry. Zero is accepted and means a decoupled strip.
    pub fundamental_mutual: f64,
}

impl StriplineParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        check(
            "inductance_per_length",
            "l > 0",
            finite_pos(self.inductance_per_length),
            self.inductance_per_length,
        )?;
        check(
            "capacitance_per_length",
            "c > 0",
            finite_pos(self.capacitance_per_length),
            self.capacitance_per_length,
        )?;
        check("length", "Lambda > 0", finite_pos(self.length), self.length)?;
        check(
            "fundamental_mutual",
            "M_1 >= 0",
            self.fundamental_mutual.is_finite() && self.fundamental_mutual >= 0.0,
            self.fundamental_mutual,
        )?;
        Ok(())
    }

    /// Lumped inductance of the fundamental mode, L_1 = (Lambda/pi) l.
    pub fn l1(&self) -> f64 {
        self.length / PI * self.inductance_per_length
    }

    /// Lumped capacitance of the fundamental mode, C_1 = (Lambda/pi) c.
    pub fn c1(&self) -> f64 {
        self.length / PI * self.capacitance_per_length
    }

    /// Fundamental resonance omega_1 = (L_1 C_1)^(-1/2), rad/s.
    pub fn omega1(&self) -> f64 {
        1.0 / (self.l1() * self.c1()).sqrt()
    }
}

/// Lumped input network around the strip: source, shunt load, and the
/// coupling capacitor that closes the resonant loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputCircuitParams {
    /// Source resistance R_i in series with the drive, ohm.
    pub source_resistance: f64,
    /// Shunt (load) resistance R, ohm. `f64::INFINITY` is accepted and
    /// means the lossless open limit 1/R = 0.
    pub shunt_resistance: f64,
    /// Coupling capacitance C_i, farad.
    pub coupling_capacitance: f64,
    /// Drive amplitude V_i, volt. Gain is reported as V/V_i so this only
    /// scales absolute signal levels.
    pub input_amplitude: f64,
}

impl InputCircuitParams {
    pub fn validate(&self) -> Result<(), SimError> {
        check(
            "source_resistance",
            "R_i >= 0",
            self.source_resistance.is_finite() && self.source_resistance >= 0.0,
            self.source_resistance,
        )?;
        check(
            "shunt_resistance",
            "R > 0",
            self.shunt_resistance > 0.0 && !self.shunt_resistance.is_nan(),
            self.shunt_resistance,
        )?;
        check(
            "coupling_capacitance",
            "C_i > 0",
            self.coupling_capacitance.is_finite() && self.coupling_capacitance > 0.0,
            self.coupling_capacitance,
        )?;
        check(
            "input_amplitude",
            "V_i >= 0",
            self.input_amplitude.is_finite() && self.input_amplitude >= 0.0,
            self.input_amplitude,
        )?;
        Ok(())
    }
}

/// Integrator controls. All times are in reduced units (tau_0); flux steps
/// and drive amplitudes are fractions of Phi_0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step, reduced time.
    pub step: f64,
    /// Settling interval discarded before averaging, reduced time.
    pub transient_skip: f64,
    /// Averaging interval, reduced time.
    pub averaging_window: f64,
    /// Central-difference flux step as a fraction of Phi_0.
    pub flux_fd_step: f64,
    /// AC drive amplitude as a fraction of Phi_0.
    pub ac_amplitude: f64,
    /// Reserved for stochastic extensions; carried through configs and
    /// round-trips but unused by the deterministic integrator.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            step: 0.005,
            transient_skip: 200.0,
            averaging_window: 2000.0,
            flux_fd_step: 0.01,
            ac_amplitude: 0.002,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        check(
            "step",
            "step > 0",
            self.step.is_finite() && self.step > 0.0,
            self.step,
        )?;
        check(
            "transient_skip",
            "transient_skip >= 0",
            self.transient_skip.is_finite() && self.transient_skip >= 0.0,
            self.transient_skip,
        )?;
        check(
            "averaging_window",
            "averaging_window >= 100*step",
            self.averaging_window.is_finite() && self.averaging_window >= 100.0 * self.step,
            self.averaging_window,
        )?;
        check(
            "flux_fd_step",
            "0 < flux_fd_step <= 0.05",
            self.flux_fd_step > 0.0 && self.flux_fd_step <= 0.05,
            self.flux_fd_step,
        )?;
        check(
            "ac_amplitude",
            "0 < ac_amplitude <= 0.01",
            self.ac_amplitude > 0.0 && self.ac_amplitude <= 0.01,
            self.ac_amplitude,
        )?;
        Ok(())
    }
}
