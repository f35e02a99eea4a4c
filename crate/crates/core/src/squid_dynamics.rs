//! Time-domain integration of the two-junction equations of motion.
//!
//! In reduced units (time tau_0 = Phi_0/(2 pi I_c R_J), currents I_c,
//! voltages I_c R_J, flux Phi_0) the system is
//!
//! ```text
//! beta_c delta_1'' + delta_1' = i/2 - j - sin(delta_1)
//! beta_c delta_2'' + delta_2' = i/2 + j - sin(delta_2)
//! j = (delta_1 - delta_2 - 2 pi phi_e) / beta_L
//! ```
//!
//! with instantaneous reduced voltage v = (delta_1' + delta_2')/2. The
//! phases are never wrapped, so the mean voltage is the exact slope of the
//! mean phase over the averaging window.
//!
//! The integrator is fixed-step classical Runge-Kutta. A fixed step keeps
//! runs bit-reproducible and lets the lock-in place an exact integer number
//! of samples per drive period. For beta_c = 0 a dedicated first-order
//! two-dimensional form is integrated instead of faking a tiny capacitance,
//! which would make the system needlessly stiff. Initial conditions are
//! always delta_1 = delta_2 = 0 with zero velocities; for beta_c well above
//! one the attractor may depend on this choice, so characteristics reported
//! there are tied to it.
//!
//! Stability note: the circulating-current term contributes a linear rate
//! 2/beta_L to the antisymmetric mode, so the step must satisfy
//! step < 2.78 * beta_L / 2 roughly; the 0.005 default covers beta_L down
//! to about 0.005.

use crate::error::SimError;
use crate::params::{DimensionlessSquid, SimConfig, SquidParams, FLUX_QUANTUM};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Junction phases and their reduced-time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidState {
    pub delta1: f64,
    pub delta2: f64,
    pub ddelta1: f64,
    pub ddelta2: f64,
}

/// Averaged dc characteristics at one bias point, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Mean voltage across the device, volt.
    pub mean_voltage: f64,
    /// Mean circulating current around the loop, ampere.
    pub circulating_current: f64,
    /// 2 pi mean_voltage / Phi_0 when the voltage is finite, zero on the
    /// supercurrent branch, rad/s.
    pub josephson_frequency: f64,
    /// True when the two half-window voltage averages agreed.
    pub converged: bool,
}

/// Static flux derivatives of the dc characteristics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferFunctions {
    /// dV/dPhi at the bias point, V/Wb.
    pub v_phi: f64,
    /// dJ/dPhi at the bias point, A/Wb.
    pub j_phi: f64,
}

/// Half-window agreement (reduced voltage units) required to call a run
/// converged.
const SPLIT_TOL: f64 = 1e-3;

/// Mean phase advance below which the window is called superconducting and
/// the voltage reported as exactly zero, rad.
const ZERO_ADVANCE: f64 = 0.1;

#[inline]
fn circulating(delta1: f64, delta2: f64, phi: f64, beta_l: f64) -> f64 {
    (delta1 - delta2 - 2.0 * PI * phi) / beta_l
}

/// Right-hand side of the reduced system.
///
/// Returns (delta_1', delta_2', delta_1'', delta_2''). For beta_c = 0 the
/// system is first order; the velocity slots then carry the first-order
/// right-hand side and the acceleration slots are zero, and the state's
/// ddelta fields are ignored.
pub fn derivatives(state: &SquidState, d: &DimensionlessSquid) -> Result<[f64; 4], SimError> {
    if !(d.beta_l > 0.0) {
        return Err(SimError::InvalidArgument(
            "beta_L must be positive; use beta_L >= 1e-4 to approximate the zero-inductance limit"
                .into(),
        ));
    }
    if d.beta_c < 0.0 {
        return Err(SimError::InvalidArgument(format!(
            "beta_c must be nonnegative, got {}",
            d.beta_c
        )));
    }
    let j = circulating(state.delta1, state.delta2, d.flux, d.beta_l);
    let half = 0.5 * d.bias;
    let f1 = half - j - state.delta1.sin();
    let f2 = half + j - state.delta2.sin();
    if d.beta_c == 0.0 {
        Ok([f1, f2, 0.0, 0.0])
    } else {
        Ok([
            state.ddelta1,
            state.ddelta2,
            (f1 - state.ddelta1) / d.beta_c,
            (f2 - state.ddelta2) / d.beta_c,
        ])
    }
}

#[inline]
fn rk4_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let mut ya = *y;
    for i in 0..N {
        ya[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &ya);
    for i in 0..N {
        ya[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &ya);
    for i in 0..N {
        ya[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &ya);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn check_finite<const N: usize>(y: &[f64; N], t: f64) -> Result<(), SimError> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SimError::Divergence { time: t })
    }
}

/// Raw reduced-unit outcome of one averaging run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RunStats {
    pub v_bar: f64,
    pub j_bar: f64,
    pub split_delta: f64,
    pub converged: bool,
}

struct Grid {
    h: f64,
    n_skip: usize,
    n_win: usize,
}

fn grid(cfg: &SimConfig) -> Grid {
    let h = cfg.step;
    let n_skip = (cfg.transient_skip / h).round() as usize;
    let mut n_win = (cfg.averaging_window / h).round() as usize;
    if n_win < 2 {
        n_win = 2;
    }
    if n_win % 2 == 1 {
        n_win += 1;
    }
    Grid { h, n_skip, n_win }
}

/// Integrate at constant flux and average. `N` is 2 for the overdamped
/// first-order form, 4 for the full second-order one; in both layouts the
/// phases sit in slots 0 and 1.
fn mean_run<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    d: &DimensionlessSquid,
    g: &Grid,
) -> Result<RunStats, SimError> {
    let mut y = [0.0; N];
    let mut t = 0.0;
    for _ in 0..g.n_skip {
        y = rk4_step(f, t, &y, g.h);
        t += g.h;
        check_finite(&y, t)?;
    }
    let phase_start = y[0] + y[1];
    let mut phase_mid = phase_start;
    let mut j_acc = 0.5 * circulating(y[0], y[1], d.flux, d.beta_l);
    for k in 1..=g.n_win {
        y = rk4_step(f, t, &y, g.h);
        t += g.h;
        check_finite(&y, t)?;
        let w = if k == g.n_win { 0.5 } else { 1.0 };
        j_acc += w * circulating(y[0], y[1], d.flux, d.beta_l);
        if k == g.n_win / 2 {
            phase_mid = y[0] + y[1];
        }
    }
    let phase_end = y[0] + y[1];
    let window = g.n_win as f64 * g.h;
    let advance = 0.5 * (phase_end - phase_start);
    let v1 = (phase_mid - phase_start) / window;
    let v2 = (phase_end - phase_mid) / window;
    let split_delta = (v1 - v2).abs();
    let v_bar = if advance.abs() < ZERO_ADVANCE {
        0.0
    } else {
        advance / window
    };
    Ok(RunStats {
        v_bar,
        j_bar: j_acc / g.n_win as f64,
        split_delta,
        converged: split_delta < SPLIT_TOL,
    })
}

pub(crate) fn steady_stats(
    params: &SquidParams,
    cfg: &SimConfig,
) -> Result<(OperatingPoint, RunStats), SimError> {
    cfg.validate()?;
    let d = params.normalize()?;
    let g = grid(cfg);
    let stats = if d.beta_c == 0.0 {
        let f = |_t: f64, y: &[f64; 2]| {
            let j = circulating(y[0], y[1], d.flux, d.beta_l);
            let half = 0.5 * d.bias;
            [half - j - y[0].sin(), half + j - y[1].sin()]
        };
        mean_run(&f, &d, &g)?
    } else {
        let f = |_t: f64, y: &[f64; 4]| {
            let j = circulating(y[0], y[1], d.flux, d.beta_l);
            let half = 0.5 * d.bias;
            [
                y[2],
                y[3],
                (half - j - y[0].sin() - y[2]) / d.beta_c,
                (half + j - y[1].sin() - y[3]) / d.beta_c,
            ]
        };
        mean_run(&f, &d, &g)?
    };
    let mean_voltage = stats.v_bar * params.voltage_unit();
    let josephson_frequency = if stats.v_bar == 0.0 {
        0.0
    } else {
        2.0 * PI * mean_voltage / FLUX_QUANTUM
    };
    Ok((
        OperatingPoint {
            mean_voltage,
            circulating_current: stats.j_bar * params.critical_current,
            josephson_frequency,
            converged: stats.converged,
        },
        stats,
    ))
}

/// Integrate from the fixed initial state through the transient, then
/// average voltage and circulating current over the window.
///
/// The mean voltage is the phase advance over the window divided by its
/// length, which is the exact time average of v. A window whose mean phase
/// advances by less than 0.1 rad is reported as the superconducting branch:
/// mean voltage and Josephson frequency exactly zero.
pub fn run_to_steady(params: &SquidParams, cfg: &SimConfig) -> Result<OperatingPoint, SimError> {
    Ok(steady_stats(params, cfg)?.0)
}

/// Central-difference flux derivatives of the averaged characteristics,
/// taken with the bare loop inductance at Phi +/- flux_fd_step * Phi_0.
pub fn transfer_functions(
    params: &SquidParams,
    cfg: &SimConfig,
) -> Result<TransferFunctions, SimError> {
    cfg.validate()?;
    params.validate()?;
    let dphi = cfg.flux_fd_step * FLUX_QUANTUM;
    let mut sides = [OperatingPoint {
        mean_voltage: 0.0,
        circulating_current: 0.0,
        josephson_frequency: 0.0,
        converged: false,
    }; 2];
    for (slot, sign) in sides.iter_mut().zip([1.0, -1.0]) {
        let shifted = params.with_flux(params.external_flux + sign * dphi);
        let (op, stats) = steady_stats(&shifted, cfg)?;
        if !op.converged {
            return Err(SimError::NotConverged {
                flux_frac: shifted.external_flux / FLUX_QUANTUM,
                delta: stats.split_delta,
            });
        }
        *slot = op;
    }
    Ok(TransferFunctions {
        v_phi: (sides[0].mean_voltage - sides[1].mean_voltage) / (2.0 * dphi),
        j_phi: (sides[0].circulating_current - sides[1].circulating_current) / (2.0 * dphi),
    })
}

/// Complex flux-to-voltage response at drive frequency omega (rad/s).
///
/// Drives the external flux with Phi + A cos(omega t), A = ac_amplitude *
/// Phi_0, and extracts the voltage component at omega with a Hann-windowed
/// lock-in over an integer number of drive periods. The step is trimmed so
/// each period holds an exact integer number of samples, which makes the
/// window reject the dc level, the conjugate line, and every drive harmonic
/// identically; only the Josephson comb leaks, suppressed by the cubic
/// side-lobe falloff of the window.
///
/// Requires the low-frequency regime omega < omega_J/5 at the bias point.
pub fn ac_response(
    params: &SquidParams,
    cfg: &SimConfig,
    omega: f64,
) -> Result<Complex64, SimError> {
    cfg.validate()?;
    let d = params.normalize()?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(SimError::InvalidArgument(format!(
            "drive frequency must be positive, got {omega} rad/s"
        )));
    }
    let (op, stats) = steady_stats(params, cfg)?;
    if op.mean_voltage == 0.0 {
        return Err(SimError::ZeroVoltage);
    }
    if !op.converged {
        return Err(SimError::NotConverged {
            flux_frac: params.external_flux / FLUX_QUANTUM,
            delta: stats.split_delta,
        });
    }
    if omega >= op.josephson_frequency.abs() / 5.0 {
        return Err(SimError::InvalidArgument(format!(
            "drive frequency {omega:.6e} rad/s is not below omega_J/5 = {:.6e} rad/s; \
             the response is only meaningful well under the Josephson frequency",
            op.josephson_frequency.abs() / 5.0
        )));
    }

    let w = omega * params.time_unit();
    let period = 2.0 * PI / w;
    let periods = (cfg.averaging_window / period).floor() as usize;
    if periods < 8 {
        return Err(SimError::Config(format!(
            "averaging_window {} holds only {periods} drive periods of {period:.3} \
             reduced time units; at least 8 are required",
            cfg.averaging_window
        )));
    }
    let per_period = (period / cfg.step).ceil().max(4.0) as usize;
    let h = period / per_period as f64;
    let n_skip = (cfg.transient_skip / h).round() as usize;
    let n_win = periods * per_period;
    let amp = cfg.ac_amplitude;
    let window = n_win as f64 * h;

    let mut acc = Complex64::new(0.0, 0.0);
    let mut weight_sum = 0.0;
    let mut lock_in = |t: f64, t0: f64, v: f64| {
        let frac = (t - t0) / window;
        let hann = 0.5 * (1.0 - (2.0 * PI * frac).cos());
        let phase = w * t;
        acc += hann * v * Complex64::new(phase.cos(), -phase.sin());
        weight_sum += hann;
    };

    if d.beta_c == 0.0 {
        let f = |t: f64, y: &[f64; 2]| {
            let phi = d.flux + amp * (w * t).cos();
            let j = circulating(y[0], y[1], phi, d.beta_l);
            let half = 0.5 * d.bias;
            [half - j - y[0].sin(), half + j - y[1].sin()]
        };
        let mut y = [0.0; 2];
        let mut t = 0.0;
        for _ in 0..n_skip {
            y = rk4_step(&f, t, &y, h);
            t += h;
            check_finite(&y, t)?;
        }
        let t0 = t;
        for k in 0..=n_win {
            let v = 0.5 * (d.bias - y[0].sin() - y[1].sin());
            lock_in(t, t0, v);
            if k < n_win {
                y = rk4_step(&f, t, &y, h);
                t += h;
                check_finite(&y, t)?;
            }
        }
    } else {
        let f = |t: f64, y: &[f64; 4]| {
            let phi = d.flux + amp * (w * t).cos();
            let j = circulating(y[0], y[1], phi, d.beta_l);
            let half = 0.5 * d.bias;
            [
                y[2],
                y[3],
                (half - j - y[0].sin() - y[2]) / d.beta_c,
                (half + j - y[1].sin() - y[3]) / d.beta_c,
            ]
        };
        let mut y = [0.0; 4];
        let mut t = 0.0;
        for _ in 0..n_skip {
            y = rk4_step(&f, t, &y, h);
            t += h;
            check_finite(&y, t)?;
        }
        let t0 = t;
        for k in 0..=n_win {
            let v = 0.5 * (y[2] + y[3]);
            lock_in(t, t0, v);
            if k < n_win {
                y = rk4_step(&f, t, &y, h);
                t += h;
                check_finite(&y, t)?;
            }
        }
    }

    let reduced = 2.0 * acc / weight_sum;
    Ok(reduced * params.voltage_unit() / (amp * FLUX_QUANTUM))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dimless(beta_c: f64, beta_l: f64, bias: f64, flux: f64) -> DimensionlessSquid {
        DimensionlessSquid {
            beta_c,
            beta_l,
            bias,
            flux,
        }
    }

    /// SI parameter set realizing the given reduced groups with I_c = 5 uA
    /// and R_J = 4 ohm.
    fn si_params(beta_c: f64, beta_l: f64, bias: f64, flux: f64) -> SquidParams {
        dimless(beta_c, beta_l, bias, flux).denormalize(5e-6, 4.0)
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let state = SquidState {
            delta1: 0.0,
            delta2: 0.0,
            ddelta1: 0.0,
            ddelta2: 0.0,
        };
        for bc in [0.0, 0.5] {
            let d = dimless(bc, 1.0, 0.0, 0.0);
            let rhs = derivatives(&state, &d).unwrap();
            assert_eq!(rhs, [0.0; 4]);
        }
    }

    #[test]
    fn symmetric_subspace_has_no_circulating_current() {
        let state = SquidState {
            delta1: 0.7,
            delta2: 0.7,
            ddelta1: 0.2,
            ddelta2: 0.2,
        };
        let d = dimless(0.0, 1.0, 1.0, 0.0);
        let rhs = derivatives(&state, &d).unwrap();
        assert_eq!(rhs[0], rhs[1]);
        // Flux-matched phase difference also zeroes j.
        let d = dimless(0.0, 0.7, 1.0, 0.25);
        let state = SquidState {
            delta1: 2.0 * PI * 0.25,
            delta2: 0.0,
            ddelta1: 0.0,
            ddelta2: 0.0,
        };
        let rhs = derivatives(&state, &d).unwrap();
        assert_relative_eq!(
            rhs[0] + state.delta1.sin(),
            rhs[1] + state.delta2.sin(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_beta_l_is_rejected() {
        let state = SquidState {
            delta1: 0.0,
            delta2: 0.0,
            ddelta1: 0.0,
            ddelta2: 0.0,
        };
        let d = dimless(0.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            derivatives(&state, &d),
            Err(SimError::InvalidArgument(_))
        ));
    }

    #[test]
    fn unbiased_squid_stays_superconducting() {
        let op = run_to_steady(&si_params(0.0, 1.0, 0.0, 0.0), &SimConfig::default()).unwrap();
        assert_eq!(op.mean_voltage, 0.0);
        assert_eq!(op.josephson_frequency, 0.0);
        assert!(op.circulating_current.abs() < 1e-12);
        assert!(op.converged);
    }

    #[test]
    fn below_critical_bias_gives_exact_zero() {
        let op = run_to_steady(&si_params(0.0, 0.01, 1.9, 0.0), &SimConfig::default()).unwrap();
        assert_eq!(op.mean_voltage, 0.0);
        assert_eq!(op.josephson_frequency, 0.0);
    }

    #[test]
    fn small_inductance_iv_matches_single_junction_form() {
        // At beta_L -> 0 the device is one junction with critical current
        // 2 I_c cos(pi Phi/Phi_0) and resistance R_J/2, so at i = 3, phi = 0
        // the reduced voltage is sqrt(9 - 4)/2.
        let p = si_params(0.0, 0.01, 3.0, 0.0);
        let op = run_to_steady(&p, &SimConfig::default()).unwrap();
        let reduced = op.mean_voltage / p.voltage_unit();
        assert_relative_eq!(reduced, 5f64.sqrt() / 2.0, max_relative = 1e-2);
        assert!(op.converged);
    }

    #[test]
    fn josephson_frequency_matches_phase_slip_rate() {
        let p = si_params(0.5, 1.0, 2.0, 0.25);
        let op = run_to_steady(&p, &SimConfig::default()).unwrap();
        // omega_J tau_0 is the reduced mean phase slope by construction;
        // check the two public quantities agree through the unit system.
        let reduced_slope = op.mean_voltage / p.voltage_unit();
        assert_relative_eq!(
            op.josephson_frequency * p.time_unit(),
            reduced_slope,
            max_relative = 1e-3
        );
        assert!(op.converged);
    }

    #[test]
    fn voltage_is_even_and_current_odd_in_flux() {
        let cfg = SimConfig::default();
        let p_plus = si_params(0.5, 1.0, 2.0, 0.3);
        let p_minus = si_params(0.5, 1.0, 2.0, -0.3);
        let a = run_to_steady(&p_plus, &cfg).unwrap();
        let b = run_to_steady(&p_minus, &cfg).unwrap();
        assert_relative_eq!(a.mean_voltage, b.mean_voltage, max_relative = 1e-9);
        assert_relative_eq!(
            a.circulating_current,
            -b.circulating_current,
            max_relative = 1e-9
        );
    }

    #[test]
    fn transfer_function_vanishes_at_symmetry_points() {
        let cfg = SimConfig::default();
        let at_quarter = transfer_functions(&si_params(0.0, 1.0, 2.0, 0.25), &cfg).unwrap();
        let at_zero = transfer_functions(&si_params(0.0, 1.0, 2.0, 0.0), &cfg).unwrap();
        assert!(at_quarter.v_phi.abs() > 0.0);
        assert!(
            at_zero.v_phi.abs() < 0.05 * at_quarter.v_phi.abs(),
            "V_Phi at zero flux: {} vs quarter-flux {}",
            at_zero.v_phi,
            at_quarter.v_phi
        );
    }

    #[test]
    fn divergence_is_reported_with_time() {
        // Step far beyond the stiffness limit 2.78 beta_L / 2.
        let cfg = SimConfig {
            step: 0.1,
            ..SimConfig::default()
        };
        match run_to_steady(&si_params(0.0, 0.005, 0.5, 0.25), &cfg) {
            Err(SimError::Divergence { time }) => assert!(time > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn nonstationary_window_is_flagged() {
        // A window far shorter than the Josephson period cannot pass the
        // split test at a running bias point.
        let cfg = SimConfig {
            averaging_window: 0.5,
            ..SimConfig::default()
        };
        let (op, stats) = steady_stats(&si_params(0.5, 1.0, 2.0, 0.25), &cfg).unwrap();
        assert!(!op.converged);
        assert!(stats.split_delta >= 1e-3);
        match transfer_functions(&si_params(0.5, 1.0, 2.0, 0.25), &cfg) {
            Err(SimError::NotConverged { .. }) => {}
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn ac_response_requires_eight_periods() {
        let p = si_params(0.0, 1.0, 2.0, 0.25);
        // Reduced drive frequency 0.02 has period ~314, so the default
        // window of 2000 holds only 6 periods.
        let omega = 0.02 / p.time_unit();
        match ac_response(&p, &SimConfig::default(), omega) {
            Err(SimError::Config(msg)) => assert!(msg.contains("at least 8")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn ac_response_rejects_fast_drives() {
        let p = si_params(0.0, 1.0, 2.0, 0.25);
        let op = run_to_steady(&p, &SimConfig::default()).unwrap();
        match ac_response(&p, &SimConfig::default(), op.josephson_frequency / 2.0) {
            Err(SimError::InvalidArgument(msg)) => assert!(msg.contains("omega_J/5")),
            other => panic!("expected invalid-argument, got {other:?}"),
        }
    }

    #[test]
    fn ac_response_is_zero_voltage_safe() {
        let p = si_params(0.0, 1.0, 0.5, 0.0);
        match ac_response(&p, &SimConfig::default(), 1e9) {
            Err(SimError::ZeroVoltage) => {}
            other => panic!("expected zero-voltage error, got {other:?}"),
        }
    }

    #[test]
    fn ac_response_vanishes_at_zero_flux() {
        // The flux-to-voltage response is odd around the symmetry point, so
        // a drive at zero dc flux produces (almost) no first-harmonic line.
        let cfg = SimConfig::default();
        let at_zero_params = si_params(0.0, 1.0, 3.0, 0.0);
        let op = run_to_steady(&at_zero_params, &cfg).unwrap();
        let omega = op.josephson_frequency / 20.0;
        let at_zero = ac_response(&at_zero_params, &cfg, omega).unwrap();
        let at_quarter = ac_response(&si_params(0.0, 1.0, 3.0, 0.25), &cfg, omega).unwrap();
        assert!(at_quarter.norm() > 0.0);
        assert!(
            at_zero.norm() < 0.05 * at_quarter.norm(),
            "zero-flux response {} vs quarter-flux {}",
            at_zero.norm(),
            at_quarter.norm()
        );
    }
}
