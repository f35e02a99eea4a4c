use thiserror::Error;

/// Failure modes surfaced by the simulator.
///
/// Parameter validation failures name the offending field and the violated
/// constraint so a caller can report them without re-deriving context.
#[derive(Debug, Error)]
pub enum SimError {
    /// A physical parameter violates its admissibility constraint.
    #[error("invalid parameter `{name}`: must satisfy {constraint}, got {value}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// An operation argument (not a stored parameter) is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The junction phases blew up; reports the dimensionless time at which
    /// the non-finite value was first observed.
    #[error("integration diverged at dimensionless time {time:.3}; reduce the step size")]
    Divergence { time: f64 },

    /// The time average failed the split-window stationarity test.
    #[error(
        "mean voltage did not converge at flux {flux_frac:.6} (in flux-quantum units): \
         half-window means differ by {delta:.3e}; lengthen the averaging window"
    )]
    NotConverged { flux_frac: f64, delta: f64 },

    /// Minimisation bracket collapsed onto a sweep boundary.
    #[error("resonance search hit the {boundary} edge of the frequency bracket; widen it")]
    Bracket { boundary: &'static str },

    /// The loaded impedance vanished, so the gain expression is singular.
    #[error("loaded impedance magnitude {abs_z:.3e} ohm is below the singularity guard")]
    SingularGain { abs_z: f64 },

    /// Bias point sits on the supercurrent branch: no Josephson oscillation,
    /// so frequency-referred quantities are undefined there.
    #[error("bias point has zero mean voltage; transfer and gain are undefined on this branch")]
    ZeroVoltage,

    /// Configuration file problem (missing key, unparsable value, unknown key).
    #[error("config error: {0}")]
    Config(String),
}
