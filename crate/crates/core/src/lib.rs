//! Small-signal model of a dc SQUID coupled to a microstrip resonator.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] holds the physical parameter sets and the dimensionless
//!   reduction used by the integrator.
//! * [`transmission_line`] computes the resonant mode spectrum of the strip
//!   and the per-mode lumped equivalents.
//! * [`input_circuit`] evaluates the complex input impedance of the strip
//!   plus coupling capacitor network, with and without the SQUID reflected
//!   back into it.
//! * [`squid_dynamics`] integrates the two-junction equations of motion and
//!   extracts dc characteristics and small-signal transfer functions.
//! * [`gain_analysis`] combines the two sides into amplifier gain, screening
//!   and the linear-response cross-checks.

pub mod error;
pub mod gain_analysis;
pub mod input_circuit;
pub mod params;
pub mod squid_dynamics;
pub mod transmission_line;

pub use error::SimError;
pub use params::{
    DimensionlessSquid, InputCircuitParams, SimConfig, SquidParams, StriplineParams, FLUX_QUANTUM,
};
