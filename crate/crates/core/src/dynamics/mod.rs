//! Split-operator wavepacket propagation with perturbative pulse coupling.
//!
//! Each pulse interaction promotes a wavepacket one order up; the signal is
//! read from norms and overlaps of the second- and third-order packets once
//! the probe has passed.

mod cap;
mod propagator;
mod signal;

pub use cap::CapSpec;
pub use propagator::{Manifold, SplitOperator, Wavepacket};
pub use signal::{
    pump_probe_signal, GridEngine, GridOptions, PerturbativeStack, INSTABILITY_TOLERANCE,
    PULSE_WINDOW_WIDTHS,
};
