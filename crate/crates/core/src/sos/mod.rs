//! Sum-over-states engine: absorption, resonance Raman and closed-form
//! pump-probe signals in the vibronic eigenbasis.

mod basis;
mod expansion;
mod pump_probe;
mod spectra;
pub mod special;

pub use basis::{SosBasis, SosOptions, SOS_TRUNCATION_LIMIT};
pub use expansion::{expansion_terms, ExpansionTerms};
pub use pump_probe::{pump_probe_sos, PumpProbeTrace};
pub use spectra::{
    absorption_spectrum, raman_mean, resonance_raman_spectrum, spectral_moments, SpectrumKind,
    StickSpectrum, DEFAULT_RAMAN_GAMMA,
};
