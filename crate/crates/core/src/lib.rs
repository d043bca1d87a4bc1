//! Frequency-integrated pump-probe simulation of model vibronic systems and
//! the pulse-duration witness that separates electronic from vibrational
//! coherence.
//!
//! Everything is in reduced units with ħ = ω₀ = 1. The numerical core is
//! generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod pulse;
pub mod real;
pub mod sos;
pub mod units;
pub mod witness;

pub use error::{Error, Result};
pub use real::Real;

pub type VibronicModel = model::VibronicModel<f64>;
pub type DimerParams = model::DimerParams<f64>;
pub type HarmonicSurface = model::HarmonicSurface<f64>;
pub type ModeSurface = model::ModeSurface<f64>;
pub type GridSpec = model::GridSpec<f64>;
pub type FranckCondonMatrix = model::FranckCondonMatrix<f64>;
pub type GaussianPulse = pulse::GaussianPulse<f64>;
pub type CapSpec = dynamics::CapSpec<f64>;
pub type GridOptions = dynamics::GridOptions<f64>;
pub type GridEngine = dynamics::GridEngine<f64>;
pub type SosBasis = sos::SosBasis<f64>;
pub type PumpProbeTrace = sos::PumpProbeTrace<f64>;
pub type ExpansionTerms = sos::ExpansionTerms<f64>;
pub type StickSpectrum = sos::StickSpectrum<f64>;
pub type ThermalWeights = ensemble::ThermalWeights<f64>;
pub type OrientationScheme = ensemble::OrientationScheme<f64>;
pub type EnsembleSpec = ensemble::EnsembleSpec<f64>;
pub type Engine = ensemble::Engine<f64>;
pub type Centering = witness::Centering<f64>;
pub type WitnessCurve = witness::WitnessCurve<f64>;
pub type WitnessOptions = witness::WitnessOptions<f64>;
pub type Recommendation = witness::Recommendation<f64>;
