//! Witness analysis: how the strength of pump-probe oscillations depends on
//! pulse duration, and what that says about the origin of the coherence.

mod curve;
mod measure;
mod recommend;

pub use curve::{
    classify_coherence, default_sigma_ladder, estimate_witness_time, log_ladder, window_times, witness_curve,
    witness_curve_at, CoherenceClass, WitnessCurve, WitnessOptions, WitnessPoint, WitnessTime,
    DEFAULT_SLOPE_TOLERANCE, NOISE_FLOOR, WITNESS_BASIS_DEFECT,
};
pub use measure::{fourier_peak_amplitude, oscillation_strength, overlap_cutoff};
pub use recommend::{
    absorption_time, linear_spectra, recommend_parameters, Centering, LinearSpectra, Recommendation,
};
