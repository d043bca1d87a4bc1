//! Pulse parameters suggested by the linear spectra.

use serde::{Deserialize, Serialize};

use crate::ensemble::{sos_ensemble, EnsembleSpec};
use crate::error::{Error, Result};
use crate::model::VibronicModel;
use crate::pulse::fwhm_of_sigma;
use crate::real::Real;
use crate::sos::{absorption_spectrum, raman_mean, resonance_raman_spectrum, SosOptions, StickSpectrum};

/// How the common pump/probe carrier frequency is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering<F> {
    AbsorptionMean,
    RamanMean,
    /// Halfway between the absorption and Raman means.
    Midpoint,
    Manual(F),
}

impl<F: Real> Centering<F> {
    pub fn label(&self) -> String {
        match self {
            Centering::AbsorptionMean => "absorption_mean".into(),
            Centering::RamanMean => "raman_mean".into(),
            Centering::Midpoint => "midpoint".into(),
            Centering::Manual(w) => format!("manual({w})"),
        }
    }
}

/// Spectral moments and the pulse settings derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation<F> {
    pub centering: Centering<F>,
    pub center_frequency: F,
    /// `T_A = 1/(10 Σ_A)`; absent when the absorption spectrum is a single line.
    pub sigma_max: Option<F>,
    pub fwhm_max: Option<F>,
    pub absorption_mean: F,
    pub absorption_variance: F,
    pub raman_mean: F,
    pub advisory: Option<String>,
}

/// Linear spectra of an ensemble, computed on the sum-over-states basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSpectra<F> {
    pub absorption: StickSpectrum<F>,
    pub raman: StickSpectrum<F>,
}

pub fn linear_spectra<F: Real>(
    model: &VibronicModel<F>,
    ensemble: &EnsembleSpec<F>,
    sos: &SosOptions,
    raman_gamma: F,
) -> Result<LinearSpectra<F>> {
    let (basis, populations) = sos_ensemble(model, ensemble, sos)?;
    Ok(LinearSpectra {
        absorption: absorption_spectrum(&basis, &populations, &ensemble.orientation),
        raman: resonance_raman_spectrum(&basis, &populations, &ensemble.orientation, raman_gamma)?,
    })
}

/// `T_A = 1/(10 Σ_A)`, or `None` for a vanishing width.
pub fn absorption_time<F: Real>(absorption_variance: F) -> Option<F> {
    let width = absorption_variance.max(F::zero()).sqrt();
    (width > F::zero()).then(|| F::one() / (F::c(10.0) * width))
}

/// Relative absorption width below which a spectrum counts as one line.
const SINGLE_LINE_WIDTH: f64 = 1e-9;

impl<F: Real> Recommendation<F> {
    pub fn from_spectra(spectra: &LinearSpectra<F>, centering: Centering<F>) -> Result<Self> {
        let (abs_mean, abs_var) = spectra.absorption.moments()?;
        let r_mean = raman_mean(&spectra.raman)?;
        let center_frequency = match centering {
            Centering::AbsorptionMean => abs_mean,
            Centering::RamanMean => r_mean,
            Centering::Midpoint => (abs_mean + r_mean) * F::half(),
            Centering::Manual(w) => {
                if !w.is_finite() {
                    return Err(Error::invalid("center_frequency", "must be finite"));
                }
                w
            }
        };
        let single_line = abs_var.max(F::zero()).sqrt() <= F::c(SINGLE_LINE_WIDTH) * abs_mean.abs();
        let sigma_max = if single_line { None } else { absorption_time(abs_var) };
        let advisory = sigma_max
            .is_none()
            .then(|| "no vibronic structure: absorption is a single line, T_A is unbounded".to_string());
        Ok(Self {
            centering,
            center_frequency,
            sigma_max,
            fwhm_max: sigma_max.map(fwhm_of_sigma),
            absorption_mean: abs_mean,
            absorption_variance: abs_var,
            raman_mean: r_mean,
            advisory,
        })
    }
}

/// Carrier frequency and longest pulse duration suggested by the spectra.
pub fn recommend_parameters<F: Real>(
    model: &VibronicModel<F>,
    ensemble: &EnsembleSpec<F>,
    centering: Centering<F>,
    sos: &SosOptions,
    raman_gamma: F,
) -> Result<Recommendation<F>> {
    Recommendation::from_spectra(&linear_spectra(model, ensemble, sos, raman_gamma)?, centering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sos::DEFAULT_RAMAN_GAMMA;

    fn recommend(we: f64, s: f64, c: Centering<f64>) -> Recommendation<f64> {
        let m = VibronicModel::build_monomer(we, s, 1.0, 5.0).unwrap();
        recommend_parameters(&m, &EnsembleSpec::ground_fixed(), c, &SosOptions::default(), DEFAULT_RAMAN_GAMMA).unwrap()
    }

    #[test]
    fn poisson_width_sets_absorption_time() {
        let r = recommend(1.0, 0.02, Centering::AbsorptionMean);
        // Poisson progression: variance S ω₀², mean offset + ω/2 shift + S ω₀.
        assert!((r.absorption_variance - 0.02).abs() < 1e-8);
        assert!((r.absorption_mean - 5.02).abs() < 1e-8);
        let ta = 1.0 / (10.0 * 0.02f64.sqrt());
        assert!((r.sigma_max.unwrap() - ta).abs() < 1e-6);
        assert!((r.fwhm_max.unwrap() - 2.0 * (2.0 * 2f64.ln()).sqrt() * ta).abs() < 1e-6);
        assert_eq!(r.center_frequency, r.absorption_mean);
    }

    #[test]
    fn undisplaced_gives_advisory() {
        let r = recommend(1.0, 0.0, Centering::AbsorptionMean);
        assert!(r.sigma_max.is_none() && r.fwhm_max.is_none());
        assert!(r.advisory.is_some());
    }

    #[test]
    fn soft_excited_mode_red_shifts_raman() {
        let r = recommend(0.5, 0.02, Centering::Midpoint);
        assert!(r.raman_mean < r.absorption_mean);
        assert!((r.center_frequency - 0.5 * (r.raman_mean + r.absorption_mean)).abs() < 1e-12);
    }
}
