//! Gaussian laser pulses.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dipole;
use crate::real::{cis, Real};

/// `ε(t) = η/√(2πσ²) · e^{−iω_Q(t−t_Q)} · e^{−(t−t_Q)²/2σ²}` with a fixed
/// linear polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse<F> {
    pub strength: F,
    pub center_freq: F,
    pub sigma: F,
    pub center_time: F,
    pub polarization: Dipole<F>,
}

impl<F: Real> GaussianPulse<F> {
    pub fn new(center_freq: F, sigma: F, center_time: F) -> Result<Self> {
        Self::polarized(
            F::one(),
            center_freq,
            sigma,
            center_time,
            [F::one(), F::zero(), F::zero()],
        )
    }

    pub fn polarized(
        strength: F,
        center_freq: F,
        sigma: F,
        center_time: F,
        polarization: Dipole<F>,
    ) -> Result<Self> {
        if !(sigma > F::zero()) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("pulse duration must be positive, got {sigma}")));
        }
        if !center_freq.is_finite() || !center_time.is_finite() || !strength.is_finite() {
            return Err(Error::invalid("pulse", "pulse parameters must be finite"));
        }
        let norm = polarization.iter().fold(F::zero(), |a, &c| a + c * c).sqrt();
        if !(norm > F::zero()) {
            return Err(Error::invalid("polarization", "polarization must be non-zero"));
        }
        Ok(Self {
            strength,
            center_freq,
            sigma,
            center_time,
            polarization: polarization.map(|c| c / norm),
        })
    }

    /// Same pulse moved to a new center time.
    pub fn at(&self, center_time: F) -> Self {
        Self { center_time, ..*self }
    }

    /// Real envelope `η/√(2πσ²)·e^{−τ²/2σ²}` at `τ = t − t_Q`.
    pub fn envelope(&self, t: F) -> F {
        let tau = t - self.center_time;
        let s2 = self.sigma * self.sigma;
        self.strength / (F::two_pi() * s2).sqrt() * (-(tau * tau) / (F::two() * s2)).exp()
    }

    /// Positive-frequency field in the time domain.
    pub fn field_time(&self, t: F) -> Complex<F> {
        cis(-self.center_freq * (t - self.center_time)) * self.envelope(t)
    }

    /// `ε(ω) = η e^{−σ²(ω−ω_Q)²/2}`.
    pub fn field_freq(&self, omega: F) -> F {
        let d = omega - self.center_freq;
        self.strength * (-(self.sigma * self.sigma * d * d) * F::half()).exp()
    }
}

/// `2√(2 ln 2)·σ`.
pub fn fwhm_of_sigma<F: Real>(sigma: F) -> F {
    F::c(crate::units::fwhm_factor()) * sigma
}

pub fn sigma_of_fwhm<F: Real>(fwhm: F) -> F {
    fwhm / F::c(crate::units::fwhm_factor())
}
