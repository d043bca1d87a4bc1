use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// One harmonic vibrational mode of an electronic potential surface,
/// `V(x) = ω²(x − d)²/2` in mass-weighted coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSurface<F> {
    pub frequency: F,
    pub shift: F,
}

impl<F: Real> ModeSurface<F> {
    pub fn new(frequency: F, shift: F) -> Result<Self> {
        if !(frequency > F::zero()) || !frequency.is_finite() {
            return Err(Error::invalid(
                "frequency",
                format!("vibrational frequency must be positive, got {frequency}"),
            ));
        }
        if !shift.is_finite() {
            return Err(Error::invalid("shift", "equilibrium shift must be finite"));
        }
        Ok(Self { frequency, shift })
    }

    pub fn undisplaced(frequency: F) -> Result<Self> {
        Self::new(frequency, F::zero())
    }

    #[inline]
    pub fn potential(&self, x: F) -> F {
        let d = x - self.shift;
        F::half() * self.frequency * self.frequency * d * d
    }

    /// `(n + ½)ω`.
    pub fn level(&self, n: usize) -> F {
        (F::from_usize_lossy(n) + F::half()) * self.frequency
    }
}

/// Electronic potential surface: an energy offset plus one harmonic term per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSurface<F> {
    pub offset: F,
    pub modes: Vec<ModeSurface<F>>,
}

impl<F: Real> HarmonicSurface<F> {
    pub fn new(offset: F, modes: Vec<ModeSurface<F>>) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::invalid("offset", "electronic offset must be finite"));
        }
        if modes.is_empty() {
            return Err(Error::invalid("modes", "surface needs at least one mode"));
        }
        Ok(Self { offset, modes })
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Potential at a point given one coordinate per mode.
    pub fn potential(&self, x: &[F]) -> F {
        self.modes
            .iter()
            .zip(x)
            .fold(self.offset, |acc, (m, &xi)| acc + m.potential(xi))
    }

    /// Harmonic zero-point energy plus offset.
    pub fn zero_point(&self) -> F {
        self.modes
            .iter()
            .fold(self.offset, |acc, m| acc + F::half() * m.frequency)
    }
}

/// Equilibrium shift for a Huang-Rhys factor, using `S = ω₀Δ²/2`.
pub fn shift_from_huang_rhys<F: Real>(huang_rhys: F, omega0: F) -> F {
    (F::two() * huang_rhys / omega0).sqrt()
}

/// Inverse of [`shift_from_huang_rhys`].
pub fn huang_rhys_from_shift<F: Real>(shift: F, omega0: F) -> F {
    F::half() * omega0 * shift * shift
}
