//! Conversion between reduced units (ħ = ω₀ = 1) and laboratory units.

use serde::{Deserialize, Serialize};

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.997_924_58e-5;

/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_CM_PER_K: f64 = 0.695_034_8;

/// `2√(2 ln 2)`, the ratio between a Gaussian's FWHM and its standard deviation.
pub fn fwhm_factor() -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt()
}

/// Physical scale attached to a reduced-unit calculation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    /// Ground-state vibrational wavenumber ω₀ in cm⁻¹.
    pub omega0_wavenumber: f64,
}

impl PhysicalUnits {
    pub fn new(omega0_wavenumber: f64) -> Self {
        Self { omega0_wavenumber }
    }

    /// Femtoseconds per reduced time unit, `1/(2πc·ω₀)`.
    pub fn time_unit_fs(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_FS * self.omega0_wavenumber)
    }

    pub fn to_fs(&self, t: f64) -> f64 {
        t * self.time_unit_fs()
    }

    pub fn from_fs(&self, t_fs: f64) -> f64 {
        t_fs / self.time_unit_fs()
    }

    /// Reduced frequency → cm⁻¹.
    pub fn to_wavenumber(&self, w: f64) -> f64 {
        w * self.omega0_wavenumber
    }

    /// Thermal energy `k_B T` in units of ħω₀.
    pub fn thermal_energy(&self, kelvin: f64) -> f64 {
        BOLTZMANN_CM_PER_K * kelvin / self.omega0_wavenumber
    }
}
