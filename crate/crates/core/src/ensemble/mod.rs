//! Thermal and orientational averaging.

mod driver;
mod orientation;
mod thermal;

pub use driver::{
    ensemble_pump_probe, grid_for_ensemble, sos_ensemble, Engine, EnsembleRunner, EnsembleSpec, InitialState,
    POPULATION_DEFECT_LIMIT,
};
pub use orientation::{gauss_legendre, isotropic_fourth, OrientationQuadrature, OrientationScheme};
pub use thermal::{thermal_populations, ThermalWeights, THERMAL_CUTOFF};
