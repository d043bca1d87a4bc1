//! Run configuration: a JSON tree with `system`, `pulses`, `ensemble`,
//! `numerics`, `output` and optional `sweep` blocks.
//!
//! Everything except the system block has defaults. After loading, the
//! resolved config (defaults filled in) is what gets hashed and echoed into
//! every result record.

use std::path::Path;

use serde::{Deserialize, Serialize};
use witness_core::ensemble::{InitialState, OrientationQuadrature};
use witness_core::model::GridSpec;
use witness_core::sos::{SosOptions, DEFAULT_RAMAN_GAMMA};
use witness_core::units::PhysicalUnits;
use witness_core::witness::{default_sigma_ladder, WITNESS_BASIS_DEFECT};
use witness_core::{
    CapSpec, Centering, DimerParams, Engine, EnsembleSpec, GridOptions, OrientationScheme, VibronicModel,
    WitnessOptions,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemBlock,
    #[serde(default)]
    pub pulses: PulsesBlock,
    #[serde(default)]
    pub ensemble: EnsembleBlock,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomer: Option<MonomerBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimer: Option<DimerBlock>,
    /// Ground-state vibrational wavenumber in cm⁻¹; enables fs and K.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_cm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomerBlock {
    pub omega_e: f64,
    pub huang_rhys: f64,
    #[serde(default = "one")]
    pub omega_0: f64,
    /// Electronic energy gap.
    #[serde(default = "five")]
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimerBlock {
    pub site_energy: f64,
    pub energy_gap: f64,
    pub coupling: f64,
    pub omega_e1: f64,
    pub omega_e2: f64,
    pub huang_rhys_1: f64,
    pub huang_rhys_2: f64,
    pub omega_0: f64,
}

impl Default for DimerBlock {
    fn default() -> Self {
        let p = DimerParams::reference(5.0);
        Self {
            site_energy: p.site_energy,
            energy_gap: p.energy_gap,
            coupling: p.coupling,
            omega_e1: p.omega_e1,
            omega_e2: p.omega_e2,
            huang_rhys_1: p.huang_rhys_1,
            huang_rhys_2: p.huang_rhys_2,
            omega_0: p.omega_0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringSpec {
    AbsorptionMean,
    RamanMean,
    Midpoint,
    Manual(f64),
}

impl CenteringSpec {
    pub const ALL_SPECTRAL: [CenteringSpec; 3] =
        [CenteringSpec::AbsorptionMean, CenteringSpec::RamanMean, CenteringSpec::Midpoint];

    pub fn to_core(self) -> Centering {
        match self {
            CenteringSpec::AbsorptionMean => Centering::AbsorptionMean,
            CenteringSpec::RamanMean => Centering::RamanMean,
            CenteringSpec::Midpoint => Centering::Midpoint,
            CenteringSpec::Manual(w) => Centering::Manual(w),
        }
    }

    pub fn label(self) -> String {
        self.to_core().label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeAxis {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulsesBlock {
    pub centering: CenteringSpec,
    /// Pulse durations σ in ω₀⁻¹. At most one of the three ladders may be set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    /// Amplitude-envelope FWHM in ω₀⁻¹.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm: Option<Vec<f64>>,
    /// Amplitude-envelope FWHM in fs; needs `system.omega0_cm`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_fs: Option<Vec<f64>>,
    /// Waiting times for `pumpprobe`; defaults to the overlap cutoff .. 20.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waiting_times: Option<TimeAxis>,
    pub t_final: f64,
    pub sample_step: f64,
    pub strength: f64,
}

impl Default for PulsesBlock {
    fn default() -> Self {
        let w = WitnessOptions::default();
        Self {
            centering: CenteringSpec::AbsorptionMean,
            sigmas: None,
            fwhm: None,
            fwhm_fs: None,
            waiting_times: None,
            t_final: w.t_final,
            sample_step: w.sample_step,
            strength: w.strength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    /// All pulses along x.
    Fixed,
    /// All pulses along the given lab vector.
    Polarized([f64; 3]),
    /// Exact isotropic average.
    Isotropic,
    /// Isotropic average over the 15-point quartic rule.
    Quartic,
    /// Isotropic average over `n` Fibonacci-sphere points.
    Fibonacci(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    /// `k_B T` in units of ħω₀.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal_energy: Option<f64>,
    pub orientation: OrientationSpec,
    /// Quanta per mode of a single initial product state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<usize>>,
}

impl Default for EnsembleBlock {
    fn default() -> Self {
        Self {
            temperature_k: None,
            thermal_energy: None,
            orientation: OrientationSpec::Fixed,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsBlock {
    pub grid_points: usize,
    pub grid_spacing: f64,
    pub dt: f64,
    pub horizon: f64,
    pub cap: bool,
    /// Basis defect target for spectra and `pumpprobe`.
    pub sos_target_defect: f64,
    /// Basis defect target for witness scans.
    pub witness_target_defect: f64,
    pub sos_max_quanta: usize,
    pub raman_gamma: f64,
    pub slope_tolerance: f64,
    /// Gaussian width used for the broadened spectra.
    pub broadening: f64,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        let g = GridOptions::default();
        Self {
            grid_points: g.grid.points_per_mode,
            grid_spacing: g.grid.spacing,
            dt: g.dt,
            horizon: g.horizon,
            cap: g.cap.is_some(),
            sos_target_defect: SosOptions::default().target_defect,
            witness_target_defect: WITNESS_BASIS_DEFECT,
            sos_max_quanta: SosOptions::default().max_quanta,
            raman_gamma: DEFAULT_RAMAN_GAMMA,
            slope_tolerance: witness_core::witness::DEFAULT_SLOPE_TOLERANCE,
            broadening: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: String,
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputBlock {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    OmegaE,
    HuangRhys,
    Centering,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Centering(CenteringSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

fn one() -> f64 {
    1.0
}

fn five() -> f64 {
    5.0
}

fn config_error(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {reason}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates; errors name the offending field and position.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            CliError::Config(format!(
                "`{}` (line {}, column {}): {inner}",
                e.path(),
                inner.line(),
                inner.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        match (&self.system.monomer, &self.system.dimer) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(config_error("system", "exactly one of `monomer` or `dimer` is required")),
        }
        if let Some(w) = self.system.omega0_cm {
            if !(w > 0.0 && w.is_finite()) {
                return Err(config_error("system.omega0_cm", "must be positive"));
            }
        }
        let p = &self.pulses;
        let ladders = [p.sigmas.is_some(), p.fwhm.is_some(), p.fwhm_fs.is_some()];
        if ladders.iter().filter(|&&b| b).count() > 1 {
            return Err(config_error("pulses", "set at most one of `sigmas`, `fwhm`, `fwhm_fs`"));
        }
        for (name, ladder) in [("pulses.sigmas", &p.sigmas), ("pulses.fwhm", &p.fwhm), ("pulses.fwhm_fs", &p.fwhm_fs)] {
            if let Some(l) = ladder {
                if l.is_empty() {
                    return Err(config_error(name, "ladder must not be empty"));
                }
                if l.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                    return Err(config_error(name, "durations must be positive"));
                }
            }
        }
        if p.fwhm_fs.is_some() && self.system.omega0_cm.is_none() {
            return Err(config_error("pulses.fwhm_fs", "needs `system.omega0_cm`"));
        }
        if let Some(t) = &p.waiting_times {
            if !(t.step > 0.0 && t.to > t.from) {
                return Err(config_error("pulses.waiting_times", "need `to > from` and `step > 0`"));
            }
        }
        let e = &self.ensemble;
        let initial_kinds = [e.temperature_k.is_some(), e.thermal_energy.is_some(), e.initial.is_some()];
        if initial_kinds.iter().filter(|&&b| b).count() > 1 {
            return Err(config_error(
                "ensemble",
                "set at most one of `temperature_k`, `thermal_energy`, `initial`",
            ));
        }
        if e.temperature_k.is_some() && self.system.omega0_cm.is_none() {
            return Err(config_error("ensemble.temperature_k", "needs `system.omega0_cm`"));
        }
        if let Some(q) = &e.initial {
            let modes = if self.system.dimer.is_some() { 2 } else { 1 };
            if q.len() != modes {
                return Err(config_error("ensemble.initial", format!("expected {modes} quanta, got {}", q.len())));
            }
        }
        if !self.output.formats.iter().any(|&f| f == Format::Csv || f == Format::Json) {
            return Err(config_error("output.formats", "need at least one format"));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(config_error("sweep.values", "must not be empty"));
            }
            let numeric = s.values.iter().all(|v| matches!(v, SweepValue::Number(_)));
            let centering = s.values.iter().all(|v| matches!(v, SweepValue::Centering(_)));
            match s.axis {
                SweepAxis::OmegaE | SweepAxis::HuangRhys if !numeric => {
                    return Err(config_error("sweep.values", "numeric axis needs numbers"))
                }
                SweepAxis::Centering if !centering => {
                    return Err(config_error("sweep.values", "centering axis needs centering names"))
                }
                SweepAxis::OmegaE | SweepAxis::HuangRhys if self.system.monomer.is_none() => {
                    return Err(config_error("sweep.axis", "numeric axes apply to the monomer"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn units(&self) -> Option<PhysicalUnits> {
        self.system.omega0_cm.map(PhysicalUnits::new)
    }

    pub fn model(&self) -> Result<VibronicModel, CliError> {
        let model = match (&self.system.monomer, &self.system.dimer) {
            (Some(m), _) => VibronicModel::build_monomer(m.omega_e, m.huang_rhys, m.omega_0, m.energy),
            (_, Some(d)) => VibronicModel::build_dimer(&DimerParams {
                site_energy: d.site_energy,
                energy_gap: d.energy_gap,
                coupling: d.coupling,
                omega_e1: d.omega_e1,
                omega_e2: d.omega_e2,
                huang_rhys_1: d.huang_rhys_1,
                huang_rhys_2: d.huang_rhys_2,
                omega_0: d.omega_0,
            }),
            _ => unreachable!("validated"),
        };
        Ok(model?)
    }

    /// σ ladder in ω₀⁻¹, sorted ascending.
    pub fn sigma_ladder(&self) -> Vec<f64> {
        let factor = witness_core::units::fwhm_factor();
        let p = &self.pulses;
        let mut ladder = if let Some(s) = &p.sigmas {
            s.clone()
        } else if let Some(f) = &p.fwhm {
            f.iter().map(|v| v / factor).collect()
        } else if let Some(f) = &p.fwhm_fs {
            let u = self.units().expect("validated");
            f.iter().map(|&v| u.from_fs(v) / factor).collect()
        } else {
            default_sigma_ladder()
        };
        ladder.sort_by(f64::total_cmp);
        ladder.dedup();
        ladder
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let e = &self.ensemble;
        let initial = if let Some(q) = &e.initial {
            InitialState::Pure(q.clone())
        } else if let Some(kelvin) = e.temperature_k {
            InitialState::Thermal(self.units().expect("validated").thermal_energy(kelvin))
        } else {
            InitialState::Thermal(e.thermal_energy.unwrap_or(0.0))
        };
        let orientation = match e.orientation {
            OrientationSpec::Fixed => OrientationScheme::fixed_x(),
            OrientationSpec::Polarized(v) => OrientationScheme::Fixed(v),
            OrientationSpec::Isotropic => OrientationScheme::AnalyticTensor,
            OrientationSpec::Quartic => OrientationScheme::Quadrature(OrientationQuadrature::quartic()),
            OrientationSpec::Fibonacci(n) => OrientationScheme::Quadrature(OrientationQuadrature::fibonacci(n)),
        };
        EnsembleSpec { initial, orientation }
    }

    pub fn sos_options(&self, target_defect: f64) -> SosOptions {
        SosOptions {
            target_defect,
            max_quanta: self.numerics.sos_max_quanta,
            ..SosOptions::default()
        }
    }

    pub fn grid_options(&self) -> Result<GridOptions, CliError> {
        let n = &self.numerics;
        Ok(GridOptions {
            grid: GridSpec::new(n.grid_points, n.grid_spacing)?,
            dt: n.dt,
            horizon: n.horizon,
            cap: n.cap.then(CapSpec::eckart_default),
        })
    }

    pub fn engine(&self, kind: EngineKind, target_defect: f64) -> Result<Engine, CliError> {
        Ok(match kind {
            EngineKind::Sos => Engine::SumOverStates(self.sos_options(target_defect)),
            EngineKind::Grid => Engine::Grid(self.grid_options()?),
        })
    }

    pub fn witness_options(&self, kind: EngineKind) -> Result<WitnessOptions, CliError> {
        let target = self.numerics.witness_target_defect;
        Ok(WitnessOptions {
            engine: self.engine(kind, target)?,
            ensemble: self.ensemble_spec(),
            t_final: self.pulses.t_final,
            sample_step: self.pulses.sample_step,
            strength: self.pulses.strength,
            sos: self.sos_options(target),
            raman_gamma: self.numerics.raman_gamma,
        })
    }

    /// Same config with one monomer parameter replaced.
    pub fn with_monomer(&self, axis: SweepAxis, value: f64) -> Self {
        let mut c = self.clone();
        let m = c.system.monomer.as_mut().expect("validated");
        match axis {
            SweepAxis::OmegaE => m.omega_e = value,
            SweepAxis::HuangRhys => m.huang_rhys = value,
            SweepAxis::Centering => {}
        }
        c.sweep = None;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Grid,
    Sos,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Grid => "grid",
            EngineKind::Sos => "sos",
        }
    }
}
