//! Thermally and orientationally averaged pump-probe signals for either engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orientation::{OrientationQuadrature, OrientationScheme};
use super::thermal::{thermal_populations, ThermalWeights, THERMAL_CUTOFF};
use crate::dynamics::{GridEngine, GridOptions};
use crate::error::{Error, Result};
use crate::model::{dot, grid_for_modes, Dipole, VibronicModel};
use crate::pulse::GaussianPulse;
use crate::real::Real;
use crate::sos::{pump_probe_sos, PumpProbeTrace, SosBasis, SosOptions};

/// Largest truncation defect accepted for a thermal ensemble.
pub const POPULATION_DEFECT_LIMIT: f64 = 1e-4;

/// Which initial vibrational states are populated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState<F> {
    /// Boltzmann distribution at thermal energy `k_B T` (units of ħω₀).
    Thermal(F),
    /// One product state with the given quanta per mode.
    Pure(Vec<usize>),
}

/// Initial-state and orientation averaging applied to every signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec<F> {
    pub initial: InitialState<F>,
    pub orientation: OrientationScheme<F>,
}

impl<F: Real> EnsembleSpec<F> {
    /// Zero temperature, one molecule with every pulse polarized along `x`.
    pub fn ground_fixed() -> Self {
        Self {
            initial: InitialState::Thermal(F::zero()),
            orientation: OrientationScheme::fixed_x(),
        }
    }

    pub fn thermal_isotropic(thermal_energy: F) -> Self {
        Self {
            initial: InitialState::Thermal(thermal_energy),
            orientation: OrientationScheme::AnalyticTensor,
        }
    }

    /// Highest quantum per mode that carries population.
    pub fn max_quanta(&self, omega_0: F) -> usize {
        match &self.initial {
            InitialState::Pure(q) => q.iter().copied().max().unwrap_or(0),
            InitialState::Thermal(kt) => {
                if *kt <= F::zero() {
                    0
                } else {
                    let tail = -F::c(THERMAL_CUTOFF).ln();
                    (*kt * tail / omega_0).ceil().to_f64_lossy() as usize
                }
            }
        }
    }
}

/// Propagation engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine<F> {
    SumOverStates(SosOptions),
    Grid(GridOptions<F>),
}

impl<F: Real> Engine<F> {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::SumOverStates(_) => "sos",
            Engine::Grid(_) => "grid",
        }
    }
}

/// Sum-over-states basis covering the populated levels, with populations
/// indexed like its ground states.
pub fn sos_ensemble<F: Real>(
    model: &VibronicModel<F>,
    spec: &EnsembleSpec<F>,
    options: &SosOptions,
) -> Result<(SosBasis<F>, ThermalWeights<F>)> {
    let q = spec.max_quanta(model.omega_0()).max(options.initial_quanta);
    let basis = SosBasis::build(model, &SosOptions { initial_quanta: q, ..*options })?;
    let weights = match &spec.initial {
        InitialState::Pure(quanta) => {
            let n = (0..basis.n_ground())
                .find(|&n| basis.quanta(n) == *quanta)
                .ok_or_else(|| Error::invalid("initial_state", "quanta do not match the model's modes"))?;
            ThermalWeights::pure(basis.n_ground(), n)
        }
        InitialState::Thermal(kt) => {
            let idx = basis.initial_states(q);
            let energies: Vec<F> = idx.iter().map(|&n| basis.ground_energies[n]).collect();
            let local = thermal_populations(&energies, *kt)?;
            check_defect(&local)?;
            let mut weights = vec![F::zero(); basis.n_ground()];
            for (&n, &w) in idx.iter().zip(&local.weights) {
                weights[n] = w;
            }
            ThermalWeights { weights, ..local }
        }
    };
    Ok((basis, weights))
}

fn check_defect<F: Real>(w: &ThermalWeights<F>) -> Result<()> {
    if w.truncation_defect > F::c(POPULATION_DEFECT_LIMIT) {
        return Err(Error::Truncation {
            defect: w.truncation_defect.to_f64_lossy(),
            limit: POPULATION_DEFECT_LIMIT,
        });
    }
    Ok(())
}

/// Populated product states `(quanta, p)` for the grid engine.
fn grid_populations<F: Real>(model: &VibronicModel<F>, spec: &EnsembleSpec<F>) -> Result<Vec<(Vec<usize>, F)>> {
    match &spec.initial {
        InitialState::Pure(q) => Ok(vec![(q.clone(), F::one())]),
        InitialState::Thermal(kt) => {
            let q = spec.max_quanta(model.omega_0());
            let modes = &model.ground.modes;
            let mut states: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in modes {
                states = states
                    .into_iter()
                    .flat_map(|s| {
                        (0..=q).map(move |k| {
                            let mut t = s.clone();
                            t.push(k);
                            t
                        })
                    })
                    .collect();
            }
            let energies: Vec<F> = states
                .iter()
                .map(|s| s.iter().zip(modes).fold(F::zero(), |e, (&k, m)| e + m.level(k)))
                .collect();
            let w = thermal_populations(&energies, *kt)?;
            check_defect(&w)?;
            Ok(states
                .into_iter()
                .zip(w.weights)
                .filter(|(_, p)| *p > F::zero())
                .collect())
        }
    }
}

/// Lab polarizations and weights that reproduce `scheme` for the grid engine.
///
/// A model with a single dipole direction needs one run along that dipole,
/// rescaled by the quartic average of its direction cosine.
fn grid_orientations<F: Real>(model: &VibronicModel<F>, scheme: &OrientationScheme<F>) -> Vec<(Dipole<F>, F)> {
    let single = model.ground_dipoles.len() == 1 && !model.has_doubly_excited();
    if single {
        let d = model.ground_dipoles[0];
        let norm = dot(&d, &d).sqrt();
        if norm > F::zero() {
            let u = [d[0] / norm, d[1] / norm, d[2] / norm];
            return vec![(u, scheme.quad(&u, &u, &u, &u))];
        }
    }
    match scheme {
        OrientationScheme::Fixed(e) => vec![(*e, F::one())],
        OrientationScheme::AnalyticTensor => {
            let q = OrientationQuadrature::quartic();
            q.points.into_iter().zip(q.weights).collect()
        }
        OrientationScheme::Quadrature(q) => q.points.iter().copied().zip(q.weights.iter().copied()).collect(),
    }
}

/// Grid options able to hold every populated level.
///
/// Thermal runs replace a grid that is too coarse by one sized for the
/// highest populated quantum on every surface.
pub fn grid_for_ensemble<F: Real>(model: &VibronicModel<F>, spec: &EnsembleSpec<F>, options: &GridOptions<F>) -> GridOptions<F> {
    if !matches!(spec.initial, InitialState::Thermal(kt) if kt > F::zero()) {
        return *options;
    }
    let q = spec.max_quanta(model.omega_0());
    let mut modes = model.ground.modes.clone();
    for s in &model.excited {
        modes.extend(s.modes.iter().copied());
    }
    let needed = grid_for_modes(&modes, q + 1);
    let g = options.grid;
    let fine_enough = g.spacing <= needed.spacing && g.extent() >= needed.extent();
    if fine_enough {
        *options
    } else {
        GridOptions { grid: needed, ..*options }
    }
}

/// Prepared averaging over initial states and orientations for one model.
pub struct EnsembleRunner<F: Real> {
    backend: Backend<F>,
}

enum Backend<F: Real> {
    Sos {
        basis: SosBasis<F>,
        populations: ThermalWeights<F>,
        orientation: OrientationScheme<F>,
    },
    Grid {
        engine: GridEngine<F>,
        populations: Vec<(Vec<usize>, F)>,
        orientations: Vec<(Dipole<F>, F)>,
    },
}

impl<F: Real> EnsembleRunner<F> {
    pub fn new(model: &VibronicModel<F>, spec: &EnsembleSpec<F>, engine: &Engine<F>) -> Result<Self> {
        let backend = match engine {
            Engine::SumOverStates(opts) => {
                let (basis, populations) = sos_ensemble(model, spec, opts)?;
                Backend::Sos {
                    basis,
                    populations,
                    orientation: spec.orientation.clone(),
                }
            }
            Engine::Grid(opts) => {
                let options = grid_for_ensemble(model, spec, opts);
                Backend::Grid {
                    engine: GridEngine::new(model, options)?,
                    populations: grid_populations(model, spec)?,
                    orientations: grid_orientations(model, &spec.orientation),
                }
            }
        };
        Ok(Self { backend })
    }

    /// Number of independent single-state, single-orientation runs per call.
    pub fn n_runs(&self) -> usize {
        match &self.backend {
            Backend::Sos { populations, .. } => populations.populated().len(),
            Backend::Grid {
                populations,
                orientations,
                ..
            } => populations.len() * orientations.len(),
        }
    }

    /// `Σ_n p_n ⟨S_PP⟩_orientation` for pulses centered at 0 (pump) and `T` (probe).
    pub fn pump_probe(&self, pump: &GaussianPulse<F>, probe: &GaussianPulse<F>, times: &[F]) -> Result<PumpProbeTrace<F>> {
        match &self.backend {
            Backend::Sos {
                basis,
                populations,
                orientation,
            } => pump_probe_sos(basis, pump, probe, times, populations, orientation),
            Backend::Grid {
                engine,
                populations,
                orientations,
            } => {
                let jobs: Vec<(&Vec<usize>, F, &Dipole<F>, F)> = populations
                    .iter()
                    .flat_map(|(q, p)| orientations.iter().map(move |(e, w)| (q, *p, e, *w)))
                    .collect();
                let parts = jobs
                    .par_iter()
                    .map(|&(q, _, e, _)| {
                        let pump = GaussianPulse { polarization: *e, ..*pump };
                        let probe = GaussianPulse { polarization: *e, ..*probe };
                        engine.pump_probe(&pump, &probe, times, q)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut out = PumpProbeTrace::zeros(times);
                for (part, &(_, p, _, w)) in parts.iter().zip(&jobs) {
                    out.accumulate(part, p * w);
                }
                Ok(out)
            }
        }
    }
}

/// Ensemble-averaged `S_PP(T)`: thermal (or pure) initial states, each
/// averaged over orientations, with the chosen engine.
pub fn ensemble_pump_probe<F: Real>(
    model: &VibronicModel<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    spec: &EnsembleSpec<F>,
    engine: &Engine<F>,
) -> Result<PumpProbeTrace<F>> {
    EnsembleRunner::new(model, spec, engine)?.pump_probe(pump, probe, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DimerParams;

    fn monomer() -> VibronicModel<f64> {
        VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap()
    }

    fn times() -> Vec<f64> {
        (0..40).map(|k| 2.0 + 0.25 * k as f64).collect()
    }

    #[test]
    fn thermal_quanta_cover_boltzmann_tail() {
        let spec = EnsembleSpec::thermal_isotropic(2.0);
        let q = spec.max_quanta(1.0);
        assert!((-(q as f64 + 1.0) / 2.0).exp() < 1e-6);
        assert_eq!(EnsembleSpec::<f64>::ground_fixed().max_quanta(1.0), 0);
    }

    #[test]
    fn zero_temperature_fixed_reduces_to_single_run() {
        let m = monomer();
        let p = GaussianPulse::new(5.8, 0.3, 0.0).unwrap();
        let spec = EnsembleSpec::ground_fixed();
        let sos = ensemble_pump_probe(&m, &p, &p, &times(), &spec, &Engine::SumOverStates(SosOptions::default())).unwrap();
        let b = SosBasis::build(&m, &SosOptions::default()).unwrap();
        let direct = pump_probe_sos(&b, &p, &p, &times(), &ThermalWeights::pure(b.n_ground(), 0), &OrientationScheme::fixed_x()).unwrap();
        assert_eq!(sos.total, direct.total);

        let grid = ensemble_pump_probe(&m, &p, &p, &times(), &spec, &Engine::Grid(GridOptions::default())).unwrap();
        let bare = crate::dynamics::pump_probe_signal(&m, &p, &p, &times(), &[0], &GridOptions::default()).unwrap();
        assert_eq!(grid.total, bare.total);
    }

    #[test]
    fn monomer_isotropic_average_is_one_fifth() {
        let m = monomer();
        let p = GaussianPulse::new(5.8, 0.3, 0.0).unwrap();
        let engine = Engine::SumOverStates(SosOptions::default());
        let fixed = ensemble_pump_probe(&m, &p, &p, &times(), &EnsembleSpec::ground_fixed(), &engine).unwrap();
        let iso_spec = EnsembleSpec {
            initial: InitialState::Thermal(0.0),
            orientation: OrientationScheme::AnalyticTensor,
        };
        let iso = ensemble_pump_probe(&m, &p, &p, &times(), &iso_spec, &engine).unwrap();
        for (a, b) in iso.total.iter().zip(&fixed.total) {
            assert!((a - b / 5.0).abs() < 1e-10 * b.abs());
        }
    }

    #[test]
    fn thermal_sos_equals_weighted_sum_of_pure_states() {
        let m = monomer();
        let p = GaussianPulse::new(5.8, 0.3, 0.0).unwrap();
        let engine = Engine::SumOverStates(SosOptions::default());
        let kt = 0.5;
        let thermal = ensemble_pump_probe(&m, &p, &p, &times(), &EnsembleSpec::thermal_isotropic(kt), &engine).unwrap();
        let q = EnsembleSpec::thermal_isotropic(kt).max_quanta(1.0);
        let levels: Vec<f64> = (0..=q).map(|n| n as f64 + 0.5).collect();
        let w = thermal_populations(&levels, kt).unwrap();
        let mut sum = PumpProbeTrace::zeros(&times());
        for (n, p_n) in w.populated() {
            let spec = EnsembleSpec {
                initial: InitialState::Pure(vec![n]),
                orientation: OrientationScheme::AnalyticTensor,
            };
            let part = ensemble_pump_probe(&m, &p, &p, &times(), &spec, &engine).unwrap();
            sum.accumulate(&part, p_n);
        }
        for (a, b) in thermal.total.iter().zip(&sum.total) {
            assert!((a - b).abs() < 1e-9 * b.abs(), "{a} {b}");
        }
    }

    #[test]
    fn dimer_grid_isotropic_average_matches_analytic_tensor() {
        let m = VibronicModel::build_dimer(&DimerParams::reference(5.0)).unwrap();
        let p = GaussianPulse::new(6.4, 0.3, 0.0).unwrap();
        let t: Vec<f64> = (0..4).map(|k| 2.0 + 0.7 * k as f64).collect();
        let spec = EnsembleSpec::thermal_isotropic(0.0);
        let sos = ensemble_pump_probe(&m, &p, &p, &t, &spec, &Engine::SumOverStates(SosOptions::default())).unwrap();
        let grid = ensemble_pump_probe(&m, &p, &p, &t, &spec, &Engine::Grid(GridOptions::default())).unwrap();
        let scale = sos.total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in grid.total.iter().zip(&sos.total) {
            assert!((a - b).abs() < 1e-3 * scale, "{a} {b}");
        }
    }

    #[test]
    fn thermal_grid_is_resized() {
        let m = monomer();
        let spec = EnsembleSpec::thermal_isotropic(2.0);
        let g = grid_for_ensemble(&m, &spec, &GridOptions::default());
        assert!(g.grid.points_per_mode >= 64);
        let pure = EnsembleSpec::<f64>::ground_fixed();
        assert_eq!(grid_for_ensemble(&m, &pure, &GridOptions::default()), GridOptions::default());
    }
}
