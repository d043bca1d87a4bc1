//! Witness plots: oscillation strength against pulse duration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{gamma_and_mean, overlap_cutoff};
use super::recommend::{linear_spectra, Centering, Recommendation};
use crate::dynamics::PULSE_WINDOW_WIDTHS;
use crate::ensemble::{Engine, EnsembleRunner, EnsembleSpec};
use crate::error::{Error, Result};
use crate::model::VibronicModel;
use crate::pulse::GaussianPulse;
use crate::real::Real;
use crate::sos::{SosOptions, DEFAULT_RAMAN_GAMMA};

/// Slopes within `±tol·max Γ / (σ range)` count as flat.
pub const DEFAULT_SLOPE_TOLERANCE: f64 = 1e-3;

/// `Γ` below `10⁻¹⁰ · S̄² · window` is treated as no oscillation at all.
pub const NOISE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint<F> {
    pub sigma: F,
    pub gamma: F,
    /// Window mean `S̄` of the trace.
    pub mean_signal: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCurve<F> {
    pub points: Vec<WitnessPoint<F>>,
    pub t_min_used: F,
    pub t_final_used: F,
    pub centering: Centering<F>,
    pub center_frequency: F,
}

impl<F: Real> WitnessCurve<F> {
    pub fn sigmas(&self) -> Vec<F> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn gammas(&self) -> Vec<F> {
        self.points.iter().map(|p| p.gamma).collect()
    }

    pub fn max_gamma(&self) -> F {
        self.points.iter().fold(F::zero(), |m, p| m.max(p.gamma))
    }

    /// Finite-difference slopes `ΔΓ/Δσ` between neighbouring points.
    pub fn slopes(&self) -> Vec<F> {
        self.points
            .windows(2)
            .map(|w| (w[1].gamma - w[0].gamma) / (w[1].sigma - w[0].sigma))
            .collect()
    }

    /// Sign of each slope: `+1`, `−1`, or `0` when within tolerance.
    pub fn slope_signs(&self, slope_tol: F) -> Vec<i8> {
        let (first, last) = (self.points[0].sigma, self.points[self.points.len() - 1].sigma);
        let thr = slope_tol * self.max_gamma() / (last - first);
        self.slopes()
            .into_iter()
            .map(|s| if s > thr { 1 } else if s < -thr { -1 } else { 0 })
            .collect()
    }

    /// True when no point rises above the quadrature noise floor.
    pub fn below_noise_floor(&self) -> bool {
        let window = self.t_final_used - self.t_min_used;
        let floor = self
            .points
            .iter()
            .fold(F::zero(), |m, p| m.max(p.mean_signal * p.mean_signal))
            * window
            * F::c(NOISE_FLOOR);
        self.max_gamma() <= floor
    }
}

/// Numerical settings of a witness scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessOptions<F> {
    pub engine: Engine<F>,
    pub ensemble: EnsembleSpec<F>,
    /// Upper end of the Γ window.
    pub t_final: F,
    /// Target waiting-time step; adjusted so the window holds whole steps.
    pub sample_step: F,
    pub strength: F,
    /// Basis controls for the spectra that fix the carrier frequency.
    pub sos: SosOptions,
    pub raman_gamma: F,
}

/// Basis defect target for witness scans; looser than the spectra default.
pub const WITNESS_BASIS_DEFECT: f64 = 1e-8;

impl<F: Real> Default for WitnessOptions<F> {
    fn default() -> Self {
        let sos = SosOptions {
            target_defect: WITNESS_BASIS_DEFECT,
            ..SosOptions::default()
        };
        Self {
            engine: Engine::SumOverStates(sos),
            ensemble: EnsembleSpec::ground_fixed(),
            t_final: F::c(25.0),
            sample_step: F::c(0.05),
            strength: F::one(),
            sos,
            raman_gamma: F::c(DEFAULT_RAMAN_GAMMA),
        }
    }
}

/// Twelve log-spaced durations in `[0.05, 1.5]`.
pub fn default_sigma_ladder<F: Real>() -> Vec<F> {
    log_ladder(F::c(0.05), F::c(1.5), 12)
}

pub fn log_ladder<F: Real>(lo: F, hi: F, n: usize) -> Vec<F> {
    if n < 2 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / F::from_usize_lossy(n - 1);
    (0..n).map(|k| lo * (ratio * F::from_usize_lossy(k)).exp()).collect()
}

fn check_ladder<F: Real>(ladder: &[F]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::invalid("sigma_ladder", "ladder is empty"));
    }
    if !(ladder[0] > F::zero()) || ladder.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("sigma_ladder", "durations must be positive and strictly increasing"));
    }
    Ok(())
}

/// Uniform waiting times from `lo` to `hi` with spacing at most `step`.
pub fn window_times<F: Real>(lo: F, hi: F, step: F) -> Vec<F> {
    let n = ((hi - lo) / step).ceil().to_f64_lossy().max(1.0) as usize;
    let h = (hi - lo) / F::from_usize_lossy(n);
    (0..=n).map(|k| lo + h * F::from_usize_lossy(k)).collect()
}

/// `Γ(σ)` with `σ_P = σ_P' = σ` for every duration in the ladder, all on
/// the window `[6·σ_max, T_final]` and with one carrier frequency.
pub fn witness_curve<F: Real>(
    model: &VibronicModel<F>,
    sigma_ladder: &[F],
    centering: Centering<F>,
    options: &WitnessOptions<F>,
) -> Result<WitnessCurve<F>> {
    check_ladder(sigma_ladder)?;
    let center_frequency = match centering {
        Centering::Manual(w) => w,
        _ => {
            let spectra = linear_spectra(model, &options.ensemble, &options.sos, options.raman_gamma)?;
            Recommendation::from_spectra(&spectra, centering)?.center_frequency
        }
    };
    witness_curve_at(model, sigma_ladder, centering, center_frequency, options)
}

/// [`witness_curve`] with the carrier frequency already fixed.
pub fn witness_curve_at<F: Real>(
    model: &VibronicModel<F>,
    sigma_ladder: &[F],
    centering: Centering<F>,
    center_frequency: F,
    options: &WitnessOptions<F>,
) -> Result<WitnessCurve<F>> {
    check_ladder(sigma_ladder)?;
    let sigma_max = sigma_ladder[sigma_ladder.len() - 1];
    let t_min = overlap_cutoff(sigma_max, sigma_max);
    let t_final = options.t_final;
    if !(t_final > t_min) {
        return Err(Error::Window(format!("T_final {t_final} does not exceed T_min {t_min}")));
    }
    let times = window_times(t_min, t_final, options.sample_step);

    let engine = match &options.engine {
        Engine::Grid(g) => {
            let needed = t_final + F::c(PULSE_WINDOW_WIDTHS) * sigma_max;
            let mut g = *g;
            g.horizon = g.horizon.max(needed);
            Engine::Grid(g)
        }
        e => e.clone(),
    };
    let runner = EnsembleRunner::new(model, &options.ensemble, &engine)?;
    let points = sigma_ladder
        .par_iter()
        .map(|&sigma| {
            let pulse = GaussianPulse::polarized(
                options.strength,
                center_frequency,
                sigma,
                F::zero(),
                [F::one(), F::zero(), F::zero()],
            )?;
            let trace = runner.pump_probe(&pulse, &pulse, &times)?;
            let (gamma, mean_signal) = gamma_and_mean(&times, &trace.total, t_min, t_final)?;
            Ok(WitnessPoint { sigma, gamma, mean_signal })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessCurve {
        points,
        t_min_used: t_min,
        t_final_used: t_final,
        centering,
        center_frequency,
    })
}

/// Estimated witness time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessTime<F> {
    pub sigma: F,
    pub fwhm: F,
    /// Γ still rises at the longest sampled duration, so `sigma` is a lower bound.
    pub unbounded: bool,
}

/// Largest sampled `σ*` with `Γ` rising on every interval of `(0, σ*]`.
///
/// Leading intervals that are flat within tolerance (Γ still at the noise
/// level for the shortest pulses) do not break the rising prefix, but at
/// least one interval must rise.
pub fn estimate_witness_time<F: Real>(curve: &WitnessCurve<F>, slope_tol: F) -> Result<Option<WitnessTime<F>>> {
    if curve.points.len() < 4 {
        return Err(Error::Sampling {
            needed: 4,
            got: curve.points.len(),
        });
    }
    if curve.below_noise_floor() {
        return Ok(None);
    }
    let signs = curve.slope_signs(slope_tol);
    let lead = signs.iter().take_while(|&&s| s == 0).count();
    let rise = signs[lead..].iter().take_while(|&&s| s > 0).count();
    if rise == 0 {
        return Ok(None);
    }
    let end = lead + rise;
    let sigma = curve.points[end].sigma;
    Ok(Some(WitnessTime {
        sigma,
        fwhm: crate::pulse::fwhm_of_sigma(sigma),
        unbounded: end == signs.len(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceClass {
    Vibrational,
    ElectronicPresent,
    Inconclusive,
}

/// Sign of the short-pulse end of the witness curve.
///
/// Rising `Γ` means the oscillations vanish as the pulses shorten
/// (vibrational); falling `Γ` means they survive and grow (electronic).
pub fn classify_coherence<F: Real>(curve: &WitnessCurve<F>, slope_tol: F) -> CoherenceClass {
    if curve.points.len() < 2 || curve.below_noise_floor() {
        return CoherenceClass::Inconclusive;
    }
    let signs = curve.slope_signs(slope_tol);
    let lead = signs.iter().take_while(|&&s| s == 0).count();
    match signs.get(lead) {
        Some(1) => CoherenceClass::Vibrational,
        Some(-1) if lead == 0 => CoherenceClass::ElectronicPresent,
        _ => CoherenceClass::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, f64)]) -> WitnessCurve<f64> {
        WitnessCurve {
            points: points
                .iter()
                .map(|&(sigma, gamma)| WitnessPoint { sigma, gamma, mean_signal: 1.0 })
                .collect(),
            t_min_used: 9.0,
            t_final_used: 25.0,
            centering: Centering::AbsorptionMean,
            center_frequency: 5.0,
        }
    }

    #[test]
    fn increasing_curve_is_unbounded() {
        let c = curve(&[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0), (0.4, 4.0)]);
        let tw = estimate_witness_time(&c, 1e-3).unwrap().unwrap();
        assert_eq!(tw.sigma, 0.4);
        assert!(tw.unbounded);
        assert_eq!(classify_coherence(&c, 1e-3), CoherenceClass::Vibrational);
    }

    #[test]
    fn peaked_curve_gives_peak() {
        let c = curve(&[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0), (0.4, 2.5), (0.5, 1.0)]);
        let tw = estimate_witness_time(&c, 1e-3).unwrap().unwrap();
        assert_eq!(tw.sigma, 0.3);
        assert!(!tw.unbounded);
        assert!((tw.fwhm - 0.3 * 2.354_820_045).abs() < 1e-8);
    }

    #[test]
    fn decreasing_curve_has_no_witness_time() {
        let c = curve(&[(0.1, 4.0), (0.2, 3.0), (0.3, 2.0), (0.4, 1.0)]);
        assert_eq!(estimate_witness_time(&c, 1e-3).unwrap(), None);
        assert_eq!(classify_coherence(&c, 1e-3), CoherenceClass::ElectronicPresent);
    }

    #[test]
    fn zero_curve_is_inconclusive() {
        let c = curve(&[(0.1, 0.0), (0.2, 0.0), (0.3, 0.0), (0.4, 0.0)]);
        assert_eq!(classify_coherence(&c, 1e-3), CoherenceClass::Inconclusive);
        assert_eq!(estimate_witness_time(&c, 1e-3).unwrap(), None);
    }

    #[test]
    fn too_few_points_is_sampling_error() {
        let c = curve(&[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0)]);
        assert!(matches!(estimate_witness_time(&c, 1e-3), Err(Error::Sampling { .. })));
    }

    #[test]
    fn flat_start_then_rise_counts_as_vibrational() {
        let c = curve(&[(0.1, 0.0), (0.2, 1e-9), (0.3, 0.5), (0.4, 1.0), (0.5, 0.2)]);
        assert_eq!(classify_coherence(&c, 1e-3), CoherenceClass::Vibrational);
        assert_eq!(estimate_witness_time(&c, 1e-3).unwrap().unwrap().sigma, 0.4);
    }

    #[test]
    fn ladder_helpers() {
        let l = default_sigma_ladder::<f64>();
        assert_eq!(l.len(), 12);
        assert!((l[0] - 0.05).abs() < 1e-12 && (l[11] - 1.5).abs() < 1e-12);
        let t = window_times(9.0f64, 25.0, 0.03);
        assert_eq!(t[0], 9.0);
        assert!((t[t.len() - 1] - 25.0).abs() < 1e-12);
        assert!(t.windows(2).all(|w| w[1] - w[0] <= 0.03 + 1e-12));
    }

    #[test]
    fn undisplaced_monomer_curve_is_inconclusive() {
        let m = VibronicModel::build_monomer(1.0, 0.0, 1.0, 5.0).unwrap();
        let opts = WitnessOptions { t_final: 15.0, sample_step: 0.05, ..WitnessOptions::default() };
        let c: WitnessCurve<f64> = witness_curve(&m, &[0.1, 0.2, 0.3, 0.4], Centering::AbsorptionMean, &opts).unwrap();
        assert!(c.below_noise_floor());
        assert_eq!(classify_coherence(&c, 1e-3), CoherenceClass::Inconclusive);
        assert!(c.points.iter().all(|p| p.gamma >= 0.0));
        assert!((c.t_min_used - 2.4).abs() < 1e-12);
    }
}
