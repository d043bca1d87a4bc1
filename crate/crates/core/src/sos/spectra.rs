//! Linear absorption and resonance Raman spectra.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::basis::SosBasis;
use crate::ensemble::{OrientationScheme, ThermalWeights};
use crate::error::{Error, Result};
use crate::real::Real;

/// Default Raman linewidth γ.
pub const DEFAULT_RAMAN_GAMMA: f64 = 0.01;

/// Sticks with weight below this fraction of the largest are dropped.
const STICK_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Absorption,
    Raman,
}

/// `(frequency, weight)` lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickSpectrum<F> {
    pub kind: SpectrumKind,
    pub lines: Vec<(F, F)>,
}

impl<F: Real> StickSpectrum<F> {
    pub fn total_weight(&self) -> F {
        self.lines.iter().fold(F::zero(), |a, &(_, w)| a + w)
    }

    /// Weight-normalized mean and central variance.
    pub fn moments(&self) -> Result<(F, F)> {
        spectral_moments(self)
    }

    /// Sum of Gaussians of standard deviation `width` sampled at `omegas`.
    pub fn broadened(&self, omegas: &[F], width: F) -> Vec<F> {
        let norm = F::one() / (F::two_pi() * width * width).sqrt();
        omegas
            .iter()
            .map(|&w| {
                self.lines.iter().fold(F::zero(), |acc, &(c, h)| {
                    let d = (w - c) / width;
                    acc + h * norm * (-(d * d) * F::half()).exp()
                })
            })
            .collect()
    }
}

/// `(ω̄, Σ²)` of a spectrum treated as a distribution.
pub fn spectral_moments<F: Real>(s: &StickSpectrum<F>) -> Result<(F, F)> {
    let total = s.total_weight();
    if !(total.abs() > F::zero()) || !total.is_finite() {
        return Err(Error::EmptySpectrum);
    }
    let mean = s.lines.iter().fold(F::zero(), |a, &(w, h)| a + w * h) / total;
    let var = s
        .lines
        .iter()
        .fold(F::zero(), |a, &(w, h)| a + (w - mean) * (w - mean) * h)
        / total;
    Ok((mean, var))
}

/// Absorption sticks at `ω_φ − ω_gn` with weights
/// `Σ_ij ⟨μ_gi μ_jg⟩ p_n ⟨i,n|φ⟩⟨φ|j,n⟩`.
pub fn absorption_spectrum<F: Real>(
    basis: &SosBasis<F>,
    populations: &ThermalWeights<F>,
    orientation: &OrientationScheme<F>,
) -> StickSpectrum<F> {
    let ne = basis.n_electronic();
    let pair: Vec<Vec<F>> = (0..ne)
        .map(|i| {
            (0..ne)
                .map(|j| orientation.pair(&basis.ground_dipoles[i], &basis.ground_dipoles[j]))
                .collect()
        })
        .collect();
    let mut lines = Vec::new();
    for (n, p) in populations.populated() {
        let eg = basis.ground_energies[n];
        for (phi, &ephi) in basis.excited_energies.iter().enumerate() {
            let mut w = F::zero();
            for i in 0..ne {
                for j in 0..ne {
                    w += pair[i][j] * basis.projections[i][(n, phi)] * basis.projections[j][(n, phi)];
                }
            }
            lines.push((ephi - eg, p * w));
        }
    }
    prune(SpectrumKind::Absorption, lines)
}

fn prune<F: Real>(kind: SpectrumKind, mut lines: Vec<(F, F)>) -> StickSpectrum<F> {
    let max = lines.iter().fold(F::zero(), |m, &(_, w)| m.max(w.abs()));
    let floor = max * F::c(STICK_FLOOR);
    lines.retain(|&(_, w)| w.abs() > floor);
    lines.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    StickSpectrum { kind, lines }
}

/// Relative size below which a Raman transition product is dropped.
const RAMAN_PRODUCT_FLOOR: f64 = 1e-8;

/// Resonance Raman spectrum integrated over the incident frequency, sampled
/// on a grid from the lowest to the highest resonance `± 5γ` with spacing
/// `γ/5`. Each line carries `S_R(ω_S)·Δω`.
///
/// `S_R(ω_S) = Σ_n p_n Σ_n' |Σ_φ Σ_ij μ_gi μ_jg ⟨i,n'|φ⟩⟨φ|j,n⟩ / (ω_S − ω_φ,gn' + iγ)|²`
/// with the orientation average applied to the four dipole factors.
pub fn resonance_raman_spectrum<F: Real>(
    basis: &SosBasis<F>,
    populations: &ThermalWeights<F>,
    orientation: &OrientationScheme<F>,
    gamma: F,
) -> Result<StickSpectrum<F>> {
    if !(gamma > F::zero()) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", "Raman linewidth must be positive"));
    }
    let ne = basis.n_electronic();
    let ng = basis.n_ground();
    let nphi = basis.n_excited_states();
    let d = &basis.ground_dipoles;
    let occupied = populations.populated();

    // Resonances ω_φ,gn' that carry weight: φ reached from n, emitting to n'.
    let mut coupling = Vec::new(); // (n, p, [(i, j)] -> c[n'][φ])
    let mut lo = F::max_value().unwrap_or(F::c(1e300));
    let mut hi = -lo;
    let mut any = false;
    for &(n, p) in &occupied {
        // c_ij[n'][φ] = ⟨i,n'|φ⟩⟨φ|j,n⟩
        let mut strength = vec![vec![F::zero(); nphi]; ng];
        for i in 0..ne {
            for j in 0..ne {
                for (np, row) in strength.iter_mut().enumerate() {
                    for (phi, s) in row.iter_mut().enumerate() {
                        let v = basis.projections[i][(np, phi)] * basis.projections[j][(n, phi)];
                        *s = s.max(v.abs());
                    }
                }
            }
        }
        let max = strength.iter().flatten().fold(F::zero(), |m, &v| m.max(v));
        let floor = max * F::c(1e-6);
        for (np, row) in strength.iter().enumerate() {
            for (phi, &s) in row.iter().enumerate() {
                if s > floor {
                    let w = basis.excited_energies[phi] - basis.ground_energies[np];
                    lo = lo.min(w);
                    hi = hi.max(w);
                    any = true;
                }
            }
        }
        coupling.push((n, p));
    }
    if !any {
        return Err(Error::EmptySpectrum);
    }
    let five = F::c(5.0);
    let step = gamma / five;
    let start = lo - five * gamma;
    let count = ((hi - lo + F::c(10.0) * gamma) / step).ceil().to_f64_lossy() as usize + 1;

    // Orientation weights for the four dipole slots (i, q | p, j).
    let mut w4 = vec![F::zero(); ne * ne * ne * ne];
    for i in 0..ne {
        for q in 0..ne {
            for p in 0..ne {
                for j in 0..ne {
                    w4[((i * ne + q) * ne + p) * ne + j] = orientation.quad(&d[i], &d[q], &d[p], &d[j]);
                }
            }
        }
    }

    let omegas: Vec<F> = (0..count).map(|k| start + F::from_usize_lossy(k) * step).collect();
    let mut values = vec![F::zero(); count];
    let zero = Complex::new(F::zero(), F::zero());
    for &(n, p) in &coupling {
        // Dropping products below this floor moves the Raman mean by about 1e-9 relative.
        let mut amax = F::zero();
        for i in 0..ne {
            for np in 0..ng {
                for phi in 0..nphi {
                    let v = basis.projections[i][(np, phi)].abs();
                    for q in 0..ne {
                        amax = amax.max(v * basis.projections[q][(n, phi)].abs());
                    }
                }
            }
        }
        let floor = amax * F::c(RAMAN_PRODUCT_FLOOR);
        for np in 0..ng {
            let g_np = basis.ground_energies[np];
            // Sparse a[iq][φ] = ⟨i,n'|φ⟩⟨φ|q,n⟩ over the states that carry weight.
            let mut terms: Vec<(F, Vec<F>)> = Vec::new();
            for phi in 0..nphi {
                let a: Vec<F> = (0..ne * ne)
                    .map(|iq| basis.projections[iq / ne][(np, phi)] * basis.projections[iq % ne][(n, phi)])
                    .collect();
                if a.iter().any(|v| v.abs() > floor) {
                    terms.push((basis.excited_energies[phi] - g_np, a));
                }
            }
            if terms.is_empty() {
                continue;
            }
            for (k, &ws) in omegas.iter().enumerate() {
                let mut amp = vec![zero; ne * ne];
                for (w_res, a) in &terms {
                    let inv = Complex::new(ws - *w_res, gamma).inv();
                    for (slot, &v) in amp.iter_mut().zip(a) {
                        *slot += inv * v;
                    }
                }
                let mut s = F::zero();
                for iq in 0..ne * ne {
                    for jp in 0..ne * ne {
                        let (i, q) = (iq / ne, iq % ne);
                        let (j, pp) = (jp / ne, jp % ne);
                        let w = w4[((i * ne + q) * ne + pp) * ne + j];
                        s += w * (amp[iq] * amp[jp].conj()).re;
                    }
                }
                values[k] += p * s;
            }
        }
    }
    let lines = omegas
        .into_iter()
        .zip(values)
        .map(|(w, v)| (w, v * step))
        .collect();
    Ok(StickSpectrum {
        kind: SpectrumKind::Raman,
        lines,
    })
}

/// Weight-normalized mean frequency of the Raman spectrum.
pub fn raman_mean<F: Real>(raman: &StickSpectrum<F>) -> Result<F> {
    Ok(spectral_moments(raman)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DimerParams, VibronicModel};
    use crate::sos::SosOptions;

    fn monomer(we: f64, s: f64) -> SosBasis<f64> {
        let m = VibronicModel::build_monomer(we, s, 1.0, 10.0).unwrap();
        SosBasis::build(&m, &SosOptions::default()).unwrap()
    }

    fn ground(b: &SosBasis<f64>) -> ThermalWeights<f64> {
        ThermalWeights::pure(b.n_ground(), 0)
    }

    #[test]
    fn moments_of_simple_spectra() {
        let one = StickSpectrum::<f64> { kind: SpectrumKind::Absorption, lines: vec![(2.0, 3.0)] };
        assert_eq!(spectral_moments(&one).unwrap(), (2.0, 0.0));
        let two = StickSpectrum::<f64> { kind: SpectrumKind::Absorption, lines: vec![(1.5, 1.0), (2.5, 1.0)] };
        let (m, v) = spectral_moments(&two).unwrap();
        assert!((m - 2.0).abs() < 1e-15 && (v - 0.25).abs() < 1e-15);
        let empty = StickSpectrum::<f64> { kind: SpectrumKind::Absorption, lines: vec![] };
        assert_eq!(spectral_moments(&empty), Err(Error::EmptySpectrum));
    }

    #[test]
    fn undisplaced_single_stick() {
        let b = monomer(1.0, 0.0);
        let s = absorption_spectrum(&b, &ground(&b), &OrientationScheme::fixed_x());
        assert_eq!(s.lines.len(), 1);
        assert!((s.lines[0].0 - 10.0).abs() < 1e-9);
        assert!((s.lines[0].1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn poisson_moments() {
        let sh = 0.02;
        let b = monomer(1.0, sh);
        let s = absorption_spectrum(&b, &ground(&b), &OrientationScheme::fixed_x());
        assert!((s.total_weight() - 1.0).abs() < 1e-10);
        let (m, v) = s.moments().unwrap();
        assert!((m - (10.0 + sh)).abs() < 1e-8, "{m}");
        assert!((v - sh).abs() < 1e-8, "{v}");
    }

    #[test]
    fn uncoupled_undisplaced_dimer_two_sticks() {
        let mut p = DimerParams::reference(4.0);
        p.coupling = 0.0;
        p.huang_rhys_1 = 0.0;
        p.huang_rhys_2 = 0.0;
        p.omega_e1 = 1.0;
        p.omega_e2 = 1.0;
        let m = VibronicModel::build_dimer(&p).unwrap();
        let b = SosBasis::build(&m, &SosOptions::default()).unwrap();
        let s = absorption_spectrum(&b, &ground(&b), &OrientationScheme::AnalyticTensor);
        assert_eq!(s.lines.len(), 2);
        assert!((s.lines[0].0 - 4.0).abs() < 1e-9);
        assert!((s.lines[1].0 - 4.73).abs() < 1e-9);
        // Isotropic weights |d|²/3 with |d₂| = 3|d₁|.
        assert!((s.lines[1].1 / s.lines[0].1 - 9.0).abs() < 1e-9);
    }

    #[test]
    fn raman_undisplaced_matches_absorption_mean() {
        let b = monomer(1.0, 0.0);
        let r = resonance_raman_spectrum(&b, &ground(&b), &OrientationScheme::fixed_x(), 0.01).unwrap();
        assert!((raman_mean(&r).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn raman_red_shift_for_soft_mode() {
        let b = monomer(0.5, 0.02);
        let pop = ground(&b);
        let a = absorption_spectrum(&b, &pop, &OrientationScheme::fixed_x()).moments().unwrap().0;
        let r = resonance_raman_spectrum(&b, &pop, &OrientationScheme::fixed_x(), 0.01).unwrap();
        let rm = raman_mean(&r).unwrap();
        assert!(rm < a, "raman {rm} abs {a}");
    }

    #[test]
    fn raman_peaks_at_resonances() {
        let b = monomer(1.5, 0.1);
        let gamma = 0.01;
        let r = resonance_raman_spectrum(&b, &ground(&b), &OrientationScheme::fixed_x(), gamma).unwrap();
        // Local maxima of the sampled curve.
        let peaks: Vec<f64> = r
            .lines
            .windows(3)
            .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1 && w[1].1 > 1e-6 * r.total_weight())
            .map(|w| w[1].0)
            .collect();
        assert!(!peaks.is_empty());
        for p in peaks {
            let nearest = b
                .excited_energies
                .iter()
                .flat_map(|&e| b.ground_energies.iter().map(move |&g| e - g))
                .fold(f64::INFINITY, |m, w| m.min((w - p).abs()));
            assert!(nearest <= gamma, "peak {p} off resonance by {nearest}");
        }
        assert!(resonance_raman_spectrum(&b, &ground(&b), &OrientationScheme::fixed_x(), 0.0).is_err());
    }
}
