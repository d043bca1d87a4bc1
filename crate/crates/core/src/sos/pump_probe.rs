//! Closed-form pump-probe signal as a sum over vibronic states.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::SosBasis;
use super::special::pump_pair_factor;
use crate::ensemble::{OrientationScheme, ThermalWeights};
use crate::error::{Error, Result};
use crate::pulse::GaussianPulse;
use crate::real::Real;

/// Sampled pump-probe signal with its three pathways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpProbeTrace<F> {
    pub times: Vec<F>,
    pub total: Vec<F>,
    pub se: Vec<F>,
    pub esa: Vec<F>,
    pub gsb: Vec<F>,
}

impl<F: Real> PumpProbeTrace<F> {
    pub fn zeros(times: &[F]) -> Self {
        let z = vec![F::zero(); times.len()];
        Self {
            times: times.to_vec(),
            total: z.clone(),
            se: z.clone(),
            esa: z.clone(),
            gsb: z,
        }
    }

    /// `self += w · other`, component-wise.
    pub fn accumulate(&mut self, other: &Self, w: F) {
        for (dst, src) in [
            (&mut self.total, &other.total),
            (&mut self.se, &other.se),
            (&mut self.esa, &other.esa),
            (&mut self.gsb, &other.gsb),
        ] {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }

    fn finish(mut self) -> Self {
        for k in 0..self.times.len() {
            self.total[k] = self.se[k] + self.esa[k] + self.gsb[k];
        }
        self
    }
}

/// Orientation-averaged products of four dipoles, indexed `[i][q][p][j]`.
pub(crate) struct DipoleWeights<F> {
    pub n: usize,
    pub w: Vec<F>,
}

impl<F: Real> DipoleWeights<F> {
    pub fn new(
        orientation: &OrientationScheme<F>,
        outer: &[crate::model::Dipole<F>],
        inner: &[crate::model::Dipole<F>],
    ) -> Self {
        let n = inner.len();
        let mut w = vec![F::zero(); n * n * n * n];
        for i in 0..n {
            for q in 0..n {
                for p in 0..n {
                    for j in 0..n {
                        w[((i * n + q) * n + p) * n + j] =
                            orientation.quad(&outer[i], &inner[q], &inner[p], &outer[j]);
                    }
                }
            }
        }
        Self { n, w }
    }

    #[inline]
    pub fn get(&self, i: usize, q: usize, p: usize, j: usize) -> F {
        self.w[((i * self.n + q) * self.n + p) * self.n + j]
    }
}

/// Time-dependent amplitudes `A^{iq}[r, t] = Σ_φ L_i[r, φ] R_q[φ] e^{−iω_φ t}`.
pub(crate) struct Amplitudes<F: Real> {
    pub re: Vec<DMatrix<F>>,
    pub im: Vec<DMatrix<F>>,
    pub n: usize,
}

pub(crate) fn amplitudes<F: Real>(
    left: &[DMatrix<F>],
    right: &[Vec<F>],
    energies: &[F],
    times: &[F],
) -> Amplitudes<F> {
    let nphi = energies.len();
    let nt = times.len();
    let reference = energies[0];
    let cos_sin: Vec<(F, F)> = times
        .iter()
        .flat_map(|&t| {
            energies.iter().map(move |&e| {
                let th = (e - reference) * t;
                (th.cos(), th.sin())
            })
        })
        .collect();
    let n = left.len();
    let mut re = Vec::with_capacity(n * n);
    let mut im = Vec::with_capacity(n * n);
    for l in left {
        for r in right {
            let vre = DMatrix::from_fn(nphi, nt, |phi, t| r[phi] * cos_sin[t * nphi + phi].0);
            let vim = DMatrix::from_fn(nphi, nt, |phi, t| -r[phi] * cos_sin[t * nphi + phi].1);
            re.push(l * vre);
            im.push(l * vim);
        }
    }
    Amplitudes { re, im, n }
}

/// `Σ_r Σ_{iqpj} w_{iqpj} Re(A^{iq}[r,t] · conj(B^{jp}[r,t]))` per time.
pub(crate) fn contract<F: Real>(a: &Amplitudes<F>, b: &Amplitudes<F>, w: &DipoleWeights<F>) -> Vec<F> {
    let n = a.n;
    let nt = a.re[0].ncols();
    let mut out = vec![F::zero(); nt];
    for i in 0..n {
        for q in 0..n {
            for p in 0..n {
                for j in 0..n {
                    let wt = w.get(i, q, p, j);
                    if wt == F::zero() {
                        continue;
                    }
                    let (ar, ai) = (&a.re[i * n + q], &a.im[i * n + q]);
                    let (br, bi) = (&b.re[j * n + p], &b.im[j * n + p]);
                    for (t, o) in out.iter_mut().enumerate() {
                        let s = ar
                            .column(t)
                            .iter()
                            .zip(ai.column(t).iter())
                            .zip(br.column(t).iter().zip(bi.column(t).iter()))
                            .fold(F::zero(), |acc, ((&xr, &xi), (&yr, &yi))| acc + xr * yr + xi * yi);
                        *o += wt * s;
                    }
                }
            }
        }
    }
    out
}

/// Rows of each projection matrix scaled by a per-(row, φ) factor.
pub(crate) fn scaled_left<F: Real>(
    mats: &[DMatrix<F>],
    factor: impl Fn(usize, usize) -> F,
) -> Vec<DMatrix<F>> {
    mats.iter()
        .map(|m| DMatrix::from_fn(m.nrows(), m.ncols(), |r, phi| m[(r, phi)] * factor(r, phi)))
        .collect()
}

/// Row `n` of each projection matrix scaled by a per-φ factor.
pub(crate) fn scaled_right<F: Real>(
    mats: &[DMatrix<F>],
    n: usize,
    factor: impl Fn(usize) -> F,
) -> Vec<Vec<F>> {
    mats.iter()
        .map(|m| (0..m.ncols()).map(|phi| m[(n, phi)] * factor(phi)).collect())
        .collect()
}

pub(crate) fn check_populations<F: Real>(basis: &SosBasis<F>, pop: &ThermalWeights<F>) -> Result<()> {
    if pop.weights.len() != basis.n_ground() {
        return Err(Error::invalid(
            "populations",
            format!(
                "{} weights supplied for {} ground states",
                pop.weights.len(),
                basis.n_ground()
            ),
        ));
    }
    Ok(())
}

/// Stimulated emission, excited-state absorption and ground-state bleach
/// for one initial level `n`.
fn single_level<F: Real>(
    basis: &SosBasis<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    n: usize,
    w_se: &DipoleWeights<F>,
    w_esa: Option<&DipoleWeights<F>>,
) -> PumpProbeTrace<F> {
    let eg = &basis.ground_energies;
    let ephi = &basis.excited_energies;
    let mut out = PumpProbeTrace::zeros(times);

    let right = scaled_right(&basis.projections, n, |phi| pump.field_freq(ephi[phi] - eg[n]));

    // Stimulated emission back to any ground level n'.
    let down = scaled_left(&basis.projections, |np, phi| probe.field_freq(ephi[phi] - eg[np]));
    let a = amplitudes(&down, &right, ephi, times);
    out.se = contract(&a, &a, w_se);

    // Excited-state absorption into the f manifold.
    if let Some(w_esa) = w_esa {
        let ef = &basis.doubly_energies;
        let up = scaled_left(&basis.doubly_projections, |m, phi| probe.field_freq(ef[m] - ephi[phi]));
        let b = amplitudes(&up, &right, ephi, times);
        out.esa = contract(&b, &b, w_esa).into_iter().map(|v| -v).collect();
    }

    // Ground-state bleach: probe pair on φ, pump pair (with overlap term) on φ'.
    let ne = basis.n_electronic();
    let ng = basis.n_ground();
    let strength2 = pump.strength * pump.strength;
    let mut z = vec![Complex::new(F::zero(), F::zero()); ng];
    for (np, zn) in z.iter_mut().enumerate() {
        let mut x = vec![F::zero(); ne * ne];
        let mut y = vec![Complex::new(F::zero(), F::zero()); ne * ne];
        for (phi, &e) in ephi.iter().enumerate() {
            let probe_pair = probe.field_freq(e - eg[n]) * probe.field_freq(e - eg[np]);
            let pair = pump_pair_factor(
                e - eg[np] - pump.center_freq,
                e - eg[n] - pump.center_freq,
                pump.sigma,
            ) * strength2;
            for i in 0..ne {
                for q in 0..ne {
                    x[i * ne + q] += basis.projections[i][(n, phi)] * basis.projections[q][(np, phi)] * probe_pair;
                    // Y^{pj} = Σ_φ' ⟨p,n'|φ'⟩⟨φ'|j,n⟩ · pair
                    y[i * ne + q] += pair * (basis.projections[i][(np, phi)] * basis.projections[q][(n, phi)]);
                }
            }
        }
        for i in 0..ne {
            for q in 0..ne {
                for p in 0..ne {
                    for j in 0..ne {
                        *zn += y[p * ne + j] * (x[i * ne + q] * w_se.get(i, q, p, j));
                    }
                }
            }
        }
    }
    out.gsb = times
        .iter()
        .map(|&t| {
            z.iter().enumerate().fold(F::zero(), |acc, (np, zn)| {
                let th = (eg[np] - eg[n]) * t;
                acc + zn.re * th.cos() + zn.im * th.sin()
            })
        })
        .collect();
    out
}

/// Frequency-integrated pump-probe signal `S_SE + S_ESA + S_GSB` at each
/// waiting time, averaged over the populated initial levels and the chosen
/// orientation scheme.
pub fn pump_probe_sos<F: Real>(
    basis: &SosBasis<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    populations: &ThermalWeights<F>,
    orientation: &OrientationScheme<F>,
) -> Result<PumpProbeTrace<F>> {
    check_populations(basis, populations)?;
    let w_se = DipoleWeights::new(orientation, &basis.ground_dipoles, &basis.ground_dipoles);
    let w_esa = basis
        .has_doubly_excited()
        .then(|| DipoleWeights::new(orientation, &basis.doubly_dipoles, &basis.ground_dipoles));
    let levels = populations.populated();
    let parts: Vec<PumpProbeTrace<F>> = levels
        .par_iter()
        .map(|&(n, _)| single_level(basis, pump, probe, times, n, &w_se, w_esa.as_ref()))
        .collect();
    let mut out = PumpProbeTrace::zeros(times);
    for (part, &(_, p)) in parts.iter().zip(&levels) {
        out.accumulate(part, p);
    }
    Ok(out.finish())
}
