//! Low-order expansion of the pump-probe signal in the pulse durations.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::basis::SosBasis;
use super::pump_probe::{amplitudes, check_populations, contract, scaled_left, scaled_right, DipoleWeights};
use super::special::pump_pair_linear;
use crate::ensemble::{OrientationScheme, ThermalWeights};
use crate::error::Result;
use crate::pulse::GaussianPulse;
use crate::real::Real;

/// Expansion terms sampled on the waiting-time grid.
///
/// Second-order SE/ESA terms are split into the probe-duration part (the
/// vibrationally oscillatory one) and the pump-duration part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerms<F> {
    pub times: Vec<F>,
    pub se1: Vec<F>,
    pub esa1: Vec<F>,
    pub gsb1: Vec<F>,
    pub gsb2: Vec<F>,
    pub se2_vo: Vec<F>,
    pub esa2_vo: Vec<F>,
    pub se2_pump: Vec<F>,
    pub esa2_pump: Vec<F>,
    /// `S_SE,VO^(2)` evaluated at `T = 0` from the full double sum.
    pub se2_vo_at_zero: F,
    /// The same quantity from the collapsed single sum,
    /// `η⁴σ_P'² Σ ⟨μ⁴⟩ p_n ⟨i,n|φ⟩⟨φ|q,n⟩ (ω_φ,gn − ω_P')²`, as a positive magnitude.
    pub se2_vo_zero_moment: F,
    /// `S_PP` in the impulsive limit, the natural scale of every term.
    pub zeroth_order: F,
}

/// Envelope `η e^{−σ²(ω−ω_Q)²/2}` with an arbitrary (possibly negative) σ.
fn envelope<F: Real>(pulse: &GaussianPulse<F>, sigma: F, omega: F) -> F {
    let d = omega - pulse.center_freq;
    pulse.strength * (-(sigma * sigma * d * d) * F::half()).exp()
}

/// SE and ESA with both durations scaled by `lambda`.
fn se_esa_scaled<F: Real>(
    basis: &SosBasis<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    n: usize,
    lambda: F,
    w_se: &DipoleWeights<F>,
    w_esa: Option<&DipoleWeights<F>>,
) -> (Vec<F>, Vec<F>) {
    let eg = &basis.ground_energies;
    let ephi = &basis.excited_energies;
    let (sp, sq) = (pump.sigma * lambda, probe.sigma * lambda);
    let right = scaled_right(&basis.projections, n, |phi| envelope(pump, sp, ephi[phi] - eg[n]));
    let down = scaled_left(&basis.projections, |np, phi| envelope(probe, sq, ephi[phi] - eg[np]));
    let a = amplitudes(&down, &right, ephi, times);
    let se = contract(&a, &a, w_se);
    let esa = match w_esa {
        Some(w) => {
            let ef = &basis.doubly_energies;
            let up = scaled_left(&basis.doubly_projections, |m, phi| envelope(probe, sq, ef[m] - ephi[phi]));
            let b = amplitudes(&up, &right, ephi, times);
            contract(&b, &b, w).into_iter().map(|v| -v).collect()
        }
        None => vec![F::zero(); times.len()],
    };
    (se, esa)
}

fn add_scaled<F: Real>(dst: &mut [F], src: &[F], w: F) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += w * s;
    }
}

/// First- and second-order terms of the duration expansion, each already
/// multiplied by its power of `σ_P`/`σ_P'`.
pub fn expansion_terms<F: Real>(
    basis: &SosBasis<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    populations: &ThermalWeights<F>,
    orientation: &OrientationScheme<F>,
) -> Result<ExpansionTerms<F>> {
    check_populations(basis, populations)?;
    let nt = times.len();
    let eg = &basis.ground_energies;
    let ephi = &basis.excited_energies;
    let ne = basis.n_electronic();
    let w_se = DipoleWeights::new(orientation, &basis.ground_dipoles, &basis.ground_dipoles);
    let w_esa = basis
        .has_doubly_excited()
        .then(|| DipoleWeights::new(orientation, &basis.doubly_dipoles, &basis.ground_dipoles));
    let eta4 = pump.strength * pump.strength * probe.strength * probe.strength;
    let (wp, wq) = (pump.center_freq, probe.center_freq);
    let (sp2, sq2) = (pump.sigma * pump.sigma, probe.sigma * probe.sigma);
    let zero_t = [F::zero()];

    let mut out = ExpansionTerms {
        times: times.to_vec(),
        se1: vec![F::zero(); nt],
        esa1: vec![F::zero(); nt],
        gsb1: vec![F::zero(); nt],
        gsb2: vec![F::zero(); nt],
        se2_vo: vec![F::zero(); nt],
        esa2_vo: vec![F::zero(); nt],
        se2_pump: vec![F::zero(); nt],
        esa2_pump: vec![F::zero(); nt],
        se2_vo_at_zero: F::zero(),
        se2_vo_zero_moment: F::zero(),
        zeroth_order: F::zero(),
    };

    let unit_left = scaled_left(&basis.projections, |_, _| F::one());
    for (n, p) in populations.populated() {
        let plain_right = scaled_right(&basis.projections, n, |_| F::one());
        let plain = amplitudes(&unit_left, &plain_right, ephi, times);

        // First order: odd part of the full SE/ESA in a common duration scale.
        let h = F::c(1e-3);
        let (se_p, esa_p) = se_esa_scaled(basis, pump, probe, times, n, h, &w_se, w_esa.as_ref());
        let (se_m, esa_m) = se_esa_scaled(basis, pump, probe, times, n, -h, &w_se, w_esa.as_ref());
        for k in 0..nt {
            out.se1[k] += p * (se_p[k] - se_m[k]) / (h + h);
            out.esa1[k] += p * (esa_p[k] - esa_m[k]) / (h + h);
        }
        let (se0, esa0) = se_esa_scaled(basis, pump, probe, &zero_t, n, F::zero(), &w_se, w_esa.as_ref());
        out.zeroth_order += p * (se0[0] + esa0[0]);

        // SE second order, probe part: −½η⁴σ'² Σ [(ω_φ,gn'−ω_P')² + (ω_φ',gn'−ω_P')²].
        let sq_probe = scaled_left(&basis.projections, |np, phi| {
            let d = ephi[phi] - eg[np] - wq;
            d * d
        });
        let vo = amplitudes(&sq_probe, &plain_right, ephi, times);
        add_scaled(&mut out.se2_vo, &contract(&vo, &plain, &w_se), -eta4 * sq2 * p);
        let vo0 = amplitudes(&sq_probe, &plain_right, ephi, &zero_t);
        let plain0 = amplitudes(&unit_left, &plain_right, ephi, &zero_t);
        out.se2_vo_at_zero += -eta4 * sq2 * p * contract(&vo0, &plain0, &w_se)[0];

        // SE second order, pump part.
        let sq_pump = scaled_right(&basis.projections, n, |phi| {
            let d = ephi[phi] - eg[n] - wp;
            d * d
        });
        let pu = amplitudes(&unit_left, &sq_pump, ephi, times);
        add_scaled(&mut out.se2_pump, &contract(&pu, &plain, &w_se), -eta4 * sp2 * p);

        if let Some(w) = w_esa.as_ref() {
            let ef = &basis.doubly_energies;
            let up = scaled_left(&basis.doubly_projections, |_, _| F::one());
            let up_plain = amplitudes(&up, &plain_right, ephi, times);
            let up_sq = scaled_left(&basis.doubly_projections, |m, phi| {
                let d = ef[m] - ephi[phi] - wq;
                d * d
            });
            let vo = amplitudes(&up_sq, &plain_right, ephi, times);
            add_scaled(&mut out.esa2_vo, &contract(&vo, &up_plain, w), eta4 * sq2 * p);
            let pu = amplitudes(&up, &sq_pump, ephi, times);
            add_scaled(&mut out.esa2_pump, &contract(&pu, &up_plain, w), eta4 * sp2 * p);
        }

        // Collapsed T = 0 form: the φ' sum closes to δ_nn' δ_pj.
        for (phi, &e) in ephi.iter().enumerate() {
            let d = e - eg[n] - wq;
            for i in 0..ne {
                for q in 0..ne {
                    let pq = basis.projections[i][(n, phi)] * basis.projections[q][(n, phi)];
                    if pq == F::zero() {
                        continue;
                    }
                    let mu4 = (0..ne).fold(F::zero(), |a, j| a + w_se.get(i, q, j, j));
                    out.se2_vo_zero_moment += eta4 * sq2 * p * mu4 * pq * d * d;
                }
            }
        }

        // GSB first and second order.
        let ng = basis.n_ground();
        let mut z1 = vec![Complex::new(F::zero(), F::zero()); ng];
        let mut z2 = vec![Complex::new(F::zero(), F::zero()); ng];
        for np in 0..ng {
            // X0, Xw: probe-side sums without / with the σ'² weights.
            let mut x0 = vec![F::zero(); ne * ne];
            let mut xw = vec![F::zero(); ne * ne];
            let mut y0 = vec![F::zero(); ne * ne];
            let mut yw = vec![F::zero(); ne * ne];
            let mut y1 = vec![Complex::new(F::zero(), F::zero()); ne * ne];
            for (phi, &e) in ephi.iter().enumerate() {
                let (a_n, a_np) = (e - eg[n], e - eg[np]);
                let probe_w = sq2 * ((a_n - wq) * (a_n - wq) + (a_np - wq) * (a_np - wq));
                let pump_w = sp2 * ((a_n - wp) * (a_n - wp) + (a_np - wp) * (a_np - wp));
                let lin = pump_pair_linear(a_np - wp, a_n - wp) * pump.sigma;
                for i in 0..ne {
                    for q in 0..ne {
                        let xv = basis.projections[i][(n, phi)] * basis.projections[q][(np, phi)];
                        let yv = basis.projections[i][(np, phi)] * basis.projections[q][(n, phi)];
                        x0[i * ne + q] += xv;
                        xw[i * ne + q] += xv * probe_w;
                        y0[i * ne + q] += yv;
                        yw[i * ne + q] += yv * pump_w;
                        y1[i * ne + q] += lin * yv;
                    }
                }
            }
            for i in 0..ne {
                for q in 0..ne {
                    for pp in 0..ne {
                        for j in 0..ne {
                            let w = w_se.get(i, q, pp, j);
                            let (iq, pj) = (i * ne + q, pp * ne + j);
                            z1[np] += y1[pj] * (x0[iq] * w);
                            let second = xw[iq] * y0[pj] + x0[iq] * yw[pj];
                            z2[np] += Complex::new(second * w, F::zero());
                        }
                    }
                }
            }
        }
        for (k, &t) in times.iter().enumerate() {
            let (mut g1, mut g2) = (F::zero(), F::zero());
            for np in 0..ng {
                let th = (eg[np] - eg[n]) * t;
                let (c, s) = (th.cos(), th.sin());
                g1 += z1[np].re * c + z1[np].im * s;
                g2 += z2[np].re * c + z2[np].im * s;
            }
            out.gsb1[k] += eta4 * p * g1;
            out.gsb2[k] += -eta4 * F::half() * p * g2;
        }

        // GSB zeroth order joins the impulsive-limit scale.
        let mut g0 = F::zero();
        for i in 0..ne {
            for q in 0..ne {
                let mut x = F::zero();
                for phi in 0..ephi.len() {
                    x += basis.projections[i][(n, phi)] * basis.projections[q][(n, phi)];
                }
                for pp in 0..ne {
                    for j in 0..ne {
                        let mut y = F::zero();
                        for phi in 0..ephi.len() {
                            y += basis.projections[pp][(n, phi)] * basis.projections[j][(n, phi)];
                        }
                        g0 += w_se.get(i, q, pp, j) * x * y;
                    }
                }
            }
        }
        out.zeroth_order += eta4 * p * g0;
    }
    out.se2_vo_zero_moment = out.se2_vo_zero_moment.abs();
    Ok(out)
}
