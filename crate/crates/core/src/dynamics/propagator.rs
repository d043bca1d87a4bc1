use std::sync::Arc;

use num_complex::Complex;
use rustfft::Fft;

use super::cap::CapSpec;
use crate::model::{GridSpec, HarmonicSurface};
use crate::real::{cis, Real};

/// Electronic manifold of a wavepacket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    Ground,
    Singly,
    Doubly,
}

/// Amplitudes of one manifold on the product grid, electronic-state major.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket<F> {
    pub n_states: usize,
    pub amplitudes: Vec<Complex<F>>,
}

impl<F: Real> Wavepacket<F> {
    pub fn zeros(n_states: usize, n_points: usize) -> Self {
        Self {
            n_states,
            amplitudes: vec![Complex::new(F::zero(), F::zero()); n_states * n_points],
        }
    }

    pub fn n_points(&self) -> usize {
        self.amplitudes.len() / self.n_states
    }

    pub fn state(&self, s: usize) -> &[Complex<F>] {
        let n = self.n_points();
        &self.amplitudes[s * n..(s + 1) * n]
    }

    pub fn state_mut(&mut self, s: usize) -> &mut [Complex<F>] {
        let n = self.n_points();
        &mut self.amplitudes[s * n..(s + 1) * n]
    }

    /// `Σ|ψ|² dV`.
    pub fn norm_sqr(&self, dv: F) -> F {
        crate::real::norm_sqr_sum(&self.amplitudes) * dv
    }

    /// `⟨self|other⟩ dV`.
    pub fn inner(&self, other: &Self, dv: F) -> Complex<F> {
        crate::real::inner(&self.amplitudes, &other.amplitudes) * dv
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

enum HalfPotential<F> {
    /// `e^{−iV_s dt/2}` for each electronic state.
    Diagonal(Vec<Vec<Complex<F>>>),
    /// Two states coupled by a constant: per-point symmetric 2×2 propagator.
    Coupled {
        u11: Vec<Complex<F>>,
        u22: Vec<Complex<F>>,
        u12: Vec<Complex<F>>,
    },
}

/// Second-order (Strang) split-operator propagator for one manifold:
/// `e^{−iV dt/2} e^{−iT dt} e^{−iV dt/2}`, kinetic part through FFTs.
pub struct SplitOperator<F: Real> {
    n_modes: usize,
    n_per_mode: usize,
    kinetic: Vec<Complex<F>>,
    half: HalfPotential<F>,
    fwd: Arc<dyn Fft<F>>,
    inv: Arc<dyn Fft<F>>,
    kinetic_energy: Vec<F>,
    potential: Vec<Vec<F>>,
    coupling: F,
}

/// Product-grid coordinates, row-major with mode 0 slowest.
pub(crate) fn product_points<F: Real>(grid: &GridSpec<F>, n_modes: usize) -> Vec<Vec<F>> {
    let xs = grid.coordinates();
    let n = xs.len();
    let total = n.pow(n_modes as u32);
    (0..total)
        .map(|mut p| {
            let mut x = vec![F::zero(); n_modes];
            for k in (0..n_modes).rev() {
                x[k] = xs[p % n];
                p /= n;
            }
            x
        })
        .collect()
}

fn product_cap<F: Real>(grid: &GridSpec<F>, n_modes: usize, cap: Option<&CapSpec<F>>) -> Vec<Complex<F>> {
    let n = grid.points_per_mode;
    let total = n.pow(n_modes as u32);
    let Some(cap) = cap else {
        return vec![Complex::new(F::zero(), F::zero()); total];
    };
    let prof = cap.profile(grid);
    (0..total)
        .map(|mut p| {
            let mut s = F::zero();
            for _ in 0..n_modes {
                s += prof[p % n];
                p /= n;
            }
            cap.amplitude * s
        })
        .collect()
}

/// `e^{−i z τ}` for complex `z`.
fn exp_minus_i<F: Real>(z: Complex<F>, tau: F) -> Complex<F> {
    cis(-z.re * tau) * (z.im * tau).exp()
}

impl<F: Real> SplitOperator<F> {
    pub fn new(
        surfaces: &[HarmonicSurface<F>],
        coupling: F,
        grid: &GridSpec<F>,
        dt: F,
        cap: Option<&CapSpec<F>>,
    ) -> Self {
        let n_modes = surfaces[0].n_modes();
        let n = grid.points_per_mode;
        let points = product_points(grid, n_modes);
        let total = points.len();
        let cap_v = product_cap(grid, n_modes, cap);
        let potential: Vec<Vec<F>> = surfaces
            .iter()
            .map(|s| points.iter().map(|x| s.potential(x)).collect())
            .collect();
        let tau = dt * F::half();

        let half = if surfaces.len() == 2 && coupling != F::zero() {
            let (mut u11, mut u22, mut u12) = (Vec::new(), Vec::new(), Vec::new());
            for p in 0..total {
                let (v1, v2) = (potential[0][p], potential[1][p]);
                let m = (v1 + v2) * F::half();
                let d = (v1 - v2) * F::half();
                let r = (d * d + coupling * coupling).sqrt();
                let (c, s) = ((r * tau).cos(), (r * tau).sin());
                let sr = if r > F::zero() { s / r } else { tau };
                let common = exp_minus_i(Complex::new(m, F::zero()) + cap_v[p], tau);
                u11.push(common * Complex::new(c, -sr * d));
                u22.push(common * Complex::new(c, sr * d));
                u12.push(common * Complex::new(F::zero(), -sr * coupling));
            }
            HalfPotential::Coupled { u11, u22, u12 }
        } else {
            HalfPotential::Diagonal(
                potential
                    .iter()
                    .map(|v| {
                        v.iter()
                            .zip(&cap_v)
                            .map(|(&vp, &c)| exp_minus_i(Complex::new(vp, F::zero()) + c, tau))
                            .collect()
                    })
                    .collect(),
            )
        };

        let ks = grid.wavenumbers();
        let scale = F::one() / F::from_usize_lossy(total);
        let kinetic_energy: Vec<F> = (0..total)
            .map(|mut p| {
                let mut e = F::zero();
                for _ in 0..n_modes {
                    let k = ks[p % n];
                    e += k * k * F::half();
                    p /= n;
                }
                e
            })
            .collect();
        let kinetic = kinetic_energy.iter().map(|&e| cis(-e * dt) * scale).collect();
        let (fwd, inv) = grid.fft_pair();
        Self {
            n_modes,
            n_per_mode: n,
            kinetic,
            half,
            fwd,
            inv,
            kinetic_energy,
            potential,
            coupling,
        }
    }

    pub fn n_states(&self) -> usize {
        self.potential.len()
    }

    fn apply_half_potential(&self, psi: &mut Wavepacket<F>) {
        match &self.half {
            HalfPotential::Diagonal(fs) => {
                for (s, f) in fs.iter().enumerate() {
                    for (z, &u) in psi.state_mut(s).iter_mut().zip(f) {
                        *z *= u;
                    }
                }
            }
            HalfPotential::Coupled { u11, u22, u12 } => {
                let n = psi.n_points();
                let (a, b) = psi.amplitudes.split_at_mut(n);
                for p in 0..n {
                    let (x, y) = (a[p], b[p]);
                    a[p] = u11[p] * x + u12[p] * y;
                    b[p] = u12[p] * x + u22[p] * y;
                }
            }
        }
    }

    /// Multi-dimensional FFT of one electronic component, in place.
    fn transform(&self, data: &mut [Complex<F>], forward: bool, scratch: &mut Vec<Complex<F>>) {
        let fft = if forward { &self.fwd } else { &self.inv };
        let n = self.n_per_mode;
        let need = fft.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex::new(F::zero(), F::zero()));
        }
        // Fastest axis: contiguous rows, batched.
        fft.process_with_scratch(data, &mut scratch[..need]);
        let mut line = vec![Complex::new(F::zero(), F::zero()); n];
        for axis in 0..self.n_modes - 1 {
            let stride = n.pow((self.n_modes - 1 - axis) as u32);
            let outer = data.len() / (stride * n);
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * stride * n + i;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch[..need]);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }

    fn apply_kinetic(&self, psi: &mut Wavepacket<F>) {
        let mut scratch = Vec::new();
        for s in 0..psi.n_states {
            let data = psi.state_mut(s);
            self.transform(data, true, &mut scratch);
            for (z, &k) in data.iter_mut().zip(&self.kinetic) {
                *z *= k;
            }
            self.transform(data, false, &mut scratch);
        }
    }

    /// One Strang step of length `dt`.
    pub fn step(&self, psi: &mut Wavepacket<F>) {
        self.apply_half_potential(psi);
        self.apply_kinetic(psi);
        self.apply_half_potential(psi);
    }

    /// `⟨ψ|H|ψ⟩ dV` without the absorbing potential.
    pub fn energy(&self, psi: &Wavepacket<F>, dv: F) -> F {
        let mut scratch = Vec::new();
        let total = F::from_usize_lossy(psi.n_points());
        let mut e = F::zero();
        for s in 0..psi.n_states {
            let mut data = psi.state(s).to_vec();
            for (z, &v) in data.iter().zip(&self.potential[s]) {
                e += z.norm_sqr() * v * dv;
            }
            self.transform(&mut data, true, &mut scratch);
            for (z, &k) in data.iter().zip(&self.kinetic_energy) {
                e += z.norm_sqr() * k * dv / total;
            }
        }
        if psi.n_states == 2 {
            let c = crate::real::inner(psi.state(0), psi.state(1));
            e += (c.re + c.re) * self.coupling * dv;
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{vibrational_eigenbasis, ModeSurface};

    fn ground_packet(grid: &GridSpec<f64>, n: usize) -> Wavepacket<f64> {
        let b = vibrational_eigenbasis(&ModeSurface::undisplaced(1.0).unwrap(), grid, n + 1).unwrap();
        Wavepacket {
            n_states: 1,
            amplitudes: b.state(n).into_iter().map(|v| Complex::new(v, 0.0)).collect(),
        }
    }

    #[test]
    fn unitary_without_absorber() {
        let grid = GridSpec::standard();
        let surf = HarmonicSurface::new(0.0, vec![ModeSurface::new(1.5, 0.3).unwrap()]).unwrap();
        let prop = SplitOperator::new(&[surf], 0.0, &grid, 0.01, None);
        let mut psi = ground_packet(&grid, 0);
        let dv = grid.spacing;
        let n0 = psi.norm_sqr(dv);
        let mut prev = n0;
        for _ in 0..2500 {
            prop.step(&mut psi);
            let now = psi.norm_sqr(dv);
            assert!((now - prev).abs() < 1e-12);
            prev = now;
        }
        assert!((prev - n0).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_only_gains_phase() {
        let grid = GridSpec::standard();
        let surf = HarmonicSurface::new(0.0, vec![ModeSurface::undisplaced(1.0).unwrap()]).unwrap();
        let prop = SplitOperator::new(&[surf], 0.0, &grid, 0.01, Some(&CapSpec::eckart_default()));
        for n in [0, 2] {
            let psi0 = ground_packet(&grid, n);
            let mut psi = psi0.clone();
            for _ in 0..2500 {
                prop.step(&mut psi);
            }
            let ov = psi0.inner(&psi, grid.spacing).norm();
            assert!((ov - 1.0).abs() < 1e-8, "n={n}: {ov}");
        }
    }

    #[test]
    fn coupled_block_is_unitary() {
        let grid = GridSpec::<f64>::standard();
        let s1 = HarmonicSurface::new(0.0, vec![ModeSurface::new(1.5, 0.2).unwrap(), ModeSurface::undisplaced(1.0).unwrap()]).unwrap();
        let s2 = HarmonicSurface::new(0.73, vec![ModeSurface::undisplaced(1.0).unwrap(), ModeSurface::new(2.0, 0.1).unwrap()]).unwrap();
        let prop = SplitOperator::new(&[s1, s2], 1.0, &grid, 0.01, None);
        let g = ground_packet(&grid, 0);
        let n = grid.points_per_mode;
        let mut psi = Wavepacket::zeros(2, n * n);
        for a in 0..n {
            for b in 0..n {
                psi.amplitudes[a * n + b] = g.amplitudes[a] * g.amplitudes[b];
            }
        }
        let dv = grid.spacing * grid.spacing;
        let (n0, e0) = (psi.norm_sqr(dv), prop.energy(&psi, dv));
        for _ in 0..500 {
            prop.step(&mut psi);
        }
        assert!((psi.norm_sqr(dv) - n0).abs() < 1e-11);
        assert!(psi.state(1).iter().any(|z| z.norm() > 1e-3), "coupling transfers amplitude");
        assert!((prop.energy(&psi, dv) - e0).abs() < 1e-4 * e0.abs());
    }
}
