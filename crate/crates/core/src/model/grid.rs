//! Uniform coordinate grids and vibrational eigenbases on them.
//!
//! The kinetic operator is the discrete-Fourier (spectral) one, the same
//! operator the split-operator propagator applies through FFTs, so a grid
//! eigenstate here is stationary under propagation on the same grid.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::surface::ModeSurface;
use crate::error::{Error, Result};
use crate::real::Real;

/// Largest tail weight (position edges or momentum edges) tolerated for an
/// eigenstate to count as resolved.
pub const RESOLUTION_TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<F> {
    pub points_per_mode: usize,
    pub spacing: F,
}

impl<F: Real> GridSpec<F> {
    pub fn new(points_per_mode: usize, spacing: F) -> Result<Self> {
        if points_per_mode < 16 {
            return Err(Error::invalid(
                "points_per_mode",
                format!("need at least 16 points per mode, got {points_per_mode}"),
            ));
        }
        if !(spacing > F::zero()) || !spacing.is_finite() {
            return Err(Error::invalid("spacing", "grid spacing must be positive"));
        }
        Ok(Self {
            points_per_mode,
            spacing,
        })
    }

    /// Grid used for propagation by default: 30 points at spacing 0.5.
    pub fn standard() -> Self {
        Self {
            points_per_mode: 30,
            spacing: F::half(),
        }
    }

    /// Checks that the grid spans at least six ground-state widths.
    pub fn validate_for(&self, ground_frequency: F) -> Result<()> {
        let width = (F::half() / ground_frequency).sqrt();
        if self.extent() < F::c(6.0) * width {
            return Err(Error::invalid(
                "spacing",
                format!(
                    "grid extent {} covers fewer than six ground-state widths ({})",
                    self.extent(),
                    width
                ),
            ));
        }
        Ok(())
    }

    pub fn extent(&self) -> F {
        F::from_usize_lossy(self.points_per_mode) * self.spacing
    }

    /// Symmetric coordinates `x_j = (j − (N−1)/2)·dx`.
    pub fn coordinates(&self) -> Vec<F> {
        let n = self.points_per_mode;
        let mid = F::from_usize_lossy(n - 1) * F::half();
        (0..n)
            .map(|j| (F::from_usize_lossy(j) - mid) * self.spacing)
            .collect()
    }

    /// Angular wavenumbers in FFT ordering.
    pub fn wavenumbers(&self) -> Vec<F> {
        let n = self.points_per_mode;
        let dk = F::two_pi() / self.extent();
        (0..n)
            .map(|j| {
                let m = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
                F::c(m) * dk
            })
            .collect()
    }

    pub fn max_wavenumber(&self) -> F {
        F::pi() / self.spacing
    }

    /// Spectral kinetic-energy matrix `F⁻¹ diag(k²/2) F`.
    pub fn kinetic_matrix(&self) -> DMatrix<F> {
        let n = self.points_per_mode;
        let ks = self.wavenumbers();
        let inv_n = F::one() / F::from_usize_lossy(n);
        let row: Vec<F> = (0..n)
            .map(|m| {
                let dm = F::from_usize_lossy(m) * self.spacing;
                ks.iter().fold(F::zero(), |acc, &k| {
                    acc + (k * dm).cos() * k * k * F::half()
                }) * inv_n
            })
            .collect();
        DMatrix::from_fn(n, n, |a, b| row[a.abs_diff(b)])
    }

    /// Grid Hamiltonian of a single harmonic mode.
    pub fn hamiltonian(&self, mode: &ModeSurface<F>) -> DMatrix<F> {
        let mut h = self.kinetic_matrix();
        for (j, x) in self.coordinates().into_iter().enumerate() {
            h[(j, j)] += mode.potential(x);
        }
        h
    }

    pub(crate) fn fft_pair(&self) -> (Arc<dyn Fft<F>>, Arc<dyn Fft<F>>) {
        let mut planner = FftPlanner::new();
        (
            planner.plan_fft_forward(self.points_per_mode),
            planner.plan_fft_inverse(self.points_per_mode),
        )
    }
}

/// Vibrational eigenstates of one mode on a grid.
///
/// Columns of `vectors` are normalized so that `Σ_j |v_j|² dx = 1`.
#[derive(Debug, Clone)]
pub struct VibrationalBasis<F: Real> {
    pub energies: Vec<F>,
    pub vectors: DMatrix<F>,
    pub spacing: F,
}

impl<F: Real> VibrationalBasis<F> {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Overlap matrix `⟨self_m|other_n⟩` by grid quadrature.
    pub fn overlaps(&self, other: &VibrationalBasis<F>) -> DMatrix<F> {
        (self.vectors.transpose() * &other.vectors) * self.spacing
    }

    pub fn gram(&self) -> DMatrix<F> {
        self.overlaps(self)
    }

    pub fn state(&self, n: usize) -> Vec<F> {
        self.vectors.column(n).iter().copied().collect()
    }
}

/// Diagonalizes the grid Hamiltonian of `mode` and returns its lowest
/// `n_states` eigenpairs.
pub fn vibrational_eigenbasis<F: Real>(
    mode: &ModeSurface<F>,
    grid: &GridSpec<F>,
    n_states: usize,
) -> Result<VibrationalBasis<F>> {
    let n = grid.points_per_mode;
    if n_states == 0 {
        return Err(Error::invalid("n_states", "need at least one state"));
    }
    if n_states > n / 2 {
        return Err(Error::Resolution {
            requested: n_states,
            reason: format!("at most {} states on a {n}-point grid", n / 2),
        });
    }
    let eig = SymmetricEigen::new(grid.hamiltonian(mode));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let norm = F::one() / grid.spacing.sqrt();
    let mut vectors = DMatrix::<F>::zeros(n, n_states);
    let mut energies = Vec::with_capacity(n_states);
    for (col, &idx) in order.iter().take(n_states).enumerate() {
        energies.push(eig.eigenvalues[idx]);
        let mut v: Vec<F> = eig.eigenvectors.column(idx).iter().map(|&c| c * norm).collect();
        fix_sign(&mut v);
        for (j, c) in v.into_iter().enumerate() {
            vectors[(j, col)] = c;
        }
    }

    let basis = VibrationalBasis {
        energies,
        vectors,
        spacing: grid.spacing,
    };
    check_resolution(&basis, grid)?;
    Ok(basis)
}

/// Hermite convention: the outermost significant lobe on the right is positive.
fn fix_sign<F: Real>(v: &mut [F]) {
    let peak = v.iter().fold(F::zero(), |m, c| m.max(c.abs()));
    let threshold = peak * F::c(1e-2);
    if let Some(last) = v.iter().rev().find(|c| c.abs() > threshold) {
        if *last < F::zero() {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

fn check_resolution<F: Real>(basis: &VibrationalBasis<F>, grid: &GridSpec<F>) -> Result<()> {
    let n = grid.points_per_mode;
    let edge = (n / 10).max(2);
    let (fwd, _) = grid.fft_pair();
    let ks = grid.wavenumbers();
    let k_cut = grid.max_wavenumber() * F::c(0.8);
    let tol = F::c(RESOLUTION_TAIL_TOLERANCE);
    for s in 0..basis.len() {
        let col = basis.vectors.column(s);
        let edge_weight = (0..edge)
            .chain(n - edge..n)
            .fold(F::zero(), |acc, j| acc + col[j] * col[j])
            * grid.spacing;

        let mut buf: Vec<Complex<F>> = col.iter().map(|&c| Complex::new(c, F::zero())).collect();
        fwd.process(&mut buf);
        let total = buf.iter().fold(F::zero(), |a, z| a + z.norm_sqr());
        let high = buf
            .iter()
            .zip(&ks)
            .filter(|(_, k)| k.abs() > k_cut)
            .fold(F::zero(), |a, (z, _)| a + z.norm_sqr());
        let momentum_weight = high / total;

        if edge_weight > tol || momentum_weight > tol {
            return Err(Error::Resolution {
                requested: basis.len(),
                reason: format!(
                    "state {s} has edge weight {:.2e} and high-momentum weight {:.2e}",
                    edge_weight.to_f64_lossy(),
                    momentum_weight.to_f64_lossy()
                ),
            });
        }
    }
    Ok(())
}

/// Chooses a grid wide enough in position and momentum to hold `n_states`
/// eigenstates of every listed mode.
pub fn grid_for_modes<F: Real>(modes: &[ModeSurface<F>], n_states: usize) -> GridSpec<F> {
    let level = F::from_usize_lossy(2 * n_states + 1);
    let margin = F::c(6.0);
    let mut x_max = F::zero();
    let mut p_max = F::zero();
    for m in modes {
        let w = m.frequency;
        x_max = x_max.max(m.shift.abs() + (level / w).sqrt() + margin / w.sqrt());
        p_max = p_max.max((level * w).sqrt() + margin * w.sqrt());
    }
    let spacing = F::pi() / p_max;
    let mut points = ((F::two() * x_max / spacing).ceil()).to_f64_lossy() as usize;
    points = points.max(32);
    points += points % 2;
    GridSpec {
        points_per_mode: points,
        spacing,
    }
}
