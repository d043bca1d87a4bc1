use nalgebra::DMatrix;

use super::grid::{grid_for_modes, vibrational_eigenbasis, GridSpec};
use super::surface::{HarmonicSurface, ModeSurface};
use crate::error::{Error, Result};
use crate::real::Real;

/// Default number of vibrational states per surface.
pub const DEFAULT_FC_TRUNCATION: usize = 20;

/// Completeness defect accepted by [`adaptive_franck_condon`].
pub const FC_COMPLETENESS_TOLERANCE: f64 = 1e-4;

/// Overlaps `M_mn = ⟨ν_m^(a)|ν_n^(b)⟩` between vibrational eigenstates of two
/// surfaces.
///
/// For multi-mode surfaces the states are product states indexed row-major
/// over modes, with `truncation_size` quanta per mode along rows and
/// `columns_per_mode` along columns.
#[derive(Debug, Clone)]
pub struct FranckCondonMatrix<F: Real> {
    pub overlaps: DMatrix<F>,
    pub truncation_size: usize,
    pub columns_per_mode: usize,
}

impl<F: Real> FranckCondonMatrix<F> {
    /// `Σ_m |M_mn|²` for column `n`.
    pub fn column_weight(&self, n: usize) -> F {
        self.overlaps
            .column(n)
            .iter()
            .fold(F::zero(), |acc, &m| acc + m * m)
    }

    /// Largest `1 − Σ_m |M_mn|²` over all columns.
    pub fn completeness_defect(&self) -> F {
        (0..self.overlaps.ncols())
            .map(|n| F::one() - self.column_weight(n))
            .fold(F::zero(), |a, d| a.max(d))
    }
}

/// FC matrix between per-mode eigenbases of `a` (rows) and `b` (columns).
pub fn franck_condon_matrix<F: Real>(
    a: &HarmonicSurface<F>,
    b: &HarmonicSurface<F>,
    grid: Option<&GridSpec<F>>,
    n: usize,
) -> Result<FranckCondonMatrix<F>> {
    rectangular_franck_condon(a, b, grid, n, n)
}

/// FC matrix with `rows` states per mode on `a` and `cols` on `b`.
pub fn rectangular_franck_condon<F: Real>(
    a: &HarmonicSurface<F>,
    b: &HarmonicSurface<F>,
    grid: Option<&GridSpec<F>>,
    rows: usize,
    cols: usize,
) -> Result<FranckCondonMatrix<F>> {
    if a.n_modes() != b.n_modes() {
        return Err(Error::invalid(
            "modes",
            "surfaces must share the same vibrational modes",
        ));
    }
    let mut total = DMatrix::<F>::from_element(1, 1, F::one());
    for (ma, mb) in a.modes.iter().zip(&b.modes) {
        let m = mode_overlaps(ma, mb, grid, rows, cols)?;
        total = total.kronecker(&m);
    }
    Ok(FranckCondonMatrix {
        overlaps: total,
        truncation_size: rows,
        columns_per_mode: cols,
    })
}

/// Overlaps between the eigenbases of two single modes.
pub fn mode_overlaps<F: Real>(
    a: &ModeSurface<F>,
    b: &ModeSurface<F>,
    grid: Option<&GridSpec<F>>,
    rows: usize,
    cols: usize,
) -> Result<DMatrix<F>> {
    let auto;
    let grid = match grid {
        Some(g) => g,
        None => {
            auto = grid_for_modes(&[*a, *b], rows.max(cols));
            &auto
        }
    };
    let ba = vibrational_eigenbasis(a, grid, rows)?;
    let bb = vibrational_eigenbasis(b, grid, cols)?;
    Ok(ba.overlaps(&bb))
}

/// Grows the row truncation until every one of the `cols` columns is complete
/// to [`FC_COMPLETENESS_TOLERANCE`].
pub fn adaptive_franck_condon<F: Real>(
    a: &HarmonicSurface<F>,
    b: &HarmonicSurface<F>,
    cols: usize,
) -> Result<FranckCondonMatrix<F>> {
    let tol = F::c(FC_COMPLETENESS_TOLERANCE);
    let mut rows = cols.max(DEFAULT_FC_TRUNCATION);
    loop {
        let m = rectangular_franck_condon(a, b, None, rows, cols)?;
        let defect = m.completeness_defect();
        if defect < tol {
            return Ok(m);
        }
        if rows >= 4 * cols.max(DEFAULT_FC_TRUNCATION) {
            return Err(Error::Truncation {
                defect: defect.to_f64_lossy(),
                limit: FC_COMPLETENESS_TOLERANCE,
            });
        }
        rows += 10;
    }
}
