use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GridSpec;
use crate::real::Real;

/// Complex absorbing potential with an Eckart (`sech²`) profile at both
/// ends of every mode axis.
///
/// Within `width` of an edge the potential is `A·sech²(κ·d/width)`, `d` the
/// distance to the edge; it vanishes further inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec<F> {
    pub width: F,
    pub amplitude: Complex<F>,
}

/// Steepness of the profile: at the inner boundary it has fallen to `sech²(6) ≈ 2.5·10⁻⁵`.
const EDGE_STEEPNESS: f64 = 6.0;

impl<F: Real> CapSpec<F> {
    pub fn new(width: F, amplitude: Complex<F>) -> Result<Self> {
        if !(width > F::zero()) {
            return Err(Error::invalid("cap.width", "absorbing layer width must be positive"));
        }
        if !(amplitude.im < F::zero()) {
            return Err(Error::invalid("cap.amplitude", "imaginary part must be negative to absorb"));
        }
        Ok(Self { width, amplitude })
    }

    /// Width 3 and amplitude `−10(1+i)`.
    pub fn eckart_default() -> Self {
        Self {
            width: F::c(3.0),
            amplitude: Complex::new(F::c(-10.0), F::c(-10.0)),
        }
    }

    /// Profile along one axis, values in `[0, 1]`.
    pub fn profile(&self, grid: &GridSpec<F>) -> Vec<F> {
        let xs = grid.coordinates();
        let edge = xs[xs.len() - 1].max(-xs[0]);
        xs.iter()
            .map(|&x| {
                let d = edge - x.abs();
                if d >= self.width {
                    F::zero()
                } else {
                    let c = (F::c(EDGE_STEEPNESS) * d / self.width).cosh();
                    F::one() / (c * c)
                }
            })
            .collect()
    }
}
