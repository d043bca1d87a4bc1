//! Vibronic model systems: a ground state, one or two singly excited states
//! and, for the dimer, a doubly excited state.

mod franck_condon;
mod grid;
mod surface;

pub use franck_condon::{
    adaptive_franck_condon, franck_condon_matrix, mode_overlaps, rectangular_franck_condon,
    FranckCondonMatrix, DEFAULT_FC_TRUNCATION, FC_COMPLETENESS_TOLERANCE,
};
pub use grid::{
    grid_for_modes, vibrational_eigenbasis, GridSpec, VibrationalBasis,
    RESOLUTION_TAIL_TOLERANCE,
};
pub use surface::{huang_rhys_from_shift, shift_from_huang_rhys, HarmonicSurface, ModeSurface};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Transition dipole in the laboratory frame.
pub type Dipole<F> = [F; 3];

pub fn dot<F: Real>(a: &Dipole<F>, b: &Dipole<F>) -> F {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A monomer or dimer with Condon dipoles.
///
/// `ground_dipoles[i]` couples `g ↔ eᵢ`; `doubly_dipoles[i]` couples
/// `eᵢ ↔ f`. There is no `g ↔ f` dipole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibronicModel<F> {
    pub ground: HarmonicSurface<F>,
    pub excited: Vec<HarmonicSurface<F>>,
    pub doubly: Option<HarmonicSurface<F>>,
    /// Coupling between `e₁` and `e₂`; zero for a monomer.
    pub coupling: F,
    pub ground_dipoles: Vec<Dipole<F>>,
    pub doubly_dipoles: Vec<Dipole<F>>,
}

/// Parameters of the coupled dimer. Site 1 carries mode 1, site 2 mode 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerParams<F> {
    /// Site energy of `e₁`.
    pub site_energy: F,
    /// `Ω_e,2 − Ω_e,1`.
    pub energy_gap: F,
    pub coupling: F,
    pub omega_e1: F,
    pub omega_e2: F,
    pub huang_rhys_1: F,
    pub huang_rhys_2: F,
    pub omega_0: F,
}

impl<F: Real> DimerParams<F> {
    /// The coupled dimer used as the electronic-coherence test case.
    pub fn reference(site_energy: F) -> Self {
        Self {
            site_energy,
            energy_gap: F::c(0.73),
            coupling: F::one(),
            omega_e1: F::c(1.5),
            omega_e2: F::two(),
            huang_rhys_1: F::c(0.02),
            huang_rhys_2: F::c(0.005),
            omega_0: F::one(),
        }
    }
}

fn check_huang_rhys<F: Real>(s: F) -> Result<()> {
    if !(s >= F::zero()) || !s.is_finite() {
        return Err(Error::invalid(
            "huang_rhys",
            format!("Huang-Rhys factor must be non-negative, got {s}"),
        ));
    }
    Ok(())
}

impl<F: Real> VibronicModel<F> {
    /// Two-level system with one mode; the excited mode has frequency
    /// `omega_e` and is displaced according to `huang_rhys`.
    pub fn build_monomer(omega_e: F, huang_rhys: F, omega_0: F, offset: F) -> Result<Self> {
        check_huang_rhys(huang_rhys)?;
        let ground = HarmonicSurface::new(F::zero(), vec![ModeSurface::undisplaced(omega_0)?])?;
        let shift = shift_from_huang_rhys(huang_rhys, omega_0);
        let excited = HarmonicSurface::new(offset, vec![ModeSurface::new(omega_e, shift)?])?;
        Ok(Self {
            ground,
            excited: vec![excited],
            doubly: None,
            coupling: F::zero(),
            ground_dipoles: vec![[F::one(), F::zero(), F::zero()]],
            doubly_dipoles: Vec::new(),
        })
    }

    /// Coupled dimer with orthogonal site dipoles of norm ratio 1:3 and an
    /// unbound doubly excited state.
    pub fn build_dimer(p: &DimerParams<F>) -> Result<Self> {
        check_huang_rhys(p.huang_rhys_1)?;
        check_huang_rhys(p.huang_rhys_2)?;
        if !p.coupling.is_finite() || !p.energy_gap.is_finite() {
            return Err(Error::invalid("coupling", "coupling and gap must be finite"));
        }
        let w0 = ModeSurface::undisplaced(p.omega_0)?;
        let site1 = ModeSurface::new(p.omega_e1, shift_from_huang_rhys(p.huang_rhys_1, p.omega_0))?;
        let site2 = ModeSurface::new(p.omega_e2, shift_from_huang_rhys(p.huang_rhys_2, p.omega_0))?;
        let e1 = p.site_energy;
        let e2 = p.site_energy + p.energy_gap;

        let d1 = [F::one(), F::zero(), F::zero()];
        let d2 = [F::zero(), F::c(3.0), F::zero()];
        Ok(Self {
            ground: HarmonicSurface::new(F::zero(), vec![w0, w0])?,
            excited: vec![
                HarmonicSurface::new(e1, vec![site1, w0])?,
                HarmonicSurface::new(e2, vec![w0, site2])?,
            ],
            doubly: Some(HarmonicSurface::new(e1 + e2, vec![site1, site2])?),
            coupling: p.coupling,
            ground_dipoles: vec![d1, d2],
            // Exciting e₁ → f promotes site 2 and vice versa.
            doubly_dipoles: vec![d2, d1],
        })
    }

    pub fn n_modes(&self) -> usize {
        self.ground.n_modes()
    }

    pub fn n_excited(&self) -> usize {
        self.excited.len()
    }

    pub fn is_dimer(&self) -> bool {
        self.excited.len() == 2
    }

    pub fn has_doubly_excited(&self) -> bool {
        self.doubly.is_some() && !self.doubly_dipoles.is_empty()
    }

    /// Ground-state frequency of mode 0, the reduced-unit reference ω₀.
    pub fn omega_0(&self) -> F {
        self.ground.modes[0].frequency
    }

    /// Electronic Hamiltonian of the singly excited block at a single
    /// nuclear configuration.
    pub fn excited_potential_matrix(&self, x: &[F]) -> Vec<Vec<F>> {
        let n = self.n_excited();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            self.excited[i].potential(x)
                        } else {
                            self.coupling
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Copy with every electronic offset shifted by `c` (f by `2c`).
    pub fn shifted(&self, c: F) -> Self {
        let mut out = self.clone();
        for s in &mut out.excited {
            s.offset += c;
        }
        if let Some(f) = &mut out.doubly {
            f.offset += c + c;
        }
        out
    }

    /// Copy with every dipole projected on `polarization`, keeping the
    /// projection along the first axis.
    pub fn projected(&self, polarization: &Dipole<F>) -> Self {
        let proj = |d: &Dipole<F>| [dot(d, polarization), F::zero(), F::zero()];
        let mut out = self.clone();
        out.ground_dipoles = self.ground_dipoles.iter().map(proj).collect();
        out.doubly_dipoles = self.doubly_dipoles.iter().map(proj).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomer_structure() {
        let m = VibronicModel::<f64>::build_monomer(1.5, 0.02, 1.0, 10.0).unwrap();
        assert_eq!(m.n_modes(), 1);
        assert_eq!(m.n_excited(), 1);
        assert!(!m.has_doubly_excited());
        let d = m.excited[0].modes[0].shift;
        assert!((huang_rhys_from_shift(d, 1.0) - 0.02).abs() < 1e-12);
        assert!(VibronicModel::<f64>::build_monomer(0.0, 0.02, 1.0, 0.0).is_err());
        assert!(VibronicModel::<f64>::build_monomer(1.0, -0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn dimer_structure() {
        let m = VibronicModel::build_dimer(&DimerParams::<f64>::reference(10.0)).unwrap();
        assert_eq!(m.n_modes(), 2);
        let f = m.doubly.as_ref().unwrap();
        assert!((f.offset - (m.excited[0].offset + m.excited[1].offset)).abs() < 1e-14);
        assert_eq!(f.modes[0], m.excited[0].modes[0]);
        assert_eq!(f.modes[1], m.excited[1].modes[1]);
        assert_eq!(dot(&m.ground_dipoles[0], &m.ground_dipoles[1]), 0.0);
        let ratio = dot(&m.ground_dipoles[1], &m.ground_dipoles[1]).sqrt()
            / dot(&m.ground_dipoles[0], &m.ground_dipoles[0]).sqrt();
        assert!((ratio - 3.0).abs() < 1e-14);
        let v = m.excited_potential_matrix(&[0.0, 0.0]);
        assert_eq!(v[0][1], v[1][0]);
    }
}
