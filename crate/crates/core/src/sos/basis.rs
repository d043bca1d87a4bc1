//! Vibronic eigenbasis of the singly excited manifold.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{grid_for_modes, vibrational_eigenbasis, Dipole, ModeSurface, VibronicModel};
use crate::real::Real;

/// Defect above which a basis is rejected.
pub const SOS_TRUNCATION_LIMIT: f64 = 1e-3;

/// Truncation controls for [`SosBasis::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SosOptions {
    /// Highest vibrational quantum per mode that may be initially populated.
    pub initial_quanta: usize,
    /// Defect the adaptive loop aims for before giving up growing the basis.
    pub target_defect: f64,
    /// Excited-state quanta per mode to start from; chosen automatically if `None`.
    pub excited_quanta: Option<usize>,
    pub max_quanta: usize,
}

impl Default for SosOptions {
    fn default() -> Self {
        Self {
            initial_quanta: 0,
            target_defect: 1e-10,
            excited_quanta: None,
            max_quanta: 160,
        }
    }
}

impl SosOptions {
    pub fn with_initial_quanta(initial_quanta: usize) -> Self {
        Self {
            initial_quanta,
            ..Self::default()
        }
    }
}

/// Sum-over-states basis.
///
/// * ground states `n` are product states with `ground_quanta` levels per
///   mode, index `n = Σ_k n_k · ground_quanta^{M−1−k}`;
/// * `projections[i][(n, φ)] = ⟨i, ν_n^(g)|φ⟩`;
/// * `doubly_projections[i][(m, φ)] = ⟨ν_m^(f)| (e_i component of φ)⟩`.
#[derive(Debug, Clone)]
pub struct SosBasis<F: Real> {
    pub ground_energies: Vec<F>,
    pub ground_quanta: usize,
    pub n_modes: usize,
    pub excited_energies: Vec<F>,
    pub projections: Vec<DMatrix<F>>,
    pub doubly_energies: Vec<F>,
    pub doubly_projections: Vec<DMatrix<F>>,
    pub ground_dipoles: Vec<Dipole<F>>,
    pub doubly_dipoles: Vec<Dipole<F>>,
    /// Largest missing weight of an initial state in the excited basis.
    pub initial_defect: F,
    /// Largest missing weight of an excited eigenstate in the ground basis,
    /// over eigenstates reachable from the initial states.
    pub emission_defect: F,
}

struct ModeBases<F: Real> {
    ground_energies: Vec<F>,
    // Per excited state: overlaps ⟨ν^g_n|ν^{e_i}_k⟩ and energies.
    excited: Vec<(DMatrix<F>, Vec<F>)>,
    // Per excited state: overlaps ⟨ν^f_m|ν^{e_i}_k⟩, and f energies.
    doubly: Option<(Vec<DMatrix<F>>, Vec<F>)>,
    // ⟨ν^{e_1}_k|ν^{e_2}_l⟩ for the dimer.
    cross: Option<DMatrix<F>>,
}

fn mode_bases<F: Real>(
    model: &VibronicModel<F>,
    mode: usize,
    kg: usize,
    ke: usize,
    kf: usize,
) -> Result<ModeBases<F>> {
    let g = model.ground.modes[mode];
    let es: Vec<ModeSurface<F>> = model.excited.iter().map(|s| s.modes[mode]).collect();
    let f = model.doubly.as_ref().map(|s| s.modes[mode]);

    let mut all = vec![g];
    all.extend(es.iter().copied());
    all.extend(f);
    let grid = grid_for_modes(&all, kg.max(ke).max(kf));

    let bg = vibrational_eigenbasis(&g, &grid, kg)?;
    let be = es
        .iter()
        .map(|m| vibrational_eigenbasis(m, &grid, ke))
        .collect::<Result<Vec<_>>>()?;
    let excited = be
        .iter()
        .map(|b| (bg.overlaps(b), b.energies.clone()))
        .collect();
    let doubly = match (&f, model.has_doubly_excited()) {
        (Some(fm), true) => {
            let bf = vibrational_eigenbasis(fm, &grid, kf)?;
            Some((be.iter().map(|b| bf.overlaps(b)).collect(), bf.energies.clone()))
        }
        _ => None,
    };
    let cross = (be.len() == 2).then(|| be[0].overlaps(&be[1]));
    Ok(ModeBases {
        ground_energies: bg.energies,
        excited,
        doubly,
        cross,
    })
}

fn kron_all<F: Real>(mats: &[&DMatrix<F>]) -> DMatrix<F> {
    mats.iter()
        .fold(DMatrix::from_element(1, 1, F::one()), |acc, m| acc.kronecker(*m))
}

fn product_energies<F: Real>(per_mode: &[&Vec<F>], offset: F) -> Vec<F> {
    per_mode.iter().fold(vec![offset], |acc, levels| {
        acc.iter()
            .flat_map(|&a| levels.iter().map(move |&e| a + e))
            .collect()
    })
}

impl<F: Real> SosBasis<F> {
    /// Builds the basis, growing the truncation until both defects fall
    /// below `target_defect` or `max_quanta` is reached.
    pub fn build(model: &VibronicModel<F>, opts: &SosOptions) -> Result<Self> {
        let margin = if model.n_modes() == 1 { 16 } else { 4 };
        let mut ke = opts
            .excited_quanta
            .unwrap_or(opts.initial_quanta + margin)
            .max(opts.initial_quanta + 2);
        let target = F::c(opts.target_defect);
        loop {
            let kg = 2 * ke + margin;
            let basis = Self::build_fixed(model, opts.initial_quanta, kg, ke, ke)?;
            let worst = basis.initial_defect.max(basis.emission_defect);
            if worst <= target || kg + margin > opts.max_quanta {
                if worst > F::c(SOS_TRUNCATION_LIMIT) {
                    return Err(Error::Truncation {
                        defect: worst.to_f64_lossy(),
                        limit: SOS_TRUNCATION_LIMIT,
                    });
                }
                return Ok(basis);
            }
            ke += margin;
        }
    }

    /// Builds the basis with explicit per-mode truncations.
    pub fn build_fixed(
        model: &VibronicModel<F>,
        initial_quanta: usize,
        kg: usize,
        ke: usize,
        kf: usize,
    ) -> Result<Self> {
        let n_modes = model.n_modes();
        let n_exc = model.n_excited();
        if initial_quanta >= kg {
            return Err(Error::invalid("initial_quanta", "initial states exceed the ground basis"));
        }
        let modes = (0..n_modes)
            .map(|k| mode_bases(model, k, kg, ke, kf))
            .collect::<Result<Vec<_>>>()?;

        let ground_energies = product_energies(
            &modes.iter().map(|m| &m.ground_energies).collect::<Vec<_>>(),
            model.ground.offset,
        );

        // Excited block in the product basis of each site, J-coupled.
        let block = ke.pow(n_modes as u32);
        let dim = block * n_exc;
        let mut h = DMatrix::<F>::zeros(dim, dim);
        for i in 0..n_exc {
            let e = product_energies(
                &modes.iter().map(|m| &m.excited[i].1).collect::<Vec<_>>(),
                model.excited[i].offset,
            );
            for (k, &ek) in e.iter().enumerate() {
                h[(i * block + k, i * block + k)] = ek;
            }
        }
        if n_exc == 2 && model.coupling != F::zero() {
            let cross = kron_all(&modes.iter().map(|m| m.cross.as_ref().unwrap()).collect::<Vec<_>>());
            let j = cross * model.coupling;
            h.view_mut((0, block), (block, block)).copy_from(&j);
            h.view_mut((block, 0), (block, block)).copy_from(&j.transpose());
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let excited_energies: Vec<F> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let c = DMatrix::from_fn(dim, dim, |r, col| eig.eigenvectors[(r, order[col])]);

        let mut projections = Vec::with_capacity(n_exc);
        let mut components = Vec::with_capacity(n_exc);
        for i in 0..n_exc {
            let ci = c.rows(i * block, block).into_owned();
            let gi = kron_all(&modes.iter().map(|m| &m.excited[i].0).collect::<Vec<_>>());
            projections.push(&gi * &ci);
            components.push(ci);
        }

        let (doubly_energies, doubly_projections) = if model.has_doubly_excited() {
            let f_levels: Vec<&Vec<F>> = modes.iter().map(|m| &m.doubly.as_ref().unwrap().1).collect();
            let energies = product_energies(&f_levels, model.doubly.as_ref().unwrap().offset);
            let projs = (0..n_exc)
                .map(|i| {
                    let oi = kron_all(
                        &modes
                            .iter()
                            .map(|m| &m.doubly.as_ref().unwrap().0[i])
                            .collect::<Vec<_>>(),
                    );
                    &oi * &components[i]
                })
                .collect();
            (energies, projs)
        } else {
            (Vec::new(), Vec::new())
        };

        let mut basis = Self {
            ground_energies,
            ground_quanta: kg,
            n_modes,
            excited_energies,
            projections,
            doubly_energies,
            doubly_projections,
            ground_dipoles: model.ground_dipoles.clone(),
            doubly_dipoles: model.doubly_dipoles.clone(),
            initial_defect: F::zero(),
            emission_defect: F::zero(),
        };
        basis.compute_defects(initial_quanta);
        Ok(basis)
    }

    fn compute_defects(&mut self, initial_quanta: usize) {
        let initial = self.initial_states(initial_quanta);
        let mut init_def = F::zero();
        let mut reach = vec![F::zero(); self.n_excited_states()];
        for &n in &initial {
            for p in &self.projections {
                let row = p.row(n);
                let w = row.iter().fold(F::zero(), |a, &x| a + x * x);
                init_def = init_def.max(F::one() - w);
                for (phi, &x) in row.iter().enumerate() {
                    reach[phi] = reach[phi].max(x.abs());
                }
            }
        }
        // Emission defect of φ weighted by its population from the initial states.
        let mut em_def = F::zero();
        for (phi, &r) in reach.iter().enumerate() {
            if r == F::zero() {
                continue;
            }
            let w = self.projections.iter().fold(F::zero(), |a, p| {
                a + p.column(phi).iter().fold(F::zero(), |b, &x| b + x * x)
            });
            em_def = em_def.max((F::one() - w).max(F::zero()) * r * r);
        }
        self.initial_defect = init_def.max(F::zero());
        self.emission_defect = em_def;
    }

    /// Ground product states whose every mode quantum is at most `q`.
    pub fn initial_states(&self, q: usize) -> Vec<usize> {
        (0..self.ground_energies.len())
            .filter(|&n| self.quanta(n).iter().all(|&k| k <= q))
            .collect()
    }

    /// Per-mode quantum numbers of ground product state `n`.
    pub fn quanta(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_modes];
        let mut r = n;
        for k in (0..self.n_modes).rev() {
            out[k] = r % self.ground_quanta;
            r /= self.ground_quanta;
        }
        out
    }

    pub fn n_ground(&self) -> usize {
        self.ground_energies.len()
    }

    pub fn n_excited_states(&self) -> usize {
        self.excited_energies.len()
    }

    pub fn n_electronic(&self) -> usize {
        self.projections.len()
    }

    pub fn has_doubly_excited(&self) -> bool {
        !self.doubly_projections.is_empty()
    }
}
