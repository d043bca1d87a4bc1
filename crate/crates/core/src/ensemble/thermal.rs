use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Cumulative Boltzmann weight kept after truncation.
pub const THERMAL_CUTOFF: f64 = 1e-6;

/// Boltzmann populations over a list of ground vibrational levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalWeights<F> {
    /// Thermal energy `k_B T` in units of ħω₀.
    pub thermal_energy: F,
    /// Weight per supplied level; truncated levels carry zero.
    pub weights: Vec<F>,
    /// `1 − Σ p_n`.
    pub truncation_defect: F,
}

impl<F: Real> ThermalWeights<F> {
    /// All weight on one level.
    pub fn pure(n_levels: usize, state: usize) -> Self {
        let mut weights = vec![F::zero(); n_levels];
        weights[state] = F::one();
        Self {
            thermal_energy: F::zero(),
            weights,
            truncation_defect: F::zero(),
        }
    }

    /// `(index, weight)` for every level with non-zero weight.
    pub fn populated(&self) -> Vec<(usize, F)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > F::zero())
            .map(|(n, &w)| (n, w))
            .collect()
    }

    pub fn total(&self) -> F {
        self.weights.iter().fold(F::zero(), |a, &w| a + w)
    }
}

/// `p_n ∝ e^{−E_n/kT}` normalized over `energies`, dropping the highest
/// levels once the cumulative weight reaches `1 − 10⁻⁶`.
pub fn thermal_populations<F: Real>(energies: &[F], thermal_energy: F) -> Result<ThermalWeights<F>> {
    if !(thermal_energy >= F::zero()) || !thermal_energy.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("temperature must be non-negative, got {thermal_energy}"),
        ));
    }
    if energies.is_empty() {
        return Err(Error::invalid("energies", "no vibrational levels supplied"));
    }
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].partial_cmp(&energies[b]).unwrap_or(std::cmp::Ordering::Equal));
    let e_min = energies[order[0]];

    let raw: Vec<F> = if thermal_energy == F::zero() {
        energies
            .iter()
            .map(|&e| if e == e_min { F::one() } else { F::zero() })
            .collect()
    } else {
        energies
            .iter()
            .map(|&e| (-(e - e_min) / thermal_energy).exp())
            .collect()
    };
    let z = raw.iter().fold(F::zero(), |a, &w| a + w);

    let mut weights = vec![F::zero(); energies.len()];
    let mut cumulative = F::zero();
    let target = F::one() - F::c(THERMAL_CUTOFF);
    for &n in &order {
        if cumulative >= target {
            break;
        }
        weights[n] = raw[n] / z;
        cumulative += weights[n];
    }
    Ok(ThermalWeights {
        thermal_energy,
        weights,
        truncation_defect: (F::one() - cumulative).max(F::zero()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::PhysicalUnits;
    use proptest::prelude::*;

    fn ladder(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64 + 0.5).collect()
    }

    #[test]
    fn zero_temperature_ground_state() {
        let t = thermal_populations(&ladder(10), 0.0).unwrap();
        assert_eq!(t.weights[0], 1.0);
        assert_eq!(t.populated().len(), 1);
    }

    #[test]
    fn room_temperature_ground_population() {
        let kt = PhysicalUnits::new(100.0).thermal_energy(294.0);
        let t = thermal_populations(&ladder(80), kt).unwrap();
        let oracle = 1.0 - (-1.0 / kt).exp();
        assert!((t.weights[0] - oracle).abs() < 1e-6);
        assert!((t.weights[0] - 0.387).abs() < 1e-3);
        assert!(t.truncation_defect < 1e-4);
        assert!(t.populated().len() < 40);
    }

    #[test]
    fn degenerate_levels_share_weight() {
        let t = thermal_populations(&[0.5, 1.5, 1.5, 2.5], 1.0).unwrap();
        assert_eq!(t.weights[1], t.weights[2]);
    }

    #[test]
    fn negative_temperature_rejected() {
        assert!(thermal_populations(&ladder(3), -1.0).is_err());
    }

    proptest! {
        #[test]
        fn normalized_and_monotone(kt in 0.0f64..5.0) {
            let t = thermal_populations(&ladder(120), kt).unwrap();
            let s = t.total();
            prop_assert!(s <= 1.0 + 1e-12 && s >= 1.0 - 1e-4);
            for w in t.weights.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
