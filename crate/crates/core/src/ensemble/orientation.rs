//! Orientational averaging of dipole projection products.

use serde::{Deserialize, Serialize};

use crate::model::{dot, Dipole};
use crate::real::Real;

/// How the lab-frame polarization is related to the molecular dipoles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationScheme<F> {
    /// One molecular orientation; every pulse polarized along the vector.
    Fixed(Dipole<F>),
    /// Exact isotropic average from the rank-4 isotropic tensor.
    AnalyticTensor,
    /// Isotropic average over a quadrature set of lab polarizations.
    Quadrature(OrientationQuadrature<F>),
}

impl<F: Real> OrientationScheme<F> {
    pub fn fixed_x() -> Self {
        OrientationScheme::Fixed([F::one(), F::zero(), F::zero()])
    }

    /// `⟨(ε̂·a)(ε̂·b)⟩` under this scheme.
    pub fn pair(&self, a: &Dipole<F>, b: &Dipole<F>) -> F {
        match self {
            OrientationScheme::Fixed(e) => dot(e, a) * dot(e, b),
            OrientationScheme::AnalyticTensor => dot(a, b) / F::c(3.0),
            OrientationScheme::Quadrature(q) => q
                .points
                .iter()
                .zip(&q.weights)
                .fold(F::zero(), |acc, (e, &w)| acc + w * dot(e, a) * dot(e, b)),
        }
    }

    /// `⟨(ε̂·a)(ε̂·b)(ε̂·c)(ε̂·d)⟩` under this scheme.
    pub fn quad(&self, a: &Dipole<F>, b: &Dipole<F>, c: &Dipole<F>, d: &Dipole<F>) -> F {
        match self {
            OrientationScheme::Fixed(e) => dot(e, a) * dot(e, b) * dot(e, c) * dot(e, d),
            OrientationScheme::AnalyticTensor => isotropic_fourth(a, b, c, d),
            OrientationScheme::Quadrature(q) => q.average(|e| dot(e, a) * dot(e, b) * dot(e, c) * dot(e, d)),
        }
    }
}

/// `[(a·b)(c·d) + (a·c)(b·d) + (a·d)(b·c)]/15`.
pub fn isotropic_fourth<F: Real>(a: &Dipole<F>, b: &Dipole<F>, c: &Dipole<F>, d: &Dipole<F>) -> F {
    (dot(a, b) * dot(c, d) + dot(a, c) * dot(b, d) + dot(a, d) * dot(b, c)) / F::c(15.0)
}

/// Unit vectors with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationQuadrature<F> {
    pub points: Vec<Dipole<F>>,
    pub weights: Vec<F>,
}

impl<F: Real> OrientationQuadrature<F> {
    /// Gauss-Legendre nodes in `cos θ` times equally spaced azimuths.
    ///
    /// Exact for polynomials in the direction cosines up to degree
    /// `min(2·n_polar − 1, n_azimuth − 1)`; `(3, 5)` covers the quartic
    /// products needed for pump-probe signals.
    pub fn product(n_polar: usize, n_azimuth: usize) -> Self {
        let (nodes, gl_weights) = gauss_legendre(n_polar.max(1));
        let n_az = n_azimuth.max(1);
        let mut points = Vec::with_capacity(nodes.len() * n_az);
        let mut weights = Vec::with_capacity(nodes.len() * n_az);
        for (&z, &w) in nodes.iter().zip(&gl_weights) {
            let r = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..n_az {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / n_az as f64;
                points.push([F::c(r * phi.cos()), F::c(r * phi.sin()), F::c(z)]);
                weights.push(F::c(0.5 * w / n_az as f64));
            }
        }
        Self { points, weights }
    }

    /// Smallest product rule exact for quartic averages.
    pub fn quartic() -> Self {
        Self::product(3, 5)
    }

    /// Quasi-uniform equal-weight points on the sphere (golden spiral).
    pub fn fibonacci(n: usize) -> Self {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let n = n.max(1);
        let points = (0..n)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                [F::c(r * phi.cos()), F::c(r * phi.sin()), F::c(z)]
            })
            .collect();
        Self {
            points,
            weights: vec![F::one() / F::from_usize_lossy(n); n],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn average(&self, f: impl Fn(&Dipole<F>) -> F) -> F {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(F::zero(), |acc, (e, &w)| acc + w * f(e))
    }
}

/// Gauss-Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(3);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let x4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((x4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn single_dipole_fifth() {
        let mu: [f64; 3] = [0.3, -1.2, 0.4];
        let m2 = dot(&mu, &mu);
        let iso = isotropic_fourth(&mu, &mu, &mu, &mu);
        assert!((iso - m2 * m2 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_pair_against_sampled_sphere() {
        let a: [f64; 3] = [1.0, 0.0, 0.0];
        let b = [0.0, 3.0, 0.0];
        let exact = isotropic_fourth(&a, &a, &b, &b);
        assert!((exact - 9.0 / 15.0).abs() < 1e-14);
        let fib = OrientationQuadrature::<f64>::fibonacci(20_000);
        let sampled = fib.average(|e| dot(e, &a).powi(2) * dot(e, &b).powi(2));
        assert!((sampled - exact).abs() / exact < 1e-3, "{sampled}");
        let rule = OrientationQuadrature::<f64>::quartic();
        let q = rule.average(|e| dot(e, &a).powi(2) * dot(e, &b).powi(2));
        assert!((q - exact).abs() < 1e-14);
    }

    #[test]
    fn quadrature_weights_sum_to_one() {
        for q in [OrientationQuadrature::<f64>::quartic(), OrientationQuadrature::fibonacci(101)] {
            let s: f64 = q.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn quartic_rule_matches_tensor(v in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let d = |k: usize| [v[3 * k], v[3 * k + 1], v[3 * k + 2]];
            let (a, b, c, e) = (d(0), d(1), d(2), d(3));
            let exact = isotropic_fourth(&a, &b, &c, &e);
            let q = OrientationScheme::Quadrature(OrientationQuadrature::quartic()).quad(&a, &b, &c, &e);
            prop_assert!((q - exact).abs() < 1e-12);
            let p = OrientationScheme::Quadrature(OrientationQuadrature::quartic()).pair(&a, &b);
            prop_assert!((p - dot(&a, &b) / 3.0).abs() < 1e-12);
        }
    }
}
