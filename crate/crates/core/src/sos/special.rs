//! Dawson's function and the pump-pair overlap factor built on it.

use num_complex::Complex;

use crate::real::Real;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Dawson's integral `D(y) = e^{−y²} ∫₀^y e^{t²} dt`.
///
/// Power series of `erfi` (all terms positive) below `|y| = 6`, asymptotic
/// series above. Relative accuracy is better than `10⁻¹³` throughout.
pub fn dawson(y: f64) -> f64 {
    let a = y.abs();
    if a == 0.0 {
        return y;
    }
    let value = if a < 6.0 {
        // D(y) = e^{−y²} Σ y^{2k+1} / (k! (2k+1))
        let y2 = a * a;
        let mut term = a;
        let mut sum = a;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= y2 / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add <= 1e-17 * sum {
                break;
            }
        }
        sum * (-y2).exp()
    } else {
        // D(y) ~ (1/2y) Σ (2k−1)!! / (2y²)^k
        let inv = 1.0 / (2.0 * a * a);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let next = term * (2.0 * k - 1.0) * inv;
            if next >= term || next < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * a)
    };
    value.copysign(y)
}

/// `e^{−σ²(a²+b²)/2} · [1 − erf(iσ(a+b)/2)]` for detunings `a`, `b` from the
/// pump carrier.
///
/// Rewritten through Dawson's function so that the large `erfi` growth
/// cancels analytically against the Gaussian factors.
pub fn pump_pair_factor<F: Real>(a: F, b: F, sigma: F) -> Complex<F> {
    let s2 = sigma * sigma;
    let direct = (-(s2 * (a * a + b * b)) * F::half()).exp();
    let y = sigma * (a + b) * F::half();
    let d = a - b;
    let overlap = F::c(FRAC_2_SQRT_PI * dawson(y.to_f64_lossy())) * (-(s2 * d * d) / F::c(4.0)).exp();
    Complex::new(direct, -overlap)
}

/// First-order coefficient in `σ` of `1 − erf(iσ(a+b)/2)`: `−i(a+b)/√π`.
pub fn pump_pair_linear<F: Real>(a: F, b: F) -> Complex<F> {
    Complex::new(F::zero(), -(a + b) * F::c(FRAC_2_SQRT_PI) * F::half())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Simpson quadrature of `e^{−y²}∫₀^y e^{t²}dt` as an independent oracle.
    fn dawson_quadrature(y: f64) -> f64 {
        let n = 200_000;
        let h = y / n as f64;
        let mut s = 0.0;
        for k in 0..=n {
            let t = k as f64 * h;
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * (t * t - y * y).exp();
        }
        s * h / 3.0
    }

    #[test]
    fn dawson_against_quadrature() {
        for &y in &[0.0, 0.1, 0.5, 0.9241388730, 2.0, 5.9, 6.1, 10.0, 20.0] {
            let q = dawson_quadrature(y);
            let d = dawson(y);
            assert!((d - q).abs() <= 1e-9 * q.abs().max(1e-300), "y={y}: {d} vs {q}");
        }
        assert_eq!(dawson(-1.3), -dawson(1.3));
    }

    #[test]
    fn dawson_maximum() {
        // Known maximum D(0.9241388730) = 0.5410442246.
        assert!((dawson(0.924_138_873_0) - 0.541_044_224_6).abs() < 1e-9);
    }

    #[test]
    fn pair_factor_matches_small_argument_erf() {
        // For small y the erf series gives 1 − erf(iy) ≈ 1 − 2iy/√π − 2iy³/(3√π).
        let (a, b, s) = (0.02f64, -0.01f64, 0.3f64);
        let y = s * (a + b) / 2.0;
        let erf_i = FRAC_2_SQRT_PI * (y + y.powi(3) / 3.0 + y.powi(5) / 10.0);
        let g = (-(s * s) * (a * a + b * b) / 2.0).exp();
        let expect = Complex::new(g, -g * erf_i);
        assert!((pump_pair_factor(a, b, s) - expect).norm() < 1e-15);
    }

    #[test]
    fn pair_factor_stays_finite() {
        let z = pump_pair_factor(40.0f64, 35.0, 3.0);
        assert!(z.re.is_finite() && z.im.is_finite());
        assert!(z.norm() < 1.0);
    }
}
