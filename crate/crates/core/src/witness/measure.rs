//! Oscillation measures of a sampled pump-probe trace.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::real::Real;
use num_complex::Complex;

/// Relative tolerance on sample spacing for a trace to count as uniform.
const UNIFORM_TOLERANCE: f64 = 1e-6;

/// Start of the analysis window: pulses no longer overlap after
/// `3(σ_P + σ_P')`.
pub fn overlap_cutoff<F: Real>(sigma_pump_max: F, sigma_probe_max: F) -> F {
    F::c(3.0) * (sigma_pump_max + sigma_probe_max)
}

fn uniform_step<F: Real>(times: &[F]) -> Result<F> {
    if times.len() < 2 {
        return Err(Error::Sampling { needed: 2, got: times.len() });
    }
    let step = (times[times.len() - 1] - times[0]) / F::from_usize_lossy(times.len() - 1);
    if !(step > F::zero()) {
        return Err(Error::invalid("times", "sample times must increase"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - step).abs() > F::c(UNIFORM_TOLERANCE) * step {
            return Err(Error::invalid("times", "sampling must be uniform"));
        }
    }
    Ok(step)
}

/// Indices of `times` inside `[lo, hi]`, allowing for rounding of the endpoints.
fn window<F: Real>(times: &[F], lo: F, hi: F) -> Result<std::ops::Range<usize>> {
    let step = uniform_step(times)?;
    let slack = step * F::c(1e-6);
    let start = times.iter().position(|&t| t >= lo - slack);
    let end = times.iter().rposition(|&t| t <= hi + slack);
    match (start, end) {
        (Some(a), Some(b)) if b > a => Ok(a..b + 1),
        _ => Err(Error::Window(format!(
            "[{lo}, {hi}] contains fewer than two samples of a trace on [{}, {}]",
            times[0],
            times[times.len() - 1]
        ))),
    }
}

/// `(Γ, S̄)` over `[lo, hi]` with the trapezoid rule; `S̄` is the trapezoid mean.
pub(crate) fn gamma_and_mean<F: Real>(times: &[F], signal: &[F], lo: F, hi: F) -> Result<(F, F)> {
    if times.len() != signal.len() {
        return Err(Error::invalid("signal", "times and signal lengths differ"));
    }
    let r = window(times, lo, hi)?;
    let (t, s) = (&times[r.clone()], &signal[r]);
    let trapezoid = |f: &dyn Fn(F) -> F| {
        t.windows(2)
            .zip(s.windows(2))
            .fold(F::zero(), |acc, (tw, sw)| acc + (tw[1] - tw[0]) * (f(sw[0]) + f(sw[1])) * F::half())
    };
    let length = t[t.len() - 1] - t[0];
    let mean = trapezoid(&|v| v) / length;
    let gamma = trapezoid(&|v| (v - mean) * (v - mean));
    Ok((gamma, mean))
}

/// `Γ = ∫ |S(T) − S̄|² dT` over `[3(σ_P,max + σ_P',max), T_final]`.
pub fn oscillation_strength<F: Real>(
    times: &[F],
    signal: &[F],
    sigma_pump_max: F,
    sigma_probe_max: F,
    t_final: F,
) -> Result<F> {
    let t_min = overlap_cutoff(sigma_pump_max, sigma_probe_max);
    Ok(gamma_and_mean(times, signal, t_min, t_final)?.0)
}

/// Oscillation amplitude carried by the angular frequencies in
/// `[omega_lo, omega_hi]`.
///
/// The mean is removed and the one-sided discrete spectrum is summed in
/// quadrature over the band, so a cosine `A·cos(ωT)` inside it gives `A`.
pub fn fourier_peak_amplitude<F: Real>(times: &[F], signal: &[F], omega_lo: F, omega_hi: F) -> Result<F> {
    if times.len() != signal.len() {
        return Err(Error::invalid("signal", "times and signal lengths differ"));
    }
    let step = uniform_step(times)?;
    let nyquist = F::pi() / step;
    if !(omega_lo >= F::zero() && omega_hi > omega_lo && omega_hi <= nyquist) {
        return Err(Error::FrequencyRange {
            low: omega_lo.to_f64_lossy(),
            high: omega_hi.to_f64_lossy(),
            nyquist: nyquist.to_f64_lossy(),
        });
    }
    let n = signal.len();
    let mean = signal.iter().fold(F::zero(), |a, &v| a + v) / F::from_usize_lossy(n);
    let mut buf: Vec<Complex<F>> = signal.iter().map(|&v| Complex::new(v - mean, F::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let resolution = F::two_pi() / (F::from_usize_lossy(n) * step);
    let power = (1..=n / 2)
        .filter(|&k| {
            let w = resolution * F::from_usize_lossy(k);
            w >= omega_lo && w <= omega_hi
        })
        .fold(F::zero(), |a, k| {
            // The Nyquist bin has no mirror partner.
            let fold = if 2 * k == n { F::one() } else { F::two() };
            a + fold * buf[k].norm_sqr()
        });
    Ok((F::two() * power).sqrt() / F::from_usize_lossy(n))
}
