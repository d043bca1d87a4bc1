use witness_core::dynamics::{pump_probe_signal, GridOptions};
use witness_core::ensemble::{OrientationScheme, ThermalWeights};
use witness_core::model::{DimerParams, GridSpec, VibronicModel};
use witness_core::pulse::GaussianPulse;
use witness_core::sos::{absorption_spectrum, pump_probe_sos, SosBasis, SosOptions};

fn times(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|k| from + step * k as f64).collect()
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn mean_center_along(m: &VibronicModel<f64>, orientation: &OrientationScheme<f64>) -> f64 {
    let b = SosBasis::build(m, &SosOptions::default()).unwrap();
    let pop = ThermalWeights::pure(b.n_ground(), 0);
    absorption_spectrum(&b, &pop, orientation).moments().unwrap().0
}

fn mean_center(m: &VibronicModel<f64>) -> f64 {
    mean_center_along(m, &OrientationScheme::fixed_x())
}

#[test]
fn halving_dt_is_converged_for_equal_frequencies() {
    let m = VibronicModel::build_monomer(1.0, 0.02, 1.0, 5.0).unwrap();
    let p = GaussianPulse::new(mean_center(&m), 0.3, 0.0).unwrap();
    let t = times(2.0, 12.0, 0.5);
    let coarse = GridOptions::default();
    let fine = GridOptions { dt: coarse.dt / 2.0, ..coarse };
    let a = pump_probe_signal(&m, &p, &p, &t, &[0], &coarse).unwrap();
    let b = pump_probe_signal(&m, &p, &p, &t, &[0], &fine).unwrap();
    let d = max_rel(&a.total, &b.total);
    assert!(d < 1e-6, "{d:e}");
}

#[test]
fn dt_error_is_second_order_for_stiffer_surface() {
    let m = VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap();
    let p = GaussianPulse::new(mean_center(&m), 0.3, 0.0).unwrap();
    let t = times(2.0, 8.0, 1.0);
    let run = |dt: f64| {
        let o = GridOptions { dt, ..GridOptions::default() };
        pump_probe_signal(&m, &p, &p, &t, &[0], &o).unwrap().total
    };
    let (s1, s2, s4) = (run(0.02), run(0.01), run(0.005));
    let e1 = max_rel(&s1, &s2);
    let e2 = max_rel(&s2, &s4);
    let rate = e1 / e2;
    assert!((3.0..5.0).contains(&rate), "rate {rate}, errors {e1:e} {e2:e}");
    assert!(e2 < 1e-5);
}

#[test]
fn doubling_grid_points_is_converged() {
    let m = VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap();
    let p = GaussianPulse::new(mean_center(&m), 0.3, 0.0).unwrap();
    let t = times(2.0, 10.0, 1.0);
    let base = GridOptions::default();
    let dense = GridOptions {
        grid: GridSpec::new(60, 0.25).unwrap(),
        ..base
    };
    let a = pump_probe_signal(&m, &p, &p, &t, &[0], &base).unwrap();
    let b = pump_probe_signal(&m, &p, &p, &t, &[0], &dense).unwrap();
    let d = max_rel(&a.total, &b.total);
    assert!(d < 1e-5, "{d:e}");
}

#[test]
fn monomer_components_match_sum_over_states() {
    let m = VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap();
    let p = GaussianPulse::new(mean_center(&m), 0.3, 0.0).unwrap();
    let t = times(1.8, 12.0, 0.3);
    let grid = pump_probe_signal(&m, &p, &p, &t, &[0], &GridOptions::default()).unwrap();
    let b = SosBasis::build(&m, &SosOptions::default()).unwrap();
    let pop = ThermalWeights::pure(b.n_ground(), 0);
    let sos = pump_probe_sos(&b, &p, &p, &t, &pop, &OrientationScheme::fixed_x()).unwrap();
    assert!(max_rel(&grid.se, &sos.se) < 1e-4);
    assert!(max_rel(&grid.gsb, &sos.gsb) < 1e-4);
    assert!(max_rel(&grid.total, &sos.total) < 1e-4);
}

#[test]
fn excited_initial_state_matches_sum_over_states() {
    let m = VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap();
    let p = GaussianPulse::new(mean_center(&m), 0.3, 0.0).unwrap();
    let t = times(1.8, 9.0, 0.6);
    let grid = pump_probe_signal(&m, &p, &p, &t, &[2], &GridOptions::default()).unwrap();
    let b = SosBasis::build(&m, &SosOptions::with_initial_quanta(2)).unwrap();
    let pop = ThermalWeights::pure(b.n_ground(), 2);
    let sos = pump_probe_sos(&b, &p, &p, &t, &pop, &OrientationScheme::fixed_x()).unwrap();
    let d = max_rel(&grid.total, &sos.total);
    assert!(d < 1e-4, "{d:e}");
}

#[test]
fn dimer_matches_sum_over_states_with_doubly_excited_state() {
    let params = DimerParams::reference(5.0);
    let m = VibronicModel::build_dimer(&params).unwrap();
    let pol = [0.6, 0.8, 0.0];
    let p = GaussianPulse::polarized(1.0, mean_center_along(&m, &OrientationScheme::Fixed(pol)), 0.3, 0.0, pol).unwrap();
    let t = times(1.8, 6.0, 0.6);
    let grid = pump_probe_signal(&m, &p, &p, &t, &[0, 0], &GridOptions::default()).unwrap();
    let b = SosBasis::build(&m, &SosOptions::default()).unwrap();
    let pop = ThermalWeights::pure(b.n_ground(), 0);
    let sos = pump_probe_sos(&b, &p, &p, &t, &pop, &OrientationScheme::Fixed(pol)).unwrap();
    assert!(grid.esa.iter().any(|&v| v < 0.0));
    for (g, s) in [(&grid.se, &sos.se), (&grid.esa, &sos.esa), (&grid.gsb, &sos.gsb)] {
        let d = max_rel(g, s);
        assert!(d < 1e-3, "{d:e}");
    }
}

/// Oscillation visibility of a trace: peak-to-peak over mean.
fn visibility(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (hi - lo) / mean.abs()
}

#[test]
fn shorter_pulses_give_weaker_vibrational_oscillation() {
    let m = VibronicModel::build_monomer(1.5, 0.02, 1.0, 5.0).unwrap();
    let center = mean_center(&m);
    let t = times(5.4, 16.0, 0.1);
    let vis: Vec<f64> = [0.6, 0.45, 0.3, 0.15]
        .iter()
        .map(|&s| {
            let p = GaussianPulse::new(center, s, 0.0).unwrap();
            visibility(&pump_probe_signal(&m, &p, &p, &t, &[3], &GridOptions::default()).unwrap().total)
        })
        .collect();
    assert!(vis.windows(2).all(|w| w[0] > w[1]), "{vis:?}");
}
