use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use witness_core::ensemble::EnsembleRunner;
use witness_core::pulse::fwhm_of_sigma;
use witness_core::units::PhysicalUnits;
use witness_core::witness::{
    classify_coherence, estimate_witness_time, linear_spectra, overlap_cutoff, window_times, witness_curve,
    CoherenceClass, LinearSpectra, WitnessTime,
};
use witness_core::{GaussianPulse, PumpProbeTrace, Recommendation, StickSpectrum, WitnessCurve};

use crate::cache::{content_hash, write_atomic, Cache};
use crate::config::{
    CenteringSpec, EngineKind, EnsembleBlock, NumericsBlock, RunConfig, SweepAxis, SweepValue, SystemBlock,
};
use crate::error::CliError;
use crate::output::{num, opt, Output};

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub engines: Vec<EngineKind>,
    pub cache: &'a Cache,
    pub out: Output<'a>,
}

impl Context<'_> {
    fn units(&self) -> Option<PhysicalUnits> {
        self.config.units()
    }

    fn single_engine(&self, command: &str) -> Result<EngineKind, CliError> {
        match self.engines.as_slice() {
            [one] => Ok(*one),
            _ => Err(CliError::Config(format!("`{command}` runs one engine; use --engine grid or sos"))),
        }
    }
}

fn class_name(c: CoherenceClass) -> &'static str {
    match c {
        CoherenceClass::Vibrational => "vibrational",
        CoherenceClass::ElectronicPresent => "electronic_present",
        CoherenceClass::Inconclusive => "inconclusive",
    }
}

#[derive(Serialize)]
struct SpectraKey<'a> {
    system: &'a SystemBlock,
    ensemble: &'a EnsembleBlock,
    target_defect: f64,
    max_quanta: usize,
    raman_gamma: f64,
}

fn spectra(config: &RunConfig, cache: &Cache) -> Result<LinearSpectra<f64>, CliError> {
    let n = &config.numerics;
    let key = SpectraKey {
        system: &config.system,
        ensemble: &config.ensemble,
        target_defect: n.sos_target_defect,
        max_quanta: n.sos_max_quanta,
        raman_gamma: n.raman_gamma,
    };
    cache.get_or_compute("spectra", &key, || {
        Ok(linear_spectra(
            &config.model()?,
            &config.ensemble_spec(),
            &config.sos_options(n.sos_target_defect),
            n.raman_gamma,
        )?)
    })
}

fn recommendation(config: &RunConfig, cache: &Cache, centering: CenteringSpec) -> Result<Recommendation, CliError> {
    Ok(Recommendation::from_spectra(&spectra(config, cache)?, centering.to_core())?)
}

// ---- absorption / raman ----

#[derive(Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    Absorption,
    Raman,
}

#[derive(Serialize)]
struct SpectrumPayload<'a> {
    mean: f64,
    variance: f64,
    width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    absorption_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    absorption_time_fwhm: Option<f64>,
    absorption_mean: f64,
    raman_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    advisory: Option<&'a str>,
    sticks: &'a StickSpectrum,
}

fn broadened_axis(sticks: &StickSpectrum, width: f64) -> Vec<f64> {
    let lo = sticks.lines.iter().map(|l| l.0).fold(f64::INFINITY, f64::min) - 5.0 * width;
    let hi = sticks.lines.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max) + 5.0 * width;
    window_times(lo, hi, width / 5.0)
}

pub fn cmd_spectrum(ctx: &Context, kind: SpectrumKind) -> Result<(), CliError> {
    let cfg = ctx.config;
    let s = spectra(cfg, ctx.cache)?;
    let rec = Recommendation::from_spectra(&s, cfg.pulses.centering.to_core())?;
    let (name, sticks) = match kind {
        SpectrumKind::Absorption => ("absorption", &s.absorption),
        SpectrumKind::Raman => ("raman", &s.raman),
    };
    let (mean, variance) = sticks.moments()?;
    let units = ctx.units();

    let mut header = vec!["omega [omega0]".to_string()];
    if units.is_some() {
        header.push("omega [cm-1]".into());
    }
    let with_units = |w: f64, mut rest: Vec<String>| {
        let mut row = vec![num(w)];
        if let Some(u) = units {
            row.push(num(u.to_wavenumber(w)));
        }
        row.append(&mut rest);
        row
    };
    let rows: Vec<Vec<String>> = sticks.lines.iter().map(|&(w, a)| with_units(w, vec![num(a)])).collect();
    let mut footer = vec![("mean", num(mean)), ("variance", num(variance))];
    if kind == SpectrumKind::Absorption {
        footer.push(("T_A", opt(rec.sigma_max)));
    }
    let mut stick_header = header.clone();
    stick_header.push("weight".into());
    ctx.out.csv(&format!("{name}_sticks.csv"), &stick_header, &rows, &footer)?;

    let width = cfg.numerics.broadening;
    let axis = broadened_axis(sticks, width);
    let curve = sticks.broadened(&axis, width);
    let rows: Vec<Vec<String>> = axis.iter().zip(&curve).map(|(&w, &v)| with_units(w, vec![num(v)])).collect();
    header.push("intensity".into());
    ctx.out.csv(&format!("{name}_broadened.csv"), &header, &rows, &[("broadening", num(width))])?;

    let absorption = kind == SpectrumKind::Absorption;
    ctx.out.record(
        &format!("{name}.json"),
        name,
        None,
        SpectrumPayload {
            mean,
            variance,
            width: variance.max(0.0).sqrt(),
            absorption_time: rec.sigma_max.filter(|_| absorption),
            absorption_time_fwhm: rec.fwhm_max.filter(|_| absorption),
            absorption_mean: rec.absorption_mean,
            raman_mean: rec.raman_mean,
            advisory: rec.advisory.as_deref(),
            sticks,
        },
    )?;
    println!("{name}: {} lines, mean {mean:.6}, variance {variance:.6e}", sticks.lines.len());
    if let Some(a) = &rec.advisory {
        println!("advisory: {a}");
    }
    Ok(())
}

// ---- pumpprobe ----

#[derive(Serialize)]
struct TraceKey<'a> {
    system: &'a SystemBlock,
    ensemble: &'a EnsembleBlock,
    numerics: &'a NumericsBlock,
    engine: EngineKind,
    center_frequency: f64,
    sigma: f64,
    strength: f64,
    times: &'a [f64],
}

#[derive(Serialize)]
struct TraceEntry<'a> {
    engine: &'static str,
    sigma: f64,
    file: String,
    trace: &'a PumpProbeTrace,
}

#[derive(Serialize)]
struct Deviation {
    sigma: f64,
    max_relative_deviation: f64,
}

#[derive(Serialize)]
struct PumpProbePayload<'a> {
    center_frequency: f64,
    traces: Vec<TraceEntry<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    engine_comparison: Vec<Deviation>,
}

fn waiting_times(cfg: &RunConfig, sigma: f64) -> Vec<f64> {
    match cfg.pulses.waiting_times {
        Some(t) => window_times(t.from, t.to, t.step),
        None => window_times(overlap_cutoff(sigma, sigma), 20.0, 0.05),
    }
}

fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn cmd_pumpprobe(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config;
    let model = cfg.model()?;
    let spec = cfg.ensemble_spec();
    let center = recommendation(cfg, ctx.cache, cfg.pulses.centering)?.center_frequency;
    let units = ctx.units();

    let mut traces = Vec::new();
    for &engine in &ctx.engines {
        for sigma in cfg.sigma_ladder() {
            let times = waiting_times(cfg, sigma);
            let key = TraceKey {
                system: &cfg.system,
                ensemble: &cfg.ensemble,
                numerics: &cfg.numerics,
                engine,
                center_frequency: center,
                sigma,
                strength: cfg.pulses.strength,
                times: &times,
            };
            let trace: PumpProbeTrace = ctx.cache.get_or_compute("pumpprobe", &key, || {
                let mut e = cfg.engine(engine, cfg.numerics.sos_target_defect)?;
                if let witness_core::Engine::Grid(g) = &mut e {
                    g.horizon = g.horizon.max(times[times.len() - 1] + 8.0 * sigma);
                }
                let pulse = GaussianPulse {
                    strength: cfg.pulses.strength,
                    ..GaussianPulse::new(center, sigma, 0.0)?
                };
                let runner = EnsembleRunner::new(&model, &spec, &e)?;
                Ok(runner.pump_probe(&pulse, &pulse, &times)?)
            })?;
            traces.push((engine, sigma, trace));
        }
    }

    let mut header = vec!["T [1/omega0]".to_string()];
    if units.is_some() {
        header.push("T [fs]".into());
    }
    header.extend(["S_PP", "SE", "ESA", "GSB"].map(String::from));
    let mut entries = Vec::new();
    for (engine, sigma, trace) in &traces {
        let file = format!("pumpprobe_{}_sigma{}.csv", engine.name(), num(*sigma));
        let rows: Vec<Vec<String>> = (0..trace.times.len())
            .map(|i| {
                let t = trace.times[i];
                let mut row = vec![num(t)];
                if let Some(u) = units {
                    row.push(num(u.to_fs(t)));
                }
                row.extend([trace.total[i], trace.se[i], trace.esa[i], trace.gsb[i]].map(num));
                row
            })
            .collect();
        let footer = [("engine", engine.name().to_string()), ("sigma", num(*sigma)), ("center_freq", num(center))];
        ctx.out.csv(&file, &header, &rows, &footer)?;
        entries.push(TraceEntry {
            engine: engine.name(),
            sigma: *sigma,
            file,
            trace,
        });
    }

    let mut comparison = Vec::new();
    if ctx.engines.len() == 2 {
        let n = traces.len() / 2;
        for (g, s) in traces[..n].iter().zip(&traces[n..]) {
            let d = max_relative_deviation(&g.2.total, &s.2.total);
            println!("sigma {}: grid vs sos max relative deviation {d:.3e}", num(g.1));
            if d >= 1e-3 {
                eprintln!("warning: engines disagree beyond 1e-3 at sigma {}", num(g.1));
            }
            comparison.push(Deviation {
                sigma: g.1,
                max_relative_deviation: d,
            });
        }
    }
    let engine_label = match ctx.engines.as_slice() {
        [one] => one.name(),
        _ => "both",
    };
    ctx.out.record(
        "pumpprobe.json",
        "pumpprobe",
        Some(engine_label),
        PumpProbePayload {
            center_frequency: center,
            traces: entries,
            engine_comparison: comparison,
        },
    )?;
    println!("pumpprobe: {} traces, carrier {center:.6}", traces.len());
    Ok(())
}

// ---- witness ----

#[derive(Serialize)]
struct WitnessKey<'a> {
    system: &'a SystemBlock,
    ensemble: &'a EnsembleBlock,
    numerics: &'a NumericsBlock,
    engine: EngineKind,
    centering: CenteringSpec,
    ladder: &'a [f64],
    t_final: f64,
    sample_step: f64,
    strength: f64,
}

/// Curve plus its derived summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessResult {
    pub engine: String,
    pub curve: WitnessCurve,
    pub witness_time: Option<WitnessTime<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_time_fs: Option<f64>,
    pub classification: String,
    pub recommendation: Recommendation,
}

fn witness_result(
    cfg: &RunConfig,
    cache: &Cache,
    engine: EngineKind,
    centering: CenteringSpec,
) -> Result<WitnessResult, CliError> {
    let ladder = cfg.sigma_ladder();
    let key = WitnessKey {
        system: &cfg.system,
        ensemble: &cfg.ensemble,
        numerics: &cfg.numerics,
        engine,
        centering,
        ladder: &ladder,
        t_final: cfg.pulses.t_final,
        sample_step: cfg.pulses.sample_step,
        strength: cfg.pulses.strength,
    };
    let curve: WitnessCurve = cache.get_or_compute("witness", &key, || {
        Ok(witness_curve(&cfg.model()?, &ladder, centering.to_core(), &cfg.witness_options(engine)?)?)
    })?;
    let tol = cfg.numerics.slope_tolerance;
    let witness_time = estimate_witness_time(&curve, tol)?;
    let classification = class_name(classify_coherence(&curve, tol)).to_string();
    let recommendation = recommendation(cfg, cache, centering)?;
    Ok(WitnessResult {
        engine: engine.name().to_string(),
        witness_time_fs: cfg.units().zip(witness_time).map(|(u, w)| u.to_fs(w.fwhm)),
        curve,
        witness_time,
        classification,
        recommendation,
    })
}

fn witness_csv(ctx: &Context, r: &WitnessResult) -> Result<(), CliError> {
    let units = ctx.units();
    let mut header = vec!["sigma [1/omega0]".to_string(), "fwhm [1/omega0]".to_string()];
    if units.is_some() {
        header.push("fwhm [fs]".into());
    }
    header.extend(["gamma [arb.]".to_string(), "mean_signal [arb.]".to_string()]);
    let rows: Vec<Vec<String>> = r
        .curve
        .points
        .iter()
        .map(|p| {
            let fwhm = fwhm_of_sigma(p.sigma);
            let mut row = vec![num(p.sigma), num(fwhm)];
            if let Some(u) = units {
                row.push(num(u.to_fs(fwhm)));
            }
            row.extend([num(p.gamma), num(p.mean_signal)]);
            row
        })
        .collect();
    let mut footer = vec![
        ("T_W_sigma", opt(r.witness_time.map(|w| w.sigma))),
        ("T_W_fwhm", opt(r.witness_time.map(|w| w.fwhm))),
    ];
    if units.is_some() {
        footer.push(("T_W_fs", opt(r.witness_time_fs)));
    }
    footer.extend([
        (
            "T_W_unbounded",
            r.witness_time.is_some_and(|w| w.unbounded).to_string(),
        ),
        ("classification", r.classification.clone()),
        ("T_A", opt(r.recommendation.sigma_max)),
        ("center_freq", num(r.curve.center_frequency)),
    ]);
    ctx.out.csv(&format!("witness_{}.csv", r.engine), &header, &rows, &footer)
}

fn describe(r: &WitnessResult) -> String {
    let tw = match r.witness_time {
        None => "none".to_string(),
        Some(w) => {
            let fs = r.witness_time_fs.map(|v| format!(", {v:.1} fs")).unwrap_or_default();
            let bound = if w.unbounded { " (lower bound)" } else { "" };
            format!("{:.4} (FWHM {:.4}{fs}){bound}", w.sigma, w.fwhm)
        }
    };
    format!(
        "[{}] T_W = {tw}; classification {}; T_A = {}; carrier {:.6}",
        r.engine,
        r.classification,
        r.recommendation.sigma_max.map_or("none".into(), |v| format!("{v:.4}")),
        r.curve.center_frequency
    )
}

pub fn cmd_witness(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config;
    let results = ctx
        .engines
        .iter()
        .map(|&e| witness_result(cfg, ctx.cache, e, cfg.pulses.centering))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &results {
        witness_csv(ctx, r)?;
        println!("{}", describe(r));
        if let Some(a) = &r.recommendation.advisory {
            println!("advisory: {a}");
        }
    }
    ctx.out.record("witness.json", "witness", None, &results)
}

// ---- recommend ----

pub fn cmd_recommend(ctx: &Context) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Payload {
        selected: Recommendation,
        #[serde(skip_serializing_if = "Option::is_none")]
        fwhm_max_fs: Option<f64>,
        alternatives: Vec<Recommendation>,
    }
    let cfg = ctx.config;
    let selected = recommendation(cfg, ctx.cache, cfg.pulses.centering)?;
    let alternatives = CenteringSpec::ALL_SPECTRAL
        .iter()
        .map(|&c| recommendation(cfg, ctx.cache, c))
        .collect::<Result<Vec<_>, _>>()?;
    let fwhm_max_fs = ctx.units().zip(selected.fwhm_max).map(|(u, f)| u.to_fs(f));
    println!(
        "carrier {:.6} ({}), sigma_max {}, fwhm_max {}{}",
        selected.center_frequency,
        selected.centering.label(),
        opt(selected.sigma_max),
        opt(selected.fwhm_max),
        fwhm_max_fs.map(|v| format!(" ({v:.1} fs)")).unwrap_or_default()
    );
    if let Some(a) = &selected.advisory {
        println!("advisory: {a}");
    }
    ctx.out.record(
        "recommend.json",
        "recommend",
        None,
        Payload {
            selected,
            fwhm_max_fs,
            alternatives,
        },
    )
}

// ---- sweep ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepRow {
    index: usize,
    value: String,
    centering: String,
    center_freq: f64,
    t_w_sigma: Option<f64>,
    t_w_fwhm: Option<f64>,
    t_w_fs: Option<f64>,
    t_w_unbounded: bool,
    t_a: Option<f64>,
    classification: String,
    absorption_mean: f64,
    raman_mean: f64,
}

#[derive(Serialize)]
struct IndexEntry {
    value: String,
    centering: String,
    file: String,
}

pub fn cmd_sweep(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config;
    let engine = ctx.single_engine("sweep")?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("`sweep`: block required for the sweep command".into()))?;

    let mut jobs: Vec<(String, RunConfig, CenteringSpec)> = Vec::new();
    for v in &sweep.values {
        match (sweep.axis, *v) {
            (SweepAxis::Centering, SweepValue::Centering(c)) => {
                let mut point = cfg.clone();
                point.sweep = None;
                jobs.push((c.label(), point, c));
            }
            (axis, SweepValue::Number(x)) => {
                let point = cfg.with_monomer(axis, x);
                for c in CenteringSpec::ALL_SPECTRAL {
                    jobs.push((num(x), point.clone(), c));
                }
            }
            _ => unreachable!("validated"),
        }
    }

    let points_dir = ctx.out.dir().join("points");
    std::fs::create_dir_all(&points_dir)?;
    let index: Mutex<BTreeMap<usize, IndexEntry>> = Mutex::new(BTreeMap::new());
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (value, point, centering))| {
            let r = witness_result(point, ctx.cache, engine, *centering)?;
            let row = SweepRow {
                index: i,
                value: value.clone(),
                centering: centering.label(),
                center_freq: r.curve.center_frequency,
                t_w_sigma: r.witness_time.map(|w| w.sigma),
                t_w_fwhm: r.witness_time.map(|w| w.fwhm),
                t_w_fs: r.witness_time_fs,
                t_w_unbounded: r.witness_time.is_some_and(|w| w.unbounded),
                t_a: r.recommendation.sigma_max,
                classification: r.classification.clone(),
                absorption_mean: r.recommendation.absorption_mean,
                raman_mean: r.recommendation.raman_mean,
            };
            let file = format!("{}.json", &content_hash("sweep-point", &(point, centering, engine))?[..16]);
            write_atomic(&points_dir.join(&file), &serde_json::to_vec_pretty(&(&row, &r))?)?;
            let mut idx = index.lock().expect("index lock");
            idx.insert(
                i,
                IndexEntry {
                    value: value.clone(),
                    centering: centering.label(),
                    file,
                },
            );
            write_atomic(&points_dir.join("index.json"), &serde_json::to_vec_pretty(&*idx)?)?;
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let units = ctx.units();
    let axis_header = match sweep.axis {
        SweepAxis::OmegaE => "omega_e [omega0]",
        SweepAxis::HuangRhys => "huang_rhys",
        SweepAxis::Centering => "centering_axis",
    };
    let mut header: Vec<String> = [
        axis_header,
        "centering",
        "center_freq [omega0]",
        "T_W_sigma [1/omega0]",
        "T_W_fwhm [1/omega0]",
    ]
    .map(String::from)
    .to_vec();
    if units.is_some() {
        header.push("T_W_fwhm [fs]".into());
    }
    header.extend(
        ["T_W_unbounded", "T_A [1/omega0]", "classification", "absorption_mean [omega0]", "raman_mean [omega0]"]
            .map(String::from),
    );
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.value.clone(),
                r.centering.clone(),
                num(r.center_freq),
                opt(r.t_w_sigma),
                opt(r.t_w_fwhm),
            ];
            if units.is_some() {
                row.push(opt(r.t_w_fs));
            }
            row.extend([
                r.t_w_unbounded.to_string(),
                opt(r.t_a),
                r.classification.clone(),
                num(r.absorption_mean),
                num(r.raman_mean),
            ]);
            row
        })
        .collect();
    ctx.out.csv("sweep.csv", &header, &table, &[("engine", engine.name().to_string())])?;
    ctx.out.record("sweep.json", "sweep", Some(engine.name()), &rows)?;
    for r in &rows {
        println!(
            "{:>10} {:<16} T_W {:>8} T_A {:>8} {}",
            r.value,
            r.centering,
            r.t_w_sigma.map_or("none".into(), |v| format!("{v:.4}")),
            r.t_a.map_or("none".into(), |v| format!("{v:.4}")),
            r.classification
        );
    }
    Ok(())
}
