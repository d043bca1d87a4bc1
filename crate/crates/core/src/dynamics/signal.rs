use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cap::CapSpec;
use super::propagator::{Manifold, SplitOperator, Wavepacket};
use crate::error::{Error, Result};
use crate::model::{dot, vibrational_eigenbasis, GridSpec, VibronicModel};
use crate::pulse::GaussianPulse;
use crate::real::Real;
use crate::sos::PumpProbeTrace;

/// Pulses are switched on within this many `σ` of their centers.
pub const PULSE_WINDOW_WIDTHS: f64 = 8.0;

/// Norm growth of the unperturbed packet that counts as numerical blow-up.
pub const INSTABILITY_TOLERANCE: f64 = 1e-6;

/// Numerical parameters of the grid engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions<F> {
    pub grid: GridSpec<F>,
    pub dt: F,
    /// End of the simulated window, measured from the pump center.
    pub horizon: F,
    pub cap: Option<CapSpec<F>>,
}

impl<F: Real> Default for GridOptions<F> {
    fn default() -> Self {
        Self {
            grid: GridSpec::standard(),
            dt: F::c(0.01),
            horizon: F::c(25.0),
            cap: Some(CapSpec::eckart_default()),
        }
    }
}

impl<F: Real> GridOptions<F> {
    fn validate(&self) -> Result<()> {
        if !(self.dt > F::zero()) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", "time step must be positive"));
        }
        if !(self.horizon > F::zero()) {
            return Err(Error::invalid("horizon", "simulated window must be positive"));
        }
        Ok(())
    }
}

/// Perturbative wavepackets, labelled by the pulses that have acted.
///
/// The probe orders stay zero until the probe switches on.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeStack<F> {
    pub time: F,
    /// `ψ⁽⁰⁾` on `g`.
    pub initial: Wavepacket<F>,
    /// Pump excitation `ψ_P` on `e`.
    pub pump: Wavepacket<F>,
    /// Pump excitation and de-excitation `ψ_PP` on `g`.
    pub pump_pump: Wavepacket<F>,
    /// Probe excitation of `ψ⁽⁰⁾` on `e`.
    pub probe: Wavepacket<F>,
    /// Probe excitation of `ψ_PP` on `e`.
    pub bleach: Wavepacket<F>,
    /// Probe de-excitation of `ψ_P` on `g`.
    pub emission: Wavepacket<F>,
    /// Probe excitation of `ψ_P` on `f`, when a doubly excited state exists.
    pub absorption: Option<Wavepacket<F>>,
    probe_active: bool,
}

/// Propagators and couplings for one model on one grid.
pub struct GridEngine<F: Real> {
    model: VibronicModel<F>,
    options: GridOptions<F>,
    ground: SplitOperator<F>,
    singly: SplitOperator<F>,
    doubly: Option<SplitOperator<F>>,
    n_points: usize,
    dv: F,
}

/// Dipole projections on a polarization.
struct Couplings<F> {
    up: Vec<F>,
    to_doubly: Vec<F>,
}

impl<F: Real> Couplings<F> {
    fn new(model: &VibronicModel<F>, pol: &crate::model::Dipole<F>) -> Self {
        Self {
            up: model.ground_dipoles.iter().map(|d| dot(d, pol)).collect(),
            to_doubly: model.doubly_dipoles.iter().map(|d| dot(d, pol)).collect(),
        }
    }
}

/// Field of a pulse on its truncated support.
fn field<F: Real>(pulse: &GaussianPulse<F>, t: F) -> Option<Complex<F>> {
    let window = F::c(PULSE_WINDOW_WIDTHS) * pulse.sigma;
    ((t - pulse.center_time).abs() <= window).then(|| pulse.field_time(t))
}

/// `target[i] += c·μᵢ·src` (g → e).
fn kick_up<F: Real>(target: &mut Wavepacket<F>, src: &Wavepacket<F>, c: Complex<F>, mu: &[F]) {
    for (i, &m) in mu.iter().enumerate() {
        if m == F::zero() {
            continue;
        }
        let cm = c * m;
        for (z, &s) in target.state_mut(i).iter_mut().zip(src.state(0)) {
            *z += cm * s;
        }
    }
}

/// `target += c·Σᵢ μᵢ·src[i]` (e → g or e → f).
fn kick_down<F: Real>(target: &mut Wavepacket<F>, src: &Wavepacket<F>, c: Complex<F>, mu: &[F]) {
    for (i, &m) in mu.iter().enumerate() {
        if m == F::zero() {
            continue;
        }
        let cm = c * m;
        for (z, &s) in target.state_mut(0).iter_mut().zip(src.state(i)) {
            *z += cm * s;
        }
    }
}

impl<F: Real> GridEngine<F> {
    pub fn new(model: &VibronicModel<F>, options: GridOptions<F>) -> Result<Self> {
        options.validate()?;
        options.grid.validate_for(model.omega_0())?;
        let n_modes = model.n_modes();
        let cap = options.cap.as_ref();
        let (grid, dt) = (&options.grid, options.dt);
        let ground = SplitOperator::new(std::slice::from_ref(&model.ground), F::zero(), grid, dt, cap);
        let singly = SplitOperator::new(&model.excited, model.coupling, grid, dt, cap);
        let doubly = model
            .has_doubly_excited()
            .then(|| SplitOperator::new(std::slice::from_ref(model.doubly.as_ref().unwrap()), F::zero(), grid, dt, cap));
        Ok(Self {
            model: model.clone(),
            options,
            ground,
            singly,
            doubly,
            n_points: grid.points_per_mode.pow(n_modes as u32),
            dv: grid.spacing.powi(n_modes as i32),
        })
    }

    pub fn options(&self) -> &GridOptions<F> {
        &self.options
    }

    /// Volume element of the product grid.
    pub fn volume_element(&self) -> F {
        self.dv
    }

    pub fn propagator(&self, manifold: Manifold) -> Option<&SplitOperator<F>> {
        match manifold {
            Manifold::Ground => Some(&self.ground),
            Manifold::Singly => Some(&self.singly),
            Manifold::Doubly => self.doubly.as_ref(),
        }
    }

    /// Product of ground-surface grid eigenstates with the given quanta.
    pub fn initial_state(&self, quanta: &[usize]) -> Result<Wavepacket<F>> {
        let n_modes = self.model.n_modes();
        if quanta.len() != n_modes {
            return Err(Error::invalid(
                "initial_state",
                format!("expected {n_modes} quantum numbers, got {}", quanta.len()),
            ));
        }
        let grid = &self.options.grid;
        let n = grid.points_per_mode;
        let factors = (0..n_modes)
            .map(|k| {
                let b = vibrational_eigenbasis(&self.model.ground.modes[k], grid, quanta[k] + 1)?;
                Ok(b.state(quanta[k]))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut psi = Wavepacket::zeros(1, self.n_points);
        for (p, z) in psi.amplitudes.iter_mut().enumerate() {
            let mut r = p;
            let mut v = F::one();
            for k in (0..n_modes).rev() {
                v *= factors[k][r % n];
                r /= n;
            }
            *z = Complex::new(v, F::zero());
        }
        Ok(psi)
    }

    /// Ground-surface energy of the product state with the given quanta.
    pub fn initial_energy(&self, quanta: &[usize]) -> Result<F> {
        Ok(self.ground.energy(&self.initial_state(quanta)?, self.dv))
    }

    pub fn new_stack(&self, initial: Wavepacket<F>, time: F) -> PerturbativeStack<F> {
        let ne = self.model.n_excited();
        let np = self.n_points;
        PerturbativeStack {
            time,
            initial,
            pump: Wavepacket::zeros(ne, np),
            pump_pump: Wavepacket::zeros(1, np),
            probe: Wavepacket::zeros(ne, np),
            bleach: Wavepacket::zeros(ne, np),
            emission: Wavepacket::zeros(1, np),
            absorption: self.doubly.as_ref().map(|_| Wavepacket::zeros(1, np)),
            probe_active: false,
        }
    }

    /// Trapezoid source terms `−i(dt/2)·V(t)·ψ_source` of both pulses.
    ///
    /// Before the propagation step the orders are fed highest first and
    /// after it lowest first, so every source is read at the same instant
    /// as the field.
    fn kicks(&self, stack: &mut PerturbativeStack<F>, pump: &GaussianPulse<F>, probe: &GaussianPulse<F>, ascending: bool) {
        let h = Complex::new(F::zero(), -self.options.dt * F::half());
        let ep = field(pump, stack.time);
        let eq = field(probe, stack.time);
        if eq.is_some() {
            stack.probe_active = true;
        }
        let cp = Couplings::new(&self.model, &pump.polarization);
        let cq = Couplings::new(&self.model, &probe.polarization);
        let mut ops = [0usize, 1, 2, 3, 4, 5];
        if !ascending {
            ops.reverse();
        }
        for op in ops {
            let s = &mut *stack;
            match (op, ep, eq) {
                (0, Some(e), _) => kick_up(&mut s.pump, &s.initial, h * e, &cp.up),
                (1, Some(e), _) => kick_down(&mut s.pump_pump, &s.pump, h * e.conj(), &cp.up),
                (2, _, Some(e)) => kick_up(&mut s.probe, &s.initial, h * e, &cq.up),
                (3, _, Some(e)) => kick_down(&mut s.emission, &s.pump, h * e.conj(), &cq.up),
                (4, _, Some(e)) => {
                    if let Some(f) = s.absorption.as_mut() {
                        kick_down(f, &s.pump, h * e, &cq.to_doubly);
                    }
                }
                (5, _, Some(e)) => kick_up(&mut s.bleach, &s.pump_pump, h * e, &cq.up),
                _ => {}
            }
        }
    }

    /// Advances every perturbative order by one time step, feeding each
    /// order from the one below it with trapezoid quadrature of the pulse
    /// coupling.
    pub fn propagate_step(
        &self,
        stack: &mut PerturbativeStack<F>,
        pump: &GaussianPulse<F>,
        probe: &GaussianPulse<F>,
    ) -> Result<()> {
        self.kicks(stack, pump, probe, false);
        self.ground.step(&mut stack.initial);
        self.singly.step(&mut stack.pump);
        self.ground.step(&mut stack.pump_pump);
        if stack.probe_active {
            self.singly.step(&mut stack.probe);
            self.singly.step(&mut stack.bleach);
            self.ground.step(&mut stack.emission);
            if let (Some(f), Some(prop)) = (stack.absorption.as_mut(), self.doubly.as_ref()) {
                prop.step(f);
            }
        }
        stack.time += self.options.dt;
        self.kicks(stack, pump, probe, true);

        let norm = stack.initial.norm_sqr(self.dv);
        if !(norm <= F::one() + F::c(INSTABILITY_TOLERANCE)) || !stack.pump.is_finite() {
            return Err(Error::Instability {
                time: stack.time.to_f64_lossy(),
                reason: format!("norm of the unperturbed packet reached {norm}"),
            });
        }
        Ok(())
    }

    /// SE, ESA and GSB contributions of a finished stack.
    pub fn signals(&self, stack: &PerturbativeStack<F>) -> (F, F, F) {
        let se = stack.emission.norm_sqr(self.dv);
        let esa = -stack.absorption.as_ref().map_or(F::zero(), |f| f.norm_sqr(self.dv));
        let gsb = -F::two() * stack.probe.inner(&stack.bleach, self.dv).re;
        (se, esa, gsb)
    }

    /// Signal at every waiting time for one initial state, with the pump
    /// centered at zero and the probe at `T`.
    ///
    /// The pump-only orders are propagated once; each waiting time branches
    /// from a copy taken just before its probe switches on.
    pub fn pump_probe(
        &self,
        pump: &GaussianPulse<F>,
        probe: &GaussianPulse<F>,
        times: &[F],
        initial_quanta: &[usize],
    ) -> Result<PumpProbeTrace<F>> {
        let dt = self.options.dt;
        let window = F::c(PULSE_WINDOW_WIDTHS);
        let settle = window * probe.sigma;
        let max_t = self.options.horizon - settle;
        for &t in times {
            if !(t >= F::zero() && t <= max_t) {
                return Err(Error::Range {
                    time: t.to_f64_lossy(),
                    min: 0.0,
                    max: max_t.to_f64_lossy(),
                });
            }
        }
        let pump = pump.at(F::zero());
        let start = -window * pump.sigma;
        let step_of = |t: F| ((t - start) / dt).floor().to_f64_lossy().max(0.0) as usize;
        let branch: Vec<usize> = times.iter().map(|&t| step_of(t - settle)).collect();
        let finish: Vec<usize> = times
            .iter()
            .map(|&t| ((t + settle - start) / dt).ceil().to_f64_lossy() as usize)
            .collect();

        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by_key(|&k| branch[k]);
        let mut checkpoints: Vec<Option<PerturbativeStack<F>>> = vec![None; times.len()];
        let mut stack = self.new_stack(self.initial_state(initial_quanta)?, start);
        // The probe is off before any branch point, so a dummy probe far away suffices.
        let idle = probe.at(F::c(1e30));
        let mut step = 0usize;
        for &k in &order {
            while step < branch[k] {
                self.propagate_step(&mut stack, &pump, &idle)?;
                step += 1;
            }
            checkpoints[k] = Some(stack.clone());
        }

        let results: Vec<Result<(F, F, F)>> = checkpoints
            .into_par_iter()
            .enumerate()
            .map(|(k, cp)| {
                let mut s = cp.expect("every waiting time has a checkpoint");
                let probe_k = probe.at(times[k]);
                for _ in branch[k]..finish[k] {
                    self.propagate_step(&mut s, &pump, &probe_k)?;
                }
                Ok(self.signals(&s))
            })
            .collect();

        let mut trace = PumpProbeTrace::zeros(times);
        for (k, r) in results.into_iter().enumerate() {
            let (se, esa, gsb) = r?;
            trace.se[k] = se;
            trace.esa[k] = esa;
            trace.gsb[k] = gsb;
            trace.total[k] = se + esa + gsb;
        }
        Ok(trace)
    }
}

/// Grid-propagated `S_PP(T)` for one initial vibrational state.
pub fn pump_probe_signal<F: Real>(
    model: &VibronicModel<F>,
    pump: &GaussianPulse<F>,
    probe: &GaussianPulse<F>,
    times: &[F],
    initial_quanta: &[usize],
    options: &GridOptions<F>,
) -> Result<PumpProbeTrace<F>> {
    GridEngine::new(model, *options)?.pump_probe(pump, probe, times, initial_quanta)
}
