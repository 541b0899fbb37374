//! Fixed-step RK4 evolution of the density matrix.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::FS;
use crate::model::{hermitize, CMatrix, DensityMatrix, EmitterSystem};
use crate::pulse::{field_at, PulseSpec};

/// Default step, in units of 1/ω_max.
pub const DEFAULT_STEP_FACTOR: f64 = 0.05;
/// Largest allowed step·ω_max.
pub const MAX_STEP_FACTOR: f64 = 0.1;
/// Default electron transit σ.
pub const DEFAULT_TRANSIT_WIDTH: f64 = 1.0 * FS;
/// Lead time before the first excitation in automatically sized runs.
pub const AUTO_LEAD: f64 = 50.0 * FS;
/// Longest automatically sized run.
pub const AUTO_MAX_SPAN: f64 = 3000.0 * FS;
/// Excited populations must fall below this fraction of their maximum.
pub const DECAY_FRACTION: f64 = 1e-6;

// Drift and negativity beyond these abort the run.
const TRACE_ABORT: f64 = 1e-6;
const POPULATION_ABORT: f64 = -1e-6;
// Transit windows are treated as closed beyond this many σ.
const TRANSIT_SIGMAS: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("StepTooLarge: step*omega_max = {product:.4} exceeds {MAX_STEP_FACTOR}")]
    StepTooLarge { product: f64 },
    #[error("InvalidGrid: {0}")]
    InvalidGrid(&'static str),
    #[error("InvalidWindow: {0}")]
    InvalidWindow(&'static str),
    #[error("DimensionMismatch: system has {expected} levels, initial state {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("InvariantViolation: {detail} at t = {time:e} s")]
    InvariantViolation { time: f64, detail: String },
}

/// Integration span and sampling, all times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
    /// Record every this many steps (≥ 1).
    pub record_every: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, step: f64, record_every: usize) -> Result<Self, IntegratorError> {
        let grid = Self {
            t_start,
            t_end,
            step,
            record_every,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.step.is_finite()) {
            return Err(IntegratorError::InvalidGrid("times must be finite"));
        }
        if self.t_end <= self.t_start {
            return Err(IntegratorError::InvalidGrid("t_end must exceed t_start"));
        }
        if self.step <= 0.0 {
            return Err(IntegratorError::InvalidGrid("step must be positive"));
        }
        if (self.t_end - self.t_start) / self.step < 10.0 {
            return Err(IntegratorError::InvalidGrid("span must cover at least 10 steps"));
        }
        if self.record_every == 0 {
            return Err(IntegratorError::InvalidGrid("record_every must be >= 1"));
        }
        Ok(())
    }

    /// Number of steps: enough to reach `t_end`, rounded up to a whole number
    /// of recording intervals so the samples stay uniformly spaced.
    pub fn n_steps(&self) -> usize {
        let raw = ((self.t_end - self.t_start) / self.step - 1e-9).ceil() as usize;
        raw.div_ceil(self.record_every) * self.record_every
    }
}

/// Largest angular frequency the integrator must resolve.
pub fn omega_max(sys: &EmitterSystem, pulse: &PulseSpec) -> f64 {
    let carrier = if pulse.enabled { pulse.carrier() } else { 0.0 };
    sys.omega_max() + carrier
}

/// The default step, 0.05/ω_max.
pub fn default_step(sys: &EmitterSystem, pulse: &PulseSpec) -> f64 {
    DEFAULT_STEP_FACTOR / omega_max(sys, pulse)
}

/// Time dependence of the electron excitation rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElectronWindow {
    /// Rates switched fully on for `on_from ≤ t < off_at`.
    Continuous { on_from: f64, off_at: Option<f64> },
    /// Gaussian transit factor exp(−(t−τ₀₂)²/(2·width²)).
    Transit { tau02: f64, width: f64 },
}

impl ElectronWindow {
    /// No electron excitation at any time.
    pub fn off() -> Self {
        ElectronWindow::Continuous {
            on_from: f64::INFINITY,
            off_at: None,
        }
    }

    pub fn transit(tau02: f64) -> Self {
        ElectronWindow::Transit {
            tau02,
            width: DEFAULT_TRANSIT_WIDTH,
        }
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        match *self {
            ElectronWindow::Continuous { on_from, off_at } => {
                if on_from.is_nan() {
                    return Err(IntegratorError::InvalidWindow("on_from is NaN"));
                }
                if let Some(off) = off_at {
                    if !off.is_finite() || off < on_from {
                        return Err(IntegratorError::InvalidWindow("off_at must be finite and >= on_from"));
                    }
                }
            }
            ElectronWindow::Transit { tau02, width } => {
                if !tau02.is_finite() {
                    return Err(IntegratorError::InvalidWindow("tau02 must be finite"));
                }
                if !(width.is_finite() && width > 0.0) {
                    return Err(IntegratorError::InvalidWindow("transit width must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Factor multiplying every g_mn at time `t`.
    pub fn g_scale(&self, t: f64) -> f64 {
        match *self {
            ElectronWindow::Continuous { on_from, off_at } => {
                let on = t >= on_from && off_at.is_none_or(|off| t < off);
                if on {
                    1.0
                } else {
                    0.0
                }
            }
            ElectronWindow::Transit { tau02, width } => {
                let s = (t - tau02) / width;
                (-0.5 * s * s).exp()
            }
        }
    }

    /// Time the electron starts acting; infinite if it never does.
    pub fn start(&self) -> f64 {
        match *self {
            ElectronWindow::Continuous { on_from, .. } => on_from,
            ElectronWindow::Transit { tau02, width } => tau02 - TRANSIT_SIGMAS * width,
        }
    }

    /// Time after which the electron no longer acts; infinite for an open window.
    pub fn end(&self) -> f64 {
        match *self {
            ElectronWindow::Continuous { on_from, off_at } => {
                if on_from.is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    off_at.unwrap_or(f64::INFINITY)
                }
            }
            ElectronWindow::Transit { tau02, width } => tau02 + TRANSIT_SIGMAS * width,
        }
    }

    /// Where emission attributed to this window begins: switch-off for a
    /// gated continuous pump, three σ before arrival for a transit.
    pub fn emission_start(&self) -> f64 {
        match *self {
            ElectronWindow::Continuous { on_from, off_at } => off_at.unwrap_or(on_from),
            ElectronWindow::Transit { tau02, width } => tau02 - 3.0 * width,
        }
    }

    /// Copy shifted in time by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        match *self {
            ElectronWindow::Continuous { on_from, off_at } => ElectronWindow::Continuous {
                on_from: on_from + dt,
                off_at: off_at.map(|t| t + dt),
            },
            ElectronWindow::Transit { tau02, width } => ElectronWindow::Transit {
                tau02: tau02 + dt,
                width,
            },
        }
    }
}

/// Worst invariant values over every stored sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_population: f64,
    pub max_coherence: f64,
}

/// Recorded evolution. Immutable once returned.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    rhos: Vec<DensityMatrix>,
    system: EmitterSystem,
    pulse: PulseSpec,
    window: ElectronWindow,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rhos(&self) -> &[DensityMatrix] {
        &self.rhos
    }

    pub fn system(&self) -> &EmitterSystem {
        &self.system
    }

    pub fn pulse(&self) -> &PulseSpec {
        &self.pulse
    }

    pub fn window(&self) -> &ElectronWindow {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        &self.rhos[self.rhos.len() - 1]
    }

    /// Population of level `k` at every sample.
    pub fn population(&self, k: usize) -> Vec<f64> {
        self.rhos.iter().map(|r| r.population(k)).collect()
    }

    /// Element (a, b) at every sample.
    pub fn element(&self, a: usize, b: usize) -> Vec<Complex64> {
        self.rhos.iter().map(|r| r.matrix()[(a, b)]).collect()
    }

    /// Samples with time ≥ `t` (all of them if `t` precedes the run).
    pub fn since(&self, t: f64) -> Trajectory {
        let tol = 1e-9 * self.sample_spacing();
        let first = self.times.partition_point(|&x| x < t - tol);
        self.slice_from(first)
    }

    /// Samples with time ≤ `t`.
    pub fn until(&self, t: f64) -> Trajectory {
        let tol = 1e-9 * self.sample_spacing();
        let end = self.times.partition_point(|&x| x <= t + tol);
        Trajectory {
            times: self.times[..end].to_vec(),
            rhos: self.rhos[..end].to_vec(),
            system: self.system.clone(),
            pulse: self.pulse,
            window: self.window,
        }
    }

    fn slice_from(&self, first: usize) -> Trajectory {
        Trajectory {
            times: self.times[first..].to_vec(),
            rhos: self.rhos[first..].to_vec(),
            system: self.system.clone(),
            pulse: self.pulse,
            window: self.window,
        }
    }

    fn sample_spacing(&self) -> f64 {
        if self.times.len() < 2 {
            return 0.0;
        }
        self.times[1] - self.times[0]
    }

    /// True when every excited population ends below 10⁻⁶ of its maximum.
    pub fn has_decayed(&self) -> bool {
        (1..self.system.n_levels()).all(|k| {
            let series = self.population(k);
            let peak = series.iter().cloned().fold(0.0, f64::max);
            let last = *series.last().unwrap_or(&0.0);
            peak <= 0.0 || last.abs() <= DECAY_FRACTION * peak
        })
    }

    pub fn invariant_report(&self) -> InvariantReport {
        let mut report = InvariantReport {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_population: f64::INFINITY,
            max_coherence: 0.0,
        };
        for rho in &self.rhos {
            report.max_trace_error = report.max_trace_error.max(rho.trace_error());
            report.max_hermiticity_error = report.max_hermiticity_error.max(rho.hermiticity_error());
            report.min_population = report.min_population.min(rho.min_population());
            report.max_coherence = report.max_coherence.max(rho.max_coherence());
        }
        report
    }
}

/// RK4 stepper with preallocated stage buffers.
struct Stepper<'a> {
    sys: &'a EmitterSystem,
    pulse: &'a PulseSpec,
    window: &'a ElectronWindow,
    rho: CMatrix,
    k1: CMatrix,
    k2: CMatrix,
    k3: CMatrix,
    k4: CMatrix,
    stage: CMatrix,
}

impl<'a> Stepper<'a> {
    fn new(sys: &'a EmitterSystem, pulse: &'a PulseSpec, window: &'a ElectronWindow, rho0: &DensityMatrix) -> Self {
        let n = sys.n_levels();
        let zeros = CMatrix::zeros(n, n);
        Self {
            sys,
            pulse,
            window,
            rho: rho0.matrix().clone(),
            k1: zeros.clone(),
            k2: zeros.clone(),
            k3: zeros.clone(),
            k4: zeros.clone(),
            stage: zeros,
        }
    }

    fn step(&mut self, t: f64, h: f64) {
        let mid = t + 0.5 * h;
        let end = t + h;
        let (e0, em, e1) = (
            field_at(self.pulse, t),
            field_at(self.pulse, mid),
            field_at(self.pulse, end),
        );
        let (g0, gm, g1) = (
            self.window.g_scale(t),
            self.window.g_scale(mid),
            self.window.g_scale(end),
        );

        self.sys.rhs_into(&self.rho, e0, g0, &mut self.k1);
        axpy_into(&mut self.stage, &self.rho, 0.5 * h, &self.k1);
        self.sys.rhs_into(&self.stage, em, gm, &mut self.k2);
        axpy_into(&mut self.stage, &self.rho, 0.5 * h, &self.k2);
        self.sys.rhs_into(&self.stage, em, gm, &mut self.k3);
        axpy_into(&mut self.stage, &self.rho, h, &self.k3);
        self.sys.rhs_into(&self.stage, e1, g1, &mut self.k4);

        let w = h / 6.0;
        for (((r, a), (b, c)), d) in self
            .rho
            .iter_mut()
            .zip(self.k1.iter())
            .zip(self.k2.iter().zip(self.k3.iter()))
            .zip(self.k4.iter())
        {
            *r += (a + (b + c) * 2.0 + d) * w;
        }
        hermitize(&mut self.rho);
    }

    fn check(&self, t: f64) -> Result<(), IntegratorError> {
        let n = self.rho.nrows();
        let mut trace = Complex64::new(0.0, 0.0);
        let mut min_pop = f64::INFINITY;
        for k in 0..n {
            let z = self.rho[(k, k)];
            trace += z;
            min_pop = min_pop.min(z.re);
        }
        if !trace.re.is_finite() || !trace.im.is_finite() {
            return Err(IntegratorError::InvariantViolation {
                time: t,
                detail: "non-finite state".into(),
            });
        }
        let drift = (trace - 1.0).norm();
        if drift > TRACE_ABORT {
            return Err(IntegratorError::InvariantViolation {
                time: t,
                detail: format!("trace drift {drift:e}"),
            });
        }
        if min_pop < POPULATION_ABORT {
            return Err(IntegratorError::InvariantViolation {
                time: t,
                detail: format!("population {min_pop:e}"),
            });
        }
        Ok(())
    }

    fn snapshot(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.rho.clone())
    }
}

/// out = x + a·y
fn axpy_into(out: &mut CMatrix, x: &CMatrix, a: f64, y: &CMatrix) {
    for ((o, xv), yv) in out.iter_mut().zip(x.iter()).zip(y.iter()) {
        *o = xv + yv * a;
    }
}

fn check_inputs(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    step: f64,
    rho0: &DensityMatrix,
) -> Result<(), IntegratorError> {
    if rho0.dim() != sys.n_levels() {
        return Err(IntegratorError::DimensionMismatch {
            expected: sys.n_levels(),
            found: rho0.dim(),
        });
    }
    window.validate()?;
    if pulse.enabled && pulse.validate().is_err() {
        return Err(IntegratorError::InvalidGrid("pulse parameters are invalid"));
    }
    let product = step * omega_max(sys, pulse);
    if product > MAX_STEP_FACTOR * (1.0 + 1e-12) {
        return Err(IntegratorError::StepTooLarge { product });
    }
    Ok(())
}

/// Integrates from `grid.t_start` over the grid's step count, recording the
/// initial state and every `record_every`-th step.
pub fn evolve(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    grid: &TimeGrid,
    rho0: &DensityMatrix,
) -> Result<Trajectory, IntegratorError> {
    grid.validate()?;
    evolve_steps(
        sys,
        pulse,
        window,
        grid.t_start,
        grid.step,
        grid.n_steps(),
        grid.record_every,
        rho0,
    )
}

#[allow(clippy::too_many_arguments)]
fn evolve_steps(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    t_start: f64,
    h: f64,
    n_steps: usize,
    record_every: usize,
    rho0: &DensityMatrix,
) -> Result<Trajectory, IntegratorError> {
    check_inputs(sys, pulse, window, h, rho0)?;
    let mut stepper = Stepper::new(sys, pulse, window, rho0);
    let capacity = n_steps / record_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut rhos = Vec::with_capacity(capacity);
    times.push(t_start);
    rhos.push(stepper.snapshot());
    for k in 0..n_steps {
        let t = t_start + k as f64 * h;
        stepper.step(t, h);
        let t_next = t_start + (k + 1) as f64 * h;
        stepper.check(t_next)?;
        if (k + 1) % record_every == 0 {
            times.push(t_next);
            rhos.push(stepper.snapshot());
        }
    }
    Ok(Trajectory {
        times,
        rhos,
        system: sys.clone(),
        pulse: *pulse,
        window: *window,
    })
}

/// Start of an automatically sized run: 50 fs before the first excitation.
pub fn auto_start(pulse: &PulseSpec, window: &ElectronWindow) -> f64 {
    let pulse_start = if pulse.enabled { pulse.arrival } else { f64::INFINITY };
    let electron = match *window {
        ElectronWindow::Transit { tau02, .. } => tau02,
        ElectronWindow::Continuous { on_from, .. } => on_from,
    };
    let first = pulse_start.min(electron);
    if first.is_finite() {
        first - AUTO_LEAD
    } else {
        -AUTO_LEAD
    }
}

/// Integrates from `t_start` until all driving has ended and every excited
/// population has fallen below 10⁻⁶ of its maximum, or for 3 ps. Maxima are
/// taken from the window's emission start on, the part spectra are gated to.
pub fn evolve_until_decayed(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    t_start: f64,
    step: f64,
    record_every: usize,
    rho0: &DensityMatrix,
) -> Result<Trajectory, IntegratorError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(IntegratorError::InvalidGrid("step must be positive"));
    }
    if record_every == 0 {
        return Err(IntegratorError::InvalidGrid("record_every must be >= 1"));
    }
    check_inputs(sys, pulse, window, step, rho0)?;
    let n = sys.n_levels();
    let drive_end = window.end().max(if pulse.enabled {
        pulse.end_time()
    } else {
        f64::NEG_INFINITY
    });
    let max_steps = ((AUTO_MAX_SPAN / step).ceil() as usize).div_ceil(record_every) * record_every;

    let mut stepper = Stepper::new(sys, pulse, window, rho0);
    let gate = window.emission_start();
    let gate = if gate.is_finite() { gate } else { t_start };
    let mut peaks: Vec<f64> = (0..n)
        .map(|k| if t_start >= gate { rho0.population(k) } else { 0.0 })
        .collect();
    let mut times = vec![t_start];
    let mut rhos = vec![stepper.snapshot()];
    for k in 0..max_steps {
        let t = t_start + k as f64 * step;
        stepper.step(t, step);
        let t_next = t_start + (k + 1) as f64 * step;
        stepper.check(t_next)?;
        if t_next >= gate {
            for (lvl, peak) in peaks.iter_mut().enumerate().skip(1) {
                *peak = peak.max(stepper.rho[(lvl, lvl)].re);
            }
        }
        if (k + 1) % record_every != 0 {
            continue;
        }
        times.push(t_next);
        rhos.push(stepper.snapshot());
        // Half the threshold, so slices starting a few samples after the
        // true maximum still pass the decay check.
        let decayed = t_next > drive_end
            && peaks
                .iter()
                .enumerate()
                .skip(1)
                .all(|(lvl, &peak)| stepper.rho[(lvl, lvl)].re.abs() <= 0.5 * DECAY_FRACTION * peak);
        if decayed && k + 1 >= 10 {
            break;
        }
    }
    Ok(Trajectory {
        times,
        rhos,
        system: sys.clone(),
        pulse: *pulse,
        window: *window,
    })
}

/// Max over recorded times of ‖ρ_h − ρ_{h/2}‖_∞ (largest element modulus).
pub fn convergence_check(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    grid: &TimeGrid,
    rho0: &DensityMatrix,
) -> Result<f64, IntegratorError> {
    grid.validate()?;
    let n = grid.n_steps();
    let coarse = evolve_steps(sys, pulse, window, grid.t_start, grid.step, n, grid.record_every, rho0)?;
    let fine = evolve_steps(
        sys,
        pulse,
        window,
        grid.t_start,
        0.5 * grid.step,
        2 * n,
        2 * grid.record_every,
        rho0,
    )?;
    debug_assert_eq!(coarse.times, fine.times);
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.rhos.iter().zip(&fine.rhos) {
        for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}
