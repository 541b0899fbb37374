//! Spectra derived from trajectories, and wavelength–delay maps.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{omega_to_wavelength, EPS0, E_CHARGE, HBAR};
use crate::fourier;
use crate::integrator::{evolve, ElectronWindow, IntegratorError, TimeGrid, Trajectory};
use crate::model::DensityMatrix;
use crate::pulse::{pulse_spectrum, PulseError, PulseSpec};
use crate::spectrum::{check_grid, Spectrum, SpectrumError, SpectrumKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("TruncatedTrajectory: excited populations have not decayed below 1e-6 of their peak")]
    TruncatedTrajectory,
    #[error("EmptyTrajectory: need at least two samples")]
    EmptyTrajectory,
    #[error("NonMonotoneDelays: delay {index} is not above the previous one")]
    NonMonotoneDelays { index: usize },
    #[error("NegativeDelay: delay {index} is negative")]
    NegativeDelay { index: usize },
    #[error("InvalidCoefficient: {0} must be finite and >= 0")]
    InvalidCoefficient(&'static str),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

/// ⟨σ⁺σ⁻⟩ for one transition m → n (0-based, m < n).
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSeries {
    pub lower: usize,
    pub upper: usize,
    pub values: Vec<f64>,
}

/// tr{σ⁺_mn σ⁻_mn ρ(t)} = ρ_nn(t) for every pair m < n.
pub fn photon_number_expectation(traj: &Trajectory) -> Vec<TransitionSeries> {
    let n = traj.system().n_levels();
    let populations: Vec<Vec<f64>> = (0..n).map(|k| traj.population(k)).collect();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for (upper, values) in populations.iter().enumerate().skip(1) {
        for lower in 0..upper {
            out.push(TransitionSeries {
                lower,
                upper,
                values: values.clone(),
            });
        }
    }
    out
}

/// S(ω) = Σ_{n>1} Re ρ̃_nn(ω − ω_n1), transforms taken from the first sample.
pub fn spectral_density(traj: &Trajectory, omega_grid: &[f64]) -> Result<Spectrum, ObservableError> {
    check_grid(omega_grid)?;
    if traj.len() < 2 {
        return Err(ObservableError::EmptyTrajectory);
    }
    if !traj.has_decayed() {
        return Err(ObservableError::TruncatedTrajectory);
    }
    let sys = traj.system();
    let times = traj.times();
    let origin = times[0];
    let mut total = vec![0.0; omega_grid.len()];
    for level in 1..sys.n_levels() {
        let pop = traj.population(level);
        if pop.iter().all(|&p| p == 0.0) {
            continue;
        }
        let shift = sys.omega()[level] - sys.omega()[0];
        let nu: Vec<f64> = omega_grid.iter().map(|w| w - shift).collect();
        for (acc, z) in total.iter_mut().zip(fourier::trapezoid(times, &pop, &nu, origin)) {
            *acc += z.re;
        }
    }
    Ok(Spectrum::intensity(omega_grid.to_vec(), total)?)
}

/// n e²/(3 ε₀ ħ), the polarization prefactor.
pub fn polarization_prefactor(n_emitters: u32) -> f64 {
    n_emitters as f64 * E_CHARGE * E_CHARGE / (3.0 * EPS0 * HBAR)
}

/// tr{μ ρ(t)} at every sample, C·m.
pub fn dipole_series(traj: &Trajectory) -> Vec<f64> {
    let mu = traj.system().mu();
    traj.rhos().iter().map(|r| r.dipole_expectation(mu)).collect()
}

/// P(ω) = (n e²/3ε₀ħ) ∫ e^{−iωt} tr{μρ(t)} dt over the trajectory, lab-time origin.
pub fn polarization_spectrum(traj: &Trajectory, omega_grid: &[f64]) -> Result<Spectrum, ObservableError> {
    check_grid(omega_grid)?;
    let pref = polarization_prefactor(traj.system().n_emitters());
    let dipole = dipole_series(traj);
    let values = if traj.len() < 2 || dipole.iter().all(|&d| d == 0.0) {
        vec![Complex64::new(0.0, 0.0); omega_grid.len()]
    } else {
        fourier::trapezoid(traj.times(), &dipole, omega_grid, 0.0)
            .into_iter()
            .map(|z| z * pref)
            .collect()
    };
    Ok(Spectrum::new(
        omega_grid.to_vec(),
        values,
        SpectrumKind::ComplexAmplitude,
    )?)
}

/// I(ω) = |Ẽ_p(ω) + κ P(ω)|² + β S(ω).
pub fn detected_spectrum(
    pulse_amp: &Spectrum,
    pol: &Spectrum,
    s: &Spectrum,
    kappa: f64,
    beta: f64,
) -> Result<Spectrum, ObservableError> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(ObservableError::InvalidCoefficient("kappa"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(ObservableError::InvalidCoefficient("beta"));
    }
    pulse_amp.same_grid(pol)?;
    pulse_amp.same_grid(s)?;
    let values = pulse_amp
        .values()
        .iter()
        .zip(pol.values())
        .zip(s.values())
        .map(|((e, p), s)| (e + p * kappa).norm_sqr() + beta * s.re)
        .collect();
    Ok(Spectrum::intensity(pulse_amp.omega().to_vec(), values)?)
}

/// Detection scales that put the coherent cross term at half the pulse
/// spectral peak and the incoherent peak at a hundredth of it. Without a
/// pulse β is 1, so the detected spectrum is S itself.
pub fn calibrate_detection(pulse_amp: &Spectrum, pol: &Spectrum, s: &Spectrum) -> (f64, f64) {
    let pulse_peak = pulse_amp.values().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let cross = pulse_amp
        .values()
        .iter()
        .zip(pol.values())
        .map(|(e, p)| 2.0 * e.norm() * p.norm())
        .fold(0.0, f64::max);
    let s_peak = s.values().iter().map(|z| z.re).fold(0.0, f64::max);
    let kappa = if cross > 0.0 { 0.5 * pulse_peak / cross } else { 0.0 };
    let beta = if pulse_peak == 0.0 {
        1.0
    } else if s_peak > 0.0 {
        0.01 * pulse_peak / s_peak
    } else {
        0.0
    };
    (kappa, beta)
}

/// Detected intensity over (delay, wavelength).
#[derive(Debug, Clone, PartialEq)]
pub struct DelayMap {
    /// Delays τ = τ₀₂ − τ₀₁, s, strictly increasing.
    pub delays: Vec<f64>,
    /// Wavelength of each column, m, in the order of the frequency grid.
    pub wavelengths: Vec<f64>,
    /// The frequency grid behind `wavelengths`, rad/s.
    pub omega: Vec<f64>,
    /// One row per delay.
    pub intensity: Vec<Vec<f64>>,
    pub provenance: String,
}

impl DelayMap {
    pub fn row_spectrum(&self, row: usize) -> Result<Spectrum, SpectrumError> {
        Spectrum::intensity(self.omega.clone(), self.intensity[row].clone())
    }
}

/// Per-delay inputs shared by every row of a scan.
#[derive(Debug, Clone)]
pub struct ScanSetup<'a> {
    pub system: &'a crate::model::EmitterSystem,
    pub pulse: &'a PulseSpec,
    pub window_template: &'a ElectronWindow,
    pub grid_template: &'a TimeGrid,
    pub omega_grid: &'a [f64],
    pub kappa: f64,
    pub beta: f64,
}

/// Pieces of one delay point before they are combined into an intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayRow {
    pub delay: f64,
    /// Coherent polarization gated to the electron emission window.
    pub polarization: Spectrum,
    /// Incoherent spectral density over the same window.
    pub density: Spectrum,
}

fn check_delays(delays: &[f64]) -> Result<(), ObservableError> {
    for (i, &d) in delays.iter().enumerate() {
        if !d.is_finite() || d < 0.0 {
            return Err(ObservableError::NegativeDelay { index: i });
        }
        if i > 0 && d <= delays[i - 1] {
            return Err(ObservableError::NonMonotoneDelays { index: i });
        }
    }
    Ok(())
}

/// Window and grid for delay `tau`: the electron arrives τ after the pulse and
/// the run is extended by τ.
pub fn delay_inputs(
    pulse: &PulseSpec,
    window_template: &ElectronWindow,
    grid_template: &TimeGrid,
    tau: f64,
) -> (ElectronWindow, TimeGrid) {
    let window = match *window_template {
        ElectronWindow::Transit { width, .. } => ElectronWindow::Transit {
            tau02: pulse.arrival + tau,
            width,
        },
        ElectronWindow::Continuous { on_from, off_at } => {
            let shift = pulse.arrival + tau - on_from;
            ElectronWindow::Continuous { on_from, off_at }.shifted(shift)
        }
    };
    let grid = TimeGrid {
        t_end: grid_template.t_end + tau,
        ..*grid_template
    };
    (window, grid)
}

/// Simulates one delay and returns the gated P and S on the scan grid.
pub fn simulate_delay(setup: &ScanSetup<'_>, tau: f64) -> Result<DelayRow, ObservableError> {
    let (window, grid) = delay_inputs(setup.pulse, setup.window_template, setup.grid_template, tau);
    let rho0 = DensityMatrix::ground(setup.system.n_levels());
    let traj = evolve(setup.system, setup.pulse, &window, &grid, &rho0)?;
    let gated = traj.since(window.emission_start());
    Ok(DelayRow {
        delay: tau,
        polarization: polarization_spectrum(&gated, setup.omega_grid)?,
        density: spectral_density(&gated, setup.omega_grid)?,
    })
}

/// Runs one simulation per delay (in parallel) and assembles the detected map.
pub fn delay_scan(setup: &ScanSetup<'_>, delays: &[f64]) -> Result<DelayMap, ObservableError> {
    delay_scan_rows(setup, delays).map(|(map, _)| map)
}

/// [`delay_scan`] that also returns the per-delay P and S.
pub fn delay_scan_rows(setup: &ScanSetup<'_>, delays: &[f64]) -> Result<(DelayMap, Vec<DelayRow>), ObservableError> {
    check_delays(delays)?;
    check_grid(setup.omega_grid)?;
    let pulse_amp = if setup.pulse.enabled {
        pulse_spectrum(setup.pulse, setup.omega_grid)?
    } else {
        Spectrum::new(
            setup.omega_grid.to_vec(),
            vec![Complex64::new(0.0, 0.0); setup.omega_grid.len()],
            SpectrumKind::ComplexAmplitude,
        )?
    };
    let rows: Vec<DelayRow> = delays
        .par_iter()
        .map(|&tau| simulate_delay(setup, tau))
        .collect::<Result<_, _>>()?;
    let intensity = rows
        .iter()
        .map(|row| {
            detected_spectrum(&pulse_amp, &row.polarization, &row.density, setup.kappa, setup.beta).map(|s| s.real())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let map = DelayMap {
        delays: delays.to_vec(),
        wavelengths: setup.omega_grid.iter().map(|&w| omega_to_wavelength(w)).collect(),
        omega: setup.omega_grid.to_vec(),
        intensity,
        provenance: String::new(),
    };
    Ok((map, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{linspace, FS};
    use crate::integrator::{default_step, evolve_until_decayed, ElectronWindow, TimeGrid};
    use crate::model::test_support::{two_level, two_level_raw};
    use crate::model::{validate_system, CMatrix, DensityMatrix};
    use crate::preset::preset_pulse;

    const G: f64 = 5e8;
    const GAMMA: f64 = 4e13;

    fn ground_run(n_steps: usize) -> Trajectory {
        let sys = two_level(G, GAMMA);
        let pulse = PulseSpec::disabled();
        let h = default_step(&sys, &pulse);
        let grid = TimeGrid::new(0.0, n_steps as f64 * h, h, 5).unwrap();
        evolve(&sys, &pulse, &ElectronWindow::off(), &grid, &DensityMatrix::ground(2)).unwrap()
    }

    #[test]
    fn ground_state_has_no_signal() {
        let traj = ground_run(500);
        for series in photon_number_expectation(&traj) {
            assert!(series.values.iter().all(|&v| v == 0.0));
        }
        let grid = linspace(2.0e15, 2.3e15, 50);
        assert!(spectral_density(&traj, &grid).unwrap().real().iter().all(|&v| v == 0.0));
        assert!(polarization_spectrum(&traj, &grid)
            .unwrap()
            .magnitude()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn pure_decay_series() {
        let sys = two_level(0.0, GAMMA);
        let pulse = PulseSpec::disabled();
        let h = default_step(&sys, &pulse);
        let grid = TimeGrid::new(0.0, 100.0 * FS, h, 10).unwrap();
        let traj = evolve(
            &sys,
            &pulse,
            &ElectronWindow::off(),
            &grid,
            &DensityMatrix::pure_level(2, 1),
        )
        .unwrap();
        let series = photon_number_expectation(&traj);
        assert_eq!(series.len(), 1);
        for (t, v) in traj.times().iter().zip(&series[0].values) {
            assert!((v - (-GAMMA * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn truncated_trajectory_is_rejected() {
        let sys = two_level(0.0, GAMMA);
        let pulse = PulseSpec::disabled();
        let h = default_step(&sys, &pulse);
        let grid = TimeGrid::new(0.0, 50.0 * FS, h, 10).unwrap();
        let traj = evolve(
            &sys,
            &pulse,
            &ElectronWindow::off(),
            &grid,
            &DensityMatrix::pure_level(2, 1),
        )
        .unwrap();
        let err = spectral_density(&traj, &linspace(2.0e15, 2.3e15, 10));
        assert_eq!(err, Err(ObservableError::TruncatedTrajectory));
    }

    #[test]
    fn gated_steady_state_gives_lorentzian() {
        let sys = two_level(G, GAMMA);
        let pulse = PulseSpec::disabled();
        let off = 600.0 * FS;
        let window = ElectronWindow::Continuous {
            on_from: 0.0,
            off_at: Some(off),
        };
        let h = default_step(&sys, &pulse);
        let traj = evolve_until_decayed(&sys, &pulse, &window, 0.0, h, 10, &DensityMatrix::ground(2)).unwrap();
        let wl = sys.omega()[1];
        let grid = linspace(wl - 4.0 * GAMMA, wl + 4.0 * GAMMA, 161);
        let tail = traj.since(off);
        let s = spectral_density(&tail, &grid).unwrap();
        // Decay starts from whatever the first retained sample holds.
        let steady = tail.rhos()[0].population(1);
        assert!((steady / (G / (G + GAMMA)) - 1.0).abs() < 0.02);
        let peak = steady / GAMMA;
        for (&w, v) in grid.iter().zip(s.real()) {
            // Re{ρ_ss τ/(1 + iΔωτ)} with τ = 1/γ
            let want = (Complex64::new(steady / GAMMA, 0.0) / Complex64::new(1.0, (w - wl) / GAMMA)).re;
            assert!((v - want).abs() < 1e-3 * peak, "{v:e} vs {want:e}");
        }
    }

    /// First-order perturbation theory for a two-level emitter starting in the
    /// ground state, pulse with Gaussian envelope and carrier ω₀:
    /// P̃(ω) = pref·(iμ²/ħ)·Ẽ(ω)·[1/(Γ/2 + i(ω+ω_l)) − 1/(Γ/2 + i(ω−ω_l))]
    /// (the population stays ≈ 1 in the ground state and ρ₁₂ obeys a driven
    /// damped oscillator; Γ = g + γ with the pump on from the start).
    fn linear_response(mu: f64, pulse: &PulseSpec, wl: f64, rate: f64, w: f64) -> Complex64 {
        let s = pulse.duration;
        let w0 = pulse.carrier();
        let amp = pulse.peak_field * s * (2.0 * std::f64::consts::PI).sqrt() / 2.0;
        let lobes = (-(s * (w - w0)).powi(2) / 2.0).exp() + (-(s * (w + w0)).powi(2) / 2.0).exp();
        let e = Complex64::from_polar(amp * lobes, -w * pulse.arrival);
        let i = Complex64::new(0.0, 1.0);
        let bracket = 1.0 / Complex64::new(0.5 * rate, w + wl) - 1.0 / Complex64::new(0.5 * rate, w - wl);
        polarization_prefactor(1) * i * mu * mu / HBAR * e * bracket
    }

    #[test]
    fn weak_pulse_matches_linear_response() {
        let gamma = 1e13;
        let sys = validate_system(&two_level_raw(G, gamma, 878.0, 1.0)).unwrap();
        let pulse = preset_pulse();
        let window = ElectronWindow::Continuous {
            on_from: f64::NEG_INFINITY,
            off_at: None,
        };
        let h = 0.02 / crate::integrator::omega_max(&sys, &pulse);
        let rate = G + gamma;
        let grid = TimeGrid::new(0.0, pulse.arrival + 24.0 / rate, h, 5).unwrap();
        // Start in the pumped steady state so the populations are stationary.
        let steady = G / rate;
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0 - steady, 0.0);
        m[(1, 1)] = Complex64::new(steady, 0.0);
        let rho0 = DensityMatrix::new(m).unwrap();
        let traj = evolve(&sys, &pulse, &window, &grid, &rho0).unwrap();
        let wl = sys.omega()[1];
        let omega = linspace(wl - 10.0 * rate, wl + 10.0 * rate, 201);
        let p = polarization_spectrum(&traj, &omega).unwrap();
        let mu = sys.mu()[(0, 1)];
        // Population inversion factor (ρ₁₁ − ρ₂₂) scales the linear response.
        let inversion = 1.0 - 2.0 * steady;
        let peak = linear_response(mu, &pulse, wl, rate, wl).norm() * inversion;
        for (&w, z) in omega.iter().zip(p.values()) {
            let want = linear_response(mu, &pulse, wl, rate, w) * inversion;
            assert!((z - want).norm() < 5e-3 * peak, "w={w:e}: {z} vs {want}");
        }
        // Single peak at ω_l with half-width Γ/2.
        let mags = p.magnitude();
        let imax = mags
            .iter()
            .enumerate()
            .fold(0, |b, (i, &v)| if v > mags[b] { i } else { b });
        assert_eq!(imax, 100);
    }

    #[test]
    fn polarization_scales_with_emitters() {
        let sys = validate_system(&two_level_raw(G, 1e13, 878.0, 1.0)).unwrap();
        let sys2 = sys.with_n_emitters(2).unwrap();
        let pulse = preset_pulse();
        let h = default_step(&sys, &pulse);
        let grid = TimeGrid::new(0.0, 120.0 * FS, h, 5).unwrap();
        let rho0 = DensityMatrix::ground(2);
        let a = evolve(&sys, &pulse, &ElectronWindow::off(), &grid, &rho0).unwrap();
        let b = evolve(&sys2, &pulse, &ElectronWindow::off(), &grid, &rho0).unwrap();
        let omega = linspace(2.0e15, 2.3e15, 31);
        let pa = polarization_spectrum(&a, &omega).unwrap();
        let pb = polarization_spectrum(&b, &omega).unwrap();
        for (x, y) in pa.values().iter().zip(pb.values()) {
            assert_eq!(*y, x * 2.0);
        }
    }

    fn amp(omega: &[f64], f: impl Fn(f64) -> Complex64) -> Spectrum {
        Spectrum::new(
            omega.to_vec(),
            omega.iter().map(|&w| f(w)).collect(),
            SpectrumKind::ComplexAmplitude,
        )
        .unwrap()
    }

    #[test]
    fn detection_identities() {
        let omega = linspace(2.0e15, 2.6e15, 301);
        let e = amp(&omega, |w| Complex64::new((-((w - 2.3e15) / 1e14).powi(2)).exp(), 0.0));
        let zero = amp(&omega, |_| Complex64::new(0.0, 0.0));
        let s = Spectrum::intensity(omega.clone(), omega.iter().map(|w| 1.0 + w * 1e-16).collect()).unwrap();
        let beta = 0.3;

        let plain = detected_spectrum(&e, &zero, &s, 1.7, beta).unwrap();
        let same = detected_spectrum(&e, &e, &s, 1.0, beta).unwrap();
        for i in 0..omega.len() {
            let base = e.values()[i].norm_sqr();
            let sv = s.values()[i].re;
            assert!((plain.real()[i] - (base + beta * sv)).abs() < 1e-14);
            assert!((same.real()[i] - (4.0 * base + beta * sv)).abs() < 1e-14);
        }

        let kappa0 = detected_spectrum(&e, &e, &s, 0.0, beta).unwrap();
        assert_eq!(kappa0, plain);

        let doubled = detected_spectrum(&e, &e, &s, 1.0, 2.0 * beta).unwrap();
        for i in 0..omega.len() {
            let coherent = 4.0 * e.values()[i].norm_sqr();
            let a = same.real()[i] - coherent;
            let b = doubled.real()[i] - coherent;
            assert!((b - 2.0 * a).abs() < 1e-12 * b.abs());
        }

        let other = Spectrum::intensity(linspace(1.0, 2.0, 301), vec![0.0; 301]).unwrap();
        assert!(matches!(
            detected_spectrum(&e, &zero, &other, 1.0, 1.0),
            Err(ObservableError::Spectrum(SpectrumError::GridMismatch(_)))
        ));
    }

    #[test]
    fn two_beam_fringe_spacing() {
        let tau = 200.0 * FS;
        let omega = linspace(2.2e15, 2.5e15, 3001);
        let e = amp(&omega, |_| Complex64::new(1.0, 0.0));
        let p = amp(&omega, |w| Complex64::from_polar(1.0, w * tau));
        let zero = Spectrum::intensity(omega.clone(), vec![0.0; omega.len()]).unwrap();
        let i = detected_spectrum(&e, &p, &zero, 1.0, 0.0).unwrap().real();
        let maxima: Vec<f64> = (1..omega.len() - 1)
            .filter(|&k| i[k] > i[k - 1] && i[k] >= i[k + 1])
            .map(|k| omega[k])
            .collect();
        assert!(maxima.len() > 5);
        let spacing = 2.0 * std::f64::consts::PI / tau;
        let dw = omega[1] - omega[0];
        for pair in maxima.windows(2) {
            assert!(((pair[1] - pair[0]) - spacing).abs() <= 2.0 * dw);
        }
    }

    #[test]
    fn delay_validation() {
        assert_eq!(
            check_delays(&[0.0, 12.0 * FS, 12.0 * FS]),
            Err(ObservableError::NonMonotoneDelays { index: 2 })
        );
        assert_eq!(check_delays(&[-1.0]), Err(ObservableError::NegativeDelay { index: 0 }));
        assert!(check_delays(&[0.0, 1e-15]).is_ok());
    }

    #[test]
    fn delay_inputs_shift_window_and_grid() {
        let pulse = preset_pulse();
        let grid = TimeGrid::new(0.0, 500.0 * FS, 0.01 * FS, 10).unwrap();
        let (w, g) = delay_inputs(&pulse, &ElectronWindow::transit(0.0), &grid, 30.0 * FS);
        assert_eq!(w, ElectronWindow::transit(80.0 * FS));
        assert!((g.t_end - 530.0 * FS).abs() < 1e-25);
    }
}
