//! The subcommands. Each returns the text it prints; files go to `out_dir`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lindblad_cl::constants::{EV, FS, NM, UM};
use lindblad_cl::validation::{oracle_suite, peak_wavelengths_nm};
use lindblad_cl::{
    auto_start, calibrate_detection, default_step, delay_from_distance, delay_scan_rows, detected_spectrum,
    distance_from_delay, electron_velocity, evolve, evolve_until_decayed, fit_exponential, fit_lorentzian,
    polarization_spectrum, pulse_spectrum, simulate_delay, spectral_density, visibility_vs_delay, DensityMatrix,
    ElectronWindow, EmitterSystem, PulseSpec, ScanSetup, Spectrum, SpectrumKind, TimeGrid, Trajectory,
    WavelengthWindow,
};
use num_complex::Complex64;

use crate::output::{self, num, Header};
use crate::{CliError, RunConfig};

pub const DENSITY_FILE: &str = "density.csv";
pub const POLARIZATION_FILE: &str = "polarization.csv";
pub const DETECTED_FILE: &str = "detected.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const DELAY_MAP_FILE: &str = "delay_map.csv";
pub const VISIBILITY_FILE: &str = "visibility.csv";

fn step_for(cfg: &RunConfig, sys: &EmitterSystem, pulse: &PulseSpec) -> f64 {
    cfg.grid.step_fs.map_or_else(|| default_step(sys, pulse), |h| h * FS)
}

fn pulse_amplitude(pulse: &PulseSpec, omega: &[f64]) -> Result<Spectrum, CliError> {
    if pulse.enabled {
        pulse_spectrum(pulse, omega).map_err(CliError::physics)
    } else {
        Spectrum::new(
            omega.to_vec(),
            vec![Complex64::new(0.0, 0.0); omega.len()],
            SpectrumKind::ComplexAmplitude,
        )
        .map_err(CliError::physics)
    }
}

/// Start of the emission attributed to the electron, or the run start when
/// the electron never acts.
fn gate_time(window: &ElectronWindow, traj: &Trajectory) -> f64 {
    if window.start().is_finite() {
        window.emission_start()
    } else {
        traj.times()[0]
    }
}

pub struct SimulateOutput {
    pub report: String,
    pub files: Vec<PathBuf>,
}

/// One run: S(ω), P(ω) and I(ω) over the emission window.
pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<SimulateOutput, CliError> {
    let sys = cfg.emitter_system()?;
    let pulse = cfg.pulse_spec();
    let window = cfg.electron_window();
    let h = step_for(cfg, &sys, &pulse);
    let t0 = cfg
        .grid
        .t_start_fs
        .map_or_else(|| auto_start(&pulse, &window), |t| t * FS);
    let rho0 = DensityMatrix::ground(sys.n_levels());
    let traj = match cfg.grid.t_end_fs {
        Some(t_end) => {
            let grid = TimeGrid::new(t0, t_end * FS, h, cfg.grid.record_every).map_err(CliError::physics)?;
            evolve(&sys, &pulse, &window, &grid, &rho0)
        }
        None => evolve_until_decayed(&sys, &pulse, &window, t0, h, cfg.grid.record_every, &rho0),
    }
    .map_err(CliError::physics)?;

    let omega = cfg.omega_grid();
    let gated = traj.since(gate_time(&window, &traj));
    let s = spectral_density(&gated, &omega).map_err(CliError::physics)?;
    let p = polarization_spectrum(&gated, &omega).map_err(CliError::physics)?;
    let ep = pulse_amplitude(&pulse, &omega)?;
    let (kappa_auto, beta_auto) = calibrate_detection(&ep, &p, &s);
    let kappa = cfg.detection.kappa.unwrap_or(kappa_auto);
    let beta = cfg.detection.beta.unwrap_or(beta_auto);
    let detected = detected_spectrum(&ep, &p, &s, kappa, beta).map_err(CliError::physics)?;

    let digest = cfg.digest();
    let freq_units = "omega rad/s, lambda nm (2*pi*c/omega, per grid point)";
    let files = vec![
        (
            DENSITY_FILE,
            Header::new(
                &digest,
                "intensity",
                &format!("{freq_units}, value s (spectral density)"),
            ),
            &s,
        ),
        (
            POLARIZATION_FILE,
            Header::new(
                &digest,
                "complex_amplitude",
                &format!("{freq_units}, value C/m^2 s (polarization)"),
            ),
            &p,
        ),
        (
            DETECTED_FILE,
            Header::new(
                &digest,
                "intensity",
                &format!("{freq_units}, value (V/m s)^2 (detected)"),
            ),
            &detected,
        ),
    ];
    let mut written = Vec::new();
    for (name, header, spec) in files {
        let path = out_dir.join(name);
        output::write_spectrum(&path, &header, spec)?;
        written.push(path);
    }

    let report = traj.invariant_report();
    let peaks: Vec<String> = peak_wavelengths_nm(&s).iter().map(|l| format!("{l:.2}")).collect();
    let last = traj.last();
    let populations: Vec<String> = (0..sys.n_levels()).map(|k| num(last.population(k))).collect();
    let mut summary = String::new();
    let _ = writeln!(summary, "# version: {}", output::VERSION);
    let _ = writeln!(summary, "# config_digest: {digest}");
    let _ = writeln!(summary, "# kind: summary");
    let _ = writeln!(summary, "# units: times fs, step fs, wavelengths nm");
    let _ = writeln!(summary, "t_start_fs: {}", num(traj.times()[0] / FS));
    let _ = writeln!(summary, "t_end_fs: {}", num(traj.times()[traj.len() - 1] / FS));
    let _ = writeln!(summary, "step_fs: {}", num(h / FS));
    let _ = writeln!(summary, "samples: {}", traj.len());
    let _ = writeln!(summary, "emission_start_fs: {}", num(gated.times()[0] / FS));
    let _ = writeln!(summary, "final_populations: {}", populations.join(","));
    let _ = writeln!(summary, "max_trace_error: {}", num(report.max_trace_error));
    let _ = writeln!(summary, "max_hermiticity_error: {}", num(report.max_hermiticity_error));
    let _ = writeln!(summary, "min_population: {}", num(report.min_population));
    let _ = writeln!(summary, "max_coherence: {}", num(report.max_coherence));
    let _ = writeln!(summary, "kappa: {}", num(kappa));
    let _ = writeln!(summary, "beta: {}", num(beta));
    let _ = writeln!(summary, "density_peaks_nm: {}", peaks.join(","));
    let path = out_dir.join(SUMMARY_FILE);
    output::write_file(&path, &summary)?;
    written.push(path);

    let mut text = String::new();
    let _ = writeln!(
        text,
        "simulated {:.1} fs in {} samples (step {:.4} fs), {} levels",
        (traj.times()[traj.len() - 1] - traj.times()[0]) / FS,
        traj.len(),
        h / FS,
        sys.n_levels()
    );
    let _ = writeln!(text, "spectral density maxima (nm): {}", peaks.join(", "));
    let _ = writeln!(text, "kappa {kappa:e}, beta {beta:e}");
    for p in &written {
        let _ = writeln!(text, "wrote {}", p.display());
    }
    Ok(SimulateOutput {
        report: text,
        files: written,
    })
}

/// End of the per-delay grid template for the first delay: the population
/// decay span is doubled so coherences, which decay at half the rate, also
/// reach the 10⁻⁶ level.
fn auto_scan_end(
    sys: &EmitterSystem,
    pulse: &PulseSpec,
    window: &ElectronWindow,
    t0: f64,
    h: f64,
    record_every: usize,
) -> Result<f64, CliError> {
    let rho0 = DensityMatrix::ground(sys.n_levels());
    let traj = evolve_until_decayed(sys, pulse, window, t0, h, record_every, &rho0).map_err(CliError::physics)?;
    let end = traj.times()[traj.len() - 1];
    let drive_end = window.end().max(if pulse.enabled { pulse.end_time() } else { t0 });
    Ok(end + (end - drive_end).max(0.0))
}

/// Delay scan: writes the DelayMap and, optionally, per-delay P and S.
pub fn scan(cfg: &RunConfig, out_dir: &Path, per_delay: bool) -> Result<String, CliError> {
    let sys = cfg.emitter_system()?;
    let pulse = cfg.pulse_spec();
    let window = cfg.electron_window();
    let delays = cfg.delays();
    let h = step_for(cfg, &sys, &pulse);
    let first = lindblad_cl::observables::delay_inputs(
        &pulse,
        &window,
        &TimeGrid {
            t_start: 0.0,
            t_end: 0.0,
            step: h,
            record_every: cfg.grid.record_every,
        },
        delays[0],
    )
    .0;
    let t0 = cfg
        .grid
        .t_start_fs
        .map_or_else(|| auto_start(&pulse, &first), |t| t * FS);
    let t_end = match cfg.grid.t_end_fs {
        Some(t) => t * FS,
        None => auto_scan_end(&sys, &pulse, &first, t0, h, cfg.grid.record_every)? - delays[0],
    };
    let grid = TimeGrid::new(t0, t_end, h, cfg.grid.record_every).map_err(CliError::physics)?;
    let omega = cfg.omega_grid();

    let (kappa, beta) = match (cfg.detection.kappa, cfg.detection.beta) {
        (Some(k), Some(b)) => (k, b),
        (k, b) => {
            let probe = ScanSetup {
                system: &sys,
                pulse: &pulse,
                window_template: &window,
                grid_template: &grid,
                omega_grid: &omega,
                kappa: 0.0,
                beta: 0.0,
            };
            let row = simulate_delay(&probe, delays[0]).map_err(CliError::physics)?;
            let ep = pulse_amplitude(&pulse, &omega)?;
            let (ka, ba) = calibrate_detection(&ep, &row.polarization, &row.density);
            (k.unwrap_or(ka), b.unwrap_or(ba))
        }
    };
    let setup = ScanSetup {
        system: &sys,
        pulse: &pulse,
        window_template: &window,
        grid_template: &grid,
        omega_grid: &omega,
        kappa,
        beta,
    };
    let (mut map, rows) = delay_scan_rows(&setup, &delays).map_err(CliError::physics)?;
    let digest = cfg.digest();
    map.provenance = digest.clone();

    let mut text = String::new();
    let header = Header::new(
        &digest,
        "delay_map",
        "delays fs, wavelength row nm (2*pi*c/omega, ascending omega), intensity (V/m s)^2 per grid point",
    );
    let path = out_dir.join(DELAY_MAP_FILE);
    output::write_delay_map(&path, &header, &map)?;
    let _ = writeln!(
        text,
        "scanned {} delays ({:.1} to {:.1} fs), kappa {kappa:e}, beta {beta:e}",
        delays.len(),
        delays[0] / FS,
        delays[delays.len() - 1] / FS
    );
    let _ = writeln!(text, "wrote {}", path.display());
    if per_delay {
        for (k, row) in rows.iter().enumerate() {
            for (suffix, kind, spec) in [
                ("polarization", "complex_amplitude", &row.polarization),
                ("density", "intensity", &row.density),
            ] {
                let units = format!("omega rad/s, lambda nm, {suffix}; delay {} fs", num(row.delay / FS));
                let path = out_dir.join(format!("delay_{k:03}_{suffix}.csv"));
                output::write_spectrum(&path, &Header::new(&digest, kind, &units), spec)?;
            }
        }
        let _ = writeln!(text, "wrote {} per-delay spectra", 2 * rows.len());
    }
    Ok(text)
}

fn window_nm(lo: f64, hi: f64) -> Result<WavelengthWindow, CliError> {
    WavelengthWindow::new(lo * NM, hi * NM).map_err(|e| CliError::Usage(format!("--window-nm: {e}")))
}

/// Visibility per delay and an exponential fit, from a DelayMap file.
pub fn visibility(map_path: &Path, lo_nm: f64, hi_nm: f64, out: Option<&Path>) -> Result<String, CliError> {
    let map = output::read_delay_map(map_path)?;
    let series = visibility_vs_delay(&map, &window_nm(lo_nm, hi_nm)?).map_err(CliError::physics)?;
    let mut text = String::new();
    let _ = writeln!(text, "delay_fs,visibility,n_fringes");
    for p in &series.points {
        let _ = writeln!(text, "{:.3},{:.6},{}", p.delay / FS, p.visibility, p.n_fringes);
    }
    if !series.gaps.is_empty() {
        let gaps: Vec<String> = series.gaps.iter().map(|d| format!("{:.3}", d / FS)).collect();
        let _ = writeln!(text, "gaps (no fringes) at fs: {}", gaps.join(", "));
    }
    let x: Vec<f64> = series.points.iter().map(|p| p.delay).collect();
    let y: Vec<f64> = series.points.iter().map(|p| p.visibility).collect();
    match fit_exponential(&x, &y) {
        Ok(fit) => {
            let _ = writeln!(
                text,
                "fit: amplitude {:.6}, tau_d {:.3} fs, offset {:.6}, rms {:.3e}, iterations {}",
                fit.amplitude,
                fit.tau_d / FS,
                fit.offset,
                fit.rms_residual,
                fit.iterations
            );
        }
        Err(e) => {
            let _ = writeln!(text, "fit: not available ({e})");
        }
    }
    if let Some(path) = out {
        let header = Header::new(
            &map.provenance,
            "visibility",
            &format!("delay fs, visibility, pairs; window {lo_nm}-{hi_nm} nm"),
        );
        let rows: Vec<Vec<f64>> = series
            .points
            .iter()
            .map(|p| vec![p.delay / FS, p.visibility, p.n_fringes as f64])
            .collect();
        output::write_file(
            path,
            &output::table_csv(&header, &["delay_fs", "visibility", "n_fringes"], &rows),
        )?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    Exp,
    Lorentz,
}

/// Exponential fit of (x fs, y) or Lorentzian fit of (ω rad/s, y).
pub fn fit(path: &Path, model: FitModel, window: Option<(f64, f64)>) -> Result<String, CliError> {
    let (x, y) = output::read_series(path)?;
    match model {
        FitModel::Exp => {
            let xs: Vec<f64> = x.iter().map(|v| v * FS).collect();
            let f = fit_exponential(&xs, &y).map_err(CliError::physics)?;
            Ok(format!(
                "model: y = A exp(-x/tau_d) + C\nA: {}\ntau_d_fs: {}\nC: {}\nrms_residual: {}\niterations: {}\n",
                num(f.amplitude),
                num(f.tau_d / FS),
                num(f.offset),
                num(f.rms_residual),
                f.iterations
            ))
        }
        FitModel::Lorentz => {
            let spec = Spectrum::intensity(x, y).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let win = match window {
                Some((lo, hi)) => window_nm(lo, hi)?,
                None => {
                    let l = spec.wavelengths();
                    let (lo, hi) = l
                        .iter()
                        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
                    WavelengthWindow::new(lo * (1.0 - 1e-12), hi * (1.0 + 1e-12)).map_err(CliError::physics)?
                }
            };
            let f = fit_lorentzian(&spec, &win).map_err(CliError::physics)?;
            Ok(format!(
                "model: y = h / (1 + ((omega - omega_c)/hwhm)^2)\ncenter_rad_s: {}\ncenter_nm: {}\nhwhm_rad_s: {}\nheight: {}\nrms_residual: {}\n",
                num(f.center),
                num(lindblad_cl::constants::omega_to_wavelength(f.center) / NM),
                num(f.hwhm),
                num(f.height),
                num(f.rms_residual)
            ))
        }
    }
}

/// β and v for the given energy, plus distance↔delay conversions.
pub fn kinematics(kev: f64, distances_um: &[f64], delays_fs: &[f64]) -> Result<String, CliError> {
    let ke = kev * 1e3 * EV;
    let beam = electron_velocity(ke).map_err(CliError::physics)?;
    let mut text = String::new();
    let _ = writeln!(text, "kinetic_energy_kev,beta,velocity_m_s");
    let _ = writeln!(text, "{kev},{:.6},{:.6e}", beam.beta, beam.velocity);
    let _ = writeln!(text, "distance_um,delay_fs");
    let mut distances: Vec<f64> = distances_um.to_vec();
    if distances.is_empty() && delays_fs.is_empty() {
        distances = (0..=10).map(|k| k as f64 * 0.5).collect();
    }
    for &l in &distances {
        let tau = delay_from_distance(l * UM, ke).map_err(CliError::physics)?;
        let _ = writeln!(text, "{l},{:.4}", tau / FS);
    }
    for &t in delays_fs {
        let l = distance_from_delay(t * FS, ke).map_err(CliError::physics)?;
        let _ = writeln!(text, "{:.6},{t}", l / UM);
    }
    Ok(text)
}

/// Runs the analytic oracle suite; fails if any check fails.
pub fn validate() -> Result<String, CliError> {
    let checks = oracle_suite();
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {} ({:.2} s): {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.elapsed.as_secs_f64(),
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(text, "{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::ChecksFailed(text));
    }
    Ok(text)
}
