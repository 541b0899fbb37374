//! Density-matrix simulation of N-level emitters pumped by an electron beam
//! and probed by a broadband optical pulse, with the spectral analysis needed
//! to turn trajectories into CL spectra, fringe visibilities and decay times.
//!
//! All quantities are SI internally. Interface helpers in [`constants`]
//! convert from fs, nm and debye.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod fourier;
pub mod integrator;
pub mod model;
pub mod observables;
pub mod preset;
pub mod pulse;
pub mod spectrum;
pub mod validation;

pub use analysis::{
    delay_from_distance, distance_from_delay, electron_velocity, fit_exponential, fit_lorentzian, fringe_visibility,
    visibility_vs_delay, AnalysisError, BeamKinematics, ExpFit, LorentzFit, VisibilityPoint, VisibilitySeries,
    WavelengthWindow,
};
pub use integrator::{
    auto_start, convergence_check, default_step, evolve, evolve_until_decayed, ElectronWindow, IntegratorError,
    InvariantReport, TimeGrid, Trajectory,
};
pub use model::{lindblad_rhs, validate_system, DensityMatrix, EmitterSystem, ModelError, RawSystem};
pub use observables::{
    calibrate_detection, delay_scan, delay_scan_rows, detected_spectrum, photon_number_expectation,
    polarization_spectrum, simulate_delay, spectral_density, DelayMap, DelayRow, ObservableError, ScanSetup,
};
pub use pulse::{field_at, pulse_spectrum, sigma_from_intensity_fwhm, PulseError, PulseSpec};
pub use spectrum::{Spectrum, SpectrumError, SpectrumKind};
