//! CODATA constants and unit conversions used at the interface boundary.
//!
//! Everything inside the crate runs in SI: seconds, rad/s, C·m, V/m.

use std::f64::consts::PI;

/// Fixed physical constants (CODATA 2018). Not configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Electron rest energy m_e c², J.
    pub electron_rest_energy: f64,
    /// One debye in C·m.
    pub debye: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    c: C_LIGHT,
    e_charge: E_CHARGE,
    eps0: EPS0,
    electron_rest_energy: ELECTRON_REST_ENERGY,
    debye: DEBYE,
};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C_LIGHT: f64 = 299_792_458.0;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const ELECTRON_REST_ENERGY: f64 = 8.187_105_776_9e-14;
pub const DEBYE: f64 = 3.335_64e-30;

pub const FS: f64 = 1e-15;
pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const EV: f64 = E_CHARGE;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
pub fn wavelength_to_omega(lambda: f64) -> f64 {
    2.0 * PI * C_LIGHT / lambda
}

/// Vacuum wavelength (m) of light with angular frequency `omega` (rad/s).
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * C_LIGHT / omega
}

/// Uniform angular-frequency grid spanning the wavelength interval `[lambda_lo, lambda_hi]`.
///
/// The grid is ascending in ω, i.e. descending in wavelength.
pub fn omega_grid_for_band(lambda_lo: f64, lambda_hi: f64, points: usize) -> Vec<f64> {
    let w_lo = wavelength_to_omega(lambda_hi.max(lambda_lo));
    let w_hi = wavelength_to_omega(lambda_hi.min(lambda_lo));
    linspace(w_lo, w_hi, points)
}

pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points).map(|i| start + step * i as f64).collect()
        }
    }
}
