//! Built-in parameter sets for the hBN defect emitter and the EDPHS pulse.

use crate::constants::{FS, NM};
use crate::model::{validate_system, EmitterSystem, RawSystem};
use crate::pulse::PulseSpec;

/// Transition wavelengths from the ground state, nm, in descending order.
pub const PRESET_WAVELENGTHS_NM: [f64; 8] = [878.0, 797.0, 770.0, 670.0, 650.0, 630.0, 610.0, 590.0];

pub const PRESET_G_DEFAULT: f64 = 5e8;
pub const PRESET_G_OVERRIDES: [(usize, usize, f64); 2] = [(1, 2, 9e8), (1, 3, 8e8)];
pub const PRESET_GAMMA_DEFAULT: f64 = 4e13;
pub const PRESET_GAMMA_OVERRIDES: [(usize, usize, f64); 2] = [(1, 2, 3e13), (1, 3, 6e13)];
pub const PRESET_MU_DEFAULT_DEBYE: f64 = 15.0;
pub const PRESET_MU_OVERRIDES_DEBYE: [(usize, usize, f64); 7] = [
    (1, 2, 35.0),
    (1, 3, 85.0),
    (1, 4, 95.0),
    (1, 5, 105.0),
    (1, 6, 115.0),
    (1, 7, 120.0),
    (1, 8, 125.0),
];

pub const EDPHS_PEAK_FIELD: f64 = 1e8;
pub const EDPHS_CENTER_NM: f64 = 800.0;
pub const EDPHS_SIGMA_FS: f64 = 5.0;
pub const EDPHS_ARRIVAL_FS: f64 = 50.0;

/// Which level pairs a default rate applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateScope {
    /// Every pair m < n.
    AllPairs,
    /// Only pairs involving the ground state (m = 1).
    Ground,
}

/// Builds an N×N strictly upper-triangular matrix from a default value and
/// 1-based `(m, n, value)` overrides. Overrides outside the triangle are kept
/// as given so that validation can reject them.
pub fn rate_matrix(n: usize, default: f64, scope: RateScope, overrides: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]; n];
    for (m, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            if m < k && (scope == RateScope::AllPairs || m == 0) {
                *v = default;
            }
        }
    }
    for &(m, k, v) in overrides {
        if (1..=n).contains(&m) && (1..=n).contains(&k) {
            out[m - 1][k - 1] = v;
        }
    }
    out
}

/// Symmetric dipole matrix (debye) with zero diagonal.
pub fn dipole_matrix(n: usize, default: f64, overrides: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![default; n]; n];
    for (k, row) in out.iter_mut().enumerate() {
        row[k] = 0.0;
    }
    for &(m, k, v) in overrides {
        if (1..=n).contains(&m) && (1..=n).contains(&k) {
            out[m - 1][k - 1] = v;
            out[k - 1][m - 1] = v;
        }
    }
    out
}

/// The defect-center parameter set: ground state plus eight excited levels.
///
/// Excitation rates apply to every pair. Radiative rates connect each excited
/// level to the ground state only, so every line in the CL spectrum has the
/// width of its own level.
pub fn preset_raw_system() -> RawSystem {
    let n = PRESET_WAVELENGTHS_NM.len() + 1;
    RawSystem {
        wavelengths_nm: PRESET_WAVELENGTHS_NM.to_vec(),
        gamma: rate_matrix(n, PRESET_GAMMA_DEFAULT, RateScope::Ground, &PRESET_GAMMA_OVERRIDES),
        g: rate_matrix(n, PRESET_G_DEFAULT, RateScope::AllPairs, &PRESET_G_OVERRIDES),
        mu_debye: dipole_matrix(n, PRESET_MU_DEFAULT_DEBYE, &PRESET_MU_OVERRIDES_DEBYE),
        n_emitters: 1,
    }
}

pub fn preset_system() -> EmitterSystem {
    validate_system(&preset_raw_system()).expect("built-in preset is valid")
}

/// EDPHS pulse: 10⁸ V/m peak, σ = 5 fs, 800 nm carrier, unchirped, arriving at 50 fs.
pub fn preset_pulse() -> PulseSpec {
    PulseSpec {
        peak_field: EDPHS_PEAK_FIELD,
        center_wavelength: EDPHS_CENTER_NM * NM,
        duration: EDPHS_SIGMA_FS * FS,
        chirp: 0.0,
        arrival: EDPHS_ARRIVAL_FS * FS,
        enabled: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values_are_stable() {
        let raw = preset_raw_system();
        assert_eq!(raw, preset_raw_system());
        assert_eq!(raw.gamma[0][1], 3e13);
        assert_eq!(raw.gamma[0][2], 6e13);
        assert_eq!(raw.gamma[0][8], 4e13);
        assert_eq!(raw.gamma[1][2], 0.0);
        assert_eq!(raw.g[0][1], 9e8);
        assert_eq!(raw.g[0][2], 8e8);
        assert_eq!(raw.g[3][7], 5e8);
        assert_eq!(raw.mu_debye[0][1], 35.0);
        assert_eq!(raw.mu_debye[7][0], 125.0);
        assert_eq!(raw.mu_debye[0][8], 15.0);
        assert_eq!(raw.mu_debye[4][6], 15.0);
        assert_eq!(raw.mu_debye[4][4], 0.0);
    }

    #[test]
    fn all_pairs_scope() {
        let m = rate_matrix(3, 1.0, RateScope::AllPairs, &[(2, 3, 5.0)]);
        assert_eq!(m, vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 5.0], vec![0.0; 3]]);
    }
}
