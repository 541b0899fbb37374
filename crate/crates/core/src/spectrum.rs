use num_complex::Complex64;
use thiserror::Error;

use crate::constants::omega_to_wavelength;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Intensity,
    ComplexAmplitude,
}

impl SpectrumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumKind::Intensity => "intensity",
            SpectrumKind::ComplexAmplitude => "complex_amplitude",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("EmptyGrid: frequency grid has no points")]
    EmptyGrid,
    #[error("GridMismatch: {0}")]
    GridMismatch(String),
    #[error("NonIncreasingGrid: omega must be strictly increasing (index {0})")]
    NonIncreasing(usize),
    #[error("NonUniformGrid: omega spacing varies at index {0}")]
    NonUniform(usize),
    #[error("NonFinite: spectrum contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("ComplexIntensity: intensity spectrum has an imaginary part at index {0}")]
    ComplexIntensity(usize),
}

/// Values sampled on a uniform, ascending angular-frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    omega: Vec<f64>,
    values: Vec<Complex64>,
    kind: SpectrumKind,
}

/// Checks that a grid is non-empty, finite, strictly increasing and uniform.
pub fn check_grid(omega: &[f64]) -> Result<(), SpectrumError> {
    if omega.is_empty() {
        return Err(SpectrumError::EmptyGrid);
    }
    if let Some(i) = omega.iter().position(|w| !w.is_finite()) {
        return Err(SpectrumError::NonFinite(i));
    }
    if let Some(i) = omega.windows(2).position(|w| w[1] <= w[0]) {
        return Err(SpectrumError::NonIncreasing(i + 1));
    }
    if omega.len() > 2 {
        let mean = (omega[omega.len() - 1] - omega[0]) / (omega.len() - 1) as f64;
        if let Some(i) = omega
            .windows(2)
            .position(|w| ((w[1] - w[0]) - mean).abs() > 1e-6 * mean)
        {
            return Err(SpectrumError::NonUniform(i + 1));
        }
    }
    Ok(())
}

impl Spectrum {
    pub fn new(omega: Vec<f64>, values: Vec<Complex64>, kind: SpectrumKind) -> Result<Self, SpectrumError> {
        check_grid(&omega)?;
        if omega.len() != values.len() {
            return Err(SpectrumError::GridMismatch(format!(
                "{} frequencies but {} values",
                omega.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpectrumError::NonFinite(i));
        }
        if kind == SpectrumKind::Intensity {
            if let Some(i) = values.iter().position(|z| z.im != 0.0) {
                return Err(SpectrumError::ComplexIntensity(i));
            }
        }
        Ok(Self { omega, values, kind })
    }

    pub fn intensity(omega: Vec<f64>, values: Vec<f64>) -> Result<Self, SpectrumError> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(omega, values, SpectrumKind::Intensity)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Real parts; the intensity values for an intensity spectrum.
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Vacuum wavelength of every grid point, m.
    pub fn wavelengths(&self) -> Vec<f64> {
        self.omega.iter().map(|&w| omega_to_wavelength(w)).collect()
    }

    /// Errors unless `other` sits on the same frequency grid.
    pub fn same_grid(&self, other: &Spectrum) -> Result<(), SpectrumError> {
        if self.omega.len() != other.omega.len() {
            return Err(SpectrumError::GridMismatch(format!(
                "{} vs {} points",
                self.omega.len(),
                other.omega.len()
            )));
        }
        let span = (self.omega[self.omega.len() - 1] - self.omega[0]).abs().max(1.0);
        for (i, (a, b)) in self.omega.iter().zip(&other.omega).enumerate() {
            if (a - b).abs() > 1e-12 * span {
                return Err(SpectrumError::GridMismatch(format!("frequency {i} differs")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Spectrum {
        Spectrum {
            omega: self.omega.clone(),
            values: self.values.iter().map(|z| z * factor).collect(),
            kind: self.kind,
        }
    }
}
