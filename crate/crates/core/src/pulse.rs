//! EDPHS field model: a linearly chirped Gaussian pulse.

use crate::constants::wavelength_to_omega;
use crate::fourier;
use crate::spectrum::{check_grid, Spectrum, SpectrumError, SpectrumKind};

/// Envelope half-span, in σ, over which the pulse is sampled for its spectrum.
const SPAN_SIGMAS: f64 = 12.0;

/// Scalar pulse along the dipole axis.
///
/// `duration` is the standard deviation σ of the field envelope
/// `exp(−(t−t₀)²/(2σ²))`; use [`sigma_from_intensity_fwhm`] for FWHM input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Peak field, V/m.
    pub peak_field: f64,
    /// Carrier wavelength, m.
    pub center_wavelength: f64,
    /// Envelope σ, s.
    pub duration: f64,
    /// Linear chirp rate, s⁻².
    pub chirp: f64,
    /// Envelope peak time τ₀₁, s.
    pub arrival: f64,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PulseError {
    #[error("InvalidPulse: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// σ of the field envelope whose intensity profile has the given FWHM.
pub fn sigma_from_intensity_fwhm(fwhm: f64) -> f64 {
    fwhm / (2.0 * std::f64::consts::LN_2.sqrt())
}

impl PulseSpec {
    pub fn validate(&self) -> Result<(), PulseError> {
        if !(self.peak_field.is_finite() && self.peak_field >= 0.0) {
            return Err(PulseError::Invalid("peak_field must be finite and >= 0"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(PulseError::Invalid("duration must be > 0"));
        }
        if !(self.center_wavelength.is_finite() && self.center_wavelength > 0.0) {
            return Err(PulseError::Invalid("center_wavelength must be > 0"));
        }
        if !self.chirp.is_finite() || !self.arrival.is_finite() {
            return Err(PulseError::Invalid("chirp and arrival must be finite"));
        }
        Ok(())
    }

    /// Carrier angular frequency ω₀, rad/s.
    pub fn carrier(&self) -> f64 {
        wavelength_to_omega(self.center_wavelength)
    }

    pub fn disabled() -> Self {
        Self {
            peak_field: 0.0,
            center_wavelength: 800e-9,
            duration: 5e-15,
            chirp: 0.0,
            arrival: 0.0,
            enabled: false,
        }
    }

    /// Largest instantaneous angular frequency inside the sampled envelope.
    pub fn max_instantaneous_frequency(&self) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        self.carrier() + self.chirp.abs() * SPAN_SIGMAS * self.duration
    }

    /// Time after which the field is negligible (envelope below e⁻⁷²).
    pub fn end_time(&self) -> f64 {
        self.arrival + SPAN_SIGMAS * self.duration
    }
}

/// E(t) = E₀ exp(−s²/(2σ²)) cos(ω₀ s + ½ b s²), s = t − τ₀₁; zero when disabled.
pub fn field_at(spec: &PulseSpec, t: f64) -> f64 {
    if !spec.enabled {
        return 0.0;
    }
    let s = t - spec.arrival;
    let envelope = (-s * s / (2.0 * spec.duration * spec.duration)).exp();
    if envelope == 0.0 {
        return 0.0;
    }
    spec.peak_field * envelope * (spec.carrier() * s + 0.5 * spec.chirp * s * s).cos()
}

/// Ẽ(ω) = ∫ E(t) e^{−iωt} dt on `omega_grid`, evaluated by trapezoidal quadrature
/// over τ₀₁ ± 12σ.
pub fn pulse_spectrum(spec: &PulseSpec, omega_grid: &[f64]) -> Result<Spectrum, PulseError> {
    if omega_grid.is_empty() {
        return Err(SpectrumError::EmptyGrid.into());
    }
    check_grid(omega_grid)?;
    spec.validate()?;
    let (times, field) = sample_field(spec, omega_grid);
    let values = fourier::trapezoid(&times, &field, omega_grid, 0.0);
    Ok(Spectrum::new(
        omega_grid.to_vec(),
        values,
        SpectrumKind::ComplexAmplitude,
    )?)
}

/// Time samples fine enough to resolve both the carrier and the highest grid frequency.
pub(crate) fn sample_field(spec: &PulseSpec, omega_grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let grid_max = omega_grid.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let fastest = spec.max_instantaneous_frequency() + grid_max;
    let mut dt = spec.duration / 20.0;
    if fastest > 0.0 {
        dt = dt.min(0.2 / fastest);
    }
    let half = SPAN_SIGMAS * spec.duration;
    let steps = (2.0 * half / dt).ceil() as usize;
    let dt = 2.0 * half / steps as f64;
    let t0 = spec.arrival - half;
    let times: Vec<f64> = (0..=steps).map(|k| t0 + k as f64 * dt).collect();
    let field = times.iter().map(|&t| field_at(spec, t)).collect();
    (times, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{linspace, omega_grid_for_band, FS, NM};
    use crate::preset::preset_pulse;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn disabled_pulse_is_silent() {
        let mut p = preset_pulse();
        p.enabled = false;
        for t in [-1e-12, 0.0, p.arrival, 1e-12] {
            assert_eq!(field_at(&p, t), 0.0);
        }
    }

    #[test]
    fn peak_at_arrival() {
        let p = preset_pulse();
        assert_eq!(field_at(&p, p.arrival), 1e8);
    }

    #[test]
    fn gaussian_tail() {
        let p = preset_pulse();
        let bound = p.peak_field * (-50.0f64).exp();
        for sign in [-1.0, 1.0] {
            let e = field_at(&p, p.arrival + sign * 10.0 * p.duration);
            assert!(e.abs() <= bound);
        }
    }

    /// Closed-form transform of the unchirped pulse.
    fn gaussian_pair(p: &PulseSpec, w: f64) -> Complex64 {
        let s = p.duration;
        let w0 = p.carrier();
        let amp = p.peak_field * s * (2.0 * PI).sqrt() / 2.0;
        let lobes = (-(s * (w - w0)).powi(2) / 2.0).exp() + (-(s * (w + w0)).powi(2) / 2.0).exp();
        Complex64::from_polar(amp * lobes, -w * p.arrival)
    }

    #[test]
    fn matches_analytic_gaussian_transform() {
        let p = preset_pulse();
        let grid = omega_grid_for_band(500.0 * NM, 1400.0 * NM, 401);
        let spec = pulse_spectrum(&p, &grid).unwrap();
        let peak = gaussian_pair(&p, p.carrier()).norm();
        for (&w, z) in grid.iter().zip(spec.values()) {
            assert!((z - gaussian_pair(&p, w)).norm() < 1e-9 * peak);
        }
    }

    #[test]
    fn peak_and_width() {
        let p = preset_pulse();
        let grid = linspace(1.5e15, 3.2e15, 3401);
        let spec = pulse_spectrum(&p, &grid).unwrap();
        let intensity: Vec<f64> = spec.values().iter().map(|z| z.norm_sqr()).collect();
        let (imax, &max) = intensity
            .iter()
            .enumerate()
            .fold((0, &0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let dw = grid[1] - grid[0];
        assert!((grid[imax] - p.carrier()).abs() <= dw);

        // Intensity ∝ exp(−σ²Δω²) ⇒ FWHM = 2√(ln 2)/σ.
        let half = max / 2.0;
        let crossing = |range: Box<dyn Iterator<Item = usize>>| {
            let mut prev = imax;
            for i in range {
                if intensity[i] < half {
                    let f = (intensity[prev] - half) / (intensity[prev] - intensity[i]);
                    return grid[prev] + f * (grid[i] - grid[prev]);
                }
                prev = i;
            }
            panic!("no half-maximum crossing");
        };
        let hi = crossing(Box::new(imax + 1..grid.len()));
        let lo = crossing(Box::new((0..imax).rev()));
        let want = 2.0 * std::f64::consts::LN_2.sqrt() / p.duration;
        assert!(((hi - lo) - want).abs() < 1e-3 * want, "{} vs {}", hi - lo, want);
    }

    #[test]
    fn linear_in_peak_field() {
        let p = preset_pulse();
        let mut q = p;
        q.peak_field *= 2.0;
        let grid = omega_grid_for_band(600.0 * NM, 1000.0 * NM, 101);
        let a = pulse_spectrum(&p, &grid).unwrap();
        let b = pulse_spectrum(&q, &grid).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((y - 2.0 * x).norm() <= 1e-12 * x.norm().max(1e-30));
        }
    }

    #[test]
    fn empty_grid() {
        assert_eq!(
            pulse_spectrum(&preset_pulse(), &[]),
            Err(PulseError::Spectrum(SpectrumError::EmptyGrid))
        );
    }

    fn energy_time(p: &PulseSpec) -> f64 {
        let (t, e) = sample_field(p, &[0.0]);
        let dt = t[1] - t[0];
        e.iter().map(|x| x * x).sum::<f64>() * dt
    }

    fn energy_frequency(p: &PulseSpec) -> f64 {
        // E real ⇒ |Ẽ(−ω)| = |Ẽ(ω)|; integrate ω ≥ 0 and double.
        let top = p.carrier() + p.chirp.abs() * 12.0 * p.duration + 14.0 / p.duration;
        let grid = linspace(0.0, top, 8001);
        let spec = pulse_spectrum(p, &grid).unwrap();
        let dw = grid[1] - grid[0];
        let v: Vec<f64> = spec.values().iter().map(|z| z.norm_sqr()).collect();
        let integral = dw * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]));
        2.0 * integral / (2.0 * PI)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn parseval_holds(sigma_fs in 3.0f64..12.0, chirp in -2e28f64..2e28) {
            let mut p = preset_pulse();
            p.duration = sigma_fs * FS;
            p.chirp = chirp;
            let et = energy_time(&p);
            let ew = energy_frequency(&p);
            prop_assert!((et - ew).abs() < 1e-3 * et, "time {et:e} freq {ew:e}");
        }

        #[test]
        fn chirp_preserves_energy(chirp in -5e28f64..5e28) {
            let p = preset_pulse();
            let mut q = p;
            q.chirp = chirp;
            let a = energy_time(&p);
            let b = energy_time(&q);
            prop_assert!((a - b).abs() < 1e-3 * a);
        }
    }
}
