//! Fringe visibility, decay and line-shape fits, electron-beam kinematics.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::constants::{C_LIGHT, ELECTRON_REST_ENERGY};
use crate::observables::DelayMap;
use crate::spectrum::Spectrum;

const MAX_ITERATIONS: usize = 50;
const STEP_TOLERANCE: f64 = 1e-8;
const LORENTZ_MAX_ITERATIONS: usize = 100;
const LORENTZ_STEP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("TooFewFringes: found {found} extrema in the window, need at least 3")]
    TooFewFringes { found: usize },
    #[error("AllRowsSkipped: no delay row has resolvable fringes")]
    AllRowsSkipped,
    #[error("NonConvergence: no convergence after {iterations} iterations (last relative step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },
    #[error("DegenerateInput: {0}")]
    DegenerateInput(&'static str),
    #[error("NoPeak: window maximum {peak:e} is below three times the median {median:e}")]
    NoPeak { peak: f64, median: f64 },
    #[error("NonPositiveEnergy: kinetic energy must be > 0")]
    NonPositiveEnergy,
    #[error("NegativeDistance: distance must be >= 0")]
    NegativeDistance,
    #[error("NegativeDelay: delay must be >= 0")]
    NegativeDelay,
    #[error("InvalidWindow: {0}")]
    InvalidWindow(&'static str),
}

/// Wavelength interval [lo, hi] in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthWindow {
    pub lo: f64,
    pub hi: f64,
}

impl WavelengthWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self, AnalysisError> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(AnalysisError::InvalidWindow("need 0 < lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && lambda <= self.hi
    }

    /// Grid indices (ascending ω) whose wavelength falls in the window.
    fn indices(&self, spec: &Spectrum) -> Vec<usize> {
        spec.wavelengths()
            .iter()
            .enumerate()
            .filter(|(_, &l)| self.contains(l))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityPoint {
    pub delay: f64,
    pub visibility: f64,
    /// Adjacent extremum pairs averaged.
    pub n_fringes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Max,
    Min,
}

/// Mean (I_max − I_min)/(I_max + I_min) over adjacent extremum pairs inside
/// `window`. `delay` of the returned point is 0.
pub fn fringe_visibility(spec: &Spectrum, window: &WavelengthWindow) -> Result<VisibilityPoint, AnalysisError> {
    let idx = window.indices(spec);
    let raw: Vec<f64> = idx.iter().map(|&i| spec.values()[i].re).collect();
    let extrema = find_extrema(&raw);
    if extrema.len() < 3 {
        return Err(AnalysisError::TooFewFringes { found: extrema.len() });
    }
    let contrasts: Vec<f64> = extrema
        .windows(2)
        .map(|pair| {
            let (a, b) = (pair[0].1, pair[1].1);
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            if hi + lo > 0.0 {
                ((hi - lo) / (hi + lo)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(VisibilityPoint {
        delay: 0.0,
        visibility: contrasts.iter().sum::<f64>() / contrasts.len() as f64,
        n_fringes: contrasts.len(),
    })
}

/// Alternating extrema: located on a 3-point moving average, valued on the
/// raw data within one sample of the smoothed position.
fn find_extrema(raw: &[f64]) -> Vec<(Extremum, f64)> {
    let n = raw.len();
    if n < 3 {
        return Vec::new();
    }
    let smooth: Vec<f64> = (0..n)
        .map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n - 1);
            raw[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    let mut out: Vec<(Extremum, f64)> = Vec::new();
    let mut k = 1;
    while k + 1 < n {
        // Walk across flat runs so a plateau counts once.
        let mut end = k;
        while end + 1 < n - 1 && smooth[end + 1] == smooth[k] {
            end += 1;
        }
        let (left, right) = (smooth[k - 1], smooth[end + 1]);
        let here = smooth[k];
        let kind = if here > left && here > right {
            Some(Extremum::Max)
        } else if here < left && here < right {
            Some(Extremum::Min)
        } else {
            None
        };
        if let Some(kind) = kind {
            let lo = k - 1;
            let hi = (end + 1).min(n - 1);
            let slice = raw[lo..=hi].iter().cloned();
            let value = match kind {
                Extremum::Max => slice.fold(f64::NEG_INFINITY, f64::max),
                Extremum::Min => slice.fold(f64::INFINITY, f64::min),
            };
            match out.last_mut() {
                Some(last) if last.0 == kind => {
                    let better = match kind {
                        Extremum::Max => value > last.1,
                        Extremum::Min => value < last.1,
                    };
                    if better {
                        last.1 = value;
                    }
                }
                _ => out.push((kind, value)),
            }
        }
        k = end + 1;
    }
    out
}

/// Visibility per delay row; rows without fringes are listed in `gaps`.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilitySeries {
    pub points: Vec<VisibilityPoint>,
    /// Delays of skipped rows, s.
    pub gaps: Vec<f64>,
}

pub fn visibility_vs_delay(map: &DelayMap, window: &WavelengthWindow) -> Result<VisibilitySeries, AnalysisError> {
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for (row, &delay) in map.delays.iter().enumerate() {
        let spec = map
            .row_spectrum(row)
            .map_err(|_| AnalysisError::DegenerateInput("delay map row is not a valid spectrum"))?;
        match fringe_visibility(&spec, window) {
            Ok(p) => points.push(VisibilityPoint { delay, ..p }),
            Err(AnalysisError::TooFewFringes { .. }) => gaps.push(delay),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(AnalysisError::AllRowsSkipped);
    }
    Ok(VisibilitySeries { points, gaps })
}

/// y = amplitude·exp(−x/tau_d) + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub amplitude: f64,
    pub tau_d: f64,
    pub offset: f64,
    pub rms_residual: f64,
    pub iterations: usize,
}

impl ExpFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (-x / self.tau_d).exp() + self.offset
    }
}

fn check_series(x: &[f64], y: &[f64], min_len: usize) -> Result<(), AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::DegenerateInput("x and y differ in length"));
    }
    if x.len() < min_len {
        return Err(AnalysisError::DegenerateInput("too few points"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(AnalysisError::DegenerateInput("non-finite value"));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::DegenerateInput("x must be strictly increasing"));
    }
    Ok(())
}

/// Solves the 3×3 Gauss-Newton normal equations with column scaling.
fn gauss_newton_step(jac: &[[f64; 3]], resid: &[f64]) -> Option<Vector3<f64>> {
    let mut norms = [0.0f64; 3];
    for row in jac {
        for c in 0..3 {
            norms[c] += row[c] * row[c];
        }
    }
    let norms = norms.map(|v| v.sqrt());
    if norms.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return None;
    }
    let mut jtj = Matrix3::<f64>::zeros();
    let mut jtr = Vector3::<f64>::zeros();
    for (row, &r) in jac.iter().zip(resid) {
        let s = [row[0] / norms[0], row[1] / norms[1], row[2] / norms[2]];
        for a in 0..3 {
            jtr[a] += s[a] * r;
            for b in 0..3 {
                jtj[(a, b)] += s[a] * s[b];
            }
        }
    }
    let solved = jtj.lu().solve(&jtr)?;
    Some(Vector3::new(
        solved[0] / norms[0],
        solved[1] / norms[1],
        solved[2] / norms[2],
    ))
}

/// Least-squares fit of y = A·e^{−x/τ} + C by Gauss-Newton with backtracking,
/// initialized from a log-linear fit after estimating C from the last 10%.
pub fn fit_exponential(x: &[f64], y: &[f64]) -> Result<ExpFit, AnalysisError> {
    check_series(x, y, 5)?;
    let n = x.len();
    let (ymin, ymax) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = ymax.abs().max(ymin.abs());
    if ymax - ymin <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(AnalysisError::DegenerateInput("y is constant"));
    }

    // Shift x for conditioning; A refers to x0 until the end.
    let x0 = x[0];
    let xs: Vec<f64> = x.iter().map(|v| v - x0).collect();
    let span = xs[n - 1];

    let tail = (n / 10).max(1);
    let c0 = y[n - tail..].iter().sum::<f64>() / tail as f64;
    let sign = if y[0] >= c0 { 1.0 } else { -1.0 };
    let head = sign * (y[0] - c0);
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in xs.iter().zip(y) {
        let z = sign * (yi - c0);
        if z > 0.05 * head {
            let lz = z.ln();
            sx += xi;
            sy += lz;
            sxx += xi * xi;
            sxy += xi * lz;
            m += 1.0;
        }
    }
    let denom = m * sxx - sx * sx;
    let (mut amp, mut tau) = if m >= 2.0 && denom > 0.0 {
        let slope = (m * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / m;
        let tau = if slope < 0.0 { -1.0 / slope } else { span };
        (sign * intercept.exp(), tau)
    } else {
        (y[0] - c0, span / 3.0)
    };
    if !(tau.is_finite() && tau > 0.0) {
        tau = span.max(f64::MIN_POSITIVE);
    }
    if !amp.is_finite() {
        amp = y[0] - c0;
    }
    let mut offset = c0;

    let ssr = |a: f64, t: f64, c: f64| -> f64 {
        xs.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - (a * (-xi / t).exp() + c);
                r * r
            })
            .sum()
    };

    let mut current = ssr(amp, tau, offset);
    let mut last_step = f64::INFINITY;
    for iter in 1..=MAX_ITERATIONS {
        let mut jac = Vec::with_capacity(n);
        let mut resid = Vec::with_capacity(n);
        for (&xi, &yi) in xs.iter().zip(y) {
            let e = (-xi / tau).exp();
            jac.push([e, amp * xi / (tau * tau) * e, 1.0]);
            resid.push(yi - (amp * e + offset));
        }
        let delta = gauss_newton_step(&jac, &resid).ok_or(AnalysisError::DegenerateInput("singular Jacobian"))?;
        let rel = relative_step(&delta, [amp, tau, offset], [scale, span, scale]);

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (a, t, c) = (
                amp + lambda * delta[0],
                tau + lambda * delta[1],
                offset + lambda * delta[2],
            );
            if t > 0.0 {
                let trial = ssr(a, t, c);
                if trial <= current {
                    amp = a;
                    tau = t;
                    offset = c;
                    current = trial;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        // Converged once the accepted change is below tolerance. Near the
        // minimum a small proposed step that cannot lower the residual means
        // the minimum is reached to rounding.
        last_step = if accepted { rel * lambda } else { 0.0 };
        if last_step < STEP_TOLERANCE && rel < 1e-2 {
            return Ok(ExpFit {
                amplitude: amp * (x0 / tau).exp(),
                tau_d: tau,
                offset,
                rms_residual: (current / n as f64).sqrt(),
                iterations: iter,
            });
        }
    }
    Err(AnalysisError::NonConvergence {
        iterations: MAX_ITERATIONS,
        last_step,
    })
}

fn relative_step(delta: &Vector3<f64>, params: [f64; 3], scales: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| delta[i].abs() / params[i].abs().max(1e-12 * scales[i]).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// h/(1 + ((ω − center)/hwhm)²)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzFit {
    pub center: f64,
    pub hwhm: f64,
    pub height: f64,
    pub rms_residual: f64,
}

/// Fits a single Lorentzian to the real part of `spec` inside `window`.
pub fn fit_lorentzian(spec: &Spectrum, window: &WavelengthWindow) -> Result<LorentzFit, AnalysisError> {
    let idx = window.indices(spec);
    if idx.len() < 5 {
        return Err(AnalysisError::DegenerateInput("fewer than 5 points in window"));
    }
    let w: Vec<f64> = idx.iter().map(|&i| spec.omega()[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| spec.values()[i].re).collect();
    let mut sorted = v.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let (imax, peak) = v
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &y)| if y > b.1 { (i, y) } else { b });
    if !(peak > 0.0) || peak < 3.0 * median {
        return Err(AnalysisError::NoPeak { peak, median });
    }

    let dw = w[1] - w[0];
    let span = w[w.len() - 1] - w[0];
    let half = 0.5 * peak;
    let right = (imax..v.len()).find(|&i| v[i] < half).map(|i| w[i] - w[imax]);
    let left = (0..=imax).rev().find(|&i| v[i] < half).map(|i| w[imax] - w[i]);
    let mut hwhm = match (left, right) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.25 * span,
    }
    .max(dw);
    let mut center = w[imax];
    let mut height = peak;

    let model = |h: f64, c: f64, g: f64, x: f64| h / (1.0 + ((x - c) / g).powi(2));
    let ssr =
        |h: f64, c: f64, g: f64| -> f64 { w.iter().zip(&v).map(|(&x, &y)| (y - model(h, c, g, x)).powi(2)).sum() };
    let mut current = ssr(height, center, hwhm);
    let mut last_step = f64::INFINITY;
    for _ in 0..LORENTZ_MAX_ITERATIONS {
        let mut jac = Vec::with_capacity(w.len());
        let mut resid = Vec::with_capacity(w.len());
        for (&x, &y) in w.iter().zip(&v) {
            let u = (x - center) / hwhm;
            let d = 1.0 + u * u;
            let f = height / d;
            // ∂f/∂h, ∂f/∂c, ∂f/∂Γ
            jac.push([
                1.0 / d,
                2.0 * height * u / (hwhm * d * d),
                2.0 * height * u * u / (hwhm * d * d),
            ]);
            resid.push(y - f);
        }
        let delta = gauss_newton_step(&jac, &resid).ok_or(AnalysisError::DegenerateInput("singular Jacobian"))?;
        let rel = (delta[0] / height)
            .abs()
            .max((delta[1] / hwhm).abs())
            .max((delta[2] / hwhm).abs());

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (h, c, g) = (
                height + lambda * delta[0],
                center + lambda * delta[1],
                hwhm + lambda * delta[2],
            );
            if g > 0.0 {
                let trial = ssr(h, c, g);
                if trial <= current {
                    height = h;
                    center = c;
                    hwhm = g;
                    current = trial;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        last_step = if accepted { rel * lambda } else { 0.0 };
        if last_step < LORENTZ_STEP_TOLERANCE && rel < 1e-2 {
            return Ok(LorentzFit {
                center,
                hwhm,
                height,
                rms_residual: (current / w.len() as f64).sqrt(),
            });
        }
    }
    Err(AnalysisError::NonConvergence {
        iterations: LORENTZ_MAX_ITERATIONS,
        last_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamKinematics {
    /// J.
    pub kinetic_energy: f64,
    /// m/s.
    pub velocity: f64,
    pub beta: f64,
}

/// Relativistic electron speed for kinetic energy `kinetic_energy` (J).
pub fn electron_velocity(kinetic_energy: f64) -> Result<BeamKinematics, AnalysisError> {
    if !(kinetic_energy.is_finite() && kinetic_energy > 0.0) {
        return Err(AnalysisError::NonPositiveEnergy);
    }
    // β = √(1 − 1/γ²) with γ = 1 + x, written to avoid cancellation at small x.
    let x = kinetic_energy / ELECTRON_REST_ENERGY;
    let beta = (x * (2.0 + x)).sqrt() / (1.0 + x);
    Ok(BeamKinematics {
        kinetic_energy,
        velocity: beta * C_LIGHT,
        beta,
    })
}

/// Factor (1/β − 1)/c, s per metre of EDPHS–sample distance.
fn delay_per_metre(kinetic_energy: f64) -> Result<f64, AnalysisError> {
    let beam = electron_velocity(kinetic_energy)?;
    Ok((1.0 / beam.beta - 1.0) / C_LIGHT)
}

/// τ = L(1/v − 1/c).
pub fn delay_from_distance(distance: f64, kinetic_energy: f64) -> Result<f64, AnalysisError> {
    if !(distance.is_finite() && distance >= 0.0) {
        return Err(AnalysisError::NegativeDistance);
    }
    Ok(distance * delay_per_metre(kinetic_energy)?)
}

/// L = τ/(1/v − 1/c).
pub fn distance_from_delay(delay: f64, kinetic_energy: f64) -> Result<f64, AnalysisError> {
    if !(delay.is_finite() && delay >= 0.0) {
        return Err(AnalysisError::NegativeDelay);
    }
    Ok(delay / delay_per_metre(kinetic_energy)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{linspace, omega_to_wavelength, wavelength_to_omega, EV, FS, NM, UM};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn band() -> (Vec<f64>, WavelengthWindow) {
        let omega = linspace(wavelength_to_omega(800.0 * NM), wavelength_to_omega(550.0 * NM), 2001);
        (omega, WavelengthWindow::new(550.0 * NM, 800.0 * NM).unwrap())
    }

    /// I = mid·(1 + F cos) with extrema landing exactly on grid points.
    fn fringes(omega: &[f64], mid: f64, contrast: f64, period_pts: usize) -> Spectrum {
        let values = (0..omega.len())
            .map(|k| mid * (1.0 + contrast * (2.0 * PI * k as f64 / period_pts as f64).cos()))
            .collect();
        Spectrum::intensity(omega.to_vec(), values).unwrap()
    }

    #[test]
    fn flat_spectrum_has_no_fringes() {
        let (omega, window) = band();
        let flat = Spectrum::intensity(omega.clone(), vec![2.0; omega.len()]).unwrap();
        assert!(matches!(
            fringe_visibility(&flat, &window),
            Err(AnalysisError::TooFewFringes { found: 0 })
        ));
    }

    #[test]
    fn known_contrast() {
        let (omega, window) = band();
        let f = fringe_visibility(&fringes(&omega, 1.0, 0.57, 100), &window).unwrap();
        assert!((f.visibility - 0.57).abs() < 1e-12, "{}", f.visibility);
        assert!(f.n_fringes >= 30);
        let full = fringe_visibility(&fringes(&omega, 1.0, 1.0, 100), &window).unwrap();
        assert_eq!(full.visibility, 1.0);
    }

    #[test]
    fn contrast_is_scale_invariant() {
        let (omega, window) = band();
        let s = fringes(&omega, 1.0, 0.3, 64);
        let a = fringe_visibility(&s, &window).unwrap();
        let b = fringe_visibility(&s.scaled(1234.5), &window).unwrap();
        assert!((a.visibility - b.visibility).abs() < 1e-12);
        assert_eq!(a.n_fringes, b.n_fringes);
    }

    #[test]
    fn smoothing_ignores_single_sample_jitter() {
        let (omega, window) = band();
        let mut v = fringes(&omega, 1.0, 0.5, 200).real();
        for (k, x) in v.iter_mut().enumerate() {
            *x += if k % 2 == 0 { 1e-5 } else { -1e-5 };
        }
        let s = Spectrum::intensity(omega.clone(), v).unwrap();
        let f = fringe_visibility(&s, &window).unwrap();
        assert!((f.visibility - 0.5).abs() < 1e-3);
        assert!(f.n_fringes >= 18 && f.n_fringes <= 20, "{}", f.n_fringes);
    }

    fn synthetic_map(delays: &[f64], f: impl Fn(f64) -> f64) -> DelayMap {
        let (omega, _) = band();
        let intensity = delays.iter().map(|&d| fringes(&omega, 1.0, f(d), 80).real()).collect();
        DelayMap {
            delays: delays.to_vec(),
            wavelengths: omega.iter().map(|&w| omega_to_wavelength(w)).collect(),
            omega,
            intensity,
            provenance: String::new(),
        }
    }

    #[test]
    fn visibility_series_recovers_contrast() {
        let delays: Vec<f64> = (0..40).map(|k| k as f64 * 12.0 * FS).collect();
        let law = |d: f64| 0.6 * (-d / (200.0 * FS)).exp();
        let map = synthetic_map(&delays, law);
        let (_, window) = band();
        let series = visibility_vs_delay(&map, &window).unwrap();
        assert!(series.gaps.is_empty());
        assert_eq!(series.points.len(), 40);
        for p in &series.points {
            assert!((p.visibility - law(p.delay)).abs() < 0.01 * law(p.delay));
        }
        let x: Vec<f64> = series.points.iter().map(|p| p.delay).collect();
        let y: Vec<f64> = series.points.iter().map(|p| p.visibility).collect();
        let fit = fit_exponential(&x, &y).unwrap();
        assert!((fit.tau_d / (200.0 * FS) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fringeless_rows_become_gaps() {
        let delays = [0.0, 100.0 * FS, 1e-11];
        let map = synthetic_map(&delays, |d| if d > 1e-12 { 0.0 } else { 0.4 });
        let (_, window) = band();
        let series = visibility_vs_delay(&map, &window).unwrap();
        assert_eq!(series.points.len(), 2);
        assert_eq!(series.gaps, vec![1e-11]);

        let single = synthetic_map(&[5.0 * FS], |_| 0.2);
        assert_eq!(visibility_vs_delay(&single, &window).unwrap().points.len(), 1);

        let dead = synthetic_map(&[0.0, 1.0 * FS], |_| 0.0);
        assert_eq!(visibility_vs_delay(&dead, &window), Err(AnalysisError::AllRowsSkipped));
    }

    fn grid_12fs(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64 * 12.0 * FS).collect()
    }

    #[test]
    fn exact_exponential() {
        let x = grid_12fs(51);
        let y: Vec<f64> = x.iter().map(|t| (-t / (200.0 * FS)).exp()).collect();
        let fit = fit_exponential(&x, &y).unwrap();
        assert!((fit.tau_d / (200.0 * FS) - 1.0).abs() < 1e-3);
        assert!((fit.amplitude - 1.0).abs() < 1e-6);
        assert!(fit.offset.abs() < 1e-6);
    }

    #[test]
    fn constant_and_short_inputs_are_degenerate() {
        let x = grid_12fs(10);
        assert!(matches!(
            fit_exponential(&x, &[0.3; 10]),
            Err(AnalysisError::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_exponential(&x[..4], &[1.0, 0.5, 0.2, 0.1]),
            Err(AnalysisError::DegenerateInput(_))
        ));
        let mut bad = x.clone();
        bad[3] = bad[2];
        assert!(matches!(
            fit_exponential(&bad, &[1.0; 10]),
            Err(AnalysisError::DegenerateInput(_))
        ));
    }

    #[test]
    fn rising_exponential_fits() {
        let x = grid_12fs(60);
        let y: Vec<f64> = x.iter().map(|t| 2.0 - 1.5 * (-t / (150.0 * FS)).exp()).collect();
        let fit = fit_exponential(&x, &y).unwrap();
        assert!((fit.tau_d / (150.0 * FS) - 1.0).abs() < 1e-6);
        assert!((fit.amplitude + 1.5).abs() < 1e-6);
        assert!((fit.offset - 2.0).abs() < 1e-6);
    }

    #[test]
    fn seeded_noise_fixture() {
        let p95 = crate::validation::noisy_fit_percentile(100).unwrap();
        assert!(p95 < 0.02, "95th percentile error {p95}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn noise_free_recovery(log_tau in (10e-15f64).ln()..(10e-12f64).ln(), amp in 0.1f64..5.0, off in -1.0f64..1.0) {
            let tau = log_tau.exp();
            let x = linspace(0.0, 5.0 * tau, 60);
            let y: Vec<f64> = x.iter().map(|t| amp * (-t / tau).exp() + off).collect();
            let fit = fit_exponential(&x, &y).unwrap();
            prop_assert!((fit.tau_d / tau - 1.0).abs() < 1e-3);
        }

        #[test]
        fn kinematics_monotone(a in 1.0f64..1e6, b in 1.0f64..1e6) {
            prop_assume!(a < b);
            let ba = electron_velocity(a * EV).unwrap().beta;
            let bb = electron_velocity(b * EV).unwrap().beta;
            prop_assert!(ba > 0.0 && bb < 1.0 && ba < bb);
            let da = delay_from_distance(UM, a * EV).unwrap();
            let db = delay_from_distance(UM, b * EV).unwrap();
            prop_assert!(da > db);
        }

        #[test]
        fn delay_round_trip(l in 0.0f64..1e-3, kev in 0.1f64..300.0) {
            let ke = kev * 1e3 * EV;
            let tau = delay_from_distance(l, ke).unwrap();
            let back = distance_from_delay(tau, ke).unwrap();
            prop_assert!((back - l).abs() <= 1e-12 * l.max(f64::MIN_POSITIVE));
            let doubled = delay_from_distance(2.0 * l, ke).unwrap();
            prop_assert!((doubled - 2.0 * tau).abs() <= 1e-12 * tau.max(f64::MIN_POSITIVE));
        }
    }

    fn lorentzian(omega: &[f64], h: f64, c: f64, g: f64) -> Spectrum {
        Spectrum::intensity(
            omega.to_vec(),
            omega.iter().map(|&w| h / (1.0 + ((w - c) / g).powi(2))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_lorentzian() {
        let omega = linspace(2.0e15, 2.3e15, 601);
        let c = 2.1461e15;
        let g = 4e13;
        let fit = fit_lorentzian(
            &lorentzian(&omega, 3.5, c, g),
            &WavelengthWindow::new(800.0 * NM, 950.0 * NM).unwrap(),
        )
        .unwrap();
        assert!((fit.center / c - 1.0).abs() < 1e-6);
        assert!((fit.hwhm / g - 1.0).abs() < 1e-6);
        assert!((fit.height / 3.5 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_has_no_peak() {
        let omega = linspace(2.0e15, 2.3e15, 101);
        let flat = Spectrum::intensity(omega.clone(), vec![1.0; 101]).unwrap();
        let window = WavelengthWindow::new(800.0 * NM, 950.0 * NM).unwrap();
        assert!(matches!(
            fit_lorentzian(&flat, &window),
            Err(AnalysisError::NoPeak { .. })
        ));
    }

    #[test]
    fn kinematics_examples() {
        let b30 = electron_velocity(30e3 * EV).unwrap();
        assert!((b30.beta - 0.3284).abs() < 1e-4, "{}", b30.beta);
        let rest = electron_velocity(ELECTRON_REST_ENERGY).unwrap();
        assert!((rest.beta - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let ke = 100.0 * EV;
        let classical = (2.0 * ke * C_LIGHT * C_LIGHT / ELECTRON_REST_ENERGY).sqrt();
        assert!((electron_velocity(ke).unwrap().velocity / classical - 1.0).abs() < 1e-3);
        assert_eq!(electron_velocity(0.0), Err(AnalysisError::NonPositiveEnergy));

        assert_eq!(delay_from_distance(0.0, 30e3 * EV).unwrap(), 0.0);
        let tau = delay_from_distance(UM, 30e3 * EV).unwrap();
        assert!((tau / FS - 6.82).abs() < 0.01, "{}", tau / FS);
        let l = distance_from_delay(12.0 * FS, 30e3 * EV).unwrap();
        assert!((l / UM - 1.76).abs() < 0.01, "{}", l / UM);
        assert_eq!(
            delay_from_distance(-1.0, 30e3 * EV),
            Err(AnalysisError::NegativeDistance)
        );
    }
}
