//! Trapezoidal forward Fourier transform, `f̃(ν) = ∫ f(t) e^{−iν(t − t₀)} dt`.

use num_complex::Complex64;
use rayon::prelude::*;

// Phase recurrence is re-anchored with an exact cis() this often.
const REANCHOR: usize = 512;
const LANES: usize = 4;

/// Transforms samples `values` taken at `times` onto every frequency in `nu`.
///
/// `origin` is the time that maps to zero phase. Uniformly spaced samples use a
/// phase recurrence; anything else falls back to direct evaluation.
pub fn trapezoid<T>(times: &[f64], values: &[T], nu: &[f64], origin: f64) -> Vec<Complex64>
where
    T: Copy + Into<Complex64> + Sync,
{
    assert_eq!(times.len(), values.len(), "sample count mismatch");
    if times.len() < 2 {
        return vec![Complex64::new(0.0, 0.0); nu.len()];
    }
    let weights = trapezoid_weights(times);
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs());

    if !uniform {
        return nu
            .par_iter()
            .map(|&w| transform_direct(times, values, &weights, w, origin))
            .collect();
    }
    // Frequencies are processed LANES at a time so the independent phase
    // recurrences can overlap.
    let weighted: Vec<Complex64> = values.iter().zip(&weights).map(|(&v, &w)| v.into() * w).collect();
    nu.par_chunks(LANES)
        .flat_map_iter(|chunk| transform_uniform(times, &weighted, chunk, dt, origin))
        .collect()
}

fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for k in 0..n - 1 {
        let h = 0.5 * (times[k + 1] - times[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

fn transform_uniform(times: &[f64], weighted: &[Complex64], nu: &[f64], dt: f64, origin: f64) -> Vec<Complex64> {
    let lanes = nu.len();
    let mut step = [Complex64::new(1.0, 0.0); LANES];
    let mut phase = [Complex64::new(1.0, 0.0); LANES];
    let mut acc = [Complex64::new(0.0, 0.0); LANES];
    for j in 0..lanes {
        step[j] = Complex64::from_polar(1.0, -nu[j] * dt);
    }
    for (block, chunk) in weighted.chunks(REANCHOR).enumerate() {
        let t0 = times[block * REANCHOR] - origin;
        for j in 0..lanes {
            phase[j] = Complex64::from_polar(1.0, -nu[j] * t0);
        }
        for &v in chunk {
            for j in 0..LANES {
                acc[j] += v * phase[j];
                phase[j] *= step[j];
            }
        }
    }
    acc[..lanes].to_vec()
}

fn transform_direct<T>(times: &[f64], values: &[T], weights: &[f64], nu: f64, origin: f64) -> Complex64
where
    T: Copy + Into<Complex64>,
{
    times
        .iter()
        .zip(values)
        .zip(weights)
        .map(|((&t, &v), &w)| v.into() * Complex64::from_polar(w, -nu * (t - origin)))
        .sum()
}
