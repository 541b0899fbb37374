//! Emitter model and the master-equation right-hand side.
//!
//! Level `k` (0-based internally, `k + 1` in error messages and docs) has
//! energy `ħ ω_k` with `ω_0 = 0`. Rate matrices are strictly upper triangular:
//! `gamma[(m, n)]` (m < n) is the radiative rate `|n⟩ → |m⟩`, `g[(m, n)]` the
//! electron excitation rate `|m⟩ → |n⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{wavelength_to_omega, DEBYE, HBAR, NM};

pub type CMatrix = DMatrix<Complex64>;

/// Rates above this are rejected as probable unit mistakes (s⁻¹).
pub const MAX_RATE: f64 = 1e16;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const POPULATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    Gamma,
    G,
}

impl std::fmt::Display for RateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateKind::Gamma => write!(f, "gamma"),
            RateKind::G => write!(f, "g"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("TooFewLevels: {0} level(s), at least 2 required")]
    TooFewLevels(usize),
    #[error("NonIncreasingEnergies: level {level} is not above level {below}")]
    NonIncreasingEnergies { level: usize, below: usize },
    #[error("NegativeRate: {kind}_{m}{n} = {value}")]
    NegativeRate {
        kind: RateKind,
        m: usize,
        n: usize,
        value: f64,
    },
    #[error("RateOutOfRange: {kind}_{m}{n} = {value} exceeds {MAX_RATE:e} s^-1")]
    RateOutOfRange {
        kind: RateKind,
        m: usize,
        n: usize,
        value: f64,
    },
    #[error("LowerTriangularRate: {kind}_{m}{n} = {value}; only m < n entries are allowed")]
    LowerTriangularRate {
        kind: RateKind,
        m: usize,
        n: usize,
        value: f64,
    },
    #[error("AsymmetricDipole: mu_{m}{n} != mu_{n}{m}")]
    AsymmetricDipole { m: usize, n: usize },
    #[error("NonZeroDipoleDiagonal: mu_{k}{k} must be 0")]
    NonZeroDipoleDiagonal { k: usize },
    #[error("NonFinite: {0} contains a non-finite value")]
    NonFinite(&'static str),
    #[error("InvalidEmitterCount: n_emitters must be >= 1")]
    InvalidEmitterCount,
    #[error("DimensionMismatch: expected {expected}, found {found} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("InvalidDensityMatrix: {0}")]
    InvalidDensityMatrix(String),
}

/// Unvalidated system parameters in interface units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSystem {
    /// Transition wavelengths from the ground state to levels 2..=N, nm.
    /// Must be strictly decreasing (energies strictly increasing).
    pub wavelengths_nm: Vec<f64>,
    /// N×N radiative rates, s⁻¹; only the strict upper triangle may be nonzero.
    pub gamma: Vec<Vec<f64>>,
    /// N×N excitation rates, s⁻¹; only the strict upper triangle may be nonzero.
    pub g: Vec<Vec<f64>>,
    /// N×N symmetric dipole matrix in debye with zero diagonal.
    pub mu_debye: Vec<Vec<f64>>,
    pub n_emitters: u32,
}

/// A validated N-level emitter in SI units. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterSystem {
    omega: Vec<f64>,
    gamma: DMatrix<f64>,
    g: DMatrix<f64>,
    mu: DMatrix<f64>,
    n_emitters: u32,
    // μ/ħ, rad s⁻¹ per V/m.
    mu_over_hbar: DMatrix<f64>,
    // Σ_{m<k} γ_mk: radiative loss rate of level k.
    radiative_loss: Vec<f64>,
    // Σ_{n>k} g_kn: excitation loss rate of level k at unit window factor.
    pump_loss: Vec<f64>,
    // (m, n, rate) with rate > 0.
    decay_channels: Vec<(usize, usize, f64)>,
    pump_channels: Vec<(usize, usize, f64)>,
}

impl EmitterSystem {
    pub fn n_levels(&self) -> usize {
        self.omega.len()
    }

    /// Level angular frequencies, rad/s, `omega()[0] == 0`.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Dipole matrix, C·m.
    pub fn mu(&self) -> &DMatrix<f64> {
        &self.mu
    }

    pub fn n_emitters(&self) -> u32 {
        self.n_emitters
    }

    /// Largest level frequency, rad/s.
    pub fn omega_max(&self) -> f64 {
        self.omega.iter().cloned().fold(0.0, f64::max)
    }

    /// Copy of the system with a different emitter count.
    pub fn with_n_emitters(&self, n_emitters: u32) -> Result<Self, ModelError> {
        if n_emitters == 0 {
            return Err(ModelError::InvalidEmitterCount);
        }
        Ok(Self {
            n_emitters,
            ..self.clone()
        })
    }

    /// Copy of the system with every excitation rate multiplied by `factor`.
    pub fn with_scaled_pump(&self, factor: f64) -> Result<Self, ModelError> {
        build_system(
            self.omega.clone(),
            self.gamma.clone(),
            &self.g * factor,
            self.mu.clone(),
            self.n_emitters,
        )
    }

    /// Total loss rate of level `k` with the electron window factor `g_scale`.
    fn loss_rate(&self, k: usize, g_scale: f64) -> f64 {
        self.radiative_loss[k] + g_scale * self.pump_loss[k]
    }

    /// Writes dρ/dt into `out` without any shape checks.
    pub(crate) fn rhs_into(&self, rho: &CMatrix, field: f64, g_scale: f64, out: &mut CMatrix) {
        let n = self.n_levels();
        let minus_i = Complex64::new(0.0, -1.0);
        let loss: Vec<f64> = (0..n).map(|k| self.loss_rate(k, g_scale)).collect();

        for b in 0..n {
            for a in 0..n {
                let rho_ab = rho[(a, b)];
                let free = Complex64::new(0.0, -(self.omega[a] - self.omega[b])) * rho_ab;
                let damping = -0.5 * (loss[a] + loss[b]) * rho_ab;
                out[(a, b)] = free + damping;
            }
        }

        if field != 0.0 {
            // −(i/ħ)[−μE, ρ] = i E [μ/ħ, ρ]
            for b in 0..n {
                for a in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += self.mu_over_hbar[(a, k)] * rho[(k, b)] - rho[(a, k)] * self.mu_over_hbar[(k, b)];
                    }
                    out[(a, b)] -= minus_i * field * acc;
                }
            }
        }

        for &(m, k, rate) in &self.decay_channels {
            out[(m, m)] += rate * rho[(k, k)];
        }
        if g_scale != 0.0 {
            for &(m, k, rate) in &self.pump_channels {
                out[(k, k)] += g_scale * rate * rho[(m, m)];
            }
        }
    }
}

/// Checks raw parameters and converts them to SI.
pub fn validate_system(raw: &RawSystem) -> Result<EmitterSystem, ModelError> {
    let n = raw.wavelengths_nm.len() + 1;
    if n < 2 {
        return Err(ModelError::TooFewLevels(n));
    }
    if raw.wavelengths_nm.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(ModelError::NonFinite("wavelengths_nm"));
    }
    let mut omega = Vec::with_capacity(n);
    omega.push(0.0);
    omega.extend(raw.wavelengths_nm.iter().map(|&w| wavelength_to_omega(w * NM)));

    let gamma = square_matrix(&raw.gamma, n, "gamma")?;
    let g = square_matrix(&raw.g, n, "g")?;
    let mu = square_matrix(&raw.mu_debye, n, "mu")? * DEBYE;
    build_system(omega, gamma, g, mu, raw.n_emitters)
}

fn square_matrix(rows: &[Vec<f64>], n: usize, what: &'static str) -> Result<DMatrix<f64>, ModelError> {
    if rows.len() != n {
        return Err(ModelError::DimensionMismatch {
            what,
            expected: n,
            found: rows.len(),
        });
    }
    for row in rows {
        if row.len() != n {
            return Err(ModelError::DimensionMismatch {
                what,
                expected: n,
                found: row.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn check_rates(rates: &DMatrix<f64>, kind: RateKind) -> Result<(), ModelError> {
    let n = rates.nrows();
    for m in 0..n {
        for k in 0..n {
            let value = rates[(m, k)];
            if !value.is_finite() {
                return Err(ModelError::NonFinite(match kind {
                    RateKind::Gamma => "gamma",
                    RateKind::G => "g",
                }));
            }
            if m >= k {
                if value != 0.0 {
                    return Err(ModelError::LowerTriangularRate {
                        kind,
                        m: m + 1,
                        n: k + 1,
                        value,
                    });
                }
                continue;
            }
            if value < 0.0 {
                return Err(ModelError::NegativeRate {
                    kind,
                    m: m + 1,
                    n: k + 1,
                    value,
                });
            }
            if value > MAX_RATE {
                return Err(ModelError::RateOutOfRange {
                    kind,
                    m: m + 1,
                    n: k + 1,
                    value,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn build_system(
    omega: Vec<f64>,
    gamma: DMatrix<f64>,
    g: DMatrix<f64>,
    mu: DMatrix<f64>,
    n_emitters: u32,
) -> Result<EmitterSystem, ModelError> {
    let n = omega.len();
    if n < 2 {
        return Err(ModelError::TooFewLevels(n));
    }
    if omega[0] != 0.0 {
        return Err(ModelError::NonIncreasingEnergies { level: 1, below: 0 });
    }
    for k in 1..n {
        if !(omega[k] > omega[k - 1]) {
            return Err(ModelError::NonIncreasingEnergies { level: k + 1, below: k });
        }
    }
    check_rates(&gamma, RateKind::Gamma)?;
    check_rates(&g, RateKind::G)?;
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite("mu"));
    }
    for a in 0..n {
        if mu[(a, a)] != 0.0 {
            return Err(ModelError::NonZeroDipoleDiagonal { k: a + 1 });
        }
        for b in (a + 1)..n {
            if mu[(a, b)] != mu[(b, a)] {
                return Err(ModelError::AsymmetricDipole { m: a + 1, n: b + 1 });
            }
        }
    }
    if n_emitters == 0 {
        return Err(ModelError::InvalidEmitterCount);
    }

    let mut radiative_loss = vec![0.0; n];
    let mut pump_loss = vec![0.0; n];
    let mut decay_channels = Vec::new();
    let mut pump_channels = Vec::new();
    for m in 0..n {
        for k in (m + 1)..n {
            if gamma[(m, k)] > 0.0 {
                radiative_loss[k] += gamma[(m, k)];
                decay_channels.push((m, k, gamma[(m, k)]));
            }
            if g[(m, k)] > 0.0 {
                pump_loss[m] += g[(m, k)];
                pump_channels.push((m, k, g[(m, k)]));
            }
        }
    }

    Ok(EmitterSystem {
        mu_over_hbar: &mu / HBAR,
        omega,
        gamma,
        g,
        mu,
        n_emitters,
        radiative_loss,
        pump_loss,
        decay_channels,
        pump_channels,
    })
}

/// A Hermitian, unit-trace N×N density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), trace (1e-9) and populations (≥ −1e-9).
    pub fn new(rho: CMatrix) -> Result<Self, ModelError> {
        if !rho.is_square() {
            return Err(ModelError::InvalidDensityMatrix("not square".into()));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::InvalidDensityMatrix("non-finite entry".into()));
        }
        let dm = Self(rho);
        let herm = dm.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(ModelError::InvalidDensityMatrix(format!(
                "not Hermitian (max |rho - rho^dagger| = {herm:e})"
            )));
        }
        let drift = dm.trace_error();
        if drift > TRACE_TOL {
            return Err(ModelError::InvalidDensityMatrix(format!(
                "trace differs from 1 by {drift:e}"
            )));
        }
        if dm.min_population() < -POPULATION_TOL {
            return Err(ModelError::InvalidDensityMatrix("negative population".into()));
        }
        Ok(dm)
    }

    /// All population in level `k` (0-based).
    pub fn pure_level(n: usize, k: usize) -> Self {
        let mut rho = CMatrix::zeros(n, n);
        rho[(k, k)] = Complex64::new(1.0, 0.0);
        Self(rho)
    }

    pub fn ground(n: usize) -> Self {
        Self::pure_level(n, 0)
    }

    /// Wraps a matrix without validation; callers own the invariants.
    pub(crate) fn from_matrix_unchecked(rho: CMatrix) -> Self {
        Self(rho)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.0[(a, b)] - self.0[(b, a)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_population(&self) -> f64 {
        (0..self.dim()).map(|k| self.0[(k, k)].re).fold(f64::INFINITY, f64::min)
    }

    /// Largest off-diagonal modulus.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    worst = worst.max(self.0[(a, b)].norm());
                }
            }
        }
        worst
    }

    /// tr{μ ρ} for a real symmetric μ; real by construction.
    pub fn dipole_expectation(&self, mu: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += mu[(a, b)] * self.0[(b, a)].re;
            }
        }
        acc
    }
}

/// Replaces `rho` by (ρ + ρ†)/2 in place; diagonal becomes exactly real.
pub(crate) fn hermitize(rho: &mut CMatrix) {
    let n = rho.nrows();
    for a in 0..n {
        rho[(a, a)].im = 0.0;
        for b in (a + 1)..n {
            let avg = 0.5 * (rho[(a, b)] + rho[(b, a)].conj());
            rho[(a, b)] = avg;
            rho[(b, a)] = avg.conj();
        }
    }
}

/// dρ/dt = −(i/ħ)[H(t), ρ] + D_rad ρ + g_scale·D_ex ρ with H(t) = Σ ħω_n|n⟩⟨n| − μ E(t).
pub fn lindblad_rhs(sys: &EmitterSystem, rho: &DensityMatrix, field: f64, g_scale: f64) -> Result<CMatrix, ModelError> {
    let n = sys.n_levels();
    if rho.dim() != n {
        return Err(ModelError::DimensionMismatch {
            what: "density matrix",
            expected: n,
            found: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(n, n);
    sys.rhs_into(rho.matrix(), field, g_scale, &mut out);
    Ok(out)
}
