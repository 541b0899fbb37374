//! Run configuration: TOML input, preset expansion, defaults and digest.
//!
//! Interface units: wavelengths nm, times fs, rates s⁻¹, dipoles debye,
//! field V/m, chirp fs⁻². Every key is optional; the README lists them.

use std::path::Path;

use lindblad_cl::constants::{omega_grid_for_band, FS, NM};
use lindblad_cl::model::ModelError;
use lindblad_cl::preset::{preset_pulse, preset_raw_system};
use lindblad_cl::{sigma_from_intensity_fwhm, validate_system, ElectronWindow, EmitterSystem, PulseSpec, RawSystem};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const PRESET_NAME: &str = "paper8";

/// Default pump switch-off for `simulate` when no window is configured, fs.
pub const DEFAULT_OFF_FS: f64 = 600.0;
pub const DEFAULT_TRANSIT_WIDTH_FS: f64 = 1.0;
pub const DEFAULT_RECORD_EVERY: usize = 10;
pub const DEFAULT_BAND_NM: (f64, f64) = (560.0, 920.0);
pub const DEFAULT_POINTS: usize = 2001;
/// Default scan: 0 to 492 fs in 12 fs steps.
pub const DEFAULT_SCAN_FS: (f64, f64, f64) = (0.0, 492.0, 12.0);

/// Which subcommand the configuration is resolved for; only matters when the
/// `[window]` section is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Simulate,
    Scan,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub system: Option<SystemSection>,
    pub pulse: Option<PulseSection>,
    pub window: Option<WindowSection>,
    pub grid: Option<GridSection>,
    pub spectrum: Option<SpectrumSection>,
    pub detection: Option<DetectionSection>,
    pub scan: Option<ScanSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub wavelengths_nm: Option<Vec<f64>>,
    pub gamma: Option<Vec<Vec<f64>>>,
    pub g: Option<Vec<Vec<f64>>>,
    pub mu_debye: Option<Vec<Vec<f64>>>,
    pub n_emitters: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub enabled: Option<bool>,
    pub peak_field: Option<f64>,
    pub center_nm: Option<f64>,
    pub sigma_fs: Option<f64>,
    pub fwhm_fs: Option<f64>,
    pub chirp_per_fs2: Option<f64>,
    pub arrival_fs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub mode: Option<String>,
    pub tau02_fs: Option<f64>,
    pub width_fs: Option<f64>,
    pub on_fs: Option<f64>,
    pub off_fs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_start_fs: Option<f64>,
    pub t_end_fs: Option<f64>,
    pub step_fs: Option<f64>,
    pub record_every: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub lambda_min_nm: Option<f64>,
    pub lambda_max_nm: Option<f64>,
    pub points: Option<i64>,
}

/// `"auto"` or a non-negative number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Value(f64),
    Word(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    pub kappa: Option<Coefficient>,
    pub beta: Option<Coefficient>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub delays_fs: Option<Vec<f64>>,
    pub start_fs: Option<f64>,
    pub stop_fs: Option<f64>,
    pub step_fs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

/// Fully resolved configuration in interface units. Its canonical JSON form
/// is what the digest covers; the output directory is not part of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub system: SystemConfig,
    pub pulse: PulseConfig,
    pub window: WindowConfig,
    pub grid: GridConfig,
    pub spectrum: SpectrumConfig,
    pub detection: DetectionConfig,
    pub scan: ScanConfig,
    #[serde(skip)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    pub wavelengths_nm: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub mu_debye: Vec<Vec<f64>>,
    pub n_emitters: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseConfig {
    pub enabled: bool,
    pub peak_field: f64,
    pub center_nm: f64,
    pub sigma_fs: f64,
    pub chirp_per_fs2: f64,
    pub arrival_fs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum WindowConfig {
    Off,
    Continuous { on_fs: f64, off_fs: Option<f64> },
    Transit { tau02_fs: f64, width_fs: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub t_start_fs: Option<f64>,
    pub t_end_fs: Option<f64>,
    pub step_fs: Option<f64>,
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumConfig {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub points: usize,
}

/// `None` means calibrate automatically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionConfig {
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub delays_fs: Vec<f64>,
}

fn config_err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config_err(key, "must be > 0"))
    }
}

fn count(key: &str, v: i64, min: i64) -> Result<usize, CliError> {
    if v >= min {
        Ok(v as usize)
    } else {
        Err(config_err(key, format!("must be an integer >= {min}")))
    }
}

fn coefficient(key: &str, c: Option<Coefficient>) -> Result<Option<f64>, CliError> {
    match c {
        None => Ok(None),
        Some(Coefficient::Word(w)) if w == "auto" => Ok(None),
        Some(Coefficient::Word(w)) => Err(config_err(key, format!("expected \"auto\" or a number, found \"{w}\""))),
        Some(Coefficient::Value(v)) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
        Some(Coefficient::Value(_)) => Err(config_err(key, "must be finite and >= 0")),
    }
}

/// Dotted key of the TOML line containing byte offset `pos`.
fn key_at(text: &str, pos: usize) -> String {
    let pos = pos.min(text.len());
    let line_start = text[..pos].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("").trim();
    let section = |l: &str| {
        l.trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .trim()
            .to_string()
    };
    if line.starts_with('[') {
        return section(line);
    }
    let name = line.split('=').next().unwrap_or("").trim().to_string();
    let table = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(section);
    match table {
        Some(t) if !name.is_empty() => format!("{t}.{name}"),
        Some(t) => t,
        None if !name.is_empty() => name,
        None => "config".to_string(),
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map(|span| key_at(text, span.start))
                .unwrap_or_else(|| "config".to_string());
            config_err(&key, e.message().trim())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn resolve(self, purpose: Purpose) -> Result<RunConfig, CliError> {
        let preset = self.preset.clone().unwrap_or_else(|| PRESET_NAME.to_string());
        if preset != PRESET_NAME {
            return Err(config_err(
                "preset",
                format!("unknown preset \"{preset}\" (available: {PRESET_NAME})"),
            ));
        }
        let base = preset_raw_system();
        let sys = self.system.unwrap_or_default();
        let n_emitters = match sys.n_emitters {
            Some(n) => count("system.n_emitters", n, 1)? as u32,
            None => base.n_emitters,
        };
        let system = SystemConfig {
            wavelengths_nm: sys.wavelengths_nm.unwrap_or(base.wavelengths_nm),
            gamma: sys.gamma.unwrap_or(base.gamma),
            g: sys.g.unwrap_or(base.g),
            mu_debye: sys.mu_debye.unwrap_or(base.mu_debye),
            n_emitters,
        };

        let base_pulse = preset_pulse();
        let p = self.pulse.unwrap_or_default();
        let sigma_fs = match (p.sigma_fs, p.fwhm_fs) {
            (Some(_), Some(_)) => return Err(config_err("pulse.fwhm_fs", "give either sigma_fs or fwhm_fs, not both")),
            (Some(s), None) => positive("pulse.sigma_fs", s)?,
            (None, Some(f)) => sigma_from_intensity_fwhm(positive("pulse.fwhm_fs", f)?),
            (None, None) => base_pulse.duration / FS,
        };
        let peak_field = p.peak_field.unwrap_or(base_pulse.peak_field);
        if !(peak_field.is_finite() && peak_field >= 0.0) {
            return Err(config_err("pulse.peak_field", "must be finite and >= 0"));
        }
        let pulse = PulseConfig {
            enabled: p.enabled.unwrap_or(true),
            peak_field,
            center_nm: positive(
                "pulse.center_nm",
                p.center_nm.unwrap_or(base_pulse.center_wavelength / NM),
            )?,
            sigma_fs,
            chirp_per_fs2: finite("pulse.chirp_per_fs2", p.chirp_per_fs2.unwrap_or(0.0))?,
            arrival_fs: finite("pulse.arrival_fs", p.arrival_fs.unwrap_or(base_pulse.arrival / FS))?,
        };

        let window = match self.window {
            None => match purpose {
                Purpose::Simulate => WindowConfig::Continuous {
                    on_fs: 0.0,
                    off_fs: Some(DEFAULT_OFF_FS),
                },
                Purpose::Scan => WindowConfig::Transit {
                    tau02_fs: pulse.arrival_fs,
                    width_fs: DEFAULT_TRANSIT_WIDTH_FS,
                },
            },
            Some(w) => match w.mode.as_deref().unwrap_or("transit") {
                "off" => WindowConfig::Off,
                "transit" => WindowConfig::Transit {
                    tau02_fs: finite("window.tau02_fs", w.tau02_fs.unwrap_or(pulse.arrival_fs))?,
                    width_fs: positive("window.width_fs", w.width_fs.unwrap_or(DEFAULT_TRANSIT_WIDTH_FS))?,
                },
                "continuous" => {
                    let on_fs = finite("window.on_fs", w.on_fs.unwrap_or(0.0))?;
                    let off_fs = w.off_fs.map(|v| finite("window.off_fs", v)).transpose()?;
                    if off_fs.is_some_and(|off| off < on_fs) {
                        return Err(config_err("window.off_fs", "must be >= window.on_fs"));
                    }
                    WindowConfig::Continuous { on_fs, off_fs }
                }
                other => {
                    return Err(config_err(
                        "window.mode",
                        format!("expected \"transit\", \"continuous\" or \"off\", found \"{other}\""),
                    ))
                }
            },
        };

        let gs = self.grid.unwrap_or_default();
        let grid = GridConfig {
            t_start_fs: gs.t_start_fs.map(|v| finite("grid.t_start_fs", v)).transpose()?,
            t_end_fs: gs.t_end_fs.map(|v| finite("grid.t_end_fs", v)).transpose()?,
            step_fs: gs.step_fs.map(|v| positive("grid.step_fs", v)).transpose()?,
            record_every: match gs.record_every {
                Some(r) => count("grid.record_every", r, 1)?,
                None => DEFAULT_RECORD_EVERY,
            },
        };
        if let (Some(a), Some(b)) = (grid.t_start_fs, grid.t_end_fs) {
            if b <= a {
                return Err(config_err("grid.t_end_fs", "must be > grid.t_start_fs"));
            }
        }

        let ss = self.spectrum.unwrap_or_default();
        let spectrum = SpectrumConfig {
            lambda_min_nm: positive("spectrum.lambda_min_nm", ss.lambda_min_nm.unwrap_or(DEFAULT_BAND_NM.0))?,
            lambda_max_nm: positive("spectrum.lambda_max_nm", ss.lambda_max_nm.unwrap_or(DEFAULT_BAND_NM.1))?,
            points: match ss.points {
                Some(p) => count("spectrum.points", p, 2)?,
                None => DEFAULT_POINTS,
            },
        };
        if spectrum.lambda_max_nm <= spectrum.lambda_min_nm {
            return Err(config_err("spectrum.lambda_max_nm", "must be > spectrum.lambda_min_nm"));
        }

        let ds = self.detection.unwrap_or_default();
        let detection = DetectionConfig {
            kappa: coefficient("detection.kappa", ds.kappa)?,
            beta: coefficient("detection.beta", ds.beta)?,
        };

        let sc = self.scan.unwrap_or_default();
        let delays_fs = match sc.delays_fs {
            Some(list) => {
                if sc.start_fs.is_some() || sc.stop_fs.is_some() || sc.step_fs.is_some() {
                    return Err(config_err(
                        "scan.delays_fs",
                        "give either delays_fs or start_fs/stop_fs/step_fs",
                    ));
                }
                list
            }
            None => {
                let start = finite("scan.start_fs", sc.start_fs.unwrap_or(DEFAULT_SCAN_FS.0))?;
                let stop = finite("scan.stop_fs", sc.stop_fs.unwrap_or(DEFAULT_SCAN_FS.1))?;
                let step = positive("scan.step_fs", sc.step_fs.unwrap_or(DEFAULT_SCAN_FS.2))?;
                if stop < start {
                    return Err(config_err("scan.stop_fs", "must be >= scan.start_fs"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|k| start + k as f64 * step).collect()
            }
        };
        if delays_fs.is_empty() {
            return Err(config_err("scan.delays_fs", "must not be empty"));
        }
        for (i, d) in delays_fs.iter().enumerate() {
            if !(d.is_finite() && *d >= 0.0) {
                return Err(config_err(
                    &format!("scan.delays_fs[{i}]"),
                    "delays must be finite and >= 0",
                ));
            }
            if i > 0 && *d <= delays_fs[i - 1] {
                return Err(config_err(
                    &format!("scan.delays_fs[{i}]"),
                    "delays must be strictly increasing",
                ));
            }
        }

        let run = RunConfig {
            preset: Some(preset),
            system,
            pulse,
            window,
            grid,
            spectrum,
            detection,
            scan: ScanConfig { delays_fs },
            output_dir: self.output.and_then(|o| o.dir),
        };
        run.emitter_system()?;
        Ok(run)
    }
}

/// TOML key of the entry a model error refers to.
fn model_error_key(e: &ModelError) -> String {
    let rate = |kind: &lindblad_cl::model::RateKind, m: usize, n: usize| format!("system.{kind}[{}][{}]", m - 1, n - 1);
    match e {
        ModelError::TooFewLevels(_) => "system.wavelengths_nm".into(),
        ModelError::NonIncreasingEnergies { level, .. } => {
            format!("system.wavelengths_nm[{}]", level.saturating_sub(2))
        }
        ModelError::NegativeRate { kind, m, n, .. }
        | ModelError::RateOutOfRange { kind, m, n, .. }
        | ModelError::LowerTriangularRate { kind, m, n, .. } => rate(kind, *m, *n),
        ModelError::AsymmetricDipole { m, n } => format!("system.mu_debye[{}][{}]", m - 1, n - 1),
        ModelError::NonZeroDipoleDiagonal { k } => format!("system.mu_debye[{}][{}]", k - 1, k - 1),
        ModelError::NonFinite(what) | ModelError::DimensionMismatch { what, .. } => match *what {
            "mu" => "system.mu_debye".into(),
            w => format!("system.{w}"),
        },
        ModelError::InvalidEmitterCount => "system.n_emitters".into(),
        ModelError::InvalidDensityMatrix(_) => "system".into(),
    }
}

impl RunConfig {
    /// Configuration for the named preset with every other key defaulted.
    pub fn preset(name: &str, purpose: Purpose) -> Result<Self, CliError> {
        ConfigFile {
            preset: Some(name.to_string()),
            ..ConfigFile::default()
        }
        .resolve(purpose)
    }

    pub fn raw_system(&self) -> RawSystem {
        RawSystem {
            wavelengths_nm: self.system.wavelengths_nm.clone(),
            gamma: self.system.gamma.clone(),
            g: self.system.g.clone(),
            mu_debye: self.system.mu_debye.clone(),
            n_emitters: self.system.n_emitters,
        }
    }

    pub fn emitter_system(&self) -> Result<EmitterSystem, CliError> {
        validate_system(&self.raw_system()).map_err(|e| config_err(&model_error_key(&e), e.to_string()))
    }

    pub fn pulse_spec(&self) -> PulseSpec {
        PulseSpec {
            peak_field: self.pulse.peak_field,
            center_wavelength: self.pulse.center_nm * NM,
            duration: self.pulse.sigma_fs * FS,
            chirp: self.pulse.chirp_per_fs2 / (FS * FS),
            arrival: self.pulse.arrival_fs * FS,
            enabled: self.pulse.enabled,
        }
    }

    pub fn electron_window(&self) -> ElectronWindow {
        match self.window {
            WindowConfig::Off => ElectronWindow::off(),
            WindowConfig::Continuous { on_fs, off_fs } => ElectronWindow::Continuous {
                on_from: on_fs * FS,
                off_at: off_fs.map(|t| t * FS),
            },
            WindowConfig::Transit { tau02_fs, width_fs } => ElectronWindow::Transit {
                tau02: tau02_fs * FS,
                width: width_fs * FS,
            },
        }
    }

    /// Frequency grid, ascending in ω.
    pub fn omega_grid(&self) -> Vec<f64> {
        omega_grid_for_band(
            self.spectrum.lambda_min_nm * NM,
            self.spectrum.lambda_max_nm * NM,
            self.spectrum.points,
        )
    }

    pub fn delays(&self) -> Vec<f64> {
        self.scan.delays_fs.iter().map(|d| d * FS).collect()
    }

    /// Hex SHA-256 of the canonical JSON form (keys sorted, no whitespace).
    pub fn digest(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_preset() {
        let a = ConfigFile::parse("").unwrap().resolve(Purpose::Simulate).unwrap();
        let b = RunConfig::preset("paper8", Purpose::Simulate).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.system.wavelengths_nm.len(), 8);
        assert_eq!(a.pulse_spec(), preset_pulse());
    }

    #[test]
    fn digest_ignores_output_dir_and_layout() {
        let a = ConfigFile::parse("[output]\ndir = \"a\"\n[pulse]\nsigma_fs = 5.0\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap();
        let b = ConfigFile::parse("[pulse]\n  sigma_fs   = 5\n[output]\ndir = \"b\"\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = ConfigFile::parse("[pulse]\nsigma_fs = 6\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap();
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn negative_rate_names_its_key() {
        let text = "[system]\nwavelengths_nm = [878.0]\ngamma = [[0.0, -4e13], [0.0, 0.0]]\ng = [[0.0, 5e8], [0.0, 0.0]]\nmu_debye = [[0.0, 35.0], [35.0, 0.0]]\n";
        let err = ConfigFile::parse(text).unwrap().resolve(Purpose::Simulate).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("system.gamma[0][1]"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = ConfigFile::parse("[pulse]\nsigma = 5\n").unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn type_error_names_its_key() {
        let err = ConfigFile::parse("[grid]\nstep_fs = 0.01\nrecord_every = \"ten\"\n").unwrap_err();
        assert!(err.to_string().contains("grid.record_every"), "{err}");
    }

    #[test]
    fn fwhm_conversion() {
        let c = ConfigFile::parse("[pulse]\nfwhm_fs = 10.0\n")
            .unwrap()
            .resolve(Purpose::Simulate)
            .unwrap();
        assert!((c.pulse.sigma_fs - 10.0 / (2.0 * std::f64::consts::LN_2.sqrt())).abs() < 1e-12);
        let err = ConfigFile::parse("[pulse]\nfwhm_fs = 10.0\nsigma_fs = 5.0\n")
            .unwrap()
            .resolve(Purpose::Simulate)
            .unwrap_err();
        assert!(err.to_string().contains("pulse.fwhm_fs"));
    }

    #[test]
    fn detection_coefficients() {
        let c = ConfigFile::parse("[detection]\nkappa = \"auto\"\nbeta = 0.5\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap();
        assert_eq!(
            c.detection,
            DetectionConfig {
                kappa: None,
                beta: Some(0.5)
            }
        );
        let err = ConfigFile::parse("[detection]\nkappa = \"big\"\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap_err();
        assert!(err.to_string().contains("detection.kappa"));
    }

    #[test]
    fn scan_delays() {
        let c = RunConfig::preset("paper8", Purpose::Scan).unwrap();
        assert_eq!(c.scan.delays_fs.len(), 42);
        assert_eq!(c.scan.delays_fs[41], 492.0);
        let err = ConfigFile::parse("[scan]\ndelays_fs = [0.0, 12.0, 12.0]\n")
            .unwrap()
            .resolve(Purpose::Scan)
            .unwrap_err();
        assert!(err.to_string().contains("scan.delays_fs[2]"));
    }

    #[test]
    fn window_defaults_follow_purpose() {
        let sim = RunConfig::preset("paper8", Purpose::Simulate).unwrap();
        assert_eq!(
            sim.window,
            WindowConfig::Continuous {
                on_fs: 0.0,
                off_fs: Some(600.0)
            }
        );
        let scan = RunConfig::preset("paper8", Purpose::Scan).unwrap();
        assert_eq!(
            scan.window,
            WindowConfig::Transit {
                tau02_fs: 50.0,
                width_fs: 1.0
            }
        );
    }

    #[test]
    fn unknown_preset() {
        let err = RunConfig::preset("paper9", Purpose::Scan).unwrap_err();
        assert!(err.to_string().contains("preset"));
    }
}
