//! Plain-text CSV files for spectra, delay maps and series.
//!
//! Every file starts with `#` header lines (artifact version, config digest,
//! kind, units). Numbers use 17 significant digits so they round-trip.
//! Wavelength columns are λ = 2πc/ω of the frequency grid point; intensities
//! are per grid point, with no Jacobian reweighting.

use std::fmt::Write as _;
use std::path::Path;

use lindblad_cl::constants::{omega_to_wavelength, wavelength_to_omega, FS, NM};
use lindblad_cl::{DelayMap, Spectrum, SpectrumKind};
use num_complex::Complex64;

use crate::CliError;

pub const VERSION: &str = concat!("lindblad-cl ", env!("CARGO_PKG_VERSION"));

/// Formats with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub digest: String,
    pub kind: String,
    pub units: String,
}

impl Header {
    pub fn new(digest: &str, kind: &str, units: &str) -> Self {
        Self {
            digest: digest.to_string(),
            kind: kind.to_string(),
            units: units.to_string(),
        }
    }

    fn write(&self, out: &mut String) {
        let _ = writeln!(out, "# version: {VERSION}");
        let _ = writeln!(out, "# config_digest: {}", self.digest);
        let _ = writeln!(out, "# kind: {}", self.kind);
        let _ = writeln!(out, "# units: {}", self.units);
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Usage(format!("{}:{}: {}", path.display(), line, message.into()))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Header fields (`# key: value`) and the remaining non-comment lines.
struct Parsed<'a> {
    meta: Vec<(String, String)>,
    lines: Vec<(usize, &'a str)>,
}

impl Parsed<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn parse(text: &str) -> Parsed<'_> {
    let mut meta = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else if !t.is_empty() {
            lines.push((i + 1, t));
        }
    }
    Parsed { meta, lines }
}

fn parse_numbers(path: &Path, line: usize, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| format_err(path, line, format!("not a number: \"{}\"", f.trim())))
        })
        .collect()
}

pub const SPECTRUM_COLUMNS: &str = "omega_rad_s,lambda_nm,value_re,value_im";

pub fn spectrum_csv(header: &Header, spec: &Spectrum) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(SPECTRUM_COLUMNS);
    out.push('\n');
    for (w, z) in spec.omega().iter().zip(spec.values()) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(*w),
            num(omega_to_wavelength(*w) / NM),
            num(z.re),
            num(z.im)
        );
    }
    out
}

pub fn write_spectrum(path: &Path, header: &Header, spec: &Spectrum) -> Result<(), CliError> {
    write_file(path, &spectrum_csv(header, spec))
}

pub fn read_spectrum(path: &Path) -> Result<Spectrum, CliError> {
    let text = read_file(path)?;
    let parsed = parse(&text);
    let kind = match parsed.get("kind") {
        Some("complex_amplitude") => SpectrumKind::ComplexAmplitude,
        _ => SpectrumKind::Intensity,
    };
    let mut omega = Vec::new();
    let mut values = Vec::new();
    for &(n, line) in &parsed.lines {
        if line.starts_with("omega_rad_s") {
            continue;
        }
        let v = parse_numbers(path, n, line)?;
        if v.len() != 4 {
            return Err(format_err(path, n, format!("expected 4 columns ({SPECTRUM_COLUMNS})")));
        }
        omega.push(v[0]);
        values.push(Complex64::new(v[2], v[3]));
    }
    Spectrum::new(omega, values, kind).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// `# delays_fs:` header, a wavelength row, then one intensity row per delay.
pub fn delay_map_csv(header: &Header, map: &DelayMap) -> String {
    let mut out = String::new();
    header.write(&mut out);
    let delays: Vec<String> = map.delays.iter().map(|d| num(d / FS)).collect();
    let _ = writeln!(out, "# delays_fs: {}", delays.join(","));
    let wavelengths: Vec<String> = map.wavelengths.iter().map(|l| num(l / NM)).collect();
    out.push_str(&wavelengths.join(","));
    out.push('\n');
    for row in &map.intensity {
        let values: Vec<String> = row.iter().map(|v| num(*v)).collect();
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out
}

pub fn write_delay_map(path: &Path, header: &Header, map: &DelayMap) -> Result<(), CliError> {
    write_file(path, &delay_map_csv(header, map))
}

pub fn read_delay_map(path: &Path) -> Result<DelayMap, CliError> {
    let text = read_file(path)?;
    let parsed = parse(&text);
    let delays_fs = parsed
        .get("delays_fs")
        .ok_or_else(|| format_err(path, 0, "missing \"# delays_fs:\" header"))?;
    let delays: Vec<f64> = parse_numbers(path, 0, delays_fs)?.into_iter().map(|d| d * FS).collect();
    let mut rows = parsed.lines.iter();
    let &(n, first) = rows
        .next()
        .ok_or_else(|| format_err(path, 0, "missing wavelength row"))?;
    let wavelengths: Vec<f64> = parse_numbers(path, n, first)?.into_iter().map(|l| l * NM).collect();
    let mut intensity = Vec::new();
    for &(n, line) in rows {
        let row = parse_numbers(path, n, line)?;
        if row.len() != wavelengths.len() {
            return Err(format_err(path, n, format!("expected {} columns", wavelengths.len())));
        }
        intensity.push(row);
    }
    if intensity.len() != delays.len() {
        return Err(format_err(
            path,
            0,
            format!("{} delays but {} intensity rows", delays.len(), intensity.len()),
        ));
    }
    Ok(DelayMap {
        omega: wavelengths.iter().map(|&l| wavelength_to_omega(l)).collect(),
        delays,
        wavelengths,
        intensity,
        provenance: parsed.get("config_digest").unwrap_or("").to_string(),
    })
}

/// Generic table with a header row of column names.
pub fn table_csv(header: &Header, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let values: Vec<String> = row.iter().map(|v| num(*v)).collect();
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out
}

/// Two numeric columns; a spectrum file yields (ω, Re value).
pub fn read_series(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = read_file(path)?;
    let parsed = parse(&text);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(n, line) in &parsed.lines {
        if line.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        let v = parse_numbers(path, n, line)?;
        match v.len() {
            2 => {
                x.push(v[0]);
                y.push(v[1]);
            }
            4 => {
                x.push(v[0]);
                y.push(v[2]);
            }
            k => return Err(format_err(path, n, format!("expected 2 or 4 columns, found {k}"))),
        }
    }
    Ok((x, y))
}
