//! On-disk formats: the parameter file (JSON), two-column spectrum CSV,
//! and the JSON artifacts exchanged between pipeline stages. Field names
//! carry their units.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsa::DispersionParams;
use crate::spectra::MaskInterval;
use crate::spectrum::{AxisUnit, Spectrum};
use crate::units::Measured;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    CsvParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl FormatError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn schema(path: &Path, message: impl Into<String>) -> Self {
        FormatError::Schema {
            path: path.display().to_string(),
            message: message.into(),
        }
    }
}

/// Waveguide geometry as stored in a parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    pub length_um: f64,
    #[serde(default)]
    pub length_sigma_um: f64,
    pub gamma: f64,
}

impl WaveguideParams {
    pub fn length(&self) -> Measured {
        Measured::new(self.length_um, self.length_sigma_um)
    }
}

/// Dispersion block: either explicit coefficients or the κ_i-normalized
/// ratios produced by the Monte Carlo stage together with |κ_i| from the
/// fringe experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DispersionInput {
    Explicit {
        kappa_s_ps_per_um: f64,
        kappa_i_ps_per_um: f64,
        #[serde(default)]
        kappa_sigma_ps_per_um: f64,
        #[serde(default)]
        ks_ps2_per_um: f64,
        #[serde(default)]
        ki_ps2_per_um: f64,
        #[serde(default)]
        kp_ps2_per_um: f64,
    },
    Normalized {
        kappa_ratio: f64,
        ks_norm_ps: f64,
        ki_norm_ps: f64,
        kappa_i_abs_ps_per_um: f64,
        #[serde(default)]
        kappa_i_abs_sigma_ps_per_um: f64,
        #[serde(default)]
        kp_norm_ps: f64,
    },
}

impl DispersionInput {
    /// Physical coefficients plus |κ_i| with its uncertainty.
    pub fn to_physical(&self) -> (DispersionParams, Measured) {
        match *self {
            DispersionInput::Explicit {
                kappa_s_ps_per_um,
                kappa_i_ps_per_um,
                kappa_sigma_ps_per_um,
                ks_ps2_per_um,
                ki_ps2_per_um,
                kp_ps2_per_um,
            } => (
                DispersionParams {
                    kappa_s: kappa_s_ps_per_um,
                    kappa_i: kappa_i_ps_per_um,
                    k2_s: ks_ps2_per_um,
                    k2_i: ki_ps2_per_um,
                    k2_p: kp_ps2_per_um,
                },
                Measured::new(kappa_i_ps_per_um.abs(), kappa_sigma_ps_per_um),
            ),
            DispersionInput::Normalized {
                kappa_ratio,
                ks_norm_ps,
                ki_norm_ps,
                kappa_i_abs_ps_per_um,
                kappa_i_abs_sigma_ps_per_um,
                kp_norm_ps,
            } => {
                let abs = kappa_i_abs_ps_per_um;
                (
                    DispersionParams {
                        kappa_s: -kappa_ratio * abs,
                        kappa_i: -abs,
                        k2_s: ks_norm_ps * abs,
                        k2_i: ki_norm_ps * abs,
                        k2_p: kp_norm_ps * abs,
                    },
                    Measured::new(abs, kappa_i_abs_sigma_ps_per_um),
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpParams {
    pub wavelength_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_p_rad_per_ps: Option<f64>,
    #[serde(default)]
    pub cw: bool,
}

/// Top-level parameter file tying one waveguide sample together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    pub waveguide: WaveguideParams,
    pub dispersion: DispersionInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpParams>,
    pub degeneracy_nm: f64,
    #[serde(default)]
    pub masks_nm: Vec<MaskInterval>,
}

impl ParamFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
        let file: ParamFile = serde_json::from_str(&text).map_err(|e| FormatError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        file.validate(path)?;
        Ok(file)
    }

    pub fn validate(&self, path: &Path) -> Result<(), FormatError> {
        if !(self.waveguide.length_um > 0.0) {
            return Err(FormatError::schema(path, "waveguide.length_um must be positive"));
        }
        if self.waveguide.length_sigma_um < 0.0 {
            return Err(FormatError::schema(path, "waveguide.length_sigma_um must be non-negative"));
        }
        if !(self.waveguide.gamma > 0.0) {
            return Err(FormatError::schema(path, "waveguide.gamma must be positive"));
        }
        if !(self.degeneracy_nm > 0.0) {
            return Err(FormatError::schema(path, "degeneracy_nm must be positive"));
        }
        let (params, kappa_abs) = self.dispersion.to_physical();
        if !params.kappa_s.is_finite()
            || !params.kappa_i.is_finite()
            || !params.k2_s.is_finite()
            || !params.k2_i.is_finite()
            || !params.k2_p.is_finite()
        {
            return Err(FormatError::schema(path, "dispersion coefficients must be finite"));
        }
        if params.kappa_i == 0.0 {
            return Err(FormatError::schema(
                path,
                "kappa_i must be nonzero (it is the normalization reference)",
            ));
        }
        if kappa_abs.sigma < 0.0 {
            return Err(FormatError::schema(path, "kappa uncertainty must be non-negative"));
        }
        if let Some(pump) = &self.pump {
            if !(pump.wavelength_nm > 0.0) {
                return Err(FormatError::schema(path, "pump.wavelength_nm must be positive"));
            }
            match (pump.cw, pump.sigma_p_rad_per_ps) {
                (false, Some(s)) if s > 0.0 => {}
                (false, _) => {
                    return Err(FormatError::schema(
                        path,
                        "pump needs sigma_p_rad_per_ps > 0 or \"cw\": true",
                    ))
                }
                (true, _) => {}
            }
        }
        let mut sorted = self.masks_nm.clone();
        sorted.sort_by(|a, b| a.lo_nm.partial_cmp(&b.lo_nm).unwrap());
        for w in sorted.windows(2) {
            let hi = w[0].hi_nm.unwrap_or(f64::INFINITY);
            if hi >= w[1].lo_nm {
                return Err(FormatError::schema(path, "masks_nm intervals must be disjoint"));
            }
        }
        for m in &self.masks_nm {
            if let Some(hi) = m.hi_nm {
                if hi <= m.lo_nm {
                    return Err(FormatError::schema(path, "mask interval must have lo_nm < hi_nm"));
                }
            }
        }
        Ok(())
    }
}

const WAVELENGTH_HEADER: &str = "wavelength_nm";
const FREQUENCY_HEADER: &str = "angular_frequency_rad_per_ps";

/// Read a two-column spectrum CSV (`wavelength_nm` or
/// `angular_frequency_rad_per_ps`, then `intensity`). `#` lines are
/// comments. A strictly decreasing axis is accepted and flipped; NaN and
/// infinities are rejected with the offending line number.
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let parse_err = |line: usize, message: String| FormatError::CsvParse {
        path: path.display().to_string(),
        line,
        message,
    };

    let mut unit: Option<AxisUnit> = None;
    let mut axis: Vec<f64> = Vec::new();
    let mut intensity: Vec<f64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if unit.is_none() {
            let mut cols = line.split(',').map(str::trim);
            let axis_col = cols.next().unwrap_or("");
            let intensity_col = cols.next().unwrap_or("");
            let u = match axis_col {
                WAVELENGTH_HEADER => AxisUnit::WavelengthUm,
                FREQUENCY_HEADER => AxisUnit::AngularFrequencyRadPerPs,
                other => {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "expected header `{WAVELENGTH_HEADER},intensity` or `{FREQUENCY_HEADER},intensity`, got axis column `{other}`"
                        ),
                    ))
                }
            };
            if intensity_col != "intensity" || cols.next().is_some() {
                return Err(parse_err(
                    line_no,
                    "second column must be `intensity` and no further columns are allowed".into(),
                ));
            }
            unit = Some(u);
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(line_no, "expected exactly two comma-separated values".into())),
        };
        let x: f64 = a
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad axis value `{a}`: {e}")))?;
        let y: f64 = b
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad intensity value `{b}`: {e}")))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(line_no, "NaN and infinite values are not allowed".into()));
        }
        if y < 0.0 {
            return Err(parse_err(line_no, format!("negative intensity {y}")));
        }
        // wavelengths are stored in nm on disk, in um in memory
        axis.push(if unit == Some(AxisUnit::WavelengthUm) { x * 1e-3 } else { x });
        intensity.push(y);
    }

    let unit = unit.ok_or_else(|| parse_err(text.lines().count().max(1), "missing header line".into()))?;
    if axis.len() < 2 {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("need at least 2 data rows, got {}", axis.len()),
        ));
    }
    if axis[0] > axis[axis.len() - 1] {
        axis.reverse();
        intensity.reverse();
    }
    if let Some(w) = axis.windows(2).position(|w| w[1] <= w[0]) {
        return Err(parse_err(0, format!("axis is not strictly monotone near data row {}", w + 2)));
    }
    Spectrum::new(axis, intensity, unit)
        .map_err(|e| parse_err(0, format!("invalid spectrum: {e}")))
}

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a spectrum as two-column CSV. Wavelength axes are written in nm.
pub fn write_spectrum_csv(path: &Path, s: &Spectrum) -> Result<(), FormatError> {
    let mut out = String::new();
    let header = match s.unit {
        AxisUnit::WavelengthUm => WAVELENGTH_HEADER,
        AxisUnit::AngularFrequencyRadPerPs => FREQUENCY_HEADER,
    };
    out.push_str(header);
    out.push_str(",intensity\n");
    for (x, y) in s.axis.iter().zip(&s.intensity) {
        let x_out = match s.unit {
            AxisUnit::WavelengthUm => x * 1e3,
            AxisUnit::AngularFrequencyRadPerPs => *x,
        };
        out.push_str(&fmt17(x_out));
        out.push(',');
        out.push_str(&fmt17(*y));
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| FormatError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Json {
        path: path.display().to_string(),
        source: e,
    })
}

/// Pretty-printed JSON with a trailing newline; float formatting is
/// serde_json's shortest exact round-trip form.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
    text.push('\n');
    fs::write(path, text).map_err(|e| FormatError::io(path, e))
}
