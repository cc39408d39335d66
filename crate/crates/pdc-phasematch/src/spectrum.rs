//! Sampled 1D intensity spectra, the common currency between the fringe,
//! marginal and fitting modules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("axis and intensity lengths differ ({axis} vs {intensity})")]
    LengthMismatch { axis: usize, intensity: usize },
    #[error("axis must be strictly increasing (violation at index {0})")]
    NonMonotoneAxis(usize),
    #[error("intensity must be non-negative and finite (violation at index {0})")]
    BadIntensity(usize),
    #[error("axis contains a non-finite value at index {0}")]
    BadAxis(usize),
}

/// Unit tag for the spectrum axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisUnit {
    /// Vacuum wavelength in µm.
    WavelengthUm,
    /// Angular frequency in rad/ps (absolute or detuning, caller's context).
    AngularFrequencyRadPerPs,
}

/// A sampled intensity spectrum: strictly increasing axis, non-negative
/// intensity in arbitrary units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub axis: Vec<f64>,
    pub intensity: Vec<f64>,
    pub unit: AxisUnit,
}

impl Spectrum {
    pub fn new(axis: Vec<f64>, intensity: Vec<f64>, unit: AxisUnit) -> Result<Self, SpectrumError> {
        if axis.len() != intensity.len() {
            return Err(SpectrumError::LengthMismatch {
                axis: axis.len(),
                intensity: intensity.len(),
            });
        }
        for (i, &x) in axis.iter().enumerate() {
            if !x.is_finite() {
                return Err(SpectrumError::BadAxis(i));
            }
            if i > 0 && x <= axis[i - 1] {
                return Err(SpectrumError::NonMonotoneAxis(i));
            }
        }
        for (i, &y) in intensity.iter().enumerate() {
            if !y.is_finite() || y < 0.0 {
                return Err(SpectrumError::BadIntensity(i));
            }
        }
        Ok(Spectrum {
            axis,
            intensity,
            unit,
        })
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Index of the maximum intensity sample (first one on ties).
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &y) in self.intensity.iter().enumerate() {
            match best {
                Some((_, by)) if y <= by => {}
                _ => best = Some((i, y)),
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Evenly spaced grid over [lo, hi] with n points (n >= 2).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_monotone_axis() {
        let err = Spectrum::new(
            vec![1.0, 1.0, 2.0],
            vec![0.0; 3],
            AxisUnit::WavelengthUm,
        )
        .unwrap_err();
        assert_eq!(err, SpectrumError::NonMonotoneAxis(1));
    }

    #[test]
    fn validates_intensity() {
        let err = Spectrum::new(
            vec![1.0, 2.0],
            vec![0.0, -1.0],
            AxisUnit::WavelengthUm,
        )
        .unwrap_err();
        assert_eq!(err, SpectrumError::BadIntensity(1));
        let err = Spectrum::new(
            vec![1.0, 2.0],
            vec![0.0, f64::NAN],
            AxisUnit::WavelengthUm,
        )
        .unwrap_err();
        assert_eq!(err, SpectrumError::BadIntensity(1));
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
