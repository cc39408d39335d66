//! Physical quantities and unit conversions shared by every module.
//!
//! Canonical internal units: angular frequency in rad/ps, length in µm,
//! time in ps. First-order dispersion coefficients (κ) are ps/µm, second
//! order (K) are ps²/µm, which keeps all magnitudes near unity for the
//! waveguides this crate targets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vacuum speed of light in µm/ps. The only definition of c in this crate.
pub const SPEED_OF_LIGHT_UM_PER_PS: f64 = 299.792458;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("wavelength must be positive, got {0} um")]
    NonPositiveWavelength(f64),
    #[error("angular frequency must be positive, got {0} rad/ps")]
    NonPositiveFrequency(f64),
}

/// Absolute angular frequency in rad/ps. Always positive; use
/// [`FrequencyDetuning`] for signed offsets from a reference.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AngularFrequency(pub f64);

/// Signed angular-frequency offset from some reference, rad/ps.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FrequencyDetuning(pub f64);

/// Vacuum wavelength in µm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct VacuumWavelength(pub f64);

impl AngularFrequency {
    pub fn rad_per_ps(self) -> f64 {
        self.0
    }

    /// Detuning of `self` from `reference`.
    pub fn detuning_from(self, reference: AngularFrequency) -> FrequencyDetuning {
        FrequencyDetuning(self.0 - reference.0)
    }

    /// Absolute frequency at `reference + detuning`.
    pub fn offset_by(self, detuning: FrequencyDetuning) -> AngularFrequency {
        AngularFrequency(self.0 + detuning.0)
    }
}

impl FrequencyDetuning {
    pub fn rad_per_ps(self) -> f64 {
        self.0
    }
}

impl VacuumWavelength {
    pub fn um(self) -> f64 {
        self.0
    }

    pub fn from_nm(nm: f64) -> Self {
        VacuumWavelength(nm * 1e-3)
    }

    pub fn nm(self) -> f64 {
        self.0 * 1e3
    }
}

/// ω = 2πc/λ.
pub fn wavelength_to_angular_frequency(
    lambda: VacuumWavelength,
) -> Result<AngularFrequency, UnitsError> {
    if !(lambda.0 > 0.0) || !lambda.0.is_finite() {
        return Err(UnitsError::NonPositiveWavelength(lambda.0));
    }
    Ok(AngularFrequency(
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_UM_PER_PS / lambda.0,
    ))
}

/// λ = 2πc/ω, inverse of [`wavelength_to_angular_frequency`].
pub fn angular_frequency_to_wavelength(
    omega: AngularFrequency,
) -> Result<VacuumWavelength, UnitsError> {
    if !(omega.0 > 0.0) || !omega.0.is_finite() {
        return Err(UnitsError::NonPositiveFrequency(omega.0));
    }
    Ok(VacuumWavelength(
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_UM_PER_PS / omega.0,
    ))
}

/// First-order conversion of a frequency FWHM to a wavelength FWHM at
/// carrier λ0: Δλ = λ0²·Δω/(2πc). Result in nm.
pub fn detuning_bandwidth_to_wavelength_fwhm(
    delta_omega: FrequencyDetuning,
    lambda0: VacuumWavelength,
) -> Result<f64, UnitsError> {
    if !(lambda0.0 > 0.0) || !lambda0.0.is_finite() {
        return Err(UnitsError::NonPositiveWavelength(lambda0.0));
    }
    let um = lambda0.0 * lambda0.0 * delta_omega.0
        / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_UM_PER_PS);
    Ok(um * 1e3)
}

/// A scalar with one standard uncertainty attached. Uncertainties are
/// propagated to first order only; Monte Carlo stages propagate by
/// sampling instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub fn new(value: f64, sigma: f64) -> Self {
        assert!(sigma >= 0.0, "uncertainty must be non-negative");
        Measured { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Measured { value, sigma: 0.0 }
    }

    /// Multiply by an exact constant.
    pub fn scale(self, factor: f64) -> Self {
        Measured {
            value: self.value * factor,
            sigma: self.sigma * factor.abs(),
        }
    }

    /// Difference with uncertainties combined in quadrature.
    pub fn sub(self, other: Measured) -> Self {
        Measured {
            value: self.value - other.value,
            sigma: self.sigma.hypot(other.sigma),
        }
    }

    /// Relative standard uncertainty; infinite for a zero value.
    pub fn relative_sigma(self) -> f64 {
        self.sigma / self.value.abs()
    }
}

impl std::fmt::Display for Measured {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} +/- {}", self.value, self.sigma)
    }
}
