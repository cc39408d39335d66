//! Closed-form spectral math for parametric down-conversion in a waveguide:
//! second-order phase-mismatch expansion, joint spectral amplitude,
//! Gaussian-ellipse approximation, phasematching bandwidth and tilt, and
//! marginal spectra of a CW-pumped pair source.
//!
//! Frequencies are handled as detunings (rad/ps) from a phasematched
//! triplet ω⁰_p = ω⁰_s + ω⁰_i. Energy conservation ties the pump detuning
//! to the pair: ν_p = ν_s + ν_i.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::{AxisUnit, Spectrum};
use crate::units::AngularFrequency;

#[derive(Debug, Error, PartialEq)]
pub enum JsaError {
    #[error("kappa_s and kappa_i are both zero: no phasematching direction")]
    NoPhasematchingDirection,
    #[error("tilt denominator vanishes at this detuning")]
    SingularTilt,
    #[error("contour equation is identically zero; any detuning is a solution")]
    DegenerateContour,
    #[error("grid is empty or contains no nonzero sample")]
    DegenerateGrid,
    #[error("correlation ellipse has a non-positive eigenvalue ({0})")]
    NonPositiveEigenvalue(f64),
    #[error("marginal axis must be strictly increasing")]
    NonMonotoneAxis,
}

/// First- and second-order phase-mismatch coefficients about the
/// phasematched triplet. κ_μ = k′_μ − k′_p (ps/µm), K_μ = k″_μ (ps²/µm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionParams {
    pub kappa_s: f64,
    pub kappa_i: f64,
    pub k2_s: f64,
    pub k2_i: f64,
    pub k2_p: f64,
}

impl DispersionParams {
    /// Purely first-order dispersion, all curvature terms zero.
    pub fn linear(kappa_s: f64, kappa_i: f64) -> Self {
        DispersionParams {
            kappa_s,
            kappa_i,
            k2_s: 0.0,
            k2_i: 0.0,
            k2_p: 0.0,
        }
    }

    /// Relabel signal as idler and vice versa.
    pub fn swap_roles(self) -> Self {
        DispersionParams {
            kappa_s: self.kappa_i,
            kappa_i: self.kappa_s,
            k2_s: self.k2_i,
            k2_i: self.k2_s,
            k2_p: self.k2_p,
        }
    }

    /// All coefficients multiplied by a positive constant. The Δk = 0
    /// contour is invariant under this.
    pub fn scaled(self, factor: f64) -> Self {
        DispersionParams {
            kappa_s: self.kappa_s * factor,
            kappa_i: self.kappa_i * factor,
            k2_s: self.k2_s * factor,
            k2_i: self.k2_i * factor,
            k2_p: self.k2_p * factor,
        }
    }
}

/// Waveguide geometry plus the phasematched frequency triplet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    /// Interaction length, µm.
    pub length_um: f64,
    /// sinc²-to-Gaussian² FWHM matching factor, dimensionless.
    pub gamma: f64,
    pub omega0_s: AngularFrequency,
    pub omega0_i: AngularFrequency,
}

impl WaveguideSpec {
    pub fn new(length_um: f64, gamma: f64, omega0_s: AngularFrequency, omega0_i: AngularFrequency) -> Self {
        assert!(length_um > 0.0, "waveguide length must be positive");
        assert!(gamma > 0.0, "gamma must be positive");
        WaveguideSpec {
            length_um,
            gamma,
            omega0_s,
            omega0_i,
        }
    }

    /// ω⁰_p = ω⁰_s + ω⁰_i, exact by construction.
    pub fn omega0_p(&self) -> AngularFrequency {
        AngularFrequency(self.omega0_s.0 + self.omega0_i.0)
    }
}

/// Pump spectral envelope. σ_p is the 1/e half-width of the *amplitude*
/// Gaussian exp(−ν²/σ_p²); intensity FWHM = σ_p·√(2 ln 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub omega_c: AngularFrequency,
    pub bandwidth: PumpBandwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PumpBandwidth {
    /// Gaussian amplitude 1/e half-width, rad/ps.
    Pulsed(f64),
    /// Monochromatic pump; only marginal spectra are defined.
    Cw,
}

impl PumpSpec {
    pub fn pulsed(omega_c: AngularFrequency, sigma_p: f64) -> Self {
        assert!(
            sigma_p > 0.0 && sigma_p.is_finite(),
            "pulsed pump bandwidth must be positive and finite"
        );
        PumpSpec {
            omega_c,
            bandwidth: PumpBandwidth::Pulsed(sigma_p),
        }
    }

    pub fn cw(omega_c: AngularFrequency) -> Self {
        PumpSpec {
            omega_c,
            bandwidth: PumpBandwidth::Cw,
        }
    }

    pub fn is_cw(&self) -> bool {
        matches!(self.bandwidth, PumpBandwidth::Cw)
    }

    fn sigma_p(&self) -> f64 {
        match self.bandwidth {
            PumpBandwidth::Pulsed(s) => s,
            PumpBandwidth::Cw => panic!("operation requires a pulsed pump (finite sigma_p)"),
        }
    }
}

/// Minor/major 1/e semiaxes of the joint-amplitude correlation ellipse,
/// rad/ps. `sigma_plus` is infinite when the ellipse degenerates into a
/// band (kappa_s == kappa_i exactly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseAxes {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
}

/// Phasematching bandwidth: the σ_p → ∞ limit of the minor semiaxis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasematchingBandwidth {
    /// 1/e amplitude half-width σ_PM, rad/ps.
    pub sigma_pm: f64,
    /// FWHM of the intensity profile exp(−2ν²/σ_PM²): σ_PM·√(2 ln 2).
    pub intensity_fwhm: f64,
}

/// Local slope of the Δk = 0 contour and its angle in the (ν_s, ν_i)
/// plane, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub slope: f64,
    pub angle_deg: f64,
}

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Second-order phase mismatch about the phasematched point, 1/µm:
///
/// Δk = κ_s ν_s + κ_i ν_i + ½(K_s−K_p)ν_s² + ½(K_i−K_p)ν_i² − K_p ν_s ν_i
///
/// with the pump detuning eliminated through ν_p = ν_s + ν_i.
pub fn delta_k(params: &DispersionParams, nu_s: f64, nu_i: f64) -> f64 {
    params.kappa_s * nu_s
        + params.kappa_i * nu_i
        + 0.5 * (params.k2_s - params.k2_p) * nu_s * nu_s
        + 0.5 * (params.k2_i - params.k2_p) * nu_i * nu_i
        - params.k2_p * nu_s * nu_i
}

/// Unnormalized joint spectral amplitude
///
/// f = exp(−(ν_s+ν_i−Δ)²/σ_p²) · sinc(LΔk/2) · exp(−iLΔk/2)
///
/// with Δ = ω_c − ω⁰_p. The overall normalization is applied separately by
/// [`normalize_jsd`]. Requires a pulsed pump; the CW limit is handled by
/// [`marginal_spectrum`].
pub fn jsa_amplitude(
    spec: &WaveguideSpec,
    pump: &PumpSpec,
    params: &DispersionParams,
    nu_s: f64,
    nu_i: f64,
) -> Complex64 {
    let sigma_p = pump.sigma_p();
    let delta = pump.omega_c.0 - spec.omega0_p().0;
    let pump_arg = (nu_s + nu_i - delta) / sigma_p;
    let envelope = (-pump_arg * pump_arg).exp();
    let half_phase = 0.5 * spec.length_um * delta_k(params, nu_s, nu_i);
    envelope * sinc(half_phase) * Complex64::new(0.0, -half_phase).exp()
}

/// Rescale a grid of |f|² samples so that the midpoint Riemann sum
/// Σ samples · cell_area equals one. Summation is sequential in index
/// order, so results are identical however the grid was produced.
pub fn normalize_jsd(samples: &[f64], cell_area: f64) -> Result<Vec<f64>, JsaError> {
    let mut total = 0.0;
    for &s in samples {
        total += s;
    }
    let norm = total * cell_area;
    if samples.is_empty() || norm <= 0.0 || !norm.is_finite() {
        return Err(JsaError::DegenerateGrid);
    }
    Ok(samples.iter().map(|&s| s / norm).collect())
}

/// The 2×2 quadratic form of the Gaussian-ellipse approximation to |f|,
/// units ps²:
///
/// M = [ 1/σ_p² + γL²κ_s²/4      1/σ_p² + γL²κ_sκ_i/4 ]
///     [ 1/σ_p² + γL²κ_sκ_i/4   1/σ_p² + γL²κ_i²/4    ]
pub fn gaussian_ellipse_matrix(
    spec: &WaveguideSpec,
    pump: &PumpSpec,
    params: &DispersionParams,
) -> [[f64; 2]; 2] {
    let p = 1.0 / (pump.sigma_p() * pump.sigma_p());
    let q = spec.gamma * spec.length_um * spec.length_um / 4.0;
    let m11 = p + q * params.kappa_s * params.kappa_s;
    let m22 = p + q * params.kappa_i * params.kappa_i;
    let m12 = p + q * params.kappa_s * params.kappa_i;
    [[m11, m12], [m12, m22]]
}

/// Closed-form eigenvalues of [`gaussian_ellipse_matrix`], returned as the
/// 1/e semiaxes σ∓ = λ±^(−1/2):
///
/// λ± = 1/σ_p² + γL²(κ_s²+κ_i²)/8 ± √[1/σ_p⁴ + (γL²(κ_s²+κ_i²)/8)² + γL²κ_sκ_i/(2σ_p²)]
///
/// The smaller eigenvalue is evaluated as det(M)/λ₊ = PQ(κ_s−κ_i)²/λ₊
/// (algebraically identical, immune to cancellation). For κ_s == κ_i the
/// minor eigenvalue of the form is zero and `sigma_plus` comes out
/// infinite: the ellipse degenerates into a band.
pub fn ellipse_eigenvalues(
    spec: &WaveguideSpec,
    pump: &PumpSpec,
    params: &DispersionParams,
) -> Result<EllipseAxes, JsaError> {
    let p = 1.0 / (pump.sigma_p() * pump.sigma_p());
    let q = spec.gamma * spec.length_um * spec.length_um / 4.0;
    let s = params.kappa_s * params.kappa_s + params.kappa_i * params.kappa_i;
    let half_trace = p + 0.5 * q * s;
    let radicand = p * p + 0.25 * q * q * s * s + 2.0 * p * q * params.kappa_s * params.kappa_i;
    // radicand = ((M11-M22)/2)^2 + M12^2 >= 0; clamp rounding noise
    let lambda_max = half_trace + radicand.max(0.0).sqrt();
    if !(lambda_max > 0.0) {
        return Err(JsaError::NonPositiveEigenvalue(lambda_max));
    }
    let dk = params.kappa_s - params.kappa_i;
    let lambda_min = p * q * dk * dk / lambda_max;
    if lambda_min < 0.0 {
        return Err(JsaError::NonPositiveEigenvalue(lambda_min));
    }
    Ok(EllipseAxes {
        sigma_minus: 1.0 / lambda_max.sqrt(),
        sigma_plus: 1.0 / lambda_min.sqrt(), // +inf when lambda_min == 0
    })
}

/// Phasematching bandwidth 1/σ_PM² = γ(κ_s²+κ_i²)L²/4 and the FWHM of the
/// corresponding sinc² intensity profile.
pub fn phasematching_bandwidth(
    spec: &WaveguideSpec,
    params: &DispersionParams,
) -> Result<PhasematchingBandwidth, JsaError> {
    let s = params.kappa_s * params.kappa_s + params.kappa_i * params.kappa_i;
    if s <= 0.0 {
        return Err(JsaError::NoPhasematchingDirection);
    }
    let inv_sq = spec.gamma * s * spec.length_um * spec.length_um / 4.0;
    let sigma_pm = 1.0 / inv_sq.sqrt();
    Ok(PhasematchingBandwidth {
        sigma_pm,
        intensity_fwhm: sigma_pm * (2.0 * std::f64::consts::LN_2).sqrt(),
    })
}

/// Local slope of the constant-phasematching contour,
///
/// Δν_i/Δν_s = −(κ_s + K_s ν_s − K_p ν_p)/(κ_i + K_i ν_i − K_p ν_p),
///
/// and its arctangent in degrees.
pub fn phasematching_tilt(
    params: &DispersionParams,
    nu_s: f64,
    nu_i: f64,
    nu_p: f64,
) -> Result<Tilt, JsaError> {
    let num = params.kappa_s + params.k2_s * nu_s - params.k2_p * nu_p;
    let den = params.kappa_i + params.k2_i * nu_i - params.k2_p * nu_p;
    if den == 0.0 {
        return Err(JsaError::SingularTilt);
    }
    let slope = -num / den;
    Ok(Tilt {
        slope,
        angle_deg: slope.atan().to_degrees(),
    })
}

/// Below this |K_s + K_i| (ps²/µm) the contour equation is solved as
/// linear; the near-linear regime is physical for low-dispersion guides.
pub const CONTOUR_LINEAR_THRESHOLD: f64 = 1e-18;

/// Signal-frequency solutions of the CW phasematching contour
///
/// κ_s ν_s + κ_i ν_i + ½K_s ν_s² + ½K_i ν_i² − ½K_p Δ² = 0,  ν_i = Δ − ν_s,
///
/// i.e. the marginal-spectrum peak positions at pump detuning Δ. With
/// `drop_kp` the −½K_pΔ² term is omitted (justified when the pump detuning
/// is far smaller than the signal/idler shifts). Returns 0, 1 or 2 real
/// roots sorted ascending; the paired idler detunings are Δ − ν_s.
pub fn marginal_contour_roots(
    params: &DispersionParams,
    delta: f64,
    drop_kp: bool,
) -> Result<Vec<f64>, JsaError> {
    // substituting nu_i = delta - nu_s gives a quadratic in nu_s
    let a = 0.5 * (params.k2_s + params.k2_i);
    let b = params.kappa_s - params.kappa_i - params.k2_i * delta;
    let mut c = params.kappa_i * delta + 0.5 * params.k2_i * delta * delta;
    if !drop_kp {
        c -= 0.5 * params.k2_p * delta * delta;
    }

    if a.abs() < CONTOUR_LINEAR_THRESHOLD {
        if b == 0.0 {
            return if c == 0.0 {
                Err(JsaError::DegenerateContour)
            } else {
                Ok(vec![])
            };
        }
        return Ok(vec![-c / b]);
    }

    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(vec![]);
    }
    if disc == 0.0 {
        return Ok(vec![-b / (2.0 * a)]);
    }
    // numerically stable pair: q = -(b + sign(b)*sqrt(disc))/2
    let sign_b = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign_b * disc.sqrt());
    let mut roots = [q / a, c / q];
    if roots[0] > roots[1] {
        roots.swap(0, 1);
    }
    Ok(roots.to_vec())
}

/// CW-pumped marginal spectrum of the signal beam,
///
/// I(ν_s) = |sinc(L/2 · Δk(ν_s, ν_i = Δ − ν_s))|²,
///
/// evaluated on `axis` (signal detunings, strictly increasing). The idler
/// marginal is the same call with [`DispersionParams::swap_roles`].
pub fn marginal_spectrum(
    spec: &WaveguideSpec,
    params: &DispersionParams,
    pump_cw_omega: AngularFrequency,
    axis: &[f64],
) -> Result<Spectrum, JsaError> {
    if axis.len() < 2 || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(JsaError::NonMonotoneAxis);
    }
    let delta = pump_cw_omega.0 - spec.omega0_p().0;
    let intensity = axis
        .iter()
        .map(|&nu_s| {
            let dk = delta_k(params, nu_s, delta - nu_s);
            let s = sinc(0.5 * spec.length_um * dk);
            s * s
        })
        .collect();
    Spectrum::new(axis.to_vec(), intensity, AxisUnit::AngularFrequencyRadPerPs)
        .map_err(|_| JsaError::NonMonotoneAxis)
}

/// Positive solution of sinc²(x) = 1/2, by bisection to 1e-12.
pub fn sinc_squared_half_max_point() -> f64 {
    let f = |x: f64| sinc(x) * sinc(x) - 0.5;
    let (mut lo, mut hi) = (1.0, 2.0);
    // sinc² is strictly decreasing on [1, 2] ⊂ [0, π]
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The factor γ matching the FWHM of sinc²(x) to that of exp(−2γx²):
/// γ = ln2/(2x₀²) with sinc²(x₀) = 1/2. Evaluates to 0.17898, the value
/// commonly rounded to 0.179.
pub fn gamma_from_sinc_matching() -> f64 {
    let x0 = sinc_squared_half_max_point();
    std::f64::consts::LN_2 / (2.0 * x0 * x0)
}
