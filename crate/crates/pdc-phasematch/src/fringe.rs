//! Fabry-Perot fringe synthesis and Fourier-domain group-index extraction.
//!
//! A waveguide with reflecting facets transmits an Airy pattern per excited
//! spatial mode. In vacuum wavenumber σ = 1/λ the fringes of mode m are
//! periodic with period 1/(2·n_g·L), so the magnitude FFT of the spectrum
//! against σ shows peaks at the round-trip optical path 2·n_g·L and its
//! multiples. Group indices follow by dividing the fundamental peak
//! position by 2L.

use rand_core::{RngCore, SeedableRng};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::{AxisUnit, Spectrum};
use crate::units::{Measured, SPEED_OF_LIGHT_UM_PER_PS};

#[derive(Debug, Error, PartialEq)]
pub enum FringeError {
    #[error("at least one cavity mode is required")]
    NoModes,
    #[error("spectrum needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("spectrum axis must be strictly monotone wavelength")]
    BadAxis,
    #[error("no fringe peak rises above the noise floor")]
    NoFringe,
}

/// One excited spatial mode of the waveguide cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    /// Group index of the mode over the measured band (treated constant).
    pub group_index: Measured,
    /// Relative coupled power.
    pub weight: f64,
    /// Facet power reflectivity, 0..1.
    pub facet_reflectivity: f64,
}

/// Normal-incidence Fresnel reflectivity for an effective index near 3.3
/// against air; used when no facet measurement is available.
pub const DEFAULT_FACET_REFLECTIVITY: f64 = 0.29;

impl CavityMode {
    pub fn new(group_index: Measured, weight: f64) -> Self {
        assert!(group_index.value > 1.0, "group index must exceed vacuum");
        assert!(weight >= 0.0, "mode weight must be non-negative");
        CavityMode {
            group_index,
            weight,
            facet_reflectivity: DEFAULT_FACET_REFLECTIVITY,
        }
    }

    pub fn with_reflectivity(mut self, r: f64) -> Self {
        assert!((0.0..1.0).contains(&r), "reflectivity must be in [0, 1)");
        self.facet_reflectivity = r;
        self
    }
}

/// A fringe peak in the Fourier (optical path) domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalLengthPeak {
    /// Round-trip optical path 2·n_g·L, µm, with its position uncertainty.
    pub position_um: Measured,
    /// Peak magnitude, arbitrary units.
    pub height: f64,
    /// position/(2L); uncertainty combines position and length errors in
    /// quadrature.
    pub group_index: Measured,
}

/// Result of a fringe analysis: detected mode peaks plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeAnalysis {
    /// Waveguide length the group indices were computed against.
    pub length_um: Measured,
    /// Detected fundamental peaks, strongest first.
    pub peaks: Vec<OpticalLengthPeak>,
    /// Rayleigh resolution of the path axis, 1/(σ span), µm.
    pub resolution_um: f64,
    /// Median Fourier magnitude used as the noise reference.
    pub noise_floor: f64,
    pub warnings: Vec<String>,
}

/// Airy transmission (1−R)²/(1 + R² − 2R cos δ).
fn airy(delta: f64, r: f64) -> f64 {
    let one_minus = 1.0 - r;
    one_minus * one_minus / (1.0 + r * r - 2.0 * r * delta.cos())
}

/// 53-bit uniform in [0, 1) from one RNG word.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller; draws exactly two RNG words.
fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Superpose the Airy transmission of each mode (incoherent intensity sum)
/// over a wavelength axis (µm, strictly increasing) and add white Gaussian
/// noise of standard deviation `noise_sigma` (same arbitrary units as the
/// summed intensity). `noise_sigma = 0` draws nothing from the generator,
/// so the output is then independent of `seed`.
pub fn synthesize_fringes(
    modes: &[CavityMode],
    length_um: f64,
    axis_um: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<Spectrum, FringeError> {
    if modes.is_empty() {
        return Err(FringeError::NoModes);
    }
    assert!(length_um > 0.0, "waveguide length must be positive");
    if axis_um.len() < 2 || axis_um.windows(2).any(|w| w[1] <= w[0]) || axis_um[0] <= 0.0 {
        return Err(FringeError::BadAxis);
    }

    let mut intensity: Vec<f64> = axis_um
        .iter()
        .map(|&lambda| {
            modes
                .iter()
                .map(|m| {
                    // round-trip phase 2·(2π/λ)·n_g·L
                    let delta = 2.0 * (2.0 * std::f64::consts::PI / lambda)
                        * m.group_index.value
                        * length_um;
                    m.weight * airy(delta, m.facet_reflectivity)
                })
                .sum()
        })
        .collect();

    if noise_sigma > 0.0 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for v in &mut intensity {
            *v = (*v + noise_sigma * standard_normal(&mut rng)).max(0.0);
        }
    }

    Spectrum::new(axis_um.to_vec(), intensity, AxisUnit::WavelengthUm)
        .map_err(|_| FringeError::BadAxis)
}

/// A spectrum resampled onto a uniform vacuum-wavenumber grid with its
/// mean removed. Unlike [`Spectrum`] the signal may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberTrace {
    /// Uniform grid in 1/λ, µm⁻¹, ascending.
    pub wavenumber: Vec<f64>,
    /// DC-removed intensity.
    pub signal: Vec<f64>,
}

impl WavenumberTrace {
    pub fn step(&self) -> f64 {
        (self.wavenumber[self.wavenumber.len() - 1] - self.wavenumber[0])
            / (self.wavenumber.len() - 1) as f64
    }
}

/// Linear interpolation of a wavelength spectrum onto `n_points` uniformly
/// spaced in vacuum wavenumber 1/λ, followed by mean subtraction. The
/// spectrograph samples uniformly in wavelength, but the fringes are
/// periodic in wavenumber; the FFT needs the latter.
pub fn resample_uniform_wavenumber(
    s: &Spectrum,
    n_points: usize,
) -> Result<WavenumberTrace, FringeError> {
    if s.len() < 8 {
        return Err(FringeError::TooFewPoints {
            needed: 8,
            got: s.len(),
        });
    }
    if s.unit != AxisUnit::WavelengthUm || s.axis[0] <= 0.0 {
        return Err(FringeError::BadAxis);
    }
    let n_points = n_points.max(8);

    // wavelength ascending => wavenumber descending; build both ascending
    let sigma_src: Vec<f64> = s.axis.iter().rev().map(|&l| 1.0 / l).collect();
    let val_src: Vec<f64> = s.intensity.iter().rev().copied().collect();

    let (lo, hi) = (sigma_src[0], sigma_src[sigma_src.len() - 1]);
    let step = (hi - lo) / (n_points - 1) as f64;
    let mut wavenumber = Vec::with_capacity(n_points);
    let mut signal = Vec::with_capacity(n_points);
    let mut j = 0usize;
    for k in 0..n_points {
        let sigma = if k + 1 == n_points { hi } else { lo + step * k as f64 };
        while j + 2 < sigma_src.len() && sigma_src[j + 1] < sigma {
            j += 1;
        }
        let (x0, x1) = (sigma_src[j], sigma_src[j + 1]);
        let t = ((sigma - x0) / (x1 - x0)).clamp(0.0, 1.0);
        wavenumber.push(sigma);
        signal.push(val_src[j] + t * (val_src[j + 1] - val_src[j]));
    }

    let mean = signal.iter().sum::<f64>() / n_points as f64;
    for v in &mut signal {
        *v -= mean;
    }
    Ok(WavenumberTrace { wavenumber, signal })
}

/// Window applied before the FFT. Hann is the default trade-off between
/// leakage and main-lobe width; the alternatives exist to verify that the
/// refined peak positions do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
    Hamming,
}

impl Window {
    fn coefficient(self, k: usize, n: usize) -> f64 {
        let x = 2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64;
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 * (1.0 - x.cos()),
            Window::Hamming => 0.54 - 0.46 * x.cos(),
        }
    }
}

/// Zero-padding factor applied before the FFT; interpolates the Fourier
/// magnitude so the parabolic refinement works on a dense grid.
const ZERO_PAD_FACTOR: usize = 8;

/// Peaks must rise above this multiple of the median Fourier magnitude.
const NOISE_FLOOR_FACTOR: f64 = 5.0;

/// Relative tolerance for classifying a Fourier peak as the m-th harmonic
/// of an already accepted mode.
const HARMONIC_TOLERANCE: f64 = 0.03;

/// Extract modal group indices from a measured or synthetic fringe
/// spectrum. Resamples onto a uniform wavenumber grid, applies a window
/// and a zero-padded magnitude FFT against the conjugate variable
/// "round-trip optical path" (µm), then picks up to `max_modes` local
/// maxima above the noise floor with parabolic sub-bin refinement.
/// Repeating peaks at integer multiples of an accepted path are harmonics
/// of the same mode and are skipped. Group index = position/(2L);
/// its uncertainty combines the width/SNR position error with the length
/// uncertainty in quadrature.
pub fn extract_group_indices(
    s: &Spectrum,
    length_um: Measured,
    max_modes: usize,
) -> Result<FringeAnalysis, FringeError> {
    extract_group_indices_windowed(s, length_um, max_modes, Window::Hann)
}

/// [`extract_group_indices`] with an explicit window choice.
pub fn extract_group_indices_windowed(
    s: &Spectrum,
    length_um: Measured,
    max_modes: usize,
    window: Window,
) -> Result<FringeAnalysis, FringeError> {
    assert!(length_um.value > 0.0, "waveguide length must be positive");
    assert!(max_modes >= 1, "max_modes must be at least one");

    let trace = resample_uniform_wavenumber(s, s.len())?;
    let n = trace.signal.len();
    let d_sigma = trace.step();
    let span_sigma = d_sigma * (n - 1) as f64;
    let resolution_um = 1.0 / span_sigma;

    let n_fft = (n * ZERO_PAD_FACTOR).next_power_of_two();
    let mut buf: Vec<Complex64> = (0..n_fft)
        .map(|k| {
            if k < n {
                Complex64::new(trace.signal[k] * window.coefficient(k, n), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let magnitude: Vec<f64> = buf[..n_fft / 2].iter().map(|c| c.norm()).collect();
    let bin_to_path = 1.0 / (n_fft as f64 * d_sigma);

    // skip the DC shoulder: search only above two resolution widths
    let min_bin = ((2.0 * resolution_um) / bin_to_path).ceil() as usize;
    let search = &magnitude[min_bin.min(magnitude.len())..];
    if search.len() < 3 {
        return Err(FringeError::NoFringe);
    }

    let mut sorted: Vec<f64> = search.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let noise_floor = sorted[sorted.len() / 2];
    let threshold = NOISE_FLOOR_FACTOR * noise_floor;

    // local maxima above the threshold, strongest first
    let mut candidates: Vec<usize> = (min_bin + 1..magnitude.len() - 1)
        .filter(|&k| {
            magnitude[k] > threshold
                && magnitude[k] > magnitude[k - 1]
                && magnitude[k] >= magnitude[k + 1]
        })
        .collect();
    candidates.sort_by(|&a, &b| magnitude[b].partial_cmp(&magnitude[a]).unwrap());

    let mut peaks: Vec<OpticalLengthPeak> = Vec::new();
    let mut accepted_paths: Vec<f64> = Vec::new();
    for &bin in &candidates {
        if peaks.len() == max_modes {
            break;
        }
        let (alpha, beta, gamma) = (magnitude[bin - 1], magnitude[bin], magnitude[bin + 1]);
        let denom = alpha - 2.0 * beta + gamma;
        let offset = if denom != 0.0 {
            ((alpha - gamma) / (2.0 * denom)).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let path = (bin as f64 + offset) * bin_to_path;

        let is_harmonic = accepted_paths.iter().any(|&p| {
            let ratio = path / p;
            let m = ratio.round();
            m >= 2.0 && (ratio - m).abs() < HARMONIC_TOLERANCE * m
        });
        if is_harmonic {
            continue;
        }
        // reject shoulders of an already accepted (stronger) peak
        if accepted_paths.iter().any(|&p| (path - p).abs() < resolution_um) {
            continue;
        }

        let snr = beta / noise_floor;
        // Hann main lobe is ~1.44 Rayleigh widths; position error scales
        // with the lobe width over the amplitude SNR
        let position_sigma = 1.44 * resolution_um / (2.0 * snr);
        let position = Measured::new(path, position_sigma);

        let ng = path / (2.0 * length_um.value);
        let ng_sigma = ng
            * ((position_sigma / path).powi(2) + length_um.relative_sigma().powi(2)).sqrt();
        peaks.push(OpticalLengthPeak {
            position_um: position,
            height: beta,
            group_index: Measured::new(ng, ng_sigma),
        });
        accepted_paths.push(path);
    }

    if peaks.is_empty() {
        return Err(FringeError::NoFringe);
    }

    let mut warnings = Vec::new();
    for i in 0..peaks.len() {
        for j in i + 1..peaks.len() {
            let gap = (peaks[i].position_um.value - peaks[j].position_um.value).abs();
            if gap < resolution_um {
                warnings.push(format!(
                    "peaks at {:.1} um and {:.1} um are closer than one resolution bin ({:.1} um); they may be a single merged mode",
                    peaks[i].position_um.value, peaks[j].position_um.value, resolution_um
                ));
            }
        }
    }

    Ok(FringeAnalysis {
        length_um,
        peaks,
        resolution_um,
        noise_floor,
        warnings,
    })
}

/// Mean group-index difference between the PDC and pump modes divided by
/// the speed of light,
///
/// κ̄ = (P_pdc − P_pump)/(2·L·c),
///
/// computed from the measured round-trip optical paths so that only the
/// peak-position uncertainties enter (the resonator length cancels when κ̄
/// is used in the bandwidth formula, and its error is excluded here).
pub fn kappa_bar_from_optical_lengths(
    peak_pdc: &OpticalLengthPeak,
    peak_pump: &OpticalLengthPeak,
    length_um: Measured,
) -> Measured {
    let scale = 1.0 / (2.0 * length_um.value * SPEED_OF_LIGHT_UM_PER_PS);
    let diff = Measured::new(peak_pdc.position_um.value, peak_pdc.position_um.sigma)
        .sub(Measured::new(
            peak_pump.position_um.value,
            peak_pump.position_um.sigma,
        ));
    diff.scale(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::linspace;

    fn telecom_axis() -> Vec<f64> {
        linspace(1.523, 1.594, 7100)
    }

    fn nir_axis() -> Vec<f64> {
        linspace(0.760, 0.790, 3000)
    }

    #[test]
    fn no_cavity_is_flat() {
        let mode = CavityMode::new(Measured::exact(3.31), 1.0).with_reflectivity(0.0);
        let s = synthesize_fringes(&[mode], 996.0, &telecom_axis(), 0.0, 0).unwrap();
        let (min, max) = s
            .intensity
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        assert!((max - min).abs() < 1e-12);
    }

    #[test]
    fn empty_mode_list_rejected() {
        assert_eq!(
            synthesize_fringes(&[], 996.0, &telecom_axis(), 0.0, 0),
            Err(FringeError::NoModes)
        );
    }

    #[test]
    fn fringe_spacing_matches_free_spectral_range() {
        // count transmission maxima: spacing in 1/lambda is 1/(2 n_g L)
        let mode = CavityMode::new(Measured::exact(3.31), 1.0);
        let axis = telecom_axis();
        let s = synthesize_fringes(&[mode], 996.0, &axis, 0.0, 0).unwrap();
        let mut maxima = 0usize;
        for i in 1..s.len() - 1 {
            if s.intensity[i] > s.intensity[i - 1] && s.intensity[i] >= s.intensity[i + 1] {
                maxima += 1;
            }
        }
        let span_sigma = 1.0 / axis[0] - 1.0 / axis[axis.len() - 1];
        let expected = span_sigma * 2.0 * 3.31 * 996.0; // = span / FSR
        assert!(
            (maxima as f64 - expected).abs() <= 1.0,
            "{maxima} maxima vs expected {expected:.1}"
        );
        // frozen FSR value: 1/(2*3.31*996) = 1.5166e-4 per um
        assert!((1.0 / (2.0 * 3.31 * 996.0) - 1.5166405804486829e-4_f64).abs() < 1e-15);
    }

    #[test]
    fn resample_identity_on_uniform_wavenumber_grid() {
        // axis already uniform in 1/lambda: resampling only removes the mean
        let sigma_grid = linspace(0.63, 0.65, 64);
        let lambda: Vec<f64> = sigma_grid.iter().rev().map(|&s| 1.0 / s).collect();
        let intensity: Vec<f64> = (0..64).map(|i| 1.0 + 0.5 * ((i as f64) * 0.4).sin()).collect();
        let s = Spectrum::new(lambda.clone(), intensity.clone(), AxisUnit::WavelengthUm).unwrap();
        let t = resample_uniform_wavenumber(&s, 64).unwrap();
        let mean = intensity.iter().sum::<f64>() / 64.0;
        for k in 0..64 {
            // output ascending in wavenumber = input reversed
            let expected = intensity[63 - k] - mean;
            assert!(
                (t.signal[k] - expected).abs() < 1e-12,
                "k={k}: {} vs {}",
                t.signal[k],
                expected
            );
        }
    }

    #[test]
    fn resample_constant_gives_zeros() {
        let s = Spectrum::new(
            linspace(1.5, 1.6, 32),
            vec![4.2; 32],
            AxisUnit::WavelengthUm,
        )
        .unwrap();
        let t = resample_uniform_wavenumber(&s, 64).unwrap();
        assert!(t.signal.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn resample_needs_eight_points() {
        let s = Spectrum::new(
            linspace(1.5, 1.6, 7),
            vec![0.0; 7],
            AxisUnit::WavelengthUm,
        )
        .unwrap();
        assert_eq!(
            resample_uniform_wavenumber(&s, 64),
            Err(FringeError::TooFewPoints { needed: 8, got: 7 })
        );
    }

    #[test]
    fn cosine_in_wavenumber_peaks_at_round_trip_path() {
        // cosine with period 1/(2*3.31*996) in 1/lambda: the Fourier peak
        // must appear at the round-trip path 6593.52 um
        let path = 2.0 * 3.31 * 996.0;
        let axis = telecom_axis();
        let intensity: Vec<f64> = axis
            .iter()
            .map(|&l| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * path / l).cos())
            .collect();
        let s = Spectrum::new(axis, intensity, AxisUnit::WavelengthUm).unwrap();
        let a = extract_group_indices(&s, Measured::exact(996.0), 1).unwrap();
        assert!((a.peaks[0].position_um.value - path).abs() < 1.0);
    }

    #[test]
    fn closed_loop_single_telecom_mode() {
        // SNR 100 relative to the unit-weight Airy peak
        let mode = CavityMode::new(Measured::exact(3.31), 1.0);
        let s = synthesize_fringes(&[mode], 996.0, &telecom_axis(), 0.01, 7).unwrap();
        let a = extract_group_indices(&s, Measured::new(996.0, 4.0), 3).unwrap();
        let ng = a.peaks[0].group_index;
        assert!(
            (ng.value - 3.31).abs() / 3.31 < 0.005,
            "recovered {} vs 3.31",
            ng.value
        );
        assert!(ng.sigma > 0.0);
    }

    #[test]
    fn closed_loop_two_nir_modes_identifies_bragg() {
        let modes = [
            CavityMode::new(Measured::exact(4.42), 1.0),
            CavityMode::new(Measured::exact(3.72), 0.15),
        ];
        let s = synthesize_fringes(&modes, 996.0, &nir_axis(), 0.01, 11).unwrap();
        let a = extract_group_indices(&s, Measured::new(996.0, 4.0), 2).unwrap();
        assert_eq!(a.peaks.len(), 2);
        let mut ngs: Vec<f64> = a.peaks.iter().map(|p| p.group_index.value).collect();
        ngs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // the Bragg mode is the one with the lowest apparent group index
        assert!((ngs[0] - 3.72).abs() / 3.72 < 0.01, "bragg {}", ngs[0]);
        assert!((ngs[1] - 4.42).abs() / 4.42 < 0.01, "tir {}", ngs[1]);
    }

    #[test]
    fn pure_noise_has_no_fringe() {
        let axis = telecom_axis();
        let flat = CavityMode::new(Measured::exact(3.31), 0.0); // zero weight
        let s = synthesize_fringes(&[flat], 996.0, &axis, 0.05, 3).unwrap();
        assert_eq!(
            extract_group_indices(&s, Measured::exact(996.0), 3),
            Err(FringeError::NoFringe)
        );
    }

    #[test]
    fn closed_loop_randomized_trials() {
        // 100 seeded trials, SNR >= 20, >= 40 fringe periods in band:
        // every injected group index must come back within 1%
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for trial in 0..100 {
            let two_modes = trial % 2 == 1;
            let ng1 = 2.5 + 2.0 * unit_f64(&mut rng);
            // keep the second mode separated and away from harmonic ratios
            let ng2 = loop {
                let candidate = 2.5 + 2.0 * unit_f64(&mut rng);
                let ratio = ng1.max(candidate) / ng1.min(candidate);
                if (candidate - ng1).abs() > 0.35 && (ratio - ratio.round()).abs() > 0.10 {
                    break candidate;
                }
            };
            let snr = 20.0 + 80.0 * unit_f64(&mut rng);
            let mut modes = vec![CavityMode::new(Measured::exact(ng1), 1.0)];
            if two_modes {
                modes.push(CavityMode::new(Measured::exact(ng2), 0.4));
            }
            let s = synthesize_fringes(&modes, 996.0, &telecom_axis(), 1.0 / snr, trial).unwrap();
            let a = extract_group_indices(&s, Measured::exact(996.0), modes.len()).unwrap();
            for m in &modes {
                let target = m.group_index.value;
                let found = a
                    .peaks
                    .iter()
                    .map(|p| p.group_index.value)
                    .min_by(|x, y| {
                        (x - target).abs().partial_cmp(&(y - target).abs()).unwrap()
                    })
                    .unwrap();
                assert!(
                    (found - target).abs() / target < 0.01,
                    "trial {trial}: {found} vs {target}"
                );
            }
        }
    }

    #[test]
    fn peak_positions_scale_with_length() {
        let mode = CavityMode::new(Measured::exact(3.31), 1.0);
        let s1 = synthesize_fringes(&[mode], 996.0, &telecom_axis(), 0.0, 0).unwrap();
        let s2 = synthesize_fringes(&[mode], 1992.0, &telecom_axis(), 0.0, 0).unwrap();
        let p1 = extract_group_indices(&s1, Measured::exact(996.0), 1).unwrap().peaks[0]
            .position_um
            .value;
        let p2 = extract_group_indices(&s2, Measured::exact(1992.0), 1).unwrap().peaks[0]
            .position_um
            .value;
        assert!((p2 / p1 - 2.0).abs() < 0.002, "ratio {}", p2 / p1);
    }

    #[test]
    fn group_index_invariant_under_intensity_scaling() {
        let mode = CavityMode::new(Measured::exact(3.31), 1.0);
        let s = synthesize_fringes(&[mode], 996.0, &telecom_axis(), 0.005, 21).unwrap();
        let scaled = Spectrum::new(
            s.axis.clone(),
            s.intensity.iter().map(|v| v * 137.0).collect(),
            AxisUnit::WavelengthUm,
        )
        .unwrap();
        let a = extract_group_indices(&s, Measured::exact(996.0), 1).unwrap();
        let b = extract_group_indices(&scaled, Measured::exact(996.0), 1).unwrap();
        assert!(
            (a.peaks[0].group_index.value - b.peaks[0].group_index.value).abs() < 1e-12
        );
    }

    #[test]
    fn window_choice_barely_moves_refined_position() {
        let mode = CavityMode::new(Measured::exact(3.31), 1.0);
        let s = synthesize_fringes(&[mode], 996.0, &telecom_axis(), 0.0, 0).unwrap();
        let length = Measured::exact(996.0);
        let hann = extract_group_indices_windowed(&s, length, 1, Window::Hann).unwrap();
        for w in [Window::Rectangular, Window::Hamming] {
            let other = extract_group_indices_windowed(&s, length, 1, w).unwrap();
            let shift = (hann.peaks[0].position_um.value - other.peaks[0].position_um.value).abs();
            assert!(
                shift < 0.1 * hann.resolution_um,
                "window {w:?} moved the peak by {shift} um (resolution {})",
                hann.resolution_um
            );
        }
    }

    #[test]
    fn kappa_bar_reference_value() {
        // n_g 3.31 (PDC) and 3.72 (pump) over L = 996 um:
        // kbar = (3.31-3.72)/c = -1.3676e-3 ps/um, frozen independently
        let length = Measured::new(996.0, 4.0);
        let pdc = OpticalLengthPeak {
            position_um: Measured::new(2.0 * 3.31 * 996.0, 1.0),
            height: 1.0,
            group_index: Measured::new(3.31, 0.02),
        };
        let pump = OpticalLengthPeak {
            position_um: Measured::new(2.0 * 3.72 * 996.0, 1.5),
            height: 0.3,
            group_index: Measured::new(3.72, 0.03),
        };
        let kbar = kappa_bar_from_optical_lengths(&pdc, &pump, length);
        assert!((kbar.value - (-1.3676127903124238e-3)).abs() < 1e-12);
        // only the position uncertainties propagate
        let expected_sigma = (1.0f64.powi(2) + 1.5f64.powi(2)).sqrt()
            / (2.0 * 996.0 * SPEED_OF_LIGHT_UM_PER_PS);
        assert!((kbar.sigma - expected_sigma).abs() < 1e-18);
        // equal paths give zero
        let same = kappa_bar_from_optical_lengths(&pdc, &pdc, length);
        assert_eq!(same.value, 0.0);
    }

    #[test]
    fn kappa_bar_feeds_bandwidth() {
        // closed loop section-4 pipeline: synthetic fringes at both bands,
        // kbar from the extracted paths, then the phasematching FWHM in nm
        let length = Measured::new(996.0, 4.0);
        let telecom = synthesize_fringes(
            &[CavityMode::new(Measured::exact(3.31), 1.0)],
            length.value,
            &telecom_axis(),
            0.01,
            1,
        )
        .unwrap();
        let nir = synthesize_fringes(
            &[
                CavityMode::new(Measured::exact(4.42), 1.0),
                CavityMode::new(Measured::exact(3.72), 0.15),
            ],
            length.value,
            &nir_axis(),
            0.01,
            2,
        )
        .unwrap();
        let t = extract_group_indices(&telecom, length, 1).unwrap();
        let n = extract_group_indices(&nir, length, 2).unwrap();
        // pump propagates in the Bragg mode: lowest apparent group index
        let bragg = n
            .peaks
            .iter()
            .min_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
            .unwrap();
        let kbar = kappa_bar_from_optical_lengths(&t.peaks[0], bragg, length);
        assert!((kbar.value - (-1.37e-3)).abs() < 0.12e-3);

        let w0 = crate::units::wavelength_to_angular_frequency(crate::units::VacuumWavelength(
            1.5502,
        ))
        .unwrap();
        let spec = crate::jsa::WaveguideSpec::new(length.value, 0.179, w0, w0);
        let params = crate::jsa::DispersionParams::linear(kbar.value, kbar.value);
        let bw = crate::jsa::phasematching_bandwidth(&spec, &params).unwrap();
        let nm = crate::units::detuning_bandwidth_to_wavelength_fwhm(
            crate::units::FrequencyDetuning(bw.intensity_fwhm),
            crate::units::VacuumWavelength(1.5502),
        )
        .unwrap();
        assert!((nm - 3.7).abs() < 0.3, "bandwidth {nm} nm");
    }
}
