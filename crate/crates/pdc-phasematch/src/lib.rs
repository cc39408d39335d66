//! Spectral characterization of parametric down-conversion (PDC) in
//! multimode waveguides.
//!
//! The crate models how the dispersion of a χ² waveguide shapes its
//! photon-pair emission, and inverts spectral measurements back into
//! dispersion parameters:
//!
//! - [`units`] — physical quantities (rad/ps, µm, ps) and uncertainty-
//!   carrying scalars.
//! - [`jsa`] — phase mismatch, joint spectral amplitude, Gaussian-ellipse
//!   approximation, phasematching bandwidth/tilt, CW marginal spectra and
//!   the contour-root solver.
//! - [`fringe`] — Fabry-Perot fringe synthesis and Fourier-domain group
//!   index extraction (modal optical lengths at 2·n_g·L).
//! - [`spectra`] — peak detection and Gaussian fitting of marginal
//!   spectra into detuning observations with FWHM errorbars.
//! - [`mc`] — deterministic Monte Carlo rejection sampling of the
//!   normalized dispersion parameters (κ_s/κ_i, K_s/|κ_i|, K_i/|κ_i|)
//!   plus a pump-detuning calibration offset.
//! - [`formats`] / [`cli`] — the file formats and the `pdc` command-line
//!   pipeline gluing the stages together.
//!
//! Start with the runnable examples: each major capability has one under
//! `examples/`.

pub mod cli;
pub mod formats;
pub mod fringe;
pub mod jsa;
pub mod mc;
pub mod spectra;
pub mod spectrum;
pub mod units;

pub use jsa::{DispersionParams, PumpSpec, WaveguideSpec};
pub use spectrum::{AxisUnit, Spectrum};
pub use units::{AngularFrequency, FrequencyDetuning, Measured, VacuumWavelength};
