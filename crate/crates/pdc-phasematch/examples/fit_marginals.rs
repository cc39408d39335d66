//! Peak detection and Gaussian fitting of a noisy marginal spectrum,
//! turning it into a detuning observation with FWHM errorbars — the input
//! format of the Monte Carlo stage.
//!
//! Run: cargo run --example fit_marginals

use rand_core::{RngCore, SeedableRng};

use pdc_phasematch::jsa;
use pdc_phasematch::spectra::*;
use pdc_phasematch::spectrum::{linspace, Spectrum};
use pdc_phasematch::units::*;

fn main() {
    let degeneracy = VacuumWavelength::from_nm(1536.788);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = jsa::WaveguideSpec::new(1870.0, 0.179, omega0, omega0);
    let kappa = 1.37e-3;
    let params = jsa::DispersionParams {
        kappa_s: -0.983 * kappa,
        kappa_i: -kappa,
        k2_s: 0.8e-3 * kappa,
        k2_i: 0.7e-3 * kappa,
        k2_p: 0.0,
    };

    let pump = VacuumWavelength::from_nm(767.1);
    let pump_omega = wavelength_to_angular_frequency(pump).unwrap();
    let delta = pump_omega.0 - spec.omega0_p().0;
    let axis = linspace(-140.0, 130.0, 2701);
    let clean = jsa::marginal_spectrum(&spec, &params, pump_omega, &axis).unwrap();

    // few-photon counting noise, 2% of the unit peak
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let noisy: Vec<f64> = clean
        .intensity
        .iter()
        .map(|&v| {
            let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
            let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (v + 0.02 * z).max(0.0)
        })
        .collect();
    let measured = Spectrum::new(axis, noisy, clean.unit).unwrap();

    let seeds = detect_peaks(&measured, 2, DEFAULT_MIN_PROMINENCE);
    println!("detected {} coarse peak(s) at sample indices {seeds:?}", seeds.len());

    let fit = fit_gaussians(&measured, &seeds).unwrap();
    println!(
        "fit converged after {} iterations; residual {:.3e} (started at {:.3e})",
        fit.iterations, fit.ssr, fit.ssr_initial
    );

    let obs = observation_from_spectrum(&measured, pump, degeneracy, &[], Beam::Signal).unwrap();
    let roots = jsa::marginal_contour_roots(&params, delta, true).unwrap();
    println!("contour roots at delta = {delta:.3} rad/ps: {roots:?}");
    for p in &obs.peaks {
        let nearest = roots
            .iter()
            .min_by(|a, b| {
                (*a - p.center).abs().partial_cmp(&(*b - p.center).abs()).unwrap()
            })
            .unwrap();
        println!(
            "peak: center {:+8.3} rad/ps (FWHM {:6.2}), nearest root {:+8.3}, offset {:+.3}{}",
            p.center,
            p.fwhm,
            nearest,
            p.center - nearest,
            if p.low_confidence { "  [low confidence]" } else { "" }
        );
    }
}
