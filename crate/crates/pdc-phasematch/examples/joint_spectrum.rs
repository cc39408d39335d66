//! Joint spectral amplitude of a pulsed-pump pair source: normalized
//! joint spectral density on a grid, the Gaussian correlation ellipse,
//! and the phasematching tilt.
//!
//! Run: cargo run --example joint_spectrum

use pdc_phasematch::jsa::*;
use pdc_phasematch::units::*;

fn main() {
    let degeneracy = VacuumWavelength::from_nm(1550.2);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = WaveguideSpec::new(996.0, 0.179, omega0, omega0);
    // slightly asymmetric PDC modes, low curvature
    let kappa = 1.37e-3;
    let params = DispersionParams {
        kappa_s: -0.983 * kappa,
        kappa_i: -kappa,
        k2_s: 0.8e-3 * kappa,
        k2_i: 0.7e-3 * kappa,
        k2_p: 0.0,
    };
    let pump = PumpSpec::pulsed(spec.omega0_p(), 2.0);

    // |f|² on a detuning grid, normalized to unit integral
    let n = 201;
    let half_span = 8.0; // rad/ps
    let step = 2.0 * half_span / (n as f64 - 1.0);
    let mut jsd = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let nu_s = -half_span + step * i as f64;
            let nu_i = -half_span + step * j as f64;
            jsd.push(jsa_amplitude(&spec, &pump, &params, nu_s, nu_i).norm_sqr());
        }
    }
    let normalized = normalize_jsd(&jsd, step * step).unwrap();
    let check: f64 = normalized.iter().sum::<f64>() * step * step;
    println!("normalized JSD integral = {check:.9} over a {n}x{n} grid");

    let axes = ellipse_eigenvalues(&spec, &pump, &params).unwrap();
    println!(
        "correlation ellipse: sigma_minus = {:.4} rad/ps, sigma_plus = {:.4} rad/ps",
        axes.sigma_minus, axes.sigma_plus
    );

    let bw = phasematching_bandwidth(&spec, &params).unwrap();
    println!(
        "phasematching bandwidth sigma_PM = {:.4} rad/ps (pump-independent limit of sigma_minus)",
        bw.sigma_pm
    );

    let tilt = phasematching_tilt(&params, 0.0, 0.0, 0.0).unwrap();
    println!(
        "tilt at degeneracy: slope {:.4}, angle {:.2} deg",
        tilt.slope, tilt.angle_deg
    );

    // with curvature the tilt wanders along the contour
    for nu in [-30.0, 0.0, 30.0] {
        let t = phasematching_tilt(&params, nu, -nu, 0.0).unwrap();
        println!("  at nu_s = {nu:+5.1} rad/ps: {:.2} deg", t.angle_deg);
    }
}
