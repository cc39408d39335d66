//! CW-pumped marginal spectra versus pump wavelength: a single band near
//! degeneracy splits into two bands whose separation grows with the pump
//! detuning, tracing out the curved phasematching contour.
//!
//! Run: cargo run --example marginal_splitting

use pdc_phasematch::jsa::*;
use pdc_phasematch::spectrum::linspace;
use pdc_phasematch::units::*;

fn main() {
    let degeneracy = VacuumWavelength::from_nm(1536.788);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = WaveguideSpec::new(1870.0, 0.179, omega0, omega0);
    let kappa = 1.37e-3;
    let params = DispersionParams {
        kappa_s: -0.983 * kappa,
        kappa_i: -kappa,
        k2_s: 0.8e-3 * kappa,
        k2_i: 0.7e-3 * kappa,
        k2_p: 0.0,
    };

    let axis = linspace(-140.0, 130.0, 5401);
    println!("pump nm   delta      signal contour roots (rad/ps)   splitting");
    for pump_nm in [768.3, 768.0, 767.8, 767.5, 767.1, 766.7] {
        let pump_omega =
            wavelength_to_angular_frequency(VacuumWavelength::from_nm(pump_nm)).unwrap();
        let delta = pump_omega.0 - spec.omega0_p().0;
        let roots = marginal_contour_roots(&params, delta, true).unwrap();
        let marginal = marginal_spectrum(&spec, &params, pump_omega, &axis).unwrap();

        // the grid maxima of the spectrum sit on the contour roots
        let imax = marginal.argmax().unwrap();
        assert!(roots
            .iter()
            .any(|r| (marginal.axis[imax] - r).abs() <= axis[1] - axis[0] + 1e-12));

        match roots.len() {
            2 => {
                let split = roots[1] - roots[0];
                let split_nm = detuning_bandwidth_to_wavelength_fwhm(
                    FrequencyDetuning(split),
                    degeneracy,
                )
                .unwrap();
                println!(
                    "{pump_nm:7.1} {delta:+8.3}   [{:+9.3}, {:+9.3}]          {split:7.2} rad/ps = {split_nm:6.1} nm",
                    roots[0], roots[1]
                );
            }
            _ => println!("{pump_nm:7.1} {delta:+8.3}   {roots:?}"),
        }
    }
}
