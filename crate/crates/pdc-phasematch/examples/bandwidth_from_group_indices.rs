//! Phasematching bandwidth from measured group indices.
//!
//! The group-index difference between the PDC and pump modes, divided by
//! c, gives the linear phase-mismatch coefficient. Together with the
//! waveguide length and the sinc-to-Gaussian factor it fixes the
//! phasematching bandwidth.
//!
//! Run: cargo run --example bandwidth_from_group_indices

use pdc_phasematch::jsa::{
    gamma_from_sinc_matching, phasematching_bandwidth, DispersionParams, WaveguideSpec,
};
use pdc_phasematch::units::*;

fn main() {
    // group indices from the Fabry-Perot experiments
    let ng_pdc = 3.31; // telecom TIR mode
    let ng_pump = 3.72; // NIR Bragg mode
    let kappa_bar = (ng_pdc - ng_pump) / SPEED_OF_LIGHT_UM_PER_PS;
    println!("kappa_bar = (n_pdc - n_pump)/c = {kappa_bar:.4e} ps/um");

    // the sinc²-to-Gaussian² FWHM matching factor, derived from scratch
    let gamma = gamma_from_sinc_matching();
    println!("gamma = ln2/(2 x0^2) = {gamma:.5}");

    let degeneracy = VacuumWavelength::from_nm(1550.2);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = WaveguideSpec::new(996.0, gamma, omega0, omega0);
    let params = DispersionParams::linear(kappa_bar, kappa_bar);

    let bw = phasematching_bandwidth(&spec, &params).unwrap();
    let fwhm_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(bw.intensity_fwhm), degeneracy)
            .unwrap();
    println!("sigma_PM        = {:.4} rad/ps", bw.sigma_pm);
    println!("intensity FWHM  = {:.4} rad/ps", bw.intensity_fwhm);
    println!("                = {fwhm_nm:.2} nm at {} nm", degeneracy.nm());

    // doubling the interaction length halves the bandwidth
    let long = WaveguideSpec::new(2.0 * 996.0, gamma, omega0, omega0);
    let bw2 = phasematching_bandwidth(&long, &params).unwrap();
    println!(
        "doubling L: sigma_PM {:.4} -> {:.4} rad/ps",
        bw.sigma_pm, bw2.sigma_pm
    );
}
