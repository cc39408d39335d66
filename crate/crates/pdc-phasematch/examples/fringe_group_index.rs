//! Closed-loop Fabry-Perot analysis: synthesize multimode fringes, pull
//! the group indices back out of the Fourier domain, and turn them into a
//! phasematching bandwidth.
//!
//! Run: cargo run --example fringe_group_index

use pdc_phasematch::fringe::{
    extract_group_indices, kappa_bar_from_optical_lengths, synthesize_fringes, CavityMode,
};
use pdc_phasematch::jsa::{phasematching_bandwidth, DispersionParams, WaveguideSpec};
use pdc_phasematch::spectrum::linspace;
use pdc_phasematch::units::*;

fn main() {
    let length = Measured::new(996.0, 4.0);

    // telecom band: only the TIR mode is excited
    let telecom = synthesize_fringes(
        &[CavityMode::new(Measured::exact(3.31), 1.0)],
        length.value,
        &linspace(1.523, 1.594, 7100),
        0.01, // peak/noise = 100
        1,
    )
    .unwrap();
    let telecom_analysis = extract_group_indices(&telecom, length, 1).unwrap();
    let pdc_peak = &telecom_analysis.peaks[0];
    println!(
        "telecom: path {:.1} um -> n_g = {:.4} +/- {:.4}",
        pdc_peak.position_um.value, pdc_peak.group_index.value, pdc_peak.group_index.sigma
    );

    // NIR band: strong TIR mode plus a weakly coupled Bragg mode
    let nir = synthesize_fringes(
        &[
            CavityMode::new(Measured::exact(4.42), 1.0),
            CavityMode::new(Measured::exact(3.72), 0.15),
        ],
        length.value,
        &linspace(0.760, 0.790, 3000),
        0.01,
        2,
    )
    .unwrap();
    let nir_analysis = extract_group_indices(&nir, length, 2).unwrap();
    for p in &nir_analysis.peaks {
        println!(
            "NIR:     path {:.1} um -> n_g = {:.4} +/- {:.4}",
            p.position_um.value, p.group_index.value, p.group_index.sigma
        );
    }

    // the pump propagates in the Bragg mode: lowest apparent group index
    let bragg = nir_analysis
        .peaks
        .iter()
        .min_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
        .unwrap();
    let kappa_bar = kappa_bar_from_optical_lengths(pdc_peak, bragg, length);
    println!("kappa_bar = {:.4e} +/- {:.1e} ps/um", kappa_bar.value, kappa_bar.sigma);

    let degeneracy = VacuumWavelength::from_nm(1550.2);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = WaveguideSpec::new(length.value, 0.179, omega0, omega0);
    let bw = phasematching_bandwidth(
        &spec,
        &DispersionParams::linear(kappa_bar.value, kappa_bar.value),
    )
    .unwrap();
    let fwhm_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(bw.intensity_fwhm), degeneracy)
            .unwrap();
    println!("phasematching FWHM = {fwhm_nm:.2} nm at {} nm", degeneracy.nm());
}
