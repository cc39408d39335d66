//! End-to-end pipeline over the bundled fixtures, mirroring the `pdc`
//! command line: fringe analysis of both bands, Monte Carlo inference on
//! the marginal observations, and the combined dispersion report.
//!
//! Run: cargo run --release --example table_report

use std::path::PathBuf;

use pdc_phasematch::formats;
use pdc_phasematch::fringe::{extract_group_indices, kappa_bar_from_optical_lengths};
use pdc_phasematch::jsa;
use pdc_phasematch::mc::{self, McConfig, ObservationSet};
use pdc_phasematch::units::*;

fn main() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    // --- Fabry-Perot side ---
    let length = Measured::new(996.0, 4.0);
    let telecom = formats::read_spectrum_csv(&fixtures.join("telecom_fringes.csv")).unwrap();
    let nir = formats::read_spectrum_csv(&fixtures.join("nir_fringes.csv")).unwrap();
    let telecom_analysis = extract_group_indices(&telecom, length, 1).unwrap();
    let nir_analysis = extract_group_indices(&nir, length, 2).unwrap();
    let bragg = nir_analysis
        .peaks
        .iter()
        .min_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
        .unwrap();
    let tir_nir = nir_analysis
        .peaks
        .iter()
        .max_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
        .unwrap();
    let tir_telecom = &telecom_analysis.peaks[0];
    let kappa_bar = kappa_bar_from_optical_lengths(tir_telecom, bragg, length);

    let fp_params = formats::ParamFile::load(&fixtures.join("fp_sample_params.json")).unwrap();
    let degeneracy_fp = VacuumWavelength::from_nm(fp_params.degeneracy_nm);
    let omega0 = wavelength_to_angular_frequency(degeneracy_fp).unwrap();
    let spec = jsa::WaveguideSpec::new(length.value, fp_params.waveguide.gamma, omega0, omega0);
    let bw = jsa::phasematching_bandwidth(
        &spec,
        &jsa::DispersionParams::linear(kappa_bar.value, kappa_bar.value),
    )
    .unwrap();
    let fwhm_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(bw.intensity_fwhm), degeneracy_fp)
            .unwrap();

    // --- Monte Carlo side ---
    let obs: ObservationSet =
        formats::read_json(&fixtures.join("fig4_observations.json")).unwrap();
    let config: McConfig = formats::read_json(&fixtures.join("mc_config.json")).unwrap();
    let posterior = mc::run_mc(&config, &obs).unwrap();
    let pumps: Vec<VacuumWavelength> = obs
        .observations
        .iter()
        .map(|o| o.pump_wavelength)
        .collect();
    let derived = mc::derived_quantities(
        &posterior,
        Measured::new(kappa_bar.value.abs(), kappa_bar.sigma),
        obs.degeneracy,
        &pumps[..2],
        &config,
    )
    .unwrap();

    // --- the combined table ---
    let row = |name: &str| posterior.estimate(name).unwrap();
    println!("dispersion summary");
    println!("------------------------------------------------------------");
    println!("n_g TIR   at  775 nm   {:.3} +/- {:.3}", tir_nir.group_index.value, tir_nir.group_index.sigma);
    println!("n_g Bragg at  775 nm   {:.3} +/- {:.3}", bragg.group_index.value, bragg.group_index.sigma);
    println!("n_g TIR   at 1550 nm   {:.3} +/- {:.3}", tir_telecom.group_index.value, tir_telecom.group_index.sigma);
    println!("kappa_bar              {:.3e} ps/um", kappa_bar.value);
    println!("PM bandwidth           {fwhm_nm:.2} nm FWHM");
    println!("kappa_s/kappa_i        {:.4} +/- {:.4}", row("kappa_ratio").mean, row("kappa_ratio").spread);
    println!("K_s/|kappa_i|          {:.2e} +/- {:.2e} ps", row("ks_norm_ps").mean, row("ks_norm_ps").spread);
    println!("K_i/|kappa_i|          {:.2e} +/- {:.2e} ps", row("ki_norm_ps").mean, row("ki_norm_ps").spread);
    println!("delta n_g(s,i)         {:.2e} +/- {:.2e}", derived.delta_ng_signal_idler.value, derived.delta_ng_signal_idler.sigma);
    println!("tilt at degeneracy     {:.2} +/- {:.2} deg", derived.tilt_at_degeneracy_deg.value, derived.tilt_at_degeneracy_deg.sigma);
}
