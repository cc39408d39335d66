//! Regenerates the versioned fixture files. Run manually after a
//! deliberate change to the fixture recipe:
//!
//! ```bash
//! cargo test -p pdc-phasematch --test regen_fixtures -- --ignored
//! ```
//!
//! The committed fixtures are the reference inputs for the acceptance
//! suite and the CLI tests; regenerating them is a reviewed change, not a
//! side effect of the normal test run.

use std::path::PathBuf;

use pdc_phasematch::formats;
use pdc_phasematch::fringe::{synthesize_fringes, CavityMode};
use pdc_phasematch::jsa;
use pdc_phasematch::mc::{Branch, ExcludedBranch, ObservationSet};
use pdc_phasematch::spectra::{observation_from_spectrum, Beam, MaskInterval};
use pdc_phasematch::spectrum::{linspace, AxisUnit, Spectrum};
use pdc_phasematch::units::*;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Pump wavelengths of the marginal-spectra scan, nm. The six Figure-style
/// panels plus intermediate settings across the same 768.3-766.7 nm range.
const PUMP_SCAN_NM: [f64; 12] = [
    768.3, 768.2, 768.1, 768.0, 767.9, 767.8, 767.65, 767.5, 767.3, 767.1, 766.9, 766.7,
];

/// Detector cutoff of the InGaAs array.
const CUTOFF_NM: f64 = 1650.0;

/// Intensity noise added to the synthetic marginals (unit-peak scale).
const MARGINAL_NOISE: f64 = 0.015;

fn add_noise(s: &Spectrum, sigma: f64, seed: u64) -> Spectrum {
    use rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noisy: Vec<f64> = s
        .intensity
        .iter()
        .map(|&v| {
            let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
            let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (v + sigma * z).max(0.0)
        })
        .collect();
    Spectrum::new(s.axis.clone(), noisy, s.unit).unwrap()
}

#[test]
#[ignore = "writes into fixtures/; run deliberately"]
fn regenerate_fixtures() {
    let dir = fixtures_dir();

    // --- fringe spectra (section-4 style inputs) ---
    let telecom = synthesize_fringes(
        &[CavityMode::new(Measured::exact(3.31), 1.0)],
        996.0,
        &linspace(1.523, 1.594, 7100),
        0.01,
        20260809,
    )
    .unwrap();
    formats::write_spectrum_csv(&dir.join("telecom_fringes.csv"), &telecom).unwrap();

    let nir = synthesize_fringes(
        &[
            CavityMode::new(Measured::exact(4.42), 1.0),
            CavityMode::new(Measured::exact(3.72), 0.15),
        ],
        996.0,
        &linspace(0.760, 0.790, 3000),
        0.01,
        20260810,
    )
    .unwrap();
    formats::write_spectrum_csv(&dir.join("nir_fringes.csv"), &nir).unwrap();

    // detector noise with no cavity signal at all
    let noise_only = synthesize_fringes(
        &[CavityMode::new(Measured::exact(3.31), 0.0)],
        996.0,
        &linspace(1.523, 1.594, 2048),
        0.05,
        3,
    )
    .unwrap();
    formats::write_spectrum_csv(&dir.join("noise_only.csv"), &noise_only).unwrap();

    // --- marginal-spectra observation set (section-5 style input) ---
    let params_file = formats::ParamFile::load(&dir.join("marginal_sample_params.json")).unwrap();
    let (dispersion, _) = params_file.dispersion.to_physical();
    let degeneracy = VacuumWavelength::from_nm(params_file.degeneracy_nm);
    let omega0 = wavelength_to_angular_frequency(degeneracy).unwrap();
    let spec = jsa::WaveguideSpec::new(
        params_file.waveguide.length_um,
        params_file.waveguide.gamma,
        omega0,
        omega0,
    );
    let cutoff = MaskInterval {
        lo_nm: CUTOFF_NM,
        hi_nm: None,
    };
    let axis = linspace(-140.0, 130.0, 2701);

    let mut observations = Vec::new();
    for (i, &pump_nm) in PUMP_SCAN_NM.iter().enumerate() {
        let pump = VacuumWavelength::from_nm(pump_nm);
        let pump_omega = wavelength_to_angular_frequency(pump).unwrap();
        for (b, beam) in [Beam::Signal, Beam::Idler].into_iter().enumerate() {
            let beam_params = match beam {
                Beam::Signal => dispersion,
                Beam::Idler => dispersion.swap_roles(),
            };
            let clean = jsa::marginal_spectrum(&spec, &beam_params, pump_omega, &axis).unwrap();
            let noisy = add_noise(&clean, MARGINAL_NOISE, 1000 + (i * 2 + b) as u64);
            let obs =
                observation_from_spectrum(&noisy, pump, degeneracy, &[cutoff], beam).unwrap();
            assert!(!obs.peaks.is_empty(), "{pump_nm} nm {beam:?} lost all peaks");
            observations.push(obs);
        }
    }
    let set = ObservationSet {
        degeneracy,
        observations,
        excluded_branches: vec![ExcludedBranch {
            beam: Beam::Signal,
            branch: Branch::Lower,
        }],
        provenance: Some(
            "Reconstructed marginal-spectrum observations: forward model with the published \
             dispersion ratios (0.983, 0.8e-3 ps, 0.7e-3 ps), L = 1.87 mm, pump scan \
             768.3-766.7 nm against a 768.394 nm phasematching point, 1.5% intensity noise, \
             1650 nm detector cutoff, signal lower sideband excluded. Peak centers and FWHM \
             errorbars come from the same detection/fit pipeline applied to measurements."
                .into(),
        ),
    };
    formats::write_json(&dir.join("fig4_observations.json"), &set).unwrap();

    // sanity: the reconstruction reproduces the qualitative anchors
    let near = &set.observations[0];
    assert_eq!(near.peaks.len(), 1, "near-degenerate band must be merged");
    let width_nm = detuning_bandwidth_to_wavelength_fwhm(
        FrequencyDetuning(near.peaks[0].fwhm),
        degeneracy,
    )
    .unwrap();
    assert!(
        (80.0..=115.0).contains(&width_nm),
        "near-degenerate band width {width_nm} nm should be about 90 nm"
    );
    let last_idler = set
        .observations
        .iter()
        .rev()
        .find(|o| o.beam == Beam::Idler)
        .unwrap();
    let split = last_idler.peaks[1].center - last_idler.peaks[0].center;
    let split_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(split), degeneracy).unwrap();
    assert!(
        (150.0..=250.0).contains(&split_nm),
        "maximum splitting {split_nm} nm should be on the order of 200 nm"
    );
    // the signal lower sideband at maximum detuning falls beyond the cutoff
    let last_signal = set
        .observations
        .iter()
        .rev()
        .find(|o| o.beam == Beam::Signal)
        .unwrap();
    assert_eq!(
        last_signal.peaks.len(),
        1,
        "signal lower peak at max detuning must be masked by the 1650 nm cutoff"
    );

    // every stored peak is in detuning units
    for o in &set.observations {
        for p in &o.peaks {
            assert_eq!(p.unit, AxisUnit::AngularFrequencyRadPerPs);
        }
    }
}
