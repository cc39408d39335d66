//! Command implementations behind the `pdc` binary. Each command is a
//! pure function of its input files, flags and seeds.
//!
//! Exit-code contract: 0 success, 1 I/O or parse failure, 2 analysis
//! found nothing (no fringes), 3 inference found nothing (empty
//! posterior), 64 usage error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{self, FormatError, ParamFile};
use crate::fringe::{self, CavityMode, FringeAnalysis, FringeError};
use crate::jsa::{self, WaveguideSpec};
use crate::mc::{self, McConfig, McError, McPosterior};
use crate::spectra::Beam;
use crate::spectrum::Spectrum;
use crate::units::{
    detuning_bandwidth_to_wavelength_fwhm, wavelength_to_angular_frequency, FrequencyDetuning,
    Measured, VacuumWavelength,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO_OR_PARSE: i32 = 1;
pub const EXIT_ANALYSIS_EMPTY: i32 = 2;
pub const EXIT_INFERENCE_EMPTY: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("no fringes found: {0}")]
    NoFringe(FringeError),
    #[error("{0}")]
    InferenceEmpty(McError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(_) | CliError::Analysis(_) => EXIT_IO_OR_PARSE,
            CliError::NoFringe(_) => EXIT_ANALYSIS_EMPTY,
            CliError::InferenceEmpty(_) => EXIT_INFERENCE_EMPTY,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Spectral toolkit for parametric down-conversion waveguides: Fabry-Perot
/// group-index extraction, phasematching bandwidth, marginal spectra and
/// Monte Carlo dispersion inference.
#[derive(Debug, Parser)]
#[command(name = "pdc", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract modal group indices from a Fabry-Perot fringe spectrum.
    FpAnalyze(FpAnalyzeArgs),
    /// Synthesize a multimode Fabry-Perot transmission spectrum.
    SynthFringes(SynthFringesArgs),
    /// Phasematching bandwidth from dispersion parameters.
    Bandwidth(BandwidthArgs),
    /// CW-pumped marginal spectra and their contour roots.
    Marginals(MarginalsArgs),
    /// Monte Carlo inference of normalized dispersion parameters.
    McFit(McFitArgs),
    /// Combine fringe and Monte Carlo results into one dispersion report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct FpAnalyzeArgs {
    /// Fringe spectrum CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Waveguide length, µm.
    #[arg(long = "length-um")]
    pub length_um: f64,
    /// One-sigma length uncertainty, µm.
    #[arg(long = "length-sigma-um", default_value_t = 0.0)]
    pub length_sigma_um: f64,
    /// Maximum number of modes to report.
    #[arg(long = "max-modes")]
    pub max_modes: usize,
    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthFringesArgs {
    /// Group index per mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ng: Vec<f64>,
    /// Relative coupled power per mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    #[arg(long = "length-um")]
    pub length_um: f64,
    /// Wavelength band as `lo,hi` in nm.
    #[arg(long = "band-nm", value_delimiter = ',', num_args = 2)]
    pub band_nm: Vec<f64>,
    /// Number of wavelength samples.
    #[arg(long)]
    pub points: usize,
    /// Additive Gaussian noise standard deviation (intensity units).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Facet power reflectivity.
    #[arg(long, default_value_t = fringe::DEFAULT_FACET_REFLECTIVITY)]
    pub reflectivity: f64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BandwidthArgs {
    /// Parameter file (JSON).
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MarginalsArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Pump wavelengths in nm, comma separated.
    #[arg(long = "pump-nm", value_delimiter = ',')]
    pub pump_nm: Vec<f64>,
    /// Wavelength axis as `lo,hi,n` (nm, nm, samples).
    #[arg(long = "axis-nm", value_delimiter = ',', num_args = 3)]
    pub axis_nm: Vec<f64>,
    /// Directory for the per-pump, per-beam CSV files and the roots JSON.
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct McFitArgs {
    /// ObservationSet JSON.
    #[arg(long)]
    pub obs: PathBuf,
    /// McConfig JSON (missing fields take their defaults).
    #[arg(long)]
    pub config: PathBuf,
    /// Posterior JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional directory for per-parameter histogram CSVs.
    #[arg(long = "hist-csv")]
    pub hist_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Posterior JSON from `mc-fit`.
    #[arg(long)]
    pub posterior: PathBuf,
    /// Combined fringe JSON: `{"telecom": <fp-analyze out>, "nir": <fp-analyze out>}`.
    #[arg(long)]
    pub fringe: PathBuf,
    /// Parameter file of the fringe sample (gamma and degeneracy).
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Run a parsed command, writing outputs and returning messages for
/// stdout.
pub fn run(command: Command) -> Result<Vec<String>, CliError> {
    match command {
        Command::FpAnalyze(args) => fp_analyze(args),
        Command::SynthFringes(args) => synth_fringes(args),
        Command::Bandwidth(args) => bandwidth(args),
        Command::Marginals(args) => marginals(args),
        Command::McFit(args) => mc_fit(args),
        Command::Report(args) => report(args),
    }
}

fn fp_analyze(args: FpAnalyzeArgs) -> Result<Vec<String>, CliError> {
    if args.max_modes == 0 {
        return Err(usage("--max-modes must be at least 1"));
    }
    if !(args.length_um > 0.0) {
        return Err(usage("--length-um must be positive"));
    }
    if args.length_sigma_um < 0.0 {
        return Err(usage("--length-sigma-um must be non-negative"));
    }
    let spectrum = formats::read_spectrum_csv(&args.input)?;
    let length = Measured::new(args.length_um, args.length_sigma_um);
    let analysis = match fringe::extract_group_indices(&spectrum, length, args.max_modes) {
        Ok(a) => a,
        Err(e @ FringeError::NoFringe) => return Err(CliError::NoFringe(e)),
        Err(e) => return Err(CliError::Analysis(format!("{}: {e}", args.input.display()))),
    };
    formats::write_json(&args.out, &analysis)?;
    let mut lines = vec![format!(
        "{} mode(s) above the noise floor; resolution {:.2} um",
        analysis.peaks.len(),
        analysis.resolution_um
    )];
    for p in &analysis.peaks {
        lines.push(format!(
            "  path {:.2} um -> n_g = {:.4} +/- {:.4}",
            p.position_um.value, p.group_index.value, p.group_index.sigma
        ));
    }
    lines.extend(analysis.warnings.iter().map(|w| format!("warning: {w}")));
    Ok(lines)
}

fn synth_fringes(args: SynthFringesArgs) -> Result<Vec<String>, CliError> {
    if args.ng.is_empty() {
        return Err(usage("--ng needs at least one group index"));
    }
    if args.ng.len() != args.weights.len() {
        return Err(usage(format!(
            "--ng and --weights must have the same length ({} vs {})",
            args.ng.len(),
            args.weights.len()
        )));
    }
    let [lo, hi] = args.band_nm[..] else {
        return Err(usage("--band-nm needs exactly `lo,hi`"));
    };
    if !(lo > 0.0 && hi > lo) {
        return Err(usage("--band-nm needs 0 < lo < hi"));
    }
    if args.points < 8 {
        return Err(usage("--points must be at least 8"));
    }
    if !(args.length_um > 0.0) {
        return Err(usage("--length-um must be positive"));
    }
    if !(0.0..1.0).contains(&args.reflectivity) {
        return Err(usage("--reflectivity must be in [0, 1)"));
    }
    if args.noise < 0.0 {
        return Err(usage("--noise must be non-negative"));
    }
    let modes: Vec<CavityMode> = args
        .ng
        .iter()
        .zip(&args.weights)
        .map(|(&ng, &w)| {
            if !(ng > 1.0) {
                return Err(usage(format!("group index {ng} must exceed 1")));
            }
            if w < 0.0 {
                return Err(usage(format!("weight {w} must be non-negative")));
            }
            Ok(CavityMode::new(Measured::exact(ng), w).with_reflectivity(args.reflectivity))
        })
        .collect::<Result<_, _>>()?;
    let axis = crate::spectrum::linspace(lo * 1e-3, hi * 1e-3, args.points);
    let spectrum = fringe::synthesize_fringes(&modes, args.length_um, &axis, args.noise, args.seed)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    formats::write_spectrum_csv(&args.out, &spectrum)?;
    Ok(vec![format!(
        "wrote {} samples over {lo}-{hi} nm to {}",
        args.points,
        args.out.display()
    )])
}

/// Output of the `bandwidth` command; echoes its inputs for provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub inputs: ParamFile,
    pub sigma_pm_rad_per_ps: f64,
    pub intensity_fwhm_rad_per_ps: f64,
    pub intensity_fwhm_nm: Measured,
}

fn bandwidth_from_params(params_file: &ParamFile) -> Result<BandwidthReport, CliError> {
    let (dispersion, kappa_abs) = params_file.dispersion.to_physical();
    let degeneracy = VacuumWavelength::from_nm(params_file.degeneracy_nm);
    let omega0 = wavelength_to_angular_frequency(degeneracy)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let spec = WaveguideSpec::new(
        params_file.waveguide.length_um,
        params_file.waveguide.gamma,
        omega0,
        omega0,
    );
    let bw = jsa::phasematching_bandwidth(&spec, &dispersion)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let fwhm_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(bw.intensity_fwhm), degeneracy)
            .map_err(|e| CliError::Analysis(e.to_string()))?;
    // sigma_PM scales as 1/|kappa|, so the relative error carries over
    let fwhm_nm_sigma = fwhm_nm * kappa_abs.relative_sigma().min(1.0);
    Ok(BandwidthReport {
        inputs: params_file.clone(),
        sigma_pm_rad_per_ps: bw.sigma_pm,
        intensity_fwhm_rad_per_ps: bw.intensity_fwhm,
        intensity_fwhm_nm: Measured::new(fwhm_nm, fwhm_nm_sigma),
    })
}

fn bandwidth(args: BandwidthArgs) -> Result<Vec<String>, CliError> {
    let params_file = ParamFile::load(&args.params)?;
    let report = bandwidth_from_params(&params_file)?;
    formats::write_json(&args.out, &report)?;
    Ok(vec![format!(
        "sigma_PM = {:.4} rad/ps, intensity FWHM = {:.4} rad/ps = {:.3} nm at {} nm",
        report.sigma_pm_rad_per_ps,
        report.intensity_fwhm_rad_per_ps,
        report.intensity_fwhm_nm.value,
        params_file.degeneracy_nm
    )])
}

/// Contour roots accompanying the marginal spectra of one pump setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginalRoots {
    pub pump_nm: f64,
    pub delta_rad_per_ps: f64,
    pub signal_roots_rad_per_ps: Vec<f64>,
    pub idler_roots_rad_per_ps: Vec<f64>,
}

fn marginals(args: MarginalsArgs) -> Result<Vec<String>, CliError> {
    let [lo, hi, n] = args.axis_nm[..] else {
        return Err(usage("--axis-nm needs exactly `lo,hi,n`"));
    };
    let n_points = n as usize;
    if !(lo > 0.0 && hi > lo) || n_points < 2 || n != n_points as f64 {
        return Err(usage("--axis-nm needs 0 < lo < hi and an integer n >= 2"));
    }
    if args.pump_nm.is_empty() {
        return Err(usage("--pump-nm needs at least one wavelength"));
    }
    let params_file = ParamFile::load(&args.params)?;
    let (dispersion, _) = params_file.dispersion.to_physical();
    let degeneracy = VacuumWavelength::from_nm(params_file.degeneracy_nm);
    let omega0 = wavelength_to_angular_frequency(degeneracy)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let spec = WaveguideSpec::new(
        params_file.waveguide.length_um,
        params_file.waveguide.gamma,
        omega0,
        omega0,
    );

    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Format(FormatError::Io {
            path: args.out_dir.display().to_string(),
            source: e,
        })
    })?;

    // detuning axis, ascending (wavelength axis descending)
    let lambda_grid = crate::spectrum::linspace(lo * 1e-3, hi * 1e-3, n_points);
    let mut nu_axis: Vec<f64> = lambda_grid
        .iter()
        .map(|&l| {
            wavelength_to_angular_frequency(VacuumWavelength(l))
                .map(|w| w.0 - omega0.0)
                .map_err(|e| CliError::Analysis(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    nu_axis.reverse();

    let mut lines = Vec::new();
    let mut roots_out = Vec::new();
    for &pump_nm in &args.pump_nm {
        let pump_omega =
            wavelength_to_angular_frequency(VacuumWavelength::from_nm(pump_nm))
                .map_err(|e| CliError::Analysis(e.to_string()))?;
        let delta = pump_omega.0 - spec.omega0_p().0;
        for beam in [Beam::Signal, Beam::Idler] {
            let beam_params = match beam {
                Beam::Signal => dispersion,
                Beam::Idler => dispersion.swap_roles(),
            };
            let marginal = jsa::marginal_spectrum(&spec, &beam_params, pump_omega, &nu_axis)
                .map_err(|e| CliError::Analysis(e.to_string()))?;
            // back onto the wavelength axis for the CSV
            let intensity: Vec<f64> = marginal.intensity.iter().rev().copied().collect();
            let out = Spectrum::new(
                lambda_grid.clone(),
                intensity,
                crate::spectrum::AxisUnit::WavelengthUm,
            )
            .map_err(|e| CliError::Analysis(e.to_string()))?;
            let beam_tag = match beam {
                Beam::Signal => "signal",
                Beam::Idler => "idler",
            };
            let file = args.out_dir.join(format!("marginal_{pump_nm}nm_{beam_tag}.csv"));
            formats::write_spectrum_csv(&file, &out)?;
            lines.push(format!("wrote {}", file.display()));
        }
        let signal_roots = jsa::marginal_contour_roots(&dispersion, delta, false)
            .map_err(|e| CliError::Analysis(e.to_string()))?;
        let mut idler_roots: Vec<f64> = signal_roots.iter().map(|&r| delta - r).collect();
        idler_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots_out.push(MarginalRoots {
            pump_nm,
            delta_rad_per_ps: delta,
            signal_roots_rad_per_ps: signal_roots,
            idler_roots_rad_per_ps: idler_roots,
        });
    }
    let roots_path = args.out_dir.join("contour_roots.json");
    formats::write_json(&roots_path, &roots_out)?;
    lines.push(format!("wrote {}", roots_path.display()));
    Ok(lines)
}

/// Worker-count cap from PDC_THREADS (0 or unset = library default).
fn worker_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    match std::env::var("PDC_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => {
            let n: usize = s
                .parse()
                .map_err(|_| usage(format!("PDC_THREADS must be a non-negative integer, got `{s}`")))?;
            if n == 0 {
                Ok(None)
            } else {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map(Some)
                    .map_err(|e| CliError::Analysis(format!("failed to build worker pool: {e}")))
            }
        }
    }
}

fn mc_fit(args: McFitArgs) -> Result<Vec<String>, CliError> {
    let obs: mc::ObservationSet = formats::read_json(&args.obs)?;
    let config: McConfig = formats::read_json(&args.config)?;
    let run = || mc::run_mc(&config, &obs);
    let result = match worker_pool()? {
        Some(pool) => pool.install(run),
        None => run(),
    };
    let posterior = match result {
        Ok(p) => p,
        Err(e @ McError::EmptyPosterior { .. }) => return Err(CliError::InferenceEmpty(e)),
        Err(e) => return Err(CliError::Analysis(e.to_string())),
    };
    formats::write_json(&args.out, &posterior)?;
    if let Some(dir) = &args.hist_csv {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::Format(FormatError::Io {
                path: dir.display().to_string(),
                source: e,
            })
        })?;
        for h in &posterior.histograms {
            let mut text = String::from("bin_lo,bin_hi,count\n");
            for (k, &c) in h.counts.iter().enumerate() {
                text.push_str(&format!("{:.16e},{:.16e},{c}\n", h.edges[k], h.edges[k + 1]));
            }
            let path = dir.join(format!("hist_{}.csv", h.name));
            std::fs::write(&path, text).map_err(|e| {
                CliError::Format(FormatError::Io {
                    path: path.display().to_string(),
                    source: e,
                })
            })?;
        }
    }
    Ok(vec![format!(
        "accepted {} of {} samples (rate {:.3e})",
        posterior.accepted.len(),
        posterior.n_runs,
        posterior.acceptance_rate
    )])
}

/// Combined fringe summary consumed by `report`: one analysis per band.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FringeSummaryFile {
    /// Telecom-band analysis (the PDC modes; single TIR peak expected).
    pub telecom: FringeAnalysis,
    /// NIR analysis (TIR plus the Bragg pump mode).
    pub nir: FringeAnalysis,
}

/// One Table-style dispersion summary combining both experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionReport {
    pub fringe: FringeRows,
    pub monte_carlo: McRows,
    pub derived: mc::DerivedReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FringeRows {
    /// NIR total-internal-reflection mode.
    pub ng_tir_nir: Measured,
    /// NIR Bragg mode (the pump), identified as the lowest apparent group
    /// index.
    pub ng_bragg_nir: Measured,
    /// Telecom TIR mode (the PDC wavelengths).
    pub ng_tir_telecom: Measured,
    pub kappa_bar_ps_per_um: Measured,
    pub pm_bandwidth_sigma_rad_per_ps: f64,
    pub pm_bandwidth_fwhm_rad_per_ps: f64,
    pub pm_bandwidth_fwhm_nm: Measured,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McRows {
    /// Posterior means with the posterior spread; the stable point
    /// estimates for these plateau-shaped marginals.
    pub kappa_ratio: Measured,
    pub ks_norm_ps: Measured,
    pub ki_norm_ps: Measured,
    pub delta_offset_rad_per_ps: Measured,
    pub acceptance_rate: f64,
}

fn report(args: ReportArgs) -> Result<Vec<String>, CliError> {
    let posterior: McPosterior = formats::read_json(&args.posterior)?;
    let fringes: FringeSummaryFile = formats::read_json(&args.fringe)?;
    let params_file = ParamFile::load(&args.params)?;

    let context = posterior.context.clone().ok_or_else(|| {
        CliError::Analysis(format!(
            "{}: posterior lacks inference context; produce it with `pdc mc-fit`",
            args.posterior.display()
        ))
    })?;

    if fringes.nir.peaks.len() < 2 {
        return Err(CliError::Analysis(
            "NIR fringe analysis must resolve both the TIR and Bragg modes".into(),
        ));
    }
    if fringes.telecom.peaks.is_empty() {
        return Err(CliError::Analysis("telecom fringe analysis has no peaks".into()));
    }
    let bragg = fringes
        .nir
        .peaks
        .iter()
        .min_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
        .expect("non-empty");
    let tir_nir = fringes
        .nir
        .peaks
        .iter()
        .max_by(|a, b| a.group_index.value.partial_cmp(&b.group_index.value).unwrap())
        .expect("non-empty");
    let tir_telecom = &fringes.telecom.peaks[0];

    let kappa_bar = fringe::kappa_bar_from_optical_lengths(
        tir_telecom,
        bragg,
        fringes.telecom.length_um,
    );

    // bandwidth of the fringe sample from kappa_bar (kappa_s = kappa_i)
    let degeneracy_fringe = VacuumWavelength::from_nm(params_file.degeneracy_nm);
    let omega0 = wavelength_to_angular_frequency(degeneracy_fringe)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let spec = WaveguideSpec::new(
        fringes.telecom.length_um.value,
        params_file.waveguide.gamma,
        omega0,
        omega0,
    );
    let bw = jsa::phasematching_bandwidth(
        &spec,
        &jsa::DispersionParams::linear(kappa_bar.value, kappa_bar.value),
    )
    .map_err(|e| CliError::Analysis(e.to_string()))?;
    let fwhm_nm =
        detuning_bandwidth_to_wavelength_fwhm(FrequencyDetuning(bw.intensity_fwhm), degeneracy_fringe)
            .map_err(|e| CliError::Analysis(e.to_string()))?;
    let fwhm_nm_sigma = fwhm_nm * kappa_bar.relative_sigma().min(1.0);

    let mc_config = McConfig {
        drop_kp: context.drop_kp,
        kp_norm_ps: context.kp_norm_ps,
        ..McConfig::default()
    };
    let pumps: Vec<VacuumWavelength> = context
        .pump_wavelengths_um
        .iter()
        .map(|&um| VacuumWavelength(um))
        .collect();
    let kappa_i_abs = Measured::new(kappa_bar.value.abs(), kappa_bar.sigma);
    let derived = mc::derived_quantities(
        &posterior,
        kappa_i_abs,
        VacuumWavelength(context.degeneracy_pdc_um),
        &pumps,
        &mc_config,
    )
    .map_err(|e| CliError::Analysis(e.to_string()))?;

    let mc_row = |name: &str| {
        let e = posterior.estimate(name).expect("posterior carries all four estimates");
        Measured::new(e.mean, e.spread)
    };
    let report = DispersionReport {
        fringe: FringeRows {
            ng_tir_nir: tir_nir.group_index,
            ng_bragg_nir: bragg.group_index,
            ng_tir_telecom: tir_telecom.group_index,
            kappa_bar_ps_per_um: kappa_bar,
            pm_bandwidth_sigma_rad_per_ps: bw.sigma_pm,
            pm_bandwidth_fwhm_rad_per_ps: bw.intensity_fwhm,
            pm_bandwidth_fwhm_nm: Measured::new(fwhm_nm, fwhm_nm_sigma),
        },
        monte_carlo: McRows {
            kappa_ratio: mc_row("kappa_ratio"),
            ks_norm_ps: mc_row("ks_norm_ps"),
            ki_norm_ps: mc_row("ki_norm_ps"),
            delta_offset_rad_per_ps: mc_row("delta_offset_rad_per_ps"),
            acceptance_rate: posterior.acceptance_rate,
        },
        derived,
    };
    formats::write_json(&args.out, &report)?;
    Ok(vec![
        format!(
            "kappa_bar = {:.4e} ps/um, PM bandwidth = {:.3} nm FWHM",
            report.fringe.kappa_bar_ps_per_um.value, report.fringe.pm_bandwidth_fwhm_nm.value
        ),
        format!(
            "kappa_s/kappa_i = {:.4} +/- {:.4}, delta n_g = {:.2e} +/- {:.2e}",
            report.monte_carlo.kappa_ratio.value,
            report.monte_carlo.kappa_ratio.sigma,
            report.derived.delta_ng_signal_idler.value,
            report.derived.delta_ng_signal_idler.sigma
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_match_contract() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 64);
        assert_eq!(CliError::NoFringe(FringeError::NoFringe).exit_code(), 2);
        assert_eq!(
            CliError::InferenceEmpty(McError::EmptyPosterior { tried: 1 }).exit_code(),
            3
        );
        assert_eq!(CliError::Analysis("x".into()).exit_code(), 1);
    }
}
