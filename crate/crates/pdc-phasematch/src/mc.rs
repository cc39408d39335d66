//! Monte Carlo rejection sampling of normalized dispersion parameters from
//! marginal-spectrum observations.
//!
//! The phasematching contour is homogeneous in the dispersion
//! coefficients: scaling all of them leaves Δk = 0 unchanged, so only the
//! ratios κ_s/κ_i, K_s/|κ_i| and K_i/|κ_i| are identifiable from peak
//! positions. Candidate parameter sets are drawn from uniform priors
//! (together with a small pump-detuning calibration offset) and accepted
//! when the predicted contour crossings lie within the FWHM errorbars of
//! every fitted peak, and every in-band predicted branch is matched by an
//! observed peak.
//!
//! Sample i is fully determined by (seed, i) through a counter-based
//! stream generator, so results are bit-identical no matter how the index
//! range is partitioned across workers.

use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsa::{self, DispersionParams};
use crate::spectra::{Beam, MarginalObservation};
use crate::spectrum::AxisUnit;
use crate::units::{
    wavelength_to_angular_frequency, Measured, VacuumWavelength, SPEED_OF_LIGHT_UM_PER_PS,
};

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("invalid Monte Carlo configuration: {0}")]
    BadConfig(String),
    #[error("invalid observation set: {0}")]
    BadObservations(String),
    #[error(
        "no sample was accepted out of {tried}; widen the priors or check the detuning offset range"
    )]
    EmptyPosterior { tried: u64 },
    #[error(transparent)]
    Units(#[from] crate::units::UnitsError),
}

/// Uniform prior range [lo, hi]; lo == hi pins the parameter.
pub type PriorRange = (f64, f64);

/// Uniform priors for the sampled parameters. The defaults are declared
/// choices, not measured facts: the ratio range encodes the observed
/// signal/idler group-index ordering, the curvature ranges encode low
/// dispersion with room above the expected scale, and the offset absorbs
/// the residual calibration shift between the pump spectrometer and the
/// detector array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McPriors {
    pub kappa_ratio: PriorRange,
    pub ks_norm_ps: PriorRange,
    pub ki_norm_ps: PriorRange,
    pub delta_offset_rad_per_ps: PriorRange,
}

impl Default for McPriors {
    fn default() -> Self {
        McPriors {
            kappa_ratio: (0.90, 1.00),
            ks_norm_ps: (0.0, 5e-3),
            ki_norm_ps: (0.0, 5e-3),
            delta_offset_rad_per_ps: (-1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub n_runs: u64,
    pub seed: u64,
    pub priors: McPriors,
    /// Omit the ½K_pΔ² contour term (the pump detuning is far smaller than
    /// the signal/idler shifts).
    pub drop_kp: bool,
    /// K_p/|κ_i| in ps, used only when `drop_kp` is false.
    pub kp_norm_ps: f64,
    /// Reject samples with κ_s/κ_i ≥ 1 before any contour evaluation
    /// (signal group index must exceed the idler's).
    pub enforce_group_index_ordering: bool,
    pub hist_bins: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_runs: 1_000_000,
            seed: 0,
            priors: McPriors::default(),
            drop_kp: true,
            kp_norm_ps: 0.0,
            enforce_group_index_ordering: true,
            hist_bins: 50,
        }
    }
}

/// One candidate parameter set in κ_i-normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSample {
    pub kappa_ratio: f64,
    #[serde(rename = "ks_norm_ps")]
    pub ks_norm: f64,
    #[serde(rename = "ki_norm_ps")]
    pub ki_norm: f64,
    #[serde(rename = "delta_offset_rad_per_ps")]
    pub delta_offset: f64,
}

impl McSample {
    /// Contour coefficients with κ_i = −1: the overall scale cancels from
    /// Δk = 0, and the sign encodes that both κ are negative here (PDC
    /// modes slower than the pump).
    pub fn normalized_params(&self, kp_norm: f64) -> DispersionParams {
        DispersionParams {
            kappa_s: -self.kappa_ratio,
            kappa_i: -1.0,
            k2_s: self.ks_norm,
            k2_i: self.ki_norm,
            k2_p: kp_norm,
        }
    }
}

/// Lower/upper frequency branch of the split marginal spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedBranch {
    pub beam: Beam,
    pub branch: Branch,
}

/// All marginal observations entering one inference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    /// Degenerate PDC wavelength (signal = idler), µm. The pump
    /// phasematching point is at half this wavelength.
    #[serde(rename = "degeneracy_pdc_um")]
    pub degeneracy: VacuumWavelength,
    pub observations: Vec<MarginalObservation>,
    #[serde(default)]
    pub excluded_branches: Vec<ExcludedBranch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// Observation data lowered to detuning space for the hot loop.
struct PreparedObs {
    beam: Beam,
    delta_nom: f64,
    /// (center, half errorbar) in rad/ps; the errorbar spans one FWHM.
    peaks: Vec<(f64, f64)>,
    /// Detuning intervals excluded by wavelength masks.
    masked_nu: Vec<(f64, f64)>,
    skip_lower: bool,
    skip_upper: bool,
}

fn prepare(obs_set: &ObservationSet) -> Result<Vec<PreparedObs>, McError> {
    if obs_set.observations.is_empty() {
        return Err(McError::BadObservations("no observations".into()));
    }
    let omega0 = wavelength_to_angular_frequency(obs_set.degeneracy)?;
    let omega0_p = 2.0 * omega0.0;

    let mut prepared = Vec::with_capacity(obs_set.observations.len());
    for (idx, obs) in obs_set.observations.iter().enumerate() {
        if obs.peaks.is_empty() || obs.peaks.len() > 2 {
            return Err(McError::BadObservations(format!(
                "observation {idx} has {} peaks (expected 1 or 2)",
                obs.peaks.len()
            )));
        }
        let mut peaks = Vec::with_capacity(obs.peaks.len());
        for p in &obs.peaks {
            if p.unit != AxisUnit::AngularFrequencyRadPerPs {
                return Err(McError::BadObservations(format!(
                    "observation {idx} carries peaks in wavelength units; convert to detunings first"
                )));
            }
            if !(p.fwhm > 0.0) {
                return Err(McError::BadObservations(format!(
                    "observation {idx} has a non-positive FWHM errorbar"
                )));
            }
            peaks.push((p.center, 0.5 * p.fwhm));
        }
        let delta_nom = wavelength_to_angular_frequency(obs.pump_wavelength)?.0 - omega0_p;
        let masked_nu = obs
            .mask
            .iter()
            .map(|m| {
                let hi_nu = wavelength_to_angular_frequency(VacuumWavelength(m.lo_nm * 1e-3))
                    .map(|w| w.0 - omega0.0)?;
                let lo_nu = match m.hi_nm {
                    Some(hi_nm) => {
                        wavelength_to_angular_frequency(VacuumWavelength(hi_nm * 1e-3))
                            .map(|w| w.0 - omega0.0)?
                    }
                    None => f64::NEG_INFINITY,
                };
                Ok::<(f64, f64), crate::units::UnitsError>((lo_nu, hi_nu))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let skip_lower = obs_set
            .excluded_branches
            .iter()
            .any(|e| e.beam == obs.beam && e.branch == Branch::Lower);
        let skip_upper = obs_set
            .excluded_branches
            .iter()
            .any(|e| e.beam == obs.beam && e.branch == Branch::Upper);
        prepared.push(PreparedObs {
            beam: obs.beam,
            delta_nom,
            peaks,
            masked_nu,
            skip_lower,
            skip_upper,
        });
    }

    let mut detunings: Vec<f64> = prepared.iter().map(|p| p.delta_nom).collect();
    detunings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    detunings.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if detunings.len() < 2 {
        return Err(McError::BadObservations(
            "need at least two distinct pump detunings to constrain the curvature terms".into(),
        ));
    }
    Ok(prepared)
}

/// Acceptance predicate on raw contour coefficients: every fitted peak
/// center must lie within half its FWHM errorbar of a predicted contour
/// crossing, and every predicted crossing that is neither masked out nor
/// on an excluded branch must be matched by a peak the same way. The
/// coefficients enter only through the roots of Δk = 0, so the predicate
/// is invariant under scaling all of them by a positive constant.
fn contour_accepts(
    params: &DispersionParams,
    delta_offset: f64,
    prepared: &[PreparedObs],
    drop_kp: bool,
) -> bool {
    for obs in prepared {
        let delta = obs.delta_nom + delta_offset;
        let beam_params = match obs.beam {
            Beam::Signal => *params,
            Beam::Idler => params.swap_roles(),
        };
        let roots = match jsa::marginal_contour_roots(&beam_params, delta, drop_kp) {
            Ok(r) => r,
            Err(_) => return false,
        };
        if roots.is_empty() {
            return false; // an observed peak exists but no emission is predicted
        }

        // every peak near a root
        for &(center, half) in &obs.peaks {
            let ok = roots.iter().any(|&r| (center - r).abs() <= half);
            if !ok {
                return false;
            }
        }

        // every in-band root near a peak
        for (k, &root) in roots.iter().enumerate() {
            let branch_excluded = if roots.len() == 2 {
                (k == 0 && obs.skip_lower) || (k == 1 && obs.skip_upper)
            } else {
                // a merged band counts as either branch
                obs.skip_lower || obs.skip_upper
            };
            if branch_excluded {
                continue;
            }
            if obs.masked_nu.iter().any(|&(lo, hi)| root >= lo && root <= hi) {
                continue;
            }
            let ok = obs.peaks.iter().any(|&(center, half)| (center - root).abs() <= half);
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Decide whether one candidate parameter set is consistent with every
/// observation.
pub fn accept_sample(
    sample: &McSample,
    obs_set: &ObservationSet,
    config: &McConfig,
) -> Result<bool, McError> {
    if config.enforce_group_index_ordering && sample.kappa_ratio >= 1.0 {
        return Ok(false);
    }
    let prepared = prepare(obs_set)?;
    let kp = if config.drop_kp { 0.0 } else { config.kp_norm_ps };
    Ok(contour_accepts(
        &sample.normalized_params(kp),
        sample.delta_offset,
        &prepared,
        config.drop_kp,
    ))
}

/// 53-bit uniform in [0, 1).
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw_in(range: PriorRange, rng: &mut impl RngCore) -> f64 {
    let (lo, hi) = range;
    if lo == hi {
        lo
    } else {
        lo + (hi - lo) * unit_f64(rng)
    }
}

/// The sample with index `i` under `seed`: a fixed-order draw from an
/// independent ChaCha stream keyed by the index.
pub fn sample_at(seed: u64, index: u64, priors: &McPriors) -> McSample {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    McSample {
        kappa_ratio: draw_in(priors.kappa_ratio, &mut rng),
        ks_norm: draw_in(priors.ks_norm_ps, &mut rng),
        ki_norm: draw_in(priors.ki_norm_ps, &mut rng),
        delta_offset: draw_in(priors.delta_offset_rad_per_ps, &mut rng),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamHistogram {
    pub name: String,
    /// `counts.len() + 1` ascending bin edges spanning the prior range.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub name: String,
    /// Center of the most populated histogram bin after a 3-bin moving
    /// average. Plateau-shaped marginals (the curvature parameters have
    /// sharp upper limits and flat interiors) make the raw argmax bin
    /// jump between seeds; the smoothing stabilizes it.
    pub mode: f64,
    pub mean: f64,
    /// Sample standard deviation of the accepted values.
    pub spread: f64,
}

/// What the posterior was inferred from; carried along so downstream
/// reports can evaluate predictions at the measured pump wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McContext {
    pub degeneracy_pdc_um: f64,
    pub pump_wavelengths_um: Vec<f64>,
    pub drop_kp: bool,
    pub kp_norm_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPosterior {
    pub n_runs: u64,
    pub seed: u64,
    pub acceptance_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<McContext>,
    pub accepted: Vec<McSample>,
    pub histograms: Vec<ParamHistogram>,
    pub estimates: Vec<ParamEstimate>,
}

impl McPosterior {
    pub fn estimate(&self, name: &str) -> Option<&ParamEstimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

fn histogram(name: &str, values: &[f64], range: PriorRange, bins: usize) -> ParamHistogram {
    let (lo, hi) = range;
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let edges = (0..=bins).map(|k| lo + width * k as f64).collect();
    ParamHistogram {
        name: name.to_string(),
        edges,
        counts,
    }
}

fn estimate(name: &str, values: &[f64], hist: &ParamHistogram) -> ParamEstimate {
    // argmax of the 3-bin moving average; ties resolve to the lowest bin
    let counts = &hist.counts;
    let mode_bin = (0..counts.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(counts.len());
            let sum: u64 = counts[lo..hi].iter().sum();
            (i, sum * 6 / (hi - lo) as u64)
        })
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mode = 0.5 * (hist.edges[mode_bin] + hist.edges[mode_bin + 1]);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let spread = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    ParamEstimate {
        name: name.to_string(),
        mode,
        mean,
        spread,
    }
}

/// Contiguous index ranges of this size are evaluated per work item; the
/// batching is unobservable in the output because each sample depends only
/// on (seed, index) and batches are merged in index order.
const BATCH_SIZE: u64 = 8192;

/// Run the rejection sampler: draw `n_runs` candidates from the priors,
/// keep those consistent with the observations, and summarize the
/// posterior with per-parameter histograms, modes, means and spreads.
/// Bitwise deterministic for fixed (seed, n_runs) at any worker count.
pub fn run_mc(config: &McConfig, obs_set: &ObservationSet) -> Result<McPosterior, McError> {
    if config.n_runs == 0 {
        return Err(McError::BadConfig("n_runs must be at least 1".into()));
    }
    for (name, (lo, hi)) in [
        ("kappa_ratio", config.priors.kappa_ratio),
        ("ks_norm_ps", config.priors.ks_norm_ps),
        ("ki_norm_ps", config.priors.ki_norm_ps),
        ("delta_offset_rad_per_ps", config.priors.delta_offset_rad_per_ps),
    ] {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(McError::BadConfig(format!("empty prior range for {name}")));
        }
    }
    let prepared = prepare(obs_set)?;
    let kp = if config.drop_kp { 0.0 } else { config.kp_norm_ps };

    let n_batches = config.n_runs.div_ceil(BATCH_SIZE);
    let batches: Vec<Vec<McSample>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH_SIZE;
            let hi = (lo + BATCH_SIZE).min(config.n_runs);
            let mut kept = Vec::new();
            for index in lo..hi {
                let sample = sample_at(config.seed, index, &config.priors);
                if config.enforce_group_index_ordering && sample.kappa_ratio >= 1.0 {
                    continue;
                }
                if contour_accepts(
                    &sample.normalized_params(kp),
                    sample.delta_offset,
                    &prepared,
                    config.drop_kp,
                ) {
                    kept.push(sample);
                }
            }
            kept
        })
        .collect();
    let accepted: Vec<McSample> = batches.into_iter().flatten().collect();

    if accepted.is_empty() {
        return Err(McError::EmptyPosterior {
            tried: config.n_runs,
        });
    }

    let columns: [(&str, Vec<f64>, PriorRange); 4] = [
        (
            "kappa_ratio",
            accepted.iter().map(|s| s.kappa_ratio).collect(),
            config.priors.kappa_ratio,
        ),
        (
            "ks_norm_ps",
            accepted.iter().map(|s| s.ks_norm).collect(),
            config.priors.ks_norm_ps,
        ),
        (
            "ki_norm_ps",
            accepted.iter().map(|s| s.ki_norm).collect(),
            config.priors.ki_norm_ps,
        ),
        (
            "delta_offset_rad_per_ps",
            accepted.iter().map(|s| s.delta_offset).collect(),
            config.priors.delta_offset_rad_per_ps,
        ),
    ];
    let mut histograms = Vec::with_capacity(4);
    let mut estimates = Vec::with_capacity(4);
    for (name, values, range) in &columns {
        let h = histogram(name, values, *range, config.hist_bins);
        estimates.push(estimate(name, values, &h));
        histograms.push(h);
    }

    let mut pumps: Vec<f64> = obs_set
        .observations
        .iter()
        .map(|o| o.pump_wavelength.um())
        .collect();
    pumps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pumps.dedup();
    Ok(McPosterior {
        n_runs: config.n_runs,
        seed: config.seed,
        acceptance_rate: accepted.len() as f64 / config.n_runs as f64,
        context: Some(McContext {
            degeneracy_pdc_um: obs_set.degeneracy.um(),
            pump_wavelengths_um: pumps,
            drop_kp: config.drop_kp,
            kp_norm_ps: config.kp_norm_ps,
        }),
        accepted,
        histograms,
        estimates,
    })
}

/// One point of the tilt-versus-pump-wavelength prediction band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltCurvePoint {
    #[serde(rename = "pump_wavelength_um")]
    pub pump_wavelength: VacuumWavelength,
    pub delta_rad_per_ps: f64,
    pub branch: Branch,
    pub tilt_deg_median: f64,
    pub tilt_deg_spread: f64,
    /// Fraction of posterior samples contributing (a branch can vanish for
    /// part of the posterior near the splitting threshold).
    pub support: f64,
}

/// Quantities derived from the posterior combined with the fringe
/// experiment's |κ_i|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedReport {
    /// Group-index difference n_g(s) − n_g(i) = c·|κ_i|·(1 − κ_s/κ_i).
    pub delta_ng_signal_idler: Measured,
    pub tilt_at_degeneracy_deg: Measured,
    pub tilt_curve: Vec<TiltCurvePoint>,
}

fn median_and_spread(values: &mut Vec<f64>) -> (f64, f64) {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    let spread = if n > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
    } else {
        0.0
    };
    (median, spread)
}

/// Tilt statistics over the posterior at one pump detuning: per accepted
/// sample, solve the contour and evaluate the tilt at each crossing.
fn tilt_at_delta(
    accepted: &[McSample],
    delta_nom: f64,
    drop_kp: bool,
    kp_norm: f64,
) -> Vec<(Branch, f64, f64, f64)> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for s in accepted {
        let params = s.normalized_params(kp_norm);
        let delta = delta_nom + s.delta_offset;
        let Ok(roots) = jsa::marginal_contour_roots(&params, delta, drop_kp) else {
            continue;
        };
        let eff = if drop_kp {
            DispersionParams { k2_p: 0.0, ..params }
        } else {
            params
        };
        for (k, &r) in roots.iter().enumerate() {
            let Ok(tilt) = jsa::phasematching_tilt(&eff, r, delta - r, delta) else {
                continue;
            };
            if roots.len() == 2 && k == 1 {
                upper.push(tilt.angle_deg);
            } else {
                lower.push(tilt.angle_deg);
            }
        }
    }
    let n = accepted.len() as f64;
    let mut out = Vec::new();
    for (branch, mut vals) in [(Branch::Lower, lower), (Branch::Upper, upper)] {
        if vals.is_empty() {
            continue;
        }
        let support = vals.len() as f64 / n;
        let (median, spread) = median_and_spread(&mut vals);
        out.push((branch, median, spread, support));
    }
    out
}

/// Combine the posterior with |κ_i| from the fringe experiment into the
/// physical summary: the signal-idler group-index difference and the
/// phasematching tilt across the measured pump range.
pub fn derived_quantities(
    posterior: &McPosterior,
    kappa_i_abs: Measured,
    degeneracy: VacuumWavelength,
    pump_wavelengths: &[VacuumWavelength],
    config: &McConfig,
) -> Result<DerivedReport, McError> {
    if posterior.accepted.is_empty() {
        return Err(McError::BadConfig("posterior has no accepted samples".into()));
    }
    let ratio = posterior
        .estimate("kappa_ratio")
        .expect("posterior always carries a kappa_ratio estimate");

    // delta_ng = c |kappa_i| (1 - ratio); first-order error propagation.
    // The mean is the stable point estimate for these plateau-shaped
    // marginals (the mode of a near-flat histogram wanders with the seed).
    let one_minus = 1.0 - ratio.mean;
    let value = SPEED_OF_LIGHT_UM_PER_PS * kappa_i_abs.value * one_minus;
    let sigma = if one_minus != 0.0 {
        value.abs()
            * ((kappa_i_abs.relative_sigma()).powi(2) + (ratio.spread / one_minus).powi(2)).sqrt()
    } else {
        SPEED_OF_LIGHT_UM_PER_PS * kappa_i_abs.value * ratio.spread
    };
    let delta_ng = Measured::new(value, sigma);

    let kp = if config.drop_kp { 0.0 } else { config.kp_norm_ps };
    let omega0_p = 2.0 * wavelength_to_angular_frequency(degeneracy)?.0;

    // tilt at the degenerate pump: the contour crossing at nu ~ 0
    let mut degen_tilts: Vec<f64> = posterior
        .accepted
        .iter()
        .filter_map(|s| {
            let params = s.normalized_params(kp);
            let delta = s.delta_offset;
            let roots = jsa::marginal_contour_roots(&params, delta, config.drop_kp).ok()?;
            let root = roots
                .iter()
                .copied()
                .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())?;
            let eff = if config.drop_kp {
                DispersionParams { k2_p: 0.0, ..params }
            } else {
                params
            };
            jsa::phasematching_tilt(&eff, root, delta - root, delta)
                .ok()
                .map(|t| t.angle_deg)
        })
        .collect();
    if degen_tilts.is_empty() {
        return Err(McError::BadConfig(
            "no posterior sample has a contour crossing at the degenerate pump".into(),
        ));
    }
    let (median, spread) = median_and_spread(&mut degen_tilts);
    let tilt_at_degeneracy = Measured::new(median, spread);

    let mut tilt_curve = Vec::new();
    for &pump in pump_wavelengths {
        let delta_nom = wavelength_to_angular_frequency(pump)?.0 - omega0_p;
        for (branch, med, spr, support) in
            tilt_at_delta(&posterior.accepted, delta_nom, config.drop_kp, kp)
        {
            tilt_curve.push(TiltCurvePoint {
                pump_wavelength: pump,
                delta_rad_per_ps: delta_nom,
                branch,
                tilt_deg_median: med,
                tilt_deg_spread: spr,
                support,
            });
        }
    }

    Ok(DerivedReport {
        delta_ng_signal_idler: delta_ng,
        tilt_at_degeneracy_deg: tilt_at_degeneracy,
        tilt_curve,
    })
}
