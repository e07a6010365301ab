//! Mutual information between the system and environment fragments, partial
//! information curves and Monte-Carlo redundancy estimates.
//!
//! Monte-Carlo samples draw from independent ChaCha streams keyed by the seed
//! and the sample index, so results do not depend on how rayon schedules them.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QbmError, Result};
use crate::gaussian::{entropy, GaussianState, ModeSubset};
use crate::model::BathSpec;

pub const DEFAULT_PIP_SAMPLES: usize = 200;
pub const DEFAULT_REDUNDANCY_SAMPLES: usize = 400;

/// Mutual information may dip this far below zero from round-off.
const NEGATIVE_SLACK: f64 = 1e-9;

/// A set of environment bands, given as mode indices `1..=n_bands` of the
/// global state. Bands need not be contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    bands: ModeSubset,
}

impl Fragment {
    pub fn new(bands: Vec<usize>, n_bands: usize) -> Result<Self> {
        if bands.is_empty() {
            return Err(QbmError::invalid("fragment must contain at least one band"));
        }
        if bands.contains(&0) {
            return Err(QbmError::invalid("mode 0 is the system, not a band"));
        }
        Ok(Self {
            bands: ModeSubset::new(bands, n_bands + 1)?,
        })
    }

    /// All bands in `1..=n_bands`.
    pub fn whole_environment(n_bands: usize) -> Result<Self> {
        Self::new((1..=n_bands).collect(), n_bands)
    }

    pub fn bands(&self) -> &ModeSubset {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// The remaining bands, or `None` when this fragment is the whole environment.
    pub fn complement(&self, n_bands: usize) -> Option<Fragment> {
        let own = self.bands.indices();
        let rest: Vec<usize> = (1..=n_bands)
            .filter(|b| own.binary_search(b).is_err())
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(Fragment {
                bands: ModeSubset::new(rest, n_bands + 1).expect("complement indices are in range"),
            })
        }
    }

    fn with_system(&self) -> ModeSubset {
        let mut idx = Vec::with_capacity(self.len() + 1);
        idx.push(0);
        idx.extend_from_slice(self.bands.indices());
        ModeSubset::new(idx, usize::MAX).expect("system index precedes band indices")
    }
}

/// Evaluates `I(S:F)` for many fragments of one state, computing `H_S` once.
#[derive(Debug, Clone)]
pub struct InformationProbe<'a> {
    state: &'a GaussianState,
    h_s: f64,
}

impl<'a> InformationProbe<'a> {
    pub fn new(state: &'a GaussianState) -> Result<Self> {
        if state.n_modes() < 2 {
            return Err(QbmError::invalid("state has no environment modes"));
        }
        let h_s = entropy(state, &ModeSubset::single(0))?;
        Ok(Self { state, h_s })
    }

    pub fn system_entropy(&self) -> f64 {
        self.h_s
    }

    pub fn n_bands(&self) -> usize {
        self.state.n_modes() - 1
    }

    /// `H_S + H_F − H_SF`.
    pub fn mutual_information(&self, frag: &Fragment) -> Result<f64> {
        if let Some(&last) = frag.bands.indices().last() {
            if last > self.n_bands() {
                return Err(QbmError::invalid(format!(
                    "fragment band {last} exceeds the {} bands of the state",
                    self.n_bands()
                )));
            }
        }
        let h_f = entropy(self.state, &frag.bands)?;
        let h_sf = entropy(self.state, &frag.with_system())?;
        let info = self.h_s + h_f - h_sf;
        if info < -NEGATIVE_SLACK * (1.0 + self.h_s) {
            return Err(QbmError::Consistency(format!(
                "negative mutual information {info:e}"
            )));
        }
        Ok(info.max(0.0))
    }

    /// Mutual information with the first `m` bands of `order`; zero for `m = 0`.
    fn prefix_information(&self, order: &[usize], m: usize) -> Result<f64> {
        if m == 0 {
            return Ok(0.0);
        }
        let frag = Fragment::new(order[..m].to_vec(), self.n_bands())?;
        self.mutual_information(&frag)
    }
}

pub fn mutual_information(state: &GaussianState, frag: &Fragment) -> Result<f64> {
    InformationProbe::new(state)?.mutual_information(frag)
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Partial information: average `I(S:F)` over random fragments of each size.
#[derive(Debug, Clone, PartialEq)]
pub struct PipCurve {
    /// Requested fractions.
    pub requested: Vec<f64>,
    /// Fragment sizes actually sampled, `round(f·N)`.
    pub band_counts: Vec<usize>,
    /// Realised fractions `band_count / N`.
    pub fractions: Vec<f64>,
    pub mean_info: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_samples: usize,
    pub h_s: f64,
}

pub fn pip(
    state: &GaussianState,
    fractions: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<PipCurve> {
    if n_samples == 0 {
        return Err(QbmError::invalid("need at least one sample per fraction"));
    }
    let probe = InformationProbe::new(state)?;
    let n_bands = probe.n_bands();
    let mut band_counts = Vec::with_capacity(fractions.len());
    for &f in fractions {
        if !(f > 0.0 && f < 1.0) {
            return Err(QbmError::invalid(format!("fraction {f} outside (0, 1)")));
        }
        let m = (f * n_bands as f64).round() as usize;
        if m == 0 {
            return Err(QbmError::invalid(format!(
                "fraction {f} selects no bands of {n_bands}; smallest resolvable fraction is {}",
                0.5 / n_bands as f64
            )));
        }
        band_counts.push(m);
    }

    let mut mean_info = Vec::with_capacity(fractions.len());
    let mut std_err = Vec::with_capacity(fractions.len());
    for (fi, &m) in band_counts.iter().enumerate() {
        let values = (0..n_samples)
            .into_par_iter()
            .map(|j| {
                let mut rng = sample_rng(seed, ((fi as u64) << 32) | j as u64);
                let bands: Vec<usize> = index::sample(&mut rng, n_bands, m)
                    .into_iter()
                    .map(|b| b + 1)
                    .collect();
                probe.mutual_information(&Fragment::new(bands, n_bands)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, se) = mean_and_stderr(&values);
        mean_info.push(mean);
        std_err.push(se);
    }

    Ok(PipCurve {
        requested: fractions.to_vec(),
        fractions: band_counts
            .iter()
            .map(|&m| m as f64 / n_bands as f64)
            .collect(),
        band_counts,
        mean_info,
        std_err,
        n_samples,
        h_s: probe.system_entropy(),
    })
}

/// How per-sample fractions `f_δ` are combined into `R_δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RedundancyEstimator {
    /// Average of the per-sample fragment counts, `mean(1/f_δ)`.
    #[default]
    MeanRedundancy,
    /// Reciprocal of the average fraction, `1/mean(f_δ)`.
    ReciprocalMeanFraction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyResult {
    pub delta: f64,
    /// Effective fraction, always `1 / r_delta`.
    pub f_delta: f64,
    pub r_delta: f64,
    pub std_err: f64,
    pub n_samples: usize,
    /// Arithmetic mean of the sampled fractions.
    pub mean_fraction: f64,
    pub h_s: f64,
    pub estimator: RedundancyEstimator,
}

pub fn redundancy(
    state: &GaussianState,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RedundancyResult> {
    redundancy_with(
        state,
        delta,
        n_samples,
        seed,
        RedundancyEstimator::default(),
    )
}

/// Monte-Carlo redundancy: for each sample, add bands in a random order until
/// `I(S:F) ≥ (1−δ)H_S` and record the (linearly interpolated) fraction used.
pub fn redundancy_with(
    state: &GaussianState,
    delta: f64,
    n_samples: usize,
    seed: u64,
    estimator: RedundancyEstimator,
) -> Result<RedundancyResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(QbmError::invalid(format!("deficit {delta} outside (0, 1)")));
    }
    if n_samples == 0 {
        return Err(QbmError::invalid("need at least one sample"));
    }
    let probe = InformationProbe::new(state)?;
    let h_s = probe.system_entropy();
    if !(h_s > 1e-12) {
        return Err(QbmError::invalid(format!(
            "system entropy {h_s:e} is zero; redundancy is undefined without decoherence"
        )));
    }
    let n_bands = probe.n_bands();
    let target = (1.0 - delta) * h_s;

    let fractions = (0..n_samples)
        .into_par_iter()
        .map(|j| {
            let mut order: Vec<usize> = (1..=n_bands).collect();
            order.shuffle(&mut sample_rng(seed, j as u64));
            threshold_fraction(&probe, &order, target)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mean_fraction, f_se) = mean_and_stderr(&fractions);
    let (r_delta, std_err) = match estimator {
        RedundancyEstimator::MeanRedundancy => {
            let counts: Vec<f64> = fractions.iter().map(|f| 1.0 / f).collect();
            mean_and_stderr(&counts)
        }
        RedundancyEstimator::ReciprocalMeanFraction => {
            (1.0 / mean_fraction, f_se / (mean_fraction * mean_fraction))
        }
    };
    Ok(RedundancyResult {
        delta,
        f_delta: 1.0 / r_delta,
        r_delta,
        std_err,
        n_samples,
        mean_fraction,
        h_s,
        estimator,
    })
}

/// Fraction of the bands in `order` needed to reach `target` information.
/// Relies on `I(S:F)` never decreasing as bands are added.
fn threshold_fraction(probe: &InformationProbe<'_>, order: &[usize], target: f64) -> Result<f64> {
    let n = order.len();
    let (mut lo, mut info_lo) = (0usize, 0.0);
    let mut hi = 1usize;
    let mut info_hi;
    // gallop until the target is bracketed
    loop {
        info_hi = probe.prefix_information(order, hi)?;
        if info_hi >= target {
            break;
        }
        if hi == n {
            return Err(QbmError::Consistency(format!(
                "whole environment holds {info_hi} < target {target}"
            )));
        }
        lo = hi;
        info_lo = info_hi;
        hi = (2 * hi).min(n);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let info = probe.prefix_information(order, mid)?;
        if info >= target {
            hi = mid;
            info_hi = info;
        } else {
            lo = mid;
            info_lo = info;
        }
    }
    let step = info_hi - info_lo;
    let partial = if step > 0.0 {
        (target - info_lo) / step
    } else {
        1.0
    };
    Ok((lo as f64 + partial.clamp(0.0, 1.0)) / n as f64)
}

/// Mutual information of contiguous groups of `band_width` bands, paired with
/// the mean frequency of each group.
pub fn band_information_spectrum(
    state: &GaussianState,
    bath: &BathSpec,
    band_width: usize,
) -> Result<Vec<(f64, f64)>> {
    let n_bands = bath.n_bands;
    if state.n_modes() != n_bands + 1 {
        return Err(QbmError::invalid(format!(
            "state has {} modes but bath has {n_bands} bands",
            state.n_modes()
        )));
    }
    if band_width == 0 || !n_bands.is_multiple_of(band_width) {
        return Err(QbmError::invalid(format!(
            "group width {band_width} does not divide {n_bands} bands"
        )));
    }
    let probe = InformationProbe::new(state)?;
    (0..n_bands / band_width)
        .into_par_iter()
        .map(|g| {
            let bands: Vec<usize> = (g * band_width + 1..=(g + 1) * band_width).collect();
            let omega = bands.iter().map(|b| bath.freqs[b - 1]).sum::<f64>() / band_width as f64;
            let info = probe.mutual_information(&Fragment::new(bands, n_bands)?)?;
            Ok((omega, info))
        })
        .collect()
}
