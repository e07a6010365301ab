//! Experiment configuration: defaults, `key = value` files and flag overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qbm_core::{
    build_bath, recurrence_time, Counterterm, RedundancyEstimator, SqueezeAxis, SqueezeConvention,
    SystemParams,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mass: f64,
    pub omega: f64,
    pub squeezes: Vec<f64>,
    pub axis: SqueezeAxis,
    pub convention: SqueezeConvention,
    pub x0: f64,
    pub p0: f64,
    /// Damping rate; `None` means derive it from `mass_gamma / mass`.
    pub gamma0: Option<f64>,
    pub mass_gamma: f64,
    pub cutoff: f64,
    pub n_bands: usize,
    pub counterterm: Counterterm,
    pub times: Vec<f64>,
    pub deltas: Vec<f64>,
    pub fractions: Vec<f64>,
    /// Monte-Carlo samples; `None` uses each experiment's default.
    pub samples: Option<usize>,
    pub estimator: RedundancyEstimator,
    /// Contiguous bands pooled into one spectrum point.
    pub band_group: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub allow_past_recurrence: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mass: 1000.0,
            omega: 4.0,
            squeezes: vec![1e2, 1e3, 1e4],
            axis: SqueezeAxis::X,
            convention: SqueezeConvention::Amplitude,
            x0: 0.0,
            p0: 0.0,
            gamma0: None,
            mass_gamma: 25.0,
            cutoff: 16.0,
            n_bands: 128,
            counterterm: Counterterm::Renormalized,
            times: vec![4.0],
            deltas: vec![0.1],
            fractions: (1..20).map(|k| k as f64 * 0.05).collect(),
            samples: None,
            estimator: RedundancyEstimator::MeanRedundancy,
            band_group: 1,
            seed: 1,
            out_dir: PathBuf::from("out"),
            allow_past_recurrence: false,
        }
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(key, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Config(format!("{key}: list is empty")));
    }
    Ok(items)
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::Config(format!(
            "{key}: expected true/false, got {other:?}"
        ))),
    }
}

pub fn parse_axis(value: &str) -> Result<SqueezeAxis, CliError> {
    match value.trim() {
        "x" => Ok(SqueezeAxis::X),
        "p" => Ok(SqueezeAxis::P),
        other => Err(CliError::Config(format!(
            "axis: expected x or p, got {other:?}"
        ))),
    }
}

fn axis_name(a: SqueezeAxis) -> &'static str {
    match a {
        SqueezeAxis::X => "x",
        SqueezeAxis::P => "p",
    }
}

fn convention_name(c: SqueezeConvention) -> &'static str {
    match c {
        SqueezeConvention::Amplitude => "amplitude",
        SqueezeConvention::Variance => "variance",
    }
}

fn counterterm_name(c: Counterterm) -> &'static str {
    match c {
        Counterterm::Renormalized => "renormalized",
        Counterterm::Bare => "bare",
    }
}

fn estimator_name(e: RedundancyEstimator) -> &'static str {
    match e {
        RedundancyEstimator::MeanRedundancy => "mean_redundancy",
        RedundancyEstimator::ReciprocalMeanFraction => "reciprocal_mean_fraction",
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "mass" => self.mass = parse_scalar(key, value)?,
            "omega" => self.omega = parse_scalar(key, value)?,
            "squeeze" => self.squeezes = parse_list(key, value)?,
            "axis" => self.axis = parse_axis(value)?,
            "convention" => {
                self.convention = match value.trim() {
                    "amplitude" => SqueezeConvention::Amplitude,
                    "variance" => SqueezeConvention::Variance,
                    other => {
                        return Err(CliError::Config(format!("convention: unknown {other:?}")))
                    }
                }
            }
            "x0" => self.x0 = parse_scalar(key, value)?,
            "p0" => self.p0 = parse_scalar(key, value)?,
            "gamma0" => self.gamma0 = Some(parse_scalar(key, value)?),
            "mass_gamma" => self.mass_gamma = parse_scalar(key, value)?,
            "cutoff" => self.cutoff = parse_scalar(key, value)?,
            "n_bands" => self.n_bands = parse_scalar(key, value)?,
            "counterterm" => {
                self.counterterm = match value.trim() {
                    "renormalized" => Counterterm::Renormalized,
                    "bare" => Counterterm::Bare,
                    other => {
                        return Err(CliError::Config(format!("counterterm: unknown {other:?}")))
                    }
                }
            }
            "times" => self.times = parse_list(key, value)?,
            "delta" => self.deltas = parse_list(key, value)?,
            "fractions" => self.fractions = parse_list(key, value)?,
            "samples" => self.samples = Some(parse_scalar(key, value)?),
            "estimator" => {
                self.estimator = match value.trim() {
                    "mean_redundancy" => RedundancyEstimator::MeanRedundancy,
                    "reciprocal_mean_fraction" => RedundancyEstimator::ReciprocalMeanFraction,
                    other => return Err(CliError::Config(format!("estimator: unknown {other:?}"))),
                }
            }
            "band_group" => self.band_group = parse_scalar(key, value)?,
            "seed" => self.seed = parse_scalar(key, value)?,
            "out" => self.out_dir = PathBuf::from(value.trim()),
            "allow_past_recurrence" => self.allow_past_recurrence = parse_bool(key, value)?,
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0.unwrap_or(self.mass_gamma / self.mass)
    }

    pub fn system(&self, squeeze: f64) -> SystemParams {
        SystemParams {
            mass: self.mass,
            omega: self.omega,
            squeeze,
            squeeze_axis: self.axis,
            squeeze_convention: self.convention,
            x0: self.x0,
            p0: self.p0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.mass > 0.0 && self.omega > 0.0 && self.cutoff > 0.0) {
            return bad("mass, omega and cutoff must be positive".into());
        }
        if !(self.gamma0() >= 0.0) {
            return bad(format!(
                "damping rate {} must be non-negative",
                self.gamma0()
            ));
        }
        if self.n_bands == 0 {
            return bad("n_bands must be positive".into());
        }
        if let Some(&s) = self.squeezes.iter().find(|&&s| !(s >= 1.0)) {
            return bad(format!("squeeze {s} must be at least 1"));
        }
        if let Some(&t) = self.times.iter().find(|&&t| !(t >= 0.0 && t.is_finite())) {
            return bad(format!("time {t} must be finite and non-negative"));
        }
        if let Some(&d) = self.deltas.iter().find(|&&d| !(d > 0.0 && d < 1.0)) {
            return bad(format!("delta {d} outside (0, 1)"));
        }
        if let Some(&f) = self.fractions.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
            return bad(format!("fraction {f} outside (0, 1)"));
        }
        if self.samples == Some(0) {
            return bad("samples must be positive".into());
        }
        if self.band_group == 0 || !self.n_bands.is_multiple_of(self.band_group) {
            return bad(format!(
                "band_group {} must divide n_bands {}",
                self.band_group, self.n_bands
            ));
        }
        if [&self.squeezes, &self.times, &self.deltas, &self.fractions]
            .iter()
            .any(|l| l.is_empty())
        {
            return bad("parameter lists must be non-empty".into());
        }
        let bath = build_bath(self.mass, self.gamma0(), self.cutoff, self.n_bands)?;
        let t_rec = recurrence_time(&bath);
        if !self.allow_past_recurrence {
            if let Some(&t) = self.times.iter().find(|&&t| t >= t_rec) {
                return bad(format!(
                    "time {t} is past the recurrence time {t_rec:.4} of {} bands; \
                     add bands or pass --allow-past-recurrence",
                    self.n_bands
                ));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; feeding it back reproduces `self`.
    pub fn echo(&self) -> String {
        let mut entries: BTreeMap<&str, String> = BTreeMap::new();
        entries.insert("mass", self.mass.to_string());
        entries.insert("omega", self.omega.to_string());
        entries.insert("squeeze", join(&self.squeezes));
        entries.insert("axis", axis_name(self.axis).into());
        entries.insert("convention", convention_name(self.convention).into());
        entries.insert("x0", self.x0.to_string());
        entries.insert("p0", self.p0.to_string());
        entries.insert("gamma0", self.gamma0().to_string());
        entries.insert("cutoff", self.cutoff.to_string());
        entries.insert("n_bands", self.n_bands.to_string());
        entries.insert("counterterm", counterterm_name(self.counterterm).into());
        entries.insert("times", join(&self.times));
        entries.insert("delta", join(&self.deltas));
        entries.insert("fractions", join(&self.fractions));
        if let Some(n) = self.samples {
            entries.insert("samples", n.to_string());
        }
        entries.insert("estimator", estimator_name(self.estimator).into());
        entries.insert("band_group", self.band_group.to_string());
        entries.insert("seed", self.seed.to_string());
        entries.insert(
            "allow_past_recurrence",
            self.allow_past_recurrence.to_string(),
        );
        let mut out = String::new();
        for (k, v) in entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_settings_and_comments() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# sweep\nsqueeze = 10, 100\n\ntimes=1,2 # two\nmass_gamma = 5\n")
            .unwrap();
        assert_eq!(c.squeezes, vec![10.0, 100.0]);
        assert_eq!(c.times, vec![1.0, 2.0]);
        assert!((c.gamma0() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn explicit_gamma_overrides_product() {
        let mut c = ExperimentConfig::default();
        c.set("gamma0", "0.0025").unwrap();
        assert_eq!(c.gamma0(), 0.0025);
    }

    #[test]
    fn echo_round_trips() {
        let mut c = ExperimentConfig::default();
        c.apply_text("axis = p\nsamples = 17\nestimator = reciprocal_mean_fraction\nseed = 9")
            .unwrap();
        let mut back = ExperimentConfig::default();
        back.apply_text(&c.echo()).unwrap();
        back.out_dir = c.out_dir.clone();
        back.gamma0 = c.gamma0;
        assert_eq!(back.echo(), c.echo());
        assert_eq!(back.samples, Some(17));
        assert_eq!(back.axis, SqueezeAxis::P);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = ExperimentConfig::default();
        assert!(c.set("nonsense", "1").is_err());
        assert!(c.set("times", "").is_err());
        assert!(c.set("axis", "z").is_err());
        assert!(c.apply_text("no equals sign").is_err());
        c.set("times", "60").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.allow_past_recurrence = true;
        c.validate().unwrap();
        c.set("band_group", "3").unwrap();
        assert!(c.validate().is_err());
    }
}
