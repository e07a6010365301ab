//! The three experiment recipes: partial-information curves, redundancy
//! sweeps and per-band information spectra.

use qbm_core::information::{DEFAULT_PIP_SAMPLES, DEFAULT_REDUNDANCY_SAMPLES};
use qbm_core::theory::{self, TheoryParams};
use qbm_core::{
    band_information_spectrum, build_bath, build_hamiltonian_with, evolve, initial_state,
    normal_modes, pip, redundancy_with, BathSpec, GaussianState, InformationProbe, NormalModes,
    SystemParams,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

/// Below this system entropy (nats) nothing has decohered and redundancy is undefined.
const MIN_SYSTEM_ENTROPY: f64 = 1e-9;

pub const PIP_COLUMNS: [&str; 6] = [
    "f",
    "I_mean",
    "I_stderr",
    "I_theory",
    "H_S_numeric",
    "H_S_theory",
];
pub const REDUNDANCY_COLUMNS: [&str; 9] = [
    "s",
    "delta",
    "t",
    "R_numeric",
    "R_stderr",
    "R_theory",
    "R_theory_HS",
    "H_S",
    "flag",
];
pub const BANDS_COLUMNS: [&str; 3] = ["omega", "I_numeric", "I_theory"];

/// Bath, normal modes and per-squeeze initial states shared by every grid point.
struct Prepared {
    bath: BathSpec,
    modes: NormalModes,
}

impl Prepared {
    fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let bath = build_bath(cfg.mass, cfg.gamma0(), cfg.cutoff, cfg.n_bands)?;
        let ham = build_hamiltonian_with(&cfg.system(1.0), &bath, cfg.counterterm)?;
        let modes = normal_modes(&ham)?;
        Ok(Self { bath, modes })
    }

    fn state(&self, sys: &SystemParams, t: f64) -> Result<GaussianState, CliError> {
        let s0 = initial_state(sys, &self.bath)?;
        Ok(evolve(&s0, &self.modes.propagator(t))?)
    }

    fn theory(&self, sys: &SystemParams) -> Result<TheoryParams, CliError> {
        let (vx, _) = sys.initial_variances();
        Ok(TheoryParams::new(
            sys.mass,
            self.bath.gamma0,
            sys.omega,
            self.bath.cutoff,
            vx,
        )?)
    }
}

fn tag(v: f64) -> String {
    v.to_string()
}

/// One table per `(t, s)` pair.
pub fn run_pip(cfg: &ExperimentConfig) -> Result<Vec<Table>, CliError> {
    let prep = Prepared::new(cfg)?;
    let samples = cfg.samples.unwrap_or(DEFAULT_PIP_SAMPLES);
    let mut tables = Vec::new();
    for &t in &cfg.times {
        for &s in &cfg.squeezes {
            let sys = cfg.system(s);
            let state = prep.state(&sys, t)?;
            let curve = pip(&state, &cfg.fractions, samples, cfg.seed)?;
            let h_theory = theory::system_entropy(t, &prep.theory(&sys)?)?;
            let mut table =
                Table::new(format!("pip_t{}_s{}", tag(t), tag(s)), PIP_COLUMNS.to_vec());
            for k in 0..curve.fractions.len() {
                let f = curve.fractions[k];
                table.push(vec![
                    f.into(),
                    curve.mean_info[k].into(),
                    curve.std_err[k].into(),
                    theory::pip_theory(f, curve.h_s).into(),
                    curve.h_s.into(),
                    h_theory.into(),
                ]);
            }
            tables.push(table);
        }
    }
    Ok(tables)
}

/// One row per `(s, δ, t)`; rows without decoherence carry the `no_decoherence` flag.
pub fn run_redundancy_sweep(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let prep = Prepared::new(cfg)?;
    let samples = cfg.samples.unwrap_or(DEFAULT_REDUNDANCY_SAMPLES);
    let mut table = Table::new("redundancy", REDUNDANCY_COLUMNS.to_vec());
    for &s in &cfg.squeezes {
        let sys = cfg.system(s);
        for &t in &cfg.times {
            let state = prep.state(&sys, t)?;
            let h_s = InformationProbe::new(&state)?.system_entropy();
            for &delta in &cfg.deltas {
                let mut row = vec![s.into(), delta.into(), t.into()];
                if cfg.gamma0() == 0.0 || h_s < MIN_SYSTEM_ENTROPY {
                    row.extend([
                        f64::NAN.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                        f64::NAN.into(),
                    ]);
                    row.extend([0.0.into(), "no_decoherence".into()]);
                } else {
                    let r = redundancy_with(&state, delta, samples, cfg.seed, cfg.estimator)?;
                    row.extend([
                        r.r_delta.into(),
                        r.std_err.into(),
                        theory::redundancy_theory_squeeze(delta, s).into(),
                        theory::redundancy_theory(delta, h_s).into(),
                        h_s.into(),
                        "ok".into(),
                    ]);
                }
                table.push(row);
            }
        }
    }
    Ok(table)
}

/// One table per `(t, s)` pair, one row per group of `band_group` bands.
pub fn run_band_spectrum(cfg: &ExperimentConfig) -> Result<Vec<Table>, CliError> {
    let prep = Prepared::new(cfg)?;
    let dw = prep.bath.band_width;
    let mut tables = Vec::new();
    for &t in &cfg.times {
        for &s in &cfg.squeezes {
            let sys = cfg.system(s);
            let state = prep.state(&sys, t)?;
            let params = prep.theory(&sys)?;
            let spectrum = band_information_spectrum(&state, &prep.bath, cfg.band_group)?;
            let mut table = Table::new(
                format!("bands_t{}_s{}", tag(t), tag(s)),
                BANDS_COLUMNS.to_vec(),
            );
            for (g, (omega, info)) in spectrum.into_iter().enumerate() {
                let freqs = &prep.bath.freqs[g * cfg.band_group..(g + 1) * cfg.band_group];
                let predicted = theory::band_group_information(freqs, dw, t, &params)?;
                table.push(vec![omega.into(), info.into(), predicted.into()]);
            }
            tables.push(table);
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_bands: 16,
            squeezes: vec![100.0],
            fractions: vec![0.25, 0.5, 0.75],
            samples: Some(20),
            ..Default::default()
        }
    }

    #[test]
    fn pip_at_time_zero_is_zero() {
        let cfg = ExperimentConfig {
            times: vec![0.0],
            ..small()
        };
        let tables = run_pip(&cfg).unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].name, "pip_t0_s100");
        for v in tables[0].column("I_mean").unwrap() {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn undamped_sweep_emits_diagnostic_rows() {
        let cfg = ExperimentConfig {
            gamma0: Some(0.0),
            ..small()
        };
        let table = run_redundancy_sweep(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0][8], "no_decoherence".into());
        assert_eq!(table.column("H_S").unwrap(), vec![0.0]);
        let bands = run_band_spectrum(&cfg).unwrap();
        assert!(bands[0]
            .column("I_numeric")
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-9));
        assert!(bands[0]
            .column("I_theory")
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn grid_shapes() {
        let cfg = ExperimentConfig {
            times: vec![1.0, 2.0],
            deltas: vec![0.1, 0.2],
            squeezes: vec![10.0, 100.0],
            band_group: 4,
            ..small()
        };
        assert_eq!(run_pip(&cfg).unwrap().len(), 4);
        assert_eq!(run_redundancy_sweep(&cfg).unwrap().rows.len(), 8);
        let bands = run_band_spectrum(&cfg).unwrap();
        assert_eq!(bands.len(), 4);
        assert_eq!(bands[0].rows.len(), 4);
    }
}
