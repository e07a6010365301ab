//! The quantum Brownian motion Hamiltonian with a sharply cut off, discretized
//! ohmic bath.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{QbmError, Result};
use crate::gaussian::GaussianState;
use crate::units::HALF_HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqueezeAxis {
    /// Position spread enlarged by the squeeze factor.
    #[default]
    X,
    /// Momentum spread enlarged by the squeeze factor.
    P,
}

/// How the squeeze factor `s` relates to the ground-state spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqueezeConvention {
    /// `Δx = s·Δx_gs`: a fully decohered state reaches `a ∝ s`, `H_S ≈ ln s`.
    #[default]
    Amplitude,
    /// `Δx² = s·Δx²_gs`.
    Variance,
}

impl SqueezeConvention {
    /// Factor applied to the ground-state variance along the squeezed axis.
    pub fn variance_factor(self, s: f64) -> f64 {
        match self {
            SqueezeConvention::Amplitude => s * s,
            SqueezeConvention::Variance => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub mass: f64,
    /// Renormalized angular frequency.
    pub omega: f64,
    pub squeeze: f64,
    pub squeeze_axis: SqueezeAxis,
    pub squeeze_convention: SqueezeConvention,
    pub x0: f64,
    pub p0: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            mass: 1000.0,
            omega: 4.0,
            squeeze: 1.0,
            squeeze_axis: SqueezeAxis::X,
            squeeze_convention: SqueezeConvention::Amplitude,
            x0: 0.0,
            p0: 0.0,
        }
    }
}

impl SystemParams {
    fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !(self.omega > 0.0) {
            return Err(QbmError::invalid(format!(
                "system mass {} and frequency {} must be positive",
                self.mass, self.omega
            )));
        }
        if !(self.squeeze >= 1.0) {
            return Err(QbmError::invalid(format!(
                "squeeze factor {} must be at least 1",
                self.squeeze
            )));
        }
        Ok(())
    }

    /// Initial position and momentum variances of the system.
    pub fn initial_variances(&self) -> (f64, f64) {
        let mw = self.mass * self.omega;
        let k = self.squeeze_convention.variance_factor(self.squeeze);
        let (vx, vp) = (HALF_HBAR / mw, HALF_HBAR * mw);
        match self.squeeze_axis {
            SqueezeAxis::X => (vx * k, vp / k),
            SqueezeAxis::P => (vx / k, vp * k),
        }
    }
}

/// Discretized ohmic environment, `I(ω) = (2 m_S γ₀/π) ω` on `[0, Λ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub n_bands: usize,
    pub cutoff: f64,
    pub gamma0: f64,
    /// Bin width Δω = Λ / n_bands.
    pub band_width: f64,
    /// Bin midpoints, ascending.
    pub freqs: Vec<f64>,
    pub masses: Vec<f64>,
    /// Squared couplings `C_n²`.
    pub couplings_sq: Vec<f64>,
}

impl BathSpec {
    pub fn couplings(&self) -> impl Iterator<Item = f64> + '_ {
        self.couplings_sq.iter().map(|c2| c2.sqrt())
    }

    /// `Σ C_n² / (m_n ω_n²)`, the coupling-induced shift of the system stiffness.
    pub fn counterterm_stiffness(&self) -> f64 {
        self.couplings_sq
            .iter()
            .zip(&self.freqs)
            .zip(&self.masses)
            .map(|((c2, w), m)| c2 / (m * w * w))
            .sum()
    }
}

/// Splits `[0, Λ]` into `n_bands` equal bins with unit-mass oscillators at the
/// midpoints and couplings `C_n² = (4 m_S m_n γ₀/π) ω_n² Δω`.
pub fn build_bath(system_mass: f64, gamma0: f64, cutoff: f64, n_bands: usize) -> Result<BathSpec> {
    if n_bands == 0 {
        return Err(QbmError::invalid("bath needs at least one band"));
    }
    if !(system_mass > 0.0) || !(cutoff > 0.0) {
        return Err(QbmError::invalid("system mass and cutoff must be positive"));
    }
    if !(gamma0 >= 0.0) {
        return Err(QbmError::invalid(format!(
            "coupling gamma0 = {gamma0} is negative"
        )));
    }
    let band_width = cutoff / n_bands as f64;
    let freqs: Vec<f64> = (0..n_bands)
        .map(|n| (n as f64 + 0.5) * band_width)
        .collect();
    let masses = vec![1.0; n_bands];
    let couplings_sq = freqs
        .iter()
        .zip(&masses)
        .map(|(w, m)| 4.0 * system_mass * m * gamma0 / PI * w * w * band_width)
        .collect();
    Ok(BathSpec {
        n_bands,
        cutoff,
        gamma0,
        band_width,
        freqs,
        masses,
        couplings_sq,
    })
}

/// Whether the bare system frequency is shifted so that the observed
/// frequency equals `SystemParams::omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counterterm {
    #[default]
    Renormalized,
    Bare,
}

/// `H = Σ p_i²/(2 M_i) + ½ xᵀ K x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub masses: DVector<f64>,
    pub stiffness: DMatrix<f64>,
}

impl QuadraticHamiltonian {
    pub fn n_modes(&self) -> usize {
        self.masses.len()
    }

    /// Expectation value of the energy in `state`.
    pub fn energy(&self, state: &GaussianState) -> Result<f64> {
        let n = self.n_modes();
        if state.n_modes() != n {
            return Err(QbmError::invalid(format!(
                "state has {} modes, Hamiltonian has {n}",
                state.n_modes()
            )));
        }
        let (cov, mean) = (state.cov(), state.mean());
        let mut e = 0.0;
        for i in 0..n {
            let p2 = cov[(2 * i + 1, 2 * i + 1)] + mean[2 * i + 1].powi(2);
            e += 0.5 * p2 / self.masses[i];
            for j in 0..n {
                let k = self.stiffness[(i, j)];
                if k != 0.0 {
                    let xx = cov[(2 * i, 2 * j)] + mean[2 * i] * mean[2 * j];
                    e += 0.5 * k * xx;
                }
            }
        }
        Ok(e)
    }

    /// Eigenvalues of `M^{-1/2} K M^{-1/2}`, i.e. squared normal-mode frequencies.
    pub fn mass_weighted_stiffness(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let inv_sqrt: Vec<f64> = self.masses.iter().map(|m| 1.0 / m.sqrt()).collect();
        DMatrix::from_fn(n, n, |i, j| {
            self.stiffness[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
        })
    }
}

pub fn build_hamiltonian(sys: &SystemParams, bath: &BathSpec) -> Result<QuadraticHamiltonian> {
    build_hamiltonian_with(sys, bath, Counterterm::Renormalized)
}

/// Builds the star-shaped stiffness matrix: the system couples to every band,
/// bands do not couple to each other.
pub fn build_hamiltonian_with(
    sys: &SystemParams,
    bath: &BathSpec,
    counterterm: Counterterm,
) -> Result<QuadraticHamiltonian> {
    sys.validate()?;
    let n = bath.n_bands + 1;
    let mut masses = DVector::zeros(n);
    let mut k = DMatrix::zeros(n, n);
    masses[0] = sys.mass;

    let shift = match counterterm {
        Counterterm::Renormalized => bath.counterterm_stiffness(),
        Counterterm::Bare => 0.0,
    };
    k[(0, 0)] = sys.mass * sys.omega * sys.omega + shift;
    for (b, ((w, m), c)) in bath
        .freqs
        .iter()
        .zip(&bath.masses)
        .zip(bath.couplings())
        .enumerate()
    {
        let i = b + 1;
        masses[i] = *m;
        k[(i, i)] = m * w * w;
        k[(0, i)] = c;
        k[(i, 0)] = c;
    }

    // arrowhead matrix with positive bath diagonal: positive definite iff the
    // Schur complement of the bath block is positive
    let schur = k[(0, 0)]
        - (1..n)
            .map(|i| k[(0, i)] * k[(0, i)] / k[(i, i)])
            .sum::<f64>();
    let h = QuadraticHamiltonian {
        masses,
        stiffness: k,
    };
    if !(schur > 0.0) {
        let min = h.mass_weighted_stiffness().symmetric_eigenvalues().min();
        return Err(QbmError::ModelInstability { eigenvalue: min });
    }
    Ok(h)
}

/// Squeezed coherent system state times the bath ground state.
pub fn initial_state(sys: &SystemParams, bath: &BathSpec) -> Result<GaussianState> {
    sys.validate()?;
    let n = bath.n_bands + 1;
    let mut mean = DVector::zeros(2 * n);
    mean[0] = sys.x0;
    mean[1] = sys.p0;
    let (vx, vp) = sys.initial_variances();
    let mut variances = Vec::with_capacity(2 * n);
    variances.extend([vx, vp]);
    for (w, m) in bath.freqs.iter().zip(&bath.masses) {
        variances.extend([HALF_HBAR / (m * w), HALF_HBAR * m * w]);
    }
    GaussianState::diagonal(mean, &variances)
}

/// `2π/Δω`, beyond which the discrete bath stops resembling the continuum.
pub fn recurrence_time(bath: &BathSpec) -> f64 {
    2.0 * PI / bath.band_width
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{squared_area, symplectic_eigenvalues};
    use approx::assert_relative_eq;

    fn reference_bath(n: usize) -> BathSpec {
        build_bath(1000.0, 1.0 / 40.0, 16.0, n).unwrap()
    }

    #[test]
    fn bath_discretization_values() {
        let bath = reference_bath(128);
        assert_relative_eq!(bath.band_width, 0.125);
        assert_relative_eq!(bath.freqs[0], 0.0625);
        // (4·1000·(1/40)/π)·0.0625²·0.125
        let expected = 100.0 / PI * 0.0625 * 0.0625 * 0.125;
        assert_relative_eq!(bath.couplings_sq[0], expected, max_relative = 1e-14);
        assert!((bath.couplings_sq[0] - 0.0155425).abs() < 1e-7);
        assert!(bath.freqs.windows(2).all(|w| w[1] > w[0]));

        let one = build_bath(1000.0, 0.025, 16.0, 1).unwrap();
        assert_eq!(one.freqs, vec![8.0]);
    }

    #[test]
    fn counterterm_matches_continuum_integral() {
        // ∫₀^Λ (4 m_S γ₀/π) dω = 4 m_S γ₀ Λ/π
        let limit = 4.0 * 1000.0 * (1.0 / 40.0) * 16.0 / PI;
        assert!((limit - 509.30).abs() < 5e-3);
        for n in [8, 128, 1024] {
            assert_relative_eq!(
                reference_bath(n).counterterm_stiffness(),
                limit,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let bath = build_bath(1000.0, 0.0, 16.0, 8).unwrap();
        let h = build_hamiltonian(&SystemParams::default(), &bath).unwrap();
        assert_eq!(h.stiffness[(0, 0)], 1000.0 * 16.0);
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert_eq!(h.stiffness[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn reference_hamiltonian_is_stable() {
        let h = build_hamiltonian(&SystemParams::default(), &reference_bath(128)).unwrap();
        let min = h.mass_weighted_stiffness().symmetric_eigenvalues().min();
        assert!(min > 0.0);
        assert_relative_eq!(
            h.stiffness[(0, 0)],
            16000.0 + 4.0 * 25.0 * 16.0 / PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn strong_bare_coupling_is_unstable() {
        // without the counterterm a large coupling drives the system stiffness negative
        let bath = build_bath(1.0, 50.0, 16.0, 16).unwrap();
        let sys = SystemParams {
            mass: 1.0,
            ..SystemParams::default()
        };
        let err = build_hamiltonian_with(&sys, &bath, Counterterm::Bare).unwrap_err();
        match err {
            QbmError::ModelInstability { eigenvalue } => assert!(eigenvalue <= 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_hamiltonian(&sys, &bath).is_ok());
    }

    #[test]
    fn initial_state_variances() {
        let bath = reference_bath(16);
        let sys = SystemParams {
            squeeze: 6.3e3,
            ..SystemParams::default()
        };
        let st = initial_state(&sys, &bath).unwrap();
        let c = st.cov();
        assert_relative_eq!(c[(0, 0)], 6300.0 * 6300.0 / 4000.0, max_relative = 1e-14);
        assert_relative_eq!(c[(1, 1)], 4000.0 / (6300.0 * 6300.0), max_relative = 1e-14);
        assert_relative_eq!(c[(2, 2)], 1.0 / bath.freqs[0], max_relative = 1e-14);
        assert_relative_eq!(c[(3, 3)], bath.freqs[0], max_relative = 1e-14);
        assert!(symplectic_eigenvalues(&st)
            .unwrap()
            .iter()
            .all(|&a| (a - 1.0).abs() < 1e-12));

        let variance = SystemParams {
            squeeze_convention: SqueezeConvention::Variance,
            ..sys.clone()
        };
        let (vx, vp) = variance.initial_variances();
        assert_relative_eq!(vx, 1.575, max_relative = 1e-14);
        assert!((vp - 0.6349).abs() < 1e-4);
        let one_mode = GaussianState::diagonal(DVector::zeros(2), &[vx, vp]).unwrap();
        assert_relative_eq!(squared_area(&one_mode).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn p_squeeze_is_x_squeeze_rotated() {
        let x = SystemParams {
            squeeze: 30.0,
            ..SystemParams::default()
        };
        let p = SystemParams {
            squeeze_axis: SqueezeAxis::P,
            ..x.clone()
        };
        let (xx, xp) = x.initial_variances();
        let (px, pp) = p.initial_variances();
        // a quarter period maps x → p/(mω), p → -mω x
        let mw = x.mass * x.omega;
        assert_relative_eq!(px, xp / (mw * mw), max_relative = 1e-14);
        assert_relative_eq!(pp, xx * mw * mw, max_relative = 1e-14);
    }

    #[test]
    fn invalid_squeeze_rejected() {
        let sys = SystemParams {
            squeeze: 0.5,
            ..SystemParams::default()
        };
        assert!(matches!(
            initial_state(&sys, &reference_bath(4)),
            Err(QbmError::InvalidArgument(_))
        ));
    }

    #[test]
    fn recurrence_time_scales_with_bands() {
        let t = recurrence_time(&reference_bath(128));
        assert!((t - 50.27).abs() < 5e-3);
        assert_relative_eq!(
            recurrence_time(&reference_bath(256)),
            2.0 * t,
            max_relative = 1e-14
        );
        assert!(8.0 < t);
    }
}
