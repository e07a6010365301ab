//! Exact time evolution through the normal modes of a quadratic Hamiltonian.
//!
//! In mass-weighted coordinates `x̃ = M^{1/2} x`, `p̃ = M^{-1/2} p` the
//! Hamiltonian becomes `½ p̃ᵀp̃ + ½ x̃ᵀ K̃ x̃` with `K̃ = M^{-1/2} K M^{-1/2}`.
//! Diagonalizing `K̃ = V diag(ν²) Vᵀ` once gives the propagator at any time as
//! a rotation per normal mode, so there is no step-size error.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{QbmError, Result};
use crate::gaussian::GaussianState;
use crate::model::QuadraticHamiltonian;

#[derive(Debug, Clone)]
pub struct NormalModes {
    /// Normal-mode angular frequencies ν_k.
    pub frequencies: DVector<f64>,
    /// Orthogonal eigenvectors of the mass-weighted stiffness, one per column.
    pub transform: DMatrix<f64>,
    masses: DVector<f64>,
}

pub fn normal_modes(h: &QuadraticHamiltonian) -> Result<NormalModes> {
    let eig = SymmetricEigen::new(h.mass_weighted_stiffness());
    if let Some(&min) = eig.eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if !(min > 0.0) {
            return Err(QbmError::ModelInstability { eigenvalue: min });
        }
    }
    Ok(NormalModes {
        frequencies: eig.eigenvalues.map(f64::sqrt),
        transform: eig.eigenvectors,
        masses: h.masses.clone(),
    })
}

/// Symplectic map `S_t` on physical `(x, p)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub time: f64,
    pub matrix: DMatrix<f64>,
}

impl NormalModes {
    pub fn n_modes(&self) -> usize {
        self.masses.len()
    }

    pub fn propagator(&self, t: f64) -> Propagator {
        let n = self.n_modes();
        let v = &self.transform;
        let conj = |diag: &dyn Fn(f64) -> f64| -> DMatrix<f64> {
            let mut scaled = v.clone();
            for (k, mut col) in scaled.column_iter_mut().enumerate() {
                col *= diag(self.frequencies[k]);
            }
            scaled * v.transpose()
        };
        let cos = conj(&|nu| (nu * t).cos());
        let sin_over = conj(&|nu| (nu * t).sin() / nu);
        let minus_nu_sin = conj(&|nu| -nu * (nu * t).sin());

        let sq: Vec<f64> = self.masses.iter().map(|m| m.sqrt()).collect();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                s[(2 * i, 2 * j)] = cos[(i, j)] * sq[j] / sq[i];
                s[(2 * i, 2 * j + 1)] = sin_over[(i, j)] / (sq[i] * sq[j]);
                s[(2 * i + 1, 2 * j)] = minus_nu_sin[(i, j)] * sq[i] * sq[j];
                s[(2 * i + 1, 2 * j + 1)] = cos[(i, j)] * sq[i] / sq[j];
            }
        }
        Propagator { time: t, matrix: s }
    }
}

/// Diagonalizes `h` and returns `S_t`. Drivers evaluating many times should
/// keep the [`NormalModes`] and call [`NormalModes::propagator`] instead.
pub fn propagator(h: &QuadraticHamiltonian, t: f64) -> Result<Propagator> {
    Ok(normal_modes(h)?.propagator(t))
}

pub fn evolve(state: &GaussianState, p: &Propagator) -> Result<GaussianState> {
    state.transformed(&p.matrix)
}
