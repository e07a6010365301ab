//! Phase-space representation of multimode Gaussian states.
//!
//! States are stored as a mean vector and covariance matrix in interleaved
//! `(x, p)` ordering. When a state is produced by symplectic maps acting on a
//! product state, a square-root factor `F` with `cov = F Fᵀ` is carried along
//! as well; spectra are then computed from `F` directly, which keeps the
//! symplectic eigenvalues of strongly squeezed, highly entangled states
//! accurate to near machine precision.

use nalgebra::{DMatrix, DVector};

use crate::error::{QbmError, Result};
use crate::units::HALF_HBAR;

/// Symplectic eigenvalues in `[1 - PHYSICALITY_TOL, 1)` are round-off and get
/// clamped to 1; anything lower is a physicality violation.
pub const PHYSICALITY_TOL: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-12;

/// Sorted, duplicate-free selection of modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSubset {
    indices: Vec<usize>,
}

impl ModeSubset {
    /// Builds a subset of the modes `0..n_modes`. Input order is irrelevant.
    pub fn new(mut indices: Vec<usize>, n_modes: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(QbmError::invalid(format!("duplicate mode index {}", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= n_modes {
                return Err(QbmError::invalid(format!(
                    "mode index {last} out of range for {n_modes} modes"
                )));
            }
        }
        Ok(Self { indices })
    }

    pub fn all(n_modes: usize) -> Self {
        Self {
            indices: (0..n_modes).collect(),
        }
    }

    pub fn single(index: usize) -> Self {
        Self {
            indices: vec![index],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Re-expresses `inner`, a subset of the modes of a marginal taken on
    /// `self`, in terms of the parent state's modes.
    pub fn compose(&self, inner: &ModeSubset) -> Result<ModeSubset> {
        let indices = inner
            .indices
            .iter()
            .map(|&i| {
                self.indices.get(i).copied().ok_or_else(|| {
                    QbmError::invalid(format!(
                        "inner index {i} exceeds subset of size {}",
                        self.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeSubset { indices })
    }

    fn phase_space_rows(&self) -> Vec<usize> {
        self.indices
            .iter()
            .flat_map(|&i| [2 * i, 2 * i + 1])
            .collect()
    }
}

/// Mean and covariance of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    factor: Option<DMatrix<f64>>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(QbmError::invalid(format!(
                "phase-space dimension must be positive and even, got {dim}"
            )));
        }
        if cov.shape() != (dim, dim) {
            return Err(QbmError::invalid(format!(
                "covariance is {:?}, expected {dim}x{dim}",
                cov.shape()
            )));
        }
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        for i in 0..dim {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(QbmError::invalid(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            mean,
            cov,
            factor: None,
        })
    }

    /// State with covariance `factor · factorᵀ`.
    pub fn from_factor(mean: DVector<f64>, factor: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) || factor.nrows() != dim {
            return Err(QbmError::invalid(format!(
                "factor with {} rows does not match mean of length {dim}",
                factor.nrows()
            )));
        }
        let cov = &factor * factor.transpose();
        Ok(Self {
            mean,
            cov,
            factor: Some(factor),
        })
    }

    /// Product state with diagonal covariance `diag(variances)`.
    pub fn diagonal(mean: DVector<f64>, variances: &[f64]) -> Result<Self> {
        if variances.len() != mean.len() {
            return Err(QbmError::invalid("variances and mean differ in length"));
        }
        if let Some(v) = variances.iter().find(|v| !(**v > 0.0)) {
            return Err(QbmError::invalid(format!("variance {v} is not positive")));
        }
        let sqrt = DVector::from_iterator(variances.len(), variances.iter().map(|v| v.sqrt()));
        Self::from_factor(mean, DMatrix::from_diagonal(&sqrt))
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn factor(&self) -> Option<&DMatrix<f64>> {
        self.factor.as_ref()
    }

    /// Applies the linear phase-space map `s`: mean → S·mean, cov → S·cov·Sᵀ.
    pub fn transformed(&self, s: &DMatrix<f64>) -> Result<Self> {
        let dim = self.mean.len();
        if s.shape() != (dim, dim) {
            return Err(QbmError::invalid(format!(
                "map is {:?}, state has phase-space dimension {dim}",
                s.shape()
            )));
        }
        let mean = s * &self.mean;
        match &self.factor {
            Some(f) => Self::from_factor(mean, s * f),
            None => {
                let mut cov = s * &self.cov * s.transpose();
                symmetrize(&mut cov);
                Ok(Self {
                    mean,
                    cov,
                    factor: None,
                })
            }
        }
    }

    pub fn entropy(&self) -> Result<f64> {
        symplectic_eigenvalues(self)?
            .into_iter()
            .map(entropy_from_area)
            .sum()
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Block-diagonal symplectic form with per-mode blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> Result<DMatrix<f64>> {
    if n_modes == 0 {
        return Err(QbmError::invalid("symplectic form needs at least one mode"));
    }
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(j)
}

pub fn marginal(state: &GaussianState, subset: &ModeSubset) -> Result<GaussianState> {
    if subset.is_empty() {
        return Err(QbmError::invalid("marginal over an empty subset"));
    }
    let n = state.n_modes();
    if let Some(&last) = subset.indices.last() {
        if last >= n {
            return Err(QbmError::invalid(format!(
                "subset index {last} out of range for {n} modes"
            )));
        }
    }
    let rows = subset.phase_space_rows();
    let mean = state.mean.select_rows(rows.iter());
    let cov = state
        .cov
        .select_rows(rows.iter())
        .select_columns(rows.iter());
    let factor = state.factor.as_ref().map(|f| f.select_rows(rows.iter()));
    Ok(GaussianState { mean, cov, factor })
}

/// `a² = (ħ/2)⁻² det(cov)` of a single-mode state.
pub fn squared_area(state: &GaussianState) -> Result<f64> {
    if state.n_modes() != 1 {
        return Err(QbmError::invalid(format!(
            "squared area is defined for one mode, state has {}; use symplectic_eigenvalues",
            state.n_modes()
        )));
    }
    let c = &state.cov;
    Ok((c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)]) / (HALF_HBAR * HALF_HBAR))
}

/// Symplectic eigenvalues in units of ħ/2, sorted descending.
///
/// These are the magnitudes of the imaginary eigenvalue pairs of `J·cov`.
/// They are obtained from the similar antisymmetric matrix `R J Rᵀ`, where
/// `Rᵀ R = D cov D` and `D` is a local symplectic rescaling that equalises each
/// mode's position and momentum variances. `R` comes from a QR factorisation
/// of the stored square-root factor when there is one, otherwise from a
/// Cholesky factorisation of the covariance.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    let n = state.n_modes();
    let dim = 2 * n;
    let cov = &state.cov;

    let mut scale = Vec::with_capacity(dim);
    for k in 0..n {
        let (vx, vp) = (cov[(2 * k, 2 * k)], cov[(2 * k + 1, 2 * k + 1)]);
        if !(vx > 0.0 && vp > 0.0) {
            return Err(QbmError::Physicality {
                eigenvalue: vx.min(vp),
            });
        }
        let c = (vp / vx).powf(0.25);
        scale.extend([c, 1.0 / c]);
    }

    let r = match &state.factor {
        Some(f) => {
            let mut g = f.clone();
            for (i, c) in scale.iter().enumerate() {
                g.row_mut(i).scale_mut(*c);
            }
            if g.ncols() < dim {
                // rank-deficient factor cannot describe a physical state
                return Err(QbmError::Physicality { eigenvalue: 0.0 });
            }
            g.transpose().qr().r()
        }
        None => {
            let mut c = cov.clone();
            for i in 0..dim {
                for j in 0..dim {
                    c[(i, j)] *= scale[i] * scale[j];
                }
            }
            match c.clone().cholesky() {
                Some(ch) => ch.l().transpose(),
                None => {
                    let min = c.symmetric_eigenvalues().min();
                    return Err(QbmError::Physicality { eigenvalue: min });
                }
            }
        }
    };

    let j = symplectic_form(n)?;
    let a = &r * j * r.transpose() / HALF_HBAR;
    let mut squares: Vec<f64> = (a.transpose() * &a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    squares.sort_by(f64::total_cmp);

    let mut nu: Vec<f64> = squares
        .chunks_exact(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect();
    nu.sort_by(|a, b| b.total_cmp(a));
    for v in nu.iter_mut() {
        if *v < 1.0 {
            if *v >= 1.0 - PHYSICALITY_TOL {
                *v = 1.0;
            } else {
                return Err(QbmError::Physicality { eigenvalue: *v });
            }
        }
    }
    Ok(nu)
}

/// Von Neumann entropy (nats) of a single mode with symplectic area `a`:
/// `½[(a+1)ln(a+1) − (a−1)ln(a−1)] − ln 2`.
pub fn entropy_from_area(a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(QbmError::invalid(format!("symplectic area {a} below 1")));
    }
    if a == 1.0 {
        return Ok(0.0);
    }
    let h = if a < 2.0 {
        let am1 = a - 1.0;
        0.5 * ((a + 1.0) * (a + 1.0).ln() - am1 * am1.ln()) - std::f64::consts::LN_2
    } else {
        // (a±1)ln(a±1) expanded about ln a to avoid cancellation for large a
        let inv = 1.0 / a;
        0.5 * (2.0 * a.ln() + (a + 1.0) * inv.ln_1p() - (a - 1.0) * (-inv).ln_1p())
            - std::f64::consts::LN_2
    };
    Ok(h.max(0.0))
}

/// Entropy of the marginal on `subset`: the sum of per-eigenvalue entropies.
pub fn entropy(state: &GaussianState, subset: &ModeSubset) -> Result<f64> {
    marginal(state, subset)?.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vacuum(n: usize) -> GaussianState {
        GaussianState::diagonal(DVector::zeros(2 * n), &vec![1.0; 2 * n]).unwrap()
    }

    #[test]
    fn symplectic_form_small() {
        let j1 = symplectic_form(1).unwrap();
        assert_eq!(j1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let j2 = symplectic_form(2).unwrap();
        assert_eq!(j2[(0, 1)], 1.0);
        assert_eq!(j2[(3, 2)], -1.0);
        assert_eq!(j2[(0, 3)], 0.0);
        assert_eq!(j2[(1, 2)], 0.0);
        let j5 = symplectic_form(5).unwrap();
        assert_eq!(&j5 * &j5, -DMatrix::identity(10, 10));
        assert!(matches!(
            symplectic_form(0),
            Err(QbmError::InvalidArgument(_))
        ));
    }

    #[test]
    fn mode_subset_sorts_and_rejects_bad_input() {
        let s = ModeSubset::new(vec![3, 0, 2], 4).unwrap();
        assert_eq!(s.indices(), &[0, 2, 3]);
        assert!(ModeSubset::new(vec![1, 1], 4).is_err());
        assert!(ModeSubset::new(vec![4], 4).is_err());
    }

    #[test]
    fn marginal_of_product_vacuum() {
        let m = marginal(&vacuum(2), &ModeSubset::single(0)).unwrap();
        assert_eq!(m.n_modes(), 1);
        assert_eq!(m.cov(), &DMatrix::identity(2, 2));
        let all = marginal(&vacuum(3), &ModeSubset::all(3)).unwrap();
        assert_eq!(all, vacuum(3));
        assert!(marginal(&vacuum(2), &ModeSubset::new(vec![], 2).unwrap()).is_err());
    }

    #[test]
    fn marginal_of_two_mode_squeezed_vacuum() {
        // cov = [[c I, s Z], [s Z, c I]] with c = cosh 2r, s = sinh 2r, Z = diag(1,-1)
        let r: f64 = 0.7;
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        let st = GaussianState::new(DVector::zeros(4), cov).unwrap();
        let m = marginal(&st, &ModeSubset::single(0)).unwrap();
        // hand-evaluated 2x2 determinant: c*c - 0*0
        let det = c * c;
        assert_relative_eq!(squared_area(&m).unwrap(), det, max_relative = 1e-14);
        assert!(det > 1.0);
        assert_relative_eq!(st.entropy().unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn squared_area_examples() {
        let (m, w) = (3.0, 2.5);
        let gs = GaussianState::diagonal(DVector::zeros(2), &[1.0 / (m * w), m * w]).unwrap();
        assert_relative_eq!(squared_area(&gs).unwrap(), 1.0, max_relative = 1e-14);

        let sq = GaussianState::diagonal(DVector::zeros(2), &[4.0 / (m * w), 4.0 * m * w]).unwrap();
        assert_relative_eq!(squared_area(&sq).unwrap(), 16.0, max_relative = 1e-14);

        // decohered: Δp² grows by 2ħd with 8Δx²d/ħ = 99
        let dx2 = 0.37;
        let d = 99.0 * crate::units::HBAR / (8.0 * dx2);
        let dp2 = 1.0 / dx2 + 2.0 * crate::units::HBAR * d;
        let dec = GaussianState::diagonal(DVector::zeros(2), &[dx2, dp2]).unwrap();
        assert_relative_eq!(squared_area(&dec).unwrap(), 100.0, max_relative = 1e-12);

        assert!(squared_area(&vacuum(2)).is_err());
    }

    #[test]
    fn vacuum_eigenvalues_are_one() {
        let nu = symplectic_eigenvalues(&vacuum(4)).unwrap();
        assert_eq!(nu, vec![1.0; 4]);
    }

    #[test]
    fn single_mode_eigenvalue_matches_area() {
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(2, 2, &[
            2.3, 0.4,
            0.4, 1.9,
        ]);
        let st = GaussianState::new(DVector::zeros(2), cov).unwrap();
        let nu = symplectic_eigenvalues(&st).unwrap();
        assert_relative_eq!(
            nu[0],
            squared_area(&st).unwrap().sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            entropy(&st, &ModeSubset::single(0)).unwrap(),
            entropy_from_area(nu[0]).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn unphysical_state_is_rejected() {
        let st = GaussianState::diagonal(DVector::zeros(2), &[0.5, 0.5]).unwrap();
        assert!(matches!(
            symplectic_eigenvalues(&st),
            Err(QbmError::Physicality { .. })
        ));
        let within_window = GaussianState::diagonal(DVector::zeros(2), &[1.0 - 2e-9, 1.0]).unwrap();
        assert_eq!(symplectic_eigenvalues(&within_window).unwrap(), vec![1.0]);
    }

    #[test]
    fn entropy_from_area_values() {
        assert_eq!(entropy_from_area(1.0).unwrap(), 0.0);
        assert_relative_eq!(
            entropy_from_area(3.0).unwrap(),
            2.0 * std::f64::consts::LN_2,
            max_relative = 1e-14
        );
        let h100 = entropy_from_area(100.0).unwrap();
        assert!((h100 - 4.912006).abs() < 1e-6);
        let approx = (std::f64::consts::E * 100.0 / 2.0).ln();
        assert!((approx - 4.91202).abs() < 1e-5);
        assert!((h100 - approx).abs() < 1e-4);
        assert!(entropy_from_area(0.999).is_err());
    }

    #[test]
    fn entropy_from_area_branches_agree() {
        // direct formula evaluated on either side of the branch switch
        let direct = |a: f64| {
            0.5 * ((a + 1.0) * (a + 1.0).ln() - (a - 1.0) * (a - 1.0).ln()) - std::f64::consts::LN_2
        };
        for a in [2.0, 2.5, 7.0, 50.0] {
            assert_relative_eq!(
                entropy_from_area(a).unwrap(),
                direct(a),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn log_approximation_quality() {
        // the logarithmic form is accurate to a few percent of a nat from a = 2
        // and to 1e-2 from a ≈ 4.1 onward
        let gap = |a: f64| entropy_from_area(a).unwrap() - (std::f64::consts::E * a / 2.0).ln();
        assert!(gap(2.0).abs() < 5e-2);
        for a in [4.2, 5.0, 10.0, 1e3] {
            assert!(gap(a).abs() < 1e-2, "a = {a}");
        }
        assert!(gap(1e4).abs() < 1e-8);
    }
}
