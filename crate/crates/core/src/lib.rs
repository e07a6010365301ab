//! Zero-temperature quantum Brownian motion as a global Gaussian state.
//!
//! A central oscillator is coupled to a discretized ohmic bath. The whole
//! system-plus-environment state is kept as a mean vector and covariance
//! matrix, evolved exactly through the normal modes of the quadratic
//! Hamiltonian, and analysed for how redundantly the environment records the
//! system's position.
//!
//! Phase-space vectors are interleaved, `(x_0, p_0, x_1, p_1, ...)`, with mode
//! 0 the system and modes `1..=N` the bath bands in ascending frequency.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod gaussian;
pub mod information;
pub mod model;
pub mod quadrature;
pub mod theory;
pub mod units;

pub use error::{QbmError, Result};
pub use evolution::{evolve, normal_modes, propagator, NormalModes, Propagator};
pub use gaussian::{
    entropy, entropy_from_area, marginal, squared_area, symplectic_eigenvalues, symplectic_form,
    GaussianState, ModeSubset,
};
pub use information::{
    band_information_spectrum, mutual_information, pip, redundancy, redundancy_with, Fragment,
    InformationProbe, PipCurve, RedundancyEstimator, RedundancyResult,
};
pub use model::{
    build_bath, build_hamiltonian, build_hamiltonian_with, initial_state, recurrence_time,
    BathSpec, Counterterm, QuadraticHamiltonian, SqueezeAxis, SqueezeConvention, SystemParams,
};
pub use theory::TheoryParams;
