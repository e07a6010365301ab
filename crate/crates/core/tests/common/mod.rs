#![allow(dead_code)]

use qbm_core::{
    build_bath, build_hamiltonian, evolve, initial_state, normal_modes, BathSpec, GaussianState,
    QuadraticHamiltonian, SystemParams,
};

pub struct Setup {
    pub sys: SystemParams,
    pub bath: BathSpec,
    pub ham: QuadraticHamiltonian,
    pub state0: GaussianState,
}

/// Reference configuration: m_S = 1000, ω_S = 4, m_S γ₀ = 25, Λ = 16.
pub fn setup(n_bands: usize, squeeze: f64) -> Setup {
    let sys = SystemParams {
        squeeze,
        ..Default::default()
    };
    let bath = build_bath(sys.mass, 25.0 / sys.mass, 16.0, n_bands).unwrap();
    let ham = build_hamiltonian(&sys, &bath).unwrap();
    let state0 = initial_state(&sys, &bath).unwrap();
    Setup {
        sys,
        bath,
        ham,
        state0,
    }
}

impl Setup {
    pub fn at(&self, t: f64) -> GaussianState {
        let modes = normal_modes(&self.ham).unwrap();
        evolve(&self.state0, &modes.propagator(t)).unwrap()
    }
}
