//! Simulation units. Every module reads the value of ħ from here.

/// Reduced Planck constant; chosen so that `ħ/2 = 1`.
pub const HBAR: f64 = 2.0;

/// `ħ/2`, the variance product of a minimum-uncertainty state.
pub const HALF_HBAR: f64 = HBAR / 2.0;

/// Unit system used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsConfig {
    pub hbar: f64,
}

impl UnitsConfig {
    pub const SIMULATION: UnitsConfig = UnitsConfig { hbar: HBAR };
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self::SIMULATION
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_hbar_is_one() {
        assert_eq!(HALF_HBAR, 1.0);
        assert_eq!(UnitsConfig::default().hbar, 2.0);
    }
}
