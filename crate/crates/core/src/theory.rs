//! Closed-form predictions for decoherence, partial information and
//! redundancy in the massive, underdamped limit.
//!
//! Each environment band at frequency ω is displaced (or driven) conditionally
//! on the system position. The additive decoherence `d = −ln Γ / (x − x′)²` of
//! a set of bands raises the squared symplectic area of its reduced state by
//! `δa² = (8Δx²/ħ) d`, and entropies follow from the single-mode formula.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QbmError, Result};
use crate::gaussian::entropy_from_area;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::units::HBAR;

/// Oscillator mass of every environment band.
const BAND_MASS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub mass_s: f64,
    pub gamma0: f64,
    pub omega_s: f64,
    pub cutoff: f64,
    /// Initial position variance of the system.
    pub delta_x2: f64,
}

impl TheoryParams {
    pub fn new(mass_s: f64, gamma0: f64, omega_s: f64, cutoff: f64, delta_x2: f64) -> Result<Self> {
        let positive = [mass_s, omega_s, cutoff, delta_x2].iter().all(|v| *v > 0.0);
        if !positive || !(gamma0 >= 0.0) {
            return Err(QbmError::invalid(format!(
                "theory parameters must be positive: m_S={mass_s}, gamma0={gamma0}, \
                 omega_S={omega_s}, Lambda={cutoff}, dx2={delta_x2}"
            )));
        }
        Ok(Self {
            mass_s,
            gamma0,
            omega_s,
            cutoff,
            delta_x2,
        })
    }

    /// `m_S γ₀ / (π ħ)`, the prefactor shared by both decoherence densities.
    fn density_scale(&self) -> f64 {
        self.mass_s * self.gamma0 / (PI * HBAR)
    }

    /// `8Δx²/ħ`, converting additive decoherence into squared area.
    fn area_per_decoherence(&self) -> f64 {
        8.0 * self.delta_x2 / HBAR
    }
}

/// `C² = (4 m_S m γ₀/π) ω² Δω` for a band of width `band_width` centred at ω.
pub fn band_coupling_sq(omega: f64, band_width: f64, p: &TheoryParams) -> f64 {
    4.0 * p.mass_s * BAND_MASS * p.gamma0 / PI * omega * omega * band_width
}

/// `1 − cos x` without cancellation at small x.
fn one_minus_cos(x: f64) -> f64 {
    2.0 * (0.5 * x).sin().powi(2)
}

/// |Γ| between system positions separated by `x_sep`, for a single band whose
/// oscillator is only displaced (not driven) by a frozen system.
pub fn decoherence_factor_static(
    omega: f64,
    t: f64,
    x_sep: f64,
    band_width: f64,
    p: &TheoryParams,
) -> f64 {
    let c2 = band_coupling_sq(omega, band_width, p);
    (-c2 / (2.0 * BAND_MASS * HBAR * omega.powi(3)) * x_sep * x_sep * one_minus_cos(omega * t))
        .exp()
}

/// Decoherence density of a frozen system: `(2 m_S γ₀/(πħω))(1 − cos ωt)`.
pub fn dd_domega_static(omega: f64, t: f64, p: &TheoryParams) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    2.0 * p.density_scale() / omega * one_minus_cos(omega * t)
}

/// `∫₀ᵗ e^{ixτ} dτ = t e^{ixt/2} sinc(xt/2)`.
fn phase_integral(x: f64, t: f64) -> Complex64 {
    let y = 0.5 * x * t;
    let sinc = if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    };
    Complex64::from_polar(t * sinc, y)
}

/// Decoherence density when the system oscillates as `x₀ cos ω_S t` and drives
/// each band:
///
/// `(m_S γ₀/πħ) ω³/(ω_S² − ω²)² [(sin ωt − (ω_S/ω) sin ω_S t)² + (cos ωt − cos ω_S t)²]`.
///
/// Evaluated as `(m_S γ₀/πħ) ω |∫₀ᵗ e^{−iωτ} cos(ω_S τ) dτ|²`, which is the
/// same function with the resonance at ω = ω_S already cancelled.
pub fn dd_domega_driven(omega: f64, t: f64, p: &TheoryParams) -> f64 {
    let w = p.omega_s;
    let amp = 0.5 * (phase_integral(w - omega, t) + phase_integral(-w - omega, t));
    p.density_scale() * omega * amp.norm_sqr()
}

/// Squared-area increase of the system after time t, integrating the driven
/// density over the whole bath.
pub fn delta_a2_system(t: f64, p: &TheoryParams) -> Result<f64> {
    if t == 0.0 || p.gamma0 == 0.0 {
        return Ok(0.0);
    }
    let d = integrate(
        |w| dd_domega_driven(w, t, p),
        0.0,
        p.cutoff,
        &[p.omega_s],
        QuadratureOptions::default(),
    )?;
    Ok(p.area_per_decoherence() * d)
}

/// Predicted system entropy `H(√(1 + δa²))`.
pub fn system_entropy(t: f64, p: &TheoryParams) -> Result<f64> {
    entropy_from_area((1.0 + delta_a2_system(t, p)?).sqrt())
}

/// Squared-area increase of a band of width `band_width` at ω.
pub fn band_delta_a2(omega: f64, band_width: f64, t: f64, p: &TheoryParams) -> f64 {
    p.area_per_decoherence() * band_width * dd_domega_driven(omega, t, p)
}

/// Information a group of bands holds about the system, approximated by the
/// group's own entropy. `omegas` are the band centres, each of width `band_width`.
pub fn band_group_information(
    omegas: &[f64],
    band_width: f64,
    t: f64,
    p: &TheoryParams,
) -> Result<f64> {
    let da2: f64 = omegas
        .iter()
        .map(|&w| band_delta_a2(w, band_width, t, p))
        .sum();
    entropy_from_area((1.0 + da2).sqrt())
}

/// Partial-information plateau `H_S + ½ ln(f/(1−f))`, clamped to `[0, 2H_S]`.
pub fn pip_theory(f: f64, h_s: f64) -> f64 {
    (h_s + 0.5 * (f / (1.0 - f)).ln()).clamp(0.0, 2.0 * h_s)
}

/// Smallest fraction holding `(1−δ)H_S`: `e^{−2δH_S}/(1 + e^{−2δH_S})`.
pub fn f_delta_theory(delta: f64, h_s: f64) -> f64 {
    let e = (-2.0 * delta * h_s).exp();
    e / (1.0 + e)
}

/// `R_δ = 1/f_δ = 1 + e^{2δH_S}`.
pub fn redundancy_theory(delta: f64, h_s: f64) -> f64 {
    1.0 + (2.0 * delta * h_s).exp()
}

/// Leading-order form `e^{2δH_S}`.
pub fn redundancy_theory_approx(delta: f64, h_s: f64) -> f64 {
    (2.0 * delta * h_s).exp()
}

/// `s^{2δ}`, using `H_S ≈ ln s` for a fully decohered squeezed state.
pub fn redundancy_theory_squeeze(delta: f64, s: f64) -> f64 {
    s.powf(2.0 * delta)
}
