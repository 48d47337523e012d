//! Closed-form LZS estimates, the special functions behind them, trace
//! fitting and spectrum metrics.

mod fit;
mod formulas;
pub mod special;

pub use fit::{fit_damped_sine, fit_damped_sine_samples, DampedSineFit, MIN_PERIODS, MIN_SAMPLES};
pub use formulas::{
    adiabaticity_delta, classify_regime, interference_chain, landau_zener_probability,
    rabi_like_frequency_gv, rabi_like_frequency_lz, sweep_velocity, EllipticConvention,
    InterferenceChain, LzsPoint, Regime, ADIABATIC_RATIO, NON_ADIABATIC_RATIO,
};
pub use special::{bessel_j, bessel_j0_zero, complete_elliptic_e, complete_elliptic_e_modulus, complex_gamma_arg};

use crate::sweep::SweepResult;
use crate::units::fold_phase;
use crate::{Error, Result};

/// Relative tolerance for detuning values to count as mirror pairs.
pub const MIRROR_TOL: f64 = 1e-12;

/// Mean of `|P(ε₀, A) − P(−ε₀, A)|` over all cells with `ε₀ > 0`. The first
/// axis of `result` must be the detuning axis, symmetric about zero.
pub fn spectrum_asymmetry(result: &SweepResult) -> Result<f64> {
    let eps = &result.grid.axis1.values;
    let n = eps.len();
    let scale = eps.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        let j = n - 1 - i;
        if (eps[i] + eps[j]).abs() > MIRROR_TOL * scale {
            return Err(Error::AsymmetricGrid(format!(
                "detuning {} has no mirror partner (found {})",
                eps[i], eps[j]
            )));
        }
    }
    let cols = result.grid.axis2.len();
    let (mut sum, mut count) = (0.0, 0usize);
    for i in (0..n).filter(|&i| eps[i] > 0.0) {
        let j = n - 1 - i;
        for k in 0..cols {
            sum += (result.get(i, k) - result.get(j, k)).abs();
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { sum / count as f64 })
}

/// Phase accumulated by the modulation over a fixed delay, folded to
/// `[0, 2π)`.
pub fn delay_phase_offset(omega: f64, delay: f64) -> f64 {
    fold_phase(omega * delay)
}

/// Simulation phase corresponding to an experimental phase label when the
/// modulation leads the drive by `offset`.
pub fn experimental_to_numerical_phase(experimental: f64, offset: f64) -> f64 {
    fold_phase(experimental - offset)
}
