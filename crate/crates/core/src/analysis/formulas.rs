//! Closed-form Landau-Zener-Stückelberg estimates.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use super::special::{complete_elliptic_e, complete_elliptic_e_modulus, complex_gamma_arg};
use crate::{Error, Result};

/// A parameter point in angular units (rad/s): Rabi frequency `Ω`,
/// modulation amplitude `A`, modulation frequency `ω`, detuning `ε₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzsPoint {
    pub rabi: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub detuning: f64,
}

impl LzsPoint {
    pub fn new(rabi: f64, amplitude: f64, omega: f64, detuning: f64) -> Result<Self> {
        let p = Self { rabi, amplitude, omega, detuning };
        p.validate()?;
        Ok(p)
    }

    /// Resonant point, `ε₀ = 0`.
    pub fn resonant(rabi: f64, amplitude: f64, omega: f64) -> Result<Self> {
        Self::new(rabi, amplitude, omega, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(Error::invalid("rabi", format!("must be finite and >= 0, got {}", self.rabi)));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("amplitude", format!("must be finite and > 0, got {}", self.amplitude)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be finite and > 0, got {}", self.omega)));
        }
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        if self.detuning.abs() >= self.amplitude {
            return Err(Error::DetuningExceedsAmplitude { detuning: self.detuning, amplitude: self.amplitude });
        }
        Ok(())
    }

    /// `Ω² / (A ω)`, the quantity the regime classifier thresholds.
    pub fn coupling_ratio(&self) -> f64 {
        self.rabi * self.rabi / (self.amplitude * self.omega)
    }
}

/// Sweep velocity at the level crossing, `v = Aω√(1 − (ε₀/A)²)` in rad/s².
pub fn sweep_velocity(p: &LzsPoint) -> Result<f64> {
    p.validate()?;
    let ratio = p.detuning / p.amplitude;
    Ok(p.amplitude * p.omega * (1.0 - ratio * ratio).sqrt())
}

/// Adiabaticity parameter `δ = Ω² / (4v)`.
pub fn adiabaticity_delta(p: &LzsPoint) -> Result<f64> {
    Ok(p.rabi * p.rabi / (4.0 * sweep_velocity(p)?))
}

/// Single-passage Landau-Zener probability `exp(−2πδ)`.
pub fn landau_zener_probability(delta: f64) -> f64 {
    (-2.0 * PI * delta).exp()
}

/// Coarse classification by `r = Ω²/(Aω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `r > 4`
    Adiabatic,
    Boundary,
    /// `r < 1/4`
    NonAdiabatic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Adiabatic => "adiabatic",
            Regime::Boundary => "boundary",
            Regime::NonAdiabatic => "non_adiabatic",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const ADIABATIC_RATIO: f64 = 4.0;
pub const NON_ADIABATIC_RATIO: f64 = 0.25;

pub fn classify_regime(p: &LzsPoint) -> Regime {
    let r = p.coupling_ratio();
    if r > ADIABATIC_RATIO {
        Regime::Adiabatic
    } else if r < NON_ADIABATIC_RATIO {
        Regime::NonAdiabatic
    } else {
        Regime::Boundary
    }
}

/// Rabi-like oscillation frequency from the Landau-Zener probability,
/// `Ω₀ = 2ω√P_LZ / π`.
pub fn rabi_like_frequency_lz(p: &LzsPoint) -> Result<f64> {
    let p_lz = landau_zener_probability(adiabaticity_delta(p)?);
    Ok(2.0 * p.omega * p_lz.sqrt() / PI)
}

/// How `cos Θ` is fed to the complete elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EllipticConvention {
    /// `E(m = cos Θ)`
    #[default]
    Parameter,
    /// `E(k = cos Θ)`, i.e. `E(m = cos²Θ)`
    Modulus,
}

/// Every intermediate of the resonant interference chain, kept so a
/// mismatch can be localized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceChain {
    pub alpha: f64,
    pub chi: f64,
    pub phi_lz: f64,
    pub theta: f64,
    pub phi_ad: f64,
    pub transition_probability: f64,
    pub beta: f64,
    /// `Ω₀` in rad/s.
    pub frequency: f64,
}

/// Evaluates the full resonant chain for `Ω₀ = ωβ/π`. Only stated for
/// `ε₀ = 0`; other detunings are rejected.
pub fn interference_chain(p: &LzsPoint, convention: EllipticConvention) -> Result<InterferenceChain> {
    p.validate()?;
    if p.detuning != 0.0 {
        return Err(Error::invalid("detuning", "the interference chain is only defined on resonance"));
    }
    let (rabi, a, w) = (p.rabi, p.amplitude, p.omega);
    let alpha = rabi / (2.0 * a * w).sqrt();
    let half_a2 = 0.5 * alpha * alpha;
    let chi = (-PI * half_a2).exp().acos();
    let log_term = if half_a2 > 0.0 { half_a2 * (half_a2.ln() - 1.0) } else { 0.0 };
    let phi_lz = complex_gamma_arg(half_a2)? + FRAC_PI_4 + log_term;
    let theta = (rabi / a).atan();
    let e = match convention {
        EllipticConvention::Parameter => complete_elliptic_e(theta.cos())?,
        EllipticConvention::Modulus => complete_elliptic_e_modulus(theta.cos())?,
    };
    let phi_ad = rabi.hypot(a) * e / (2.0 * w);
    let transition_probability = chi.sin().powi(2) * (phi_lz + 2.0 * phi_ad).sin().powi(2);
    let beta = (1.0 - 2.0 * transition_probability).clamp(-1.0, 1.0).acos();
    Ok(InterferenceChain {
        alpha,
        chi,
        phi_lz,
        theta,
        phi_ad,
        transition_probability,
        beta,
        frequency: w * beta / PI,
    })
}

/// `Ω₀` from the resonant interference chain in the parameter convention.
pub fn rabi_like_frequency_gv(p: &LzsPoint) -> Result<f64> {
    Ok(interference_chain(p, EllipticConvention::Parameter)?.frequency)
}
