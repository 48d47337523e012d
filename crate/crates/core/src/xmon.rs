//! Flux-tunable Xmon qubit: transition frequency versus flux and the
//! linearised longitudinal modulation around a dc bias point.
//!
//! Energies are given as frequencies in GHz (`E/h`). Flux is dimensionless,
//! `Φ/Φ₀`, and restricted to the primary lobe `|Φ/Φ₀| < 0.5`. Returned
//! frequencies are angular (rad/s).

use std::f64::consts::PI;

use crate::units::TWO_PI;
use crate::{Error, Result};

/// Grid used by [`linearity_error`], points per modulation period.
pub const LINEARITY_GRID: usize = 1024;

/// Static qubit constants and decoherence rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    /// Charging energy `E_C/h` in GHz.
    pub ec_ghz: f64,
    /// Total Josephson energy `E_J/h` in GHz.
    pub ej_ghz: f64,
    /// Energy relaxation rate in s⁻¹.
    pub gamma1: f64,
    /// Pure dephasing rate in s⁻¹.
    pub gamma_phi: f64,
}

impl QubitSpec {
    pub fn new(ec_ghz: f64, ej_ghz: f64, gamma1: f64, gamma_phi: f64) -> Result<Self> {
        if !(ec_ghz > 0.0) || !ec_ghz.is_finite() {
            return Err(Error::invalid("ec", "must be positive"));
        }
        if !(ej_ghz > 0.0) || !ej_ghz.is_finite() {
            return Err(Error::invalid("ej", "must be positive"));
        }
        if ej_ghz / ec_ghz <= 1.0 {
            return Err(Error::invalid("ej", "E_J/E_C must exceed 1 (transmon regime)"));
        }
        if !(gamma1 >= 0.0) || !gamma1.is_finite() {
            return Err(Error::invalid("gamma1", "must be non-negative"));
        }
        if !(gamma_phi >= 0.0) || !gamma_phi.is_finite() {
            return Err(Error::invalid("gamma_phi", "must be non-negative"));
        }
        Ok(Self { ec_ghz, ej_ghz, gamma1, gamma_phi })
    }

    pub fn decoherence(&self) -> crate::Decoherence {
        crate::Decoherence { gamma1: self.gamma1, gamma_phi: self.gamma_phi }
    }

    fn ec_angular(&self) -> f64 {
        TWO_PI * self.ec_ghz * 1e9
    }
}

/// Dc bias plus cosine ac flux, `Φ(t) = Φ_dc + Φ_ac cos(ωt + φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBias {
    pub phi_dc: f64,
    pub phi_ac: f64,
    /// Modulation angular frequency (rad/s).
    pub omega_mod: f64,
    /// Initial phase (rad).
    pub phase: f64,
}

impl FluxBias {
    pub fn new(phi_dc: f64, phi_ac: f64, omega_mod: f64, phase: f64) -> Result<Self> {
        if !(phi_ac >= 0.0) {
            return Err(Error::invalid("phi_ac", "must be non-negative"));
        }
        if !(omega_mod > 0.0) {
            return Err(Error::invalid("omega_mod", "must be positive"));
        }
        if !(phi_dc.abs() + phi_ac < 0.5) {
            return Err(Error::invalid("phi_dc", "|phi_dc| + phi_ac must stay below 0.5"));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(Self { phi_dc, phi_ac, omega_mod, phase })
    }

    /// Instantaneous flux at time `t`.
    pub fn flux_at(&self, t: f64) -> f64 {
        self.phi_dc + self.phi_ac * (self.omega_mod * t + self.phase).cos()
    }
}

fn check_lobe(flux: f64) -> Result<()> {
    if flux.abs() < 0.5 {
        Ok(())
    } else {
        Err(Error::invalid("flux", format!("|flux| must be below 0.5, got {flux}")))
    }
}

/// `ω₁₀(Φ) = 2π[√(8 E_C E_J |cos πΦ|) − E_C]`.
pub fn transition_frequency(q: &QubitSpec, flux: f64) -> Result<f64> {
    check_lobe(flux)?;
    let root = (8.0 * q.ec_ghz * q.ej_ghz * (PI * flux).cos().abs()).sqrt();
    if root <= q.ec_ghz {
        return Err(Error::NonPositiveFrequency { flux });
    }
    Ok(TWO_PI * (root - q.ec_ghz) * 1e9)
}

/// `ω_p = 2π √(8 E_C E_J cos πΦ_dc)`.
pub fn plasma_frequency(q: &QubitSpec, phi_dc: f64) -> Result<f64> {
    let c = (PI * phi_dc).cos();
    if !(phi_dc.abs() < 0.5) || !(c > 0.0) {
        return Err(Error::NonPositiveFrequency { flux: phi_dc });
    }
    Ok(TWO_PI * (8.0 * q.ec_ghz * q.ej_ghz * c).sqrt() * 1e9)
}

/// Dc transition frequency `ω₀ = ω_p − E_C/ħ` at the bias point.
pub fn dc_frequency(q: &QubitSpec, phi_dc: f64) -> Result<f64> {
    Ok(plasma_frequency(q, phi_dc)? - q.ec_angular())
}

/// First-order modulation amplitude `A = ω_p φ_ac tan(φ_dc) / 2`, where
/// `φ = πΦ/Φ₀` are the phase-like flux variables.
///
/// The sign follows `tan(π Φ_dc)`; it is negative for a negative dc bias.
pub fn modulation_amplitude(q: &QubitSpec, bias: &FluxBias) -> Result<f64> {
    let wp = plasma_frequency(q, bias.phi_dc)?;
    Ok(wp * (PI * bias.phi_ac) * (PI * bias.phi_dc).tan() / 2.0)
}

/// Linearised transition frequency `ω₀ − A cos(ωt + φ)`.
pub fn effective_frequency(q: &QubitSpec, bias: &FluxBias, t: f64) -> Result<f64> {
    let omega0 = dc_frequency(q, bias.phi_dc)?;
    let a = modulation_amplitude(q, bias)?;
    Ok(omega0 - a * (bias.omega_mod * t + bias.phase).cos())
}

/// Maximum over one modulation period of `|ω₁₀(Φ(t)) − (ω₀ − A cos)| / |A|`,
/// sampled on [`LINEARITY_GRID`] points.
pub fn linearity_error(q: &QubitSpec, bias: &FluxBias) -> Result<f64> {
    let omega0 = dc_frequency(q, bias.phi_dc)?;
    let a = modulation_amplitude(q, bias)?;
    let mut worst: f64 = 0.0;
    for k in 0..LINEARITY_GRID {
        let theta = TWO_PI * k as f64 / LINEARITY_GRID as f64 + bias.phase;
        let exact = transition_frequency(q, bias.phi_dc + bias.phi_ac * theta.cos())?;
        let linear = omega0 - a * theta.cos();
        worst = worst.max((exact - linear).abs());
    }
    if a == 0.0 {
        return Ok(if worst == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(worst / a.abs())
}

/// Non-negative flux at which [`transition_frequency`] equals `omega10`.
pub fn flux_for_frequency(q: &QubitSpec, omega10: f64) -> Result<f64> {
    let f = omega10 / TWO_PI / 1e9;
    if !(f > 0.0) {
        return Err(Error::invalid("omega10", "must be positive"));
    }
    let c = (f + q.ec_ghz).powi(2) / (8.0 * q.ec_ghz * q.ej_ghz);
    if c > 1.0 {
        return Err(Error::invalid("omega10", "above the sweet-spot frequency"));
    }
    Ok(c.acos() / PI)
}

/// Flux bias that places the qubit at `omega0` and produces modulation
/// amplitude `amplitude` (both rad/s).
pub fn bias_for_operating_point(
    q: &QubitSpec,
    omega0: f64,
    amplitude: f64,
    omega_mod: f64,
    phase: f64,
) -> Result<FluxBias> {
    let phi_dc = flux_for_frequency(q, omega0)?;
    if phi_dc == 0.0 && amplitude != 0.0 {
        return Err(Error::invalid("omega0", "sweet spot has no first-order modulation"));
    }
    let wp = plasma_frequency(q, phi_dc)?;
    let phi_ac = if amplitude == 0.0 {
        0.0
    } else {
        2.0 * amplitude / (wp * PI * (PI * phi_dc).tan())
    };
    FluxBias::new(phi_dc, phi_ac, omega_mod, phase)
}
