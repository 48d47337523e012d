//! Bundled parameter sets for the adiabatic-limit, boundary and
//! steady-state spectrum runs.

use std::f64::consts::PI;

use crate::dynamics::{Decoherence, DriveSpec, ModulationSpec, DEFAULT_TOL};
use crate::sweep::{Axis, SimParams, DEFAULT_AVG_PERIODS};
use crate::units::{mhz, us};
use crate::xmon::QubitSpec;
use crate::Result;

/// Γ₁ = 1/T₁ with T₁ = 26.4 μs.
pub const GAMMA1: f64 = 1.0 / 26.4e-6;
/// Pure dephasing rate (s⁻¹).
pub const GAMMA_PHI: f64 = 0.18e6;
pub const EC_GHZ: f64 = 0.264;
pub const EJ_GHZ: f64 = 13.822;
/// Idle qubit frequency `ω₀/2π` (GHz).
pub const OMEGA0_GHZ: f64 = 4.365;

pub const SPECTRUM_DETUNING_MHZ: (f64, f64) = (-40.0, 40.0);
pub const SPECTRUM_DETUNING_POINTS: usize = 81;
/// Range of `A/ω` covered by the spectrum amplitude axis.
pub const SPECTRUM_RATIO: (f64, f64) = (0.5, 15.0);
pub const SPECTRUM_AMPLITUDE_POINTS: usize = 34;
pub const SPECTRUM_T_TOTAL: f64 = 40e-6;

pub const PRESET_NAMES: [&str; 4] = ["fig4", "fig5", "fig6a", "fig6b"];

pub fn decoherence() -> Decoherence {
    Decoherence { gamma1: GAMMA1, gamma_phi: GAMMA_PHI }
}

pub fn qubit() -> QubitSpec {
    QubitSpec { ec_ghz: EC_GHZ, ej_ghz: EJ_GHZ, gamma1: GAMMA1, gamma_phi: GAMMA_PHI }
}

/// What a preset runs: a single trace, or a steady-state spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum Run {
    Trace { t_end: f64, sample_dt: f64 },
    Spectrum { detunings: Axis, amplitudes: Axis, t_total: f64, n_avg_periods: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub params: SimParams,
    pub run: Run,
}

fn params(rabi_mhz: f64, omega_mhz: f64, amplitude_mhz: f64, phase: f64) -> SimParams {
    SimParams {
        modulation: ModulationSpec { amplitude: mhz(amplitude_mhz), omega: mhz(omega_mhz), phase },
        drive: DriveSpec { rabi: mhz(rabi_mhz), detuning: 0.0, drive_frequency: None },
        decoherence: decoherence(),
        tol: DEFAULT_TOL,
    }
}

/// Adiabatic limit: Ω/2π = 26.2 MHz, ω/2π = 1.44 MHz, A/2π = 72 MHz.
pub fn fig4() -> Preset {
    Preset {
        name: "fig4",
        params: params(26.2, 1.44, 72.0, 0.5 * PI),
        run: Run::Trace { t_end: us(2.0), sample_dt: 1e-9 },
    }
}

/// Boundary regime: Ω/2π = 12 MHz, ω/2π = 2.4 MHz, A/2π = 63.75 MHz.
pub fn fig5() -> Preset {
    Preset {
        name: "fig5",
        params: params(12.0, 2.4, 63.75, 0.5 * PI),
        run: Run::Trace { t_end: us(40.0), sample_dt: 2e-9 },
    }
}

/// The `φ` values of the phase sweep, `0.2π … 0.7π` in 26 steps.
pub fn fig4_phases() -> Vec<f64> {
    (0..26).map(|k| (0.2 + 0.02 * k as f64) * PI).collect()
}

/// Steady-state spectrum at Ω/2π = 12 MHz, ω/2π = 6 MHz and the given phase.
pub fn fig6(name: &'static str, phase: f64) -> Result<Preset> {
    let p = params(12.0, 6.0, 0.0, phase);
    let (lo, hi) = SPECTRUM_DETUNING_MHZ;
    let detunings = Axis::linspace("detuning", "rad/s", mhz(lo), mhz(hi), SPECTRUM_DETUNING_POINTS)?;
    let (r0, r1) = SPECTRUM_RATIO;
    let w = p.modulation.omega;
    let amplitudes = Axis::linspace("amplitude", "rad/s", r0 * w, r1 * w, SPECTRUM_AMPLITUDE_POINTS)?;
    Ok(Preset {
        name,
        params: p,
        run: Run::Spectrum { detunings, amplitudes, t_total: SPECTRUM_T_TOTAL, n_avg_periods: DEFAULT_AVG_PERIODS },
    })
}

pub fn by_name(name: &str) -> Option<Preset> {
    match name {
        "fig4" => Some(fig4()),
        "fig5" => Some(fig5()),
        "fig6a" => fig6("fig6a", 0.4 * PI).ok(),
        "fig6b" => fig6("fig6b", 0.9 * PI).ok(),
        _ => None,
    }
}
