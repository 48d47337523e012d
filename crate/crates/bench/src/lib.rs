//! Shared fixtures for the solver benchmarks.

use lzs_core::dynamics::{evolve, EvolveSettings, Frame, QubitState, Trace};
use lzs_core::presets::{self, Run};
use lzs_core::SimParams;

/// Boundary-regime parameters with their trace duration and sampling.
pub fn boundary_regime() -> (SimParams, f64, f64) {
    let p = presets::fig5();
    match p.run {
        Run::Trace { t_end, sample_dt } => (p.params, t_end, sample_dt),
        Run::Spectrum { .. } => unreachable!("fig5 is a trace preset"),
    }
}

/// One spectrum cell from the middle of the phase-0.4π grid.
pub fn spectrum_cell() -> SimParams {
    let mut p = presets::fig6("fig6a", 0.4 * std::f64::consts::PI).expect("valid preset").params;
    p.modulation.amplitude = lzs_core::units::mhz(45.0);
    p.drive.detuning = lzs_core::units::mhz(10.0);
    p
}

pub fn simulate(p: &SimParams, t_end: f64, sample_dt: f64) -> Trace {
    let s = EvolveSettings::new(t_end).sample_dt(sample_dt).tol(p.tol);
    evolve(&QubitState::ground(), Frame::Rotating, &p.modulation, &p.drive, &p.decoherence, &s).expect("evolution succeeds")
}
