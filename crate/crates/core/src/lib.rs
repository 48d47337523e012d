//! Simulation and analysis of phase-sensitive Landau-Zener-Stückelberg (LZS)
//! interference in a flux-modulated transmon/Xmon qubit.
//!
//! The crate is organised bottom-up:
//!
//! - [`xmon`]: flux to transition-frequency model of a symmetric dc-SQUID Xmon.
//! - [`ode`]: adaptive Dormand-Prince 5(4) integrator with dense output.
//! - [`dynamics`]: rotating- and lab-frame Hamiltonians and the two-level
//!   Lindblad equation in Bloch-vector form.
//! - [`analysis`]: closed-form LZS quantities, the special functions they
//!   need, damped-sine fitting and spectrum post-processing.
//! - [`calibration`]: spectroscopy fit of `E_C`/`E_J`, Bessel-zero
//!   modulation-amplitude calibration and linear maps.
//! - [`sweep`]: parallel phase/time and detuning/amplitude sweeps.
//! - [`presets`]: the parameter sets of the reference experiments.
//!
//! Internally every frequency and rate is angular (rad/s) and every time is in
//! seconds. [`units`] holds the conversions used at the boundaries.

// `!(x > 0.0)` is how validation rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod calibration;
pub mod dynamics;
mod error;
mod lm;
pub mod ode;
pub mod presets;
pub mod sweep;
pub mod units;
pub mod xmon;

pub use error::{Error, ErrorCategory, Result};

pub use analysis::{DampedSineFit, LzsPoint, Regime};
pub use calibration::{LinearMap, SpectroscopyPoint};
pub use dynamics::{
    Decoherence, DriveSpec, EvolveSettings, Frame, ModulationSpec, Operator, QubitState, Trace,
};
pub use sweep::{Axis, SimParams, SweepGrid, SweepResult};
pub use xmon::{FluxBias, QubitSpec};
