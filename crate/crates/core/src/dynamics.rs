//! Driven, flux-modulated two-level dynamics with relaxation and dephasing.
//!
//! Conventions: `σ_z = |0⟩⟨0| − |1⟩⟨1|`, `σ₋ = |0⟩⟨1|`, `ħ = 1`. The density
//! operator is carried as a Bloch vector `r` with `ρ = (1 + r·σ)/2`, so the
//! ground state is `(0, 0, 1)` and `P|1⟩ = (1 − z)/2`. A Hamiltonian
//! `H = c·1 + (h·σ)/2` drives `ṙ = h × r`.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::ode::{self, DenseStep};
use crate::units::{fold_phase, TWO_PI};
use crate::{Error, Result};

/// 2×2 Hermitian operator in rad/s.
pub type Operator = Matrix2<Complex64>;

/// Default relative tolerance for [`evolve`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Steps per carrier period assumed when projecting lab-frame cost.
const LAB_STEPS_PER_PERIOD: f64 = 20.0;
const LAB_STEP_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoherence {
    /// Energy relaxation rate Γ₁ (s⁻¹).
    pub gamma1: f64,
    /// Pure dephasing rate Γ_φ (s⁻¹).
    pub gamma_phi: f64,
}

impl Decoherence {
    pub fn new(gamma1: f64, gamma_phi: f64) -> Result<Self> {
        if !(gamma1 >= 0.0) || !gamma1.is_finite() {
            return Err(Error::invalid("gamma1", "must be non-negative"));
        }
        if !(gamma_phi >= 0.0) || !gamma_phi.is_finite() {
            return Err(Error::invalid("gamma_phi", "must be non-negative"));
        }
        Ok(Self { gamma1, gamma_phi })
    }

    pub const fn none() -> Self {
        Self { gamma1: 0.0, gamma_phi: 0.0 }
    }

    /// Decay rate of the transverse Bloch components, `Γ₁/2 + Γ_φ`.
    pub fn gamma2(&self) -> f64 {
        0.5 * self.gamma1 + self.gamma_phi
    }
}

/// Transverse (XY) drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Rabi angular frequency Ω.
    pub rabi: f64,
    /// Detuning `ε₀ = ω₀ − ω_d`.
    pub detuning: f64,
    /// Absolute drive frequency, only needed for lab-frame runs.
    pub drive_frequency: Option<f64>,
}

impl DriveSpec {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        if !(rabi >= 0.0) || !rabi.is_finite() {
            return Err(Error::invalid("rabi", "must be non-negative"));
        }
        if !detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        Ok(Self { rabi, detuning, drive_frequency: None })
    }

    /// Drive at absolute frequency `drive_frequency` on a qubit at `omega0`.
    pub fn lab(rabi: f64, omega0: f64, drive_frequency: f64) -> Result<Self> {
        let mut d = Self::new(rabi, omega0 - drive_frequency)?;
        if !(drive_frequency > 0.0) {
            return Err(Error::invalid("drive_frequency", "must be positive"));
        }
        d.drive_frequency = Some(drive_frequency);
        Ok(d)
    }
}

/// Longitudinal (Z) modulation `A cos(ωt + φ)` of the transition frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    pub amplitude: f64,
    pub omega: f64,
    /// Initial phase, folded into `[0, 2π)`.
    pub phase: f64,
}

impl ModulationSpec {
    pub fn new(amplitude: f64, omega: f64, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid("amplitude", "must be non-negative"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid("omega", "must be positive"));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(Self { amplitude, omega, phase: fold_phase(phase) })
    }

    pub fn with_phase(self, phase: f64) -> Result<Self> {
        Self::new(self.amplitude, self.omega, phase)
    }

    pub fn period(&self) -> f64 {
        TWO_PI / self.omega
    }

    #[inline]
    fn value(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t + self.phase).cos()
    }
}

/// Two-level density operator as a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    bloch: [f64; 3],
}

impl QubitState {
    pub const NORM_SLACK: f64 = 1e-9;

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || n2.sqrt() > 1.0 + Self::NORM_SLACK {
            return Err(Error::invalid("bloch", "Bloch vector must lie in the unit ball"));
        }
        Ok(Self { bloch: [x, y, z] })
    }

    pub const fn ground() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }

    pub const fn excited() -> Self {
        Self { bloch: [0.0, 0.0, -1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn norm(&self) -> f64 {
        norm(&self.bloch)
    }

    pub fn population(&self) -> f64 {
        population(self)
    }

    pub fn density_matrix(&self) -> Operator {
        let [x, y, z] = self.bloch;
        Operator::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        )
    }
}

impl Default for QubitState {
    fn default() -> Self {
        Self::ground()
    }
}

/// Excited-state population `(1 − z)/2`, clamped to `[0, 1]`.
pub fn population(state: &QubitState) -> f64 {
    population_of(&state.bloch)
}

#[inline]
fn population_of(r: &[f64; 3]) -> f64 {
    (0.5 * (1.0 - r[2])).clamp(0.0, 1.0)
}

#[inline]
fn norm(r: &[f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// Sampled excited-state population.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Sample times (s), strictly increasing.
    pub times: Vec<f64>,
    pub populations: Vec<f64>,
    /// Full Bloch vectors, when requested.
    pub bloch: Option<Vec<[f64; 3]>>,
    /// Largest Bloch norm seen at any accepted step.
    pub max_norm: f64,
    pub stats: ode::Stats,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Which Hamiltonian to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// Drive-frame Hamiltonian after the rotating-wave approximation.
    Rotating,
    /// Full lab-frame Hamiltonian with qubit frequency `omega0`.
    Lab { omega0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveSettings {
    pub t_end: f64,
    /// Sampling interval; [`default_sample_dt`] when `None`.
    pub sample_dt: Option<f64>,
    /// Relative (and absolute) local error tolerance.
    pub tol: f64,
    pub record_bloch: bool,
}

impl EvolveSettings {
    pub fn new(t_end: f64) -> Self {
        Self { t_end, sample_dt: None, tol: DEFAULT_TOL, record_bloch: false }
    }

    pub fn sample_dt(mut self, dt: f64) -> Self {
        self.sample_dt = Some(dt);
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn record_bloch(mut self, record: bool) -> Self {
        self.record_bloch = record;
        self
    }
}

/// `min(1 ns, 1/(64·max(ω, Ω, A)/2π))`.
pub fn default_sample_dt(modulation: &ModulationSpec, drive: &DriveSpec) -> f64 {
    let fastest = modulation.omega.max(drive.rabi).max(modulation.amplitude);
    let dt = TWO_PI / (64.0 * fastest);
    dt.min(1e-9)
}

/// Field vector `h` of the rotating-frame Hamiltonian
/// `−½[ε₀ − A cos(ωt+φ)]σ_z + ½Ωσ_x`.
#[inline]
fn rotating_field(modulation: &ModulationSpec, drive: &DriveSpec, t: f64) -> [f64; 3] {
    [drive.rabi, 0.0, -(drive.detuning - modulation.value(t))]
}

/// Field vector of the lab-frame Hamiltonian
/// `−½[ω₀ − A cos(ωt+φ)]σ_z + Ω cos(ω_d t)σ_x`.
#[inline]
fn lab_field(omega0: f64, omega_d: f64, modulation: &ModulationSpec, rabi: f64, t: f64) -> [f64; 3] {
    [2.0 * rabi * (omega_d * t).cos(), 0.0, -(omega0 - modulation.value(t))]
}

fn operator_from_field(h: [f64; 3]) -> Operator {
    let [hx, hy, hz] = h;
    Operator::new(
        Complex64::new(0.5 * hz, 0.0),
        Complex64::new(0.5 * hx, -0.5 * hy),
        Complex64::new(0.5 * hx, 0.5 * hy),
        Complex64::new(-0.5 * hz, 0.0),
    )
}

fn field_from_operator(h: &Operator) -> [f64; 3] {
    let h01 = h[(0, 1)];
    [2.0 * h01.re, -2.0 * h01.im, h[(0, 0)].re - h[(1, 1)].re]
}

pub fn rotating_hamiltonian(modulation: &ModulationSpec, drive: &DriveSpec, t: f64) -> Operator {
    operator_from_field(rotating_field(modulation, drive, t))
}

pub fn lab_hamiltonian(
    omega0: f64,
    modulation: &ModulationSpec,
    drive: &DriveSpec,
    t: f64,
) -> Result<Operator> {
    let omega_d = drive.drive_frequency.ok_or(Error::MissingDriveFrequency)?;
    Ok(operator_from_field(lab_field(omega0, omega_d, modulation, drive.rabi, t)))
}

#[inline]
fn bloch_rhs(r: &[f64; 3], h: &[f64; 3], gamma1: f64, gamma2: f64, dr: &mut [f64; 3]) {
    let [x, y, z] = *r;
    let [hx, hy, hz] = *h;
    dr[0] = hy * z - hz * y - gamma2 * x;
    dr[1] = hz * x - hx * z - gamma2 * y;
    dr[2] = hx * y - hy * x + gamma1 * (1.0 - z);
}

/// Bloch-vector form of the Lindblad equation with amplitude damping Γ₁ and
/// pure dephasing Γ_φ:
/// `ẋ,ẏ = (h×r) − (Γ₁/2 + Γ_φ)·(x,y)`, `ż = (h×r)_z + Γ₁(1 − z)`.
pub fn lindblad_rhs(state: &QubitState, h: &Operator, gamma1: f64, gamma_phi: f64) -> [f64; 3] {
    let mut dr = [0.0; 3];
    let field = field_from_operator(h);
    bloch_rhs(&state.bloch, &field, gamma1, 0.5 * gamma1 + gamma_phi, &mut dr);
    dr
}

struct RotatingSystem {
    modulation: ModulationSpec,
    drive: DriveSpec,
    gamma1: f64,
    gamma2: f64,
}

impl ode::System<3> for RotatingSystem {
    #[inline]
    fn rhs(&self, t: f64, r: &[f64; 3], dr: &mut [f64; 3]) {
        let h = rotating_field(&self.modulation, &self.drive, t);
        bloch_rhs(r, &h, self.gamma1, self.gamma2, dr);
    }
}

struct LabSystem {
    omega0: f64,
    omega_d: f64,
    modulation: ModulationSpec,
    rabi: f64,
    gamma1: f64,
    gamma2: f64,
}

impl ode::System<3> for LabSystem {
    #[inline]
    fn rhs(&self, t: f64, r: &[f64; 3], dr: &mut [f64; 3]) {
        let h = lab_field(self.omega0, self.omega_d, &self.modulation, self.rabi, t);
        bloch_rhs(r, &h, self.gamma1, self.gamma2, dr);
    }
}

/// Integrates the master equation in the selected frame and calls `observer`
/// on every accepted step. The Bloch norm is checked against
/// `1 + 100·tol` after each step. Returns the final state, the largest
/// norm seen and the integrator statistics.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_master_equation<F>(
    initial: &QubitState,
    frame: Frame,
    modulation: &ModulationSpec,
    drive: &DriveSpec,
    decoherence: &Decoherence,
    t_end: f64,
    tol: f64,
    mut observer: F,
) -> Result<(QubitState, f64, ode::Stats)>
where
    F: FnMut(&DenseStep<3>) -> Result<()>,
{
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::invalid("t_end", "must be positive"));
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::invalid("tol", "must lie in [1e-12, 1e-4]"));
    }
    let bound = 1.0 + 100.0 * tol;
    let mut max_norm = initial.norm();
    let mut opts = ode::Options::with_tol(tol);
    let mut checked = |step: &DenseStep<3>| -> Result<()> {
        let n = norm(&step.y_end());
        if n > bound {
            return Err(Error::InvariantViolation { t: step.t_end(), norm: n });
        }
        max_norm = max_norm.max(n);
        observer(step)
    };
    let (end, stats) = match frame {
        Frame::Rotating => {
            let sys = RotatingSystem {
                modulation: *modulation,
                drive: *drive,
                gamma1: decoherence.gamma1,
                gamma2: decoherence.gamma2(),
            };
            ode::integrate(&sys, 0.0, initial.bloch, t_end, &opts, &mut checked)?
        }
        Frame::Lab { omega0 } => {
            let omega_d = drive.drive_frequency.ok_or(Error::MissingDriveFrequency)?;
            let projected = (t_end * omega_d / TWO_PI * LAB_STEPS_PER_PERIOD).ceil();
            if projected > LAB_STEP_LIMIT as f64 {
                return Err(Error::ExcessiveStepCount { steps: projected as u64 });
            }
            opts.max_steps = LAB_STEP_LIMIT;
            // keep the integrator from stepping over whole carrier periods
            opts.h_max = TWO_PI / omega_d / 4.0;
            let sys = LabSystem {
                omega0,
                omega_d,
                modulation: *modulation,
                rabi: drive.rabi,
                gamma1: decoherence.gamma1,
                gamma2: decoherence.gamma2(),
            };
            ode::integrate(&sys, 0.0, initial.bloch, t_end, &opts, &mut checked)?
        }
    };
    Ok((QubitState { bloch: end }, max_norm, stats))
}

/// Evolves `initial` to `settings.t_end` and samples `P|1⟩` at multiples of
/// the sample interval using the integrator's dense output.
pub fn evolve(
    initial: &QubitState,
    frame: Frame,
    modulation: &ModulationSpec,
    drive: &DriveSpec,
    decoherence: &Decoherence,
    settings: &EvolveSettings,
) -> Result<Trace> {
    let dt = settings.sample_dt.unwrap_or_else(|| default_sample_dt(modulation, drive));
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("sample_dt", "must be positive"));
    }
    let t_end = settings.t_end;
    let n_samples = (t_end / dt * (1.0 + 1e-12)).floor() as usize + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut populations = Vec::with_capacity(n_samples);
    let mut bloch = settings.record_bloch.then(|| Vec::with_capacity(n_samples));

    let mut push = |t: f64, r: [f64; 3]| {
        times.push(t);
        populations.push(population_of(&r));
        if let Some(b) = bloch.as_mut() {
            b.push(r);
        }
    };
    push(0.0, initial.bloch);
    let mut next = 1usize;
    let (_, max_norm, stats) = integrate_master_equation(
        initial,
        frame,
        modulation,
        drive,
        decoherence,
        t_end,
        settings.tol,
        |step| {
            let stop = step.t_end();
            while next < n_samples {
                let t = next as f64 * dt;
                // the final step also takes samples that overshoot t_end by rounding
                if t > stop && stop < t_end {
                    break;
                }
                push(t, step.eval(t.min(stop)));
                next += 1;
            }
            Ok(())
        },
    )?;
    debug_assert_eq!(next, n_samples);
    Ok(Trace { times, populations, bloch, max_norm, stats })
}

/// Lab-frame evolution without the rotating-wave approximation. Intended for
/// short validation traces; refuses runs projected above 10⁸ steps.
pub fn evolve_lab_frame(
    initial: &QubitState,
    omega0: f64,
    modulation: &ModulationSpec,
    drive: &DriveSpec,
    decoherence: &Decoherence,
    settings: &EvolveSettings,
) -> Result<Trace> {
    let omega_d = drive.drive_frequency.ok_or(Error::MissingDriveFrequency)?;
    let implied = omega0 - omega_d;
    if (implied - drive.detuning).abs() > 1e-9 * omega0.abs().max(1.0) {
        return Err(Error::invalid("detuning", "inconsistent with omega0 and drive frequency"));
    }
    if drive.detuning.abs() >= 0.1 * omega_d {
        return Err(Error::invalid("detuning", "must be much smaller than the drive frequency"));
    }
    evolve(initial, Frame::Lab { omega0 }, modulation, drive, decoherence, settings)
}
