//! Parameter sweeps: phase-versus-time population maps and steady-state
//! detuning-versus-amplitude spectra.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::calibration::LinearMap;
use crate::dynamics::{
    evolve, integrate_master_equation, Decoherence, DriveSpec, EvolveSettings, Frame, ModulationSpec, QubitState,
    DEFAULT_TOL,
};
use crate::ode::Stats;
use crate::{Error, Result};

/// Default number of modulation periods averaged for a steady state.
pub const DEFAULT_AVG_PERIODS: usize = 5;
/// Largest allowed change between the last two averaging windows.
pub const CONVERGENCE_THRESHOLD: f64 = 0.005;

/// A named, strictly monotone coordinate axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("axis", "needs at least one value"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("axis", "values must be finite"));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::invalid("axis", "values must be strictly monotone"));
        }
        Ok(Self { name: name.into(), unit: unit.into(), values })
    }

    /// `n` evenly spaced values from `start` to `end` inclusive, mirrored
    /// exactly when the range is symmetric about zero.
    pub fn linspace(name: impl Into<String>, unit: impl Into<String>, start: f64, end: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("axis", "needs at least one value"));
        }
        let values = if n == 1 {
            vec![start]
        } else {
            let step = (end - start) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|k| start + step * k as f64).collect();
            v[n - 1] = end;
            if start == -end {
                for k in 0..n / 2 {
                    v[n - 1 - k] = -v[k];
                }
                if n % 2 == 1 {
                    v[n / 2] = 0.0;
                }
            }
            v
        };
        Self::new(name, unit, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Everything that defines a rotating-frame simulation apart from the
/// swept coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub modulation: ModulationSpec,
    pub drive: DriveSpec,
    pub decoherence: Decoherence,
    pub tol: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            modulation: ModulationSpec { amplitude: 0.0, omega: 1.0, phase: 0.0 },
            drive: DriveSpec { rabi: 0.0, detuning: 0.0, drive_frequency: None },
            decoherence: Decoherence::none(),
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    /// Parameters shared by every cell; swept fields hold their template value.
    pub fixed: SimParams,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepMetadata {
    pub tol: f64,
    /// Evolution time per cell (s).
    pub t_total: f64,
    /// Number of modulation periods in the steady-state window.
    pub averaging_periods: Option<usize>,
    /// Seconds since the Unix epoch when the sweep finished.
    pub timestamp: u64,
    /// Largest Bloch norm over all cells.
    pub max_norm: f64,
    /// Flat indices of cells whose last two windows disagreed.
    pub not_converged: Vec<usize>,
    /// Voltage-to-amplitude map when the amplitude axis is a voltage.
    pub voltage_map: Option<LinearMap>,
}

/// Row-major values over `axis1 × axis2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub values: Vec<f64>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize) {
        (self.grid.axis1.len(), self.grid.axis2.len())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.axis2.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.axis2.len();
        &self.values[i * n..(i + 1) * n]
    }
}

/// Windowed steady-state average with its predecessor window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub population: f64,
    pub previous: f64,
    /// Largest Bloch norm seen during the evolution.
    pub max_norm: f64,
    pub stats: Stats,
}

impl SteadyState {
    pub fn converged(&self) -> bool {
        (self.population - self.previous).abs() <= CONVERGENCE_THRESHOLD
    }
}

/// Three-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Evolves from the ground state to `t_total` and averages `P|1⟩` over the
/// last `n_avg_periods` modulation periods and over the window before it.
/// The dense output is a quartic per step, so the quadrature is exact.
pub fn steady_state(params: &SimParams, t_total: f64, n_avg_periods: usize) -> Result<SteadyState> {
    if n_avg_periods == 0 {
        return Err(Error::invalid("n_avg_periods", "must be at least 1"));
    }
    if !(t_total > 0.0) || !t_total.is_finite() {
        return Err(Error::invalid("t_total", "must be positive"));
    }
    let window = n_avg_periods as f64 * params.modulation.period();
    if !(window < 0.25 * t_total) {
        return Err(Error::invalid(
            "n_avg_periods",
            format!("averaging window {window:.3e} s must be below t_total/4"),
        ));
    }
    let split = t_total - window;
    let start = t_total - 2.0 * window;
    let (mut last, mut prev) = (0.0, 0.0);
    let (_, max_norm, stats) = integrate_master_equation(
        &QubitState::ground(),
        Frame::Rotating,
        &params.modulation,
        &params.drive,
        &params.decoherence,
        t_total,
        params.tol,
        |step| {
            let (a, b) = (step.t_start(), step.t_end());
            for (lo, hi, acc) in [(start, split, &mut prev), (split, t_total, &mut last)] {
                let (l, h) = (a.max(lo), b.min(hi));
                if h > l {
                    let (mid, half) = (0.5 * (l + h), 0.5 * (h - l));
                    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                        let z = step.eval(mid + half * x)[2];
                        *acc += w * half * 0.5 * (1.0 - z);
                    }
                }
            }
            Ok(())
        },
    )?;
    Ok(SteadyState { population: last / window, previous: prev / window, max_norm, stats })
}

/// Steady-state `P|1⟩`, or [`Error::NotConverged`] when the last two
/// averaging windows differ by more than [`CONVERGENCE_THRESHOLD`].
pub fn steady_state_population(params: &SimParams, t_total: f64, n_avg_periods: usize) -> Result<f64> {
    let s = steady_state(params, t_total, n_avg_periods)?;
    if s.converged() {
        Ok(s.population)
    } else {
        Err(Error::NotConverged { last: s.population, previous: s.previous })
    }
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs `cell` for every index on `workers` threads (all cores when `None`)
/// and returns results in index order.
fn run_cells<T, F>(n: usize, workers: Option<usize>, cell: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers == Some(1) {
        return Ok((0..n).map(cell).collect());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("workers", format!("could not start thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(cell).collect()))
}

/// One rotating-frame trace per phase, assembled into a `φ × t` map.
pub fn sweep_phase_time(
    phis: &[f64],
    params: &SimParams,
    t_end: f64,
    sample_dt: f64,
    workers: Option<usize>,
) -> Result<SweepResult> {
    let phase_axis = Axis::new("phase", "rad", phis.to_vec())?;
    let settings = EvolveSettings::new(t_end).sample_dt(sample_dt).tol(params.tol);
    let traces = run_cells(phis.len(), workers, |i| {
        let modulation = params.modulation.with_phase(phis[i])?;
        evolve(&QubitState::ground(), Frame::Rotating, &modulation, &params.drive, &params.decoherence, &settings)
    })?;
    let mut values = Vec::new();
    let mut times = None;
    let mut max_norm = 0.0_f64;
    for (i, trace) in traces.into_iter().enumerate() {
        let trace = trace.map_err(|e| Error::SweepCell {
            index: i,
            axis: "phase",
            value: phis[i],
            source: Box::new(e),
        })?;
        values.extend_from_slice(&trace.populations);
        max_norm = max_norm.max(trace.max_norm);
        times.get_or_insert(trace.times);
    }
    let time_axis = Axis::new("time", "s", times.unwrap_or_default())?;
    Ok(SweepResult {
        grid: SweepGrid { axis1: phase_axis, axis2: time_axis, fixed: *params },
        values,
        metadata: SweepMetadata { tol: params.tol, t_total: t_end, timestamp: now_unix(), max_norm, ..Default::default() },
    })
}

/// Second axis of a spectrum sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeAxis {
    /// Modulation amplitudes in rad/s.
    Amplitude(Vec<f64>),
    /// Control voltages converted to amplitude by `map`.
    Voltage { volts: Vec<f64>, map: LinearMap },
}

/// Steady-state `P|1⟩` over `ε₀ × A`. Cells whose averaging windows
/// disagree keep their last-window value and are listed in the metadata.
pub fn sweep_spectrum(
    detunings: &[f64],
    amplitudes: &AmplitudeAxis,
    params: &SimParams,
    t_total: f64,
    n_avg_periods: usize,
    workers: Option<usize>,
) -> Result<SweepResult> {
    let eps_axis = Axis::new("detuning", "rad/s", detunings.to_vec())?;
    let (amp_axis, amps, voltage_map) = match amplitudes {
        AmplitudeAxis::Amplitude(a) => (Axis::new("amplitude", "rad/s", a.clone())?, a.clone(), None),
        AmplitudeAxis::Voltage { volts, map } => {
            let a: Vec<f64> = volts.iter().map(|&v| map.apply(v)).collect();
            if let Some(bad) = a.iter().find(|a| !(**a >= 0.0)) {
                return Err(Error::invalid("voltage", format!("maps to negative amplitude {bad}")));
            }
            (Axis::new("voltage", "V", volts.clone())?, a, Some(*map))
        }
    };
    let cols = amps.len();
    let cells = run_cells(detunings.len() * cols, workers, |idx| {
        let (i, j) = (idx / cols, idx % cols);
        let mut p = *params;
        p.drive.detuning = detunings[i];
        p.modulation = ModulationSpec::new(amps[j], p.modulation.omega, p.modulation.phase)?;
        steady_state(&p, t_total, n_avg_periods)
    })?;
    let mut values = Vec::with_capacity(cells.len());
    let mut not_converged = Vec::new();
    let mut max_norm = 0.0_f64;
    for (idx, cell) in cells.into_iter().enumerate() {
        let i = idx / cols;
        let s = cell.map_err(|e| Error::SweepCell {
            index: idx,
            axis: "detuning",
            value: detunings[i],
            source: Box::new(e),
        })?;
        if !s.converged() {
            not_converged.push(idx);
        }
        values.push(s.population);
        max_norm = max_norm.max(s.max_norm);
    }
    Ok(SweepResult {
        grid: SweepGrid { axis1: eps_axis, axis2: amp_axis, fixed: *params },
        values,
        metadata: SweepMetadata {
            tol: params.tol,
            t_total,
            averaging_periods: Some(n_avg_periods),
            timestamp: now_unix(),
            max_norm,
            not_converged,
            voltage_map,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz, us};
    use std::f64::consts::PI;

    fn params(rabi: f64, amplitude: f64, omega: f64, phase: f64, dec: Decoherence) -> SimParams {
        SimParams {
            modulation: ModulationSpec::new(amplitude, omega, phase).unwrap(),
            drive: DriveSpec::new(rabi, 0.0).unwrap(),
            decoherence: dec,
            tol: 1e-8,
        }
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new("x", "", vec![]).is_err());
        assert!(Axis::new("x", "", vec![1.0, 1.0]).is_err());
        assert!(Axis::new("x", "", vec![1.0, 3.0, 2.0]).is_err());
        assert!(Axis::new("x", "", vec![3.0, 2.0]).is_ok());
        let a = Axis::linspace("d", "", -4.0, 4.0, 81).unwrap();
        for k in 0..81 {
            assert_eq!(a.values[k], -a.values[80 - k]);
        }
        assert_eq!(a.values[40], 0.0);
    }

    #[test]
    fn no_drive_no_population() {
        let p = params(0.0, mhz(20.0), mhz(6.0), 0.3, Decoherence::new(1e5, 1e5).unwrap());
        assert_eq!(steady_state_population(&p, us(5.0), 5).unwrap(), 0.0);
    }

    #[test]
    fn dephased_drive_saturates() {
        let mut p = params(mhz(5.0), 0.0, mhz(6.0), 0.0, Decoherence::new(0.0, 2e6).unwrap());
        p.tol = 1e-9;
        let v = steady_state_population(&p, us(30.0), 5).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "{v}");
    }

    #[test]
    fn window_preconditions() {
        let p = params(mhz(5.0), 0.0, mhz(1.0), 0.0, Decoherence::none());
        assert!(steady_state(&p, us(10.0), 0).is_err());
        assert!(steady_state(&p, us(10.0), 3).is_err());
    }

    #[test]
    fn phase_sweep_single_phase_equals_evolve() {
        let p = params(mhz(12.0), mhz(30.0), mhz(2.4), 0.0, Decoherence::new(4e4, 2e5).unwrap());
        let r = sweep_phase_time(&[0.5 * PI], &p, us(1.0), 5e-9, Some(1)).unwrap();
        let m = p.modulation.with_phase(0.5 * PI).unwrap();
        let settings = EvolveSettings::new(us(1.0)).sample_dt(5e-9).tol(p.tol);
        let t = evolve(&QubitState::ground(), Frame::Rotating, &m, &p.drive, &p.decoherence, &settings).unwrap();
        assert_eq!(r.row(0), &t.populations[..]);
        assert_eq!(r.grid.axis2.values, t.times);
    }

    #[test]
    fn phase_sweep_periodic_and_parallel_deterministic() {
        let p = params(mhz(12.0), mhz(30.0), mhz(2.4), 0.0, Decoherence::new(4e4, 2e5).unwrap());
        let phis = [0.2 * PI, 0.5 * PI, 0.7 * PI];
        let shifted = phis.map(|x| x + 2.0 * PI);
        let a = sweep_phase_time(&phis, &p, us(0.5), 5e-9, Some(1)).unwrap();
        let b = sweep_phase_time(&shifted, &p, us(0.5), 5e-9, Some(3)).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn spectrum_serial_equals_parallel() {
        let p = params(mhz(4.0), 0.0, mhz(6.0), 0.4 * PI, Decoherence::new(4e5, 1e6).unwrap());
        let eps = Axis::linspace("d", "", mhz(-10.0), mhz(10.0), 3).unwrap().values;
        let amps = AmplitudeAxis::Amplitude(vec![mhz(6.0), mhz(14.0)]);
        let a = sweep_spectrum(&eps, &amps, &p, us(4.0), 5, Some(1)).unwrap();
        let b = sweep_spectrum(&eps, &amps, &p, us(4.0), 5, Some(2)).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.shape(), (3, 2));
        let mut single = p;
        single.drive.detuning = eps[2];
        single.modulation.amplitude = mhz(14.0);
        assert_eq!(a.get(2, 1), steady_state(&single, us(4.0), 5).unwrap().population);
    }

    #[test]
    fn spectrum_voltage_axis() {
        let p = params(mhz(4.0), 0.0, mhz(6.0), 0.0, Decoherence::new(4e5, 1e6).unwrap());
        let map = LinearMap::new(mhz(1.0) * 1e3, 0.0).unwrap();
        let volts = AmplitudeAxis::Voltage { volts: vec![0.006, 0.014], map };
        let amps = AmplitudeAxis::Amplitude(vec![mhz(6.0), mhz(14.0)]);
        let a = sweep_spectrum(&[0.0], &volts, &p, us(4.0), 5, Some(1)).unwrap();
        let b = sweep_spectrum(&[0.0], &amps, &p, us(4.0), 5, Some(1)).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-9);
        }
        assert_eq!(a.metadata.voltage_map, Some(map));
        let neg = AmplitudeAxis::Voltage { volts: vec![-1.0], map };
        assert!(sweep_spectrum(&[0.0], &neg, &p, us(4.0), 5, Some(1)).is_err());
    }
}
