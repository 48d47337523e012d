use std::collections::BTreeMap;
use std::path::PathBuf;

use lzs_core::analysis::{
    adiabaticity_delta, classify_regime, fit_damped_sine_samples, interference_chain, landau_zener_probability,
    rabi_like_frequency_lz, spectrum_asymmetry, sweep_velocity, EllipticConvention, LzsPoint,
};
use lzs_core::calibration::{bessel_zero_voltage_calibration, fit_flux_spectrum, CalibrationCurve, LinearMap, SpectroscopyPoint};
use lzs_core::dynamics::{default_sample_dt, evolve, evolve_lab_frame, DriveSpec, EvolveSettings, Frame, QubitState};
use lzs_core::sweep::{sweep_phase_time, sweep_spectrum, AmplitudeAxis};
use lzs_core::units::{mhz, to_khz, to_mhz, TWO_PI};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::table::{self, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    SweepPhase,
    SweepSpectrum,
    Formulas,
    FitTrace,
    CalibrateBessel,
    FitSpectrum,
    ValidateRwa,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::SweepPhase => "sweep-phase",
            Command::SweepSpectrum => "sweep-spectrum",
            Command::Formulas => "formulas",
            Command::FitTrace => "fit-trace",
            Command::CalibrateBessel => "calibrate-bessel",
            Command::FitSpectrum => "fit-spectrum",
            Command::ValidateRwa => "validate-rwa",
        }
    }
}

/// What a command produced: summary lines, an optional main table and any
/// secondary tables written next to it.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub summary: Vec<(String, String)>,
    pub table: Option<Table>,
    /// Suffix appended to the output path, and the table to write there.
    pub extra: Vec<(String, Table)>,
    /// Run facts recorded as comments in the sidecar.
    pub notes: BTreeMap<String, String>,
}

impl Report {
    fn line(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_owned(), value.to_string()));
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Evolve => run_evolve(cfg),
        Command::SweepPhase => run_sweep_phase(cfg),
        Command::SweepSpectrum => run_sweep_spectrum(cfg),
        Command::Formulas => run_formulas(cfg),
        Command::FitTrace => run_fit_trace(cfg),
        Command::CalibrateBessel => run_calibrate_bessel(cfg),
        Command::FitSpectrum => run_fit_spectrum(cfg),
        Command::ValidateRwa => run_validate_rwa(cfg),
    }
}

fn sample_dt(cfg: &RunConfig) -> f64 {
    cfg.sample_dt.unwrap_or_else(|| default_sample_dt(&cfg.params.modulation, &cfg.params.drive))
}

fn settings(cfg: &RunConfig) -> EvolveSettings {
    EvolveSettings::new(cfg.t_end).sample_dt(sample_dt(cfg)).tol(cfg.params.tol)
}

fn require_input(cfg: &RunConfig) -> Result<&PathBuf> {
    cfg.input.as_ref().ok_or_else(|| CliError::validation("input.path", "this command needs an input table"))
}

fn run_evolve(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    let trace = evolve(&QubitState::ground(), Frame::Rotating, &p.modulation, &p.drive, &p.decoherence, &settings(cfg))?;
    let mut t = Table::new(&table::TRACE_HEADER);
    for (time, pop) in trace.times.iter().zip(&trace.populations) {
        t.push(vec![time * 1e6, *pop]);
    }
    let mut r = Report::default();
    r.line("samples", trace.len());
    r.line("final_p1", trace.populations.last().copied().unwrap_or(0.0));
    r.line("max_bloch_norm", trace.max_norm);
    r.line("steps", trace.stats.accepted);
    r.notes.insert("max_bloch_norm".into(), trace.max_norm.to_string());
    r.table = Some(t);
    Ok(r)
}

fn run_sweep_phase(cfg: &RunConfig) -> Result<Report> {
    let res = sweep_phase_time(&cfg.phases, &cfg.params, cfg.t_end, sample_dt(cfg), cfg.workers)?;
    let mut t = Table::new(&table::PHASE_MAP_HEADER);
    for (i, phi) in cfg.phases.iter().enumerate() {
        for (time, pop) in res.grid.axis2.values.iter().zip(res.row(i)) {
            t.push(vec![*phi, time * 1e6, *pop]);
        }
    }
    let mut r = Report::default();
    r.line("phases", cfg.phases.len());
    r.line("samples_per_phase", res.grid.axis2.len());
    r.line("max_bloch_norm", res.metadata.max_norm);
    r.notes.insert("max_bloch_norm".into(), res.metadata.max_norm.to_string());
    r.table = Some(t);
    Ok(r)
}

fn run_sweep_spectrum(cfg: &RunConfig) -> Result<Report> {
    let s = &cfg.spectrum;
    let detunings: Vec<f64> = s.detunings_mhz.iter().map(|&d| mhz(d)).collect();
    let (axis, amplitudes_mhz): (AmplitudeAxis, Vec<f64>) = match s.voltage_map {
        Some(map) => (
            AmplitudeAxis::Voltage { volts: s.axis2.clone(), map },
            s.axis2.iter().map(|&v| to_mhz(map.apply(v))).collect(),
        ),
        None => (AmplitudeAxis::Amplitude(s.axis2.iter().map(|&a| mhz(a)).collect()), s.axis2.clone()),
    };
    let res = sweep_spectrum(&detunings, &axis, &cfg.params, s.t_total, s.avg_periods, cfg.workers)?;
    let mut t = Table::new(&table::SPECTRUM_HEADER);
    for (i, d) in s.detunings_mhz.iter().enumerate() {
        for (a, pop) in amplitudes_mhz.iter().zip(res.row(i)) {
            t.push(vec![*d, *a, *pop]);
        }
    }
    let mut r = Report::default();
    r.line("cells", res.values.len());
    r.line("not_converged", res.metadata.not_converged.len());
    match spectrum_asymmetry(&res) {
        Ok(a) => r.line("asymmetry", a),
        Err(_) => r.line("asymmetry", "undefined (detuning grid not symmetric)"),
    }
    r.line("max_bloch_norm", res.metadata.max_norm);
    let window = s.avg_periods as f64 * cfg.params.modulation.period();
    r.notes.insert("steady_state_window_us".into(), (window * 1e6).to_string());
    r.notes.insert(
        "not_converged_cells".into(),
        res.metadata.not_converged.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
    );
    r.notes.insert("max_bloch_norm".into(), res.metadata.max_norm.to_string());
    if s.voltage_map.is_some() {
        r.notes.insert("amplitude_axis".into(), "voltages mapped through spectrum.volt_slope_mhz".into());
    }
    r.table = Some(t);
    Ok(r)
}

fn run_formulas(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    let point = LzsPoint::new(p.drive.rabi, p.modulation.amplitude, p.modulation.omega, p.drive.detuning)?;
    let mut r = Report::default();
    let v = sweep_velocity(&point)?;
    let delta = adiabaticity_delta(&point)?;
    r.line("sweep_velocity_mhz2", v / (TWO_PI * 1e6).powi(2));
    r.line("delta", delta);
    r.line("p_lz", landau_zener_probability(delta));
    r.line("coupling_ratio", point.coupling_ratio());
    r.line("regime", classify_regime(&point));
    r.line("rabi_like_lz_khz", to_khz(rabi_like_frequency_lz(&point)?));
    if point.detuning == 0.0 {
        let c = interference_chain(&point, EllipticConvention::Parameter)?;
        let m = interference_chain(&point, EllipticConvention::Modulus)?;
        r.line("rabi_like_interference_khz", to_khz(c.frequency));
        r.line("rabi_like_interference_modulus_khz", to_khz(m.frequency));
        r.line("alpha", c.alpha);
        r.line("chi", c.chi);
        r.line("phi_lz", c.phi_lz);
        r.line("phi_ad", c.phi_ad);
        r.line("theta", c.theta);
    } else {
        r.line("rabi_like_interference_khz", "undefined (needs zero detuning)");
    }
    Ok(r)
}

fn run_fit_trace(cfg: &RunConfig) -> Result<Report> {
    let input = require_input(cfg)?;
    let data = table::read_table(input, &table::TRACE_HEADER)?;
    let times: Vec<f64> = data.rows.iter().map(|r| r[0] * 1e-6).collect();
    let pops: Vec<f64> = data.rows.iter().map(|r| r[1]).collect();
    let fit = fit_damped_sine_samples(&times, &pops, None)?;
    let mut t = Table::new(&["frequency_khz", "decay_rate_per_s", "amplitude", "offset", "phase_rad", "residual_rms"]);
    t.push(vec![fit.frequency / 1e3, fit.decay_rate, fit.amplitude, fit.offset, fit.phase, fit.residual_rms]);
    let mut r = Report::default();
    r.line("frequency_khz", fit.frequency / 1e3);
    r.line("decay_rate_per_s", fit.decay_rate);
    r.line("amplitude", fit.amplitude);
    r.line("offset", fit.offset);
    r.line("phase_rad", fit.phase);
    r.line("residual_rms", fit.residual_rms);
    r.table = Some(t);
    Ok(r)
}

fn synthesize_curves(cfg: &RunConfig) -> Result<Vec<CalibrationCurve>> {
    let c = &cfg.calibration;
    let truth = LinearMap::new(c.true_slope, 0.0)?;
    let mut curves = Vec::new();
    for &f in &c.frequencies_mhz {
        let w = mhz(f);
        let step = (c.ratio_end - c.ratio_start) / (c.points - 1) as f64;
        let volts: Vec<f64> = (0..c.points).map(|k| (c.ratio_start + step * k as f64) * w / c.true_slope).collect();
        let mut p = cfg.params;
        p.drive = DriveSpec::new(c.rabi, 0.0)?;
        p.modulation.omega = w;
        let res = sweep_spectrum(
            &[0.0],
            &AmplitudeAxis::Voltage { volts: volts.clone(), map: truth },
            &p,
            cfg.spectrum.t_total,
            cfg.spectrum.avg_periods,
            cfg.workers,
        )?;
        curves.push(CalibrationCurve { omega: w, points: volts.into_iter().zip(res.values).collect() });
    }
    Ok(curves)
}

fn curves_from_table(t: &Table) -> Vec<CalibrationCurve> {
    let mut curves: Vec<(f64, CalibrationCurve)> = Vec::new();
    for row in &t.rows {
        let (f, v, p) = (row[0], row[1], row[2]);
        match curves.iter_mut().find(|(key, _)| *key == f) {
            Some((_, c)) => c.points.push((v, p)),
            None => curves.push((f, CalibrationCurve { omega: mhz(f), points: vec![(v, p)] })),
        }
    }
    curves.into_iter().map(|(_, c)| c).collect()
}

fn run_calibrate_bessel(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::default();
    let curves = match &cfg.input {
        Some(path) => curves_from_table(&table::read_table(path, &table::CURVES_HEADER)?),
        None => {
            let curves = synthesize_curves(cfg)?;
            let mut t = Table::new(&table::CURVES_HEADER);
            for c in &curves {
                for &(v, p) in &c.points {
                    t.push(vec![to_mhz(c.omega), v, p]);
                }
            }
            r.extra.push((".curves.csv".into(), t));
            curves
        }
    };
    let cal = bessel_zero_voltage_calibration(&curves, cfg.calibration.zero_index)?;
    let mut t = Table::new(&["omega_mhz", "voltage", "amplitude_mhz"]);
    for m in &cal.minima {
        t.push(vec![to_mhz(m.omega), m.voltage, to_mhz(m.amplitude)]);
    }
    r.line("curves", curves.len());
    r.line("j0_zero", cal.zero);
    r.line("slope_mhz_per_v", to_mhz(cal.map.slope));
    r.line("intercept_mhz", to_mhz(cal.map.intercept));
    r.line("residual_rms_mhz", to_mhz(cal.map.residual_rms));
    if cfg.input.is_none() {
        r.line("true_slope_mhz_per_v", to_mhz(cfg.calibration.true_slope));
    }
    r.table = Some(t);
    Ok(r)
}

fn run_fit_spectrum(cfg: &RunConfig) -> Result<Report> {
    let input = require_input(cfg)?;
    let data = table::read_table(input, &table::SPECTROSCOPY_HEADER)?;
    let points = data
        .rows
        .iter()
        .map(|r| SpectroscopyPoint::new(r[0], r[1]))
        .collect::<lzs_core::Result<Vec<_>>>()?;
    let fit = fit_flux_spectrum(&points, cfg.two_photon_splitting)?;
    let mut t = Table::new(&["ec_ghz", "ej_ghz", "residual_rms_ghz"]);
    t.push(vec![fit.ec, fit.ej, fit.residual_rms]);
    let mut r = Report::default();
    r.line("ec_ghz", fit.ec);
    r.line("ej_ghz", fit.ej);
    r.line("residual_rms_ghz", fit.residual_rms);
    r.table = Some(t);
    Ok(r)
}

fn run_validate_rwa(cfg: &RunConfig) -> Result<Report> {
    let p = &cfg.params;
    let lab = DriveSpec::lab(p.drive.rabi, cfg.omega0, cfg.omega0 - p.drive.detuning)?;
    let s = settings(cfg);
    let g = QubitState::ground();
    let rot = evolve(&g, Frame::Rotating, &p.modulation, &p.drive, &p.decoherence, &s)?;
    let full = evolve_lab_frame(&g, cfg.omega0, &p.modulation, &lab, &p.decoherence, &s)?;
    let mut t = Table::new(&["t_us", "p1_rotating", "p1_lab"]);
    let mut worst = 0.0_f64;
    for ((time, a), b) in rot.times.iter().zip(&rot.populations).zip(&full.populations) {
        worst = worst.max((a - b).abs());
        t.push(vec![time * 1e6, *a, *b]);
    }
    let mut r = Report::default();
    r.line("samples", rot.len());
    r.line("max_abs_diff", worst);
    r.line("lab_steps", full.stats.accepted);
    r.table = Some(t);
    Ok(r)
}
