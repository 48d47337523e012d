//! Run configuration: flat `key = value` text with dotted namespaces.
//!
//! Layers apply in order: built-in defaults, the preset named by `preset`,
//! the config file, `--set` overrides, then dedicated flags. Boundary units
//! are MHz for frequencies (value/2π), μs for times, radians for phases and
//! s⁻¹ for rates.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lzs_core::calibration::LinearMap;
use lzs_core::dynamics::{Decoherence, DriveSpec, ModulationSpec};
use lzs_core::sweep::{Axis, SimParams};
use lzs_core::units::{ghz, mhz};

use crate::error::{io_err, CliError, Result};

/// Every accepted key with its default and meaning.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("preset", "", "bundled parameter set: fig4, fig5, fig6a, fig6b"),
    ("drive.rabi_mhz", "0", "Rabi frequency"),
    ("drive.detuning_mhz", "0", "detuning of the qubit from the drive"),
    ("modulation.amplitude_mhz", "0", "modulation amplitude A"),
    ("modulation.omega_mhz", "1", "modulation frequency"),
    ("modulation.phase_rad", "0", "initial modulation phase"),
    ("decoherence.gamma1_per_s", "37878.78787878788", "energy relaxation rate (T1 = 26.4 us)"),
    ("decoherence.gamma_phi_per_s", "180000", "pure dephasing rate"),
    ("solver.tol", "1e-9", "relative and absolute local error tolerance"),
    ("time.t_end_us", "1", "trace duration"),
    ("time.sample_dt_us", "", "trace sampling interval, automatic when empty"),
    ("phase.values_rad", "", "comma-separated phases; overrides the range keys"),
    ("phase.start_rad", "0.6283185307179586", "first phase of the sweep"),
    ("phase.end_rad", "2.199114857512855", "last phase of the sweep"),
    ("phase.points", "26", "number of phases"),
    ("spectrum.detuning_start_mhz", "-40", "first detuning"),
    ("spectrum.detuning_end_mhz", "40", "last detuning"),
    ("spectrum.detuning_points", "81", "number of detunings"),
    ("spectrum.axis", "amplitude", "second axis: amplitude or voltage"),
    ("spectrum.amplitude_start_mhz", "3", "first amplitude"),
    ("spectrum.amplitude_end_mhz", "90", "last amplitude"),
    ("spectrum.amplitude_points", "34", "number of amplitudes"),
    ("spectrum.voltage_start", "0.001", "first control voltage"),
    ("spectrum.voltage_end", "0.012", "last control voltage"),
    ("spectrum.voltage_points", "34", "number of voltages"),
    ("spectrum.volt_slope_mhz", "7500", "amplitude per volt"),
    ("spectrum.volt_intercept_mhz", "0", "amplitude at zero volts"),
    ("spectrum.t_total_us", "40", "evolution time per cell"),
    ("spectrum.avg_periods", "5", "modulation periods in the averaging window"),
    ("qubit.omega0_ghz", "4.365", "idle qubit frequency for lab-frame runs"),
    ("calibration.zero_index", "1", "which zero of J0 the minima sit at"),
    ("calibration.frequencies_mhz", "10,15,20,25,30", "modulation frequencies of synthetic curves"),
    ("calibration.true_slope_mhz_per_v", "5000", "amplitude per volt used to synthesize curves"),
    ("calibration.ratio_start", "2.2", "first A/omega of synthetic curves"),
    ("calibration.ratio_end", "2.6", "last A/omega of synthetic curves"),
    ("calibration.points", "81", "samples per synthetic curve"),
    ("calibration.rabi_mhz", "2.5", "Rabi frequency of synthetic curves"),
    ("fit.two_photon_splitting_mhz", "", "seeds the charging energy of the spectroscopy fit"),
    ("run.workers", "", "sweep worker threads, all cores when empty"),
    ("input.path", "", "input table"),
    ("output.path", "", "output table"),
];

const FIG4: &[(&str, &str)] = &[
    ("drive.rabi_mhz", "26.2"),
    ("drive.detuning_mhz", "0"),
    ("modulation.amplitude_mhz", "72"),
    ("modulation.omega_mhz", "1.44"),
    ("modulation.phase_rad", "1.5707963267948966"),
    ("time.t_end_us", "2"),
    ("time.sample_dt_us", "0.001"),
];

const FIG5: &[(&str, &str)] = &[
    ("drive.rabi_mhz", "12"),
    ("drive.detuning_mhz", "0"),
    ("modulation.amplitude_mhz", "63.75"),
    ("modulation.omega_mhz", "2.4"),
    ("modulation.phase_rad", "1.5707963267948966"),
    ("time.t_end_us", "40"),
    ("time.sample_dt_us", "0.002"),
];

const FIG6A: &[(&str, &str)] = &[
    ("drive.rabi_mhz", "12"),
    ("modulation.omega_mhz", "6"),
    ("modulation.phase_rad", "1.2566370614359172"),
];

const FIG6B: &[(&str, &str)] = &[
    ("drive.rabi_mhz", "12"),
    ("modulation.omega_mhz", "6"),
    ("modulation.phase_rad", "2.827433388230814"),
];

pub fn preset(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    match name {
        "fig4" => Some(FIG4),
        "fig5" => Some(FIG5),
        "fig6a" => Some(FIG6A),
        "fig6b" => Some(FIG6B),
        _ => None,
    }
}

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Unknown and repeated keys are errors.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = parse_assignment(line).map_err(|message| CliError::Parse {
            line: i + 1,
            key: None,
            message,
        })?;
        if !is_known(&key) {
            return Err(CliError::Parse { line: i + 1, message: format!("unknown key `{key}`"), key: Some(key) });
        }
        if out.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Parse { line: i + 1, message: format!("duplicate key `{key}`"), key: Some(key) });
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Splits `key = value` (also used for `--set key=value`).
pub fn parse_assignment(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected `key = value`, got `{s}`"))?;
    let key = k.trim();
    if key.is_empty() || key.contains(char::is_whitespace) {
        return Err(format!("malformed key `{key}`"));
    }
    Ok((key.to_owned(), v.trim().to_owned()))
}

/// Raw layered key-value configuration.
#[derive(Debug, Clone, Default)]
pub struct ConfigSource {
    pub file: Option<PathBuf>,
    pub preset: Option<String>,
    pub sets: Vec<String>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Effective value of every key, echoed into the sidecar.
    pub values: BTreeMap<String, String>,
    pub params: SimParams,
    pub t_end: f64,
    pub sample_dt: Option<f64>,
    pub phases: Vec<f64>,
    pub spectrum: SpectrumConfig,
    pub omega0: f64,
    pub calibration: CalibrationConfig,
    /// GHz.
    pub two_photon_splitting: Option<f64>,
    pub workers: Option<usize>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SpectrumConfig {
    /// MHz, as written to the output table.
    pub detunings_mhz: Vec<f64>,
    /// Second-axis values in their own units (MHz or volts).
    pub axis2: Vec<f64>,
    /// Voltage-to-amplitude map in rad/s per volt when the axis is voltage.
    pub voltage_map: Option<LinearMap>,
    pub t_total: f64,
    pub avg_periods: usize,
}

#[derive(Debug, Clone)]
pub struct CalibrationConfig {
    pub zero_index: usize,
    pub frequencies_mhz: Vec<f64>,
    /// rad/s per volt.
    pub true_slope: f64,
    pub ratio_start: f64,
    pub ratio_end: f64,
    pub points: usize,
    /// rad/s.
    pub rabi: f64,
}

impl ConfigSource {
    /// Merges all layers into one key-value map.
    pub fn resolve(&self) -> Result<BTreeMap<String, String>> {
        let file_pairs = match &self.file {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                parse_text(&text).map_err(|e| match e {
                    CliError::Parse { line, key, message } => CliError::Parse {
                        line,
                        key,
                        message: format!("{}: {message}", p.display()),
                    },
                    other => other,
                })?
            }
            None => Vec::new(),
        };
        let mut set_pairs = Vec::new();
        for s in &self.sets {
            let (k, v) = parse_assignment(s).map_err(|message| CliError::Parse { line: 0, key: None, message })?;
            if !is_known(&k) {
                return Err(CliError::Parse { line: 0, message: format!("unknown key `{k}` in --set"), key: Some(k) });
            }
            set_pairs.push((k, v));
        }

        let mut values: BTreeMap<String, String> =
            KEYS.iter().map(|(k, d, _)| (k.to_string(), d.to_string())).collect();
        let preset_name = self
            .preset
            .clone()
            .or_else(|| set_pairs.iter().rev().find(|(k, _)| k == "preset").map(|(_, v)| v.clone()))
            .or_else(|| file_pairs.iter().find(|(k, _)| k == "preset").map(|(_, v)| v.clone()))
            .filter(|s| !s.is_empty());
        if let Some(name) = &preset_name {
            let table = preset(name).ok_or_else(|| CliError::validation("preset", format!("unknown preset `{name}`")))?;
            for (k, v) in table {
                values.insert(k.to_string(), v.to_string());
            }
        }
        for (k, v) in file_pairs.into_iter().chain(set_pairs) {
            values.insert(k, v);
        }
        if let Some(name) = preset_name {
            values.insert("preset".into(), name);
        }
        if let Some(p) = &self.out {
            values.insert("output.path".into(), p.display().to_string());
        }
        if let Some(p) = &self.input {
            values.insert("input.path".into(), p.display().to_string());
        }
        if let Some(w) = self.workers {
            values.insert("run.workers".into(), w.to_string());
        }
        if let Some(t) = self.tol {
            values.insert("solver.tol".into(), format!("{t:?}"));
        }
        Ok(values)
    }

    pub fn load(&self) -> Result<RunConfig> {
        RunConfig::from_values(self.resolve()?)
    }
}

struct Reader<'a>(&'a BTreeMap<String, String>);

impl Reader<'_> {
    fn raw(&self, key: &str) -> &str {
        self.0.get(key).map(String::as_str).unwrap_or("")
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let s = self.raw(key);
        let v: f64 = s.parse().map_err(|_| CliError::validation(key, format!("expected a number, got `{s}`")))?;
        if !v.is_finite() {
            return Err(CliError::validation(key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.f64(key)?;
        if v <= 0.0 {
            return Err(CliError::validation(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn non_negative(&self, key: &str) -> Result<f64> {
        let v = self.f64(key)?;
        if v < 0.0 {
            return Err(CliError::validation(key, format!("must be non-negative, got {v}")));
        }
        Ok(v)
    }

    fn opt_positive(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.positive(key).map(Some)
        }
    }

    fn count(&self, key: &str) -> Result<usize> {
        let s = self.raw(key);
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::validation(key, format!("expected a positive integer, got `{s}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::validation(key, format!("bad list entry `{s}`")))
            })
            .collect()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let s = self.raw(key);
        (!s.is_empty()).then(|| PathBuf::from(s))
    }

    fn axis(&self, key_prefix: &str, start: &str, end: &str, points: &str) -> Result<Vec<f64>> {
        let (a, b, n) = (self.f64(start)?, self.f64(end)?, self.count(points)?);
        if n > 1 && a == b {
            return Err(CliError::validation(start, "range is empty"));
        }
        Axis::linspace(key_prefix, "", a, b, n)
            .map(|ax| ax.values)
            .map_err(|e| CliError::validation(start, e.to_string()))
    }
}

fn core_err(key: &str) -> impl FnOnce(lzs_core::Error) -> CliError + '_ {
    move |e| CliError::validation(key, e.to_string())
}

impl RunConfig {
    pub fn from_values(values: BTreeMap<String, String>) -> Result<Self> {
        if let Some(k) = values.keys().find(|k| !is_known(k)) {
            return Err(CliError::validation(k, "unknown key"));
        }
        let r = Reader(&values);
        let rabi = mhz(r.non_negative("drive.rabi_mhz")?);
        let detuning = mhz(r.f64("drive.detuning_mhz")?);
        let amplitude = mhz(r.non_negative("modulation.amplitude_mhz")?);
        let omega = mhz(r.positive("modulation.omega_mhz")?);
        let phase = r.f64("modulation.phase_rad")?;
        let modulation =
            ModulationSpec::new(amplitude, omega, phase).map_err(core_err("modulation.omega_mhz"))?;
        let drive = DriveSpec::new(rabi, detuning).map_err(core_err("drive.rabi_mhz"))?;
        let decoherence = Decoherence::new(
            r.non_negative("decoherence.gamma1_per_s")?,
            r.non_negative("decoherence.gamma_phi_per_s")?,
        )
        .map_err(core_err("decoherence.gamma1_per_s"))?;
        let tol = r.positive("solver.tol")?;
        if !(1e-12..=1e-4).contains(&tol) {
            return Err(CliError::validation("solver.tol", format!("must lie in [1e-12, 1e-4], got {tol}")));
        }
        let params = SimParams { modulation, drive, decoherence, tol };

        let t_end = r.positive("time.t_end_us")? * 1e-6;
        let sample_dt = r.opt_positive("time.sample_dt_us")?.map(|v| v * 1e-6);

        let phases = if r.raw("phase.values_rad").is_empty() {
            r.axis("phase", "phase.start_rad", "phase.end_rad", "phase.points")?
        } else {
            let v = r.list("phase.values_rad")?;
            Axis::new("phase", "rad", v.clone()).map_err(core_err("phase.values_rad"))?;
            v
        };

        let detunings_mhz = r.axis(
            "detuning",
            "spectrum.detuning_start_mhz",
            "spectrum.detuning_end_mhz",
            "spectrum.detuning_points",
        )?;
        let (axis2, voltage_map) = match r.raw("spectrum.axis") {
            "amplitude" => {
                let a = r.axis(
                    "amplitude",
                    "spectrum.amplitude_start_mhz",
                    "spectrum.amplitude_end_mhz",
                    "spectrum.amplitude_points",
                )?;
                if a.iter().any(|v| *v < 0.0) {
                    return Err(CliError::validation("spectrum.amplitude_start_mhz", "amplitudes must be non-negative"));
                }
                (a, None)
            }
            "voltage" => {
                let v = r.axis("voltage", "spectrum.voltage_start", "spectrum.voltage_end", "spectrum.voltage_points")?;
                let map = LinearMap::new(
                    mhz(r.f64("spectrum.volt_slope_mhz")?),
                    mhz(r.f64("spectrum.volt_intercept_mhz")?),
                )
                .map_err(core_err("spectrum.volt_slope_mhz"))?;
                if v.iter().any(|&x| map.apply(x) < 0.0) {
                    return Err(CliError::validation("spectrum.voltage_start", "voltages map to negative amplitudes"));
                }
                (v, Some(map))
            }
            other => {
                return Err(CliError::validation("spectrum.axis", format!("expected amplitude or voltage, got `{other}`")))
            }
        };
        let spectrum = SpectrumConfig {
            detunings_mhz,
            axis2,
            voltage_map,
            t_total: r.positive("spectrum.t_total_us")? * 1e-6,
            avg_periods: r.count("spectrum.avg_periods")?,
        };
        let window = spectrum.avg_periods as f64 * modulation.period();
        if window.is_nan() || window >= 0.25 * spectrum.t_total {
            return Err(CliError::validation(
                "spectrum.avg_periods",
                "averaging window must be shorter than a quarter of spectrum.t_total_us",
            ));
        }

        let frequencies_mhz = r.list("calibration.frequencies_mhz")?;
        if frequencies_mhz.iter().any(|f| *f <= 0.0) {
            return Err(CliError::validation("calibration.frequencies_mhz", "frequencies must be positive"));
        }
        let calibration = CalibrationConfig {
            zero_index: r.count("calibration.zero_index")?,
            frequencies_mhz,
            true_slope: mhz(r.positive("calibration.true_slope_mhz_per_v")?),
            ratio_start: r.positive("calibration.ratio_start")?,
            ratio_end: r.positive("calibration.ratio_end")?,
            points: r.count("calibration.points")?,
            rabi: mhz(r.non_negative("calibration.rabi_mhz")?),
        };
        if calibration.ratio_end <= calibration.ratio_start || calibration.points < 3 {
            return Err(CliError::validation("calibration.ratio_end", "need an increasing ratio range with >= 3 points"));
        }

        let workers = match r.raw("run.workers") {
            "" => None,
            _ => Some(r.count("run.workers")?),
        };
        let omega0 = ghz(r.positive("qubit.omega0_ghz")?);
        let two_photon_splitting = r.opt_positive("fit.two_photon_splitting_mhz")?.map(|v| v * 1e-3);
        let input = r.path("input.path");
        let output = r.path("output.path");
        Ok(Self {
            params,
            t_end,
            sample_dt,
            phases,
            spectrum,
            omega0,
            calibration,
            two_photon_splitting,
            workers,
            input,
            output,
            values,
        })
    }

    /// Sidecar body: every effective key as a valid config line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_deref()
    }
}
