//! Device calibrations: spectroscopy fit of `E_C`, `E_J`, the two-photon
//! charging-energy estimate, and the Bessel-zero voltage-to-amplitude map.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::analysis::bessel_j0_zero;
use crate::lm::{self, Problem};
use crate::{Error, Result};

/// One spectroscopy sample: reduced flux `Φ/Φ₀` and `ω₁₀/2π` in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectroscopyPoint {
    pub flux: f64,
    pub frequency: f64,
}

impl SpectroscopyPoint {
    pub fn new(flux: f64, frequency: f64) -> Result<Self> {
        if !(flux.abs() < 0.5) {
            return Err(Error::invalid("flux", format!("|flux| must be below 0.5, got {flux}")));
        }
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::invalid("frequency", format!("must be positive, got {frequency}")));
        }
        Ok(Self { flux, frequency })
    }
}

/// Charging and Josephson energies in GHz with the fit residual in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSpectrumFit {
    pub ec: f64,
    pub ej: f64,
    pub residual_rms: f64,
}

/// Seed for `E_C` when no two-photon splitting is available (GHz).
pub const DEFAULT_EC_SEED: f64 = 0.25;
const MIN_SPECTRUM_POINTS: usize = 5;
const MIN_FLUX_SPAN: f64 = 0.1;

struct FluxProblem<'a> {
    points: &'a [SpectroscopyPoint],
}

impl Problem for FluxProblem<'_> {
    fn n_params(&self) -> usize {
        2
    }

    fn n_residuals(&self) -> usize {
        self.points.len()
    }

    fn residuals(&self, p: &[f64], r: &mut [f64]) {
        let (ec, ej) = (p[0], p[1]);
        for (ri, pt) in r.iter_mut().zip(self.points) {
            *ri = if ec > 0.0 && ej > 0.0 {
                (8.0 * ec * ej * (PI * pt.flux).cos().abs()).sqrt() - ec - pt.frequency
            } else {
                f64::NAN
            };
        }
    }

    fn jacobian(&self, p: &[f64], j: &mut DMatrix<f64>) {
        let (ec, ej) = (p[0], p[1]);
        for (i, pt) in self.points.iter().enumerate() {
            let c = (PI * pt.flux).cos().abs();
            let root = (8.0 * ec * ej * c).sqrt();
            j[(i, 0)] = 4.0 * ej * c / root - 1.0;
            j[(i, 1)] = 4.0 * ec * c / root;
        }
    }
}

/// Least-squares fit of `f = √(8 E_C E_J |cos πΦ|) − E_C` to spectroscopy
/// data. `two_photon_splitting` (GHz) seeds `E_C` when given.
pub fn fit_flux_spectrum(points: &[SpectroscopyPoint], two_photon_splitting: Option<f64>) -> Result<FluxSpectrumFit> {
    if points.len() < MIN_SPECTRUM_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} spectroscopy points, need at least {MIN_SPECTRUM_POINTS}",
            points.len()
        )));
    }
    for p in points {
        SpectroscopyPoint::new(p.flux, p.frequency)?;
    }
    let lo = points.iter().map(|p| p.flux).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.flux).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < MIN_FLUX_SPAN {
        return Err(Error::InsufficientData(format!(
            "flux span {:.4} below {MIN_FLUX_SPAN}",
            hi - lo
        )));
    }
    let ec0 = match two_photon_splitting {
        Some(df) if df > 0.0 => ec_from_two_photon_splitting(df),
        _ => DEFAULT_EC_SEED,
    };
    let f_max = points.iter().map(|p| p.frequency).fold(f64::NEG_INFINITY, f64::max);
    let ej0 = (f_max + ec0).powi(2) / (8.0 * ec0);
    let rep = lm::minimize(&FluxProblem { points }, &[ec0, ej0], lm::Options::default());
    if !rep.converged || !rep.rms.is_finite() {
        return Err(Error::FitDiverged(format!(
            "spectroscopy fit did not converge in {} iterations",
            rep.iterations
        )));
    }
    Ok(FluxSpectrumFit { ec: rep.params[0], ej: rep.params[1], residual_rms: rep.rms })
}

/// `E_C/h ≈ 2·Δf` from the splitting between the one-photon `0→1` line and
/// the two-photon `0→2` line. Units follow the input.
pub fn ec_from_two_photon_splitting(delta_f: f64) -> f64 {
    2.0 * delta_f
}

/// `y = slope·x + intercept` with the fit residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

impl LinearMap {
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::invalid("linear_map", "slope and intercept must be finite"));
        }
        Ok(Self { slope, intercept, residual_rms: 0.0 })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Inverse map, `None` when the slope is zero.
    pub fn invert(&self, y: f64) -> Option<f64> {
        (self.slope != 0.0).then(|| (y - self.intercept) / self.slope)
    }
}

/// Ordinary least-squares line through `points`.
pub fn fit_linear_map(points: &[(f64, f64)]) -> Result<LinearMap> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("points", "non-finite coordinate"));
    }
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::DegenerateAbscissa);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateAbscissa);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points.iter().map(|&(x, y)| (slope * x + intercept - y).powi(2)).sum();
    Ok(LinearMap { slope, intercept, residual_rms: (ss / n).sqrt() })
}

/// Steady-state population versus control voltage at one modulation
/// frequency `omega` (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    pub omega: f64,
    /// `(voltage, P|1⟩)` pairs.
    pub points: Vec<(f64, f64)>,
}

/// Population minimum located on one curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMinimum {
    pub omega: f64,
    pub voltage: f64,
    /// `x₀·ω` assigned to this voltage.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesselCalibration {
    /// Voltage to modulation amplitude (rad/s).
    pub map: LinearMap,
    /// Per-curve minima, sorted by `omega`.
    pub minima: Vec<CurveMinimum>,
    /// The `J₀` zero used.
    pub zero: f64,
}

/// Voltage of the population minimum: vertex of the parabola through the
/// lowest sample and its two neighbours.
fn curve_minimum(curve: &CalibrationCurve) -> Result<f64> {
    let mut pts = curve.points.clone();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let none = || Error::NoMinimumFound { omega: curve.omega };
    if pts.len() < 3 || pts.iter().any(|(v, p)| !v.is_finite() || !p.is_finite()) {
        return Err(none());
    }
    let k = (0..pts.len())
        .min_by(|&a, &b| pts[a].1.partial_cmp(&pts[b].1).unwrap_or(Ordering::Equal))
        .ok_or_else(none)?;
    // a minimum on the edge of the scan is not bracketed
    if k == 0 || k == pts.len() - 1 {
        return Err(none());
    }
    let ((x0, y0), (x1, y1), (x2, y2)) = (pts[k - 1], pts[k], pts[k + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature > 0.0) {
        return Ok(x1);
    }
    // vertex of the interpolating parabola
    let vertex = 0.5 * (x0 + x1) - 0.5 * d01 / curvature;
    Ok(vertex.clamp(x0, x2))
}

/// Fits the voltage-to-amplitude map from population minima that sit at the
/// `zero_index`-th zero of `J₀(A/ω)` (1 for the first zero).
pub fn bessel_zero_voltage_calibration(curves: &[CalibrationCurve], zero_index: usize) -> Result<BesselCalibration> {
    let zero = bessel_j0_zero(zero_index)?;
    let mut sorted: Vec<&CalibrationCurve> = curves.iter().collect();
    sorted.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut distinct = sorted.iter().map(|c| c.omega).collect::<Vec<_>>();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientCurves(distinct.len()));
    }
    let mut minima = Vec::with_capacity(sorted.len());
    for c in sorted {
        if !(c.omega > 0.0) {
            return Err(Error::invalid("omega", "calibration frequency must be positive"));
        }
        let voltage = curve_minimum(c)?;
        minima.push(CurveMinimum { omega: c.omega, voltage, amplitude: zero * c.omega });
    }
    let pairs: Vec<(f64, f64)> = minima.iter().map(|m| (m.voltage, m.amplitude)).collect();
    let map = fit_linear_map(&pairs)?;
    Ok(BesselCalibration { map, minima, zero })
}
