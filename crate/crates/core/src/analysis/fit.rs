//! Damped-sine least-squares fit of a population trace.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dynamics::Trace;
use crate::lm::{self, Problem};
use crate::units::{fold_phase, TWO_PI};
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 32;
/// Minimum number of oscillation periods the trace must cover.
pub const MIN_PERIODS: f64 = 1.5;
const ZERO_PAD: usize = 8;
/// Decay seeds, in units of one over the trace duration.
const DECAY_SEEDS: [f64; 3] = [0.5, 2.0, 5.0];

/// `offset + amplitude·e^{−decay_rate·t}·cos(2π·frequency·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedSineFit {
    /// Hz.
    pub frequency: f64,
    /// s⁻¹.
    pub decay_rate: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    pub residual_rms: f64,
}

impl DampedSineFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (-self.decay_rate * t).exp() * (TWO_PI * self.frequency * t + self.phase).cos()
    }

    /// Angular frequency `2π·frequency`.
    pub fn angular_frequency(&self) -> f64 {
        TWO_PI * self.frequency
    }
}

/// The model on time rescaled to `τ ∈ [0, 1]`.
/// Parameters: offset, amplitude, decay, frequency, phase.
struct Scaled<'a> {
    tau: &'a [f64],
    y: &'a [f64],
}

impl Problem for Scaled<'_> {
    fn n_params(&self) -> usize {
        5
    }

    fn n_residuals(&self) -> usize {
        self.tau.len()
    }

    fn residuals(&self, p: &[f64], r: &mut [f64]) {
        let [o, a, d, f, ph] = [p[0], p[1], p[2], p[3], p[4]];
        for (i, (&t, &y)) in self.tau.iter().zip(self.y).enumerate() {
            r[i] = o + a * (-d * t).exp() * (TWO_PI * f * t + ph).cos() - y;
        }
    }

    fn jacobian(&self, p: &[f64], j: &mut DMatrix<f64>) {
        let [a, d, f, ph] = [p[1], p[2], p[3], p[4]];
        for (i, &t) in self.tau.iter().enumerate() {
            let e = (-d * t).exp();
            let (s, c) = (TWO_PI * f * t + ph).sin_cos();
            j[(i, 0)] = 1.0;
            j[(i, 1)] = e * c;
            j[(i, 2)] = -t * a * e * c;
            j[(i, 3)] = -TWO_PI * t * a * e * s;
            j[(i, 4)] = -a * e * s;
        }
    }
}

/// Residual of a least-squares line through `(τ, y)`.
fn detrend(tau: &[f64], y: &[f64]) -> Vec<f64> {
    let n = tau.len() as f64;
    let (mt, my) = (tau.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&t, &v) in tau.iter().zip(y) {
        sxy += (t - mt) * (v - my);
        sxx += (t - mt) * (t - mt);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    tau.iter().zip(y).map(|(&t, &v)| v - my - slope * (t - mt)).collect()
}

/// Dominant nonzero frequency (cycles per unit τ) of `d` sampled uniformly
/// on `[0, 1]`, from a zero-padded FFT with parabolic peak refinement.
fn spectral_peak(d: &[f64]) -> f64 {
    let n = d.len();
    let len = (n * ZERO_PAD).next_power_of_two();
    let mut buf: Vec<Complex64> = d.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(len, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    // skip the leakage lobe around DC
    let first = ZERO_PAD.min(mag.len() - 2).max(1);
    let mut k = first;
    for i in first..mag.len() - 1 {
        if mag[i] > mag[k] {
            k = i;
        }
    }
    let (l, c, r) = (mag[k - 1], mag[k], mag[k + 1]);
    let denom = l - 2.0 * c + r;
    let shift = if denom < 0.0 { (0.5 * (l - r) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    let dt = 1.0 / (n - 1) as f64;
    (k as f64 + shift) / (len as f64 * dt)
}

fn validate(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::InsufficientData(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} samples, need at least {MIN_SAMPLES}",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("non-finite sample".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientData("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Fits a damped sine to uniformly sampled `(times, values)`.
///
/// A trace with no variation returns `amplitude = 0`, `frequency = 0` and
/// the mean as offset instead of failing.
pub fn fit_damped_sine_samples(
    times: &[f64],
    values: &[f64],
    initial_guess: Option<&DampedSineFit>,
) -> Result<DampedSineFit> {
    validate(times, values)?;
    let t0 = times[0];
    let span = times[times.len() - 1] - t0;
    let tau: Vec<f64> = times.iter().map(|&t| (t - t0) / span).collect();
    let detrended = detrend(&tau, values);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let spread = (detrended.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    if spread <= 1e-12 * mean.abs().max(1.0) {
        let rms = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        return Ok(DampedSineFit {
            frequency: 0.0,
            decay_rate: 0.0,
            amplitude: 0.0,
            offset: mean,
            phase: 0.0,
            residual_rms: rms,
        });
    }

    let seeds: Vec<[f64; 5]> = match initial_guess {
        Some(g) => {
            let f = g.frequency * span;
            let d = g.decay_rate * span;
            let a = g.amplitude * (-g.decay_rate * t0).exp();
            let ph = g.phase + TWO_PI * g.frequency * t0;
            vec![[g.offset, a, d, f, ph]]
        }
        None => {
            let f = spectral_peak(&detrended);
            if f < MIN_PERIODS {
                return Err(Error::InsufficientData(format!(
                    "trace covers {f:.3} periods, need at least {MIN_PERIODS}"
                )));
            }
            // project onto the peak frequency for amplitude and phase
            let c: Complex64 = tau
                .iter()
                .zip(&detrended)
                .map(|(&t, &v)| Complex64::from_polar(v, -TWO_PI * f * t))
                .sum();
            let a = 2.0 * c.norm() / n;
            let ph = c.arg();
            DECAY_SEEDS.iter().map(|&d| [mean, a * (1.0 + 0.5 * d), d, f, ph]).collect()
        }
    };

    let problem = Scaled { tau: &tau, y: values };
    let mut best: Option<lm::Report> = None;
    for seed in seeds {
        let rep = lm::minimize(&problem, &seed, lm::Options::default());
        let better = match &best {
            None => true,
            Some(b) => (rep.converged && !b.converged) || (rep.converged == b.converged && rep.rms < b.rms),
        };
        if better {
            best = Some(rep);
        }
    }
    let rep = best.expect("at least one seed");
    if !rep.converged {
        return Err(Error::FitDiverged(format!("no convergence in {} iterations", rep.iterations)));
    }
    if !(rep.rms < spread) {
        return Err(Error::FitDiverged(format!(
            "residual rms {:.3e} not below detrended spread {:.3e}",
            rep.rms, spread
        )));
    }

    let [o, mut a, mut d, mut f, mut ph] = [rep.params[0], rep.params[1], rep.params[2], rep.params[3], rep.params[4]];
    if f < 0.0 {
        f = -f;
        ph = -ph;
    }
    if a < 0.0 {
        a = -a;
        ph += PI;
    }
    if d < 0.0 {
        if d > -1e-6 {
            d = 0.0;
        } else {
            return Err(Error::FitDiverged(format!("growing envelope, decay {:.3e} s^-1", d / span)));
        }
    }
    let frequency = f / span;
    let decay_rate = d / span;
    Ok(DampedSineFit {
        frequency,
        decay_rate,
        amplitude: a * (decay_rate * t0).exp(),
        offset: o,
        phase: fold_phase(ph - TWO_PI * frequency * t0),
        residual_rms: rep.rms,
    })
}

/// Fits a damped sine to the population samples of `trace`.
pub fn fit_damped_sine(trace: &Trace, initial_guess: Option<&DampedSineFit>) -> Result<DampedSineFit> {
    fit_damped_sine_samples(&trace.times, &trace.populations, initial_guess)
}
