//! Dormand-Prince 5(4) explicit Runge-Kutta integrator with PI step-size
//! control and 4th-order continuous (dense) output.
//!
//! The state is a fixed-size array, which keeps the inner loop free of heap
//! traffic. Accepted steps are handed to an observer as a [`DenseStep`],
//! which can be evaluated anywhere in `[t, t + h]`; sampling and window
//! integrals are built on top of that.

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output (Shampine)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Right-hand side `dy/dt = f(t, y)`.
pub trait System<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

impl<F, const N: usize> System<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) {
        self(t, y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub h_max: f64,
    /// Initial step; estimated from the problem when `None`.
    pub h_init: Option<f64>,
    /// Attempted-step limit before [`Error::ExcessiveStepCount`].
    pub max_steps: u64,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

impl Default for Options {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-9, h_max: f64::INFINITY, h_init: None, max_steps: 100_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn y_start(&self) -> [f64; N] {
        self.cont[0]
    }

    pub fn y_end(&self) -> [f64; N] {
        let mut y = self.cont[0];
        for (yi, di) in y.iter_mut().zip(self.cont[1].iter()) {
            *yi += di;
        }
        y
    }

    /// Interpolated state at `t`; accurate for `t` within the step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.cont;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])))
        })
    }
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &Options) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sk).powi(2);
    }
    (acc / N as f64).sqrt()
}

fn rms_scaled<const N: usize>(v: &[f64; N], y0: &[f64; N], opts: &Options) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        acc += (v[i] / sk).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Starting step after Hairer, Nørsett & Wanner (order 5).
fn initial_step<S: System<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    opts: &Options,
    stats: &mut Stats,
) -> f64 {
    let d0 = rms_scaled(y0, y0, opts);
    let d1 = rms_scaled(f0, y0, opts);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h0 = h0.min(opts.h_max).min(span);
    let y1: [f64; N] = std::array::from_fn(|i| y0[i] + h0 * f0[i]);
    let mut f1 = [0.0; N];
    sys.rhs(t0 + h0, &y1, &mut f1);
    stats.rhs_evals += 1;
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = rms_scaled(&diff, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (1e-6_f64).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(opts.h_max).min(span)
}

/// Integrates from `t0` to `t_end > t0`, calling `observer` after every
/// accepted step. Returns the final state.
pub fn integrate<S, F, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
    mut observer: F,
) -> Result<([f64; N], Stats)>
where
    S: System<N>,
    F: FnMut(&DenseStep<N>) -> Result<()>,
{
    if !(t_end > t0) {
        return Err(Error::invalid("t_end", "must exceed the start time"));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::invalid("tol", "tolerances must be positive"));
    }
    let span = t_end - t0;
    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    sys.rhs(t, &y, &mut k1);
    stats.rhs_evals += 1;

    let mut h = match opts.h_init {
        Some(h) => h.min(span),
        None => initial_step(sys, t, &y, &k1, span, opts, &mut stats),
    };
    let expo1 = 0.2 - BETA * 0.75;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);
    let mut ys = [0.0; N];

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::ExcessiveStepCount { steps: stats.accepted + stats.rejected });
        }
        let last = t + h >= t_end || (t_end - (t + h)) <= 1e-12 * span;
        if last {
            h = t_end - t;
        }
        if 0.1 * h.abs() <= t.abs() * f64::EPSILON || h <= 0.0 {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        for i in 0..N {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &ys, &mut k2);
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &ys, &mut k3);
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &ys, &mut k4);
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &ys, &mut k5);
        for i in 0..N {
            ys[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + h };
        sys.rhs(t_new, &ys, &mut k6);
        let y_new: [f64; N] = std::array::from_fn(|i| {
            y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i])
        });
        sys.rhs(t_new, &y_new, &mut k7);
        stats.rhs_evals += 6;

        let err: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let err = error_norm(&err, &y, &y_new, opts);
        if !err.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(expo1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            stats.accepted += 1;

            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k7[i] - bspl;
                cont[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            observer(&DenseStep { t0: t, h, cont })?;

            y = y_new;
            k1 = k7;
            t = t_new;
            if last {
                return Ok((y, stats));
            }
            let mut h_new = (h / fac).min(opts.h_max);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
}
