//! Special functions needed by the closed-form LZS expressions and the
//! Bessel-zero calibration.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::units::TWO_PI;
use crate::{Error, Result};

/// Stirling-series coefficients `B₂ₖ / (2k(2k−1))`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Recurrence shift that moves the argument to `Re ≥ 11` before Stirling.
const GAMMA_SHIFT: u32 = 10;

/// `ln Γ(z)` on the continuous branch, for `Re z > 0`.
fn ln_gamma(z: Complex64) -> Complex64 {
    let mut correction = Complex64::new(0.0, 0.0);
    for k in 0..GAMMA_SHIFT {
        correction += (z + k as f64).ln();
    }
    let w = z + GAMMA_SHIFT as f64;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * TWO_PI.ln() + series - correction
}

fn principal(angle: f64) -> f64 {
    let wrapped = angle - TWO_PI * (angle / TWO_PI).round();
    if wrapped <= -PI {
        wrapped + TWO_PI
    } else {
        wrapped
    }
}

/// Principal argument of `Γ(1 − iy)`, valid for `|y| < 50`.
pub fn complex_gamma_arg(y: f64) -> Result<f64> {
    if !(y.abs() < 50.0) {
        return Err(Error::OutOfValidityRange { function: "complex_gamma_arg", value: y });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(principal(ln_gamma(Complex64::new(1.0, -y)).im))
}

/// Complete elliptic integral of the second kind in the parameter
/// convention, `E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ`, via the AGM.
pub fn complete_elliptic_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::OutOfDomain { function: "complete_elliptic_e", value: m });
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    let mut weight = 0.5;
    let mut sum = weight * m;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() <= 1e-17 * a {
            break;
        }
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        weight *= 2.0;
        sum += weight * c * c;
    }
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}

/// `E` in the modulus convention, `E(k) = E(m = k²)`.
pub fn complete_elliptic_e_modulus(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k.abs()) {
        return Err(Error::OutOfDomain { function: "complete_elliptic_e_modulus", value: k });
    }
    complete_elliptic_e(k * k)
}

const BESSEL_MAX_ORDER: u32 = 50;
const BESSEL_MAX_ARG: f64 = 1e4;
/// Arguments up to this value use the power series.
const BESSEL_SERIES_LIMIT: f64 = 12.0;

fn bessel_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..500 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalised with `J₀ + 2ΣJ₂ₖ = 1`.
fn bessel_miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 30.0 + (50.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut next = 0.0_f64;
    let mut current = 1e-300_f64;
    let mut wanted = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * current - next;
        next = current;
        current = prev;
        // current now holds J_{k-1} up to scale
        let order = k - 1;
        if order == n as usize {
            wanted = current;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += current;
    wanted / norm
}

/// Bessel function of the first kind `J_n(x)` for `n ≤ 50`, `0 ≤ x ≤ 10⁴`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if n > BESSEL_MAX_ORDER {
        return Err(Error::OutOfValidityRange { function: "bessel_j", value: n as f64 });
    }
    if !(0.0..=BESSEL_MAX_ARG).contains(&x) {
        return Err(Error::OutOfValidityRange { function: "bessel_j", value: x });
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x <= BESSEL_SERIES_LIMIT {
        Ok(bessel_series(n, x))
    } else {
        Ok(bessel_miller(n, x))
    }
}

/// The `k`-th positive zero of `J₀` (`k ≥ 1`).
pub fn bessel_j0_zero(k: usize) -> Result<f64> {
    if k == 0 || k > 3000 {
        return Err(Error::OutOfValidityRange { function: "bessel_j0_zero", value: k as f64 });
    }
    let beta = (k as f64 - 0.25) * PI;
    let mut z = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3));
    for _ in 0..50 {
        let step = bessel_j(0, z)? / bessel_j(1, z)?;
        z += step;
        if step.abs() <= 1e-15 * z {
            break;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `arg Γ(1 + iy) = −γy + Σₙ (y/n − atan(y/n))` from the Weierstrass
    /// product, with the tail past `n_max` summed as `y³/(3n³)`.
    fn arg_gamma_product(y: f64, n_max: usize) -> f64 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let mut s = -EULER_GAMMA * y;
        for n in (1..=n_max).rev() {
            let r = y / n as f64;
            s += r - r.atan();
        }
        let tail = y.powi(3) / (6.0 * (n_max as f64).powi(2));
        s + tail
    }

    /// Adaptive Simpson quadrature.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, eps, 50)
    }

    /// `J_n(x) = (1/2π)∫₀^{2π} cos(nτ − x sin τ) dτ` by the trapezoid rule,
    /// spectrally accurate for periodic integrands.
    fn bessel_integral(n: u32, x: f64) -> f64 {
        let m = 4096;
        (0..m)
            .map(|k| {
                let tau = TWO_PI * k as f64 / m as f64;
                (n as f64 * tau - x * tau.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn gamma_arg_small_values() {
        assert_eq!(complex_gamma_arg(0.0).unwrap(), 0.0);
        let v = complex_gamma_arg(0.2353).unwrap();
        let oracle = -arg_gamma_product(0.2353, 200_000);
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!((v - 0.1306).abs() < 2e-4);
    }

    #[test]
    fn gamma_arg_against_product_over_range() {
        for &y in &[0.01, 0.5, 1.0, 2.0, 3.3] {
            let v = complex_gamma_arg(y).unwrap();
            let oracle = principal(-arg_gamma_product(y, 400_000));
            assert!((v - oracle).abs() < 1e-10, "y={y}: {v} vs {oracle}");
        }
    }

    #[test]
    fn gamma_arg_odd_and_bounded() {
        for k in 1..200 {
            let y = k as f64 * 0.2468;
            let a = complex_gamma_arg(y).unwrap();
            let b = complex_gamma_arg(-y).unwrap();
            assert!((a + b).abs() < 1e-12 || (a.abs() - PI).abs() < 1e-9);
            assert!(a > -PI && a <= PI);
        }
        assert!(complex_gamma_arg(50.0).is_err());
    }

    #[test]
    fn elliptic_e_known_values() {
        assert!((complete_elliptic_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(complete_elliptic_e(1.0).unwrap(), 1.0);
        let f = |t: f64| (1.0 - 0.5 * t.sin().powi(2)).sqrt();
        let oracle = simpson(&f, 0.0, FRAC_PI_2, 1e-15);
        let e = complete_elliptic_e(0.5).unwrap();
        assert!((e - oracle).abs() < 1e-12, "{e} vs {oracle}");
        assert!((e - 1.350643881047675).abs() < 1e-12);
        assert!(complete_elliptic_e(1.5).is_err());
        assert!(complete_elliptic_e(-0.1).is_err());
    }

    #[test]
    fn elliptic_e_against_quadrature() {
        for &m in &[0.1, 0.3, 0.9, 0.98, 0.999] {
            let f = |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
            let oracle = simpson(&f, 0.0, FRAC_PI_2, 1e-15);
            assert!((complete_elliptic_e(m).unwrap() - oracle).abs() < 1e-12, "m={m}");
        }
        let k = 0.6;
        assert_eq!(complete_elliptic_e_modulus(k).unwrap(), complete_elliptic_e(k * k).unwrap());
    }

    #[test]
    fn elliptic_e_decreasing() {
        let mut last = f64::INFINITY;
        for k in 0..=100 {
            let e = complete_elliptic_e(k as f64 / 100.0).unwrap();
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn bessel_against_integral() {
        for n in [0u32, 1, 2, 5, 10, 20] {
            for &x in &[0.1, 1.0, 2.404825557695773, 7.5, 12.0, 12.5, 20.0, 45.0] {
                let v = bessel_j(n, x).unwrap();
                let o = bessel_integral(n, x);
                assert!((v - o).abs() < 1e-10, "J_{n}({x}) = {v} vs {o}");
            }
        }
    }

    #[test]
    fn bessel_values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert!(bessel_j(51, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(0, 1e4 + 1.0).is_err());
        // large-argument asymptote √(2/πx) cos(x − π/4)
        let x = 9000.0;
        let asym = (2.0 / (PI * x)).sqrt() * (x - PI / 4.0).cos();
        assert!((bessel_j(0, x).unwrap() - asym).abs() < 1e-5);
    }

    #[test]
    fn bessel_normalization_identity() {
        for k in 1..=20 {
            let x = k as f64 * 0.5;
            let mut s = bessel_j(0, x).unwrap().powi(2);
            for n in 1..=40 {
                s += 2.0 * bessel_j(n, x).unwrap().powi(2);
            }
            assert!((s - 1.0).abs() < 1e-9, "x={x}: {s}");
        }
    }

    #[test]
    fn bessel_recurrence() {
        for xi in 1..=20 {
            let x = xi as f64;
            for n in 1..=10u32 {
                let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn first_zero_of_j0() {
        // bracketing bisection on the series as an independent oracle
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if bessel_series(0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = bessel_j0_zero(1).unwrap();
        assert!((z - 0.5 * (lo + hi)).abs() < 1e-12);
        assert!((z - 2.404826).abs() < 1e-6);
        assert!((bessel_j0_zero(2).unwrap() - 5.520078110286311).abs() < 1e-12);
    }
}
