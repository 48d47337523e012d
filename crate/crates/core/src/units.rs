//! Unit conversions between the angular/SI internals and boundary units.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Ordinary frequency in MHz to angular frequency in rad/s.
pub fn mhz(f: f64) -> f64 {
    f * 1e6 * TWO_PI
}

/// Ordinary frequency in GHz to angular frequency in rad/s.
pub fn ghz(f: f64) -> f64 {
    f * 1e9 * TWO_PI
}

/// Ordinary frequency in kHz to angular frequency in rad/s.
pub fn khz(f: f64) -> f64 {
    f * 1e3 * TWO_PI
}

pub fn to_mhz(omega: f64) -> f64 {
    omega / TWO_PI / 1e6
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / TWO_PI / 1e9
}

pub fn to_khz(omega: f64) -> f64 {
    omega / TWO_PI / 1e3
}

/// Microseconds to seconds.
pub fn us(t: f64) -> f64 {
    t * 1e-6
}

pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

/// Nanoseconds to seconds.
pub fn ns(t: f64) -> f64 {
    t * 1e-9
}

/// Folds an angle into `[0, 2π)`.
pub fn fold_phase(phase: f64) -> f64 {
    let folded = phase.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if folded >= TWO_PI {
        0.0
    } else {
        folded
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_phase_range() {
        assert_eq!(fold_phase(0.0), 0.0);
        assert_eq!(fold_phase(TWO_PI), 0.0);
        assert!((fold_phase(-0.5 * PI) - 1.5 * PI).abs() < 1e-15);
        assert!(fold_phase(-1e-300) < TWO_PI);
    }

    #[test]
    fn conversions_invert() {
        assert!((to_mhz(mhz(26.2)) - 26.2).abs() < 1e-12);
        assert!((to_ghz(ghz(4.365)) - 4.365).abs() < 1e-12);
        assert!((to_us(us(40.0)) - 40.0).abs() < 1e-12);
    }
}
