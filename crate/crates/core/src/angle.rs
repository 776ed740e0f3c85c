//! Wrapped angle arithmetic on the circle.
//!
//! All stored angles live in `[0, 2π)`. Signed differences are taken in
//! `(-π, π]`, counterclockwise offsets in `[0, 2π)`.

use std::f64::consts::{PI, TAU};

/// Maps any finite angle into `[0, 2π)`.
#[inline]
pub fn wrap_2pi(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Maps any finite angle into `(-π, π]`.
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let w = wrap_2pi(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Counterclockwise sweep from `from` to `to`, in `[0, 2π)`.
#[inline]
pub fn ccw_offset(from: f64, to: f64) -> f64 {
    wrap_2pi(to - from)
}

/// Unsigned shortest angular distance, in `[0, π]`.
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_ranges() {
        assert_eq!(wrap_2pi(0.0), 0.0);
        assert!((wrap_2pi(-PI / 4.0) - 7.0 * PI / 4.0).abs() < 1e-15);
        assert!((wrap_2pi(5.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_2pi(-1e-300), 0.0);
        assert!(wrap_2pi(-1e-17) < TAU);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_pi(PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn offsets_across_seam() {
        assert!((ccw_offset(7.0 * PI / 4.0, PI / 4.0) - PI / 2.0).abs() < 1e-12);
        assert!((ccw_offset(PI / 4.0, 7.0 * PI / 4.0) - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!((angular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }
}
