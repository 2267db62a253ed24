//! Principal branch of the Lambert W function on `[0, inf)`.

use crate::error::{Error, Result};

const MAX_ITER: usize = 32;

/// `W0(x)` for `x >= 0`: the unique `w >= 0` with `w * exp(w) = x`.
///
/// Halley iteration from a log-based starting point; converges in a handful
/// of steps over the whole half-line.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!(
            "lambert_w0 is only defined here for x >= 0, got {x}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::domain("lambert_w0 of infinity"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let l = x.ln_1p();
    let mut w = l * (1.0 - l.ln_1p() / (2.0 + l));
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent bisection oracle on `w e^w - x`.
    fn bisect(x: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let w10 = lambert_w0(10.0).unwrap();
        assert!((w10 - 1.7455280027406994).abs() < 1e-15);
        assert!((w10 - bisect(10.0, 1.0, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(lambert_w0(-0.1).is_err());
        assert!(lambert_w0(-1.0 / std::f64::consts::E).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
        assert!(lambert_w0(f64::INFINITY).is_err());
    }

    #[test]
    fn tiny_and_huge_arguments() {
        let w = lambert_w0(1e-300).unwrap();
        assert!((w - 1e-300).abs() <= 1e-315);
        let big = 1e300;
        let w = lambert_w0(big).unwrap();
        assert!(((w.ln() + w) - big.ln()).abs() < 1e-13 * big.ln());
    }

    #[test]
    fn asymptotic_ratio() {
        let x: f64 = 1e8;
        let r = lambert_w0(x).unwrap() / x.ln();
        assert!(r > 0.8 && r < 1.0, "ratio {r}");
    }
}
