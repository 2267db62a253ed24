//! Bessel functions of the first kind and their positive zeros.

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e250;

/// `J_order(x)` and its neighbours `J_{order-1}(x)`, `J_{order+1}(x)` for
/// `x > 0`, by Miller's backward recurrence normalized with
/// `J_0 + 2 sum_k J_{2k} = 1`.
fn bessel_j_triple(order: u32, x: f64) -> (f64, f64, f64) {
    let reach = (order as f64).max(x);
    let mut start = (reach + 30.0 + (60.0 * reach).sqrt()).ceil() as u32 + 2;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let (mut next, mut cur) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let (mut below, mut at, mut above) = (0.0, 0.0, 0.0);
    // cur holds the unnormalized J_k, next holds J_{k+1}
    for k in (0..=start).rev() {
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k + 1 == order {
            below = cur;
        } else if k == order {
            at = cur;
        } else if k == order + 1 {
            above = cur;
        }
        if k == 0 {
            break;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            next /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            below /= RESCALE_ABOVE;
            at /= RESCALE_ABOVE;
            above /= RESCALE_ABOVE;
        }
    }
    (below / norm, at / norm, above / norm)
}

/// Bessel function of the first kind `J_order(x)` for `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "bessel_j needs a finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    Ok(bessel_j_triple(order, x).1)
}

/// The `index`-th positive zero `j_{order,index}` of `J_order`.
///
/// Zeros of `J_n` (n >= 1) lie beyond `x = n` and are more than `pi` apart,
/// so a forward scan with a quarter-unit step brackets each one; the bracket
/// is then closed by bisection down to a few ulps and polished by a Newton
/// step using `J_n' = (J_{n-1} - J_{n+1}) / 2`.
pub fn bessel_zero(order: u32, index: u32) -> Result<f64> {
    if order < 1 || index < 1 {
        return Err(Error::domain(format!(
            "bessel_zero needs order >= 1 and index >= 1, got ({order}, {index})"
        )));
    }
    let step = 0.25;
    let mut lo = order as f64;
    let mut f_lo = bessel_j(order, lo)?;
    let mut found = 0;
    let limit = order as f64 + 4.0 * (index as f64 + 2.0) * std::f64::consts::PI + 10.0;
    let mut hi;
    loop {
        hi = lo + step;
        let f_hi = bessel_j(order, hi)?;
        if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
            found += 1;
            if found == index {
                break;
            }
        }
        lo = hi;
        f_lo = f_hi;
        if lo > limit {
            return Err(Error::NoConvergence {
                iterations: ((lo - order as f64) / step) as usize,
            });
        }
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = bessel_j(order, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let (below, at, above) = bessel_j_triple(order, x);
    let slope = 0.5 * (below - above);
    let polished = x - at / slope;
    Ok(
        if (polished - x).abs() <= (hi - lo).max(4.0 * f64::EPSILON * x) {
            polished
        } else {
            x
        },
    )
}
