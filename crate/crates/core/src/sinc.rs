//! Sinc basis functions and the unit-mesh Sinc differentiation matrices.
//!
//! Rows and columns of every matrix built here run over the collocation
//! indices `-M..=N`, stored 0-based with offset `+M`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const TAYLOR_THRESHOLD: f64 = 1e-4;

/// `sin(pi z)` with exact zeros at the integers.
fn sin_pi(z: f64) -> f64 {
    // reduce to r in [-1, 1]; sin(pi z) = sin(pi r)
    let r = z - 2.0 * (z / 2.0).round();
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// Normalized sinc, `sin(pi z) / (pi z)`, with `sinc(0) = 1`.
pub fn sinc(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain(format!("sinc of non-finite argument {z}")));
    }
    if z.abs() < TAYLOR_THRESHOLD {
        let u = (PI * z) * (PI * z);
        return Ok(1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0)));
    }
    Ok(sin_pi(z) / (PI * z))
}

/// The shifted Sinc basis element `S(j, h)(x) = sinc((x - j h) / h)`.
pub fn sinc_basis(j: i64, h: f64, x: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    sinc((x - j as f64 * h) / h)
}

/// Entry `(j, k)` of the second-order unit-mesh differentiation matrix.
#[inline]
pub fn second_derivative_entry(j: i64, k: i64) -> f64 {
    let m = k - j;
    if m == 0 {
        -PI * PI / 3.0
    } else {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let m = m as f64;
        -2.0 * sign / (m * m)
    }
}

/// Dense Sinc differentiation matrix `h^order (d/dx)^order S(j,h)(kh)` of
/// dimension `M + N + 1`. Only orders 0 and 2 are supported.
pub fn diff_matrix(order: u32, m: usize, n: usize) -> Result<DMatrix<f64>> {
    let size = m + n + 1;
    match order {
        0 => Ok(DMatrix::identity(size, size)),
        2 => {
            let mut out = DMatrix::zeros(size, size);
            for r in 0..size {
                out[(r, r)] = second_derivative_entry(0, 0);
                for c in (r + 1)..size {
                    let v = second_derivative_entry(r as i64, c as i64);
                    out[(r, c)] = v;
                    out[(c, r)] = v;
                }
            }
            Ok(out)
        }
        other => Err(Error::domain(format!(
            "differentiation matrix of order {other} is not supported (orders 0 and 2 only)"
        ))),
    }
}

/// Coefficients of a truncated Sinc expansion `sum_{j=-M}^{N} v_j S(j,h)(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SincWeights {
    h: f64,
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl SincWeights {
    pub fn new(h: f64, m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain(format!(
                "mesh size must be positive, got {h}"
            )));
        }
        if values.len() != m + n + 1 {
            return Err(Error::domain(format!(
                "expected {} weights for M = {m}, N = {n}, got {}",
                m + n + 1,
                values.len()
            )));
        }
        Ok(Self { h, m, n, values })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weight attached to collocation index `j` in `-M..=N`.
    pub fn get(&self, j: i64) -> Option<f64> {
        let idx = j + self.m as i64;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    /// Evaluate the truncated expansion at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (offset, v) in self.values.iter().enumerate() {
            let j = offset as i64 - self.m as i64;
            acc += v * sinc_basis(j, self.h, x)?;
        }
        Ok(acc)
    }
}

/// Free-function form of [`SincWeights::eval`].
pub fn expansion_eval(w: &SincWeights, x: f64) -> Result<f64> {
    w.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_examples() {
        assert_eq!(sinc(0.0).unwrap(), 1.0);
        assert_eq!(sinc(1.0).unwrap(), 0.0);
        assert!((sinc(0.5).unwrap() - std::f64::consts::FRAC_2_PI).abs() < 1e-16);
        assert!(sinc(f64::NAN).is_err());
        assert!(sinc(f64::INFINITY).is_err());
    }

    #[test]
    fn sinc_taylor_branch_is_continuous() {
        for &z in &[0.99e-4, 1e-4, 1.01e-4, -0.99e-4, 3e-5] {
            let direct = (PI * z).sin() / (PI * z);
            let got = sinc(z).unwrap();
            assert!((got - direct).abs() <= 2e-16, "z = {z}: {got} vs {direct}");
        }
    }

    #[test]
    fn sinc_bounded_by_one() {
        for i in -2000..2000 {
            let z = i as f64 * 0.0137;
            assert!(sinc(z).unwrap().abs() <= 1.0);
        }
    }

    #[test]
    fn basis_examples() {
        assert_eq!(sinc_basis(3, 0.5, 1.5).unwrap(), 1.0);
        assert_eq!(sinc_basis(0, 1.0, 3.0).unwrap(), 0.0);
        let v = sinc_basis(2, 0.5, 1.25).unwrap();
        assert!((v - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        assert!(sinc_basis(0, 0.0, 1.0).is_err());
        assert!(sinc_basis(0, -1.0, 1.0).is_err());
    }

    #[test]
    fn diff_matrix_shapes_and_entries() {
        let id = diff_matrix(0, 2, 3).unwrap();
        assert_eq!(id, DMatrix::identity(6, 6));
        let d2 = diff_matrix(2, 3, 4).unwrap();
        assert_eq!(d2.nrows(), 8);
        assert!((d2[(0, 0)] - -3.2898681336964524).abs() < 1e-15);
        assert_eq!(d2[(2, 3)], 2.0);
        assert_eq!(d2[(2, 4)], -0.5);
        assert!(diff_matrix(1, 2, 2).is_err());
        assert!(diff_matrix(3, 2, 2).is_err());
    }

    #[test]
    fn diff_matrix_is_bitwise_symmetric() {
        let d2 = diff_matrix(2, 7, 13).unwrap();
        assert_eq!(d2, d2.transpose());
    }

    #[test]
    fn weights_validation() {
        assert!(SincWeights::new(1.0, 1, 1, vec![0.0; 2]).is_err());
        assert!(SincWeights::new(0.0, 1, 1, vec![0.0; 3]).is_err());
        let w = SincWeights::new(0.25, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(w.get(-2), Some(1.0));
        assert_eq!(w.get(1), Some(4.0));
        assert_eq!(w.get(2), None);
        assert_eq!(w.get(-3), None);
    }

    #[test]
    fn expansion_examples() {
        let w =
            SincWeights::new(0.3, 3, 4, vec![0.5, -1.0, 2.0, 7.0, 0.25, -3.0, 1.5, 9.0]).unwrap();
        for k in -3..=4 {
            let got = expansion_eval(&w, k as f64 * 0.3).unwrap();
            assert!((got - w.get(k).unwrap()).abs() < 1e-14, "k = {k}");
        }
        let zero = SincWeights::new(0.7, 2, 2, vec![0.0; 5]).unwrap();
        assert_eq!(zero.eval(0.123).unwrap(), 0.0);
        let single = SincWeights::new(1.0, 0, 0, vec![2.0]).unwrap();
        assert!((single.eval(0.5).unwrap() - 1.2732395447351628).abs() < 1e-15);
    }
}
