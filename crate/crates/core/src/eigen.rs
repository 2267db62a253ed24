//! Assembly of the collocated generalized eigensystem `(A - mu D^2) v = 0`
//! and a dense symmetric eigensolver (Householder tridiagonalization
//! followed by implicit-shift QL).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::MeshConfig;
use crate::sinc::second_derivative_entry;
use crate::transform::TransformedProblem;

const QL_MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order, with eigenvectors as matching columns
/// when they were requested.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
}

impl Spectrum {
    /// The `i`-th smallest eigenvalue, 1-based.
    pub fn nth(&self, i: usize) -> Option<f64> {
        i.checked_sub(1)
            .and_then(|k| self.eigenvalues.get(k).copied())
    }
}

/// Symmetric matrix `A` and diagonal weight `D^2` of a collocated problem.
#[derive(Debug, Clone)]
pub struct GeneralizedSystem {
    a: DMatrix<f64>,
    d2: DVector<f64>,
    mesh: Option<MeshConfig>,
}

impl GeneralizedSystem {
    /// Build from explicit matrices. `a` must be exactly symmetric and `d2`
    /// strictly positive.
    pub fn new(a: DMatrix<f64>, d2: DVector<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() != d2.len() {
            return Err(Error::domain(format!(
                "A is {}x{} but D^2 has {} entries",
                a.nrows(),
                a.ncols(),
                d2.len()
            )));
        }
        for i in 0..a.nrows() {
            for j in (i + 1)..a.ncols() {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::domain(format!("A is not symmetric at ({i}, {j})")));
                }
            }
        }
        check_weights(&d2)?;
        Ok(Self { a, d2, mesh: None })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn d2(&self) -> &DVector<f64> {
        &self.d2
    }

    pub fn mesh(&self) -> Option<&MeshConfig> {
        self.mesh.as_ref()
    }

    pub fn size(&self) -> usize {
        self.d2.len()
    }
}

fn check_weights(d2: &DVector<f64>) -> Result<()> {
    for (index, &value) in d2.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NotPositiveDefinite { index, value });
        }
    }
    Ok(())
}

/// Collocate a transformed problem on `mesh`:
/// `A = -(1/h^2) delta2 + diag(q~(kh))`, `D^2 = diag(rho(phi(kh)) phi'(kh)^2)`.
pub fn assemble(tp: &TransformedProblem, mesh: &MeshConfig) -> Result<GeneralizedSystem> {
    let size = mesh.size();
    let inv_h2 = 1.0 / (mesh.h * mesh.h);
    let mut a = DMatrix::zeros(size, size);
    let mut d2 = DVector::zeros(size);
    for (row, (k, t)) in mesh.points().enumerate() {
        let qt = tp.qtilde(t).map_err(|e| Error::Assembly {
            k,
            t,
            reason: e.to_string(),
        })?;
        d2[row] = tp.weight(t).map_err(|e| Error::Assembly {
            k,
            t,
            reason: e.to_string(),
        })?;
        a[(row, row)] = -inv_h2 * second_derivative_entry(0, 0) + qt;
        for col in (row + 1)..size {
            let v = -inv_h2 * second_derivative_entry(row as i64, col as i64);
            a[(row, col)] = v;
            a[(col, row)] = v;
        }
    }
    Ok(GeneralizedSystem {
        a,
        d2,
        mesh: Some(*mesh),
    })
}

/// Eigenvalues (and optionally eigenvectors) of a dense symmetric matrix.
pub fn solve_standard_symmetric(b: &DMatrix<f64>, vectors: bool) -> Result<Spectrum> {
    if !b.is_square() {
        return Err(Error::domain("matrix is not square"));
    }
    let n = b.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (b[(i, j)] - b[(j, i)]).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    b[(i, j)],
                    b[(j, i)]
                )));
            }
        }
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: vectors.then(|| DMatrix::zeros(0, 0)),
        });
    }
    let mut work = b.clone();
    let (mut diag, mut off) = tridiagonalize(&mut work, vectors);
    tridiagonal_ql(&mut diag, &mut off, vectors.then_some(&mut work))?;
    Ok(sorted_spectrum(diag, vectors.then_some(work)))
}

/// Generalized eigenvalues of `(A, D^2)` through the congruence
/// `B = D^-1 A D^-1`, scaled entrywise as `a_jk / (d_j d_k)`.
///
/// The reduced matrix is strongly graded when the weights decay double
/// exponentially. It is symmetrically permuted so its diagonal ascends (large
/// entries in the bottom-right corner), which is the orientation the
/// Householder sweep and QL iteration resolve to full relative accuracy.
pub fn solve_generalized(sys: &GeneralizedSystem, vectors: bool) -> Result<Spectrum> {
    check_weights(&sys.d2)?;
    let n = sys.size();
    let d: Vec<f64> = sys.d2.iter().map(|w| w.sqrt()).collect();
    let mut b = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = sys.a[(j, k)] / (d[j] * d[k]);
            b[(j, k)] = v;
            b[(k, j)] = v;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)]));
    let permuted = DMatrix::from_fn(n, n, |r, c| b[(order[r], order[c])]);
    let spectrum = solve_standard_symmetric(&permuted, vectors)?;
    let eigenvectors = spectrum.eigenvectors.map(|y| {
        let mut z = DMatrix::zeros(n, y.ncols());
        for (r, &orig) in order.iter().enumerate() {
            for c in 0..y.ncols() {
                z[(orig, c)] = y[(r, c)] / d[orig];
            }
        }
        z
    });
    Ok(Spectrum {
        eigenvalues: spectrum.eigenvalues,
        eigenvectors,
    })
}

fn sorted_spectrum(values: Vec<f64>, vectors: Option<DMatrix<f64>>) -> Spectrum {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors =
        vectors.map(|v| DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, order[c])]));
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Householder reduction to tridiagonal form, working from the last row up.
/// Returns the diagonal and sub-diagonal (`off[i]` couples `i-1` and `i`;
/// `off[0] = 0`). When `accumulate` is set, `v` is overwritten with the
/// orthogonal transformation; otherwise its contents are scratch.
fn tridiagonalize(v: &mut DMatrix<f64>, accumulate: bool) -> (Vec<f64>, Vec<f64>) {
    let n = v.nrows();
    let mut d: Vec<f64> = (0..n).map(|j| v[(n - 1, j)]).collect();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if accumulate {
        for i in 0..n.saturating_sub(1) {
            v[(n - 1, i)] = v[(i, i)];
            v[(i, i)] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v[(k, i + 1)] / h;
                }
                for j in 0..=i {
                    let mut g = 0.0;
                    for k in 0..=i {
                        g += v[(k, i + 1)] * v[(k, j)];
                    }
                    for k in 0..=i {
                        v[(k, j)] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[(k, i + 1)] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
            v[(n - 1, j)] = 0.0;
        }
        v[(n - 1, n - 1)] = 1.0;
    } else {
        for i in 0..n.saturating_sub(1) {
            v[(n - 1, i)] = v[(i, i)];
        }
        for j in 0..n {
            d[j] = v[(n - 1, j)];
        }
    }
    e[0] = 0.0;
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. On success `d` holds
/// the (unsorted) eigenvalues and `z`, if given, the rotated eigenvectors.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DMatrix<f64>>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::NoConvergence {
                        iterations: QL_MAX_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[(l + 2)..n] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = z[(k, i + 1)];
                            z[(k, i + 1)] = s * z[(k, i)] + c * zk;
                            z[(k, i)] = c * z[(k, i)] - s * zk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
