//! Thin dense linear-algebra layer over `faer`.

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn to_complex(m: MatRef<'_, f64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

/// Largest entry of `m − m†`.
pub fn hermiticity_defect(m: MatRef<'_, c64>) -> f64 {
    let n = m.nrows();
    let mut out = 0.0f64;
    for i in 0..n {
        for j in i..n {
            out = out.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    out
}

/// `(m + m†) / 2`, in place.
pub fn hermitize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)
}

/// `exp(−i t H)` for real symmetric `H`.
pub fn unitary_propagator(h: MatRef<'_, f64>, t: f64) -> Result<CMat> {
    let n = h.nrows();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let u = evd.U();
    let s = evd.S();
    let mut left = Mat::<c64>::zeros(n, n);
    for k in 0..n {
        let phase = c64::from_polar(1.0, -t * s[k]);
        for i in 0..n {
            left[(i, k)] = phase * u[(i, k)];
        }
    }
    let ut = to_complex(u.transpose());
    Ok(&left * &ut)
}

/// Right eigenvectors, their inverse and the eigenvalues of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<c64>,
    pub vectors: CMat,
    pub inverse: CMat,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

impl Eigensystem {
    pub fn new(m: MatRef<'_, c64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: Mat::zeros(0, 0),
                inverse: Mat::zeros(0, 0),
                condition: 1.0,
            });
        }
        let evd = m.eigen().map_err(|_| Error::EigenFailure)?;
        let vectors = evd.U().to_owned();
        let values: Vec<c64> = (0..n).map(|k| evd.S()[k]).collect();
        let sv = vectors
            .singular_values()
            .map_err(|_| Error::EigenFailure)?;
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let inverse = if condition.is_finite() {
            vectors.partial_piv_lu().inverse()
        } else {
            Mat::zeros(n, n)
        };
        Ok(Self {
            values,
            vectors,
            inverse,
            condition,
        })
    }
}

/// Solves the dense square system `a x = b`.
/// Determinant by Gaussian elimination with partial pivoting. An exactly
/// singular matrix gives exactly zero rather than a non-finite product.
pub fn determinant(mut a: CMat) -> c64 {
    let n = a.nrows();
    let mut det = ONE;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for i in (k + 1)..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != k {
            for j in k..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for i in (k + 1)..n {
            let f = a[(i, k)] / pivot;
            if f == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = a[(k, j)];
                a[(i, j)] -= f * u;
            }
        }
    }
    det
}

pub fn solve(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    use faer::linalg::solvers::Solve;
    a.partial_piv_lu().solve(b)
}
