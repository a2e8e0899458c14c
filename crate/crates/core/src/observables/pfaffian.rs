//! Pfaffians of skew-symmetric matrices by Parlett–Reid elimination with
//! partial pivoting.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

/// Antisymmetry tolerance, relative to `max(1, max |A_ij|)`.
pub const ANTISYMMETRY_TOL: f64 = 1e-10;

/// Pfaffian of an antisymmetric complex matrix; zero for odd dimension.
pub fn pfaffian(a: MatRef<'_, c64>) -> Result<c64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let mut scale = 1.0f64;
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(a[(i, j)].norm());
            defect = defect.max((a[(i, j)] + a[(j, i)]).norm());
        }
    }
    if defect > ANTISYMMETRY_TOL * scale {
        return Err(Error::NotAntisymmetric(defect));
    }
    if n % 2 == 1 {
        return Ok(ZERO);
    }
    Ok(pfaffian_unchecked(a.to_owned()))
}

pub fn pfaffian_real(a: MatRef<'_, f64>) -> Result<f64> {
    let c = Mat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0));
    pfaffian(c.as_ref()).map(|v| v.re)
}

/// Elimination on a scratch copy; `a` must be antisymmetric with even size.
pub(crate) fn pfaffian_unchecked(mut a: Mat<c64>) -> c64 {
    let n = a.nrows();
    let mut pf = ONE;
    let mut k = 0;
    while k + 1 < n {
        // pivot: largest entry below the diagonal in column k
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for i in (k + 2)..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in k..n {
                let tmp = a[(k + 1, j)];
                a[(k + 1, j)] = a[(kp, j)];
                a[(kp, j)] = tmp;
            }
            for i in k..n {
                let tmp = a[(i, k + 1)];
                a[(i, k + 1)] = a[(i, kp)];
                a[(i, kp)] = tmp;
            }
            pf = -pf;
        }
        if best == 0.0 {
            return ZERO;
        }
        let pivot = a[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<c64> = ((k + 2)..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<c64> = ((k + 2)..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in ((k + 2)..n).enumerate() {
                for (jj, j) in ((k + 2)..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c64::new(1.5, -0.5),
            (1, 0) => c64::new(-1.5, 0.5),
            _ => ZERO,
        });
        assert_eq!(pfaffian(a.as_ref()).unwrap(), c64::new(1.5, -0.5));
    }

    #[test]
    fn odd_dimension_is_zero() {
        let a = Mat::<f64>::from_fn(3, 3, |i, j| (j as f64) - (i as f64));
        assert_eq!(pfaffian_real(a.as_ref()).unwrap(), 0.0);
    }

    #[test]
    fn four_by_four_closed_form() {
        // Pf = a01 a23 − a02 a13 + a03 a12
        let v = [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 4.0, 5.0], [0.0, 0.0, 0.0, 6.0]];
        let a = Mat::<f64>::from_fn(4, 4, |i, j| {
            if i < j {
                v[i][j]
            } else if i > j {
                -v[j][i]
            } else {
                0.0
            }
        });
        let expected = 1.0 * 6.0 - 2.0 * 5.0 + 3.0 * 4.0;
        assert!((pfaffian_real(a.as_ref()).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_antisymmetric_input() {
        let a = Mat::<f64>::from_fn(2, 2, |_, _| 1.0);
        assert!(matches!(pfaffian_real(a.as_ref()), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn zero_column_gives_zero() {
        let a = Mat::<c64>::zeros(4, 4);
        assert_eq!(pfaffian(a.as_ref()).unwrap(), ZERO);
    }
}
