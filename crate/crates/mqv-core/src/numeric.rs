//! Floating-point rank estimation and small float helpers.
//!
//! Numeric mode exists solely for rank and Jacobian estimation. Complex
//! matrices are realified (each entry a+bi becomes a 2x2 real block), which
//! doubles every singular value's multiplicity; the complex rank is half the
//! real rank and gap ratios are unchanged.

use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::error::{CoreError, Result};
use crate::matrix::Matrix;
use crate::scalar::{Mode, Scalar};

fn realify(m: &Matrix) -> DMatrix<f64> {
    let (r, c) = (m.rows(), m.cols());
    let mut out = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m.get(i, j).to_complex();
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Singular values of a complex matrix, descending (each reported once).
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let real = realify(m);
    let mut sv: Vec<f64> = real.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // Realification doubles each singular value; keep one per pair.
    sv.into_iter().step_by(2).collect()
}

/// Number of singular values above `tol` times the largest one; the zero
/// matrix has rank 0.
pub fn rank_numeric(m: &Matrix, tol: f64) -> Result<usize> {
    if m.mode() != Mode::Float {
        return Err(CoreError::FloatModeRequired("rank_numeric".into()));
    }
    if tol < 0.0 {
        return Err(CoreError::ContractViolation("negative tolerance".into()));
    }
    let sv = singular_values(m);
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * largest).count())
}

/// Numeric rank together with the gap ratio sigma_rank / sigma_{rank+1}.
/// The gap is infinite when the trailing singular value vanishes or the
/// matrix has full rank.
pub fn rank_with_gap(m: &Matrix, tol: f64) -> Result<(usize, f64)> {
    let rank = rank_numeric(m, tol)?;
    let sv = singular_values(m);
    let gap = if rank == 0 || rank >= sv.len() || sv[rank] == 0.0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    };
    Ok((rank, gap))
}

/// Plain Gaussian inverse for float matrices (partial pivoting).
pub fn float_inverse(m: &Matrix) -> Result<Matrix> {
    if m.mode() != Mode::Float {
        return Err(CoreError::FloatModeRequired("float_inverse".into()));
    }
    if m.rows() != m.cols() {
        return Err(CoreError::ShapeMismatch("inverse of non-square".into()));
    }
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|r| (0..n).map(|c| m.entry_float(r, c)).collect())
        .collect();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    for k in 0..n {
        let (pivot_row, pivot_norm) = (k..n)
            .map(|r| (r, a[r][k].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_norm < 1e-300 {
            return Err(CoreError::ContractViolation("numerically singular matrix".into()));
        }
        a.swap(k, pivot_row);
        inv.swap(k, pivot_row);
        let p = a[k][k];
        for c in 0..n {
            a[k][c] /= p;
            inv[k][c] /= p;
        }
        for r in 0..n {
            if r == k {
                continue;
            }
            let f = a[r][k];
            if f.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let t = a[k][c];
                a[r][c] -= f * t;
                let t = inv[k][c];
                inv[r][c] -= f * t;
            }
        }
    }
    let mut out = Matrix::zeros(Mode::Float, n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, Scalar::Float(inv[r][c]))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let m = Matrix::identity(Mode::Float, 3);
        assert_eq!(rank_numeric(&m, 1e-9).unwrap(), 3);
    }

    #[test]
    fn tiny_singular_value_is_dropped() {
        let mut m = Matrix::zeros(Mode::Float, 2, 2);
        m.set(0, 0, Scalar::Float(Complex64::new(1.0, 0.0))).unwrap();
        m.set(1, 1, Scalar::Float(Complex64::new(1e-14, 0.0))).unwrap();
        assert_eq!(rank_numeric(&m, 1e-9).unwrap(), 1);
    }

    #[test]
    fn rank_of_product_of_generic_factors() {
        // Deterministic pseudo-random full-rank factors: 5x3 times 3x7 has rank 3.
        let mut state = 1u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let mut a = Matrix::zeros(Mode::Float, 5, 3);
        for r in 0..5 {
            for c in 0..3 {
                a.set(r, c, Scalar::Float(Complex64::new(next(), next()))).unwrap();
            }
        }
        let mut b = Matrix::zeros(Mode::Float, 3, 7);
        for r in 0..3 {
            for c in 0..7 {
                b.set(r, c, Scalar::Float(Complex64::new(next(), next()))).unwrap();
            }
        }
        let p = a.mul(&b).unwrap();
        assert_eq!(rank_numeric(&p, 1e-9).unwrap(), 3);
    }

    #[test]
    fn empty_and_zero_matrices_have_rank_zero() {
        assert_eq!(rank_numeric(&Matrix::zeros(Mode::Float, 0, 4), 1e-9).unwrap(), 0);
        assert_eq!(rank_numeric(&Matrix::zeros(Mode::Float, 3, 3), 1e-9).unwrap(), 0);
    }

    #[test]
    fn float_inverse_inverts() {
        let m = Matrix::from_float_rows(vec![
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(1.0, -1.0)],
        ]);
        let inv = float_inverse(&m).unwrap();
        let prod = m.mul(&inv).unwrap();
        let err = prod.sub(&Matrix::identity(Mode::Float, 2)).unwrap().max_abs();
        assert!(err < 1e-12, "residual {err}");
    }

    #[test]
    fn exact_matrix_is_refused() {
        let m = Matrix::identity(Mode::Exact, 2);
        assert!(rank_numeric(&m, 1e-9).is_err());
    }
}
