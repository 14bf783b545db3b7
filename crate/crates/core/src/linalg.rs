//! Dense complex linear algebra on top of nalgebra's LU.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

/// Pivots smaller than this mark a numerically singular matrix.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Largest modulus among the entries.
pub trait InfNorm {
    fn inf_norm(&self) -> f64;
}

impl<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>> InfNorm for Matrix<Complex64, R, C, S> {
    fn inf_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solves `a·x = b`; `None` when the matrix is exactly singular or the
/// result is not finite.
pub fn solve(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    let x = a.clone().lu().solve(b)?;
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

/// Inverse condition number `1/(‖A‖₁·‖A⁻¹‖₁)`, zero when a pivot is tiny.
pub fn rco(a: &DMatrix<Complex64>) -> f64 {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return 0.0;
    }
    let lu = a.clone().lu();
    if lu.u().diagonal().iter().any(|p| p.norm() < PIVOT_TOLERANCE) {
        return 0.0;
    }
    let Some(inv) = lu.try_inverse() else { return 0.0 };
    let r = 1.0 / (one_norm(a) * one_norm(&inv));
    if r.is_finite() {
        r.min(1.0)
    } else {
        0.0
    }
}

/// Numerical rank by Gaussian elimination with partial pivoting.
pub fn rank(a: &DMatrix<Complex64>, tol: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows).map(|i| (i, m[(i, c)].norm())).fold((r, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if best <= tol {
            continue;
        }
        m.swap_rows(r, p);
        for i in r + 1..rows {
            let f = m[(i, c)] / m[(r, c)];
            for j in c..cols {
                let v = m[(r, j)];
                m[(i, j)] -= f * v;
            }
        }
        r += 1;
    }
    r
}
