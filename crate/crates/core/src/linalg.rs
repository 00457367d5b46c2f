//! Dense complex kernels the posterior solves lean on.

use matrixmultiply::zgemm;
use matrixmultiply::CGemmOption;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn as_c64(z: &[Complex64]) -> *const [f64; 2] {
    z.as_ptr() as *const [f64; 2]
}

/// `A B` through the blocked complex GEMM.
pub(crate) fn mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (m, k) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(k, kb, "inner dimensions differ");
    let mut c = DMatrix::<Complex64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: `Complex64` is `repr(C)` with two `f64` fields, so it has the
    // layout of `[f64; 2]`. All three matrices are dense column-major with
    // the dimensions passed, and `c` does not alias `a` or `b`.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            as_c64(a.as_slice()),
            1,
            m as isize,
            as_c64(b.as_slice()),
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// `Aᴴ B`.
pub(crate) fn ad_mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    mul(&a.adjoint(), b)
}

/// Inverse of a lower-triangular matrix by column-oriented forward
/// substitution. Only the lower triangle of `l` is read.
pub(crate) fn lower_triangular_inverse(l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = l.nrows();
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let xs = &mut x.as_mut_slice()[j * n..(j + 1) * n];
        xs[j] = Complex64::new(1.0, 0.0);
        for k in j..n {
            let lk = &l.as_slice()[k * n..(k + 1) * n];
            let v = xs[k] / lk[k];
            xs[k] = v;
            for i in k + 1..n {
                xs[i] -= lk[i] * v;
            }
        }
    }
    x
}

/// Squared Euclidean norm of every column.
pub(crate) fn column_norms_squared(x: &DMatrix<Complex64>) -> DVector<f64> {
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.norm_squared()))
}
