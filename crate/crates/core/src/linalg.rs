//! Small dense kernels: Cholesky factorization and triangular solves on
//! row-major square matrices.

use crate::scalar::Scalar;

/// A pivot was not finite or fell below `n·ε` relative to its diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotPositiveDefinite {
    pub pivot: usize,
}

/// In-place lower Cholesky factorization `A = L Lᵀ` of the `n x n` row-major matrix.
///
/// Only the lower triangle of `a` is read; on success it holds `L`, and the
/// strict upper triangle is left untouched.
pub fn cholesky_in_place<T: Scalar>(a: &mut [T], n: usize) -> Result<(), NotPositiveDefinite> {
    debug_assert_eq!(a.len(), n * n);
    for i in 0..n {
        let (done, rest) = a.split_at_mut(i * n);
        let row_i = &mut rest[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j];
            let s = row_i[j] - dot(&row_i[..j], row_j);
            row_i[j] = s / done[j * n + j];
        }
        let original = row_i[i];
        let diag = original - dot(&row_i[..i], &row_i[..i]);
        let floor = T::epsilon() * T::from_count(n) * original.abs();
        if !diag.is_finite() || diag <= floor {
            return Err(NotPositiveDefinite { pivot: i });
        }
        row_i[i] = diag.sqrt();
    }
    Ok(())
}

/// Dot product with four interleaved accumulators; the summation order is fixed.
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] = acc[k] + x[k] * y[k];
        }
    }
    let tail = ra.iter().zip(rb).fold(T::zero(), |s, (&x, &y)| s + x * y);
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Solve `L Lᵀ x = b` in place given the factor from [`cholesky_in_place`].
pub fn cholesky_solve_in_place<T: Scalar>(l: &[T], n: usize, b: &mut [T]) {
    debug_assert_eq!(b.len(), n);
    for i in 0..n {
        let s = b[i] - dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// `true` when every Cholesky pivot of the symmetric matrix is strictly positive.
pub fn is_positive_definite<T: Scalar>(a: &[T], n: usize) -> bool {
    let mut work = a.to_vec();
    cholesky_in_place(&mut work, n).is_ok()
}
