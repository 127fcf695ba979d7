//! Thin dense linear-algebra layer over `faer`.
//!
//! Everything runs with `faer`'s sequential backend so results are
//! reproducible bit for bit; parallelism lives one level up in
//! [`crate::par`]. Norms of operators are spectral norms unless the name
//! says otherwise.

use std::cell::Cell;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

thread_local! {
    static SOLVES: Cell<usize> = const { Cell::new(0) };
}

/// Number of LU factorizations performed on the current thread.
///
/// Used to check that factorization-free iterations stay that way.
pub fn solve_count() -> usize {
    SOLVES.with(|c| c.get())
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::identity(n, n)
}

pub fn matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    a * b
}

/// `a · b*`
pub fn matmul_adj(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    a * b.adjoint()
}

/// `a · diag(d) · b*`
pub fn sandwich_diag(a: MatRef<'_, c64>, d: &[c64], b: MatRef<'_, c64>) -> Mat<c64> {
    let scaled = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * d[j]);
    scaled.as_ref() * b.adjoint()
}

pub fn scale(a: MatRef<'_, c64>, s: c64) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn frobenius_norm(a: MatRef<'_, c64>) -> f64 {
    a.norm_l2()
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order. Only the lower
/// triangle is read.
pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Eigendecomposition `a = U diag(λ) U*` of a Hermitian matrix, eigenvalues
/// nondecreasing.
pub fn hermitian_eigen(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let vals = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// `U f(λ) U*` for a Hermitian matrix.
pub fn hermitian_function(a: MatRef<'_, c64>, f: impl Fn(f64) -> f64) -> Result<Mat<c64>> {
    let (vals, u) = hermitian_eigen(a)?;
    let fv: Vec<c64> = vals.iter().map(|&l| c64::new(f(l), 0.0)).collect();
    Ok(sandwich_diag(u.as_ref(), &fv, u.as_ref()))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Thin SVD: `(U, σ, V)` with `a = U diag(σ) V*`, σ nonincreasing.
pub fn thin_svd(a: MatRef<'_, c64>) -> Result<(Mat<c64>, Vec<f64>, Mat<c64>)> {
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let s = svd.S().column_vector().iter().map(|x| x.re).collect();
    Ok((svd.U().to_owned(), s, svd.V().to_owned()))
}

/// Least-squares solution of `a x = b` for `a` of full column rank, via
/// the thin SVD.
pub fn lstsq(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<Mat<c64>> {
    if a.nrows() != b.nrows() {
        return Err(Error::shape(
            "least squares right-hand side",
            a.nrows(),
            b.nrows(),
        ));
    }
    let (u, s, v) = thin_svd(a)?;
    let smax = s.first().copied().unwrap_or(0.0);
    if let Some(&smin) = s.last() {
        if !(smin > 1e-12 * smax) {
            return Err(Error::Singular {
                sigma_min: smin,
                sigma_max: smax,
            });
        }
    }
    let mut ub = matmul(u.adjoint().to_owned().as_ref(), b);
    for (i, sv) in s.iter().enumerate() {
        for j in 0..ub.ncols() {
            ub[(i, j)] /= *sv;
        }
    }
    Ok(matmul(v.as_ref(), ub.as_ref()))
}

pub fn spectral_norm(a: MatRef<'_, c64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// `‖a − b‖₂`
pub fn spectral_distance(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64> {
    spectral_norm((a - b).as_ref())
}

/// Solves `a · x = b` by LU with partial pivoting. No singularity check.
pub fn lu_solve(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    SOLVES.with(|c| c.set(c.get() + 1));
    a.partial_piv_lu().solve(b)
}

pub fn mat_vec(a: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    debug_assert_eq!(a.ncols(), x.len());
    let mut out = vec![c64::ZERO; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == c64::ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += a[(i, j)] * xj;
        }
    }
    out
}

/// `a* · x`
pub fn adj_mat_vec(a: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    debug_assert_eq!(a.nrows(), x.len());
    (0..a.ncols())
        .map(|j| {
            x.iter()
                .enumerate()
                .fold(c64::ZERO, |acc, (i, &xi)| acc + xi * a[(i, j)].conj())
        })
        .collect()
}

pub fn vec_norm(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_distance(x: &[c64], y: &[c64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn scale_vec(x: &[c64], s: f64) -> Vec<c64> {
    x.iter().map(|z| z * s).collect()
}

/// Column `j` as an owned vector.
pub fn column(a: MatRef<'_, c64>, j: usize) -> Vec<c64> {
    (0..a.nrows()).map(|i| a[(i, j)]).collect()
}
