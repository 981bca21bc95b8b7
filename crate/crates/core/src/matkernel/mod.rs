//! Small dense real/complex matrix kernel.
//!
//! Everything here is sized for parameter counts and Hilbert dimensions of a
//! handful; all matrices are dense and all decompositions are Jacobi based so
//! results are deterministic for a given input.

mod eig;
mod matrix;

pub use eig::{herm_eig, singular_values, trace_norm, HermEig, Hermitian};
pub use matrix::{CMatrix, Matrix, RMatrix};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Default relative cut-off for treating eigenvalues of a symmetric matrix as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `Σ conj(u_i) v_i`.
pub fn inner<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    debug_assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Outer product `|u⟩⟨v|`.
pub fn outer<T: Real>(u: &[C<T>], v: &[C<T>]) -> CMatrix<T> {
    CMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Eigen-decomposition of a real symmetric matrix through its Hermitian embedding.
pub fn sym_eig<T: Real>(m: &RMatrix<T>) -> Result<HermEig<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "symmetric eigenproblem requires a square matrix".into(),
        ));
    }
    let scale = m.max_abs().max(T::one());
    if m.symmetry_residual() > T::tol(1e-12) * scale {
        return Err(Error::NumericalInconsistency(format!(
            "matrix not symmetric (residual {})",
            m.symmetry_residual()
        )));
    }
    herm_eig(&Hermitian::from_real_symmetric(&m.symmetrized())?)
}

/// Applies a real spectral function to a real symmetric matrix.
pub fn sym_spectral_map<T: Real>(m: &RMatrix<T>, f: impl Fn(T) -> T) -> Result<RMatrix<T>> {
    let e = sym_eig(m)?;
    Ok(e.map_spectrum(|l| cr(f(l))).re().symmetrized())
}

/// Moore-Penrose pseudoinverse of a real symmetric matrix; eigenvalues with
/// `|λ| ≤ rel_tol · max|λ|` are treated as zero.
pub fn pinv_sym<T: Real>(m: &RMatrix<T>, rel_tol: T) -> Result<RMatrix<T>> {
    let e = sym_eig(m)?;
    let cut = rel_tol * e.max_abs_eigenvalue();
    Ok(e.map_spectrum(|l| {
        if l.abs() <= cut || l == T::zero() {
            cr(T::zero())
        } else {
            cr(T::one() / l)
        }
    })
    .re()
    .symmetrized())
}

/// Principal square root of a positive semidefinite matrix (negative rounding
/// eigenvalues are clamped to zero).
pub fn sqrt_psd<T: Real>(m: &RMatrix<T>) -> Result<RMatrix<T>> {
    sym_spectral_map(m, |l| l.max(T::zero()).sqrt())
}

/// Pseudo-inverse square root `(M⁺)^{1/2}` of a PSD matrix with the same
/// support cut as [`pinv_sym`].
pub fn pinv_sqrt_psd<T: Real>(m: &RMatrix<T>, rel_tol: T) -> Result<RMatrix<T>> {
    let e = sym_eig(m)?;
    let cut = rel_tol * e.max_abs_eigenvalue();
    Ok(e.map_spectrum(|l| {
        if l <= cut || l <= T::zero() {
            cr(T::zero())
        } else {
            cr(T::one() / l.sqrt())
        }
    })
    .re()
    .symmetrized())
}

/// Orthogonal projector onto the null space of a symmetric matrix at `rel_tol`.
pub fn null_projector<T: Real>(m: &RMatrix<T>, rel_tol: T) -> Result<RMatrix<T>> {
    let e = sym_eig(m)?;
    let cut = rel_tol * e.max_abs_eigenvalue();
    Ok(e.map_spectrum(|l| {
        if l.abs() <= cut {
            cr(T::one())
        } else {
            cr(T::zero())
        }
    })
    .re()
    .symmetrized())
}

/// Numerical rank at `rel_tol`.
pub fn sym_rank<T: Real>(m: &RMatrix<T>, rel_tol: T) -> Result<usize> {
    let e = sym_eig(m)?;
    let cut = rel_tol * e.max_abs_eigenvalue();
    Ok(e.values.iter().filter(|l| l.abs() > cut).count())
}

/// `exp(−i t H)`.
pub fn expm_neg_i<T: Real>(h: &Hermitian<T>, t: T) -> Result<CMatrix<T>> {
    Ok(h.eig()?.exp_neg_i(t))
}
