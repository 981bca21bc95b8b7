use crate::error::{Error, Result};
use crate::scalar::{cr, expi, Real, C};

use super::matrix::{CMatrix, RMatrix};

const MAX_SWEEPS: usize = 100;

/// Hermitian matrix; Hermiticity is checked on construction and then enforced exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<T: Real>(CMatrix<T>);

impl<T: Real> Hermitian<T> {
    /// Accepts `m` when `max|m_ij − conj(m_ji)| ≤ 1e-12 · max(1, ‖m‖_max)`.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square and nonempty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NumericalInconsistency(
                "non-finite matrix entry".into(),
            ));
        }
        let scale = m.max_abs().max(T::one());
        let res = m.hermiticity_residual();
        if res > T::tol(1e-12) * scale {
            return Err(Error::NumericalInconsistency(format!(
                "Hermiticity residual {res} exceeds tolerance"
            )));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Embeds a real symmetric matrix.
    pub fn from_real_symmetric(m: &RMatrix<T>) -> Result<Self> {
        Self::new(m.to_complex())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }

    /// `⟨ψ|H|ψ⟩`, real for Hermitian `H`.
    pub fn expectation(&self, psi: &[C<T>]) -> T {
        self.0.sandwich(psi, psi).re
    }

    /// `U M U†`, which stays Hermitian for any `U`.
    pub fn conjugated_by(&self, u: &CMatrix<T>) -> Self {
        Self(u.matmul(&self.0).matmul(&u.adjoint()).hermitian_part())
    }

    pub fn eig(&self) -> Result<HermEig<T>> {
        herm_eig(self)
    }
}

/// Spectral decomposition `M = V Λ V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermEig<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermEig<T> {
    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn map_spectrum(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(cr(T::zero()), |acc, k| {
                acc + self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj()
            })
        })
    }

    /// `exp(−i t M)`.
    pub fn exp_neg_i(&self, t: T) -> CMatrix<T> {
        self.map_spectrum(|l| expi(-l * t))
    }

    pub fn max_abs_eigenvalue(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Cyclic complex Jacobi eigen-solver for Hermitian matrices.
pub fn herm_eig<T: Real>(m: &Hermitian<T>) -> Result<HermEig<T>> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut v = CMatrix::<T>::identity(n);
    let frob = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if frob == T::zero() {
        return Ok(HermEig {
            values: vec![T::zero(); n],
            vectors: v,
        });
    }
    let eps = T::epsilon();
    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= eps * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > eps * frob * T::lit(16.0) {
        return Err(Error::NonConvergence(format!(
            "off-diagonal norm {} after {MAX_SWEEPS} sweeps",
            off_diagonal_norm(&a)
        )));
    }
    if !a.is_finite() || !v.is_finite() {
        return Err(Error::NonConvergence("non-finite iterate".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `G = diag(1, e^{-iφ}) · [[c, s], [−s, c]]`
/// acting on rows/columns `p, q`; accumulates `V ← V G`.
fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq.unscale(r);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta == T::zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + theta.hypot(T::one()))
    };
    let c = T::one() / t.hypot(T::one());
    let s = t * c;

    let u_pp = cr(c);
    let u_pq = cr(s);
    let u_qp = phase.conj().scale(-s);
    let u_qq = phase.conj().scale(c);

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = cr(T::zero());
    a[(q, p)] = cr(T::zero());
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Singular values by one-sided (Hestenes) Jacobi, unsorted.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    if !m.is_finite() {
        return Err(Error::NonConvergence("non-finite input".into()));
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let eps = T::epsilon();
    let mut converged = cols <= 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = cr(T::zero());
                for k in 0..rows {
                    alpha = alpha + a[(k, p)].norm_sqr();
                    beta = beta + a[(k, q)].norm_sqr();
                    gamma = gamma + a[(k, p)].conj() * a[(k, q)];
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (g + g);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + zeta.hypot(T::one()))
                };
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                for k in 0..rows {
                    let x = a[(k, p)];
                    let y = a[(k, q)] * phase.conj();
                    a[(k, p)] = x.scale(c) - y.scale(s);
                    a[(k, q)] = x.scale(s) + y.scale(c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(
            "one-sided Jacobi SVD did not converge".into(),
        ));
    }
    Ok((0..cols)
        .map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect())
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "trace norm requires a square matrix".into(),
        ));
    }
    Ok(singular_values(m)?.into_iter().sum())
}
