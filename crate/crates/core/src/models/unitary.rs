use crate::error::{Error, Result};
use crate::matkernel::{CMatrix, HermEig, Hermitian};
use crate::scalar::{expi, Real, C};

use super::{AxisSpec, StateModel, StateVector};

/// `|ψ(θ)⟩ = U_d(θ_d) ⋯ U_1(θ_1) |ψ₀⟩` with `U_k(x) = exp(−i x G_k⁽⁰⁾)`.
///
/// Generator 1 acts first. The state-dependent generators are
/// `G_μ(θ) = i(∂_μU)U† = W_μ G_μ⁽⁰⁾ W_μ†` with `W_μ = U_d ⋯ U_{μ+1}`.
#[derive(Clone, Debug)]
pub struct UnitaryFamily<T: Real> {
    name: String,
    axes: Vec<AxisSpec<T>>,
    generators: Vec<Hermitian<T>>,
    spectra: Vec<HermEig<T>>,
    psi0: StateVector<T>,
}

/// Builds a unitary family with unbounded axes labelled `t0, t1, …`.
pub fn unitary_family<T: Real>(
    generators: Vec<Hermitian<T>>,
    psi0: StateVector<T>,
) -> Result<UnitaryFamily<T>> {
    let axes = (0..generators.len())
        .map(|k| AxisSpec::free(&format!("t{k}")))
        .collect();
    UnitaryFamily::with_axes("unitary", generators, psi0, axes)
}

impl<T: Real> UnitaryFamily<T> {
    pub fn with_axes(
        name: &str,
        generators: Vec<Hermitian<T>>,
        psi0: StateVector<T>,
        axes: Vec<AxisSpec<T>>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::DimensionMismatch(
                "unitary family needs at least one generator".into(),
            ));
        }
        if axes.len() != generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} axes for {} generators",
                axes.len(),
                generators.len()
            )));
        }
        let n = psi0.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generator of dimension {} for a state of dimension {n}",
                g.dim()
            )));
        }
        let spectra = generators
            .iter()
            .map(Hermitian::eig)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.into(),
            axes,
            generators,
            spectra,
            psi0,
        })
    }

    pub fn base_generators(&self) -> &[Hermitian<T>] {
        &self.generators
    }

    pub fn initial_state(&self) -> &StateVector<T> {
        &self.psi0
    }

    /// `exp(−i x G_k⁽⁰⁾) v` through the cached eigendecomposition.
    fn apply_factor(&self, k: usize, x: T, v: &[C<T>]) -> Vec<C<T>> {
        let e = &self.spectra[k];
        let vt = e.vectors.adjoint().matvec(v);
        let phased: Vec<C<T>> = vt
            .iter()
            .zip(&e.values)
            .map(|(z, &l)| z * expi(-l * x))
            .collect();
        e.vectors.matvec(&phased)
    }

    fn factor(&self, k: usize, x: T) -> CMatrix<T> {
        self.spectra[k].exp_neg_i(x)
    }

    /// `U(θ)` as a matrix.
    pub fn unitary(&self, values: &[T]) -> CMatrix<T> {
        let n = self.psi0.dim();
        values
            .iter()
            .enumerate()
            .fold(CMatrix::identity(n), |u, (k, &x)| {
                self.factor(k, x).matmul(&u)
            })
    }
}

impl<T: Real> StateModel<T> for UnitaryFamily<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn hilbert_dim(&self) -> usize {
        self.psi0.dim()
    }

    fn axes(&self) -> &[AxisSpec<T>] {
        &self.axes
    }

    fn amplitudes(&self, values: &[T]) -> Vec<C<T>> {
        values
            .iter()
            .enumerate()
            .fold(self.psi0.amplitudes().to_vec(), |v, (k, &x)| {
                self.apply_factor(k, x, &v)
            })
    }

    fn analytic_tangent(&self, values: &[T], axis: usize) -> Option<Vec<C<T>>> {
        if axis >= values.len() {
            return None;
        }
        let mut v = self.psi0.amplitudes().to_vec();
        for (k, &x) in values.iter().enumerate() {
            v = self.apply_factor(k, x, &v);
            if k == axis {
                v = self.generators[k]
                    .matrix()
                    .matvec(&v)
                    .into_iter()
                    .map(|z| C::new(z.im, -z.re))
                    .collect();
            }
        }
        Some(v)
    }

    fn generators(&self, values: &[T]) -> Option<Vec<Hermitian<T>>> {
        let d = values.len();
        let n = self.psi0.dim();
        let mut out = vec![None; d];
        let mut w = CMatrix::<T>::identity(n);
        for mu in (0..d).rev() {
            out[mu] = Some(self.generators[mu].conjugated_by(&w));
            w = w.matmul(&self.factor(mu, values[mu]));
        }
        Some(out.into_iter().map(Option::unwrap).collect())
    }

    fn has_generators(&self) -> bool {
        true
    }
}
