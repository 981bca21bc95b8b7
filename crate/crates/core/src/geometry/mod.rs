//! Quantum geometric tensor, its metric and curvature parts, and the
//! topological invariants obtained by integrating the curvature.
//!
//! The curvature convention throughout is `χ = g + (i/2) F`, so `F = 2 Im χ`.

mod topology;

pub use topology::{chern_number, dd_invariant, three_form};

use crate::error::{Error, Result};
use crate::matkernel::{herm_eig, inner, CMatrix, Hermitian, RMatrix};
use crate::models::{tangent, DiffScheme, ParameterPoint, StateModel, TangentOptions};
use crate::scalar::{Real, C};

/// How a [`QGTensor`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QgtMethod {
    FiniteDifference,
    AnalyticTangent,
    Generator,
}

impl std::fmt::Display for QgtMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::FiniteDifference => "finite-difference",
            Self::AnalyticTangent => "analytic-tangent",
            Self::Generator => "generator",
        })
    }
}

/// `χ_μν = ⟨∂_μψ|(1 − |ψ⟩⟨ψ|)|∂_νψ⟩`, Hermitian and positive semidefinite.
#[derive(Clone, Debug)]
pub struct QGTensor<T: Real> {
    pub chi: CMatrix<T>,
    pub theta: ParameterPoint<T>,
    pub method: QgtMethod,
}

/// Real symmetric part `g = Re χ`.
#[derive(Clone, Debug)]
pub struct MetricTensor<T: Real> {
    pub g: RMatrix<T>,
    pub theta: ParameterPoint<T>,
}

/// Real antisymmetric part `F = 2 Im χ`.
#[derive(Clone, Debug)]
pub struct CurvatureMatrix<T: Real> {
    pub f: RMatrix<T>,
    pub theta: ParameterPoint<T>,
}

const HERMITICITY_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;

impl<T: Real> QGTensor<T> {
    /// Validates shape, Hermiticity (`1e−9`) and positivity (`−1e−9`), then
    /// stores the exact Hermitian part.
    pub fn new(chi: CMatrix<T>, theta: ParameterPoint<T>, method: QgtMethod) -> Result<Self> {
        if !chi.is_square() || chi.rows() != theta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "QGT of shape {}x{} at a {}-parameter point",
                chi.rows(),
                chi.cols(),
                theta.dim()
            )));
        }
        if !chi.is_finite() {
            return Err(Error::NumericalInconsistency("non-finite QGT entry".into()));
        }
        let res = chi.hermiticity_residual();
        if res > T::tol(HERMITICITY_TOL) {
            return Err(Error::NumericalInconsistency(format!(
                "QGT Hermiticity residual {res}"
            )));
        }
        let qgt = Self {
            chi: chi.hermitian_part(),
            theta,
            method,
        };
        let lo = qgt.min_eigenvalue()?;
        if lo < -T::tol(PSD_TOL) * qgt.chi.max_abs().max(T::one()) {
            return Err(Error::NumericalInconsistency(format!(
                "QGT smallest eigenvalue {lo} is negative"
            )));
        }
        Ok(qgt)
    }

    pub fn dim(&self) -> usize {
        self.chi.rows()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let e = herm_eig(&Hermitian::new(self.chi.clone())?)?;
        Ok(e.values[0])
    }

    pub fn metric(&self) -> MetricTensor<T> {
        MetricTensor {
            g: self.chi.re().symmetrized(),
            theta: self.theta.clone(),
        }
    }

    pub fn curvature(&self) -> CurvatureMatrix<T> {
        CurvatureMatrix {
            f: self.chi.im().antisymmetrized().scale(T::lit(2.0)),
            theta: self.theta.clone(),
        }
    }
}

impl<T: Real> MetricTensor<T> {
    /// Checks symmetry (`1e−9`) and stores the symmetrized matrix.
    pub fn new(g: RMatrix<T>, theta: ParameterPoint<T>) -> Result<Self> {
        check_square(&g, &theta)?;
        if g.symmetry_residual() > T::tol(1e-9) * g.max_abs().max(T::one()) {
            return Err(Error::NumericalInconsistency(format!(
                "metric symmetry residual {}",
                g.symmetry_residual()
            )));
        }
        Ok(Self {
            g: g.symmetrized(),
            theta,
        })
    }
}

impl<T: Real> CurvatureMatrix<T> {
    /// Checks antisymmetry (`1e−9`) and stores the antisymmetrized matrix.
    pub fn new(f: RMatrix<T>, theta: ParameterPoint<T>) -> Result<Self> {
        check_square(&f, &theta)?;
        if f.antisymmetry_residual() > T::tol(1e-9) * f.max_abs().max(T::one()) {
            return Err(Error::NumericalInconsistency(format!(
                "curvature antisymmetry residual {}",
                f.antisymmetry_residual()
            )));
        }
        Ok(Self {
            f: f.antisymmetrized(),
            theta,
        })
    }
}

fn check_square<T: Real>(m: &RMatrix<T>, theta: &ParameterPoint<T>) -> Result<()> {
    if !m.is_square() || m.rows() != theta.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix at a {}-parameter point",
            m.rows(),
            m.cols(),
            theta.dim()
        )));
    }
    Ok(())
}

/// `(g, F)` with `g = Re χ` and `F = 2 Im χ`.
pub fn split<T: Real>(chi: &QGTensor<T>) -> (MetricTensor<T>, CurvatureMatrix<T>) {
    (chi.metric(), chi.curvature())
}

/// QGT from state tangents.
pub fn qgt<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
    opts: &TangentOptions<T>,
) -> Result<QGTensor<T>> {
    model.check_domain(theta.values())?;
    let d = model.param_dim();
    let psi = model.amplitudes(theta.values());
    let mut all_analytic = true;
    let tangents = (0..d)
        .map(|mu| {
            let t = tangent(model, theta, mu, opts)?;
            all_analytic &= t.scheme == DiffScheme::Analytic;
            Ok(t.amplitudes)
        })
        .collect::<Result<Vec<_>>>()?;
    let overlaps: Vec<C<T>> = tangents.iter().map(|t| inner(&psi, t)).collect();
    let chi = CMatrix::from_fn(d, d, |m, n| {
        inner(&tangents[m], &tangents[n]) - overlaps[m].conj() * overlaps[n]
    });
    let method = if all_analytic {
        QgtMethod::AnalyticTangent
    } else {
        QgtMethod::FiniteDifference
    };
    QGTensor::new(chi, theta.clone(), method)
}

/// QGT from the generator set: `χ_μν = ⟨G_μ G_ν⟩ − ⟨G_μ⟩⟨G_ν⟩`.
///
/// With `∂_μψ = −i G_μ ψ` this gives `g = Cov(G_μ, G_ν)` and
/// `F_μν = −i⟨[G_μ, G_ν]⟩`, the same tensor as [`qgt`].
pub fn qgt_from_generators<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
) -> Result<QGTensor<T>> {
    model.check_domain(theta.values())?;
    let gens = model
        .generators(theta.values())
        .ok_or(Error::MissingGenerators)?;
    let psi = model.amplitudes(theta.values());
    let applied: Vec<Vec<C<T>>> = gens.iter().map(|g| g.matrix().matvec(&psi)).collect();
    let means: Vec<C<T>> = applied.iter().map(|v| inner(&psi, v)).collect();
    let d = gens.len();
    let chi = CMatrix::from_fn(d, d, |m, n| {
        inner(&applied[m], &applied[n]) - means[m].conj() * means[n]
    });
    QGTensor::new(chi, theta.clone(), QgtMethod::Generator)
}
