//! Estimation bounds derived from the quantum geometry of a pure-state model.
//!
//! All bound computations live on the support of `J`: inverses are
//! Moore-Penrose pseudoinverses with relative cut-off `rank_tol`, and axes with
//! no Fisher information are reported rather than dropped.

mod bounds;
mod sld;

pub use bounds::{
    attainable_qcrb, attainable_qcrb_matrix_form, evaluate_bounds, gamma_spectrum, holevo_sandwich,
    sld_crb_scalar, subspace, uncertainty_check, uncertainty_slack, BoundReport, GammaSpectrum,
    GAMMA_CLAMP,
};
pub use sld::{qfim_from_sld, sld_pure, uhlmann_from_sld, SLDSet};

use crate::error::{Error, Result};
use crate::geometry::MetricTensor;
use crate::matkernel::{sym_eig, RMatrix};
use crate::models::ParameterPoint;
use crate::scalar::Real;

const PSD_TOL: f64 = 1e-9;

fn check_psd<T: Real>(m: &RMatrix<T>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{what} must be square")));
    }
    let scale = m.max_abs().max(T::one());
    if m.symmetry_residual() > T::tol(1e-9) * scale {
        return Err(Error::NumericalInconsistency(format!(
            "{what} symmetry residual {}",
            m.symmetry_residual()
        )));
    }
    let lo = sym_eig(&m.symmetrized())?.values[0];
    if lo < -T::tol(PSD_TOL) * scale {
        return Err(Error::NumericalInconsistency(format!(
            "{what} has negative eigenvalue {lo}"
        )));
    }
    Ok(())
}

/// Quantum Fisher information matrix; symmetric positive semidefinite.
#[derive(Clone, Debug)]
pub struct QFIMatrix<T: Real> {
    pub j: RMatrix<T>,
    pub theta: ParameterPoint<T>,
}

impl<T: Real> QFIMatrix<T> {
    pub fn new(j: RMatrix<T>, theta: ParameterPoint<T>) -> Result<Self> {
        check_psd(&j, "QFIM")?;
        if j.rows() != theta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} QFIM at a {}-parameter point",
                j.rows(),
                j.cols(),
                theta.dim()
            )));
        }
        Ok(Self {
            j: j.symmetrized(),
            theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }
}

/// `J = 4 g`.
pub fn qfim<T: Real>(g: &MetricTensor<T>) -> Result<QFIMatrix<T>> {
    QFIMatrix::new(g.g.scale(T::lit(4.0)), g.theta.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Identity,
    Qfim,
    Custom,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "qfim" => Ok(Self::Qfim),
            _ => Err(Error::InvalidInput(format!(
                "unknown weight `{s}` (expected qfim or identity)"
            ))),
        }
    }
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Identity => "identity",
            Self::Qfim => "qfim",
            Self::Custom => "custom",
        })
    }
}

/// Positive semidefinite weight `W` of a scalar bound.
#[derive(Clone, Debug)]
pub struct WeightMatrix<T: Real> {
    pub w: RMatrix<T>,
    pub kind: WeightKind,
}

impl<T: Real> WeightMatrix<T> {
    pub fn identity(d: usize) -> Self {
        Self {
            w: RMatrix::identity(d),
            kind: WeightKind::Identity,
        }
    }

    /// `W = J`, the weight under which the attainable bound applies.
    pub fn qfim(j: &QFIMatrix<T>) -> Self {
        Self {
            w: j.j.clone(),
            kind: WeightKind::Qfim,
        }
    }

    pub fn custom(w: RMatrix<T>) -> Result<Self> {
        check_psd(&w, "weight matrix")?;
        Ok(Self {
            w: w.symmetrized(),
            kind: WeightKind::Custom,
        })
    }

    pub fn of_kind(kind: WeightKind, j: &QFIMatrix<T>) -> Result<Self> {
        match kind {
            WeightKind::Identity => Ok(Self::identity(j.dim())),
            WeightKind::Qfim => Ok(Self::qfim(j)),
            WeightKind::Custom => Err(Error::InvalidInput(
                "a custom weight needs an explicit matrix".into(),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }
}
