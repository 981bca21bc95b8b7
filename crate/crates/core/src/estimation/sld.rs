use crate::error::{Error, Result};
use crate::geometry::CurvatureMatrix;
use crate::matkernel::{outer, CMatrix, Hermitian, RMatrix};
use crate::models::{tangent, ParameterPoint, StateModel, TangentOptions};
use crate::scalar::{Real, C};

use super::QFIMatrix;

/// Symmetric logarithmic derivatives `L_μ` at one parameter point.
#[derive(Clone, Debug)]
pub struct SLDSet<T: Real> {
    pub operators: Vec<Hermitian<T>>,
    pub theta: ParameterPoint<T>,
}

const SLD_RESIDUAL_TOL: f64 = 1e-7;

/// `L_μ = 2 ∂_μρ` for `ρ = |ψ⟩⟨ψ|`, which solves `∂_μρ = (L_μρ + ρL_μ)/2`
/// whenever `ρ² = ρ`. The defining equation is checked to `1e−7`.
pub fn sld_pure<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
    opts: &TangentOptions<T>,
) -> Result<SLDSet<T>> {
    let psi = model.state(theta)?.into_amplitudes();
    let rho = outer(&psi, &psi);
    let two = C::new(T::lit(2.0), T::zero());
    let half = C::new(T::lit(0.5), T::zero());
    let operators = (0..model.param_dim())
        .map(|mu| {
            let t = tangent(model, theta, mu, opts)?.amplitudes;
            let drho = outer(&t, &psi).add(&outer(&psi, &t));
            let l = drho.scale(two);
            let res = drho
                .sub(&l.matmul(&rho).add(&rho.matmul(&l)).scale(half))
                .max_abs();
            if res > T::tol(SLD_RESIDUAL_TOL) {
                return Err(Error::NumericalInconsistency(format!(
                    "SLD equation residual {res} on axis {mu}"
                )));
            }
            Hermitian::new(l)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SLDSet {
        operators,
        theta: theta.clone(),
    })
}

fn check_rho<T: Real>(rho: &CMatrix<T>, slds: &SLDSet<T>) -> Result<()> {
    if let Some(l) = slds.operators.iter().find(|l| l.dim() != rho.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "SLD of dimension {} with a {}x{} density matrix",
            l.dim(),
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// `J_μν = Tr[ρ (L_μL_ν + L_νL_μ)/2]`.
pub fn qfim_from_sld<T: Real>(rho: &CMatrix<T>, slds: &SLDSet<T>) -> Result<QFIMatrix<T>> {
    check_rho(rho, slds)?;
    let d = slds.operators.len();
    let rl: Vec<CMatrix<T>> = slds
        .operators
        .iter()
        .map(|l| rho.matmul(l.matrix()))
        .collect();
    let j = RMatrix::from_fn(d, d, |m, n| {
        let a = rl[m].matmul(slds.operators[n].matrix()).trace();
        let b = rl[n].matmul(slds.operators[m].matrix()).trace();
        (a + b).re * T::lit(0.5)
    });
    QFIMatrix::new(j, slds.theta.clone())
}

/// Mean Uhlmann curvature `F_μν = −(i/4) Tr[ρ [L_μ, L_ν]]`.
pub fn uhlmann_from_sld<T: Real>(rho: &CMatrix<T>, slds: &SLDSet<T>) -> Result<CurvatureMatrix<T>> {
    check_rho(rho, slds)?;
    let d = slds.operators.len();
    let quarter = T::lit(0.25);
    let f = RMatrix::from_fn(d, d, |m, n| {
        let c = slds.operators[m]
            .matrix()
            .commutator(slds.operators[n].matrix());
        // −(i/4)·z has real part Im(z)/4.
        rho.matmul(&c).trace().im * quarter
    });
    CurvatureMatrix::new(f, slds.theta.clone())
}
