use crate::error::{Error, Result};
use crate::geometry::{qgt, split, CurvatureMatrix};
use crate::matkernel::{
    herm_eig, inner, null_projector, pinv_sqrt_psd, pinv_sym, sqrt_psd, sym_eig, sym_rank,
    trace_norm, CMatrix, Hermitian, RMatrix,
};
use crate::models::{ParameterPoint, StateModel, TangentOptions};
use crate::scalar::{Real, C};

use super::{qfim, QFIMatrix, WeightKind, WeightMatrix};

/// Largest excess of `|γ_i|` over 1 that is treated as rounding and clamped.
pub const GAMMA_CLAMP: f64 = 1e-6;

const SUPPORT_TOL: f64 = 1e-6;
const ORDER_TOL: f64 = 1e-9;

/// Spectrum of `2i J^{−1/2} F J^{−1/2}` on the support of `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSpectrum<T> {
    /// Clamped to `|γ_i| ≤ 1`; descending by absolute value, ties by value.
    pub eigenvalues: Vec<T>,
    /// `max |γ_i|` after clamping.
    pub gamma: T,
    /// `max |γ_i|` before clamping.
    pub raw_gamma: T,
    pub rank: usize,
    /// Axes carrying no Fisher information (zero diagonal of `J`).
    pub inestimable_axes: Vec<usize>,
}

/// Scalar bounds at one `(θ, W)`.
#[derive(Clone, Debug)]
pub struct BoundReport<T: Real> {
    pub theta: ParameterPoint<T>,
    pub j: RMatrix<T>,
    pub f: RMatrix<T>,
    pub w: WeightMatrix<T>,
    pub spectrum: GammaSpectrum<T>,
    /// `C^S = Tr[W J⁺]`.
    pub sld_crb: T,
    /// `C^S + ‖√W J⁺ F J⁺ √W‖₁`.
    pub sandwich_mid: T,
    /// `(1 + γ) C^S`.
    pub sandwich_gamma: T,
    /// `2 C^S`.
    pub sandwich_two: T,
    /// Present only for `W = J`.
    pub attainable_qcrb: Option<T>,
}

impl<T: Real> BoundReport<T> {
    /// Smallest gap in `C^S ≤ mid ≤ (1+γ)C^S ≤ 2C^S`; negative means violated.
    pub fn ordering_margin(&self) -> T {
        (self.sandwich_mid - self.sld_crb)
            .min(self.sandwich_gamma - self.sandwich_mid)
            .min(self.sandwich_two - self.sandwich_gamma)
    }

    /// Smallest gap in `C^S ≤ C ≤ (1+γ)C^S`, when the chain applies
    /// (`W = J` with full-rank `J`).
    pub fn attainable_margin(&self) -> Option<T> {
        let c = self.attainable_qcrb?;
        if self.spectrum.rank < self.j.rows() {
            return None;
        }
        Some((c - self.sld_crb).min(self.sandwich_gamma - c))
    }

    pub fn gamma(&self) -> T {
        self.spectrum.gamma
    }
}

fn check_same_dim<T: Real>(a: &RMatrix<T>, b: &RMatrix<T>, what: &str) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Fails unless `m` vanishes on the null space of `j`.
fn check_support<T: Real>(j: &RMatrix<T>, m: &RMatrix<T>, rank_tol: T, what: &str) -> Result<()> {
    let p = null_projector(j, rank_tol)?;
    let leak = p.matmul(m).max_abs().max(m.matmul(&p).max_abs());
    let tol = T::tol(SUPPORT_TOL) * j.max_abs().max(T::one());
    if leak > tol {
        return Err(Error::IncompatibleSupport(format!(
            "{what} has weight {leak} outside the range of J"
        )));
    }
    Ok(())
}

fn inestimable_axes<T: Real>(j: &RMatrix<T>, rank_tol: T) -> Result<Vec<usize>> {
    let cut = rank_tol * sym_eig(j)?.max_abs_eigenvalue();
    Ok((0..j.rows()).filter(|&k| j[(k, k)] <= cut).collect())
}

/// `2i S F S` with `S = (J⁺)^{1/2}`, Hermitian because `F` is antisymmetric.
fn gamma_matrix<T: Real>(j: &RMatrix<T>, f: &RMatrix<T>, rank_tol: T) -> Result<Hermitian<T>> {
    let s = pinv_sqrt_psd(j, rank_tol)?;
    // Antisymmetric exactly; rounding grows with the condition number of `S`.
    let a = s.matmul(&f.antisymmetrized()).matmul(&s).antisymmetrized();
    let two = T::lit(2.0);
    Hermitian::new(CMatrix::from_fn(a.rows(), a.cols(), |r, c| {
        C::new(T::zero(), two * a[(r, c)])
    }))
}

pub fn gamma_spectrum<T: Real>(
    j: &QFIMatrix<T>,
    f: &CurvatureMatrix<T>,
    rank_tol: T,
) -> Result<GammaSpectrum<T>> {
    check_same_dim(&j.j, &f.f, "J and F")?;
    check_support(&j.j, &f.f, rank_tol, "F")?;
    let e = herm_eig(&gamma_matrix(&j.j, &f.f, rank_tol)?)?;
    let raw_gamma = e.max_abs_eigenvalue();
    if raw_gamma > T::one() + T::lit(GAMMA_CLAMP) {
        return Err(Error::NumericalInconsistency(format!(
            "characterization number {raw_gamma} exceeds 1"
        )));
    }
    let mut eigenvalues: Vec<T> = e
        .values
        .iter()
        .map(|&v| v.max(-T::one()).min(T::one()))
        .collect();
    eigenvalues.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal))
    });
    let gamma = eigenvalues.first().map_or(T::zero(), |v| v.abs());
    Ok(GammaSpectrum {
        eigenvalues,
        gamma,
        raw_gamma,
        rank: sym_rank(&j.j, rank_tol)?,
        inestimable_axes: inestimable_axes(&j.j, rank_tol)?,
    })
}

/// `C^S = Tr[W J⁺]`.
pub fn sld_crb_scalar<T: Real>(j: &QFIMatrix<T>, w: &WeightMatrix<T>, rank_tol: T) -> Result<T> {
    check_same_dim(&j.j, &w.w, "J and W")?;
    check_support(&j.j, &w.w, rank_tol, "W")?;
    Ok(w.w.matmul(&pinv_sym(&j.j, rank_tol)?).trace())
}

/// Fills a [`BoundReport`]; fails if the ordering chain is violated beyond `1e−9`.
pub fn holevo_sandwich<T: Real>(
    j: &QFIMatrix<T>,
    f: &CurvatureMatrix<T>,
    w: &WeightMatrix<T>,
    rank_tol: T,
) -> Result<BoundReport<T>> {
    let spectrum = gamma_spectrum(j, f, rank_tol)?;
    let cs = sld_crb_scalar(j, w, rank_tol)?;
    let jp = pinv_sym(&j.j, rank_tol)?;
    let sw = sqrt_psd(&w.w)?;
    let inner_m = sw.matmul(&jp).matmul(&f.f).matmul(&jp).matmul(&sw);
    let tn = trace_norm(&inner_m.to_complex())?;
    let attainable_qcrb = (w.kind == WeightKind::Qfim).then(|| attainable_qcrb(&spectrum));
    let report = BoundReport {
        theta: j.theta.clone(),
        j: j.j.clone(),
        f: f.f.clone(),
        w: w.clone(),
        sld_crb: cs,
        sandwich_mid: cs + tn,
        sandwich_gamma: (T::one() + spectrum.gamma) * cs,
        sandwich_two: cs + cs,
        attainable_qcrb,
        spectrum,
    };
    let tol = T::tol(ORDER_TOL) * cs.abs().max(T::one());
    if report.ordering_margin() < -tol {
        return Err(Error::NumericalInconsistency(format!(
            "bound ordering violated by {}",
            -report.ordering_margin()
        )));
    }
    if let Some(m) = report.attainable_margin() {
        if m < -tol {
            return Err(Error::NumericalInconsistency(format!(
                "attainable bound outside [C^S, (1+γ)C^S] by {}",
                -m
            )));
        }
    }
    Ok(report)
}

/// `C = Σ_i 2 / (1 + √(1 − γ_i²))` over the full spectrum.
///
/// Near `|γ_i| = 1` an input error `δ` in `γ_i` moves `C` by about `2√(2δ)`.
pub fn attainable_qcrb<T: Real>(spectrum: &GammaSpectrum<T>) -> T {
    let two = T::lit(2.0);
    spectrum
        .eigenvalues
        .iter()
        .map(|&g| {
            let g = g.abs().min(T::one());
            two / (T::one() + (T::one() - g * g).max(T::zero()).sqrt())
        })
        .sum()
}

/// `Tr[(Re √(1 + 2i J^{−1/2} F J^{−1/2}))^{−2}]`, the matrix form of the
/// attainable bound.
pub fn attainable_qcrb_matrix_form<T: Real>(
    j: &QFIMatrix<T>,
    f: &CurvatureMatrix<T>,
    rank_tol: T,
) -> Result<T> {
    check_same_dim(&j.j, &f.f, "J and F")?;
    let e = herm_eig(&gamma_matrix(&j.j, &f.f, rank_tol)?)?;
    let root = e.map_spectrum(|l| C::new((T::one() + l).max(T::zero()).sqrt(), T::zero()));
    let r = sym_eig(&root.re().symmetrized())?;
    if r.values.iter().any(|&l| l <= T::zero()) {
        return Err(Error::NumericalInconsistency(
            "real part of the square root is singular".into(),
        ));
    }
    Ok(r.values.iter().map(|&l| T::one() / (l * l)).sum())
}

/// Principal restriction of `J` and `F` to `axes`.
pub fn subspace<T: Real>(
    j: &QFIMatrix<T>,
    f: &CurvatureMatrix<T>,
    axes: &[usize],
) -> Result<(QFIMatrix<T>, CurvatureMatrix<T>)> {
    check_same_dim(&j.j, &f.f, "J and F")?;
    if axes.is_empty() {
        return Err(Error::InvalidInput(
            "subspace needs at least one axis".into(),
        ));
    }
    let d = j.dim();
    for (k, &a) in axes.iter().enumerate() {
        if a >= d {
            return Err(Error::IndexOutOfRange { index: a, dim: d });
        }
        if axes[..k].contains(&a) {
            return Err(Error::InvalidInput(format!(
                "axis {a} repeated in subspace"
            )));
        }
    }
    let theta = j.theta.select(axes)?;
    Ok((
        QFIMatrix::new(j.j.principal(axes), theta.clone())?,
        CurvatureMatrix::new(f.f.principal(axes), theta)?,
    ))
}

/// `g_μμ g_νν − ¼ F_μν² − g_μν²` from geometric data.
pub fn uncertainty_slack<T: Real>(
    g: &RMatrix<T>,
    f: &RMatrix<T>,
    mu: usize,
    nu: usize,
) -> Result<T> {
    check_same_dim(g, f, "g and F")?;
    let d = g.rows();
    if let Some(&bad) = [mu, nu].iter().find(|&&k| k >= d) {
        return Err(Error::IndexOutOfRange { index: bad, dim: d });
    }
    let q = T::lit(0.25);
    Ok(g[(mu, mu)] * g[(nu, nu)] - q * f[(mu, nu)] * f[(mu, nu)] - g[(mu, nu)] * g[(mu, nu)])
}

/// Robertson-Schrödinger slack
/// `⟨ΔG_μ²⟩⟨ΔG_ν²⟩ − ¼|⟨[G_μ, G_ν]⟩|² − Cov(G_μ, G_ν)²` at `θ`.
pub fn uncertainty_check<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
    mu: usize,
    nu: usize,
) -> Result<T> {
    model.check_domain(theta.values())?;
    let d = model.param_dim();
    if let Some(&bad) = [mu, nu].iter().find(|&&k| k >= d) {
        return Err(Error::IndexOutOfRange { index: bad, dim: d });
    }
    let gens = model
        .generators(theta.values())
        .ok_or(Error::MissingGenerators)?;
    let psi = model.amplitudes(theta.values());
    let vm = gens[mu].matrix().matvec(&psi);
    let vn = gens[nu].matrix().matvec(&psi);
    let em = inner(&psi, &vm).re;
    let en = inner(&psi, &vn).re;
    let var_m = inner(&vm, &vm).re - em * em;
    let var_n = inner(&vn, &vn).re - en * en;
    let mn = inner(&vm, &vn);
    // ⟨[G_μ, G_ν]⟩ = 2i Im⟨G_μ G_ν⟩.
    let cov = mn.re - em * en;
    Ok(var_m * var_n - mn.im * mn.im - cov * cov)
}

/// QGT, optional subspace restriction and the bound sandwich in one call.
pub fn evaluate_bounds<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
    opts: &TangentOptions<T>,
    axes: Option<&[usize]>,
    weight: WeightKind,
    rank_tol: T,
) -> Result<BoundReport<T>> {
    let (g, f) = split(&qgt(model, theta, opts)?);
    let j = qfim(&g)?;
    let (j, f) = match axes {
        Some(a) => subspace(&j, &f, a)?,
        None => (j, f),
    };
    let w = WeightMatrix::of_kind(weight, &j)?;
    holevo_sandwich(&j, &f, &w, rank_tol)
}
