use crate::error::{Error, Result};
use crate::matkernel::{inner, norm, Hermitian};
use crate::models::StateVector;
use crate::scalar::{ci, cr, Real, C};

use super::{ModulationConfig, SynthHamiltonian};

/// Largest tolerated `|‖ψ‖ − 1|` over a run.
pub const MAX_NORM_DRIFT: f64 = 1e-8;

/// Hard cap on integration steps per run.
pub const MAX_STEPS: usize = 1_000_000;

/// Populations `P_k(t) = |⟨ψ_k(θ0)|ψ(t)⟩|²` sampled every `dt`.
#[derive(Clone, Debug)]
pub struct RabiTrace<T> {
    pub times: Vec<T>,
    /// `[P0, P1, P2]` per sample.
    pub populations: Vec<[T; 3]>,
    pub max_norm_drift: T,
}

impl<T: Real> RabiTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn level(&self, k: usize) -> Vec<T> {
        self.populations.iter().map(|p| p[k]).collect()
    }

    pub fn duration(&self) -> T {
        self.times.last().copied().unwrap_or_else(T::zero)
    }
}

/// Integrates `i dψ/dt = H(θ(t)) ψ` with the fourth-order Magnus scheme.
///
/// Each step samples `H` at the two Gauss-Legendre nodes and applies
/// `exp(−i[(h/2)(H1 + H2) − i(√3/12)h²[H2, H1]])`, which is unitary by
/// construction. The norm is audited, never renormalized.
pub fn evolve<T: Real>(
    ham: &SynthHamiltonian<T>,
    modulation: &ModulationConfig<T>,
    psi_init: &StateVector<T>,
) -> Result<RabiTrace<T>> {
    modulation.validate(ham.gaps)?;
    if psi_init.dim() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "initial state of dimension {} for a three-level Hamiltonian",
            psi_init.dim()
        )));
    }
    let h = modulation.dt;
    let steps = (modulation.duration / h)
        .round()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);
    if steps > MAX_STEPS {
        return Err(Error::InvalidInput(format!(
            "run needs {steps} steps, more than the cap of {MAX_STEPS}"
        )));
    }

    let theta0 = ham.theta0.values();
    let half = T::lit(0.5);
    let node = T::lit(3.0).sqrt() / T::lit(6.0);
    let (c1, c2) = (half - node, half + node);
    let comm_coeff = ci(-(T::lit(3.0).sqrt() / T::lit(12.0)) * h * h);

    let record = |psi: &[C<T>]| -> [T; 3] {
        let mut p = [T::zero(); 3];
        for (k, slot) in p.iter_mut().enumerate() {
            *slot = inner(&ham.frame[k], psi).norm_sqr();
        }
        p
    };

    let mut psi = psi_init.amplitudes().to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut populations = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    populations.push(record(&psi));
    let mut drift = T::zero();
    for n in 0..steps {
        let t = T::from_usize(n).expect("step index fits the scalar") * h;
        let h1 = ham.matrix(&modulation.theta_at(theta0, t + c1 * h));
        let h2 = ham.matrix(&modulation.theta_at(theta0, t + c2 * h));
        let k = h1
            .add(&h2)
            .scale(cr(half * h))
            .add(&h2.commutator(&h1).scale(comm_coeff));
        let u = Hermitian::new(k.hermitian_part())?
            .eig()?
            .exp_neg_i(T::one());
        psi = u.matvec(&psi);
        drift = drift.max((norm(&psi) - T::one()).abs());
        times.push(t + h);
        populations.push(record(&psi));
    }
    if !(drift <= T::tol(MAX_NORM_DRIFT)) {
        return Err(Error::StepTooLarge(format!(
            "norm drift {drift} exceeds {MAX_NORM_DRIFT}"
        )));
    }
    Ok(RabiTrace {
        times,
        populations,
        max_norm_drift: drift,
    })
}
