//! Simulated modulated-drive Rabi spectroscopy of the qutrit model.
//!
//! A Hamiltonian `H(θ) = Δ1|ψ1(θ)⟩⟨ψ1(θ)| + Δ2|ψ2(θ)⟩⟨ψ2(θ)|` keeps the model
//! state `ψ0(θ)` as its zero-energy ground state. Weak periodic modulation of
//! θ around `θ0` at a gap frequency drives Rabi oscillations out of `ψ0`
//! whose rates encode the quantum geometric tensor.

mod evolve;
mod fit;
mod reconstruct;

pub use evolve::{evolve, RabiTrace, MAX_NORM_DRIFT};
pub use fit::{fit_rabi, FitConfig, RabiFit};
pub use reconstruct::{
    reconstruct_qgt, ProtocolConfig, ProtocolReport, Reconstruction, RunRecord, OUT_OF_PHASE_SIGN,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{outer, CMatrix, Hermitian};
use crate::models::{qutrit_frame_unchecked, qutrit_model, ParameterPoint, StateModel};
use crate::scalar::{Real, C};

/// Largest modulation amplitude accepted, in radians.
pub const MAX_AMPLITUDE: f64 = 0.1;

/// Fractional window around a gap within which a drive counts as resonant.
pub const RESONANCE_WINDOW: f64 = 0.2;

/// Qutrit Hamiltonian with the model eigenframe and energies `(0, Δ1, Δ2)`.
#[derive(Clone, Debug)]
pub struct SynthHamiltonian<T: Real> {
    pub theta0: ParameterPoint<T>,
    pub gaps: (T, T),
    /// `ψ0, ψ1, ψ2` at `θ0`.
    pub frame: [Vec<C<T>>; 3],
}

/// Checks the point and gaps; `|Δ1 − Δ2|` must exceed ten times the largest
/// Rabi rate `max_amplitude · max(Δ1, Δ2)` the modulation can produce.
pub fn build_hamiltonian<T: Real>(
    theta0: &ParameterPoint<T>,
    gaps: (T, T),
    max_amplitude: T,
) -> Result<SynthHamiltonian<T>> {
    qutrit_model::<T>().check_domain(theta0.values())?;
    let (d1, d2) = gaps;
    if !(d1 > T::zero() && d2 > T::zero()) || !d1.is_finite() || !d2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "gaps must be positive, got ({d1}, {d2})"
        )));
    }
    let linewidth = max_amplitude.abs() * d1.max(d2);
    if (d1 - d2).abs() < T::lit(10.0) * linewidth || d1 == d2 {
        return Err(Error::DegenerateGaps(format!(
            "|Δ1 − Δ2| = {} against a Rabi linewidth of {linewidth}",
            (d1 - d2).abs()
        )));
    }
    Ok(SynthHamiltonian {
        theta0: theta0.clone(),
        gaps,
        frame: qutrit_frame_unchecked(theta0.values()),
    })
}

impl<T: Real> SynthHamiltonian<T> {
    /// `H(θ)` at arbitrary angles.
    pub fn matrix(&self, values: &[T]) -> CMatrix<T> {
        let [_, p1, p2] = qutrit_frame_unchecked(values);
        outer(&p1, &p1)
            .scale(C::new(self.gaps.0, T::zero()))
            .add(&outer(&p2, &p2).scale(C::new(self.gaps.1, T::zero())))
    }

    pub fn hermitian(&self, values: &[T]) -> Result<Hermitian<T>> {
        Hermitian::new(self.matrix(values))
    }

    pub fn gap(&self, level: usize) -> T {
        if level == 1 {
            self.gaps.0
        } else {
            self.gaps.1
        }
    }

    pub fn ground_state(&self) -> &[C<T>] {
        &self.frame[0]
    }

    /// `⟨ψ_k(θ0)|∂_μH|ψ0(θ0)⟩` by central differences of `H`.
    pub fn coupling(&self, level: usize, axis: usize) -> C<T> {
        let h = T::lit(1e-5);
        let mut plus = self.theta0.values().to_vec();
        let mut minus = plus.clone();
        plus[axis] = plus[axis] + h;
        minus[axis] = minus[axis] - h;
        let dh = self
            .matrix(&plus)
            .sub(&self.matrix(&minus))
            .scale(C::new(T::one() / (h + h), T::zero()));
        dh.sandwich(&self.frame[level], &self.frame[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    Single,
    InPhase,
    /// First axis on `sin ωt`, second on `cos ωt`.
    OutOfPhase,
}

impl std::fmt::Display for PhaseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Single => "single",
            Self::InPhase => "in-phase",
            Self::OutOfPhase => "out-of-phase",
        })
    }
}

/// `θ_μ(t) = θ0_μ + m_μ sin ωt` on the first axis; the second axis follows
/// `sin ωt` (in phase) or `cos ωt` (out of phase).
#[derive(Clone, Debug, PartialEq)]
pub struct ModulationConfig<T> {
    pub axes: Vec<usize>,
    pub amplitudes: Vec<T>,
    pub phase_mode: PhaseMode,
    pub omega: T,
    pub duration: T,
    /// Integration and sampling step.
    pub dt: T,
}

impl<T: Real> ModulationConfig<T> {
    /// Default step `2π / (100 · max(Δ2, ω))`.
    pub fn default_dt(gaps: (T, T), omega: T) -> T {
        (T::PI() + T::PI()) / (T::lit(100.0) * gaps.0.max(gaps.1).max(omega))
    }

    pub fn validate(&self, gaps: (T, T)) -> Result<()> {
        let expected = match self.phase_mode {
            PhaseMode::Single => 1,
            PhaseMode::InPhase | PhaseMode::OutOfPhase => 2,
        };
        if self.axes.len() != expected || self.amplitudes.len() != expected {
            return Err(Error::InvalidInput(format!(
                "{} modulation needs {expected} axes and amplitudes",
                self.phase_mode
            )));
        }
        if let Some(&bad) = self.axes.iter().find(|&&a| a >= 3) {
            return Err(Error::IndexOutOfRange { index: bad, dim: 3 });
        }
        if expected == 2 && self.axes[0] == self.axes[1] {
            return Err(Error::InvalidInput("modulated axes must differ".into()));
        }
        if let Some(m) = self
            .amplitudes
            .iter()
            .find(|m| !(m.abs() <= T::lit(MAX_AMPLITUDE)))
        {
            return Err(Error::InvalidInput(format!(
                "modulation amplitude {m} exceeds {MAX_AMPLITUDE}"
            )));
        }
        let window = T::lit(RESONANCE_WINDOW);
        let near = |d: T| (self.omega - d).abs() <= window * d;
        if !near(gaps.0) && !near(gaps.1) {
            return Err(Error::InvalidInput(format!(
                "drive frequency {} is not within 20% of a gap",
                self.omega
            )));
        }
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            return Err(Error::InvalidInput(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        let max_dt = (T::PI() + T::PI()) / (T::lit(50.0) * gaps.0.max(gaps.1).max(self.omega));
        if !(self.dt > T::zero()) || self.dt > max_dt {
            return Err(Error::StepTooLarge(format!(
                "dt = {} must lie in (0, {max_dt}]",
                self.dt
            )));
        }
        Ok(())
    }

    /// Parameter values at time `t`.
    pub fn theta_at(&self, theta0: &[T], t: T) -> Vec<T> {
        let mut v = theta0.to_vec();
        let (s, c) = (self.omega * t).sin_cos();
        v[self.axes[0]] = v[self.axes[0]] + self.amplitudes[0] * s;
        if self.axes.len() == 2 {
            let w = if self.phase_mode == PhaseMode::OutOfPhase {
                c
            } else {
                s
            };
            v[self.axes[1]] = v[self.axes[1]] + self.amplitudes[1] * w;
        }
        v
    }
}
