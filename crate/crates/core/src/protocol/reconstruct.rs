use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureMatrix, MetricTensor};
use crate::matkernel::RMatrix;
use crate::models::{ParameterPoint, StateVector};
use crate::scalar::{Real, C};

use super::evolve::MAX_STEPS;
use super::{
    build_hamiltonian, evolve, fit_rabi, FitConfig, ModulationConfig, PhaseMode, RabiTrace,
    SynthHamiltonian,
};

/// Sign `σ` in `Σ_k (Ω_k/Δ_k)² = m_μ²g_μμ + m_ν²g_νν + σ m_μ m_ν F_μν` for an
/// out-of-phase run with `μ` on `sin ωt` and `ν` on `cos ωt`.
///
/// Calibrated against the direct tensor on the qutrit at `α = π/4`.
pub const OUT_OF_PHASE_SIGN: f64 = 1.0;

/// A transition whose population never exceeds this is recorded as dark.
pub const DARK_POPULATION: f64 = 0.05;

/// Rabi rates below this fraction of `m Δ_k` are not resolved by run length.
const RABI_FLOOR: f64 = 0.1;

/// Relative systematic floor on each fitted Rabi frequency.
pub const SYSTEMATIC_FLOOR: f64 = 0.01;

/// Steps used when no Rabi rate is expected at all.
const NOMINAL_STEPS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig<T> {
    pub gaps: (T, T),
    /// Modulation amplitude per model axis.
    pub amplitudes: Vec<T>,
    pub fit: FitConfig<T>,
    /// Expected Rabi periods per run.
    pub periods: T,
    /// Integration step; `None` selects [`ModulationConfig::default_dt`].
    pub dt: Option<T>,
    /// Standard deviation of additive Gaussian readout noise on the fitted
    /// population; zero disables it.
    pub readout_noise: T,
    /// Seeds the readout noise; run `i` draws from stream `i`.
    pub seed: u64,
}

impl<T: Real> ProtocolConfig<T> {
    /// Equal amplitude `m` on all three axes.
    pub fn new(gaps: (T, T), m: T) -> Self {
        Self {
            gaps,
            amplitudes: vec![m; 3],
            fit: FitConfig::default(),
            periods: T::lit(3.0),
            dt: None,
            readout_noise: T::zero(),
            seed: 0,
        }
    }
}

/// One simulated modulation run and its fitted Rabi frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord<T> {
    pub axes: Vec<usize>,
    pub phase_mode: PhaseMode,
    pub omega: T,
    pub transition: usize,
    pub predicted_rabi: T,
    pub fitted_rabi: T,
    pub uncertainty: T,
    pub dark: bool,
    pub steps: usize,
    pub max_norm_drift: T,
}

/// Metric and curvature reconstructed from Rabi frequencies.
#[derive(Clone, Debug)]
pub struct Reconstruction<T: Real> {
    pub theta0: ParameterPoint<T>,
    pub gaps: (T, T),
    pub amplitudes: Vec<T>,
    pub runs: Vec<RunRecord<T>>,
    pub g: MetricTensor<T>,
    pub f: CurvatureMatrix<T>,
    pub g_uncertainty: RMatrix<T>,
    pub f_uncertainty: RMatrix<T>,
}

/// Serializable summary of a [`Reconstruction`].
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub theta0: Vec<f64>,
    pub gaps: [f64; 2],
    pub amplitudes: Vec<f64>,
    pub runs: Vec<RunRecord<f64>>,
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
    pub g_uncertainty: Vec<Vec<f64>>,
    #[serde(rename = "F_uncertainty")]
    pub f_uncertainty: Vec<Vec<f64>>,
}

fn rows<T: Real>(m: &RMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v.to_f64_lossy()).collect())
        .collect()
}

impl<T: Real> Reconstruction<T> {
    pub fn report(&self) -> ProtocolReport {
        let lossy = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
        ProtocolReport {
            theta0: lossy(self.theta0.values()),
            gaps: [self.gaps.0.to_f64_lossy(), self.gaps.1.to_f64_lossy()],
            amplitudes: lossy(&self.amplitudes),
            runs: self
                .runs
                .iter()
                .map(|r| RunRecord {
                    axes: r.axes.clone(),
                    phase_mode: r.phase_mode,
                    omega: r.omega.to_f64_lossy(),
                    transition: r.transition,
                    predicted_rabi: r.predicted_rabi.to_f64_lossy(),
                    fitted_rabi: r.fitted_rabi.to_f64_lossy(),
                    uncertainty: r.uncertainty.to_f64_lossy(),
                    dark: r.dark,
                    steps: r.steps,
                    max_norm_drift: r.max_norm_drift.to_f64_lossy(),
                })
                .collect(),
            g: rows(&self.g.g),
            f: rows(&self.f.f),
            g_uncertainty: rows(&self.g_uncertainty),
            f_uncertainty: rows(&self.f_uncertainty),
        }
    }
}

#[derive(Clone, Debug)]
struct RunSpec {
    axes: Vec<usize>,
    mode: PhaseMode,
    level: usize,
}

impl std::fmt::Display for RunSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} run on axes {:?} at gap {}",
            self.mode, self.axes, self.level
        )
    }
}

fn run_specs() -> Vec<RunSpec> {
    let mut specs = Vec::with_capacity(24);
    let mut push = |axes: Vec<usize>, mode| {
        for level in [1, 2] {
            specs.push(RunSpec {
                axes: axes.clone(),
                mode,
                level,
            });
        }
    };
    for mu in 0..3 {
        push(vec![mu], PhaseMode::Single);
    }
    for mu in 0..3 {
        for nu in mu + 1..3 {
            push(vec![mu, nu], PhaseMode::InPhase);
        }
    }
    for mu in 0..3 {
        for nu in 0..3 {
            if mu != nu {
                push(vec![mu, nu], PhaseMode::OutOfPhase);
            }
        }
    }
    specs
}

/// Rotating-wave Rabi rate predicted from the matrix elements of `∂H`.
fn predicted_rabi<T: Real>(ham: &SynthHamiltonian<T>, spec: &RunSpec, amps: &[T]) -> T {
    let c = |k: usize| {
        let a = spec.axes[k];
        ham.coupling(spec.level, a) * C::new(amps[a], T::zero())
    };
    match spec.mode {
        PhaseMode::Single => c(0).norm(),
        PhaseMode::InPhase => (c(0) + c(1)).norm(),
        // The `e^{−iωt}` component of `m_μ sin ωt ∂_μH + m_ν cos ωt ∂_νH`.
        PhaseMode::OutOfPhase => (c(1) + c(0) * C::new(T::zero(), T::one())).norm(),
    }
}

fn run_one<T: Real>(
    ham: &SynthHamiltonian<T>,
    index: usize,
    spec: &RunSpec,
    cfg: &ProtocolConfig<T>,
    psi0: &StateVector<T>,
) -> Result<RunRecord<T>> {
    let gap = ham.gap(spec.level);
    let amps: Vec<T> = spec.axes.iter().map(|&a| cfg.amplitudes[a]).collect();
    let scale = amps.iter().fold(T::zero(), |m, a| m.max(a.abs())) * gap;
    let predicted = predicted_rabi(ham, spec, &cfg.amplitudes);
    let dt = cfg
        .dt
        .unwrap_or_else(|| ModulationConfig::default_dt(ham.gaps, gap));
    let two_pi = T::PI() + T::PI();
    let max_duration = dt * T::from_usize(MAX_STEPS).expect("step cap fits the scalar");
    let resolved = predicted.max(T::lit(RABI_FLOOR) * scale);
    let mut duration = if resolved > T::zero() {
        (cfg.periods * two_pi / resolved).min(max_duration)
    } else {
        dt * T::from_usize(NOMINAL_STEPS).expect("nominal steps fit the scalar")
    };

    let mut rerun = false;
    loop {
        let modulation = ModulationConfig {
            axes: spec.axes.clone(),
            amplitudes: amps.clone(),
            phase_mode: spec.mode,
            omega: gap,
            duration,
            dt,
        };
        let clean = evolve(ham, &modulation, psi0)?;
        let trace = with_readout_noise(&clean, spec.level, cfg, index)?;
        let record = |fitted: T, unc: T, dark: bool| RunRecord {
            axes: spec.axes.clone(),
            phase_mode: spec.mode,
            omega: gap,
            transition: spec.level,
            predicted_rabi: predicted,
            fitted_rabi: fitted,
            uncertainty: unc,
            dark,
            steps: trace.len() - 1,
            max_norm_drift: trace.max_norm_drift,
        };
        let peak = clean.level(spec.level).into_iter().fold(T::zero(), T::max);
        if scale > T::zero() && peak < T::lit(DARK_POPULATION) {
            // `sin²(ΩT/2) < P_dark` over the whole run bounds `Ω`.
            let bound = T::lit(2.0) * T::lit(DARK_POPULATION).sqrt().asin() / trace.duration();
            return Ok(record(T::zero(), bound, true));
        }
        let fit = fit_rabi(&trace, spec.level, &cfg.fit).map_err(|e| match e {
            Error::FitFailed(m) => Error::FitFailed(format!("{spec}: {m}")),
            other => other,
        })?;
        if fit.periods < T::lit(2.0) && !rerun && duration < max_duration {
            duration = (cfg.periods * two_pi / fit.omega).min(max_duration);
            rerun = true;
            continue;
        }
        let unc = fit.uncertainty.max(T::lit(SYSTEMATIC_FLOOR) * fit.omega);
        return Ok(record(fit.omega, unc, false));
    }
}

fn with_readout_noise<T: Real>(
    trace: &RabiTrace<T>,
    level: usize,
    cfg: &ProtocolConfig<T>,
    index: usize,
) -> Result<RabiTrace<T>> {
    let mut noisy = trace.clone();
    let sigma = cfg.readout_noise.to_f64_lossy();
    if sigma == 0.0 {
        return Ok(noisy);
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidInput(format!("readout noise {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    for p in &mut noisy.populations {
        p[level] = p[level] + T::lit(normal.sample(&mut rng));
    }
    Ok(noisy)
}

/// Weighted squared rate `Σ_k (Ω_k/Δ_k)²` of a run pair and its propagated
/// standard deviation.
fn strength<T: Real>(pair: [&RunRecord<T>; 2]) -> (T, T) {
    pair.iter().fold((T::zero(), T::zero()), |(s, v), r| {
        let x = r.fitted_rabi / r.omega;
        let sx = r.uncertainty / r.omega;
        // A dark run contributes at most its bound squared.
        let dev = if r.dark {
            sx * sx
        } else {
            T::lit(2.0) * x * sx
        };
        (s + x * x, v + dev * dev)
    })
}

/// Reconstructs `g` and `F` of the qutrit at `θ0` from 24 simulated runs.
///
/// For each axis both gaps are driven singly; for each pair in phase; for
/// each ordered pair out of phase. `F_μν` and `F_νμ` are measured
/// independently and must be antisymmetric within five standard deviations.
pub fn reconstruct_qgt<T: Real>(
    theta0: &ParameterPoint<T>,
    cfg: &ProtocolConfig<T>,
) -> Result<Reconstruction<T>> {
    if cfg.amplitudes.len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "{} modulation amplitudes for three axes",
            cfg.amplitudes.len()
        )));
    }
    let m_max = cfg.amplitudes.iter().fold(T::zero(), |m, a| m.max(a.abs()));
    let ham = build_hamiltonian(theta0, cfg.gaps, m_max)?;
    let psi0 = StateVector::new(ham.ground_state().to_vec())?;
    let specs = run_specs();
    let runs: Vec<RunRecord<T>> = specs
        .par_iter()
        .enumerate()
        .map(|(i, s)| run_one(&ham, i, s, cfg, &psi0))
        .collect::<Result<_>>()?;

    let find = |axes: &[usize], mode: PhaseMode| -> [&RunRecord<T>; 2] {
        let mut it = runs
            .iter()
            .filter(|r| r.axes == axes && r.phase_mode == mode);
        [
            it.next().expect("level 1 run"),
            it.next().expect("level 2 run"),
        ]
    };
    let m = &cfg.amplitudes;
    let mut g = RMatrix::zeros(3, 3);
    let mut gu = RMatrix::zeros(3, 3);
    for mu in 0..3 {
        let (s, v) = strength(find(&[mu], PhaseMode::Single));
        let m2 = m[mu] * m[mu];
        g[(mu, mu)] = s / m2;
        gu[(mu, mu)] = v.sqrt() / m2;
    }
    let mut f = RMatrix::zeros(3, 3);
    let mut fu = RMatrix::zeros(3, 3);
    let sigma = T::lit(OUT_OF_PHASE_SIGN);
    let two = T::lit(2.0);
    for mu in 0..3 {
        for nu in mu + 1..3 {
            let mm = m[mu] * m[nu];
            let diag = m[mu] * m[mu] * g[(mu, mu)] + m[nu] * m[nu] * g[(nu, nu)];
            let base = |s: T| s - diag;
            let base_var =
                (m[mu] * m[mu] * gu[(mu, mu)]).powi(2) + (m[nu] * m[nu] * gu[(nu, nu)]).powi(2);

            let (sp, vp) = strength(find(&[mu, nu], PhaseMode::InPhase));
            g[(mu, nu)] = base(sp) / (two * mm);
            g[(nu, mu)] = g[(mu, nu)];
            gu[(mu, nu)] = (vp + base_var).sqrt() / (two * mm).abs();
            gu[(nu, mu)] = gu[(mu, nu)];

            let (s1, v1) = strength(find(&[mu, nu], PhaseMode::OutOfPhase));
            let (s2, v2) = strength(find(&[nu, mu], PhaseMode::OutOfPhase));
            let f_mn = sigma * base(s1) / mm;
            let f_nm = sigma * base(s2) / mm;
            let residual = (f_mn + f_nm).abs();
            let residual_sd = (v1 + v2 + T::lit(4.0) * base_var).sqrt() / mm.abs();
            if residual > T::lit(5.0) * residual_sd {
                return Err(Error::InconsistentReconstruction(format!(
                    "F[{mu}][{nu}] = {f_mn} and F[{nu}][{mu}] = {f_nm} differ from \
                     antisymmetry by {residual}, more than 5 x {residual_sd}"
                )));
            }
            // The single-axis terms cancel in the antisymmetric part.
            f[(mu, nu)] = (f_mn - f_nm) / two;
            f[(nu, mu)] = -f[(mu, nu)];
            fu[(mu, nu)] = (v1 + v2).sqrt() / (two * mm.abs());
            fu[(nu, mu)] = fu[(mu, nu)];
        }
    }
    Ok(Reconstruction {
        theta0: theta0.clone(),
        gaps: cfg.gaps,
        amplitudes: cfg.amplitudes.clone(),
        runs,
        g: MetricTensor::new(g, theta0.clone())?,
        f: CurvatureMatrix::new(f, theta0.clone())?,
        g_uncertainty: gu,
        f_uncertainty: fu,
    })
}
