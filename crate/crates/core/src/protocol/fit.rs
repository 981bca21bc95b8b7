use crate::error::{Error, Result};
use crate::matkernel::RMatrix;
use crate::scalar::Real;

use super::RabiTrace;

/// Acceptance thresholds for a Rabi fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig<T> {
    /// Largest accepted RMS residual of the fitted model.
    pub max_rms_residual: T,
    /// Smallest accepted oscillation contrast `A`; resonant traces cycle fully.
    pub min_contrast: T,
    /// Traces are decimated to at most this many samples.
    pub max_samples: usize,
    /// Peak-to-peak range below which a trace counts as constant.
    pub min_signal: T,
}

impl<T: Real> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            max_rms_residual: T::lit(0.05),
            min_contrast: T::lit(0.6),
            max_samples: 4000,
            min_signal: T::lit(1e-3),
        }
    }
}

/// `P(t) = A sin²(Ωt/2) + c` fitted by least squares.
#[derive(Clone, Debug, PartialEq)]
pub struct RabiFit<T> {
    pub omega: T,
    /// One standard deviation of `Ω` from the fit covariance.
    pub uncertainty: T,
    pub amplitude: T,
    pub offset: T,
    pub rms_residual: T,
    /// Number of Rabi periods covered by the trace.
    pub periods: T,
}

const PERIODOGRAM_OVERSAMPLE: usize = 8;
const PERIODOGRAM_MAX_CYCLES: usize = 200;
const PEAKS_TRIED: usize = 3;
const LM_MAX_ITER: usize = 200;

/// Fits the population of `level` (1 or 2).
///
/// The frequency seed comes from the periodogram peaks of the trace; each
/// peak and its half and double are refined by Levenberg-Marquardt and the
/// best fit kept.
pub fn fit_rabi<T: Real>(
    trace: &RabiTrace<T>,
    level: usize,
    cfg: &FitConfig<T>,
) -> Result<RabiFit<T>> {
    if level != 1 && level != 2 {
        return Err(Error::InvalidInput(format!(
            "target level must be 1 or 2, got {level}"
        )));
    }
    if trace.len() < 8 {
        return Err(Error::FitFailed(format!(
            "trace has only {} samples",
            trace.len()
        )));
    }
    let stride = trace.len().div_ceil(cfg.max_samples.max(8));
    let t: Vec<T> = trace.times.iter().step_by(stride).copied().collect();
    let y: Vec<T> = trace
        .populations
        .iter()
        .step_by(stride)
        .map(|p| p[level])
        .collect();
    let (lo, hi) = y
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !(hi - lo >= cfg.min_signal) {
        return Err(Error::FitFailed(format!(
            "level {level} population is constant (range {:.1e})",
            (hi - lo).to_f64().unwrap_or(f64::NAN)
        )));
    }
    let span = *t.last().expect("nonempty") - t[0];

    let mut best: Option<([T; 3], T)> = None;
    for peak in periodogram_peaks(&t, &y, span) {
        for factor in [0.5, 1.0, 2.0] {
            let start = [hi - lo, peak * T::lit(factor), lo];
            if let Some((p, sse)) = levenberg_marquardt(&t, &y, start) {
                if best.as_ref().is_none_or(|(_, b)| sse < *b) {
                    best = Some((p, sse));
                }
            }
        }
    }
    let (p, sse) = best.ok_or_else(|| Error::FitFailed("no fit converged".into()))?;
    let [amplitude, omega, offset] = p;
    let n = T::from_usize(y.len()).expect("sample count fits the scalar");
    let rms = (sse / n).sqrt();
    if !(rms <= cfg.max_rms_residual) {
        return Err(Error::FitFailed(format!(
            "RMS residual {rms} exceeds {}",
            cfg.max_rms_residual
        )));
    }
    if !(amplitude >= cfg.min_contrast) {
        return Err(Error::FitFailed(format!(
            "contrast {amplitude} below {}; the drive is off resonance",
            cfg.min_contrast
        )));
    }
    let jtj = normal_matrix(&t, p);
    let dof = (n - T::lit(3.0)).max(T::one());
    let var = sse / dof;
    let uncertainty = RMatrix::solve(&jtj, &[T::zero(), T::one(), T::zero()])
        .map(|col| (col[1] * var).abs().sqrt())
        .ok_or_else(|| Error::FitFailed("singular fit covariance".into()))?;
    Ok(RabiFit {
        omega,
        uncertainty,
        amplitude,
        offset,
        rms_residual: rms,
        periods: omega * span / (T::PI() + T::PI()),
    })
}

/// Frequencies of the strongest local maxima of `|Σ (y − ȳ) e^{−iωt}|²`,
/// refined by a parabola through each maximum and its neighbours.
fn periodogram_peaks<T: Real>(t: &[T], y: &[T], span: T) -> Vec<T> {
    let n = T::from_usize(y.len()).expect("sample count fits the scalar");
    let mean = y.iter().copied().sum::<T>() / n;
    let step = (T::PI() + T::PI()) / (T::lit(PERIODOGRAM_OVERSAMPLE as f64) * span);
    let count = PERIODOGRAM_OVERSAMPLE * PERIODOGRAM_MAX_CYCLES;
    let power: Vec<T> = (0..=count)
        .map(|j| {
            let w = step * T::from_usize(j).expect("grid index fits the scalar");
            let (mut re, mut im) = (T::zero(), T::zero());
            for (&ti, &yi) in t.iter().zip(y) {
                let (s, c) = (w * ti).sin_cos();
                re = re + (yi - mean) * c;
                im = im + (yi - mean) * s;
            }
            re * re + im * im
        })
        .collect();
    let mut peaks: Vec<(T, T)> = (1..count)
        .filter(|&j| power[j] >= power[j - 1] && power[j] > power[j + 1])
        .map(|j| {
            let (a, b, c) = (power[j - 1], power[j], power[j + 1]);
            let denom = a - b - b + c;
            let shift = if denom < T::zero() {
                T::lit(0.5) * (a - c) / denom
            } else {
                T::zero()
            };
            let idx = T::from_usize(j).expect("grid index fits the scalar") + shift;
            (idx * step, b)
        })
        .collect();
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<T> = peaks.into_iter().take(PEAKS_TRIED).map(|p| p.0).collect();
    if out.is_empty() {
        // Less than one cycle: seed with one period over the span.
        out.push((T::PI() + T::PI()) / span);
    }
    out
}

fn model<T: Real>(p: [T; 3], t: T) -> (T, [T; 3]) {
    let [a, w, _] = p;
    let half = T::lit(0.5);
    let (s, c) = (half * w * t).sin_cos();
    let s2 = s * s;
    (a * s2 + p[2], [s2, a * s * c * t, T::one()])
}

fn sse<T: Real>(t: &[T], y: &[T], p: [T; 3]) -> T {
    t.iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let r = yi - model(p, ti).0;
            r * r
        })
        .sum()
}

fn normal_matrix<T: Real>(t: &[T], p: [T; 3]) -> RMatrix<T> {
    let mut m = RMatrix::zeros(3, 3);
    for &ti in t {
        let (_, g) = model(p, ti);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = m[(i, j)] + g[i] * g[j];
            }
        }
    }
    m
}

fn levenberg_marquardt<T: Real>(t: &[T], y: &[T], start: [T; 3]) -> Option<([T; 3], T)> {
    let mut p = start;
    let mut cost = sse(t, y, p);
    let mut lambda = T::lit(1e-3);
    for _ in 0..LM_MAX_ITER {
        let mut jtj = RMatrix::zeros(3, 3);
        let mut jtr = [T::zero(); 3];
        for (&ti, &yi) in t.iter().zip(y) {
            let (f, g) = model(p, ti);
            let r = yi - f;
            for i in 0..3 {
                jtr[i] = jtr[i] + g[i] * r;
                for j in 0..3 {
                    jtj[(i, j)] = jtj[(i, j)] + g[i] * g[j];
                }
            }
        }
        let mut improved = false;
        while lambda < T::lit(1e12) {
            let mut a = jtj.clone();
            for i in 0..3 {
                a[(i, i)] = a[(i, i)] * (T::one() + lambda);
            }
            let Some(step) = a.solve(&jtr) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let c = sse(t, y, trial);
            if c.is_finite() && c <= cost {
                let done = cost - c
                    <= T::epsilon() * T::lit(16.0) * cost.max(T::min_positive_value())
                    || step.iter().zip(&trial).all(|(d, v)| {
                        d.abs() <= T::epsilon() * T::lit(16.0) * v.abs().max(T::one())
                    });
                p = trial;
                cost = c;
                lambda = (lambda * T::lit(0.1)).max(T::lit(1e-12));
                improved = !done;
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    if !(p[1] > T::zero()) {
        p[1] = p[1].abs();
    }
    (p[1] > T::zero() && cost.is_finite()).then_some((p, cost))
}
