use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matkernel::RMatrix;
use crate::models::{DiffScheme, StateModel, TangentOptions};
use crate::scalar::Real;

use super::qgt;

/// Generalized 3-form curvature
/// `H = √(J_φφ F_αβ² + J_ββ F_αφ² − 2 J_βφ F_αβ F_αφ)` for `axes = (α, β, φ)`.
///
/// The radicand is a quadratic form in the `(β, φ)` block of `J`, so it is
/// nonnegative up to rounding; values down to `−1e−12` (relative) clamp to zero.
pub fn three_form<T: Real>(j: &RMatrix<T>, f: &RMatrix<T>, axes: [usize; 3]) -> Result<T> {
    if j.rows() != 3 || !j.is_square() || f.rows() != 3 || !f.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "three-form needs 3x3 J and F, got {}x{} and {}x{}",
            j.rows(),
            j.cols(),
            f.rows(),
            f.cols()
        )));
    }
    let mut seen = [false; 3];
    for &a in &axes {
        if a >= 3 {
            return Err(Error::IndexOutOfRange { index: a, dim: 3 });
        }
        if std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidInput(format!(
                "axes {axes:?} repeat an index"
            )));
        }
    }
    let [a, b, p] = axes;
    let (fab, fap) = (f[(a, b)], f[(a, p)]);
    let r = j[(p, p)] * fab * fab + j[(b, b)] * fap * fap - T::lit(2.0) * j[(b, p)] * fab * fap;
    let scale = j.max_abs() * f.max_abs() * f.max_abs();
    if r < -T::tol(1e-12) * scale.max(T::one()) {
        return Err(Error::NumericalInconsistency(format!(
            "three-form radicand {r} is negative"
        )));
    }
    Ok(r.max(T::zero()).sqrt())
}

fn close<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::tol(1e-12) * b.abs().max(T::one())
}

/// Domain error naming `axis` of `model`, or the parameter count when absent.
fn domain_error<T: Real, M: StateModel<T> + ?Sized>(model: &M, axis: usize) -> Error {
    match model.axes().get(axis) {
        Some(a) => {
            let (lo, hi) = a
                .bounds
                .map(|(l, h)| (l.to_f64_lossy(), h.to_f64_lossy()))
                .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            Error::Domain {
                axis: a.label.clone(),
                value: f64::NAN,
                lower: lo,
                upper: hi,
            }
        }
        None => Error::DimensionMismatch(format!(
            "model `{}` has {} parameters",
            model.name(),
            model.param_dim()
        )),
    }
}

/// Checks a closed first axis `[0, upper]` followed by `periodic` axes of period 2π.
fn check_sphere_domain<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    upper: T,
    periodic: usize,
) -> Result<()> {
    let axes = model.axes();
    if axes.len() != 1 + periodic {
        return Err(domain_error(model, usize::MAX));
    }
    match axes[0].bounds {
        Some((lo, hi)) if close(lo, T::zero()) && close(hi, upper) => {}
        _ => return Err(domain_error(model, 0)),
    }
    let two_pi = T::PI() + T::PI();
    match axes[1..]
        .iter()
        .position(|a| !matches!(a.period, Some(p) if close(p, two_pi)))
    {
        Some(k) => Err(domain_error(model, k + 1)),
        None => Ok(()),
    }
}

fn midpoints<T: Real>(n: usize, span: T) -> (Vec<T>, T) {
    let h = span / T::lit(n as f64);
    let pts = (0..n)
        .map(|i| (T::lit(i as f64) + T::lit(0.5)) * h)
        .collect();
    (pts, h)
}

fn check_grid(grid: &[usize]) -> Result<()> {
    if grid.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "grid {grid:?} has an empty axis"
        )));
    }
    Ok(())
}

/// Sums in index order so the result does not depend on thread scheduling.
fn ordered_sum<T: Real>(values: Vec<T>) -> T {
    values.into_iter().fold(T::zero(), |a, b| a + b)
}

/// First Chern number `(1/2π) ∫ F_θφ dθ dφ` over `θ ∈ [0, π]`, `φ ∈ [0, 2π)`
/// by the midpoint rule.
pub fn chern_number<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    grid: (usize, usize),
) -> Result<T> {
    check_grid(&[grid.0, grid.1])?;
    check_sphere_domain(model, T::PI(), 1)?;
    let two_pi = T::PI() + T::PI();
    let (ths, dth) = midpoints(grid.0, T::PI());
    let (phs, dph) = midpoints(grid.1, two_pi);
    let opts = TangentOptions::with_scheme(DiffScheme::Analytic);
    let values = (0..grid.0 * grid.1)
        .into_par_iter()
        .map(|k| {
            let th = model.point(&[ths[k / grid.1], phs[k % grid.1]])?;
            Ok(qgt(model, &th, &opts)?.curvature().f[(0, 1)])
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ordered_sum(values) * dth * dph / two_pi)
}

/// Dixmier-Douady invariant `(1/2π²) ∫ H dα dβ dφ` over `α ∈ [0, π/2]`,
/// `β, φ ∈ [0, 2π)` by the midpoint rule, with `H` from [`three_form`].
pub fn dd_invariant<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    grid: (usize, usize, usize),
) -> Result<T> {
    check_grid(&[grid.0, grid.1, grid.2])?;
    check_sphere_domain(model, T::FRAC_PI_2(), 2)?;
    let two_pi = T::PI() + T::PI();
    let (als, dal) = midpoints(grid.0, T::FRAC_PI_2());
    let (bes, dbe) = midpoints(grid.1, two_pi);
    let (phs, dph) = midpoints(grid.2, two_pi);
    let opts = TangentOptions::with_scheme(DiffScheme::Analytic);
    let plane = grid.1 * grid.2;
    let values = (0..grid.0 * plane)
        .into_par_iter()
        .map(|k| {
            let v = [als[k / plane], bes[(k % plane) / grid.2], phs[k % grid.2]];
            let q = qgt(model, &model.point(&v)?, &opts)?;
            let j = q.metric().g.scale(T::lit(4.0));
            three_form(&j, &q.curvature().f, [0, 1, 2])
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ordered_sum(values) * dal * dbe * dph / (T::PI() * T::PI() * T::lit(2.0)))
}
