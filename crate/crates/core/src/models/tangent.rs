use crate::error::{Error, Result};
use crate::matkernel::inner;
use crate::scalar::{Real, C};

use super::{ParameterPoint, StateModel};

/// How `|∂_μψ⟩` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiffScheme {
    /// The model's closed-form tangent; falls back to `Richardson` if absent.
    Analytic,
    /// Second-order central difference.
    Central2,
    /// Richardson-extrapolated central difference, `(4 D(h/2) − D(h)) / 3`.
    Richardson,
}

impl std::str::FromStr for DiffScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "central2" | "central-2" => Ok(Self::Central2),
            "richardson" | "central-4-richardson" => Ok(Self::Richardson),
            _ => Err(Error::InvalidInput(format!(
                "unknown scheme `{s}` (expected analytic, central2 or richardson)"
            ))),
        }
    }
}

impl std::fmt::Display for DiffScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Central2 => "central2",
            Self::Richardson => "richardson",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentOptions<T> {
    pub scheme: DiffScheme,
    pub step: T,
    /// Rotate each stencil state by a global phase so that its overlap with
    /// `ψ(θ)` is real and nonnegative before differencing.
    pub gauge_fix: bool,
}

impl<T: Real> Default for TangentOptions<T> {
    fn default() -> Self {
        Self {
            scheme: DiffScheme::Richardson,
            step: T::lit(1e-3),
            gauge_fix: true,
        }
    }
}

impl<T: Real> TangentOptions<T> {
    pub fn with_scheme(scheme: DiffScheme) -> Self {
        Self {
            scheme,
            ..Self::default()
        }
    }

    pub fn raw(mut self) -> Self {
        self.gauge_fix = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T> {
    pub amplitudes: Vec<C<T>>,
    pub axis: usize,
    /// Scheme actually used.
    pub scheme: DiffScheme,
    pub step: T,
    /// True when a one-sided stencil replaced the central one near a bound.
    pub one_sided: bool,
    /// `max|D(h/2) − D(h)| / 3` for Richardson, absent otherwise.
    pub error_estimate: Option<T>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stencil {
    Central,
    Forward,
    Backward,
}

/// `|∂_axis ψ(θ)⟩` by the requested scheme.
///
/// Near a closed bound the central stencil is replaced by a one-sided
/// second-order one; a domain narrower than `2h` is a [`Error::Domain`].
pub fn tangent<T: Real, M: StateModel<T> + ?Sized>(
    model: &M,
    theta: &ParameterPoint<T>,
    axis: usize,
    opts: &TangentOptions<T>,
) -> Result<TangentVector<T>> {
    let d = model.param_dim();
    if axis >= d {
        return Err(Error::IndexOutOfRange {
            index: axis,
            dim: d,
        });
    }
    model.check_domain(theta.values())?;

    if opts.scheme == DiffScheme::Analytic {
        if let Some(t) = model.analytic_tangent(theta.values(), axis) {
            return Ok(TangentVector {
                amplitudes: t,
                axis,
                scheme: DiffScheme::Analytic,
                step: T::zero(),
                one_sided: false,
                error_estimate: None,
            });
        }
    }
    let scheme = match opts.scheme {
        DiffScheme::Analytic => DiffScheme::Richardson,
        s => s,
    };

    let h = opts.step;
    if !(h > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let spec = &model.axes()[axis];
    let x0 = theta.values()[axis];
    let stencil = if spec.contains(x0 - h) && spec.contains(x0 + h) {
        Stencil::Central
    } else if spec.contains(x0 + h + h) {
        Stencil::Forward
    } else if spec.contains(x0 - h - h) {
        Stencil::Backward
    } else {
        let (lo, hi) = spec.bounds.unwrap_or((x0, x0));
        return Err(Error::Domain {
            axis: spec.label.clone(),
            value: x0.to_f64_lossy(),
            lower: lo.to_f64_lossy(),
            upper: hi.to_f64_lossy(),
        });
    };

    let base = model.amplitudes(theta.values());
    let eval = |dx: T| -> Vec<C<T>> {
        let mut v = theta.values().to_vec();
        v[axis] = v[axis] + dx;
        let mut psi = model.amplitudes(&v);
        if opts.gauge_fix {
            let ov = inner(&base, &psi);
            let r = ov.norm();
            if r > T::zero() {
                let phase = ov.conj().unscale(r);
                psi.iter_mut().for_each(|z| *z = *z * phase);
            }
        }
        psi
    };

    let diff = |step: T| -> Vec<C<T>> {
        let two = T::lit(2.0);
        match stencil {
            Stencil::Central => {
                let (p, m) = (eval(step), eval(-step));
                p.iter()
                    .zip(&m)
                    .map(|(a, b)| (a - b).unscale(two * step))
                    .collect()
            }
            Stencil::Forward | Stencil::Backward => {
                let s = if stencil == Stencil::Forward {
                    step
                } else {
                    -step
                };
                let (f1, f2) = (eval(s), eval(s + s));
                let three = T::lit(3.0);
                let four = T::lit(4.0);
                base.iter()
                    .zip(f1.iter().zip(&f2))
                    .map(|(a, (b, c))| (b.scale(four) - a.scale(three) - c).unscale(two * s))
                    .collect()
            }
        }
    };

    let (amplitudes, error_estimate) = match scheme {
        DiffScheme::Central2 => (diff(h), None),
        _ => {
            let coarse = diff(h);
            let fine = diff(h * T::lit(0.5));
            let three = T::lit(3.0);
            let err = coarse
                .iter()
                .zip(&fine)
                .fold(T::zero(), |m, (c, f)| m.max((f - c).norm() / three));
            let v = fine
                .iter()
                .zip(&coarse)
                .map(|(f, c)| (f.scale(T::lit(4.0)) - c).unscale(three))
                .collect();
            (v, Some(err))
        }
    };

    Ok(TangentVector {
        amplitudes,
        axis,
        scheme,
        step: h,
        one_sided: stencil != Stencil::Central,
        error_estimate,
    })
}
