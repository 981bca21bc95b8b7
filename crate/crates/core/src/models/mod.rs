//! Parametrized pure-state families.

mod builtin;
pub mod random;
mod tangent;
mod unitary;

pub(crate) use builtin::qutrit_frame_unchecked;
pub use builtin::{qubit_model, ququart_model, qutrit_eigenframe, qutrit_model, BuiltinModel};
pub use tangent::{tangent, DiffScheme, TangentOptions, TangentVector};
pub use unitary::{unitary_family, UnitaryFamily};

use crate::error::{Error, Result};
use crate::matkernel::{norm, Hermitian};
use crate::scalar::{Real, C};

/// Domain of one parameter axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec<T> {
    pub label: String,
    /// Closed interval for bounded axes; `None` means unbounded.
    pub bounds: Option<(T, T)>,
    pub period: Option<T>,
}

impl<T: Real> AxisSpec<T> {
    pub fn bounded(label: &str, lower: T, upper: T) -> Self {
        Self {
            label: label.into(),
            bounds: Some((lower, upper)),
            period: None,
        }
    }

    pub fn periodic(label: &str, period: T) -> Self {
        Self {
            label: label.into(),
            bounds: None,
            period: Some(period),
        }
    }

    pub fn free(label: &str) -> Self {
        Self {
            label: label.into(),
            bounds: None,
            period: None,
        }
    }

    fn slack() -> T {
        T::epsilon() * T::lit(8.0)
    }

    pub fn contains(&self, x: T) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.bounds {
            Some((lo, hi)) => {
                let s = Self::slack() * lo.abs().max(hi.abs()).max(T::one());
                x >= lo - s && x <= hi + s
            }
            None => true,
        }
    }

    fn check(&self, x: T) -> Result<()> {
        if self.contains(x) {
            return Ok(());
        }
        let (lo, hi) = self.bounds.unwrap_or((T::neg_infinity(), T::infinity()));
        Err(Error::Domain {
            axis: self.label.clone(),
            value: x.to_f64_lossy(),
            lower: lo.to_f64_lossy(),
            upper: hi.to_f64_lossy(),
        })
    }
}

/// A point θ in parameter space together with its axis metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint<T> {
    values: Vec<T>,
    labels: Vec<String>,
    periods: Vec<Option<T>>,
}

impl<T: Real> ParameterPoint<T> {
    pub fn new(values: Vec<T>, labels: Vec<String>, periods: Vec<Option<T>>) -> Result<Self> {
        if values.is_empty() || values.len() != labels.len() || values.len() != periods.len() {
            return Err(Error::DimensionMismatch(format!(
                "parameter point needs matching nonempty values/labels/periods, got {}/{}/{}",
                values.len(),
                labels.len(),
                periods.len()
            )));
        }
        Ok(Self {
            values,
            labels,
            periods,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn periods(&self) -> &[Option<T>] {
        &self.periods
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The same point moved by `delta` along `axis`.
    pub fn shifted(&self, axis: usize, delta: T) -> Self {
        let mut p = self.clone();
        p.values[axis] = p.values[axis] + delta;
        p
    }

    /// The coordinates along `axes`, in the given order.
    pub fn select(&self, axes: &[usize]) -> Result<Self> {
        let d = self.dim();
        if let Some(&bad) = axes.iter().find(|&&a| a >= d) {
            return Err(Error::IndexOutOfRange { index: bad, dim: d });
        }
        Self::new(
            axes.iter().map(|&a| self.values[a]).collect(),
            axes.iter().map(|&a| self.labels[a].clone()).collect(),
            axes.iter().map(|&a| self.periods[a]).collect(),
        )
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T>(Vec<C<T>>);

impl<T: Real> StateVector<T> {
    /// Accepts amplitudes with unit norm within `1e-12`.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch("empty state vector".into()));
        }
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::NumericalInconsistency(format!(
                "state norm {n} differs from 1"
            )));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NumericalInconsistency(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self(amplitudes.into_iter().map(|z| z.unscale(n)).collect()))
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// A smooth map θ → |ψ(θ)⟩.
///
/// Implementors provide raw amplitudes; domain checks and normalization
/// validation are handled by [`StateModel::state`]. Analytic tangents and the
/// generator set `G_μ(θ) = i(∂_μU)U†` are optional.
pub trait StateModel<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn hilbert_dim(&self) -> usize;

    fn axes(&self) -> &[AxisSpec<T>];

    fn param_dim(&self) -> usize {
        self.axes().len()
    }

    /// Amplitudes at `values`, without domain checks.
    fn amplitudes(&self, values: &[T]) -> Vec<C<T>>;

    fn analytic_tangent(&self, _values: &[T], _axis: usize) -> Option<Vec<C<T>>> {
        None
    }

    fn generators(&self, _values: &[T]) -> Option<Vec<Hermitian<T>>> {
        None
    }

    fn has_generators(&self) -> bool {
        false
    }

    fn check_domain(&self, values: &[T]) -> Result<()> {
        if values.len() != self.param_dim() {
            return Err(Error::DimensionMismatch(format!(
                "model `{}` has {} parameters, got {}",
                self.name(),
                self.param_dim(),
                values.len()
            )));
        }
        self.axes()
            .iter()
            .zip(values)
            .try_for_each(|(ax, &v)| ax.check(v))
    }

    /// Validates `values` against the model domain and attaches axis metadata.
    fn point(&self, values: &[T]) -> Result<ParameterPoint<T>> {
        self.check_domain(values)?;
        ParameterPoint::new(
            values.to_vec(),
            self.axes().iter().map(|a| a.label.clone()).collect(),
            self.axes().iter().map(|a| a.period).collect(),
        )
    }

    fn state(&self, theta: &ParameterPoint<T>) -> Result<StateVector<T>> {
        self.check_domain(theta.values())?;
        StateVector::new(self.amplitudes(theta.values()))
    }
}

impl<T: Real, M: StateModel<T> + ?Sized> StateModel<T> for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn hilbert_dim(&self) -> usize {
        (**self).hilbert_dim()
    }
    fn axes(&self) -> &[AxisSpec<T>] {
        (**self).axes()
    }
    fn amplitudes(&self, values: &[T]) -> Vec<C<T>> {
        (**self).amplitudes(values)
    }
    fn analytic_tangent(&self, values: &[T], axis: usize) -> Option<Vec<C<T>>> {
        (**self).analytic_tangent(values, axis)
    }
    fn generators(&self, values: &[T]) -> Option<Vec<Hermitian<T>>> {
        (**self).generators(values)
    }
    fn has_generators(&self) -> bool {
        (**self).has_generators()
    }
}

/// Resolves a built-in model by its CLI name.
pub fn builtin_by_name<T: Real>(name: &str) -> Result<BuiltinModel<T>> {
    match name {
        "qubit" => Ok(qubit_model()),
        "qutrit" => Ok(qutrit_model()),
        "ququart" => Ok(ququart_model()),
        other => Err(Error::InvalidInput(format!(
            "unknown model `{other}` (expected qubit, qutrit or ququart)"
        ))),
    }
}
