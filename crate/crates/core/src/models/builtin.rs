use crate::error::Result;
use crate::matkernel::{CMatrix, Hermitian};
use crate::scalar::{ci, cr, expi, Real, C};

use super::{AxisSpec, ParameterPoint, StateModel, StateVector, UnitaryFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Qubit,
    Qutrit,
    Ququart,
}

/// One of the closed-form models: qubit `(θ, φ)`, qutrit `(α, β, φ)` and
/// ququart `(α, φ1, φ2, φ3)`.
///
/// Amplitudes and tangents are evaluated in closed form; the generator set
/// comes from an equivalent [`UnitaryFamily`] that reproduces the same state
/// with no extra global phase.
#[derive(Clone, Debug)]
pub struct BuiltinModel<T: Real> {
    kind: Kind,
    family: UnitaryFamily<T>,
}

fn projector<T: Real>(n: usize, k: usize, sign: T) -> Hermitian<T> {
    let mut m = CMatrix::zeros(n, n);
    m[(k, k)] = cr(sign);
    Hermitian::new(m).expect("diagonal projector is Hermitian")
}

/// `σ_y` on the `(p, q)` pair: generates `|p⟩ → cos x |p⟩ + sin x |q⟩`.
fn pair_rotation<T: Real>(n: usize, p: usize, q: usize, scale: T) -> Hermitian<T> {
    let mut m = CMatrix::zeros(n, n);
    m[(p, q)] = ci(-scale);
    m[(q, p)] = ci(scale);
    Hermitian::new(m).expect("rotation generator is Hermitian")
}

/// `|ψ(θ, φ)⟩ = cos(θ/2)|0⟩ − sin(θ/2) e^{−iφ}|1⟩`, θ ∈ [0, π], φ 2π-periodic.
///
/// Generators: `−σ_y/2` for θ (acting first) then `|1⟩⟨1|` for φ.
pub fn qubit_model<T: Real>() -> BuiltinModel<T> {
    let half = T::lit(0.5);
    let axes = vec![
        AxisSpec::bounded("theta", T::zero(), T::PI()),
        AxisSpec::periodic("phi", T::TAU()),
    ];
    let psi0 = StateVector::new(vec![cr(T::one()), cr(T::zero())]).expect("unit vector");
    let gens = vec![pair_rotation(2, 0, 1, -half), projector(2, 1, T::one())];
    BuiltinModel {
        kind: Kind::Qubit,
        family: UnitaryFamily::with_axes("qubit", gens, psi0, axes).expect("valid qubit family"),
    }
}

/// `|ψ(α, β, φ)⟩ = (cos α e^{−iβ}, −1, sin α e^{−iφ})ᵀ/√2`, α ∈ [0, π/2].
pub fn qutrit_model<T: Real>() -> BuiltinModel<T> {
    let r = T::lit(0.5).sqrt();
    let axes = vec![
        AxisSpec::bounded("alpha", T::zero(), T::FRAC_PI_2()),
        AxisSpec::periodic("beta", T::TAU()),
        AxisSpec::periodic("phi", T::TAU()),
    ];
    let psi0 = StateVector::normalized(vec![cr(r), cr(-r), cr(T::zero())]).expect("unit vector");
    let gens = vec![
        pair_rotation(3, 0, 2, T::one()),
        projector(3, 0, T::one()),
        projector(3, 2, T::one()),
    ];
    BuiltinModel {
        kind: Kind::Qutrit,
        family: UnitaryFamily::with_axes("qutrit", gens, psi0, axes).expect("valid qutrit family"),
    }
}

/// `|ψ(α, φ1, φ2, φ3)⟩ = (cos α e^{iφ1}, e^{iφ2}, sin α e^{iφ3}, 1)ᵀ/√3`, α ∈ [0, π/2].
pub fn ququart_model<T: Real>() -> BuiltinModel<T> {
    let r = T::one() / T::lit(3.0).sqrt();
    let axes = vec![
        AxisSpec::bounded("alpha", T::zero(), T::FRAC_PI_2()),
        AxisSpec::periodic("phi1", T::TAU()),
        AxisSpec::periodic("phi2", T::TAU()),
        AxisSpec::periodic("phi3", T::TAU()),
    ];
    let psi0 =
        StateVector::normalized(vec![cr(r), cr(r), cr(T::zero()), cr(r)]).expect("unit vector");
    let gens = vec![
        pair_rotation(4, 0, 2, T::one()),
        projector(4, 0, -T::one()),
        projector(4, 1, -T::one()),
        projector(4, 2, -T::one()),
    ];
    BuiltinModel {
        kind: Kind::Ququart,
        family: UnitaryFamily::with_axes("ququart", gens, psi0, axes)
            .expect("valid ququart family"),
    }
}

impl<T: Real> BuiltinModel<T> {
    /// The unitary family that reproduces this model.
    pub fn family(&self) -> &UnitaryFamily<T> {
        &self.family
    }
}

impl<T: Real> StateModel<T> for BuiltinModel<T> {
    fn name(&self) -> &str {
        self.family.name()
    }

    fn hilbert_dim(&self) -> usize {
        match self.kind {
            Kind::Qubit => 2,
            Kind::Qutrit => 3,
            Kind::Ququart => 4,
        }
    }

    fn axes(&self) -> &[AxisSpec<T>] {
        self.family.axes()
    }

    fn amplitudes(&self, v: &[T]) -> Vec<C<T>> {
        match self.kind {
            Kind::Qubit => {
                let h = v[0] * T::lit(0.5);
                vec![cr(h.cos()), -expi(-v[1]).scale(h.sin())]
            }
            Kind::Qutrit => {
                let r = T::lit(0.5).sqrt();
                vec![
                    expi(-v[1]).scale(v[0].cos() * r),
                    cr(-r),
                    expi(-v[2]).scale(v[0].sin() * r),
                ]
            }
            Kind::Ququart => {
                let r = T::one() / T::lit(3.0).sqrt();
                vec![
                    expi(v[1]).scale(v[0].cos() * r),
                    expi(v[2]).scale(r),
                    expi(v[3]).scale(v[0].sin() * r),
                    cr(r),
                ]
            }
        }
    }

    fn analytic_tangent(&self, v: &[T], axis: usize) -> Option<Vec<C<T>>> {
        let z = cr(T::zero());
        let i = ci(T::one());
        let t = match (self.kind, axis) {
            (Kind::Qubit, 0) => {
                let h = v[0] * T::lit(0.5);
                let q = T::lit(0.5);
                vec![cr(-h.sin() * q), -expi(-v[1]).scale(h.cos() * q)]
            }
            (Kind::Qubit, 1) => {
                let h = v[0] * T::lit(0.5);
                vec![z, i * expi(-v[1]).scale(h.sin())]
            }
            (Kind::Qutrit, 0) => {
                let r = T::lit(0.5).sqrt();
                vec![
                    expi(-v[1]).scale(-v[0].sin() * r),
                    z,
                    expi(-v[2]).scale(v[0].cos() * r),
                ]
            }
            (Kind::Qutrit, 1) => {
                let r = T::lit(0.5).sqrt();
                vec![-i * expi(-v[1]).scale(v[0].cos() * r), z, z]
            }
            (Kind::Qutrit, 2) => {
                let r = T::lit(0.5).sqrt();
                vec![z, z, -i * expi(-v[2]).scale(v[0].sin() * r)]
            }
            (Kind::Ququart, 0) => {
                let r = T::one() / T::lit(3.0).sqrt();
                vec![
                    expi(v[1]).scale(-v[0].sin() * r),
                    z,
                    expi(v[3]).scale(v[0].cos() * r),
                    z,
                ]
            }
            (Kind::Ququart, 1) => {
                let r = T::one() / T::lit(3.0).sqrt();
                vec![i * expi(v[1]).scale(v[0].cos() * r), z, z, z]
            }
            (Kind::Ququart, 2) => {
                let r = T::one() / T::lit(3.0).sqrt();
                vec![z, i * expi(v[2]).scale(r), z, z]
            }
            (Kind::Ququart, 3) => {
                let r = T::one() / T::lit(3.0).sqrt();
                vec![z, z, i * expi(v[3]).scale(v[0].sin() * r), z]
            }
            _ => return None,
        };
        Some(t)
    }

    fn generators(&self, values: &[T]) -> Option<Vec<Hermitian<T>>> {
        self.family.generators(values)
    }

    fn has_generators(&self) -> bool {
        true
    }
}

/// The two excited eigenstates that complete the qutrit frame:
/// `ψ1 = (−sin α e^{−iβ}, 0, cos α e^{−iφ})ᵀ` and
/// `ψ2 = (cos α e^{−iβ}, 1, sin α e^{−iφ})ᵀ/√2`.
pub fn qutrit_eigenframe<T: Real>(
    theta: &ParameterPoint<T>,
) -> Result<(StateVector<T>, StateVector<T>)> {
    qutrit_model::<T>().check_domain(theta.values())?;
    let [_, p1, p2] = qutrit_frame_unchecked(theta.values());
    Ok((StateVector::new(p1)?, StateVector::new(p2)?))
}

/// `[ψ0, ψ1, ψ2]` at arbitrary angles, no domain check.
pub(crate) fn qutrit_frame_unchecked<T: Real>(v: &[T]) -> [Vec<C<T>>; 3] {
    let r = T::lit(0.5).sqrt();
    let (s, c) = v[0].sin_cos();
    let eb = expi(-v[1]);
    let ep = expi(-v[2]);
    [
        vec![eb.scale(c * r), cr(-r), ep.scale(s * r)],
        vec![eb.scale(-s), cr(T::zero()), ep.scale(c)],
        vec![eb.scale(c * r), cr(r), ep.scale(s * r)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{inner, norm};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn assert_vec_close(a: &[C<f64>], b: &[C<f64>], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() <= tol, "{a:?} vs {b:?}");
        }
    }

    fn eval<M: StateModel<f64>>(m: &M, v: &[f64]) -> Vec<C<f64>> {
        m.state(&m.point(v).unwrap()).unwrap().into_amplitudes()
    }

    #[test]
    fn qubit_values() {
        let m = qubit_model::<f64>();
        assert_vec_close(&eval(&m, &[0.0, 1.234]), &[cr(1.0), cr(0.0)], 1e-15);
        let r = FRAC_PI_4.cos();
        assert_vec_close(&eval(&m, &[FRAC_PI_2, 0.0]), &[cr(r), cr(-r)], 1e-15);
        // Oracle: −e^{−iπ/2}/√2 evaluated with a scalar complex exponential.
        let oracle = -C::new(0.0, -FRAC_PI_2).exp() / 2f64.sqrt();
        assert!((oracle - C::new(0.0, 0.5f64.sqrt())).norm() < 1e-15);
        assert_vec_close(&eval(&m, &[FRAC_PI_2, FRAC_PI_2]), &[cr(r), oracle], 1e-15);
    }

    #[test]
    fn qutrit_values() {
        let m = qutrit_model::<f64>();
        let r = 0.5f64.sqrt();
        assert_vec_close(
            &eval(&m, &[0.0, 0.0, 0.0]),
            &[cr(r), cr(-r), cr(0.0)],
            1e-15,
        );
        assert_vec_close(
            &eval(&m, &[FRAC_PI_2, 0.0, 0.0]),
            &[cr(0.0), cr(-r), cr(r)],
            1e-15,
        );
        let (a, b, p) = (FRAC_PI_4, PI / 3.0, PI / 6.0);
        let want = [
            C::from_polar(a.cos(), -b) * r,
            cr(-r),
            C::from_polar(a.sin(), -p) * r,
        ];
        let got = eval(&m, &[a, b, p]);
        assert_vec_close(&got, &want, 1e-15);
        assert!((norm(&got) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qutrit_domain() {
        let m = qutrit_model::<f64>();
        assert!(matches!(
            m.point(&[2.0, 0.0, 0.0]),
            Err(crate::Error::Domain { ref axis, .. }) if axis == "alpha"
        ));
        assert!(m.point(&[-0.1, 0.0, 0.0]).is_err());
        assert!(m.point(&[FRAC_PI_2, 10.0, -3.0]).is_ok());
    }

    #[test]
    fn ququart_values() {
        let m = ququart_model::<f64>();
        let r = 1.0 / 3f64.sqrt();
        assert_vec_close(&eval(&m, &[0.0; 4]), &[cr(r), cr(r), cr(0.0), cr(r)], 1e-15);
        assert_vec_close(
            &eval(&m, &[FRAC_PI_2, 0.0, 0.0, 0.0]),
            &[cr(0.0), cr(r), cr(r), cr(r)],
            1e-15,
        );
        let s = 0.5f64.sqrt();
        assert_vec_close(
            &eval(&m, &[FRAC_PI_4, PI, 0.0, 0.0]),
            &[cr(-s * r), cr(r), cr(s * r), cr(r)],
            1e-15,
        );
        assert!(m.point(&[1.7, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn eigenframe() {
        let m = qutrit_model::<f64>();
        let (p1, p2) = qutrit_eigenframe(&m.point(&[0.0, 0.0, 0.0]).unwrap()).unwrap();
        let r = 0.5f64.sqrt();
        assert_vec_close(p1.amplitudes(), &[cr(0.0), cr(0.0), cr(1.0)], 1e-15);
        assert_vec_close(p2.amplitudes(), &[cr(r), cr(r), cr(0.0)], 1e-15);

        let (p1, _) = qutrit_eigenframe(&m.point(&[FRAC_PI_4, 0.0, 0.0]).unwrap()).unwrap();
        assert_vec_close(p1.amplitudes(), &[cr(-r), cr(0.0), cr(r)], 1e-15);

        for &v in &[[0.3, 1.1, -0.4], [1.2, 4.0, 2.5], [FRAC_PI_2, 0.0, 6.0]] {
            let th = m.point(&v).unwrap();
            let p0 = m.state(&th).unwrap();
            let (p1, p2) = qutrit_eigenframe(&th).unwrap();
            for (a, b) in [(&p0, &p1), (&p0, &p2), (&p1, &p2)] {
                assert!(inner(a.amplitudes(), b.amplitudes()).norm() < 1e-12);
            }
        }
        assert!(qutrit_eigenframe(
            &ParameterPoint::new(
                vec![2.0, 0.0, 0.0],
                vec!["alpha".into(), "beta".into(), "phi".into()],
                vec![None, None, None]
            )
            .unwrap()
        )
        .is_err());
    }

    #[test]
    fn families_reproduce_closed_forms() {
        let models = [qubit_model::<f64>(), qutrit_model(), ququart_model()];
        let points: [&[f64]; 3] = [&[1.1, 0.7], &[0.4, 2.0, -1.3], &[1.0, 0.3, -2.2, 5.0]];
        for (m, v) in models.iter().zip(points) {
            let direct = m.amplitudes(v);
            let via_family = m.family().amplitudes(v);
            assert_vec_close(&direct, &via_family, 1e-13);
            for ax in 0..v.len() {
                assert_vec_close(
                    &m.analytic_tangent(v, ax).unwrap(),
                    &m.family().analytic_tangent(v, ax).unwrap(),
                    1e-13,
                );
            }
        }
    }

    #[test]
    fn random_points_are_normalized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let models = [qubit_model::<f64>(), qutrit_model(), ququart_model()];
        for m in &models {
            for _ in 0..100 {
                let v: Vec<f64> = m
                    .axes()
                    .iter()
                    .map(|a| match a.bounds {
                        Some((lo, hi)) => rng.gen_range(lo..=hi),
                        None => rng.gen_range(0.0..std::f64::consts::TAU),
                    })
                    .collect();
                let psi = m.amplitudes(&v);
                assert!((norm(&psi) - 1.0).abs() <= 1e-12);
                for ax in 0..v.len() {
                    let t = m.analytic_tangent(&v, ax).unwrap();
                    assert!(inner(&psi, &t).re.abs() <= 1e-10);
                }
            }
        }
    }
}
