use proptest::prelude::*;
use qmetro::estimation::{
    attainable_qcrb, attainable_qcrb_matrix_form, evaluate_bounds, gamma_spectrum, qfim,
    qfim_from_sld, sld_pure, uhlmann_from_sld, uncertainty_check, uncertainty_slack, WeightKind,
};
use qmetro::geometry::{qgt, qgt_from_generators, split, three_form};
use qmetro::matkernel::{outer, sym_eig, DEFAULT_RANK_TOL};
use qmetro::models::random::{random_angles, random_unitary_family};
use qmetro::models::{
    qubit_model, ququart_model, qutrit_model, AxisSpec, DiffScheme, StateModel, TangentOptions,
};
use qmetro::{Error, RMatrix64, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The qutrit with an extra `θ`-dependent global phase.
struct Rephased {
    inner: qmetro::models::BuiltinModel<f64>,
}

impl StateModel<f64> for Rephased {
    fn name(&self) -> &str {
        "rephased-qutrit"
    }
    fn hilbert_dim(&self) -> usize {
        3
    }
    fn axes(&self) -> &[AxisSpec<f64>] {
        self.inner.axes()
    }
    fn amplitudes(&self, v: &[f64]) -> Vec<C<f64>> {
        let phase = C::from_polar(1.0, 3.0 * v[0] * v[0] + (2.0 * v[1]).sin() - v[2]);
        self.inner
            .amplitudes(v)
            .into_iter()
            .map(|z| z * phase)
            .collect()
    }
}

fn interior_qutrit_point(rng: &mut ChaCha8Rng) -> Vec<f64> {
    vec![
        rng.gen_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    ]
}

#[test]
fn qgt_is_gauge_invariant() {
    let plain = qutrit_model::<f64>();
    let wrapped = Rephased {
        inner: qutrit_model(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let v = interior_qutrit_point(&mut rng);
        let th = plain.point(&v).unwrap();
        let a = qgt(&plain, &th, &TangentOptions::default()).unwrap();
        for opts in [TangentOptions::default(), TangentOptions::default().raw()] {
            let b = qgt(&wrapped, &th, &opts).unwrap();
            assert!(a.chi.sub(&b.chi).max_abs() < 1e-7, "{v:?}");
        }
    }
}

#[test]
fn qutrit_volume_and_three_form() {
    let m = qutrit_model::<f64>();
    let opts = TangentOptions::with_scheme(DiffScheme::Analytic);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let v = interior_qutrit_point(&mut rng);
        let th = m.point(&v).unwrap();
        let q = qgt(&m, &th, &opts).unwrap();
        assert!(q.min_eigenvalue().unwrap() > -1e-12);
        let (g, f) = split(&q);
        let j = qfim(&g).unwrap();
        assert!(sym_eig(&j.j).unwrap().values[0] > -1e-12);
        let sqrt_det = j.j.det().sqrt();
        let s2 = (2.0 * v[0]).sin();
        assert!((sqrt_det - s2).abs() < 1e-10, "{v:?}");
        let h = three_form(&j.j, &f.f, [0, 1, 2]).unwrap();
        assert!((2.0 * h / sqrt_det - 1.0).abs() < 1e-9, "{v:?}");
    }
}

#[test]
fn three_routes_agree_on_builtin_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [qubit_model::<f64>(), qutrit_model(), ququart_model()] {
        for _ in 0..10 {
            let v: Vec<f64> = m
                .axes()
                .iter()
                .map(|a| match a.bounds {
                    Some((lo, hi)) => rng.gen_range(lo + 0.05..hi - 0.05),
                    None => rng.gen_range(-3.0..3.0),
                })
                .collect();
            let th = m.point(&v).unwrap();
            let opts = TangentOptions::default();
            let (g, f) = split(&qgt(&m, &th, &opts).unwrap());
            let (gg, fg) = split(&qgt_from_generators(&m, &th).unwrap());
            let s = sld_pure(&m, &th, &opts).unwrap();
            let psi = m.amplitudes(&v);
            let rho = outer(&psi, &psi);
            let js = qfim_from_sld(&rho, &s).unwrap();
            let fs = uhlmann_from_sld(&rho, &s).unwrap();
            let jq = qfim(&g).unwrap();
            let jg = qfim(&gg).unwrap();
            for (a, b) in [(&jq.j, &jg.j), (&jq.j, &js.j), (&jg.j, &js.j)] {
                assert!(a.sub(b).max_abs() < 1e-7, "{} {v:?}", m.name());
            }
            for (a, b) in [(&f.f, &fg.f), (&f.f, &fs.f), (&fg.f, &fs.f)] {
                assert!(a.sub(b).max_abs() < 1e-7, "{} {v:?}", m.name());
            }
        }
    }
}

#[test]
fn generic_over_single_precision() {
    let m = qutrit_model::<f32>();
    let th = m.point(&[std::f32::consts::FRAC_PI_4, 0.0, 0.0]).unwrap();
    let opts = TangentOptions::with_scheme(DiffScheme::Analytic);
    let (g, f) = split(&qgt(&m, &th, &opts).unwrap());
    assert!((g.g[(0, 0)] - 0.5).abs() < 1e-5);
    assert!((f.f[(0, 1)] - 0.5).abs() < 1e-5);
    let r = evaluate_bounds(&m, &th, &opts, None, WeightKind::Qfim, 1e-5).unwrap();
    assert!((r.gamma() - 1.0).abs() < 1e-4);
}

fn random_family_case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=5, 2usize..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_families_respect_bound_invariants((seed, n, d) in random_family_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_unitary_family::<f64, _>(&mut rng, n, d).unwrap();
        let th = fam.point(&random_angles(&mut rng, d)).unwrap();
        let opts = TangentOptions::with_scheme(DiffScheme::Analytic);
        let q = qgt(&fam, &th, &opts).unwrap();
        prop_assert!(q.min_eigenvalue().unwrap() >= -1e-10);
        let r = evaluate_bounds(&fam, &th, &opts, None, WeightKind::Qfim, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(r.spectrum.raw_gamma <= 1.0 + 1e-8);
        prop_assert!(r.ordering_margin() >= -1e-9 * r.sld_crb.max(1.0));
        let (g, f) = split(&q);
        for mu in 0..d {
            for nu in 0..d {
                prop_assert!(uncertainty_slack(&g.g, &f.f, mu, nu).unwrap() >= -1e-10);
                prop_assert!(uncertainty_check(&fam, &th, mu, nu).unwrap() >= -1e-10);
            }
        }
        let rank = r.spectrum.rank;
        match evaluate_bounds(&fam, &th, &opts, None, WeightKind::Identity, DEFAULT_RANK_TOL) {
            Ok(r) => prop_assert!(r.ordering_margin() >= -1e-9 * r.sld_crb.max(1.0)),
            // A two-level state has only two independent directions.
            Err(Error::IncompatibleSupport(_)) => prop_assert!(rank < d),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn attainable_matrix_and_eigenvalue_forms_agree(
        seed in any::<u64>(), n in 3usize..=5, d in 2usize..=4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_unitary_family::<f64, _>(&mut rng, n, d).unwrap();
        let th = fam.point(&random_angles(&mut rng, d)).unwrap();
        let (g, f) = split(&qgt(&fam, &th, &TangentOptions::with_scheme(DiffScheme::Analytic)).unwrap());
        let j = qfim(&g).unwrap();
        let s = gamma_spectrum(&j, &f, DEFAULT_RANK_TOL).unwrap();
        prop_assume!(s.rank == d);
        let m = attainable_qcrb_matrix_form(&j, &f, DEFAULT_RANK_TOL).unwrap();
        let e = attainable_qcrb(&s);
        // Both forms lose half the digits as |γ_i| → 1.
        prop_assert!((m - e).abs() <= 1e-6 * e, "{m} vs {e}");
    }

    #[test]
    fn metric_is_symmetric_and_curvature_antisymmetric(
        a in 0.01f64..1.56, b in -3.0f64..3.0, p in -3.0f64..3.0,
    ) {
        let m = qutrit_model::<f64>();
        let th = m.point(&[a, b, p]).unwrap();
        let (g, f) = split(&qgt(&m, &th, &TangentOptions::default()).unwrap());
        let gm: &RMatrix64 = &g.g;
        prop_assert!(gm.symmetry_residual() == 0.0);
        prop_assert!(f.f.antisymmetry_residual() == 0.0);
    }
}
