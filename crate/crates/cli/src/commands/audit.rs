use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Map;

use qmetro::estimation::{
    evaluate_bounds, qfim, qfim_from_sld, sld_pure, uhlmann_from_sld, uncertainty_check,
    uncertainty_slack, WeightKind,
};
use qmetro::geometry::{qgt, qgt_from_generators, split, CurvatureMatrix};
use qmetro::matkernel::{outer, DEFAULT_RANK_TOL};
use qmetro::models::random::{random_angles, random_unitary_family};
use qmetro::models::ParameterPoint;
use qmetro::models::{StateModel, TangentOptions, UnitaryFamily};

use super::Rendered;
use crate::args::AuditArgs;
use crate::output::json_text;
use crate::CliError;

const GAMMA_TOL: f64 = 1e-8;
const ORDER_TOL: f64 = 1e-9;
const SLACK_TOL: f64 = 1e-10;
const CROSS_TOL: f64 = 1e-7;
const MAX_LISTED_FAILURES: usize = 20;

/// Check names in report order.
pub const CHECKS: [&str; 5] = [
    "curvature_antisymmetry",
    "gamma_at_most_one",
    "sandwich_ordering",
    "uncertainty_slack",
    "cross_method_qfim",
];

/// Margin of one check on one model; negative or absent means failed.
struct Outcome {
    margin: Option<f64>,
    detail: Option<String>,
}

impl Outcome {
    fn margin(m: f64) -> Self {
        Self {
            margin: Some(m),
            detail: None,
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self {
            margin: None,
            detail: Some(e.to_string()),
        }
    }

    fn passed(&self) -> bool {
        self.margin.is_some_and(|m| m >= 0.0)
    }
}

fn check(r: qmetro::Result<f64>) -> Outcome {
    r.map_or_else(Outcome::error, Outcome::margin)
}

fn audit_model(fam: &UnitaryFamily<f64>, th: &ParameterPoint<f64>, corrupt: bool) -> [Outcome; 5] {
    let d = fam.param_dim();
    let analytic = TangentOptions::with_scheme(qmetro::models::DiffScheme::Analytic);
    let q = match qgt(fam, th, &analytic) {
        Ok(q) => q,
        Err(e) => return std::array::from_fn(|_| Outcome::error(&e)),
    };
    let (g, f) = split(&q);

    let antisym = {
        let mut bad = f.f.clone();
        if corrupt {
            bad[(0, 1)] += 0.25;
        }
        check(CurvatureMatrix::new(bad, th.clone()).map(|_| 0.0))
    };

    let gamma = check(
        evaluate_bounds(fam, th, &analytic, None, WeightKind::Qfim, DEFAULT_RANK_TOL)
            .map(|r| 1.0 + GAMMA_TOL - r.spectrum.raw_gamma),
    );

    let ordering = check((|| {
        let r = evaluate_bounds(fam, th, &analytic, None, WeightKind::Qfim, DEFAULT_RANK_TOL)?;
        let scale = |c: f64| ORDER_TOL * c.max(1.0);
        let mut margin = r.ordering_margin() + scale(r.sld_crb);
        if let Some(a) = r.attainable_margin() {
            margin = margin.min(a + scale(r.sld_crb));
        }
        if r.spectrum.rank == d {
            let ri = evaluate_bounds(
                fam,
                th,
                &analytic,
                None,
                WeightKind::Identity,
                DEFAULT_RANK_TOL,
            )?;
            margin = margin.min(ri.ordering_margin() + scale(ri.sld_crb));
        }
        Ok(margin)
    })());

    let slack = check((|| {
        let mut worst = f64::INFINITY;
        for mu in 0..d {
            for nu in mu + 1..d {
                worst = worst
                    .min(uncertainty_slack(&g.g, &f.f, mu, nu)?)
                    .min(uncertainty_check(fam, th, mu, nu)?);
            }
        }
        Ok(worst + SLACK_TOL)
    })());

    let cross = check((|| {
        let fd = TangentOptions::default();
        let (gf, ff) = split(&qgt(fam, th, &fd)?);
        let (gg, fg) = split(&qgt_from_generators(fam, th)?);
        let slds = sld_pure(fam, th, &analytic)?;
        let psi = fam.amplitudes(th.values());
        let rho = outer(&psi, &psi);
        let js = qfim_from_sld(&rho, &slds)?;
        let fs = uhlmann_from_sld(&rho, &slds)?;
        let jq = qfim(&g)?;
        let js_list = [&jq.j, &qfim(&gf)?.j, &qfim(&gg)?.j, &js.j];
        let fs_list = [&f.f, &ff.f, &fg.f, &fs.f];
        let mut worst = 0.0f64;
        for list in [js_list, fs_list] {
            for a in 0..list.len() {
                for b in a + 1..list.len() {
                    worst = worst.max(list[a].sub(list[b]).max_abs());
                }
            }
        }
        Ok(CROSS_TOL - worst)
    })());

    [antisym, gamma, ordering, slack, cross]
}

#[derive(Serialize)]
struct CheckSummary {
    passed: usize,
    failed: usize,
    worst_margin: Option<f64>,
}

#[derive(Serialize)]
struct Failure {
    model: usize,
    hilbert_dim: usize,
    params: usize,
    check: &'static str,
    margin: Option<f64>,
    detail: Option<String>,
}

#[derive(Serialize)]
struct AuditReport {
    n_models: usize,
    seed: u64,
    dims: [usize; 2],
    params: [usize; 2],
    inject_corrupt_f: bool,
    checks: Map<String, serde_json::Value>,
    total_failures: usize,
    failures: Vec<Failure>,
    passed: bool,
}

pub fn run(a: &AuditArgs) -> Result<Rendered, CliError> {
    if a.n_models == 0 {
        return Err(CliError::Input("--n-models must be at least 1".into()));
    }
    if a.dims.lo < 2 || a.params.lo < 2 {
        return Err(CliError::Input(
            "models need at least two levels and two parameters".into(),
        ));
    }
    let results: Vec<(usize, usize, [Outcome; 5])> = (0..a.n_models)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            rng.set_stream(i as u64);
            let n = rng.gen_range(a.dims.lo..=a.dims.hi);
            let d = rng.gen_range(a.params.lo..=a.params.hi);
            let outcomes = random_unitary_family::<f64, _>(&mut rng, n, d)
                .and_then(|fam| {
                    let th = fam.point(&random_angles(&mut rng, d))?;
                    Ok(audit_model(&fam, &th, a.inject_corrupt_f))
                })
                .unwrap_or_else(|e| std::array::from_fn(|_| Outcome::error(&e)));
            (n, d, outcomes)
        })
        .collect();

    let mut checks = Map::new();
    let mut failures = Vec::new();
    let mut total = 0;
    for (c, name) in CHECKS.iter().enumerate() {
        let mut summary = CheckSummary {
            passed: 0,
            failed: 0,
            worst_margin: None,
        };
        for (i, (n, d, outcomes)) in results.iter().enumerate() {
            let o = &outcomes[c];
            if let Some(m) = o.margin {
                summary.worst_margin = Some(summary.worst_margin.map_or(m, |w: f64| w.min(m)));
            }
            if o.passed() {
                summary.passed += 1;
            } else {
                summary.failed += 1;
                total += 1;
                if failures.len() < MAX_LISTED_FAILURES {
                    failures.push(Failure {
                        model: i,
                        hilbert_dim: *n,
                        params: *d,
                        check: name,
                        margin: o.margin,
                        detail: o.detail.clone(),
                    });
                }
            }
        }
        checks.insert(
            name.to_string(),
            serde_json::to_value(summary).map_err(|e| CliError::Numerical(e.to_string()))?,
        );
    }
    let body = json_text(&AuditReport {
        n_models: a.n_models,
        seed: a.seed,
        dims: [a.dims.lo, a.dims.hi],
        params: [a.params.lo, a.params.hi],
        inject_corrupt_f: a.inject_corrupt_f,
        checks,
        total_failures: total,
        failures,
        passed: total == 0,
    })?;
    let status = if total == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "audit found {total} failed checks"
        )))
    };
    Ok(Rendered { body, status })
}
