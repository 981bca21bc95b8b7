//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p qmetro-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qmetro::estimation::{
    evaluate_bounds, qfim, qfim_from_sld, sld_pure, uhlmann_from_sld, BoundReport, WeightKind,
};
use qmetro::geometry::{chern_number, dd_invariant, qgt, qgt_from_generators, split};
use qmetro::matkernel::{outer, RMatrix, DEFAULT_RANK_TOL};
use qmetro::models::{
    qubit_model, ququart_model, qutrit_model, BuiltinModel, DiffScheme, StateModel, TangentOptions,
};
use qmetro::protocol::{reconstruct_qgt, ProtocolConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_qmetro");

type Check = Box<dyn Fn() -> Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn analytic() -> TangentOptions<f64> {
    TangentOptions::with_scheme(DiffScheme::Analytic)
}

/// `n` evenly spaced points strictly inside `(lo, hi)`.
fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
fn closed(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn qutrit_j(alpha: f64) -> RMatrix<f64> {
    let (c, s) = (alpha.cos(), alpha.sin());
    RMatrix::from_rows(&[
        vec![2.0, 0.0, 0.0],
        vec![0.0, 2.0 * c * c - c.powi(4), -(c * s).powi(2)],
        vec![0.0, -(c * s).powi(2), 2.0 * s * s - s.powi(4)],
    ])
    .unwrap()
}

fn qutrit_f(alpha: f64) -> RMatrix<f64> {
    let h = (2.0 * alpha).sin() / 2.0;
    RMatrix::from_rows(&[vec![0.0, h, -h], vec![-h, 0.0, 0.0], vec![h, 0.0, 0.0]]).unwrap()
}

fn jf(
    m: &BuiltinModel<f64>,
    values: &[f64],
    opts: &TangentOptions<f64>,
) -> qmetro::Result<(RMatrix<f64>, RMatrix<f64>)> {
    let th = m.point(values)?;
    let (g, f) = split(&qgt(m, &th, opts)?);
    Ok((qfim(&g)?.j, f.f))
}

fn bounds(
    m: &BuiltinModel<f64>,
    values: &[f64],
    axes: Option<&[usize]>,
) -> qmetro::Result<BoundReport<f64>> {
    let th = m.point(values)?;
    evaluate_bounds(
        m,
        &th,
        &analytic(),
        axes,
        WeightKind::Qfim,
        DEFAULT_RANK_TOL,
    )
}

fn qutrit_matrices() -> qmetro::Result<Verdict> {
    let start = Instant::now();
    let m = qutrit_model::<f64>();
    let (mut fd_err, mut an_err) = (0.0f64, 0.0f64);
    for a in interior(0.0, FRAC_PI_2, 20) {
        let (jo, fo) = (qutrit_j(a), qutrit_f(a));
        let (j, f) = jf(&m, &[a, 0.3, 0.7], &TangentOptions::default())?;
        fd_err = fd_err.max(j.sub(&jo).max_abs()).max(f.sub(&fo).max_abs());
        let (j, f) = jf(&m, &[a, 0.3, 0.7], &analytic())?;
        an_err = an_err.max(j.sub(&jo).max_abs()).max(f.sub(&fo).max_abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Verdict::new(
        fd_err <= 1e-6 && an_err <= 1e-10 && secs < 5.0,
        format!(
            "finite-difference error {fd_err:.2e} (tol 1e-6), analytic error {an_err:.2e} \
             (tol 1e-10), {secs:.2} s (limit 5 s)"
        ),
    ))
}

fn qubit_reference() -> qmetro::Result<Verdict> {
    let m = qubit_model::<f64>();
    let (mut j_err, mut f_err, mut gamma_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut f_sample = 0.0;
    for t in interior(0.0, std::f64::consts::PI, 20) {
        let (j, f) = jf(&m, &[t, 0.4], &analytic())?;
        let jo = RMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, t.sin().powi(2)]]).unwrap();
        j_err = j_err.max(j.sub(&jo).max_abs());
        f_err = f_err.max((f[(0, 1)] - t.sin() / 2.0).abs());
        f_sample = f[(0, 1)] / (t.sin() / 2.0);
        gamma_err = gamma_err.max((bounds(&m, &[t, 0.4], None)?.gamma() - 1.0).abs());
    }
    Ok(Verdict::new(
        j_err <= 1e-8 && f_err <= 1e-8 && gamma_err <= 1e-8,
        format!(
            "J error {j_err:.2e}, F_theta_phi error {f_err:.2e} (tol 1e-8; computed/expected \
             ratio {f_sample:.6}), max |gamma - 1| {gamma_err:.2e}"
        ),
    ))
}

fn characterization_number() -> qmetro::Result<Verdict> {
    let m = qutrit_model::<f64>();
    let (mut full_err, mut sub_err) = (0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in closed(0.05, FRAC_PI_2 - 0.05, 30) {
        full_err = full_err.max((bounds(&m, &[a, 0.2, 0.9], None)?.gamma() - 1.0).abs());
        let c2 = a.cos().powi(2);
        let expected = (2.0 * a).sin() / (2.0 * (2.0 * c2 - c2 * c2)).sqrt();
        let g = bounds(&m, &[a, 0.2, 0.9], Some(&[0, 1]))?.gamma();
        sub_err = sub_err.max((g - expected).abs());
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok(Verdict::new(
        full_err <= 1e-6 && sub_err <= 1e-6 && lo < 0.1 && hi > 0.95,
        format!(
            "full-model max |gamma - 1| {full_err:.2e}, (alpha, beta) closed-form error \
             {sub_err:.2e} (tol 1e-6), subspace gamma range [{lo:.4}, {hi:.4}]"
        ),
    ))
}

fn attainable_bound() -> qmetro::Result<Verdict> {
    let m = qutrit_model::<f64>();
    let mut c_err = 0.0f64;
    let mut chain = true;
    for a in interior(0.0, FRAC_PI_2, 20) {
        let r = bounds(&m, &[a, 0.2, 0.9], None)?;
        let c = r.attainable_qcrb.unwrap_or(f64::NAN);
        c_err = c_err.max((c - 5.0).abs());
        chain &= c > r.sld_crb && c <= (1.0 + r.gamma()) * r.sld_crb + 1e-9;
        chain &= (r.sld_crb - 3.0).abs() < 1e-9;
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for pair in [[0, 1], [0, 2], [1, 2]] {
        for a in closed(0.01, FRAC_PI_2 - 0.01, 40) {
            let c = bounds(&m, &[a, 0.2, 0.9], Some(&pair))?
                .attainable_qcrb
                .unwrap_or(f64::NAN);
            lo = lo.min(c);
            hi = hi.max(c);
        }
    }
    let mid = bounds(&m, &[FRAC_PI_4, 0.2, 0.9], Some(&[0, 1]))?
        .attainable_qcrb
        .unwrap_or(f64::NAN);
    let in_range = lo >= 2.0 - 1e-9 && hi <= 4.0 + 1e-9 && lo < 2.05 && hi > 3.95;
    Ok(Verdict::new(
        c_err <= 1e-6 && chain && in_range && (mid - 2.53590).abs() <= 1e-4,
        format!(
            "full-model max |C - 5| {c_err:.2e} (tol 1e-6), SLD < C <= (1+gamma) SLD: {chain}, \
             subspace C range [{lo:.5}, {hi:.5}], (alpha, beta) at pi/4 C = {mid:.5} \
             (expected 2.53590 +- 1e-4)"
        ),
    ))
}

fn audit() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("audit.json");
    let start = Instant::now();
    let status = Command::new(BIN)
        .args([
            "audit",
            "--n-models",
            "500",
            "--dims",
            "2-5",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("run audit");
    let secs = start.elapsed().as_secs_f64();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap_or_default())
            .unwrap_or_default();
    let failures = report["total_failures"].as_u64();
    Verdict::new(
        status.success() && failures == Some(0) && secs < 60.0,
        format!("500 models, failures {failures:?}, {secs:.2} s (limit 60 s)"),
    )
}

fn cross_route() -> qmetro::Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let models = [qubit_model::<f64>(), qutrit_model(), ququart_model()];
    let mut worst = 0.0f64;
    for m in &models {
        for _ in 0..10 {
            let values: Vec<f64> = m
                .axes()
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    if i == 0 {
                        rng.gen_range(0.1..1.4)
                    } else {
                        rng.gen_range(0.0..std::f64::consts::TAU)
                    }
                })
                .collect();
            let th = m.point(&values)?;
            let (g, f) = split(&qgt(m, &th, &analytic())?);
            let (gg, fg) = split(&qgt_from_generators(m, &th)?);
            let slds = sld_pure(m, &th, &analytic())?;
            let psi = m.amplitudes(th.values());
            let rho = outer(&psi, &psi);
            let js = qfim_from_sld(&rho, &slds)?.j;
            let fs = uhlmann_from_sld(&rho, &slds)?.f;
            let (jq, jg) = (qfim(&g)?.j, qfim(&gg)?.j);
            for (a, b) in [
                (&jq, &jg),
                (&jq, &js),
                (&jg, &js),
                (&f.f, &fg.f),
                (&f.f, &fs),
                (&fg.f, &fs),
            ] {
                worst = worst.max(a.sub(b).max_abs());
            }
        }
    }
    Ok(Verdict::new(
        worst <= 1e-7,
        format!(
            "qubit, qutrit, ququart at 10 points each: worst pairwise gap {worst:.2e} (tol 1e-7)"
        ),
    ))
}

fn topology() -> qmetro::Result<Verdict> {
    let start = Instant::now();
    let chern = chern_number(&qubit_model::<f64>(), (200, 200))?;
    let dd = dd_invariant(&qutrit_model::<f64>(), (100, 20, 20))?;
    let secs = start.elapsed().as_secs_f64();
    Ok(Verdict::new(
        (chern - 1.0).abs() <= 1e-3 && (dd - 1.0).abs() <= 1e-3 && secs < 30.0,
        format!("Chern {chern:.6}, Dixmier-Douady {dd:.6} (expected 1 +- 1e-3), {secs:.2} s (limit 30 s)"),
    ))
}

fn protocol() -> qmetro::Result<Verdict> {
    let start = Instant::now();
    let m = qutrit_model::<f64>();
    let mut worst = 0.0f64;
    for a in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
        let th = m.point(&[a, 0.0, 0.0])?;
        let rep = reconstruct_qgt(&th, &ProtocolConfig::new((1.0, 2.5), 0.05))?.report();
        let (g, f) = split(&qgt(&m, &th, &analytic())?);
        for (rec, direct) in [(&rep.g, &g.g), (&rep.f, &f.f)] {
            for i in 0..3 {
                for j in 0..3 {
                    let (x, y) = (rec[i][j], direct[(i, j)]);
                    let dev = if y.abs() < 0.02 {
                        (x - y).abs() / 0.02
                    } else {
                        ((x - y) / y).abs() / 0.03
                    };
                    worst = worst.max(dev);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Verdict::new(
        worst <= 1.0 && secs < 300.0,
        format!(
            "alpha in {{pi/8, pi/4, 3pi/8}}: worst deviation {:.1}% of tolerance, {secs:.1} s (limit 300 s)",
            100.0 * worst
        ),
    ))
}

fn ququart() -> qmetro::Result<Verdict> {
    let m = ququart_model::<f64>();
    let mut err = 0.0f64;
    for a in interior(0.0, FRAC_PI_2, 5) {
        err = err.max((bounds(&m, &[a, 0.3, 0.5, 0.7], None)?.gamma() - 1.0).abs());
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in closed(0.02, FRAC_PI_2 - 0.02, 40) {
        let g = bounds(&m, &[a, 0.3, 0.5, 0.7], Some(&[0, 1, 2]))?.gamma();
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok(Verdict::new(
        err <= 1e-6 && lo > 0.0 && hi < 1.0 && lo < 0.1 && hi > 0.9,
        format!(
            "full-model max |gamma - 1| {err:.2e} (tol 1e-6), (alpha, phi1, phi2) gamma range \
             [{lo:.4}, {hi:.4}]"
        ),
    ))
}

fn run_cli(args: &[&str], out: &Path) -> bool {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .is_ok_and(|s| s.success())
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let cases: [(&str, &[&str]); 5] = [
        (
            "geometry",
            &["geometry", "--model", "qutrit", "--theta", "0.6,0.2,0.9"],
        ),
        (
            "sweep",
            &[
                "sweep", "--model", "qutrit", "--axis", "alpha", "--start", "0.1", "--stop", "1.4",
                "--count", "25",
            ],
        ),
        (
            "topology",
            &["topology", "--model", "qubit", "--grid", "60,60"],
        ),
        ("audit", &["audit", "--n-models", "40", "--seed", "3"]),
        (
            "protocol",
            &["protocol", "--readout-noise", "0.01", "--seed", "5"],
        ),
    ];
    let mut bad = Vec::new();
    for (name, args) in cases {
        let paths: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|s| dir.path().join(format!("{name}.{s}")))
            .collect();
        let mut ok = run_cli(args, &paths[0]) && run_cli(args, &paths[1]);
        let manifest = format!("{}.manifest.json", paths[0].display());
        ok &= Command::new(BIN)
            .args(["replay", "--manifest", &manifest, "--out"])
            .arg(&paths[2])
            .status()
            .is_ok_and(|s| s.success());
        let read = |p: &Path| std::fs::read(p).unwrap_or_default();
        ok &= read(&paths[0]) == read(&paths[1]) && read(&paths[0]) == read(&paths[2]);
        ok &= paths
            .iter()
            .all(|p| Path::new(&format!("{}.manifest.json", p.display())).exists());
        if !ok {
            bad.push(name);
        }
    }
    Verdict::new(
        bad.is_empty(),
        format!("geometry, sweep, topology, audit, protocol: repeat and replay identical; mismatched {bad:?}"),
    )
}

fn main() {
    let criteria: Vec<(&str, Check)> = vec![
        (
            "analytic-matrix reproduction",
            Box::new(|| lift(qutrit_matrices())),
        ),
        ("qubit reference", Box::new(|| lift(qubit_reference()))),
        (
            "characterization number",
            Box::new(|| lift(characterization_number())),
        ),
        ("attainable QCRB", Box::new(|| lift(attainable_bound()))),
        ("sandwich and uncertainty audits", Box::new(audit)),
        (
            "cross-route QFIM equivalence",
            Box::new(|| lift(cross_route())),
        ),
        ("topological invariants", Box::new(|| lift(topology()))),
        ("protocol reconstruction", Box::new(|| lift(protocol()))),
        ("ququart", Box::new(|| lift(ququart()))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!("{tag} [{}] {name}: {}", k + 1, v.detail);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn lift(r: qmetro::Result<Verdict>) -> Verdict {
    r.unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")))
}
