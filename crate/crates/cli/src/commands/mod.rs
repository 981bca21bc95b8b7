mod audit;
mod protocol;
mod sweep;

pub use sweep::{SWEEP_FIXED_COLUMNS, SWEEP_TRAILING_COLUMNS};

use serde::Serialize;

use qmetro::estimation::{gamma_spectrum, qfim};
use qmetro::geometry::{chern_number, dd_invariant, qgt, split};
use qmetro::matkernel::{RMatrix, DEFAULT_RANK_TOL};
use qmetro::models::{builtin_by_name, BuiltinModel, DiffScheme, StateModel, TangentOptions};

use crate::args::{Command, GeometryArgs, TopologyArgs};
use crate::output::json_text;
use crate::CliError;

/// Rendered output plus the status to report once it has been written.
pub struct Rendered {
    pub body: String,
    pub status: Result<(), CliError>,
}

impl Rendered {
    fn ok(body: String) -> Self {
        Self {
            body,
            status: Ok(()),
        }
    }
}

pub fn execute(command: &Command) -> Result<Rendered, CliError> {
    match command {
        Command::Geometry(a) => geometry(a).map(Rendered::ok),
        Command::Sweep(a) => sweep::run(a).map(Rendered::ok),
        Command::Protocol(a) => protocol::run(a).map(Rendered::ok),
        Command::Topology(a) => topology(a).map(Rendered::ok),
        Command::Audit(a) => audit::run(a),
        Command::Replay(_) => Err(CliError::Input("replay cannot be nested".into())),
    }
}

pub(crate) fn model(name: &str) -> Result<BuiltinModel<f64>, CliError> {
    Ok(builtin_by_name(name)?)
}

pub(crate) fn tangent_options(scheme: &str, step: f64) -> Result<TangentOptions<f64>, CliError> {
    let scheme: DiffScheme = scheme.parse()?;
    if !(step > 0.0 && step < 1.0) {
        return Err(CliError::Input(format!(
            "step must lie in (0, 1), got {step}"
        )));
    }
    Ok(TangentOptions {
        step,
        ..TangentOptions::with_scheme(scheme)
    })
}

pub(crate) fn rows(m: &RMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

#[derive(Serialize)]
struct ComplexRows {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct GeometryReport {
    model: String,
    labels: Vec<String>,
    theta: Vec<f64>,
    scheme: String,
    method: String,
    chi: ComplexRows,
    g: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    f: Vec<Vec<f64>>,
    #[serde(rename = "J")]
    j: Vec<Vec<f64>>,
    gamma: f64,
}

fn geometry(a: &GeometryArgs) -> Result<String, CliError> {
    let m = model(&a.model)?;
    let th = m.point(&a.theta.0)?;
    let opts = tangent_options(&a.scheme, a.step)?;
    let q = qgt(&m, &th, &opts)?;
    let (g, f) = split(&q);
    let j = qfim(&g)?;
    let spectrum = gamma_spectrum(&j, &f, DEFAULT_RANK_TOL)?;
    json_text(&GeometryReport {
        model: m.name().into(),
        labels: th.labels().to_vec(),
        theta: th.values().to_vec(),
        scheme: opts.scheme.to_string(),
        method: q.method.to_string(),
        chi: ComplexRows {
            re: rows(&q.chi.re()),
            im: rows(&q.chi.im()),
        },
        g: rows(&g.g),
        f: rows(&f.f),
        j: rows(&j.j),
        gamma: spectrum.gamma,
    })
}

#[derive(Serialize)]
struct TopologyReport {
    invariant_name: &'static str,
    model: String,
    value: f64,
    grid: Vec<usize>,
}

fn topology(a: &TopologyArgs) -> Result<String, CliError> {
    let m = model(&a.model)?;
    let (name, grid, value) = match m.name() {
        "qubit" => {
            let grid = a.grid.clone().map_or(vec![200, 200], |g| g.0);
            let [n1, n2] = grid[..] else {
                return Err(CliError::Input(format!(
                    "the Chern number needs a two-axis grid, got {grid:?}"
                )));
            };
            ("chern_number", grid, chern_number(&m, (n1, n2))?)
        }
        "qutrit" => {
            let grid = a.grid.clone().map_or(vec![100, 20, 20], |g| g.0);
            let [n1, n2, n3] = grid[..] else {
                return Err(CliError::Input(format!(
                    "the Dixmier-Douady invariant needs a three-axis grid, got {grid:?}"
                )));
            };
            ("dixmier_douady", grid, dd_invariant(&m, (n1, n2, n3))?)
        }
        other => {
            return Err(CliError::Input(format!(
                "no topological invariant for model `{other}` (expected qubit or qutrit)"
            )))
        }
    };
    json_text(&TopologyReport {
        invariant_name: name,
        model: m.name().into(),
        value,
        grid,
    })
}
