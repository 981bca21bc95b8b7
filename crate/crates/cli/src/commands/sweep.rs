use rayon::prelude::*;
use serde::Serialize;

use qmetro::estimation::{evaluate_bounds, BoundReport, WeightKind};
use qmetro::matkernel::DEFAULT_RANK_TOL;
use qmetro::models::StateModel;

use super::{model, tangent_options};
use crate::args::{Format, SweepArgs};
use crate::output::{csv_number, json_text};
use crate::CliError;

/// First CSV column: the value of the swept axis.
pub const SWEEP_FIXED_COLUMNS: &[&str] = &["theta"];

/// Columns after the `J_a_b` (upper triangle) and `F_a_b` (strict upper
/// triangle) blocks, named by axis label.
pub const SWEEP_TRAILING_COLUMNS: &[&str] = &[
    "gamma",
    "sld_crb",
    "attainable_qcrb",
    "sandwich_mid",
    "sandwich_gamma",
];

fn resolve_axis(labels: &[String], key: &str) -> Result<usize, CliError> {
    if let Some(i) = labels.iter().position(|l| l == key) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(i) if i < labels.len() => Ok(i),
        _ => Err(CliError::Input(format!(
            "unknown axis `{key}` (expected one of {labels:?} or an index)"
        ))),
    }
}

pub fn header(labels: &[String]) -> Vec<String> {
    let d = labels.len();
    let mut cols: Vec<String> = SWEEP_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for i in 0..d {
        for j in i..d {
            cols.push(format!("J_{}_{}", labels[i], labels[j]));
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            cols.push(format!("F_{}_{}", labels[i], labels[j]));
        }
    }
    cols.extend(SWEEP_TRAILING_COLUMNS.iter().map(|s| s.to_string()));
    cols
}

fn row(x: f64, r: &BoundReport<f64>) -> Vec<Option<f64>> {
    let d = r.j.rows();
    let mut out = vec![Some(x)];
    for i in 0..d {
        for j in i..d {
            out.push(Some(r.j[(i, j)]));
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(Some(r.f[(i, j)]));
        }
    }
    out.extend([
        Some(r.gamma()),
        Some(r.sld_crb),
        r.attainable_qcrb,
        Some(r.sandwich_mid),
        Some(r.sandwich_gamma),
    ]);
    out
}

#[derive(Serialize)]
struct SweepTable<'a> {
    model: &'a str,
    axis: &'a str,
    weight: String,
    subspace: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

pub fn run(a: &SweepArgs) -> Result<String, CliError> {
    let m = model(&a.model)?;
    let labels: Vec<String> = m.axes().iter().map(|ax| ax.label.clone()).collect();
    let axis = resolve_axis(&labels, &a.axis)?;
    if a.count < 2 {
        return Err(CliError::Input(format!(
            "count must be at least 2, got {}",
            a.count
        )));
    }
    if !(a.start < a.stop) || !a.start.is_finite() || !a.stop.is_finite() {
        return Err(CliError::Input(format!(
            "start {} must be below stop {}",
            a.start, a.stop
        )));
    }
    let base = match &a.fixed {
        Some(v) if v.0.len() != labels.len() => {
            return Err(CliError::Input(format!(
                "--fixed needs {} values, got {}",
                labels.len(),
                v.0.len()
            )))
        }
        Some(v) => v.0.clone(),
        None => vec![0.0; labels.len()],
    };
    let sub: Option<Vec<usize>> = a
        .subspace
        .as_ref()
        .map(|s| s.0.iter().map(|k| resolve_axis(&labels, k)).collect())
        .transpose()?;
    let weight: WeightKind = a.weight.parse()?;
    let opts = tangent_options(&a.scheme, 1e-3)?;

    let step = (a.stop - a.start) / (a.count - 1) as f64;
    let xs: Vec<f64> = (0..a.count)
        .map(|k| {
            if k + 1 == a.count {
                a.stop
            } else {
                a.start + step * k as f64
            }
        })
        .collect();
    // Validate every point before evaluating any of them.
    let points = xs
        .iter()
        .map(|&x| {
            let mut v = base.clone();
            v[axis] = x;
            m.point(&v)
        })
        .collect::<qmetro::Result<Vec<_>>>()?;
    let reports = points
        .par_iter()
        .map(|th| evaluate_bounds(&m, th, &opts, sub.as_deref(), weight, DEFAULT_RANK_TOL))
        .collect::<qmetro::Result<Vec<_>>>()?;

    let sub_labels: Vec<String> = match &sub {
        Some(s) => s.iter().map(|&i| labels[i].clone()).collect(),
        None => labels.clone(),
    };
    let columns = header(&sub_labels);
    let rows: Vec<Vec<Option<f64>>> = xs.iter().zip(&reports).map(|(&x, r)| row(x, r)).collect();
    match a.format {
        Format::Csv => {
            let mut text = columns.join(",");
            text.push('\n');
            for r in &rows {
                let cells: Vec<String> = r
                    .iter()
                    .map(|c| c.map(csv_number).unwrap_or_default())
                    .collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            Ok(text)
        }
        Format::Json => json_text(&SweepTable {
            model: m.name(),
            axis: &labels[axis],
            weight: weight.to_string(),
            subspace: sub_labels,
            columns,
            rows,
        }),
    }
}
