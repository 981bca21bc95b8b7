use serde_json::{json, Value};

use qmetro::geometry::{qgt, split};
use qmetro::models::{qutrit_model, DiffScheme, StateModel, TangentOptions};
use qmetro::protocol::{reconstruct_qgt, ProtocolConfig};

use super::rows;
use crate::args::ProtocolArgs;
use crate::output::json_text;
use crate::CliError;

/// Entries of the direct tensor below this magnitude are compared absolutely.
pub const NEAR_ZERO: f64 = 0.02;

fn deviation(rec: &[Vec<f64>], direct: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rec.iter()
        .zip(direct)
        .map(|(r, d)| {
            r.iter()
                .zip(d)
                .map(|(&x, &y)| {
                    if y.abs() < NEAR_ZERO {
                        (x - y).abs()
                    } else {
                        ((x - y) / y).abs()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn run(a: &ProtocolArgs) -> Result<String, CliError> {
    let m = qutrit_model::<f64>();
    let th = m.point(&a.theta.0)?;
    let [d1, d2] = a.gaps.0[..] else {
        return Err(CliError::Input(format!(
            "--gaps needs two values, got {}",
            a.gaps.0.len()
        )));
    };
    let mut cfg = ProtocolConfig::new((d1, d2), a.amplitude);
    if let Some(amps) = &a.amplitudes {
        cfg.amplitudes = amps.0.clone();
    }
    if !(a.readout_noise >= 0.0) {
        return Err(CliError::Input(format!(
            "readout noise must be nonnegative, got {}",
            a.readout_noise
        )));
    }
    cfg.readout_noise = a.readout_noise;
    cfg.seed = a.seed;
    let rec = reconstruct_qgt(&th, &cfg)?;

    let (g, f) = split(&qgt(
        &m,
        &th,
        &TangentOptions::with_scheme(DiffScheme::Analytic),
    )?);
    let report = rec.report();
    let dev_g = deviation(&report.g, &rows(&g.g));
    let dev_f = deviation(&report.f, &rows(&f.f));
    let worst = dev_g
        .iter()
        .chain(&dev_f)
        .flatten()
        .fold(0.0f64, |m, &x| m.max(x));

    let mut out = serde_json::to_value(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    let obj = out.as_object_mut().expect("report is an object");
    obj.insert("seed".into(), json!(a.seed));
    obj.insert("readout_noise".into(), json!(a.readout_noise));
    obj.insert("direct".into(), json!({"g": rows(&g.g), "F": rows(&f.f)}));
    obj.insert(
        "deviation".into(),
        json!({
            "rule": format!("relative, or absolute where |direct| < {NEAR_ZERO}"),
            "g": dev_g,
            "F": dev_f,
            "max": worst,
        }),
    );
    json_text::<Value>(&out)
}
