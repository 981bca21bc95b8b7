//! Number formatting, output files and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::args::Command;
use crate::CliError;

/// Significant digits kept in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Locale-independent CSV cell: empty for non-finite values, plain decimals
/// for moderate magnitudes and exponent notation otherwise.
pub fn csv_number(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Rounds every floating-point number in `v` in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn json_text<S: Serialize>(value: &S) -> Result<String, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Provenance written next to every output file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &Command) -> Result<Self, CliError> {
        Ok(Self {
            command: command.name().into(),
            config: serde_json::to_value(command)
                .map_err(|e| CliError::Input(format!("cannot record configuration: {e}")))?,
            seed: command.seed(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: timestamp(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{} is not a run manifest: {e}", path.display())))
    }

    pub fn to_command(&self) -> Result<Command, CliError> {
        serde_json::from_value(self.config.clone())
            .map_err(|e| CliError::Input(format!("manifest configuration is invalid: {e}")))
    }
}

/// RFC 3339 time, taken from `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `content` and its manifest when the command has an output path,
/// otherwise prints it.
pub fn emit(command: &Command, content: &str) -> Result<(), CliError> {
    match command.out() {
        Some(path) => {
            let write = |p: &Path, text: &str| {
                fs::write(p, text)
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))
            };
            write(path, content)?;
            // Full precision so that replay reproduces the run exactly.
            let mut manifest = serde_json::to_string_pretty(&RunManifest::new(command)?)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            manifest.push('\n');
            write(&manifest_path(path), &manifest)
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(round_sig(0.5), 0.5);
        assert_eq!(round_sig(1.0 - 4e-13), 1.0);
        assert_eq!(csv_number(1e-20), "1e-20");
        assert_eq!(csv_number(0.25), "0.25");
        assert_eq!(csv_number(f64::NAN), "");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let mut v = serde_json::json!({"a": 0.1 + 0.2, "n": 3, "x": [1.0000000000001]});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":0.3,"n":3,"x":[1.0]}"#);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("/tmp/a.csv")),
            PathBuf::from("/tmp/a.csv.manifest.json")
        );
    }
}
