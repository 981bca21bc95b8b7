//! Command-line arguments. Every subcommand's arguments round-trip through
//! serde so a run manifest can replay them exactly.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "qmetro",
    version,
    about = "Quantum geometry and multi-parameter bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// QGT, metric, curvature and QFIM at one point.
    Geometry(GeometryArgs),
    /// Bounds along a one-axis sweep, as CSV or JSON.
    Sweep(SweepArgs),
    /// Simulated Rabi reconstruction of the qutrit QGT.
    Protocol(ProtocolArgs),
    /// Chern number (qubit) or Dixmier-Douady invariant (qutrit).
    Topology(TopologyArgs),
    /// Invariant checks on random unitary-family models.
    Audit(AuditArgs),
    /// Re-runs the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Geometry(_) => "geometry",
            Self::Sweep(_) => "sweep",
            Self::Protocol(_) => "protocol",
            Self::Topology(_) => "topology",
            Self::Audit(_) => "audit",
            Self::Replay(_) => "replay",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Protocol(a) => Some(a.seed),
            Self::Audit(a) => Some(a.seed),
            _ => None,
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Self::Geometry(a) => a.out.as_ref(),
            Self::Sweep(a) => a.out.as_ref(),
            Self::Protocol(a) => a.out.as_ref(),
            Self::Topology(a) => a.out.as_ref(),
            Self::Audit(a) => a.out.as_ref(),
            Self::Replay(a) => a.out.as_ref(),
        }
    }

    pub fn set_out(&mut self, path: Option<PathBuf>) {
        let slot = match self {
            Self::Geometry(a) => &mut a.out,
            Self::Sweep(a) => &mut a.out,
            Self::Protocol(a) => &mut a.out,
            Self::Topology(a) => &mut a.out,
            Self::Audit(a) => &mut a.out,
            Self::Replay(a) => &mut a.out,
        };
        *slot = path;
    }
}

/// Comma-separated reals, e.g. `0.7854,0,0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Reals(pub Vec<f64>);

impl FromStr for Reals {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("`{x}` is not a number: {e}"))
            })
            .collect::<Result<_, _>>()
            .map(Reals)
    }
}

/// Comma-separated positive integers, e.g. `200,200`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Counts(pub Vec<usize>);

impl FromStr for Counts {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("`{x}` is not a count: {e}"))
            })
            .collect::<Result<_, _>>()
            .map(Counts)
    }
}

/// Comma-separated axis labels or indices, e.g. `alpha,beta` or `0,1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxisList(pub Vec<String>);

impl FromStr for AxisList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(AxisList(
            s.split(',').map(|x| x.trim().to_string()).collect(),
        ))
    }
}

/// Inclusive integer range `lo-hi` or a single value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|e| format!("`{x}` is not an integer: {e}"))
        };
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Span { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryArgs {
    /// qubit, qutrit or ququart.
    #[arg(long)]
    pub model: String,
    /// Parameter values in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Reals,
    /// analytic, central2 or richardson.
    #[arg(long, default_value = "analytic")]
    pub scheme: String,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: String,
    /// Swept axis, by label or index.
    #[arg(long)]
    pub axis: String,
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long)]
    pub count: usize,
    /// Values of all axes; the swept entry is ignored. Defaults to zeros.
    #[arg(long, allow_hyphen_values = true)]
    pub fixed: Option<Reals>,
    /// Restrict the bounds to these axes.
    #[arg(long)]
    pub subspace: Option<AxisList>,
    /// qfim or identity.
    #[arg(long, default_value = "qfim")]
    pub weight: String,
    #[arg(long, default_value = "analytic")]
    pub scheme: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolArgs {
    /// Qutrit point `(α, β, φ)` in radians.
    #[arg(
        long,
        allow_hyphen_values = true,
        default_value = "0.7853981633974483,0,0"
    )]
    pub theta: Reals,
    #[arg(long, default_value = "1,2.5")]
    pub gaps: Reals,
    /// Modulation amplitude on every axis.
    #[arg(long, default_value_t = 0.05)]
    pub amplitude: f64,
    /// Per-axis amplitudes; overrides `--amplitude`.
    #[arg(long)]
    pub amplitudes: Option<Reals>,
    /// Standard deviation of Gaussian readout noise on fitted populations.
    #[arg(long, default_value_t = 0.0)]
    pub readout_noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyArgs {
    /// qubit (Chern number) or qutrit (Dixmier-Douady invariant).
    #[arg(long)]
    pub model: String,
    /// Grid sizes; defaults to 200,200 for the qubit and 100,20,20 for the qutrit.
    #[arg(long)]
    pub grid: Option<Counts>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditArgs {
    #[arg(long, default_value_t = 500)]
    pub n_models: usize,
    /// Hilbert-space dimensions, `lo-hi`.
    #[arg(long, default_value = "2-5")]
    pub dims: Span,
    /// Parameter counts, `lo-hi`.
    #[arg(long, default_value = "2-3")]
    pub params: Span,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Breaks the antisymmetry of every curvature matrix as a negative control.
    #[arg(long, hide = true)]
    pub inject_corrupt_f: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written next to an earlier output.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write the replayed output; defaults to the recorded path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
