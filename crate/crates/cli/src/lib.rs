//! Command implementations behind the `hypergeo` binary.
//!
//! Every command produces a JSON document (the machine contract) plus a flag
//! telling whether any checked property was falsified.

pub mod commands;
pub mod record;
pub mod svg;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use hypergeo::development::GeodesicClass;
use thiserror::Error;

/// Tolerance used by the checks unless `HYPERGEO_TOL` overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(#[from] hypergeo::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

/// Result of a command: the JSON document and whether a check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: serde_json::Value,
    pub falsified: bool,
}

impl Outcome {
    pub fn ok(value: serde_json::Value) -> Self {
        Outcome { value, falsified: false }
    }

    pub fn exit_code(&self) -> u8 {
        if self.falsified {
            3
        } else {
            0
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string(&self.value).expect("JSON values always serialize")
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypergeo", version, about = "Closed geodesics on regular hyperbolic tetrahedra")]
pub struct Cli {
    /// Print human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric data of the tetrahedron.
    #[command(subcommand)]
    Tetra(TetraCmd),
    /// Closed geodesics.
    #[command(subcommand)]
    Geodesic(GeodesicCmd),
    /// Self-intersections of geodesics on cones.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Lines on the flat triangular lattice.
    #[command(subcommand)]
    Euclid(EuclidCmd),
}

#[derive(Debug, Subcommand)]
pub enum TetraCmd {
    Info {
        /// Face angle, in (0, pi/3).
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeodesicCmd {
    /// Build one of the canonical classes from its edge midpoints.
    Construct {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Write the developed strip as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write the record to a file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Solve an arbitrary cyclic sequence given as `edge:face` tokens.
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Comma-separated `exit_edge:entered_face` tokens, e.g. `12:124,24:234`.
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConeCmd {
    /// Self-intersection count of one geodesic.
    Count {
        #[arg(long, allow_negative_numbers = true)]
        full_angle: f64,
        /// Distance from the apex; required for hyperbolic cones.
        #[arg(long, allow_negative_numbers = true)]
        distance: Option<f64>,
        #[arg(long, value_enum, default_value_t = GeometryArg::Hyp)]
        geometry: GeometryArg,
    },
    /// Closed form against development on random samples.
    Sweep {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GeometryArg::Hyp)]
        geometry: GeometryArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum EuclidCmd {
    /// Midpoint and quarter checks for every coprime (p, q), q odd, q + 2p <= max.
    Survey {
        #[arg(long, default_value_t = 21)]
        max: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    G2,
    G3,
    G32,
}

impl From<ClassArg> for GeodesicClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::G2 => GeodesicClass::G2,
            ClassArg::G3 => GeodesicClass::G3,
            ClassArg::G32 => GeodesicClass::G32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Hyp,
    Euc,
}

/// Check tolerance from `HYPERGEO_TOL`, if set.
pub fn tolerance_from_env() -> Result<f64, CliError> {
    match std::env::var("HYPERGEO_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Usage(format!("HYPERGEO_TOL must be a positive number, got {s:?}"))),
        },
    }
}

pub fn run(cli: &Cli, tol: f64) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Tetra(TetraCmd::Info { alpha }) => commands::tetra_info(*alpha),
        Command::Geodesic(GeodesicCmd::Construct { class, alpha, svg, json }) => {
            commands::construct((*class).into(), *alpha, tol, svg.as_deref(), json.as_deref())
        }
        Command::Geodesic(GeodesicCmd::Solve { alpha, sequence, svg, json }) => {
            commands::solve(sequence, *alpha, tol, svg.as_deref(), json.as_deref())
        }
        Command::Cone(ConeCmd::Count { full_angle, distance, geometry }) => {
            commands::cone_count(*full_angle, *distance, *geometry)
        }
        Command::Cone(ConeCmd::Sweep { samples, seed, geometry }) => commands::cone_sweep(*samples, *seed, *geometry),
        Command::Euclid(EuclidCmd::Survey { max }) => commands::euclid_survey(*max),
    }
}
