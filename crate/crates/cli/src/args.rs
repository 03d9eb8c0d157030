use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "upfrac", version, about = "Uniqueness sets, density audits and phase functions for fractional operators")]
pub struct Cli {
    /// JSON file whose keys override the command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Beurling density estimates of F(Gamma).
    Density(DensityArgs),
    /// Non-uniqueness witness for a lattice and a multiplier.
    Nup(NupArgs),
    /// Phase-function checks for the zero sequence.
    Phase(PhaseArgs),
    /// One-shot evaluation of the fractional Laplacian.
    Fraclap(FraclapArgs),
    /// Envelope fit of sampled decay data.
    DecayAudit(DecayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::Nup(_) => "nup",
            Command::Phase(_) => "phase",
            Command::Fraclap(_) => "fraclap",
            Command::DecayAudit(_) => "decay-audit",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityArgs {
    /// Z_alpha, Lambda_alpha_c or lattice.
    #[arg(long, default_value = "Z_alpha")]
    pub set: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Lattice matrix, rows separated by ';'.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// identity, G_alpha or Phi_alpha_c.
    #[arg(long, default_value = "identity")]
    pub map: String,
    /// Radius of the window in the image F(Gamma).
    #[arg(long = "R", default_value_t = 1e3)]
    #[serde(rename = "R")]
    pub radius: f64,
    /// Window volumes; defaults to (R/50)^d, (R/10)^d, (R/4)^d.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    #[arg(long, default_value_t = upfrac_core::DEFAULT_POINT_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NupArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Lattice matrix, rows separated by ';'; identity when omitted.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: Option<String>,
    /// frac_laplacian, shifted_frac, unimodular, mixed or custom_radial.
    #[arg(long, default_value = "frac_laplacian")]
    pub multiplier: String,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Radial profile rows `[r, re, im]` for custom_radial (config only).
    #[arg(skip)]
    pub profile: Option<Vec<[f64; 3]>>,
    #[arg(long = "K", default_value_t = 20)]
    #[serde(rename = "K")]
    pub k: i64,
    /// direct_quadrature, periodization or unaligned.
    #[arg(long, default_value = "direct_quadrature")]
    pub mode: String,
    /// Residual threshold; 1e-8 for d = 1 and 1e-6 otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// P1, P2, theoremA, theoremB or blaschke.
    #[arg(long, default_value = "P1")]
    pub check: String,
    /// Sample window [0, X].
    #[arg(long = "X", default_value_t = 1e3)]
    #[serde(rename = "X")]
    pub window: f64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 24)]
    pub samples: usize,
    /// Largest truncation index of the zero sequence.
    #[arg(long = "n-max", default_value_t = 1 << 28)]
    pub n_max: u64,
    /// Set tested by theoremA: Z_alpha (same alpha) or lattice (the integers).
    #[arg(long, default_value = "Z_alpha")]
    pub gamma: String,
    /// Window radius of the tested set.
    #[arg(long = "R", default_value_t = 30.0)]
    #[serde(rename = "R")]
    pub radius: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FraclapArgs {
    /// gaussian, modulated_gaussian or lorentzian.
    #[arg(long, default_value = "gaussian")]
    pub function: String,
    /// Modulation frequency of modulated_gaussian.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    /// Evaluation point; the origin when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// singular, spectral or both.
    #[arg(long, default_value = "both")]
    pub method: String,
    /// Error target of the singular quadrature.
    #[arg(long, default_value_t = 1e-6)]
    pub target: f64,
    /// Half-width of the spectral grid; 8192 (d = 1), 256 (d = 2), 16 otherwise.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Points per axis of the spectral grid; 2^18 (d = 1), 2560 (d = 2), 64 otherwise.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayArgs {
    /// CSV with a header row; column 0 is |x|.
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding the sampled values.
    #[arg(long, default_value_t = 1)]
    pub column: usize,
    /// exp_power or poly.
    #[arg(long, default_value = "poly")]
    pub model: String,
    /// Largest admissible log-excess over the fitted envelope.
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
}
