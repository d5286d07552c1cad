//! Command-line front end. Every run is resolved into a complete
//! configuration (flags override the optional TOML file, which overrides the
//! built-in defaults) before any simulation starts.

mod commands;
pub mod range;

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "polar-detect", version, about = "Blind detection of polar-coded control messages")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Block length N.
    #[arg(short = 'N', long = "len", global = true)]
    pub len: Option<usize>,
    /// Message bits K (payload + identifier).
    #[arg(short = 'K', long = "info-bits", global = true)]
    pub info_bits: Option<usize>,
    /// CRC length C.
    #[arg(short = 'C', long = "crc-len", global = true)]
    pub crc_len: Option<usize>,
    /// Bhattacharyya design parameter.
    #[arg(long, global = true)]
    pub design_param: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Stop rule: minimum blocks per BLER point.
    #[arg(long, global = true)]
    pub min_blocks: Option<u64>,
    /// Stop rule: minimum block errors per BLER point.
    #[arg(long, global = true)]
    pub min_errors: Option<u64>,
    /// Stop rule: hard cap on blocks per BLER point.
    #[arg(long, global = true)]
    pub max_blocks: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BLER versus Eb/N0, one CSV per decoder.
    Bler(BlerArgs),
    /// Missed-detection rate versus the number of retained candidates.
    Mdr(MdrArgs),
    /// Eb/N0 at which a decoder reaches a target BLER.
    Calibrate(CalibrateArgs),
    /// Frozen/information sets and the Fast-SSC leaf decomposition.
    CodeInfo,
}

#[derive(Debug, Args)]
pub struct BlerArgs {
    /// Decoders (sc, fastssc, bp<I>, scl<L>, scl<L>-nocrc); default: sc,bp15,bp50,scl2,scl4.
    #[arg(long, value_delimiter = ',')]
    pub decoder: Vec<String>,
    /// Eb/N0 sweep in dB, e.g. 3.0:6.0:0.5.
    #[arg(long)]
    pub ebn0: Option<String>,
    /// Noise-free channel (smoke test; every point reports FER = 0).
    #[arg(long)]
    pub noiseless: bool,
}

#[derive(Debug, Args)]
pub struct MdrArgs {
    /// ls, fs, re or fastssc.
    #[arg(long)]
    pub method: Option<String>,
    /// BP iteration sweep (ls, fs, re).
    #[arg(long)]
    pub iters: Option<String>,
    /// Contributing-leaf sweep (fastssc).
    #[arg(long)]
    pub t: Option<String>,
    /// Let SPC leaves contribute to the Fast-SSC metric.
    #[arg(long, conflicts_with = "no_spc")]
    pub include_spc: bool,
    /// Skip SPC leaves in the Fast-SSC metric (default).
    #[arg(long)]
    pub no_spc: bool,
    /// Retained-candidate sweep.
    #[arg(long = "B")]
    pub b: Option<String>,
    /// Candidate blocks per trial, M.
    #[arg(long = "M")]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Operating point in dB; calibrated with CA-SCL when absent.
    #[arg(long)]
    pub ebn0: Option<f64>,
    /// BLER target used when calibrating the operating point.
    #[arg(long)]
    pub target: Option<f64>,
    /// List size of the decodability oracle.
    #[arg(long)]
    pub oracle_list: Option<usize>,
    /// Also run CA-SCL with this list size on every retained set.
    #[arg(long)]
    pub second_stage: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub decoder: Option<String>,
    /// Lower end of the search range (dB).
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the search range (dB).
    #[arg(long)]
    pub hi: Option<f64>,
}

/// A sweep in the config file: `"1:44"`, `4.0` or `[2, 3, 15]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    Text(String),
    Number(f64),
    List(Vec<f64>),
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sweep::Text(s) => f.write_str(s),
            Sweep::Number(v) => write!(f, "{v}"),
            Sweep::List(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub len: Option<usize>,
    pub info_bits: Option<usize>,
    pub crc_len: Option<usize>,
    pub design_param: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub min_blocks: Option<u64>,
    pub min_errors: Option<u64>,
    pub max_blocks: Option<u64>,
    #[serde(default)]
    pub bler: BlerFile,
    #[serde(default)]
    pub mdr: MdrFile,
    #[serde(default)]
    pub calibrate: CalibrateFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlerFile {
    pub decoders: Option<Vec<String>>,
    pub ebn0: Option<Sweep>,
    pub noiseless: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdrFile {
    pub method: Option<String>,
    pub iters: Option<Sweep>,
    pub t: Option<Sweep>,
    pub include_spc: Option<bool>,
    #[serde(rename = "B")]
    pub b: Option<Sweep>,
    #[serde(rename = "M")]
    pub blocks: Option<usize>,
    pub trials: Option<u64>,
    pub ebn0: Option<f64>,
    pub target: Option<f64>,
    pub oracle_list: Option<usize>,
    pub second_stage: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateFile {
    pub target: Option<f64>,
    pub decoder: Option<String>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// How the process should exit.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or parameters: exit code 2.
    Usage(anyhow::Error),
    /// The run itself failed: exit code 1.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}
