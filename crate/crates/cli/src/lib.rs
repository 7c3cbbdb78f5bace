//! `icc-kit`: simulations, leakage audits, key-size curves and property
//! checks on top of `icc-core`.
//!
//! Every subcommand reads an optional JSON config, fills in defaults, and
//! records the resolved config (including the seed) at the top of its output
//! so a run can be reproduced from its own output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use icc_core::infometrics::{EpsilonCVariant, DEFAULT_CAP};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub mod audit;
pub mod curves;
pub mod metrics;
pub mod simulate;

#[derive(Debug, Parser)]
#[command(
    name = "icc-kit",
    version,
    about = "Confidential distributed polynomial evaluation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GlobalOpts {
    /// JSON config file; missing fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file (or directory for keysize-curves); stdout if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Maximum number of joint outcomes q^(n+m) to enumerate.
    #[arg(long, global = true, env = "ICC_KIT_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u64,

    /// Which factor the leakage bound uses.
    #[arg(long, global = true, value_enum, default_value_t = Variant::Sharp)]
    pub variant: Variant,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        Self {
            config: None,
            out: None,
            seed: None,
            cap: DEFAULT_CAP,
            variant: Variant::Sharp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Sharp,
    Conservative,
}

impl From<Variant> for EpsilonCVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Sharp => EpsilonCVariant::Sharp,
            Variant::Conservative => EpsilonCVariant::Conservative,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run storage and computation phases and compare against direct evaluation.
    Simulate,
    /// Exact leakage audit over an ensemble of random codes (CSV).
    Audit,
    /// Key size as a function of leakage and of data entropy (CSV).
    KeysizeCurves,
    /// Batch run of the entropy and divergence inequality checks (JSON).
    MetricsCheck,
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone)]
pub struct Report {
    /// Named output documents. Single-output commands use one entry.
    pub files: Vec<(String, String)>,
    /// False when a checked property failed (exit code 1).
    pub passed: bool,
}

impl Report {
    fn single(name: &str, body: String, passed: bool) -> Self {
        Self {
            files: vec![(name.to_string(), body)],
            passed,
        }
    }
}

pub fn run(command: &Command, opts: &GlobalOpts) -> anyhow::Result<Report> {
    match command {
        Command::Simulate => simulate::run(load_config(opts.config.as_deref())?, opts),
        Command::Audit => audit::run(load_config(opts.config.as_deref())?, opts),
        Command::KeysizeCurves => curves::run(load_config(opts.config.as_deref())?, opts),
        Command::MetricsCheck => metrics::run(load_config(opts.config.as_deref())?, opts),
    }
}

/// Writes a report to `--out` (a file, or a directory when there are several
/// documents) or to stdout.
pub fn emit(report: &Report, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        None => {
            for (_, body) in &report.files {
                print!("{body}");
            }
        }
        Some(path) if report.files.len() > 1 => {
            fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
            for (name, body) in &report.files {
                let p = path.join(name);
                fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Some(path) => {
            let (_, body) = &report.files[0];
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

/// `# {json}` header line.
pub(crate) fn comment_line<T: Serialize>(value: &T) -> String {
    format!(
        "# {}\n",
        serde_json::to_string(value).expect("serializable")
    )
}

pub(crate) fn json_document<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Machine-readable error body for stderr.
pub fn error_json(err: &anyhow::Error) -> String {
    let chain: Vec<String> = err.chain().map(ToString::to_string).collect();
    serde_json::json!({ "error": err.to_string(), "causes": chain }).to_string()
}
