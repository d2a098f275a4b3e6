//! Command implementations behind the `ebnull` binary.
//!
//! Each command reads a channel (or an operator subspace), runs the matching
//! pipeline from the core crate and returns a JSON report. Reports are
//! deterministic in their inputs apart from the `timing_ms` field.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ebnull::channel::eb_check;
use ebnull::mixed_unitary::{build_privatizing_channel, obstruction_report, SearchConfig};
use ebnull::nullspace::{channel_nullspace, synthesize_annihilator, NULLSPACE_MATCH_TOL};
use ebnull::operator::identity;
use ebnull::privacy::{
    constant_diagonal_algebra, kraus_partition, rank_one_private_algebra, same_rank_private_algebra,
    traceless_part, verify_private,
};
use ebnull::{io, Channel, ChannelReport, PrivatizationCertificate, Tolerance};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Parser)]
#[command(name = "ebnull", version, about = "Nullspaces, mixed-unitary tests and private algebras of quantum channels")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Absolute tolerance for numerical comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Relative gap below which singular values count as zero.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub rank_gap: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts for the mixed-unitary search.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Largest number of unitaries tried by the mixed-unitary search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_terms: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelSource {
    /// Named example channel, e.g. `depolarizing(2)` or `biunitary(Z, 0.3)`.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
    /// Channel JSON file; `-` reads standard input.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a channel, test entanglement breaking and compute its nullspace.
    Analyze(ChannelSource),
    /// Build an entanglement-breaking channel with a prescribed nullspace.
    Synthesize {
        /// Operator subspace JSON file; `-` reads standard input.
        file: PathBuf,
        /// Also write the synthesized channel JSON here.
        #[arg(long)]
        channel_out: Option<PathBuf>,
    },
    /// Decide or search for a mixed-unitary decomposition.
    MixedUnitary(ChannelSource),
    /// Find private algebras of an entanglement-breaking channel.
    Privatize(ChannelSource),
    /// Print a named example channel as JSON (`list` prints the names).
    Example { name: String },
}

#[derive(Debug)]
pub enum CliError {
    Core(ebnull::Error),
    Read(PathBuf, std::io::Error),
    Write(PathBuf, std::io::Error),
    Json(serde_json::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
            CliError::Json(e) => write!(f, "malformed JSON: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ebnull::Error> for CliError {
    fn from(e: ebnull::Error) -> Self {
        CliError::Core(e)
    }
}

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ebnull::Error as E;
        match self {
            CliError::Json(_) | CliError::Read(..) | CliError::Core(E::Parse(_)) => EXIT_PARSE,
            CliError::Core(E::Verification(_) | E::ConstructionUnverified { .. }) | CliError::Write(..) => {
                EXIT_VERIFICATION
            }
            CliError::Core(_) | CliError::Usage(_) => EXIT_VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl RunConfig {
    pub fn tolerance(&self) -> CliResult<Tolerance> {
        Ok(Tolerance::new(self.tol, self.rank_gap)?)
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            max_terms: self.max_terms.map(|m| m as usize),
            restarts: self.restarts as usize,
            seed: self.seed,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "tol": io::number(self.tol),
            "rank_gap": io::number(self.rank_gap),
            "seed": self.seed,
            "restarts": self.restarts,
            "max_terms": self.max_terms,
        })
    }
}

fn read_source(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Read(path.to_path_buf(), e))
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))
    }
}

fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(CliError::Json)
}

/// Loads the channel and returns it together with the bytes that identify it
/// in the inputs digest.
fn load_channel(src: &ChannelSource, config: &RunConfig, tol: &Tolerance) -> CliResult<(Channel, String)> {
    match (&src.builtin, &src.file) {
        (Some(name), _) => Ok((io::builtin(name, config.seed, tol)?, format!("builtin:{name}"))),
        (None, Some(path)) => {
            let text = read_source(path)?;
            let phi = io::channel_from_json(&parse_json(&text)?, tol)?;
            Ok((phi, text))
        }
        (None, None) => Err(CliError::Usage("give a channel file or --builtin NAME".into())),
    }
}

fn digest(command: &str, input: &str, config: &RunConfig) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(input.as_bytes());
    h.update([0]);
    h.update(config.to_json().to_string().as_bytes());
    hex::encode(h.finalize())
}

fn channel_report_json(r: &ChannelReport) -> Value {
    let mut obj = json!({
        "is_tp": r.is_tp,
        "tp_residual": io::number(r.tp_residual),
        "is_cp": r.is_cp,
        "choi_min_eigenvalue": io::number(r.choi_min_eigenvalue),
        "choi_rank": r.choi_rank,
        "ppt": r.ppt,
        "partial_transpose_min_eigenvalue": io::number(r.partial_transpose_min_eigenvalue),
        "verdict": r.verdict,
    });
    if let Some(terms) = &r.eb_certificate {
        obj["eb_certificate"] = io::rank_one_to_json(terms);
    }
    obj
}

struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

impl Report {
    fn new(command: &str, input: &str, config: &RunConfig) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("inputs_digest".into(), json!(digest(command, input, config)));
        fields.insert("config".into(), config.to_json());
        Report {
            fields,
            started: Instant::now(),
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    fn finish(mut self) -> Value {
        let ms = self.started.elapsed().as_secs_f64() * 1e3;
        self.fields.insert("timing_ms".into(), io::number(ms));
        Value::Object(self.fields)
    }
}

pub fn cmd_analyze(src: &ChannelSource, config: &RunConfig) -> CliResult<Value> {
    let tol = config.tolerance()?;
    let (phi, input) = load_channel(src, config, &tol)?;
    let mut report = Report::new("analyze", &input, config);
    report.set("channel_report", channel_report_json(&eb_check(&phi, &tol)));
    let kernel = channel_nullspace(&phi, &tol);
    report.set("nullspace_dim", json!(kernel.dim()));
    report.set("nullspace", io::subspace_to_json(&kernel));
    Ok(report.finish())
}

pub fn cmd_synthesize(file: &Path, channel_out: Option<&Path>, config: &RunConfig) -> CliResult<Value> {
    let tol = config.tolerance()?;
    let text = read_source(file)?;
    let target = io::subspace_from_json(&parse_json(&text)?, &tol)?;
    let mut report = Report::new("synthesize", &text, config);
    let (phi, recipe) = synthesize_annihilator(&target, config.seed, &tol)?;
    let kernel = channel_nullspace(&phi, &tol);
    let distance = kernel.span_distance(&target);
    let verified = distance <= NULLSPACE_MATCH_TOL;
    if !verified {
        return Err(ebnull::Error::Verification(format!(
            "synthesized nullspace differs from the target by {distance:.3e}"
        ))
        .into());
    }
    let channel_json = io::channel_to_json(&phi);
    if let Some(path) = channel_out {
        write_json(path, &channel_json)?;
    }
    report.set("channel", channel_json);
    report.set("recipe", io::recipe_to_json(&recipe));
    report.set(
        "verification",
        json!({
            "verified": verified,
            "nullspace_dim": kernel.dim(),
            "target_dim": target.dim(),
            "span_distance": io::number(distance),
        }),
    );
    report.set("nullspace", io::subspace_to_json(&kernel));
    Ok(report.finish())
}

pub fn cmd_mixed_unitary(src: &ChannelSource, config: &RunConfig) -> CliResult<Value> {
    let tol = config.tolerance()?;
    let (phi, input) = load_channel(src, config, &tol)?;
    let mut report = Report::new("mixed-unitary", &input, config);
    report.set("channel_report", channel_report_json(&eb_check(&phi, &tol)));
    let obstruction = obstruction_report(&phi, &config.search(), &tol)?;
    let privatizing = obstruction
        .decomposition
        .as_ref()
        .map(|d| build_privatizing_channel(&phi, d, &tol))
        .transpose()?;
    report.set(
        "mixed_unitary",
        io::mixed_unitary_to_json(&phi, &obstruction, privatizing.as_ref()),
    );
    Ok(report.finish())
}

fn certificate_json(phi: &Channel, cert: &PrivatizationCertificate, kind: &str, tol: &Tolerance) -> CliResult<Value> {
    let kernel = channel_nullspace(phi, tol);
    let traceless = traceless_part(phi.n_in(), &cert.algebra_basis, tol)?;
    let mut obj = io::certificate_to_json(cert);
    obj["kind"] = json!(kind);
    obj["nullspace_containment_residual"] = io::number(kernel.containment_residual(&traceless));
    Ok(obj)
}

pub fn cmd_privatize(src: &ChannelSource, config: &RunConfig) -> CliResult<Value> {
    let tol = config.tolerance()?;
    let (phi, input) = load_channel(src, config, &tol)?;
    let mut report = Report::new("privatize", &input, config);
    let eb = eb_check(&phi, &tol);
    report.set("channel_report", channel_report_json(&eb));

    let mut certs = Vec::new();
    let n = phi.n_in();
    let scalars = verify_private(&phi, &[identity(n)], None, &tol)?;
    certs.push(certificate_json(&phi, &scalars, "scalar", &tol)?);
    let mut notes = Vec::new();

    if eb.eb_certificate.is_none() {
        notes.push(json!("no rank-one Kraus form available; partition-based constructions skipped"));
    } else {
        for cert in rank_one_private_algebra(&phi, &tol) {
            certs.push(certificate_json(&phi, &cert, "rank_one", &tol)?);
        }
        match kraus_partition(&phi, &tol) {
            Ok(part) => {
                let r = part.classes.len();
                report.set(
                    "partition",
                    json!({
                        "classes": part.classes,
                        "merges": part.merges,
                        "lemma_residual": io::number(part.lemma_residual),
                    }),
                );
                if r > 1 {
                    let mut algebras = vec![constant_diagonal_algebra(r, &vec![(1, 1); r], &tol)];
                    let m = (r as f64).sqrt().round() as usize;
                    if m > 1 && m * m == r {
                        algebras.push(constant_diagonal_algebra(r, &[(m, m)], &tol));
                    }
                    for alg in algebras {
                        let alg = alg?;
                        match same_rank_private_algebra(&phi, &part.p[..r], &alg.basis, &tol) {
                            Ok(mut cert) => {
                                cert.structure = format!("{} ({} construction)", cert.structure, alg.construction);
                                certs.push(certificate_json(&phi, &cert, "same_rank", &tol)?);
                            }
                            Err(e) => notes.push(json!(format!("same-rank construction skipped: {e}"))),
                        }
                    }
                }
            }
            Err(e) => notes.push(json!(format!("partition unavailable: {e}"))),
        }
    }
    report.set("certificates", Value::Array(certs));
    report.set("notes", Value::Array(notes));
    Ok(report.finish())
}

pub fn cmd_example(name: &str, config: &RunConfig) -> CliResult<Value> {
    if name == "list" {
        return Ok(json!(io::BUILTIN_NAMES));
    }
    let tol = config.tolerance()?;
    Ok(io::channel_to_json(&io::builtin(name, config.seed, &tol)?))
}

fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::Json)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Write(path.to_path_buf(), e))
}

/// Runs the parsed command and writes its output; returns the exit code.
pub fn run(cli: &Cli) -> CliResult<Value> {
    let config = &cli.config;
    let value = match &cli.command {
        Command::Analyze(src) => cmd_analyze(src, config)?,
        Command::Synthesize { file, channel_out } => cmd_synthesize(file, channel_out.as_deref(), config)?,
        Command::MixedUnitary(src) => cmd_mixed_unitary(src, config)?,
        Command::Privatize(src) => cmd_privatize(src, config)?,
        Command::Example { name } => cmd_example(name, config)?,
    };
    match &config.out {
        Some(path) => write_json(path, &value)?,
        None => println!("{}", serde_json::to_string_pretty(&value).map_err(CliError::Json)?),
    }
    Ok(value)
}
