//! `rotdim`: maximize the first nonzero Laplacian eigenvalue of a graph,
//! extract the dual embedding and certify the pair.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 file/parse error or bad
//! separator, 3 disconnected input, 4 solver did not converge (report still
//! written), 5 family parameters out of range, 6 certification failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotdim::families::Family;
use rotdim::io::{embedding_to_csv, graph_from_json_value, read_graph, to_json_17};
use rotdim::{Embedding, EdgeWeights, Error, Graph, SolverConfig};

use report::{analyze, certify, Options};

#[derive(Parser)]
#[command(name = "rotdim", version, about = "Laplacian eigenvalue maximization and dual graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, extract and certify a graph file; print the JSON report.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Same pipeline on a generated family instance, compared with its closed form.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Certify a report file, a graph file (solved first) or `family NAME`.
    Verify {
        /// Report or graph file, or the word `family`.
        target: String,
        /// Family name when `target` is `family`.
        name: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated 1-based separator vertices for the shadow check.
        #[arg(long)]
        separator: Option<String>,
        /// Residual threshold; defaults to 1e-10 for families, 1e-3 otherwise.
        #[arg(long)]
        cert_tol: Option<f64>,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// complete, kn-minus-e, gmk or g23.
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long)]
    step_scale: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = rotdim::linalg::RANK_TOL)]
    rank_tol: f64,
    /// Relative eigenvalue window treated as the first eigenspace during extraction.
    #[arg(long, default_value_t = 1e-3)]
    cluster_tol: f64,
}

#[derive(Args)]
struct OutputFlags {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    export_embedding: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::NotASeparator
            | Error::VertexOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::DuplicateEdge(..)
            | Error::NonPositiveParameter { .. }
            | Error::LengthMismatch { .. } => 2,
            Error::Disconnected => 3,
            Error::ParameterOutOfRange(_) => 5,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl SolverFlags {
    fn options(&self) -> Options {
        Options {
            solver: SolverConfig {
                max_iters: self.max_iters,
                step_scale: self.step_scale,
                tol: self.tol,
                seed: self.seed,
                ..SolverConfig::default()
            },
            rank_tol: self.rank_tol,
            cluster_tol: self.cluster_tol,
        }
    }
}

fn parse_family(name: &str, n: Option<usize>, m: Option<usize>, k: Option<usize>) -> Result<Family, Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| fail(2, format!("family {name} needs --{flag}")));
    match name {
        "complete" => Ok(Family::Complete { n: need(n, "n")? }),
        "kn-minus-e" => Ok(Family::KnMinusEdge { n: need(n, "n")? }),
        "gmk" => Ok(Family::Gmk { m: need(m, "m")?, k: need(k, "k")? }),
        "g23" => Ok(Family::G23),
        other => Err(fail(2, format!("unknown family {other:?}; expected complete, kn-minus-e, gmk or g23"))),
    }
}

// a closed pipe on stdout is not worth a panic
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn run_pipeline(g: &Graph, solver: &SolverFlags, output: &OutputFlags) -> Result<u8, Failure> {
    let out = analyze(g, &solver.options())?;
    let json = to_json_17(&out.report)?;
    match &output.out {
        Some(path) => write_file(path, &(json + "\n"))?,
        None => emit(&json),
    }
    if let Some(path) = &output.export_embedding {
        write_file(path, &embedding_to_csv(&out.embedding))?;
    }
    if !out.report.solver.converged {
        eprintln!("solver stopped at {} iterations without converging", out.report.solver.iterations);
        return Ok(4);
    }
    Ok(0)
}

fn parse_separator(text: &str, n: usize) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
            _ => Err(fail(2, format!("bad separator vertex {t:?} (1-based, at most {n})"))),
        })
        .collect()
}

/// Weights, embedding and `lambda1` stored in a report file.
fn certificate_from_report(value: &serde_json::Value) -> Result<(Graph, EdgeWeights, Embedding, f64), Failure> {
    let g = graph_from_json_value(&value["graph"])?;
    let bad = |what: &str| fail(2, format!("report is missing {what}"));
    let weights: Vec<f64> =
        serde_json::from_value(value["solver"]["weights"].clone()).map_err(|_| bad("solver.weights"))?;
    let coords: Vec<Vec<f64>> =
        serde_json::from_value(value["embedding"]["coords"].clone()).map_err(|_| bad("embedding.coords"))?;
    let lambda1 = value["solver"]["lambda1"].as_f64().ok_or_else(|| bad("solver.lambda1"))?;
    Ok((g, EdgeWeights::new(weights)?, Embedding::new(coords)?, lambda1))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze { file, solver, output } => run_pipeline(&read_graph(&file)?, &solver, &output),
        Command::Family { family, solver, output } => {
            let fam = parse_family(&family.name, family.n, family.m, family.k)?;
            let g = fam.analytic()?.graph;
            run_pipeline(&g, &solver, &output)
        }
        Command::Verify { target, name, n, m, k, separator, cert_tol, solver } => {
            let (g, w, v, lambda1, default_tol) = if target == "family" {
                let name = name.ok_or_else(|| fail(2, "verify family needs a family name"))?;
                let sol = parse_family(&name, n, m, k)?.analytic()?;
                (sol.graph, sol.w, sol.embedding, sol.lambda1, 1e-10)
            } else {
                let text = std::fs::read_to_string(&target).map_err(|e| fail(2, format!("{target}: {e}")))?;
                let value: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| fail(2, format!("{target}: {e}")))?;
                if value.get("schema").is_some() {
                    let (g, w, v, lambda1) = certificate_from_report(&value)?;
                    (g, w, v, lambda1, 1e-3)
                } else {
                    let g = graph_from_json_value(&value)?;
                    let out = analyze(&g, &solver.options())?;
                    let w = EdgeWeights::new(out.report.solver.weights.clone())?;
                    (g, w, out.embedding, out.report.solver.lambda1, 1e-3)
                }
            };
            let sep = separator.as_deref().map(|s| parse_separator(s, g.n())).transpose()?;
            let tol = cert_tol.unwrap_or(default_tol);
            let result = certify(&g, &w, &v, lambda1, sep.as_deref(), tol)?;
            emit(&to_json_17(&result)?);
            if result.certified {
                Ok(0)
            } else {
                eprintln!("certification failed: {}", result.failing.join(", "));
                Ok(6)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
