use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use mfact::approx::Side;
use mfact::catalog::Label;
use mfact::error::{Error, Result};

mod commands;
mod repro;
mod report;

use commands::Session;
use report::{CommandEcho, ErrorReport, Outcome, Report, Status, SCHEMA, USAGE};

#[derive(Parser, Debug)]
#[command(name = "mfact", version, about = "Matrix factorizations, branched covers and approximation sequences")]
struct Cli {
    /// `q` or `fp:P`; overrides the field of input files.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Truncation degree; overrides input files.
    #[arg(long, global = true)]
    prec: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the v1 JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Derive bundled catalogs again instead of loading fixtures.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the factorization identities of an MF file.
    Verify { file: PathBuf },
    /// Tensor product of two factorizations in disjoint variables.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Branched cover over `f + y^n`.
    Cover {
        file: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        var: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Indecomposable summands, named against a catalog when given.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<String>,
    },
    /// Right or left approximation sequence by Σ_k.
    Approx {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "right")]
        side: Side,
        #[arg(long)]
        catalog: Option<String>,
    },
    /// Σ_k membership for every k with the equivalent verdicts.
    Sigma {
        file: PathBuf,
        #[arg(long)]
        catalog: Option<String>,
    },
    /// Endomorphism quiver of a sum of monomial ideals.
    Quiver {
        /// Semigroup generators `a,b`.
        #[arg(long, requires = "ideals")]
        ring: Option<String>,
        /// `NAME=(t^3,t^8)` or `(t^3,t^8)`.
        #[arg(long, num_args = 1..)]
        ideals: Vec<String>,
        /// Use the Σ_1 ideals of `e6` or `e8`.
        #[arg(long, conflicts_with = "ring")]
        catalog: Option<String>,
        /// Leave out the ring itself as a vertex.
        #[arg(long)]
        no_ring: bool,
        #[arg(long)]
        dot: bool,
    },
    /// Projective resolutions of simple modules over the endomorphism ring.
    Resolve {
        #[arg(long, default_value = "e6")]
        catalog: String,
        /// All vertices when omitted.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Dimension bounds for `x_0^{a_0} + ... + x_d^{a_d}`.
    Bounds {
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u32>,
    },
    /// Run a worked example end to end against golden facts.
    Repro { label: Label },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Verify { .. } => "verify",
            Cmd::Tensor { .. } => "tensor",
            Cmd::Cover { .. } => "cover",
            Cmd::Decompose { .. } => "decompose",
            Cmd::Approx { .. } => "approx",
            Cmd::Sigma { .. } => "sigma",
            Cmd::Quiver { .. } => "quiver",
            Cmd::Resolve { .. } => "resolve",
            Cmd::Bounds { .. } => "bounds",
            Cmd::Repro { .. } => "repro",
        }
    }
}

fn dispatch(s: &Session, cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Verify { file } => commands::verify(s, file),
        Cmd::Tensor { a, b, out } => commands::tensor(s, a, b, out.as_ref()),
        Cmd::Cover { file, n, var, out } => commands::cover(s, file, *n, var.as_deref(), out.as_ref()),
        Cmd::Decompose { file, catalog } => commands::decompose_cmd(s, file, catalog.as_deref()),
        Cmd::Approx { file, k, side, catalog } => commands::approx(s, file, *k, *side, catalog.as_deref()),
        Cmd::Sigma { file, catalog } => commands::sigma(s, file, catalog.as_deref()),
        Cmd::Quiver {
            ring,
            ideals,
            catalog,
            no_ring,
            dot,
        } => commands::quiver(ring.as_deref(), ideals, catalog.as_deref(), !no_ring, *dot),
        Cmd::Resolve { catalog, vertex, steps } => commands::resolve(s, catalog, vertex.as_deref(), *steps),
        Cmd::Bounds { exponents } => commands::bounds(s, exponents),
        Cmd::Repro { label } => repro::repro(s, *label),
    }
}

fn fail(json: bool, e: ErrorReport) -> ExitCode {
    if json {
        println!("{}", e.to_json());
    } else {
        eprintln!("error[{}]: {}", e.error.kind, e.error.message);
    }
    ExitCode::from(e.error.exit_code as u8)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if argv.iter().any(|a| a == "--json") {
                let msg = e.render().to_string().trim().to_string();
                println!("{}", ErrorReport::new("usage", msg, USAGE).to_json());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(USAGE as u8);
        }
    };
    let session = match Session::new(cli.field.as_deref(), cli.prec, cli.seed, cli.no_cache) {
        Ok(s) => s,
        Err(e) => return fail(cli.json, ErrorReport::from_error(&e)),
    };
    let echo = CommandEcho {
        name: cli.cmd.name().into(),
        args: argv[1..].to_vec(),
    };
    let start = Instant::now();
    let outcome = match dispatch(&session, &cli.cmd) {
        Ok(o) => o,
        Err(Error::Inconclusive(msg)) => Outcome {
            status: Status::Inconclusive,
            human: format!("inconclusive: {msg}\n"),
            result: serde_json::json!({ "reason": msg }),
        },
        Err(e) => return fail(cli.json, ErrorReport::from_error(&e)),
    };
    let timing_ms = cli.timing.then(|| start.elapsed().as_millis());
    if cli.json {
        let report = Report {
            schema: SCHEMA,
            command: &echo,
            config: &session.cfg,
            status: outcome.status,
            result: &outcome.result,
            timing_ms,
        };
        println!("{}", report.to_json());
    } else {
        print!("{}", outcome.human);
        if let Some(t) = timing_ms {
            println!("time: {t} ms");
        }
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
