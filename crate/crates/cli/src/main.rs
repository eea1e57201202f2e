use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opspace::experiments::{self, Experiment, ExperimentParams};
use opspace::osnorm::{evaluate, parse_number, Budget, Structure};
use opspace::seqspace::{finseq_from_json, finseq_to_json, u_n, witness, FinSeq, MatrixSeq, WitnessKind};
use opspace::twist;
use opspace::verify::{run_suite, Suite, VerifyConfig};
use opspace::{ComplexMatrix, Error, Result};

/// Matrix-level norms of operator-space structures on sequence spaces.
#[derive(Debug, Parser)]
#[command(name = "opspace", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optimizer budget JSON (defaults to $OSNORM_BUDGET when set).
    #[arg(long, global = true)]
    budget: Option<PathBuf>,
    /// Worker threads for experiments and suites.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the norm of a matrix sequence in a structure.
    Norm {
        /// Structure, e.g. `min:p=2`, `oh`, `interp:(min:p=2,max:p=2,theta=0.5)`.
        #[arg(long)]
        structure: String,
        /// Matrix sequence JSON file, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
    },
    /// Print a witness: xn, xnt, yn, an or un.
    Witness {
        kind: String,
        #[arg(long)]
        n: usize,
    },
    /// Run a named experiment and emit CSV.
    Experiment {
        name: String,
        /// Sides, as a list `1,2,4` or a range `2..64`.
        #[arg(long)]
        n: Option<String>,
        /// Exponents, e.g. `1,4/3,2,4`.
        #[arg(long)]
        p: Option<String>,
        /// Interpolation parameters, e.g. `1/4,1/2`.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        c_c: f64,
        #[arg(long, default_value_t = 1.0)]
        c_t: f64,
    },
    /// Run a verification suite; exits 1 when a check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Relative tolerance for the optimization-backed tables.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Kalton-Peck map, quasinorm and probes.
    Kp {
        /// map, quasinorm, probe or triviality.
        #[arg(long)]
        op: String,
        #[arg(long, default_value = "2")]
        p: String,
        /// Sequence JSON (inline or a file path).
        #[arg(long)]
        x: Option<String>,
        /// Second sequence JSON (inline or a file path).
        #[arg(long)]
        y: Option<String>,
        /// Use u_n for the sequence argument.
        #[arg(long)]
        u: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Span dimension for the triviality probe.
        #[arg(long, default_value_t = 64)]
        dim: usize,
    },
}

enum Outcome {
    Ok(String),
    Failed(String),
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
    }
}

fn load_budget(global: &Global) -> Result<Budget> {
    let path = global.budget.clone().or_else(|| std::env::var_os("OSNORM_BUDGET").map(PathBuf::from));
    let budget = match path {
        Some(p) => Budget::from_json(&read_text(&p)?)?,
        None => Budget::default(),
    };
    Ok(budget.with_seed(global.seed))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|s| parse_number(s.trim())).collect()
}

fn parse_ns(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Usage(format!("cannot parse sides {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn sequence_arg(arg: Option<&str>, u: Option<usize>) -> Result<FinSeq> {
    match (arg, u) {
        (Some(text), _) => {
            let trimmed = text.trim_start();
            if trimmed.starts_with('{') {
                finseq_from_json(trimmed)
            } else {
                finseq_from_json(&read_text(Path::new(text))?)
            }
        }
        (None, Some(n)) => Ok(u_n(n)),
        (None, None) => Err(Error::Usage("missing sequence argument (--x or --u)".into())),
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Norm { structure, input } => {
            let s: Structure = structure.parse()?;
            let x = MatrixSeq::from_json(&read_text(input)?)?;
            let est = evaluate(&s, &x, &load_budget(g)?)?;
            Ok(Outcome::Ok(serde_json::to_string(&est)?))
        }
        Command::Witness { kind, n } => {
            let kind: WitnessKind = kind.parse()?;
            Ok(Outcome::Ok(witness(kind, *n)?.to_json()))
        }
        Command::Experiment { name, n, p, theta, c_c, c_t } => {
            let e: Experiment = name.parse()?;
            let params = ExperimentParams {
                ns: n.as_deref().map(parse_ns).transpose()?.unwrap_or_default(),
                ps: p.as_deref().map(parse_list).transpose()?.unwrap_or_default(),
                thetas: theta.as_deref().map(parse_list).transpose()?.unwrap_or_default(),
                seed: g.seed,
                budget: load_budget(g)?,
                c_c: *c_c,
                c_t: *c_t,
                jobs: g.jobs,
            };
            let rows = experiments::run(e, &params)?;
            Ok(Outcome::Ok(experiments::to_csv(&rows)?))
        }
        Command::Verify { suite, tol, samples } => {
            let suite: Suite = suite.parse()?;
            if !(*tol > 0.0) {
                return Err(Error::Usage(format!("tolerance must be positive, got {tol}")));
            }
            let mut cfg = VerifyConfig { tol: *tol, seed: g.seed, budget: load_budget(g)?, jobs: g.jobs, ..Default::default() };
            if let Some(s) = samples {
                cfg.ruan_samples = *s;
            }
            let results = run_suite(suite, &cfg)?;
            let text: Vec<String> = results.iter().map(|r| r.to_string()).collect();
            let text = text.join("\n") + "\n";
            if results.iter().all(|r| r.passed()) {
                Ok(Outcome::Ok(text))
            } else {
                Ok(Outcome::Failed(text))
            }
        }
        Command::Kp { op, p, x, y, u, samples, dim } => {
            let p = parse_number(p)?;
            let value = match op.as_str() {
                "map" => finseq_to_json(&twist::kp_map(&sequence_arg(x.as_deref(), *u)?, p)?),
                "quasinorm" => {
                    let xs = match x {
                        Some(_) => sequence_arg(x.as_deref(), None)?,
                        None => FinSeq::zero(),
                    };
                    let ys = sequence_arg(y.as_deref(), *u)?;
                    serde_json::json!({ "value": twist::kp_quasinorm(&xs, &ys, p)? }).to_string()
                }
                "probe" => serde_json::to_string(&twist::quasilinearity_probe(p, *samples, g.seed)?)?,
                "triviality" => {
                    let set: Vec<FinSeq> = (1..=*dim).map(u_n).collect();
                    let v = twist::triviality_probe(p, &ComplexMatrix::zeros(*dim, *dim), &set)?;
                    serde_json::json!({ "value": v, "dim": dim }).to_string()
                }
                other => return Err(Error::Usage(format!("unknown kp op {other:?}"))),
            };
            Ok(Outcome::Ok(value))
        }
    }
}

fn emit(global: &Global, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match &global.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| match outcome {
        Outcome::Ok(text) => emit(&cli.global, &text).map(|_| ExitCode::SUCCESS),
        Outcome::Failed(text) => emit(&cli.global, &text).map(|_| ExitCode::from(1)),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() || matches!(e, Error::Io(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
