//! Command-line front end: generate hypergraphs, analyze spectra and cycle
//! counts, run the verification suites, and sweep separation experiments.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 budget exceeded,
//! 3 verification failure.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperquasi::analysis::{AnalyzeOptions, ExperimentConfig};
use hyperquasi::error::{Error, Result};
use hyperquasi::hypergraph::{generate, read_hypergraph, write_hypergraph, GenSpec, Hypergraph};
use hyperquasi::indexing::parse_partition_list;
use hyperquasi::multilinear::Budget;
use hyperquasi::spectral::HopmOptions;
use hyperquasi::suites::{run_all, VerifyLevel};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_BUDGET: i32 = 2;
const EXIT_VERIFY: i32 = 3;

#[derive(Parser)]
#[command(
    name = "hyperquasi",
    version,
    about = "Spectral and cycle-count analysis of k-uniform hypergraphs with loops"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random hypergraph and write it in the text format.
    Gen(GenArgs),
    /// Per-partition spectra, brackets, and cycle counts as a JSON report.
    Analyze(AnalyzeArgs),
    /// Run the named verification suites.
    Verify(VerifyArgs),
    /// Sweep instance sizes and seeds; write a tidy CSV plus a JSON report.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Edge probability in [0, 1].
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planted-bias parameter; omitted means unbiased.
    #[arg(long)]
    bias: Option<f64>,
    /// Admit loops (edges with repeated vertices).
    #[arg(long)]
    allow_loops: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Hypergraph file in the text format; omit to generate one from
    /// --n/--k/--p/--seed instead.
    input: Option<PathBuf>,
    #[arg(long, requires = "k")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    k: Option<usize>,
    /// Generation density, and density reference for expected cycle counts.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    allow_loops: bool,
    /// Comma list of partitions like "2+1,1+1+1"; default all proper ones.
    #[arg(long)]
    pi: Option<String>,
    /// Cycle parameter: counts use cycles of length 4*ell.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Extra seeded restarts of the alternating maximization.
    #[arg(long)]
    restarts: Option<usize>,
    /// Dense-entry budget; overrides HYPERQUASI_BUDGET and the default.
    #[arg(long)]
    budget: Option<u128>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
    /// Emit the full suite report as JSON instead of one line per suite.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Sweep configuration JSON; flags below are ignored when present.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Comma list of instance sizes.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
    n: Vec<usize>,
    /// Comma list of generator seeds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Planted-bias parameter; adds a planted variant per (n, seed).
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    allow_loops: bool,
    /// Comma list of partitions like "2+1"; default all proper ones.
    #[arg(long)]
    pi: Option<String>,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    budget: Option<u128>,
    /// Output path prefix: writes <out>.csv and <out>.json.
    #[arg(long, default_value = "experiment")]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(EXIT_OK);
            }
            eprint!("{e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let (kind, code) = match &e {
                Error::BudgetExceeded { .. } => ("budget", EXIT_BUDGET),
                Error::Io(_) => ("io", EXIT_USAGE),
                _ => ("input", EXIT_USAGE),
            };
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } })
            );
            code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Verify(args) => Ok(cmd_verify(args)),
        Cmd::Experiment(args) => cmd_experiment(args),
    }
}

/// Budget precedence: explicit flag, then HYPERQUASI_BUDGET, then default.
fn budget_from(flag: Option<u128>) -> Result<Budget> {
    if let Some(cap) = flag {
        return Ok(Budget::new(cap));
    }
    match std::env::var("HYPERQUASI_BUDGET") {
        Ok(raw) => raw
            .parse::<u128>()
            .map(Budget::new)
            .map_err(|_| Error::Parse { line: 0, msg: format!("HYPERQUASI_BUDGET: {raw:?}") }),
        Err(_) => Ok(Budget::default()),
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let spec = GenSpec {
        n: args.n,
        k: args.k,
        p: args.p,
        seed: args.seed,
        allow_loops: args.allow_loops,
        bias: args.bias,
    };
    let h = generate(&spec)?;
    write_out(&args.out, &write_hypergraph(&h))?;
    eprintln!(
        "n={} k={} edges={} density={:.6}",
        h.n(),
        h.k(),
        h.edge_count(),
        h.density(args.allow_loops)
    );
    Ok(EXIT_OK)
}

fn load_input(args: &AnalyzeArgs) -> Result<(Hypergraph, Option<u64>)> {
    match (&args.input, args.n, args.k) {
        (Some(path), None, None) => {
            let text = std::fs::read_to_string(path)?;
            Ok((read_hypergraph(&text)?, args.seed))
        }
        (None, Some(n), Some(k)) => {
            let seed = args.seed.unwrap_or(0);
            let spec = GenSpec {
                n,
                k,
                p: args.p.unwrap_or(0.5),
                seed,
                allow_loops: args.allow_loops,
                bias: args.bias,
            };
            Ok((generate(&spec)?, Some(seed)))
        }
        _ => Err(Error::Parse {
            line: 0,
            msg: "give either an input file or both --n and --k".into(),
        }),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let start = Instant::now();
    let (h, seed) = load_input(&args)?;
    let partitions = match &args.pi {
        Some(list) => Some(parse_partition_list(list)?),
        None => None,
    };
    let mut hopm = HopmOptions::default();
    if let Some(r) = args.restarts {
        hopm.restarts = r;
    }
    let opts = AnalyzeOptions {
        partitions,
        ell: args.ell,
        p: args.p,
        hopm,
        budget: budget_from(args.budget)?,
        seed,
    };
    let mut report = hyperquasi::analysis::analyze(&h, &opts)?;
    report.canonicalize();
    let json = report.to_json();
    if let Err(violations) = hyperquasi::analysis::validate_report_json(&json) {
        eprintln!(
            "{}",
            serde_json::json!({
                "error": { "kind": "schema", "message": violations.join("; ") }
            })
        );
        return Ok(EXIT_VERIFY);
    }
    write_out(&args.out, &json)?;
    eprintln!("analyzed n={} k={} in {} ms", h.n(), h.k(), start.elapsed().as_millis());
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let level = match args.level {
        LevelArg::Quick => VerifyLevel::Quick,
        LevelArg::Full => VerifyLevel::Full,
    };
    let report = run_all(level);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("suite report is plain data"));
    } else {
        for o in &report.outcomes {
            if o.passed {
                println!("PASS {} ({} checks)", o.suite, o.checks);
            } else {
                println!("FAIL {} ({} of {} checks failed)", o.suite, o.failed, o.checks);
                for f in &o.failures {
                    println!("     {f}");
                }
            }
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        let names: Vec<&str> = report
            .outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.suite.as_str())
            .collect();
        eprintln!("verification failed: {}", names.join(", "));
        EXIT_VERIFY
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32> {
    let start = Instant::now();
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Error::Parse { line: 0, msg: format!("config: {e}") })?
        }
        None => {
            let mut cfg = ExperimentConfig::new(args.k, args.p, args.n, args.seeds, args.bias);
            cfg.allow_loops = args.allow_loops;
            if let Some(list) = &args.pi {
                let parts = parse_partition_list(list)?;
                cfg.partitions = Some(parts.iter().map(|p| p.label()).collect());
            }
            cfg.ell = args.ell;
            if let Some(r) = args.restarts {
                cfg.restarts = r;
            }
            cfg.max_entries = budget_from(args.budget)?.max_entries;
            cfg
        }
    };
    let report = hyperquasi::analysis::experiment(&cfg)?;
    let csv = hyperquasi::analysis::rows_to_csv(&report.rows);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Parse { line: 0, msg: format!("report: {e}") })?
        + "\n";
    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    std::fs::write(&csv_path, csv)?;
    std::fs::write(&json_path, json)?;
    eprintln!(
        "{} rows -> {} and {} in {} ms",
        report.rows.len(),
        csv_path.display(),
        json_path.display(),
        start.elapsed().as_millis()
    );
    Ok(EXIT_OK)
}
