use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::One;

use halting_core::census::{Census, CensusConfig, DEFAULT_CHECKPOINT_EVERY};
use halting_core::crm::{run, witness, witness_runtime, RunOutcome};
use halting_core::horizon::{horizon, paper_characteristic};
use halting_core::prob::{
    default_depth, p1, p2_with_depth, tail_prob, tail_prob_with_depth,
};
use halting_core::report::{aggregate, compare, emit_csv, emit_histogram_csv, emit_outcome_csv};
use halting_core::{ComplexityModel, Error, ExactRational, ModelParams, ModelRegistry};

#[derive(Parser)]
#[command(name = "halting", version, about = "Exact halting-time bounds and small-program census")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a probability formula exactly.
    Prob(ProbArgs),
    /// Minimal output bit-size and step budget for a tail probability.
    Horizon(HorizonArgs),
    /// Run (or resume) an exhaustive census of CRM programs.
    Census(CensusArgs),
    /// Build the long-running witness program.
    Witness(WitnessArgs),
    /// Compare a census against the predicted lower bound.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Complexity measure (plain, sd).
    #[arg(long, default_value = "plain")]
    model: String,
    /// Additive constant of the plain measure.
    #[arg(long, default_value_t = 0)]
    c: u64,
    /// Overhead function of the self-delimiting measure.
    #[arg(long, default_value = "default")]
    g: String,
}

impl ModelArgs {
    fn build(&self) -> Result<Arc<dyn ComplexityModel>, Error> {
        let params = ModelParams {
            c: self.c,
            overhead: self.g.clone(),
        };
        ModelRegistry::with_defaults().build(&self.model, &params)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Equation {
    P1,
    P2,
    Tail,
    Below,
}

#[derive(Args)]
struct ProbArgs {
    #[arg(long, value_enum)]
    eq: Equation,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: u64,
    /// Output size (p1, p2).
    #[arg(long, conflicts_with = "m")]
    n: Option<u64>,
    /// Size threshold (tail, below).
    #[arg(long)]
    m: Option<u64>,
    /// Explicit series terms before the geometric bracket.
    #[arg(long)]
    depth: Option<u64>,
}

#[derive(Args)]
struct HorizonArgs {
    #[arg(long)]
    k: u64,
    /// Tail probability threshold, as a/b or 2^-N.
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: Option<ExactRational>,
    #[command(flatten)]
    model: ModelArgs,
    /// Also print the characteristic time 2^(k+51).
    #[arg(long)]
    paper: bool,
}

#[derive(Args)]
struct CensusArgs {
    /// Comma-separated program sizes in bits (multiples of 9).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: ExactRational,
    #[arg(long, default_value = "1000000")]
    cap: BigUint,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_cycles: bool,
    #[command(flatten)]
    model: ModelArgs,
    /// Step-counter overhead in bits, added to k when deriving budgets.
    #[arg(long, default_value_t = 0)]
    s: u64,
    #[arg(long, default_value_t = DEFAULT_CHECKPOINT_EVERY)]
    checkpoint_every: u64,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    n: u64,
    /// Execute the program.
    #[arg(long)]
    run: bool,
    #[arg(long, default_value = "1000000", requires = "run")]
    cap: BigUint,
    /// Write the serialized program (L:hex) to this file.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    b: u64,
    /// Optional CSV of raw histograms (k, bitlen_t, count).
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Optional CSV of outcome counts per size.
    #[arg(long)]
    outcomes: Option<PathBuf>,
}

fn parse_epsilon(s: &str) -> Result<ExactRational, String> {
    let eps: ExactRational = s.parse().map_err(|e: Error| e.to_string())?;
    if eps <= ExactRational::zero() || eps >= ExactRational::one() {
        return Err(format!("epsilon must lie strictly between 0 and 1, got {eps}"));
    }
    Ok(eps)
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Exact rendering of `2^bits - offset`, spelled out in decimal when short.
fn pow2_minus(bits: u64, offset: u32) -> String {
    if bits <= 64 {
        ((BigUint::one() << bits) - offset).to_string()
    } else {
        format!("2^{bits}-{offset}")
    }
}

fn prob(args: ProbArgs) -> Result<(), Failure> {
    let model = args.model.build()?;
    let k = args.k;
    match args.eq {
        Equation::P1 | Equation::P2 => {
            let n = args.n.ok_or_else(|| Failure::Usage("--n is required for p1 and p2".into()))?;
            if matches!(args.eq, Equation::P1) {
                println!("{}", p1(model.as_ref(), k, n)?);
            } else {
                let depth = args.depth.unwrap_or_else(|| default_depth(k, n));
                println!("{}", p2_with_depth(model.as_ref(), k, n, depth)?);
            }
        }
        Equation::Tail | Equation::Below => {
            let m = args.m.ok_or_else(|| Failure::Usage("--m is required for tail and below".into()))?;
            let tail = match args.depth {
                Some(depth) => tail_prob_with_depth(model.as_ref(), k, m, depth)?,
                None => tail_prob(model.as_ref(), k, m)?,
            };
            let iv = if matches!(args.eq, Equation::Tail) { tail } else { tail.complement() };
            println!("{iv}");
        }
    }
    Ok(())
}

fn horizon_cmd(args: HorizonArgs) -> Result<(), Failure> {
    if args.epsilon.is_none() && !args.paper {
        return Err(Failure::Usage("--epsilon is required unless --paper is given".into()));
    }
    if args.k == 0 {
        return Err(Error::Domain("k must be a positive integer".into()).into());
    }
    if let Some(eps) = &args.epsilon {
        let model = args.model.build()?;
        let h = horizon(model.as_ref(), args.k, eps)?;
        println!("m*={} budget=2^{}-1", h.m_star, h.m_star);
    }
    if args.paper {
        let c = paper_characteristic(args.k);
        debug_assert_eq!(c.bits(), args.k + 52);
        println!("characteristic=2^{}", args.k + 51);
    }
    Ok(())
}

fn census_cmd(args: CensusArgs) -> Result<(), Failure> {
    let model = args.model.build()?;
    let mut config = CensusConfig::new(args.sizes, args.epsilon, model, args.out, args.checkpoint);
    config.budget_cap = args.cap;
    config.detect_cycles = !args.no_cycles;
    config.counter_overhead_bits = args.s;
    config.workers = args.workers;
    config.checkpoint_every = args.checkpoint_every;
    let census = Census::new(config)?;
    let budgets = census.budgets();
    let summary = census.run()?;
    for s in &summary.per_size {
        let budget = budgets.iter().find(|(k, _)| *k == s.k).map(|(_, b)| b.to_string()).unwrap_or_default();
        println!(
            "k={} total={} halted={} exhausted={} cycle={} budget={}",
            s.k, s.total, s.halted, s.exhausted, s.cycled, budget
        );
    }
    Ok(())
}

fn witness_cmd(args: WitnessArgs) -> Result<(), Failure> {
    let program = witness(args.n)?;
    let size = program.size_bits() as u64;
    let bound = pow2_minus(args.n + 1, 2);
    if let Some(path) = &args.emit {
        std::fs::write(path, format!("{}\n", program.to_code())).map_err(Error::from)?;
    }
    if args.run {
        let line = match run(&program, &args.cap, false) {
            RunOutcome::Halted { t, .. } => {
                let ok = BigUint::from(t) >= (BigUint::one() << (args.n + 1)) - 2u32;
                format!("size_bits={size} t={t} bound={bound} {}", if ok { "ok" } else { "FAIL" })
            }
            _ => format!("size_bits={size} t>{} bound={bound} unknown", args.cap),
        };
        println!("{line}");
    } else {
        println!("size_bits={size} bound={bound}");
    }
    let runtime = witness_runtime(args.n)?;
    let characteristic = paper_characteristic(size);
    let linear = &runtime - (BigUint::one() << (args.n + 1));
    println!(
        "runtime=2^{}+{} characteristic=2^{} runtime_exceeds_characteristic={}",
        args.n + 1,
        linear,
        size + 51,
        runtime > characteristic
    );
    Ok(())
}

fn report_cmd(args: ReportArgs) -> Result<(), Failure> {
    let model = args.model.build()?;
    let summaries = aggregate(&args.input)?;
    let table = compare(&summaries, model.as_ref(), args.b)?;
    emit_csv(&table, &args.out)?;
    if let Some(path) = &args.histogram {
        emit_histogram_csv(&summaries, path)?;
    }
    if let Some(path) = &args.outcomes {
        emit_outcome_csv(&summaries, path)?;
    }
    for s in &summaries {
        let flagged = table.rows.iter().filter(|r| r.k == s.k && r.flag == Some(true)).count();
        println!(
            "k={} total={} halted={} exhausted={} cycle={} max_bitlen_t={} rows_below_bound={}",
            s.k,
            s.total,
            s.halted,
            s.exhausted,
            s.cycled,
            s.max_bitlen().map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
            flagged
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prob(a) => prob(a),
        Command::Horizon(a) => horizon_cmd(a),
        Command::Census(a) => census_cmd(a),
        Command::Witness(a) => witness_cmd(a),
        Command::Report(a) => report_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
