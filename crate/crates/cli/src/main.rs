use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tourney::bracket::{superkings, SeOracle, DEFAULT_RETRIES, ORACLE_MAX_N};
use tourney::experiments::{parse_p_grid, run_grid_with, write_csv, ExperimentConfig, ModelKind};
use tourney::{
    is_superking, k_kings, playout, probability_matrix, r_dominating_set, sample,
    superking_bracket, winning_bracket, Bracket, KBound, ModelSpec, ProbabilityMatrix, RngStream,
    Tournament, WinningBracket,
};

/// Tournament solutions, single-elimination brackets and random tournament
/// experiments.
#[derive(Parser)]
#[command(name = "tourney", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random tournament.
    Gen(GenArgs),
    /// List the k-kings of a tournament.
    Kings(KingsArgs),
    /// List superkings, or build a winning bracket for one.
    Superking(SuperkingArgs),
    /// Build a single-elimination bracket won by the target.
    Bracket(BracketArgs),
    /// Play out a bracket and print the winner.
    Playout(PlayoutArgs),
    /// Print an r-dominating set.
    Domset(DomsetArgs),
    /// Run a Monte Carlo sweep and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct Input {
    /// Tournament file, `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
}

#[derive(Args)]
struct Output {
    /// Output file, stdout if omitted. Written atomically.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// uniform, condorcet, gap or generalized.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    /// Upset parameter for condorcet and gap.
    #[arg(long)]
    p: Option<f64>,
    /// Probability matrix file for the generalized model.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    substream: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct KingsArgs {
    #[command(flatten)]
    input: Input,
    /// An integer of at least 2, or `max` for n - 1.
    #[arg(long)]
    k: KBound,
}

#[derive(Args)]
struct SuperkingArgs {
    #[command(flatten)]
    input: Input,
    /// Print a winning bracket for this superking instead of the list.
    #[arg(long)]
    target: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BracketArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    target: usize,
    /// Seeds the randomized retries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    retries: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PlayoutArgs {
    #[command(flatten)]
    input: Input,
    /// Bracket file: one line of leaf indices.
    #[arg(long)]
    bracket: PathBuf,
}

#[derive(Args)]
struct DomsetArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 1)]
    r: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// uniform, condorcet, gap or generalized.
    #[arg(long)]
    model: String,
    /// Comma-separated field sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "0:0.5:0.02")]
    p_grid: String,
    /// Comma-separated bounds, `max` for n - 1.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,max")]
    k: Vec<KBound>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample new tournaments for every k.
    #[arg(long)]
    fresh_per_k: bool,
    /// Worker threads, all cores if omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Probability matrix file for the generalized model.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

/// Exit status other than success that is not an error.
enum Verdict {
    Ok,
    InfeasibleByMethod,
    NonWinner,
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_tournament(input: &Input) -> Result<Tournament> {
    read_text(&input.input)?
        .parse()
        .with_context(|| format!("parsing {}", input.input.display()))
}

fn read_matrix(path: Option<&PathBuf>) -> Result<ProbabilityMatrix> {
    let Some(path) = path else {
        bail!("the generalized model needs --matrix");
    };
    read_text(path)?
        .parse()
        .with_context(|| format!("parsing {}", path.display()))
}

/// Writes to stdout, or to a temporary file renamed into place.
fn emit(output: &Output, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match &output.out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            write(tmp.as_file_mut())?;
            tmp.as_file_mut().flush()?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn print_ids(ids: &[usize]) {
    for id in ids {
        println!("{id}");
    }
}

fn model_spec(name: &str, p: Option<f64>, matrix: Option<&PathBuf>) -> Result<ModelSpec> {
    let need_p = || p.context("this model needs --p");
    Ok(match name {
        "uniform" => ModelSpec::Uniform,
        "condorcet" => ModelSpec::Condorcet { p: need_p()? },
        "gap" => ModelSpec::Gap { p: need_p()? },
        "generalized" => ModelSpec::Generalized(read_matrix(matrix)?),
        other => bail!("unknown model {other:?}"),
    })
}

fn cmd_gen(args: GenArgs) -> Result<Verdict> {
    let spec = model_spec(&args.model, args.p, args.matrix.as_ref())?;
    let matrix = probability_matrix(&spec, args.n)?;
    let t = sample(&matrix, RngStream::new(args.seed, args.substream))?;
    emit(&args.output, |w| write!(w, "{t}"))?;
    Ok(Verdict::Ok)
}

fn cmd_kings(args: KingsArgs) -> Result<Verdict> {
    let t = read_tournament(&args.input)?;
    print_ids(&k_kings(&t, args.k)?.members);
    Ok(Verdict::Ok)
}

fn cmd_superking(args: SuperkingArgs) -> Result<Verdict> {
    let t = read_tournament(&args.input)?;
    match args.target {
        None => {
            print_ids(&superkings(&t));
            Ok(Verdict::Ok)
        }
        Some(x) => {
            if !is_superking(&t, x)? {
                println!("not-superking");
                return Ok(Verdict::InfeasibleByMethod);
            }
            let b = superking_bracket(&t, x)?;
            emit(&args.output, |w| write!(w, "{b}"))?;
            Ok(Verdict::Ok)
        }
    }
}

fn cmd_bracket(args: BracketArgs) -> Result<Verdict> {
    let t = read_tournament(&args.input)?;
    if !t.n().is_power_of_two() {
        bail!("field size {} is not a power of two", t.n());
    }
    if args.target >= t.n() {
        bail!("target {} out of range for n = {}", args.target, t.n());
    }
    if t.n() <= ORACLE_MAX_N && !SeOracle::new(&t)?.is_winner(args.target) {
        println!("non-winner");
        return Ok(Verdict::NonWinner);
    }
    let stream = RngStream::new(args.seed, args.target as u64);
    match winning_bracket(&t, args.target, stream, args.retries)? {
        WinningBracket::Found(b) => {
            emit(&args.output, |w| write!(w, "{b}"))?;
            Ok(Verdict::Ok)
        }
        WinningBracket::InfeasibleByMethod => {
            println!("infeasible-by-method");
            Ok(Verdict::InfeasibleByMethod)
        }
    }
}

fn cmd_playout(args: PlayoutArgs) -> Result<Verdict> {
    let t = read_tournament(&args.input)?;
    let b: Bracket = read_text(&args.bracket)?
        .parse()
        .with_context(|| format!("parsing {}", args.bracket.display()))?;
    println!("{}", playout(&t, &b)?);
    Ok(Verdict::Ok)
}

fn cmd_domset(args: DomsetArgs) -> Result<Verdict> {
    let t = read_tournament(&args.input)?;
    print_ids(&r_dominating_set(&t, args.r)?.members);
    Ok(Verdict::Ok)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<Verdict> {
    let model = if args.model == "generalized" {
        ModelKind::Generalized(read_matrix(args.matrix.as_ref())?)
    } else {
        args.model.parse().map_err(anyhow::Error::msg)?
    };
    let p_grid = parse_p_grid(&args.p_grid).map_err(anyhow::Error::msg)?;
    let config = ExperimentConfig {
        model,
        p_grid,
        n_values: args.n,
        k_values: args.k,
        trials: args.trials,
        master_seed: args.seed,
        fresh_per_k: args.fresh_per_k,
    };
    config.validate()?;
    let total = config.n_values.len()
        * match &config.model {
            ModelKind::Generalized(_) => 1,
            _ => config.p_grid.len(),
        }
        * config.k_values.len();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = args.threads {
        pool = pool.num_threads(threads);
    }
    let pool = pool.build().context("starting worker threads")?;
    let mut done = 0;
    let rows = pool.install(|| {
        run_grid_with(&config, |row| {
            done += 1;
            eprintln!(
                "[{done}/{total}] n={} p={:.6} k={} avg={:.4} all={:.4}",
                row.n, row.p, row.k, row.avg_pct, row.all_pct
            );
        })
    })?;
    emit(&args.output, |w| write_csv(&rows, w))?;
    Ok(Verdict::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Kings(a) => cmd_kings(a),
        Command::Superking(a) => cmd_superking(a),
        Command::Bracket(a) => cmd_bracket(a),
        Command::Playout(a) => cmd_playout(a),
        Command::Domset(a) => cmd_domset(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::InfeasibleByMethod) => ExitCode::from(1),
        Ok(Verdict::NonWinner) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
