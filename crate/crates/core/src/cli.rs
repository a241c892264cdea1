//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when the
//! input data cannot be read or processed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithm::{Algorithm, SolverKind, TwoMeansConfig};
use crate::error::Error;
use crate::harness::{
    ingest_csv, random_bad_csv, run_random_bad, run_table1, write_points_csv, CsvOptions, ExperimentConfig, InputSource,
    MixtureSpec,
};
use crate::metric::PointSet;
use crate::objective::{brute_force_opt, ckmm_value, dasgupta_cost, tree_revenue, Instance, ObjectiveKind, RevenueMode};
use crate::rng::RngStream;
use crate::tree::HierTree;
use crate::ultrametric::{embed_euclidean, generate_random, UltrametricSpec, WeightMode};

#[derive(Debug, Parser)]
#[command(name = "hierrev", version, about = "Hierarchical clustering under revenue, CKMM and Dasgupta objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random ultrametric spec in the weighted tree format.
    GenUltrametric {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow equal parent/child weights.
        #[arg(long)]
        ties: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Euclidean points realizing an ultrametric spec.
    Embed {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a tree over a points CSV.
    Cluster {
        #[command(flatten)]
        input: PointsArgs,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a tree; prints the per-split CSV with total and bound rows.
    Eval {
        #[command(flatten)]
        input: PointsArgs,
        #[arg(long)]
        tree_file: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = ModeArg::SplitSum)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum over all trees (at most 7 points).
    EnumerateOpt {
        #[command(flatten)]
        input: PointsArgs,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Experiment drivers.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Gaussian mixture points CSV.
    Synth {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Algorithms x objectives over repeated subsamples, with bound rows.
    Table1 {
        /// Points CSV; a synthetic mixture is generated when omitted.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        skip_header: bool,
        #[command(flatten)]
        mixture: MixtureArgs,
        #[arg(long, default_value_t = 1000)]
        subsample: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "algo", value_enum, value_delimiter = ',', default_values_t = vec![AlgoArg::Bkm, AlgoArg::Avg, AlgoArg::Single, AlgoArg::Random])]
        algos: Vec<AlgoArg>,
        #[arg(long = "objective", value_enum, value_delimiter = ',', default_values_t = vec![ObjectiveArg::Revenue, ObjectiveArg::Ckmm])]
        objectives: Vec<ObjectiveArg>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coin-flip trees on the two-cluster coincident instance.
    RandomBad {
        #[arg(long, value_delimiter = ',', default_values_t = vec![4, 8, 12])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct PointsArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    skip_header: bool,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Lloyd)]
    solver: SolverArg,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct MixtureArgs {
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, default_value_t = 20.0)]
    separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Bkm,
    Avg,
    Single,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Exhaustive,
    Lloyd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Revenue,
    Ckmm,
    Dasgupta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    SplitSum,
    PairSum,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Bkm => Algorithm::BisectingKMeans,
            AlgoArg::Avg => Algorithm::AverageLinkage,
            AlgoArg::Single => Algorithm::SingleLinkage,
            AlgoArg::Random => Algorithm::Random,
        }
    }
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Revenue => ObjectiveKind::Revenue,
            ObjectiveArg::Ckmm => ObjectiveKind::Ckmm,
            ObjectiveArg::Dasgupta => ObjectiveKind::Dasgupta,
        }
    }
}

impl SolverArgs {
    fn config(&self, seed: u64) -> TwoMeansConfig {
        let kind = match self.solver {
            SolverArg::Exhaustive => SolverKind::Exhaustive,
            SolverArg::Lloyd => SolverKind::Lloyd,
        };
        TwoMeansConfig { kind, lloyd_restarts: self.restarts, seed, ..TwoMeansConfig::default() }
    }
}

impl MixtureArgs {
    fn spec(&self, seed: u64) -> MixtureSpec {
        MixtureSpec { k: self.k, n: self.n, dim: self.dim, separation: self.separation, seed }
    }
}

fn read_points(args: &PointsArgs) -> Result<PointSet, Error> {
    let options = CsvOptions { skip_header: args.skip_header, ..CsvOptions::default() };
    Ok(ingest_csv(&args.points, &options)?.points)
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Error> {
    match command {
        Command::GenUltrametric { n, seed, ties, out: path } => {
            let mode = if ties { WeightMode::WithTies } else { WeightMode::Strict };
            let spec = generate_random(n, &mut RngStream::new(seed), mode)?;
            emit(out, path.as_deref(), &format!("{spec}\n"))
        }
        Command::Embed { spec, out: path } => {
            let spec: UltrametricSpec = read_text(&spec)?.trim().parse()?;
            let points = embed_euclidean(&spec)?;
            let mut buf = Vec::new();
            write_points_csv(&points, &mut buf).expect("writing to memory");
            emit(out, path.as_deref(), &String::from_utf8(buf).expect("utf-8"))
        }
        Command::Cluster { input, algo, solver, seed, out: path } => {
            let points = read_points(&input)?;
            let algo = Algorithm::from(algo);
            let tree = algo.build(&points, &solver.config(seed), &mut RngStream::new(seed))?;
            emit(out, path.as_deref(), &format!("{tree}\n"))
        }
        Command::Eval { input, tree_file, objective, mode, out: path } => {
            let points = read_points(&input)?;
            let tree: HierTree = read_text(&tree_file)?.trim().parse()?;
            let report = match ObjectiveKind::from(objective) {
                ObjectiveKind::Revenue => {
                    let mode = match mode {
                        ModeArg::SplitSum => RevenueMode::SplitSum,
                        ModeArg::PairSum => RevenueMode::PairSum,
                    };
                    tree_revenue(&points, &tree, mode)?
                }
                ObjectiveKind::Ckmm => ckmm_value(&points.pairwise_distances(), &tree)?,
                ObjectiveKind::Dasgupta => dasgupta_cost(&points.pairwise_distances(), &tree)?,
            };
            emit(out, path.as_deref(), &report.to_csv())
        }
        Command::EnumerateOpt { input, objective, out: path } => {
            let points = read_points(&input)?;
            let (tree, value) = brute_force_opt(Instance::Points(&points), objective.into())?;
            emit(out, path.as_deref(), &format!("value {value}\ntree {tree}\n"))
        }
        Command::Synth { mixture, seed, out: path } => {
            let points = mixture.spec(seed).generate()?;
            let mut buf = Vec::new();
            write_points_csv(&points, &mut buf).expect("writing to memory");
            emit(out, path.as_deref(), &String::from_utf8(buf).expect("utf-8"))
        }
        Command::Experiment(Experiment::Table1 {
            points,
            skip_header,
            mixture,
            subsample,
            runs,
            seed,
            algos,
            objectives,
            solver,
            out: path,
        }) => {
            let source = match points {
                Some(path) => InputSource::Csv { path, options: CsvOptions { skip_header, ..CsvOptions::default() } },
                None => InputSource::Synthetic(mixture.spec(seed)),
            };
            let data = source.load()?;
            let mut algorithms: Vec<Algorithm> = algos.into_iter().map(Algorithm::from).collect();
            algorithms.dedup();
            let mut objectives: Vec<ObjectiveKind> = objectives.into_iter().map(ObjectiveKind::from).collect();
            objectives.dedup();
            let config = ExperimentConfig {
                subsample_size: subsample,
                num_runs: runs,
                algorithms,
                objectives,
                base_seed: seed,
                solver: solver.config(seed),
            };
            let report = run_table1(&data, &config)?;
            emit(out, path.as_deref(), &report.to_csv())
        }
        Command::Experiment(Experiment::RandomBad { sizes, trials, seed, out: path }) => {
            let rows = run_random_bad(&sizes, trials, seed)?;
            emit(out, path.as_deref(), &random_bad_csv(&rows))
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) => 1,
                _ => 2,
            }
        }
    }
}

/// Entry point used by the binary.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
