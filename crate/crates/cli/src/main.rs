//! `trajsim` command-line front end.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use trajsim::bench::{discrete_frechet_scaling, metric_edit_growth, tw_cell_correlation};
use trajsim::editdist::DEFAULT_FULL_DP_CAP;
use trajsim::frechet::SearchMode;
use trajsim::gadgets::{build_ov_curves, build_sat_gadget, verify_ov_gadget, verify_sat_gadget, CNFFormula, OVInstance};
use trajsim::io::{load_metric, write_csv, write_metric, Dataset};
use trajsim::kgather::{kgather_approx, kgather_exact_capped, pairwise_distances, DistanceMatrix, DEFAULT_EXACT_CAP};
use trajsim::measure::Measure;
use trajsim::{Error, SpeedModel, TimedTrajectory};

const SCHEMA: u32 = 1;
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "trajsim", version, about = "Trajectory similarity measures, k-gather clustering and reduction gadgets")]
struct Cli {
    /// Worker threads for all-pairs and sweep workloads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two trajectories, or the full matrix with --all-pairs.
    Dist(DistArgs),
    /// k-gather clustering under a distance measure.
    Cluster(ClusterArgs),
    /// Build and check hardness gadgets.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Runtime sweeps.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureName {
    DiscreteFrechet,
    Frechet,
    TwFrechet,
    Dtw,
    TwDiscreteFrechet,
    TwDtw,
    Edit,
    MetricEdit,
    MetricEditInsertfirst,
    Jaccard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Speed {
    Constant,
    Varying,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Bisect,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, value_enum)]
    measure: MeasureName,
    /// Time window in normalized units.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "constant")]
    speed: Speed,
    /// Distance extraction for continuous Fréchet variants.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Bisection tolerance (default 1e-9 times the input diameter).
    #[arg(long)]
    tol: Option<f64>,
    /// Shingle width for jaccard.
    #[arg(long)]
    shingle_w: Option<usize>,
    /// Location metric file for the metric edit measures.
    #[arg(long)]
    metric: Option<PathBuf>,
    /// Longest string accepted by the full metric edit DP.
    #[arg(long, default_value_t = DEFAULT_FULL_DP_CAP)]
    cap: usize,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Emit the n x n matrix over every input trajectory.
    #[arg(long)]
    all_pairs: bool,
    /// Output format (default: text for one value, json for a matrix).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// CSV trajectories or JSON datasets.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    k: usize,
    /// Exhaustive optimum instead of the 2-approximation.
    #[arg(long)]
    exact: bool,
    /// Largest dataset accepted by --exact.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Curves for a random orthogonal-vectors instance.
    Ov {
        /// Vectors per side.
        #[arg(long)]
        n: usize,
        /// Vector dimension (odd values are padded).
        #[arg(long)]
        d: usize,
        #[arg(long)]
        verify: bool,
        /// Directory receiving P.csv and Q.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Symbol trajectories for a 3-CNF formula.
    Sat {
        /// DIMACS CNF file.
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 14)]
        k: usize,
        #[arg(long)]
        verify: bool,
        /// Directory receiving dataset.json and metric.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Curve lengths for the discrete Fréchet sweep.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048")]
    sizes: Vec<usize>,
    /// Trajectory length for the windowed sweep.
    #[arg(long, default_value_t = 3000)]
    tw_n: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.002,0.005,0.01,0.02,0.05,0.1,0.2,0.35,0.6,1.0")]
    sigmas: Vec<f64>,
    /// String lengths for the metric edit sweep.
    #[arg(long, value_delimiter = ',', default_value = "6,8")]
    edit_sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) => 2,
            Error::SizeGuard(_) => 4,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("trajsim: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    let out = match cli.command {
        Command::Dist(args) => cmd_dist(args)?,
        Command::Cluster(args) => cmd_cluster(args)?,
        Command::Gadget(g) => cmd_gadget(g, cli.seed)?,
        Command::Bench(args) => cmd_bench(args, cli.seed)?,
    };
    emit(&out, cli.output.as_deref())
}

fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn build_measure(a: &MeasureArgs) -> CliResult<Measure> {
    let sigma = || {
        let s = a.sigma.ok_or_else(|| usage("this measure needs --sigma"))?;
        if !(s >= 0.0) {
            return Err(usage("--sigma must be non-negative"));
        }
        Ok(s)
    };
    let mode = match a.mode {
        Mode::Exact => SearchMode::ExactCritical,
        Mode::Bisect => SearchMode::Bisect { tol: a.tol },
    };
    let metric = || -> CliResult<_> {
        let path = a.metric.as_ref().ok_or_else(|| usage("this measure needs --metric"))?;
        Ok(Some(load_metric(path)?))
    };
    Ok(match a.measure {
        MeasureName::DiscreteFrechet => Measure::DiscreteFrechet,
        MeasureName::Frechet => Measure::Frechet { mode },
        MeasureName::TwFrechet => Measure::TwFrechet {
            sigma: sigma()?,
            speed: match a.speed {
                Speed::Constant => SpeedModel::ConstantSpeed,
                Speed::Varying => SpeedModel::VaryingSpeed,
            },
            mode,
        },
        MeasureName::Dtw => Measure::Dtw,
        MeasureName::TwDiscreteFrechet => Measure::TwDiscreteFrechet { sigma: sigma()? },
        MeasureName::TwDtw => Measure::TwDtw { sigma: sigma()? },
        MeasureName::Edit => Measure::Edit,
        MeasureName::MetricEdit => Measure::MetricEdit { metric: metric()?, cap: a.cap },
        MeasureName::MetricEditInsertfirst => Measure::MetricEditInsertfirst { metric: metric()? },
        MeasureName::Jaccard => {
            let w = a.shingle_w.ok_or_else(|| usage("jaccard needs --shingle-w"))?;
            if w == 0 {
                return Err(usage("--shingle-w must be at least 1"));
            }
            Measure::Jaccard { w }
        }
    })
}

fn load_inputs(paths: &[PathBuf]) -> CliResult<Dataset> {
    let mut data: Option<Dataset> = None;
    for p in paths {
        let next = Dataset::load(p).map_err(|e| Failure::from(e).context(p))?;
        match &mut data {
            None => data = Some(next),
            Some(d) => d.extend(next)?,
        }
    }
    Ok(data.expect("clap requires at least one input"))
}

impl Failure {
    fn context(self, path: &Path) -> Self {
        Failure { msg: format!("{}: {}", path.display(), self.msg), ..self }
    }
}

fn check_kind(data: &Dataset, m: &Measure) -> CliResult<()> {
    let timed = matches!(data, Dataset::Timed(_));
    if timed != m.is_timed() {
        return Err(Error::Config(format!("measure {} does not apply to {} trajectories", m.name(), data.kind())).into());
    }
    Ok(())
}

fn measure_json(m: &Measure) -> Value {
    serde_json::to_value(m).expect("measure serializes")
}

fn cmd_dist(args: DistArgs) -> CliResult<String> {
    let measure = build_measure(&args.measure)?;
    let data = load_inputs(&args.inputs)?;
    check_kind(&data, &measure)?;
    let ids = data.ids();
    if !args.all_pairs {
        if data.len() != 2 {
            return Err(usage(format!("expected two trajectories, found {}; use --all-pairs for a matrix", data.len())));
        }
        let d = match &data {
            Dataset::Timed(v) => measure.timed(&v[0].1, &v[1].1)?,
            Dataset::Symbolic(v) => measure.symbolic(&v[0].1, &v[1].1)?,
        };
        return Ok(match args.format.unwrap_or(Format::Text) {
            Format::Json => to_json(&json!({
                "schema": SCHEMA,
                "measure": measure_json(&measure),
                "a": ids[0],
                "b": ids[1],
                "distance": d,
            })),
            Format::Text | Format::Csv => format!("{d}\n"),
        });
    }
    let dm = pairwise_distances(&data, &measure)?;
    match args.format.unwrap_or(Format::Json) {
        Format::Json => Ok(to_json(&json!({
            "schema": SCHEMA,
            "measure": measure_json(&measure),
            "ids": ids,
            "matrix": dm.rows(),
        }))),
        Format::Csv | Format::Text => matrix_csv(&ids, &dm),
    }
}

fn matrix_csv(ids: &[String], dm: &DistanceMatrix) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::from(std::io::Error::other(e));
    w.write_record(std::iter::once("").chain(ids.iter().map(String::as_str))).map_err(io)?;
    for (id, row) in ids.iter().zip(dm.rows()) {
        w.write_record(std::iter::once(id.clone()).chain(row.iter().map(f64::to_string))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_cluster(args: ClusterArgs) -> CliResult<String> {
    if args.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let measure = build_measure(&args.measure)?;
    let data = load_inputs(&args.inputs)?;
    check_kind(&data, &measure)?;
    if data.len() < args.k {
        return Err(usage(format!("k = {} exceeds the {} input trajectories", args.k, data.len())));
    }
    let dm = pairwise_distances(&data, &measure)?;
    let clustering = if args.exact {
        kgather_exact_capped(&dm, args.k, args.exact_cap)?
    } else {
        kgather_approx(&dm, args.k)?
    };
    let ids = data.ids();
    let clusters: Vec<Value> = clustering
        .clusters
        .iter()
        .map(|c| {
            json!({
                "center": ids[c.center],
                "members": c.members.iter().map(|&m| ids[m].as_str()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(to_json(&json!({
        "schema": SCHEMA,
        "measure": measure_json(&measure),
        "k": args.k,
        "exact": args.exact,
        "radius": clustering.radius,
        "clusters": clusters,
    })))
}

fn write_timed(path: &Path, t: &TimedTrajectory) -> CliResult<()> {
    write_csv(t, BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn cmd_gadget(cmd: GadgetCommand, seed: u64) -> CliResult<String> {
    match cmd {
        GadgetCommand::Ov { n, d, verify, out_dir } => {
            if n == 0 || d == 0 {
                return Err(usage("--n and --d must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = OVInstance::random(n, d, &mut rng)?;
            let (p, q) = build_ov_curves(&inst);
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
                write_timed(&dir.join("P.csv"), &TimedTrajectory::uniform(p.vertices())?)?;
                write_timed(&dir.join("Q.csv"), &TimedTrajectory::uniform(q.vertices())?)?;
            }
            let mut out = json!({
                "schema": SCHEMA,
                "gadget": "ov",
                "seed": seed,
                "instance": inst,
                "p_len": p.vertices().len(),
                "q_len": q.vertices().len(),
            });
            if verify {
                out["report"] = serde_json::to_value(verify_ov_gadget(&inst)?).expect("report serializes");
            }
            Ok(to_json(&out))
        }
        GadgetCommand::Sat { formula, k, verify, out_dir } => {
            let text = fs::read_to_string(&formula)?;
            let f = CNFFormula::parse_dimacs(&text).map_err(|e| Failure::from(e).context(&formula))?;
            let gadget = build_sat_gadget(&f, k)?;
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
                gadget.dataset().to_writer(BufWriter::new(File::create(dir.join("dataset.json"))?))?;
                write_metric(&gadget.metric, BufWriter::new(File::create(dir.join("metric.json"))?))?;
            }
            let mut out = json!({
                "schema": SCHEMA,
                "gadget": "sat",
                "n": f.num_vars(),
                "m": f.clauses().len(),
                "k": k,
                "trajectories": gadget.trajectories.len(),
                "warnings": gadget.warnings,
            });
            if verify {
                out["report"] = serde_json::to_value(verify_sat_gadget(&f, k)?).expect("report serializes");
            }
            Ok(to_json(&out))
        }
    }
}

fn cmd_bench(args: BenchArgs, seed: u64) -> CliResult<String> {
    if args.sizes.len() < 2 || args.sigmas.len() < 2 {
        return Err(usage("bench needs at least two sizes and two sigmas"));
    }
    let scaling = discrete_frechet_scaling(&args.sizes, args.repeats, seed);
    let cells = tw_cell_correlation(args.tw_n, &args.sigmas, args.repeats, seed);
    let edit = metric_edit_growth(&args.edit_sizes, args.repeats.min(3), seed);
    if args.format == Format::Json {
        return Ok(to_json(&json!({
            "schema": SCHEMA,
            "seed": seed,
            "discrete_frechet": scaling,
            "tw_discrete_frechet": cells,
            "metric_edit": edit,
        })));
    }
    let mut s = Vec::new();
    let w = &mut s;
    writeln!(w, "discrete-frechet (loglog slope {:.3})", scaling.slope)?;
    writeln!(w, "{:>8} {:>12}", "n", "ms")?;
    for (n, t) in scaling.sizes.iter().zip(&scaling.seconds) {
        writeln!(w, "{n:>8} {:>12.3}", t * 1e3)?;
    }
    writeln!(w, "\ntw-discrete-frechet n={} (pearson r vs cells {:.4})", cells.n, cells.pearson)?;
    writeln!(w, "{:>8} {:>12} {:>12}", "sigma", "cells", "ms")?;
    for ((sg, c), t) in cells.sigmas.iter().zip(&cells.cells).zip(&cells.seconds) {
        writeln!(w, "{sg:>8} {c:>12} {:>12.3}", t * 1e3)?;
    }
    writeln!(w, "\nmetric-edit full DP")?;
    writeln!(w, "{:>8} {:>12} {:>14} {:>14}", "n", "ms", "ratio", "model ratio")?;
    for (i, (n, t)) in edit.sizes.iter().zip(&edit.seconds).enumerate() {
        let (r, m) = match i {
            0 => ("-".to_string(), "-".to_string()),
            _ => (format!("{:.2}", edit.observed_ratio[i - 1]), format!("{:.2}", edit.model_ratio[i - 1])),
        };
        writeln!(w, "{n:>8} {:>12.3} {r:>14} {m:>14}", t * 1e3)?;
    }
    Ok(String::from_utf8(s).expect("ascii table"))
}
