//! `concurrence`: batch command-line front end for concurrence homology.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use concurrence::complex::{BuildOptions, FilteredComplex};
use concurrence::localization::localization_report;
use concurrence::nullmodel::{generate_independent, planted_hole, toy_fixture, NullConfig, Toy};
use concurrence::persistence::{compute_persistence, plot_csv, plot_svg, DiagramJson};
use concurrence::signal::{dichotomize, DichotomizeConfig, Domain};
use concurrence::summaries::{euler_characteristic_with, moments, moments_csv, EulerOptions, MomentJson};
use concurrence::{BinaryMatrix, Error, SeriesMatrix};

use manifest::{write_json, write_text, Run};

const BUDGET_ENV: &str = "CT_WORK_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "concurrence", version, about = "Persistent homology of concurrence in binary data")]
struct Cli {
    /// Worker threads (defaults to available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop low-variability variables and dichotomize a continuous series.
    Dichotomize(DichotomizeArgs),
    /// Build the filtered complex and write persistence diagrams and summaries.
    Persist(PersistArgs),
    /// Localize homology classes to short cycles.
    Localize(LocalizeArgs),
    /// Write a synthetic or toy binary matrix.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum DomainArg {
    Time,
    Fourier,
}

#[derive(Debug, Args)]
struct DichotomizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "time")]
    domain: DomainArg,
    #[arg(long, default_value_t = 0.2)]
    drop_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    active_fraction: f64,
    #[arg(long, default_value_t = 0.9)]
    power_quantile: f64,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Binary matrix CSV.
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Built-in toy dataset (I, II, III, IV or V).
    #[arg(long, group = "source")]
    fixture: Option<Toy>,
}

#[derive(Debug, Args)]
struct PersistArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    max_dim: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated frequency levels for Euler characteristics.
    #[arg(long, value_delimiter = ',')]
    euler_levels: Vec<usize>,
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    dim: usize,
    /// Comma-separated levels (default: every level carrying simplices of that dimension).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long, conflicts_with_all = ["rate", "planted_dim"])]
    fixture: Option<Toy>,
    #[arg(long, default_value_t = 32)]
    vars: usize,
    /// Observations, or extra noise observations with --planted-dim.
    #[arg(long, default_value_t = 192)]
    obs: usize,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a hollow (d+1)-simplex shell on the first d+2 variables.
    #[arg(long)]
    planted_dim: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::fmt::Debug for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return if err.is_budget() { 3 } else { 2 };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Usage("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let budget = env_budget()?;
    match cli.command {
        Command::Dichotomize(args) => cmd_dichotomize(args),
        Command::Persist(args) => cmd_persist(args, budget),
        Command::Localize(args) => cmd_localize(args, budget),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn env_budget() -> Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Usage(format!("{BUDGET_ENV} must be a non-negative integer, got {v:?}")).into()),
        Err(_) => Ok(None),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn sidecar(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    output.with_file_name(name)
}

fn cmd_dichotomize(args: DichotomizeArgs) -> Result<()> {
    let cfg = DichotomizeConfig {
        domain: match args.domain {
            DomainArg::Time => Domain::Time,
            DomainArg::Fourier => Domain::Fourier,
        },
        drop_fraction: args.drop_fraction,
        active_fraction: args.active_fraction,
        power_quantile: args.power_quantile,
    };
    let bytes = read_input(&args.input)?;
    let run = Run::start("dichotomize", cfg, &bytes)?;
    let series = SeriesMatrix::read_csv(bytes.as_slice(), &args.input.display().to_string())?;
    let out = dichotomize(&series, &cfg)?;

    #[derive(Serialize)]
    struct Dropped<'a> {
        var_labels: &'a [String],
        dropped: &'a [String],
        config: DichotomizeConfig,
    }
    write_text(&args.output, &out.matrix.to_csv_string())?;
    write_json(
        &sidecar(&args.output, ".dropped.json"),
        &Dropped {
            var_labels: out.matrix.labels(),
            dropped: &out.dropped,
            config: cfg,
        },
    )?;
    run.finish(&sidecar(&args.output, ".manifest.json"))
}

fn load_binary(source: &Source) -> Result<(BinaryMatrix, Vec<u8>)> {
    if let Some(toy) = source.fixture {
        let bm = toy_fixture(toy);
        let bytes = bm.to_csv_string().into_bytes();
        return Ok((bm, bytes));
    }
    let path = source.input.as_ref().expect("clap enforces one source");
    let bytes = read_input(path)?;
    let bm = BinaryMatrix::read_csv(bytes.as_slice(), &path.display().to_string())?;
    Ok((bm, bytes))
}

fn build(bm: &BinaryMatrix, max_dim: usize, budget: Option<u64>) -> Result<FilteredComplex> {
    if bm.n_vars() == 0 {
        return Err(Error::NoVariablesRetained.into());
    }
    let mut opts = BuildOptions::new(max_dim);
    if let Some(b) = budget {
        opts = opts.with_budget(b);
    }
    Ok(FilteredComplex::build(bm, opts)?)
}

#[derive(Serialize)]
struct SourceConfig {
    input: Option<String>,
    fixture: Option<String>,
}

impl From<&Source> for SourceConfig {
    fn from(s: &Source) -> Self {
        Self {
            input: s.input.as_ref().map(|p| p.display().to_string()),
            fixture: s.fixture.map(|t| format!("{t:?}")),
        }
    }
}

fn cmd_persist(args: PersistArgs, budget: Option<u64>) -> Result<()> {
    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        source: SourceConfig,
        max_dim: usize,
        euler_levels: Vec<usize>,
        work_budget: Option<u64>,
    }
    let (bm, bytes) = load_binary(&args.source)?;
    let run = Run::start(
        "persist",
        Config {
            source: (&args.source).into(),
            max_dim: args.max_dim,
            euler_levels: args.euler_levels.clone(),
            work_budget: budget,
        },
        &bytes,
    )?;
    let fc = build(&bm, args.max_dim, budget)?;
    let diagram = compute_persistence(&fc, args.max_dim)?;

    let mut euler = Vec::new();
    let euler_opts = EulerOptions {
        budget: budget.unwrap_or(EulerOptions::default().budget),
        ..EulerOptions::default()
    };
    for &f in &args.euler_levels {
        euler.push(EulerLevel {
            level: f,
            euler_characteristic: euler_characteristic_with(&fc, f, euler_opts)?,
        });
    }

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let dir = &args.out_dir;

    #[derive(Serialize)]
    struct DiagramOut<'a> {
        var_labels: &'a [String],
        n_obs: usize,
        #[serde(flatten)]
        diagram: DiagramJson,
    }
    write_json(
        &dir.join("diagram.json"),
        &DiagramOut {
            var_labels: fc.labels(),
            n_obs: fc.n_obs(),
            diagram: diagram.to_json(),
        },
    )?;
    let mut vectors = Vec::new();
    for d in 0..=args.max_dim {
        write_text(&dir.join(format!("diagram_dim{d}.csv")), &plot_csv(&diagram, d))?;
        write_text(&dir.join(format!("diagram_dim{d}.svg")), &plot_svg(&diagram, d))?;
        vectors.push(moments(&diagram, d));
    }
    let moment_json: Vec<MomentJson> = vectors.iter().map(MomentJson::from).collect();
    write_json(&dir.join("moments.json"), &moment_json)?;
    write_text(&dir.join("moments.csv"), &moments_csv(&vectors))?;
    if !args.euler_levels.is_empty() {
        #[derive(Serialize)]
        struct EulerOut<'a> {
            var_labels: &'a [String],
            levels: Vec<EulerLevel>,
        }
        write_json(
            &dir.join("euler.json"),
            &EulerOut {
                var_labels: fc.labels(),
                levels: euler,
            },
        )?;
    }
    run.finish(&dir.join("manifest.json"))
}

#[derive(Serialize)]
struct EulerLevel {
    level: usize,
    euler_characteristic: i64,
}

fn cmd_localize(args: LocalizeArgs, budget: Option<u64>) -> Result<()> {
    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        source: SourceConfig,
        dim: usize,
        levels: Option<Vec<usize>>,
        work_budget: Option<u64>,
    }
    let (bm, bytes) = load_binary(&args.source)?;
    let run = Run::start(
        "localize",
        Config {
            source: (&args.source).into(),
            dim: args.dim,
            levels: args.levels.clone(),
            work_budget: budget,
        },
        &bytes,
    )?;
    let fc = build(&bm, args.dim, budget)?;
    let report = localization_report(&fc, args.dim, args.levels.as_deref())?;
    write_json(&args.output, &report)?;
    run.finish(&sidecar(&args.output, ".manifest.json"))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    #[derive(Serialize)]
    struct Config {
        fixture: Option<String>,
        planted_dim: Option<usize>,
        vars: usize,
        obs: usize,
        rate: Option<f64>,
        seed: u64,
    }
    let config = Config {
        fixture: args.fixture.map(|t| format!("{t:?}")),
        planted_dim: args.planted_dim,
        vars: args.vars,
        obs: args.obs,
        rate: args.rate,
        seed: args.seed,
    };
    let run = Run::start("simulate", &config, &[])?;
    let bm = if let Some(toy) = args.fixture {
        toy_fixture(toy)
    } else if let Some(d) = args.planted_dim {
        planted_hole(d, args.vars, args.obs, args.seed)?
    } else {
        generate_independent(&NullConfig {
            n_obs: args.obs,
            n_vars: args.vars,
            activity_rate: args.rate.unwrap_or(0.2),
            seed: args.seed,
        })?
    };
    write_text(&args.output, &bm.to_csv_string())?;
    run.finish(&sidecar(&args.output, ".manifest.json"))
}
