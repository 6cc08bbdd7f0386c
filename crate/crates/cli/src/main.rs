use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ltlzinc::inference::{
    default_grid, evaluate, mp_baselines, oracle_sweep, read_report, summarize, sweep_seeds, write_report, Engine,
    EngineKind, OracleConfig, OracleKind, OracleTarget, ReportRow, DEFAULT_NOISE_LEVELS,
};
use ltlzinc::taskgen::{
    attach_image_indices, builtin_task, compile_task, generate_dataset_compiled, read_dataset, write_dataset,
    CompiledTask, Dataset, ImagePools, Split, TaskSpec, BUILTIN_TASKS, DEFAULT_SEED,
};
use ltlzinc::Error;

/// `println!` that exits quietly when stdout is closed (e.g. piped to `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// Directory for cached generated datasets, keyed by spec hash.
const CACHE_ENV: &str = "LTLZINC_CACHE_DIR";

#[derive(Parser)]
#[command(name = "ltlzinc", version, about = "Temporal constraint task compiler, generator and inference harness")]
struct Cli {
    /// Worker threads for generation and sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a task to its minimal DFA; print the state count and guards.
    Compile {
        /// Built-in task name (task1..task6, example) or YAML spec path.
        spec: String,
        /// Output directory for `<task>.dfa.json`.
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate a labeled dataset (CSV plus JSON sidecar).
    Generate(GenerateArgs),
    /// Evaluate a temporal engine on a dataset with oracle perception.
    Infer(InferArgs),
    /// Run the oracle-noise grid over engines and seeds.
    Sweep(SweepArgs),
    /// Most-probable-class baselines of a dataset.
    Baseline {
        /// Dataset CSV, built-in task name or YAML spec path.
        input: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarize sweep CSVs as mean ± std across seeds (JSON).
    Report {
        /// Sweep CSV files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write the summary here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Built-in task name or YAML spec path.
    spec: String,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Seed (default: the spec's, 12345 for built-ins).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    positive_ratio: Option<f64>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    val: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    min_len: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    /// CSV of image pools (`split,source,label,index`) to attach image indices.
    #[arg(long)]
    image_pools: Option<PathBuf>,
    /// Resampling epoch for image indices.
    #[arg(long, default_value_t = 0, requires = "image_pools")]
    epoch: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value = "perfect", value_parser = parse_kind)]
    oracle: OracleKind,
    /// IC or IC+CC.
    #[arg(long, default_value = "IC+CC", value_parser = parse_target)]
    target: OracleTarget,
    /// Oracle noise level.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct InferArgs {
    /// Dataset CSV written by `generate`.
    dataset: PathBuf,
    #[arg(long, value_parser = parse_engine)]
    engine: EngineKind,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Task spec to check the dataset against (built-in name or YAML path).
    #[arg(long)]
    task: Option<String>,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    split: Split,
    /// Fit a temperature on the validation split first.
    #[arg(long)]
    calibrate: bool,
    /// Check the spec hash and replay every sample before evaluating.
    #[arg(long)]
    verify: bool,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in task name, YAML spec path or dataset CSV.
    input: String,
    /// Noise levels; 0 adds the perfect oracle.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_NOISE_LEVELS)]
    p_list: Vec<f64>,
    /// Seeds per configuration.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    /// First seed; later seeds count up from it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "fuzzy-p,sddnnf-p")]
    engines: Vec<EngineKind>,
    #[arg(long)]
    calibrate: bool,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

fn reason(e: Error) -> String {
    match e {
        Error::Domain(msg) => msg,
        e => e.to_string(),
    }
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse().map_err(reason)
}

fn parse_kind(s: &str) -> Result<OracleKind, String> {
    s.parse().map_err(reason)
}

fn parse_target(s: &str) -> Result<OracleTarget, String> {
    s.parse().map_err(reason)
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::parse(s).ok_or_else(|| format!("unknown split `{s}`; valid splits: train, val, test"))
}

/// Failures split by exit code: 2 for bad invocations and specs, 1 otherwise.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn load_spec(arg: &str) -> CliResult<TaskSpec> {
    if let Some(spec) = builtin_task(arg) {
        return Ok(spec);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(usage(anyhow!(
            "`{arg}` is neither a built-in task ({}) nor a spec file",
            BUILTIN_TASKS.join(", ")
        )));
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    TaskSpec::from_yaml(&text).map_err(|e| usage(anyhow!("{}: {e}", path.display())))
}

fn compile(spec: &TaskSpec) -> CliResult<CompiledTask> {
    compile_task(spec).map_err(|e| match e {
        Error::Syntax { .. } | Error::UnknownToken { .. } | Error::Parse { .. } => usage(e),
        e => Failure::Runtime(e.into()),
    })
}

fn is_dataset(arg: &str) -> bool {
    arg.ends_with(".csv") && Path::new(arg).is_file()
}

/// Generates the dataset for `spec`, reusing the cache directory if set.
fn dataset_for(task: &CompiledTask) -> CliResult<Dataset> {
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(generate_dataset_compiled(task)?);
    };
    let path = dir.join(format!("{}.csv", task.spec().hash()));
    if path.is_file() {
        if let Ok(ds) = read_dataset(&path, true) {
            return Ok(ds);
        }
    }
    let ds = generate_dataset_compiled(task)?;
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write_dataset(&ds, &path)?;
    Ok(ds)
}

fn load_input(arg: &str, seed: Option<u64>) -> CliResult<(CompiledTask, Dataset)> {
    if is_dataset(arg) {
        let ds = read_dataset(Path::new(arg), false)?;
        let task = compile(&ds.spec)?;
        return Ok((task, ds));
    }
    let mut spec = load_spec(arg)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let task = compile(&spec)?;
    let ds = dataset_for(&task)?;
    Ok((task, ds))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_compile(spec: &str, out: &Path) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let task = compile(&spec)?;
    let dfa = task.dfa();
    create_dir(out)?;
    let path = out.join(format!("{}.dfa.json", spec.name));
    fs::write(&path, dfa.to_json()).with_context(|| format!("writing {}", path.display()))?;
    say!("task: {}", spec.name);
    say!("formula: {}", task.formula());
    say!("atoms: {}", task.atoms().join(", "));
    say!("states: {}", dfa.num_states());
    let acc: Vec<String> = dfa.accepting_states().iter().map(|s| s.to_string()).collect();
    say!("accepting: {}", acc.join(", "));
    say!("guards:");
    for (s, t, g) in task.guard_table() {
        say!("  {s} -> {t}: {g}");
    }
    say!("wrote {}", path.display());
    Ok(())
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let mut spec = load_spec(&a.spec)?;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(r) = a.positive_ratio {
        if !(0.0..=1.0).contains(&r) {
            return Err(usage(anyhow!("--positive-ratio must be in [0, 1], got {r}")));
        }
        spec.positive_ratio = r;
    }
    for (dst, src) in [
        (&mut spec.splits.train, a.train),
        (&mut spec.splits.val, a.val),
        (&mut spec.splits.test, a.test),
        (&mut spec.length.min, a.min_len),
        (&mut spec.length.max, a.max_len),
    ] {
        if let Some(v) = src {
            *dst = v;
        }
    }
    let task = compile(&spec)?;
    let mut ds = generate_dataset_compiled(&task)?;
    if let Some(pools) = &a.image_pools {
        ds = attach_image_indices(&ds, &ImagePools::from_csv(pools)?, a.epoch)?;
    }
    create_dir(&a.out)?;
    let path = a.out.join(format!("{}.csv", spec.name));
    write_dataset(&ds, &path)?;
    for split in Split::ALL {
        let xs = ds.split(split);
        let pos = xs.iter().filter(|s| s.label == 1).count();
        let ratio = if xs.is_empty() { 0.0 } else { pos as f64 / xs.len() as f64 };
        say!("{}: {} sequences, {pos} positive ({ratio:.3})", split.as_str(), xs.len());
    }
    say!("wrote {}", path.display());
    Ok(())
}

fn cmd_infer(a: &InferArgs) -> CliResult<()> {
    let o = &a.oracle;
    let oracle = OracleConfig::new(o.target, o.oracle, o.p, o.seed).map_err(usage)?;
    let ds = read_dataset(&a.dataset, a.verify)?;
    let task = match &a.task {
        Some(t) => {
            let spec = load_spec(t)?;
            if spec.hash() != ds.spec_hash {
                return Err(Failure::Runtime(anyhow!(
                    "dataset {} was not generated from task `{}`",
                    a.dataset.display(),
                    spec.name
                )));
            }
            compile(&spec)?
        }
        None => compile(&ds.spec)?,
    };
    let engine = Engine::new(a.engine, task.dfa())?;
    let ev = evaluate(&task, &ds, a.split, &engine, &oracle, a.calibrate)?;
    let m = &ev.metrics;

    create_dir(&a.out)?;
    let stem = format!("{}_{}_{}", task.spec().name, a.engine, a.split.as_str());
    let row = ReportRow::new(&task.spec().name, a.engine, &oracle, m);
    let csv_path = a.out.join(format!("{stem}_metrics.csv"));
    write_report(&[row], fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?)?;
    let json_path = a.out.join(format!("{stem}_metrics.json"));
    write_json(
        &json_path,
        &serde_json::json!({
            "task": task.spec().name,
            "engine": a.engine.as_str(),
            "split": a.split.as_str(),
            "oracle": oracle,
            "evaluation": ev,
        }),
    )?;

    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    say!("ic_acc: {}", fmt(m.ic_acc));
    say!("cc_acc: {:.4}", m.cc_acc);
    say!("nsp_acc: {:.4}", m.nsp_acc);
    say!("sc_acc: {:.4}", m.sc_acc);
    say!("avg_acc: {:.4}", m.avg_acc);
    say!("mp_successor: {}", fmt(m.mp_successor));
    say!("mp_sequence: {}", fmt(m.mp_sequence));
    say!("semantic_loss: {:.4}", ev.semantic_loss);
    if let Some(c) = ev.calibration {
        say!(
            "temperature: {:.4}{}",
            c.temperature,
            if c.degenerate { " (degenerate input, unchanged)" } else { "" }
        );
    }
    say!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<()> {
    if a.seeds == 0 {
        return Err(usage(anyhow!("--seeds must be at least 1")));
    }
    let grid = default_grid(&a.p_list).map_err(usage)?;
    let (task, ds) = load_input(&a.input, None)?;
    let rows = oracle_sweep(&task, &ds, &grid, &a.engines, &sweep_seeds(a.seed, a.seeds), a.calibrate)?;
    create_dir(&a.out)?;
    let name = &task.spec().name;
    let csv_path = a.out.join(format!("{name}_sweep.csv"));
    write_report(&rows, fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?)?;
    let json_path = a.out.join(format!("{name}_summary.json"));
    write_json(&json_path, &summarize(&rows))?;
    say!(
        "{} configurations x {} engines x {} seeds = {} rows",
        grid.len(),
        a.engines.len(),
        a.seeds,
        rows.len()
    );
    say!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_baseline(input: &str, seed: Option<u64>) -> CliResult<()> {
    let (task, ds) = load_input(input, seed)?;
    let (succ, seq) = mp_baselines(&ds)?;
    say!("task: {}", task.spec().name);
    say!("mp_successor: {succ:.4}");
    say!("mp_sequence: {seq:.4}");
    Ok(())
}

fn cmd_report(inputs: &[PathBuf], out: Option<&Path>) -> CliResult<()> {
    let mut rows = Vec::new();
    for p in inputs {
        let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
        rows.extend(read_report(f).with_context(|| format!("reading {}", p.display()))?);
    }
    let summary = summarize(&rows);
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                create_dir(dir)?;
            }
            write_json(path, &summary)?;
            say!("{} configurations from {} rows; wrote {}", summary.len(), rows.len(), path.display());
        }
        None => say!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(usage(anyhow!("--jobs must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Compile { spec, out } => cmd_compile(spec, out),
        Command::Generate(a) => cmd_generate(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Baseline { input, seed } => cmd_baseline(input, *seed),
        Command::Report { inputs, out } => cmd_report(inputs, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
