use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zdeval::classifiers::ModelKind;
use zdeval::flowdata::{check_known_counts, columns_to_toml, infer_schema, load_csv, summarize, LoadOptions};
use zdeval::harness::{desk_mlp_config, emit_reports, run_experiment, synthesize_dataset, ExperimentConfig, SyntheticSpec};
use zdeval::{Error, Exec, Result};

/// Zero-day (leave-one-attack-class-out) evaluation for flow-based NIDS.
#[derive(Parser)]
#[command(name = "zdeval", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full experiment: known-attack baseline, every zero-day
    /// scenario, distance analysis and correlation.
    Run(RunArgs),
    /// Distance analysis only (no model training).
    Wd(RunArgs),
    /// Write a synthetic flow dataset and a matching experiment config.
    Synth(SynthArgs),
    /// Print a dataset summary, or a proposed schema with --infer-schema.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of forest, mlp.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Comma-separated held-out classes to evaluate.
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    /// Seeded uniform row cap applied after loading.
    #[arg(long)]
    subsample: Option<usize>,
    /// Record per-scenario failures instead of aborting.
    #[arg(long)]
    keep_going: bool,
    /// Worker threads (0 = all CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Three well separated attack blobs (1,600 rows).
    Separable,
    /// Four attack classes, one shifted away from the others.
    ZeroDay,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "zero-day")]
    preset: Preset,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Shift of the odd class for the zero-day preset.
    #[arg(long, default_value_t = -14.0, allow_hyphen_values = true)]
    shift: f64,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write an experiment config pointing at the CSV.
    #[arg(long)]
    config_out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    /// Experiment config whose dataset to summarize.
    #[arg(long, conflicts_with = "data")]
    config: Option<PathBuf>,
    /// CSV file (with --infer-schema).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Propose a `columns = [...]` block from the header and first rows.
    #[arg(long, requires = "data")]
    infer_schema: bool,
    #[arg(long, default_value_t = 1000)]
    sample_rows: usize,
}

fn apply_overrides(cfg: &mut ExperimentConfig, a: &RunArgs) -> Result<()> {
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(models) = &a.models {
        cfg.models = models.iter().map(|m| m.parse::<ModelKind>()).collect::<Result<_>>()?;
    }
    if let Some(classes) = &a.classes {
        cfg.classes = classes.clone();
    }
    if a.subsample.is_some() {
        cfg.subsample = a.subsample;
    }
    if a.keep_going {
        cfg.keep_going = true;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if a.sequential {
        cfg.execution = Exec::Sequential;
    }
    if let Some(out) = &a.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()
}

fn run(a: &RunArgs, wd_only: bool) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    apply_overrides(&mut cfg, a)?;
    if wd_only {
        cfg.models.clear();
    } else if cfg.models.is_empty() {
        return Err(Error::Config("no models selected; use `zdeval wd` for distance analysis only".into()));
    }
    let out = cfg
        .output
        .clone()
        .ok_or_else(|| Error::Config("no output directory: pass --out or set `output` in the config".into()))?;
    let report = run_experiment(&cfg)?;
    let files = emit_reports(&report, &out)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    log::info!("wrote {} files to {}", files.len(), out.display());
    println!("{}", out.display());
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let spec = match a.preset {
        Preset::Separable => SyntheticSpec::separable(a.seed),
        Preset::ZeroDay => SyntheticSpec::zero_day_demo(a.seed, a.shift),
    };
    let table = synthesize_dataset(&spec)?;
    create_parent(&a.out)?;
    table.write_csv_path(&a.out)?;
    log::info!("wrote {} rows to {}", table.row_count(), a.out.display());
    if let Some(cfg_path) = &a.config_out {
        let base = cfg_path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let csv_ref = relative_to(&a.out, base);
        let mlp = desk_mlp_config();
        let text = format!(
            "seed = {}\nfolds = 5\nmodels = [\"forest\", \"mlp\"]\noutput = \"out\"\n\n\
             [train.mlp]\nbatch_size = {}\nlearning_rate = {}\n\n\
             [dataset]\npath = {:?}\nbenign_name = {:?}\n{}",
            a.seed,
            mlp.batch_size,
            mlp.learning_rate,
            csv_ref.display().to_string(),
            table.benign_name(),
            table.schema().to_toml_fragment()
        );
        create_parent(cfg_path)?;
        std::fs::write(cfg_path, text).map_err(|e| Error::Config(format!("writing {}: {e}", cfg_path.display())))?;
    }
    Ok(())
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => {
            std::fs::create_dir_all(p).map_err(|e| Error::io(format!("creating {}", p.display()), e))
        }
        _ => Ok(()),
    }
}

/// `target` relative to `base` when it lives beneath it, else absolute.
fn relative_to(target: &Path, base: &Path) -> PathBuf {
    let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let (t, b) = (abs(target), abs(base));
    t.strip_prefix(&b).map(Path::to_path_buf).unwrap_or(t)
}

fn inspect(a: &InspectArgs) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let write_err = |e: io::Error| Error::io("writing to stdout", e);
    if a.infer_schema {
        let path = a.data.as_ref().expect("clap enforces --data");
        let f = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
        if f.metadata().map(|m| m.len() == 0).unwrap_or(false) {
            return Err(Error::EmptyFile { path: path.clone() });
        }
        let cols = infer_schema(BufReader::new(f), a.sample_rows)?;
        out.write_all(columns_to_toml(&cols).as_bytes()).map_err(write_err)?;
        return Ok(());
    }
    let cfg_path = a
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("inspect needs --config, or --data with --infer-schema".into()))?;
    let cfg = ExperimentConfig::load(cfg_path)?;
    let ds = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("no [dataset] section in the config".into()))?;
    let opts = LoadOptions {
        benign_name: ds.benign_name.clone(),
        invalid_rows: ds.invalid_rows,
    };
    let loaded = load_csv(&ds.path, &ds.schema()?, &opts)?;
    let summary = summarize(&loaded.table);
    if let Some(w) = check_known_counts(summary.row_count, summary.attack_rows) {
        log::warn!("{w}");
    }
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out).map_err(write_err)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a, false),
        Command::Wd(a) => run(a, true),
        Command::Synth(a) => synth(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // every error message already embeds its cause
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
