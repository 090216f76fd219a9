use std::path::PathBuf;
use std::process::ExitCode;

use afrecur::commands::{cmd_evaluate, cmd_features, cmd_report, cmd_select, cmd_synth, SynthOptions};
use afrecur::io::RunConfig;
use afrecur::Wavelet;
use clap::{Args, Parser, Subcommand};
use log::error;

/// Atrial-activity features and outcome prediction from single-lead ECG.
#[derive(Parser)]
#[command(name = "afrecur", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic cohort with a manifest.
    Synth {
        #[arg(long, default_value = "cohort")]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        n_organized: usize,
        #[arg(long, default_value_t = 23)]
        n_disorganized: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extract the feature table for every record in a manifest.
    Features {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "features.csv")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Cross-validate a decision tree on a feature subset.
    Evaluate {
        #[arg(long)]
        table: PathBuf,
        /// Comma-separated feature names; defaults to the configured model.
        #[arg(long, value_delimiter = ',')]
        features: Vec<String>,
        #[arg(long, default_value = "evaluation.json")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Repeated sequential forward feature selection.
    Select {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "selection.json")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Box-plot and ROC tables for plotting.
    Report {
        #[arg(long)]
        table: PathBuf,
        /// Evaluation report whose ROC curve is exported.
        #[arg(long)]
        evaluation: Option<PathBuf>,
        #[arg(long, default_value = "report")]
        out_dir: PathBuf,
    },
}

/// Flags mirroring the run configuration. Values in `--config` take precedence.
#[derive(Args)]
struct RunFlags {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    max_splits: Option<usize>,
    #[arg(long)]
    selection_repetitions: Option<usize>,
    /// Start of the analysed excerpt (s).
    #[arg(long)]
    offset_s: Option<f64>,
    #[arg(long)]
    window_s: Option<f64>,
    #[arg(long)]
    wavelet: Option<Wavelet>,
    #[arg(long)]
    levels: Option<usize>,
}

impl RunFlags {
    fn resolve(&self) -> afrecur::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.folds {
            c.cv.folds = v;
        }
        if let Some(v) = self.repetitions {
            c.cv.repetitions = v;
        }
        if let Some(v) = self.max_splits {
            c.cv.max_splits = v;
        }
        if let Some(v) = self.selection_repetitions {
            c.selection_repetitions = v;
        }
        if let Some(v) = self.offset_s {
            c.features.offset_s = v;
        }
        if let Some(v) = self.window_s {
            c.features.window_s = v;
        }
        if let Some(v) = self.wavelet {
            c.features.wavelet.wavelet = v;
        }
        if let Some(v) = self.levels {
            c.features.wavelet.levels = v;
        }
        match &self.config {
            Some(path) => c.overlay_file(path),
            None => Ok(c),
        }
    }
}

fn run(cli: Cli) -> afrecur::Result<()> {
    match cli.command {
        Command::Synth { out, n_organized, n_disorganized, seed } => {
            println!("seed: {seed}");
            let opts = SynthOptions { out_dir: out, n_organized, n_disorganized, seed, ..Default::default() };
            let manifest = cmd_synth(&opts)?;
            println!("manifest: {}", manifest.display());
        }
        Command::Features { manifest, out, run } => {
            let cfg = run.resolve()?;
            println!("seed: {}", cfg.seed);
            let s = cmd_features(&manifest, &cfg, &out)?;
            println!("rows: {}  failures: {}", s.rows.len(), s.errors.len());
            println!("table: {}", s.table.display());
            if !s.errors.is_empty() {
                println!("errors: {}", s.error_table.display());
            }
        }
        Command::Evaluate { table, features, out, run } => {
            let cfg = run.resolve()?;
            println!("seed: {}", cfg.seed);
            let features = if features.is_empty() { cfg.model.clone() } else { features };
            let r = cmd_evaluate(&table, &features, &cfg, &out)?.result;
            println!(
                "{}: Se {:.2}  Sp {:.2}  Acc {:.2}  AUC {:.2}  PPV {:.2}  NPV {:.2}",
                r.features.join("+"),
                r.se,
                r.sp,
                r.acc,
                r.auc,
                r.ppv,
                r.npv
            );
            println!("report: {}", out.display());
        }
        Command::Select { table, out, run } => {
            let cfg = run.resolve()?;
            println!("seed: {}", cfg.seed);
            let r = cmd_select(&table, &cfg, &out)?.result;
            for s in r.subsets.iter().take(5) {
                println!("{:>4}  {}", s.count, s.features.join("+"));
            }
            println!("report: {}", out.display());
        }
        Command::Report { table, evaluation, out_dir } => {
            for p in cmd_report(&table, evaluation.as_deref(), &out_dir)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
