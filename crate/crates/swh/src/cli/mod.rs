//! Command-line interface. Every command prints a single-line JSON summary on
//! stdout; logs go to stderr.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use swh_core::{ModelKind, Target};

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "swh", version, about = "Solar water heater performance models and design screening")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    GenData(GenDataArgs),
    /// Descriptive statistics of a dataset.
    Stats(StatsArgs),
    /// Train a model on a split and evaluate it on the held-out part.
    Train(TrainArgs),
    /// Evaluate a saved model.
    Eval(EvalArgs),
    /// Predict one design with one or two saved models.
    Predict(PredictArgs),
    /// Screen a design grid and write a candidate database.
    Screen(ScreenArgs),
    /// Candidate database utilities.
    #[command(subcommand)]
    Db(DbCommand),
    /// Run the HTTP prediction service.
    Serve(ServeArgs),
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(s).ok_or_else(|| format!("unknown model kind `{s}` (mlfn, grnn, elm, lssvm)"))
}

fn parse_target(s: &str) -> Result<Target, String> {
    Target::parse(s).ok_or_else(|| format!("unknown target `{s}` (hcr, hlc)"))
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, default_value_t = 915)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Calibration JSON; defaults to the shipped config/generator.json.
    #[arg(long)]
    pub generator_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long = "model", value_parser = parse_kind)]
    pub kind: ModelKind,
    #[arg(long, value_parser = parse_target)]
    pub target: Target,
    /// Training share of the split.
    #[arg(long)]
    pub split: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Model file; defaults to `<target>-<kind>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Writes `<prefix>.csv` and `<prefix>.json` for the test evaluation.
    #[arg(long)]
    pub report_prefix: Option<PathBuf>,
    /// MLFN hidden layer sizes, e.g. `8` or `8,4`.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub elm_hidden: Option<usize>,
    #[arg(long)]
    pub elm_ridge: Option<f64>,
    /// Retrain with this seed on the same split and report the spread.
    #[arg(long)]
    pub sensitivity_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Evaluate only the test part of this split (with `--seed`).
    #[arg(long)]
    pub split: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub tube_length: f64,
    #[arg(long)]
    pub n_tubes: f64,
    #[arg(long)]
    pub tcd: f64,
    #[arg(long)]
    pub tank_volume: f64,
    #[arg(long, visible_alias = "area")]
    pub collector_area: f64,
    #[arg(long, visible_alias = "angle")]
    pub tilt_angle: f64,
    #[arg(long)]
    pub final_temp: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file; give it twice for an HCR and an HLC model.
    #[arg(long = "model", required = true, num_args = 1)]
    pub models: Vec<PathBuf>,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[arg(long)]
    pub hcr_model: Option<PathBuf>,
    #[arg(long)]
    pub hlc_model: Option<PathBuf>,
    /// Dataset whose per-feature min/max bound the grid; defaults to the
    /// generator calibration ranges.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Seven comma-separated value counts in feature order, or `reference`
    /// for 5,30,5,111,50,5,17.
    #[arg(long)]
    pub counts: Option<String>,
    #[arg(long)]
    pub value_budget: Option<usize>,
    #[arg(long)]
    pub per_feature_max: Option<usize>,
    /// Explicit final temperatures, e.g. `52,56,60` or `46..62`.
    #[arg(long)]
    pub final_temp_values: Option<String>,
    #[arg(long, conflicts_with = "threshold")]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub chunk_size: Option<u64>,
    #[arg(long)]
    pub enumeration_cap: Option<u128>,
    /// Permit grids above the large-run threshold and the enumeration cap.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// Write the candidates as CSV.
    Export {
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge validation experiments into a dataset and the database.
    Merge {
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        original: Option<PathBuf>,
        #[arg(long)]
        experiments: PathBuf,
        /// Merged dataset CSV.
        #[arg(long)]
        out: PathBuf,
        /// Updated database; defaults to rewriting `--db`.
        #[arg(long)]
        db_out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub hcr_model: Option<PathBuf>,
    #[arg(long)]
    pub hlc_model: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}
