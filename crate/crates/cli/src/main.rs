use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use floodcast_cli::config::ConfigLayer;
use floodcast_cli::{
    cmd_eval_noaa, cmd_experiment, cmd_featurize, cmd_ingest, cmd_report, cmd_synth, CliError, CliResult,
    ExperimentConfig, FeaturizeSettings, InputSettings, SynthSettings,
};

/// Flood susceptibility from gauge records: synthesize, ingest, featurize,
/// train and evaluate.
///
/// Exit status is 0 on success, 1 on data or runtime errors and 2 on usage
/// or configuration errors.
#[derive(Parser)]
#[command(name = "floodcast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a synthetic data bundle with ground-truth sidecars.
    Synth(SynthArgs),
    /// Parse and join a data directory, reporting skipped rows and dropped gauges.
    Ingest(InputArgs),
    /// Write the feature table of one experiment and target.
    Featurize(FeaturizeArgs),
    /// Split, tune, evaluate and write report.json plus precision-recall curves.
    Experiment(ExperimentArgs),
    /// Score stage forecasts against observed monthly floods.
    EvalNoaa(InputArgs),
    /// Print the summary of an experiment output directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Flat TOML file of keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    /// Falls back to FLOODCAST_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    gauges: Option<usize>,
    #[arg(long)]
    months: Option<usize>,
    /// First month, YYYY-MM.
    #[arg(long)]
    start: Option<String>,
    /// Target share of flooded gauge-months.
    #[arg(long)]
    positive_rate: Option<f64>,
    /// Replace labels with a planted rule of this strength in [0, 1].
    #[arg(long)]
    planted: Option<f64>,
    #[arg(long)]
    wet_day_prob: Option<f64>,
    #[arg(long)]
    missing_rate: Option<f64>,
    /// Skip forecasts.csv content.
    #[arg(long)]
    no_forecasts: bool,
    #[arg(long)]
    forecast_noise_ft: Option<f64>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    common: Common,
    /// Directory holding the input CSV files.
    #[arg(long)]
    data: Option<PathBuf>,
    /// strict or lenient.
    #[arg(long)]
    strictness: Option<String>,
    #[arg(long)]
    coverage_cutoff: Option<f64>,
}

#[derive(Args)]
struct HydrologyArgs {
    #[arg(long)]
    onset_mm: Option<f64>,
    #[arg(long)]
    dry_gap_days: Option<u32>,
    #[arg(long)]
    search_hours: Option<f64>,
    #[arg(long)]
    coverage_cutoff: Option<f64>,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    strictness: Option<String>,
    /// e1, e2 or e3.
    #[arg(long)]
    experiment: Option<String>,
    /// gauge-month or ttp-bin:K.
    #[arg(long)]
    target: Option<String>,
    #[command(flatten)]
    hydrology: HydrologyArgs,
}

/// Hidden layer sizes, comma separated: `64,32`.
#[derive(Clone, Debug)]
struct Layers(Vec<usize>);

impl FromStr for Layers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|v| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}")))
            .collect::<Result<_, _>>()
            .map(Layers)
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Falls back to FLOODCAST_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks automatically. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    strictness: Option<String>,
    /// e1, e2 or e3.
    #[arg(long)]
    experiment: Option<String>,
    /// gauge-month or ttp-bin:K.
    #[arg(long)]
    target: Option<String>,
    /// forest, gbdt, mlp or all.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    precision_target: Option<f64>,
    /// Keep the train-only fit of the winning grid point.
    #[arg(long)]
    no_refit: bool,
    #[command(flatten)]
    hydrology: HydrologyArgs,
    #[arg(long, value_delimiter = ',')]
    forest_n_trees: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    forest_max_depth: Option<Vec<usize>>,
    #[arg(long)]
    forest_min_leaf: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    gbdt_n_rounds: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    gbdt_learning_rate: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gbdt_max_depth: Option<Vec<usize>>,
    #[arg(long)]
    gbdt_min_leaf: Option<usize>,
    /// One architecture per flag, e.g. `--mlp-hidden 32 --mlp-hidden 64,32`.
    #[arg(long)]
    mlp_hidden: Option<Vec<Layers>>,
    #[arg(long, value_delimiter = ',')]
    mlp_learning_rate: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    mlp_epochs: Option<Vec<usize>>,
    #[arg(long)]
    mlp_batch_size: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory of an `experiment` run.
    #[arg(long)]
    run: PathBuf,
}

impl HydrologyArgs {
    fn apply(self, l: &mut ConfigLayer) {
        l.onset_mm = self.onset_mm;
        l.dry_gap_days = self.dry_gap_days;
        l.search_hours = self.search_hours;
        l.coverage_cutoff = self.coverage_cutoff;
    }
}

fn layered(common: Common, fill: impl FnOnce(&mut ConfigLayer)) -> CliResult<ConfigLayer> {
    let mut flags = ConfigLayer {
        out: common.out,
        ..Default::default()
    };
    fill(&mut flags);
    ConfigLayer::load(common.config.as_deref(), flags)
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("summary serializes") + "\n"
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth(a) => {
            let layer = layered(a.common, |l| {
                l.seed = a.seed;
                l.threads = a.threads;
                l.gauges = a.gauges;
                l.months = a.months;
                l.start = a.start;
                l.positive_rate = a.positive_rate;
                l.planted_strength = a.planted;
                l.wet_day_prob = a.wet_day_prob;
                l.missing_rate = a.missing_rate;
                l.forecasts = a.no_forecasts.then_some(false);
                l.forecast_noise_ft = a.forecast_noise_ft;
            })?;
            let s = cmd_synth(&SynthSettings::resolve(&layer)?)?;
            emit(&format!(
                "wrote {} files for {} gauges x {} months, flood rate {:.4}\n",
                s.files.len(),
                s.gauges,
                s.months,
                s.flood_rate
            ));
        }
        Command::Ingest(a) => {
            let layer = layered(a.common, |l| {
                l.data = a.data;
                l.strictness = a.strictness;
                l.coverage_cutoff = a.coverage_cutoff;
            })?;
            emit(&pretty(&cmd_ingest(&InputSettings::resolve(&layer)?)?));
        }
        Command::Featurize(a) => {
            let layer = layered(a.common, |l| {
                l.data = a.data;
                l.strictness = a.strictness;
                l.experiment = a.experiment;
                l.target = a.target;
                a.hydrology.apply(l);
            })?;
            let s = cmd_featurize(&FeaturizeSettings::resolve(&layer)?)?;
            emit(&format!(
                "{} examples, {} features, positive rate {:.4}\n",
                s.examples,
                s.features.len(),
                s.positive_rate
            ));
        }
        Command::Experiment(a) => {
            let layer = layered(a.common, |l| {
                l.data = a.data;
                l.seed = a.seed;
                l.threads = a.threads;
                l.strictness = a.strictness;
                l.experiment = a.experiment;
                l.target = a.target;
                l.model = a.model;
                l.precision_target = a.precision_target;
                l.refit = a.no_refit.then_some(false);
                a.hydrology.apply(l);
                l.forest_n_trees = a.forest_n_trees;
                l.forest_max_depth = a.forest_max_depth;
                l.forest_min_leaf = a.forest_min_leaf;
                l.gbdt_n_rounds = a.gbdt_n_rounds;
                l.gbdt_learning_rate = a.gbdt_learning_rate;
                l.gbdt_max_depth = a.gbdt_max_depth;
                l.gbdt_min_leaf = a.gbdt_min_leaf;
                l.mlp_hidden = a.mlp_hidden.map(|v| v.into_iter().map(|l| l.0).collect());
                l.mlp_learning_rate = a.mlp_learning_rate;
                l.mlp_epochs = a.mlp_epochs;
                l.mlp_batch_size = a.mlp_batch_size;
            })?;
            let cfg = ExperimentConfig::resolve(&layer)?;
            cmd_experiment(&cfg)?;
            emit(&cmd_report(&cfg.out)?);
        }
        Command::EvalNoaa(a) => {
            let layer = layered(a.common, |l| {
                l.data = a.data;
                l.strictness = a.strictness;
                l.coverage_cutoff = a.coverage_cutoff;
            })?;
            emit(&pretty(&cmd_eval_noaa(&InputSettings::resolve(&layer)?)?));
        }
        Command::Report(a) => emit(&cmd_report(&a.run)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Runtime(err) => eprintln!("error: {err:#}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
