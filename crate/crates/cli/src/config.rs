//! Flat key-value configuration shared by every command.
//!
//! Values resolve in order: built-in defaults, then the `--config` file,
//! then command-line flags. The seed alone also falls back to the
//! `FLOODCAST_SEED` environment variable when neither file nor flag sets it.
//! Each command writes the keys it used, defaults expanded, to
//! `config.resolved.toml`; that file is itself a valid `--config` input.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use floodcast_core::features::{Experiment, Target};
use floodcast_core::hydrology::HydrologyConfig;
use floodcast_core::ingest::Strictness;
use floodcast_core::models::{AdamConfig, ForestParams, GbdtParams, HyperParams, MlpParams, ModelFamily};
use floodcast_core::synth::SynthConfig;
use floodcast_core::YearMonth;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "FLOODCAST_SEED";
pub const RESOLVED_CONFIG: &str = "config.resolved.toml";

/// Every recognised key; unset keys fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strictness: Option<String>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refit: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dry_gap_days: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_hours: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_cutoff: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_n_trees: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_max_depth: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forest_min_leaf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gbdt_n_rounds: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gbdt_learning_rate: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gbdt_max_depth: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gbdt_min_leaf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp_hidden: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp_learning_rate: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp_epochs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp_batch_size: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub months: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_strength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wet_day_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forecasts: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forecast_noise_ft: Option<f64>,
}

impl ConfigLayer {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        let mut base = serde_json::to_value(self).expect("config layer serializes");
        if let (Some(b), serde_json::Value::Object(t)) = (
            base.as_object_mut(),
            serde_json::to_value(top).expect("config layer serializes"),
        ) {
            b.extend(t);
        }
        serde_json::from_value(base).expect("overlay keeps the layer shape")
    }

    /// File layer (if any) under the flag layer.
    pub fn load(file: Option<&Path>, flags: ConfigLayer) -> CliResult<Self> {
        let base = match file {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        Ok(base.overlay(flags))
    }

    fn seed(&self) -> CliResult<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Err(CliError::usage(format!(
                "a seed is required: pass --seed, set `seed` in the config file or export {SEED_ENV}"
            ))),
        }
    }
}

fn required<T: Clone>(v: &Option<T>, key: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::usage(format!("`{key}` is required")))
}

fn parsed<T>(v: &Option<String>, default: T, key: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    match v {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e| CliError::usage(format!("{key}: {e}"))),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::usage(msg()))
    }
}

fn as_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn strictness_name<S: Serializer>(v: &Strictness, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match v {
        Strictness::Strict => "strict",
        Strictness::Lenient => "lenient",
    })
}

fn parse_strictness(v: &Option<String>) -> CliResult<Strictness> {
    match v.as_deref() {
        None | Some("strict") => Ok(Strictness::Strict),
        Some("lenient") => Ok(Strictness::Lenient),
        Some(other) => Err(CliError::usage(format!(
            "strictness: expected strict or lenient, got `{other}`"
        ))),
    }
}

/// Which model families an experiment trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    One(ModelFamily),
    All,
}

impl ModelChoice {
    pub fn families(self) -> Vec<ModelFamily> {
        match self {
            ModelChoice::One(f) => vec![f],
            ModelChoice::All => ModelFamily::ALL.to_vec(),
        }
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelChoice::One(m) => m.fmt(f),
            ModelChoice::All => f.write_str("all"),
        }
    }
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(ModelChoice::All);
        }
        s.parse::<ModelFamily>()
            .map(ModelChoice::One)
            .map_err(|_| format!("unknown model `{s}` (expected forest, gbdt, mlp or all)"))
    }
}

/// Label-construction keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydrologyKeys {
    pub onset_mm: f64,
    pub dry_gap_days: u32,
    pub search_hours: f64,
    pub coverage_cutoff: f64,
}

impl HydrologyKeys {
    fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        let d = HydrologyConfig::default();
        let k = Self {
            onset_mm: layer.onset_mm.unwrap_or(d.onset_mm),
            dry_gap_days: layer.dry_gap_days.unwrap_or(d.dry_gap_days),
            search_hours: layer.search_hours.unwrap_or(d.search_hours),
            coverage_cutoff: layer.coverage_cutoff.unwrap_or(d.coverage_cutoff),
        };
        ensure(k.onset_mm > 0.0 && k.onset_mm.is_finite(), || {
            "onset_mm must be positive".into()
        })?;
        ensure(k.dry_gap_days >= 1, || "dry_gap_days must be at least 1".into())?;
        ensure(k.search_hours > 0.0 && k.search_hours.is_finite(), || {
            "search_hours must be positive".into()
        })?;
        ensure((0.0..=1.0).contains(&k.coverage_cutoff), || {
            "coverage_cutoff must lie in [0, 1]".into()
        })?;
        Ok(k)
    }

    pub fn config(&self) -> HydrologyConfig {
        HydrologyConfig {
            onset_mm: self.onset_mm,
            dry_gap_days: self.dry_gap_days,
            search_hours: self.search_hours,
            coverage_cutoff: self.coverage_cutoff,
        }
    }
}

/// Hyper-parameter grids. List-valued keys form a Cartesian product;
/// scalar keys apply to every point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridKeys {
    pub forest_n_trees: Vec<usize>,
    pub forest_max_depth: Vec<usize>,
    pub forest_min_leaf: usize,
    pub gbdt_n_rounds: Vec<usize>,
    pub gbdt_learning_rate: Vec<f64>,
    pub gbdt_max_depth: Vec<usize>,
    pub gbdt_min_leaf: usize,
    pub mlp_hidden: Vec<Vec<usize>>,
    pub mlp_learning_rate: Vec<f64>,
    pub mlp_epochs: Vec<usize>,
    pub mlp_batch_size: usize,
}

impl Default for GridKeys {
    fn default() -> Self {
        Self {
            forest_n_trees: vec![100, 300],
            forest_max_depth: vec![6, 10],
            forest_min_leaf: ForestParams::default().min_leaf,
            gbdt_n_rounds: vec![100, 300],
            gbdt_learning_rate: vec![0.05, 0.1],
            gbdt_max_depth: vec![3, 5],
            gbdt_min_leaf: GbdtParams::default().min_leaf,
            mlp_hidden: vec![vec![32], vec![64, 32]],
            mlp_learning_rate: vec![1e-3],
            mlp_epochs: vec![50],
            mlp_batch_size: MlpParams::default().batch_size,
        }
    }
}

impl GridKeys {
    fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        let d = Self::default();
        let g = Self {
            forest_n_trees: layer.forest_n_trees.clone().unwrap_or(d.forest_n_trees),
            forest_max_depth: layer.forest_max_depth.clone().unwrap_or(d.forest_max_depth),
            forest_min_leaf: layer.forest_min_leaf.unwrap_or(d.forest_min_leaf),
            gbdt_n_rounds: layer.gbdt_n_rounds.clone().unwrap_or(d.gbdt_n_rounds),
            gbdt_learning_rate: layer.gbdt_learning_rate.clone().unwrap_or(d.gbdt_learning_rate),
            gbdt_max_depth: layer.gbdt_max_depth.clone().unwrap_or(d.gbdt_max_depth),
            gbdt_min_leaf: layer.gbdt_min_leaf.unwrap_or(d.gbdt_min_leaf),
            mlp_hidden: layer.mlp_hidden.clone().unwrap_or(d.mlp_hidden),
            mlp_learning_rate: layer.mlp_learning_rate.clone().unwrap_or(d.mlp_learning_rate),
            mlp_epochs: layer.mlp_epochs.clone().unwrap_or(d.mlp_epochs),
            mlp_batch_size: layer.mlp_batch_size.unwrap_or(d.mlp_batch_size),
        };
        let positive = |key: &str, v: &[usize]| {
            ensure(!v.is_empty() && v.iter().all(|&x| x > 0), || {
                format!("{key} must be a non-empty list of positive integers")
            })
        };
        let rates = |key: &str, v: &[f64]| {
            ensure(!v.is_empty() && v.iter().all(|&x| x > 0.0 && x.is_finite()), || {
                format!("{key} must be a non-empty list of positive numbers")
            })
        };
        positive("forest_n_trees", &g.forest_n_trees)?;
        positive("forest_max_depth", &g.forest_max_depth)?;
        positive("gbdt_n_rounds", &g.gbdt_n_rounds)?;
        positive("gbdt_max_depth", &g.gbdt_max_depth)?;
        positive("mlp_epochs", &g.mlp_epochs)?;
        rates("gbdt_learning_rate", &g.gbdt_learning_rate)?;
        rates("mlp_learning_rate", &g.mlp_learning_rate)?;
        ensure(g.forest_min_leaf > 0 && g.gbdt_min_leaf > 0, || {
            "min_leaf values must be positive".into()
        })?;
        ensure(g.mlp_batch_size > 0, || "mlp_batch_size must be positive".into())?;
        ensure(
            !g.mlp_hidden.is_empty() && g.mlp_hidden.iter().flatten().all(|&h| h > 0),
            || "mlp_hidden must be a non-empty list of layer-size lists with positive sizes".into(),
        )?;
        Ok(g)
    }

    /// Grid points for one family, outer keys varying slowest.
    pub fn grid(&self, family: ModelFamily) -> Vec<HyperParams> {
        let mut g = Vec::new();
        match family {
            ModelFamily::Forest => {
                for &n_trees in &self.forest_n_trees {
                    for &max_depth in &self.forest_max_depth {
                        g.push(HyperParams::Forest(ForestParams {
                            n_trees,
                            max_depth,
                            min_leaf: self.forest_min_leaf,
                            ..Default::default()
                        }));
                    }
                }
            }
            ModelFamily::Gbdt => {
                for &n_rounds in &self.gbdt_n_rounds {
                    for &learning_rate in &self.gbdt_learning_rate {
                        for &max_depth in &self.gbdt_max_depth {
                            g.push(HyperParams::Gbdt(GbdtParams {
                                n_rounds,
                                learning_rate,
                                max_depth,
                                min_leaf: self.gbdt_min_leaf,
                                ..Default::default()
                            }));
                        }
                    }
                }
            }
            ModelFamily::Mlp => {
                for hidden in &self.mlp_hidden {
                    for &learning_rate in &self.mlp_learning_rate {
                        for &epochs in &self.mlp_epochs {
                            g.push(HyperParams::Mlp(MlpParams {
                                hidden: hidden.clone(),
                                epochs,
                                batch_size: self.mlp_batch_size,
                                adam: AdamConfig {
                                    learning_rate,
                                    ..Default::default()
                                },
                            }));
                        }
                    }
                }
            }
        }
        g
    }
}

/// What determines an experiment's results. Echoed verbatim in `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSettings {
    pub data: PathBuf,
    pub seed: u64,
    #[serde(serialize_with = "as_display")]
    pub experiment: Experiment,
    #[serde(serialize_with = "as_display")]
    pub target: Target,
    #[serde(serialize_with = "as_display")]
    pub model: ModelChoice,
    #[serde(serialize_with = "strictness_name")]
    pub strictness: Strictness,
    pub precision_target: f64,
    /// Refit the winning grid point on train plus validation before testing.
    pub refit: bool,
    #[serde(flatten)]
    pub hydrology: HydrologyKeys,
    #[serde(flatten)]
    pub grid: GridKeys,
}

/// Settings plus the keys that only say where and how fast to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub settings: ExperimentSettings,
    pub out: PathBuf,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        let experiment = parsed(&layer.experiment, Experiment::E1, "experiment")?;
        let target = parsed(&layer.target, Target::GaugeMonth, "target")?;
        let model = parsed(&layer.model, ModelChoice::All, "model")?;
        let strictness = parse_strictness(&layer.strictness)?;
        let precision_target = layer.precision_target.unwrap_or(0.5);
        ensure(precision_target > 0.0 && precision_target <= 1.0, || {
            "precision_target must lie in (0, 1]".into()
        })?;
        let hydrology = HydrologyKeys::resolve(layer)?;
        let grid = GridKeys::resolve(layer)?;
        let data = required(&layer.data, "data")?;
        let out = required(&layer.out, "out")?;
        let seed = layer.seed()?;
        Ok(Self {
            settings: ExperimentSettings {
                data,
                seed,
                experiment,
                target,
                model,
                strictness,
                precision_target,
                refit: layer.refit.unwrap_or(true),
                hydrology,
                grid,
            },
            out,
            threads: layer.threads.unwrap_or(0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSettings {
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
    pub gauges: usize,
    pub months: usize,
    #[serde(serialize_with = "as_display")]
    pub start: YearMonth,
    pub positive_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_strength: Option<f64>,
    pub wet_day_prob: f64,
    pub missing_rate: f64,
    pub forecasts: bool,
    pub forecast_noise_ft: f64,
}

impl SynthSettings {
    pub fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        let d = SynthConfig::default();
        let start = parsed(&layer.start, d.start, "start")?;
        let s = Self {
            out: required(&layer.out, "out")?,
            seed: layer.seed()?,
            threads: layer.threads.unwrap_or(0),
            gauges: layer.gauges.unwrap_or(d.n_gauges),
            months: layer.months.unwrap_or(d.n_months),
            start,
            positive_rate: layer.positive_rate.unwrap_or(d.target_positive_rate),
            planted_strength: layer.planted_strength,
            wet_day_prob: layer.wet_day_prob.unwrap_or(d.wet_day_prob),
            missing_rate: layer.missing_rate.unwrap_or(d.missing_rate),
            forecasts: layer.forecasts.unwrap_or(d.forecasts),
            forecast_noise_ft: layer.forecast_noise_ft.unwrap_or(d.forecast_noise_ft),
        };
        s.synth_config()
            .validate()
            .map_err(|e| CliError::usage(e.to_string()))?;
        if let Some(p) = s.planted_strength {
            ensure((0.0..=1.0).contains(&p), || {
                "planted_strength must lie in [0, 1]".into()
            })?;
        }
        Ok(s)
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            n_gauges: self.gauges,
            n_months: self.months,
            start: self.start,
            target_positive_rate: self.positive_rate,
            wet_day_prob: self.wet_day_prob,
            missing_rate: self.missing_rate,
            forecasts: self.forecasts,
            forecast_noise_ft: self.forecast_noise_ft,
            ..SynthConfig::default()
        }
    }
}

/// Keys for `ingest` and `eval-noaa`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSettings {
    pub data: PathBuf,
    pub out: PathBuf,
    #[serde(serialize_with = "strictness_name")]
    pub strictness: Strictness,
    pub coverage_cutoff: f64,
}

impl InputSettings {
    pub fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        let coverage_cutoff = HydrologyKeys::resolve(layer)?.coverage_cutoff;
        Ok(Self {
            data: required(&layer.data, "data")?,
            out: required(&layer.out, "out")?,
            strictness: parse_strictness(&layer.strictness)?,
            coverage_cutoff,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeaturizeSettings {
    pub data: PathBuf,
    pub out: PathBuf,
    #[serde(serialize_with = "strictness_name")]
    pub strictness: Strictness,
    #[serde(serialize_with = "as_display")]
    pub experiment: Experiment,
    #[serde(serialize_with = "as_display")]
    pub target: Target,
    #[serde(flatten)]
    pub hydrology: HydrologyKeys,
}

impl FeaturizeSettings {
    pub fn resolve(layer: &ConfigLayer) -> CliResult<Self> {
        Ok(Self {
            experiment: parsed(&layer.experiment, Experiment::E1, "experiment")?,
            target: parsed(&layer.target, Target::GaugeMonth, "target")?,
            strictness: parse_strictness(&layer.strictness)?,
            hydrology: HydrologyKeys::resolve(layer)?,
            data: required(&layer.data, "data")?,
            out: required(&layer.out, "out")?,
        })
    }
}

/// TOML text for a resolved settings struct.
pub fn to_toml<T: Serialize>(settings: &T) -> String {
    toml::to_string(settings).expect("resolved settings serialize to TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use floodcast_core::models::default_grid;

    fn layer(text: &str) -> ConfigLayer {
        ConfigLayer::parse(text).unwrap()
    }

    #[test]
    fn default_grids_match_the_library() {
        let g = GridKeys::default();
        for fam in ModelFamily::ALL {
            assert_eq!(g.grid(fam), default_grid(fam), "{fam}");
        }
    }

    #[test]
    fn flags_override_file() {
        let file = layer("seed = 1\nexperiment = \"e2\"\ndata = \"a\"\nout = \"o\"\n");
        let flags = ConfigLayer {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = ExperimentConfig::resolve(&file.overlay(flags)).unwrap();
        assert_eq!(cfg.settings.seed, 9);
        assert_eq!(cfg.settings.experiment, Experiment::E2);
    }

    #[test]
    fn unknown_keys_and_values_are_usage_errors() {
        assert!(matches!(ConfigLayer::parse("colour = 3"), Err(CliError::Usage(_))));
        let bad = layer("seed = 1\nexperiment = \"e7\"\ndata = \"a\"\nout = \"o\"\n");
        assert!(matches!(ExperimentConfig::resolve(&bad), Err(CliError::Usage(_))));
        let bad = layer("seed = 1\ntarget = \"ttp-bin:9\"\ndata = \"a\"\nout = \"o\"\n");
        assert!(matches!(ExperimentConfig::resolve(&bad), Err(CliError::Usage(_))));
        let bad = layer("seed = 1\nforest_n_trees = []\ndata = \"a\"\nout = \"o\"\n");
        assert!(matches!(ExperimentConfig::resolve(&bad), Err(CliError::Usage(_))));
    }

    #[test]
    fn resolved_config_reads_back() {
        let cfg = ExperimentConfig::resolve(&layer(
            "seed = 4\ndata = \"d\"\nout = \"o\"\nmodel = \"gbdt\"\ntarget = \"ttp-bin:3\"\nmlp_hidden = [[8, 4]]\n",
        ))
        .unwrap();
        let text = to_toml(&cfg);
        assert!(text.contains("target = \"ttp-bin:3\""));
        let again = ExperimentConfig::resolve(&layer(&text)).unwrap();
        assert_eq!(again, cfg);

        let synth = SynthSettings::resolve(&layer("seed = 2\nout = \"o\"\nplanted_strength = 0.8\n")).unwrap();
        assert_eq!(SynthSettings::resolve(&layer(&to_toml(&synth))).unwrap(), synth);
    }

    #[test]
    fn synth_limits_are_usage_errors() {
        let e = SynthSettings::resolve(&layer("seed = 2\nout = \"o\"\ngauges = 2\n")).unwrap_err();
        assert!(matches!(e, CliError::Usage(ref m) if m.contains("gauges")), "{e}");
    }

    #[test]
    fn model_choice_names() {
        assert_eq!("all".parse::<ModelChoice>().unwrap().families().len(), 3);
        assert_eq!(
            "mlp".parse::<ModelChoice>().unwrap(),
            ModelChoice::One(ModelFamily::Mlp)
        );
        assert!("svm".parse::<ModelChoice>().is_err());
    }
}
