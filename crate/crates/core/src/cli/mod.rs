//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage error
//! (bad flags, missing inputs), 3 data error (malformed or out-of-domain
//! input), 4 weather provider failure.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Provider(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Provider(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Output(_) => "output",
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Provider(_) => "provider",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pyrorisk", version, about = "Wildfire danger from fire weather and aerial imagery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the FWI chain over a weather series.
    Fwi(FwiArgs),
    /// Compare regressors predicting the moisture codes from raw weather.
    EvalReg(EvalRegArgs),
    /// Cut a mosaic into fixed-size tiles.
    Tile(TileArgs),
    /// Classify every tile of a mosaic.
    Infer(InferArgs),
    /// Full chain: weather, tiles, classifier and fusion into a danger map.
    Assess(AssessArgs),
    /// Build a train/test/val manifest from a class-per-directory dataset.
    Split(SplitArgs),
    /// Write randomly augmented copies of an image.
    Augment(AugmentArgs),
    /// Draw a danger map CSV as a coloured PNG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, env = "PYRORISK_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "PYRORISK_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, env = "PYRORISK_SEED")]
    pub seed: Option<u64>,
    /// Fail on the first unreadable input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WeatherArgs {
    /// CSV with `date,lat,lon,temp_c,rh_pct,wind_kmh,rain_mm`.
    #[arg(long, conflicts_with = "provider")]
    pub weather_csv: Option<PathBuf>,
    /// `fixture:<dir>` or an http(s) endpoint.
    #[arg(long, requires_all = ["lat", "lon", "from", "to"])]
    pub provider: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lat: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lon: Option<f64>,
    #[arg(long)]
    pub from: Option<NaiveDate>,
    #[arg(long)]
    pub to: Option<NaiveDate>,
    /// Save raw payloads from a live provider here for later replay.
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[arg(long, default_value_t = crate::fwi::DEFAULT_FFMC)]
    pub ffmc0: f64,
    #[arg(long, default_value_t = crate::fwi::DEFAULT_DMC)]
    pub dmc0: f64,
    #[arg(long, default_value_t = crate::fwi::DEFAULT_DC)]
    pub dc0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TilingArgs {
    #[arg(long, env = "PYRORISK_TILE_SIZE")]
    pub tile_size: Option<usize>,
    #[arg(long, value_enum)]
    pub edge_policy: Option<EdgeArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EdgeArg {
    PadZero,
    PadReflect,
    DropPartial,
}

#[derive(Debug, Clone, Args)]
pub struct FusionArgs {
    #[arg(long, env = "PYRORISK_GAMMA")]
    pub gamma: Option<f64>,
    #[arg(long, env = "PYRORISK_TAU")]
    pub tau: Option<f64>,
    /// Five ascending FWI cut points, comma separated.
    #[arg(long, env = "PYRORISK_THRESHOLDS")]
    pub thresholds: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FwiArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub weather: WeatherArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalRegArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub weather: WeatherArgs,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub tiling: TilingArgs,
    #[arg(long)]
    pub image: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct InferArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub tiling: TilingArgs,
    #[arg(long, env = "PYRORISK_WEIGHTS")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub image: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AssessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub weather: WeatherArgs,
    #[command(flatten)]
    pub tiling: TilingArgs,
    #[command(flatten)]
    pub fusion: FusionArgs,
    #[arg(long, env = "PYRORISK_WEIGHTS")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub image: PathBuf,
    /// Scene date; defaults to the last day of the weather series.
    #[arg(long)]
    pub date: Option<NaiveDate>,
    /// Also write `danger_map.png`.
    #[arg(long)]
    pub png: bool,
    #[arg(long, default_value_t = crate::render::DEFAULT_CELL_SIZE)]
    pub cell_size: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory holding `wildfire/` and `nowildfire/`.
    #[arg(long)]
    pub dataset_root: Option<PathBuf>,
    /// Train, test and validation fractions.
    #[arg(long, default_value = "0.7,0.15,0.15")]
    pub fractions: String,
}

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub rotation: Option<f64>,
    #[arg(long)]
    pub width_shift: Option<f64>,
    #[arg(long)]
    pub height_shift: Option<f64>,
    #[arg(long)]
    pub zoom: Option<f64>,
    #[arg(long)]
    pub hflip: bool,
    #[arg(long)]
    pub bilinear: bool,
    /// Fill out-of-image samples from the nearest edge instead of black.
    #[arg(long)]
    pub fill_nearest: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub danger_map: PathBuf,
    #[arg(long, default_value_t = crate::render::DEFAULT_CELL_SIZE)]
    pub cell_size: usize,
}
