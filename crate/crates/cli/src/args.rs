use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pxfes::config::{DEFAULT_FOLDS, DEFAULT_LAMBDA, DEFAULT_SEED};
use pxfes::{ColorMode, ExpressionMapping, Method};

#[derive(Debug, Parser)]
#[command(name = "pxfes", version, about = "Per-pixel regression for paired image-to-image mapping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on `<data>/input` and `<data>/target`
    Train(TrainArgs),
    /// Map one image through a trained model
    Apply(ApplyArgs),
    /// Score a model against a paired dataset
    Eval(EvalArgs),
    /// Cross-validate regularization and bandwidth
    Cv(CvArgs),
    /// Print model header and parameter counts
    Inspect(InspectArgs),
    /// Tile images into a comparison grid
    Montage(MontageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    PixelRr,
    PixelKr,
    FullRr,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PixelRr => Method::PixelRr,
            MethodArg::PixelKr => Method::PixelKr,
            MethodArg::FullRr => Method::FullRr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorArg {
    Gray,
    PerChannel,
}

impl From<ColorArg> for ColorMode {
    fn from(c: ColorArg) -> Self {
        match c {
            ColorArg::Gray => ColorMode::Grayscale,
            ColorArg::PerChannel => ColorMode::PerChannel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MappingArg {
    NeutralHappy,
    Other,
}

impl From<MappingArg> for ExpressionMapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::NeutralHappy => ExpressionMapping::NeutralToHappy,
            MappingArg::Other => ExpressionMapping::Other,
        }
    }
}

/// `HEIGHTxWIDTH`, e.g. `128x128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub height: usize,
    pub width: usize,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { height: pxfes::config::DEFAULT_HEIGHT, width: pxfes::config::DEFAULT_WIDTH }
    }
}

pub fn parse_geometry(s: &str) -> Result<Geometry, String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected HEIGHTxWIDTH, got {s:?}"))?;
    let parse = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 && n <= usize::from(u16::MAX) => Ok(n),
        _ => Err(format!("invalid dimension {v:?}")),
    };
    Ok(Geometry { height: parse(h)?, width: parse(w)? })
}

fn positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a value in [0, 1], got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset root holding `input/` and `target/`
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse_geometry, default_value = "128x128")]
    pub geometry: Geometry,
    #[arg(long, value_enum, default_value = "gray")]
    pub color_mode: ColorArg,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = positive, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Kernel bandwidth; defaults from `--mapping`
    #[arg(long, value_parser = positive)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "neutral-happy")]
    pub mapping: MappingArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset root holding `input/` and `target/`
    #[arg(long)]
    pub data: PathBuf,
    /// Per-pair CSV report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated regularization grid
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    pub lambdas: Option<Vec<f64>>,
    /// Comma-separated bandwidth grid (pixel-kr)
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub folds: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Per-(candidate, fold) CSV report
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(required_unless_present = "model", conflicts_with = "model")]
    pub path: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MontageArgs {
    /// One grid row as comma-separated image paths; repeat per row
    #[arg(long = "row", required = true)]
    pub rows: Vec<String>,
    #[arg(long, default_value_t = 4)]
    pub gap: usize,
    #[arg(long, value_parser = unit_interval, default_value_t = 1.0)]
    pub gap_value: f64,
    #[arg(long)]
    pub out: PathBuf,
}
