use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use symconv::symmetry::Aggregation;
use symconv::BorderMode;

use crate::config::{Criterion, Mode, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Lines,
    Segments,
    Ellipses,
    Eval,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BorderArg {
    Mean,
    Zero,
    Circular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregationArg {
    Coherent,
    Magnitude,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CriterionArg {
    Segment,
    Line,
}

/// Detect reflection symmetry lines, segments and ellipse centers.
#[derive(Debug, Parser)]
#[command(name = "symconv", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "lines")]
    pub mode: ModeArg,
    /// Input PNG or PGM images.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Ground-truth CSV (image_id,ax,ay,bx,by) for eval mode.
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    /// Output directory; one subdirectory per image when several are given.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub n_alpha: usize,
    /// Inner angles in radians [default: -0.7854,0,0.7854; ellipses: 0].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 6.0)]
    pub d_min: f64,
    /// Largest inner distance [default: 0.8 × larger image side].
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub d_step: f64,
    /// Aggregation exponent [default: 2; ellipses: 1].
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long, value_enum, default_value = "mean")]
    pub border: BorderArg,
    #[arg(long, value_enum, default_value = "coherent")]
    pub aggregation: AggregationArg,
    #[arg(long, default_value_t = 20)]
    pub haar_size: usize,
    #[arg(long, default_value_t = 200)]
    pub resize_max: usize,
    #[arg(long, default_value_t = 5)]
    pub max_detections: usize,
    /// Peak threshold as a fraction of the global maximum.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Angular NMS window in radians [default: two angle bins].
    #[arg(long)]
    pub nms_rho_window: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub nms_delta_window: f64,
    /// True-positive criterion for eval mode.
    #[arg(long, value_enum, default_value = "segment")]
    pub criterion: CriterionArg,
    /// Keep raw accumulator scores instead of the robust rescoring.
    #[arg(long)]
    pub no_refine: bool,
    /// Write accumulator.pgm next to detections.json.
    #[arg(long)]
    pub emit_heatmap: bool,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            mode: match c.mode {
                ModeArg::Lines => Mode::Lines,
                ModeArg::Segments => Mode::Segments,
                ModeArg::Ellipses => Mode::Ellipses,
                ModeArg::Eval => Mode::Eval,
            },
            inputs: c.input,
            ground_truth: c.ground_truth,
            out: c.out,
            n_alpha: c.n_alpha,
            betas: c.betas,
            d_min: c.d_min,
            d_max: c.d_max,
            d_step: c.d_step,
            exponent: c.exponent,
            border: match c.border {
                BorderArg::Mean => BorderMode::Mean,
                BorderArg::Zero => BorderMode::Zero,
                BorderArg::Circular => BorderMode::Circular,
            },
            aggregation: match c.aggregation {
                AggregationArg::Coherent => Aggregation::Coherent,
                AggregationArg::Magnitude => Aggregation::Magnitude,
            },
            haar_size: c.haar_size,
            resize_max: c.resize_max,
            max_detections: c.max_detections,
            threshold: c.threshold,
            nms_rho_window: c.nms_rho_window,
            nms_delta_window: c.nms_delta_window,
            criterion: match c.criterion {
                CriterionArg::Segment => Criterion::Segment,
                CriterionArg::Line => Criterion::Line,
            },
            refine: !c.no_refine,
            emit_heatmap: c.emit_heatmap,
        }
    }
}
