use std::f64::consts::PI;
use std::path::PathBuf;

use symconv::symmetry::{distance_range, Aggregation};
use symconv::{BorderMode, PeakParams, SweepParams, WaveletGeometry};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Lines,
    Segments,
    Ellipses,
    Eval,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Lines => "lines",
            Mode::Segments => "segments",
            Mode::Ellipses => "ellipses",
            Mode::Eval => "eval",
        }
    }
}

/// True-positive criterion used by eval mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Segment,
    Line,
}

/// Everything one invocation needs. `None` fields take mode-dependent
/// defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub inputs: Vec<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub out: PathBuf,
    pub n_alpha: usize,
    /// Lines/segments: −π/4, 0, π/4. Ellipses: 0.
    pub betas: Option<Vec<f64>>,
    pub d_min: f64,
    /// Defaults to 0.8 × the larger side of the resized image.
    pub d_max: Option<f64>,
    pub d_step: f64,
    /// Lines/segments: 2. Ellipses: 1.
    pub exponent: Option<f64>,
    pub border: BorderMode,
    pub aggregation: Aggregation,
    pub haar_size: usize,
    pub resize_max: usize,
    pub max_detections: usize,
    pub threshold: f64,
    /// Defaults to two angle bins, 2π / n_alpha.
    pub nms_rho_window: Option<f64>,
    pub nms_delta_window: f64,
    pub criterion: Criterion,
    pub refine: bool,
    pub emit_heatmap: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Lines,
            inputs: Vec::new(),
            ground_truth: None,
            out: PathBuf::from("out"),
            n_alpha: SweepParams::DEFAULT_N_ALPHA,
            betas: None,
            d_min: 6.0,
            d_max: None,
            d_step: 4.0,
            exponent: None,
            border: BorderMode::Mean,
            aggregation: Aggregation::Coherent,
            haar_size: 20,
            resize_max: 200,
            max_detections: 5,
            threshold: 0.1,
            nms_rho_window: None,
            nms_delta_window: 10.0,
            criterion: Criterion::Segment,
            refine: true,
            emit_heatmap: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(CliError::Config("at least one input image is required".into()));
        }
        if self.resize_max < 32 {
            return Err(CliError::Config(format!(
                "resize_max must be at least 32, got {}",
                self.resize_max
            )));
        }
        if self.mode == Mode::Eval && self.ground_truth.is_none() {
            return Err(CliError::Config("eval mode needs --ground-truth".into()));
        }
        if !(self.d_step > 0.0 && self.d_min > 0.0) {
            return Err(CliError::Config("d_min and d_step must be positive".into()));
        }
        if self.mode == Mode::Ellipses {
            if let Some(b) = &self.betas {
                if b.as_slice() != [0.0] {
                    return Err(CliError::Config("ellipse mode requires betas = 0".into()));
                }
            }
        }
        self.peak_params().validate()?;
        Ok(())
    }

    /// Stencil sweep for an image of the given (resized) size.
    pub fn sweep_params(&self, width: usize, height: usize) -> SweepParams {
        let ellipses = self.mode == Mode::Ellipses;
        let d_max = self
            .d_max
            .unwrap_or(0.8 * width.max(height) as f64)
            .max(self.d_min);
        let betas = self.betas.clone().unwrap_or_else(|| {
            if ellipses {
                vec![0.0]
            } else {
                vec![-PI / 4.0, 0.0, PI / 4.0]
            }
        });
        SweepParams {
            n_alpha: self.n_alpha,
            betas,
            distances: distance_range(self.d_min, d_max, self.d_step),
            exponent: self.exponent.unwrap_or(if ellipses { 1.0 } else { 2.0 }),
            geometry: WaveletGeometry::default(),
            border: self.border,
            aggregation: self.aggregation,
        }
    }

    pub fn peak_params(&self) -> PeakParams {
        PeakParams {
            max_detections: self.max_detections,
            nms_rho_window: self
                .nms_rho_window
                .unwrap_or(2.0 * PI / self.n_alpha.max(1) as f64),
            nms_delta_window: self.nms_delta_window,
            threshold_fraction: self.threshold,
        }
    }
}
