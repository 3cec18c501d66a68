use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use symconv::eval::{
    is_tp_line, is_tp_segment, load_ground_truth, pr_curve, write_pr_csv, Detection,
    GroundTruthSegment, ImageEvaluation, PrPoint, Sweep,
};
use symconv::{SymmetryLine, SymmetrySegment};

use crate::config::{Criterion, Mode, RunConfig};
use crate::error::{CliError, Result};
use crate::imageio::{load_image, write_pgm16};
use crate::output::{Detections, Fixed};
use crate::pipeline::{detect_centers, detect_lines, detect_segments};

/// Files written for one input image.
#[derive(Debug, Clone)]
pub struct ImageOutput {
    pub input: PathBuf,
    pub dir: PathBuf,
    pub detections: Detections,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub images: Vec<ImageOutput>,
    /// Eval mode only.
    pub pr: Option<Vec<PrPoint>>,
}

struct Processed {
    output: ImageOutput,
    scale: f64,
    lines: Vec<AtPeak<SymmetryLine>>,
    segments: Vec<AtPeak<SymmetrySegment>>,
}

/// A detection ranked by the accumulator peak it came from, so the PR sweep
/// thresholds accumulator maxima regardless of rescoring.
#[derive(Debug, Clone)]
struct AtPeak<D> {
    detection: D,
    peak: f64,
}

impl<D: Detection> Detection for AtPeak<D> {
    fn score(&self) -> f64 {
        self.peak
    }

    fn tie_key(&self) -> [f64; 4] {
        self.detection.tie_key()
    }
}

fn at_peaks<D>(detections: &[D], peaks: &[f64]) -> Vec<AtPeak<D>>
where
    D: Clone,
{
    detections
        .iter()
        .zip(peaks)
        .map(|(d, &peak)| AtPeak {
            detection: d.clone(),
            peak,
        })
        .collect()
}

/// Runs the configured mode over every input. Images are processed in
/// parallel; each writes only into its own output directory.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let dirs = output_dirs(config)?;
    let ground_truth = match (&config.mode, &config.ground_truth) {
        (Mode::Eval, Some(path)) => Some(index_ground_truth(path)?),
        _ => None,
    };

    let processed: Vec<Processed> = config
        .inputs
        .par_iter()
        .zip(&dirs)
        .map(|(input, dir)| process(config, input, dir))
        .collect::<Result<_>>()?;

    let pr = match ground_truth {
        Some(gt) => Some(evaluate(config, &processed, &gt)?),
        None => None,
    };
    Ok(RunReport {
        images: processed.into_iter().map(|p| p.output).collect(),
        pr,
    })
}

fn output_dirs(config: &RunConfig) -> Result<Vec<PathBuf>> {
    if config.inputs.len() == 1 {
        return Ok(vec![config.out.clone()]);
    }
    let mut seen = BTreeSet::new();
    config
        .inputs
        .iter()
        .map(|input| {
            let id = image_id(input);
            if !seen.insert(id.clone()) {
                return Err(CliError::Config(format!(
                    "two inputs share the file stem '{id}'"
                )));
            }
            Ok(config.out.join(id))
        })
        .collect()
}

fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn process(config: &RunConfig, input: &Path, dir: &Path) -> Result<Processed> {
    let (image, scale) = load_image(input, config.resize_max)?;
    let sweep = config.sweep_params(image.width(), image.height());
    let peaks = config.peak_params();
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let heatmap = dir.join("accumulator.pgm");

    let segments_wanted = match config.mode {
        Mode::Segments => true,
        Mode::Eval => config.criterion == Criterion::Segment,
        _ => false,
    };
    let (mut lines, mut segments, mut centers) = (Vec::new(), Vec::new(), Vec::new());
    match config.mode {
        Mode::Ellipses => {
            let (map, found) = detect_centers(&image, &sweep, &peaks)?;
            if config.emit_heatmap {
                write_pgm16(&heatmap, map.width(), map.height(), map.values())?;
            }
            centers = found;
        }
        _ => {
            let acc = if segments_wanted {
                let found =
                    detect_segments(&image, &sweep, &peaks, config.refine, config.haar_size)?;
                segments = at_peaks(&found.segments, &found.peak_scores);
                found.accumulator
            } else {
                let found = detect_lines(&image, &sweep, &peaks, config.refine)?;
                lines = at_peaks(&found.lines, &found.peak_scores);
                found.accumulator
            };
            if config.emit_heatmap {
                write_pgm16(&heatmap, acc.delta_bins(), acc.rho_bins(), acc.votes())?;
            }
        }
    }

    let detections = Detections {
        image: input.display().to_string(),
        mode: config.mode.name().to_string(),
        scale: Fixed(scale),
        lines: lines.iter().map(|l| (&l.detection).into()).collect(),
        segments: segments.iter().map(|s| (&s.detection).into()).collect(),
        centers: centers.iter().map(Into::into).collect(),
    };
    detections.write(&dir.join("detections.json"))?;
    Ok(Processed {
        output: ImageOutput {
            input: input.to_path_buf(),
            dir: dir.to_path_buf(),
            detections,
        },
        scale,
        lines,
        segments,
    })
}

fn index_ground_truth(path: &Path) -> Result<HashMap<String, Vec<GroundTruthSegment>>> {
    Ok(load_ground_truth(path)?.into_iter().collect())
}

fn evaluate(
    config: &RunConfig,
    processed: &[Processed],
    ground_truth: &HashMap<String, Vec<GroundTruthSegment>>,
) -> Result<Vec<PrPoint>> {
    let gt_for = |p: &Processed| -> Result<Vec<GroundTruthSegment>> {
        let id = image_id(&p.output.input);
        let segs = ground_truth
            .get(&id)
            .ok_or(CliError::MissingGroundTruth(id))?;
        Ok(segs.iter().map(|s| s.scaled(p.scale)).collect())
    };
    let sweep = Sweep::default_thresholds();
    let points = match config.criterion {
        Criterion::Segment => {
            let images = processed
                .iter()
                .map(|p| {
                    Ok(ImageEvaluation {
                        detections: p.segments.clone(),
                        ground_truth: gt_for(p)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            pr_curve(&images, &sweep, |d, g| is_tp_segment(&d.detection, g))?
        }
        Criterion::Line => {
            let images = processed
                .iter()
                .map(|p| {
                    Ok(ImageEvaluation {
                        detections: p.lines.clone(),
                        ground_truth: gt_for(p)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            pr_curve(&images, &sweep, |d, g| is_tp_line(&d.detection, g))?
        }
    };
    let path = config.out.join("pr.csv");
    fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_pr_csv(&points, BufWriter::new(file)).map_err(|e| CliError::io(&path, e))?;
    Ok(points)
}
