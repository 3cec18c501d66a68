//! Per-image detection pipelines shared by the CLI modes.

use symconv::detect::{extract_centers, extract_lines, extract_segments};
use symconv::symmetry::{accumulate_centers, accumulate_lines, refine_line_scores};
use symconv::wavelets::make_haar;
use symconv::{
    Center, CenterLikelihoodMap, Image, LineAccumulator, PeakParams, Result, SweepParams,
    SymmetryLine, SymmetrySegment,
};

pub struct LineDetections {
    pub accumulator: LineAccumulator,
    /// Final ranking; scores are the robust rescoring when refinement is on.
    pub lines: Vec<SymmetryLine>,
    /// Accumulator peak value of each entry of `lines`.
    pub peak_scores: Vec<f64>,
}

pub struct SegmentDetections {
    pub accumulator: LineAccumulator,
    pub segments: Vec<SymmetrySegment>,
    pub peak_scores: Vec<f64>,
}

fn peak_score(peaks: &[SymmetryLine], line: &SymmetryLine) -> f64 {
    peaks
        .iter()
        .find(|p| p.rho == line.rho && p.delta == line.delta)
        .map_or(line.score, |p| p.score)
}

/// Accumulator peaks, optionally rescored by the robust along-line statistic.
pub fn detect_lines(
    image: &Image,
    sweep: &SweepParams,
    peaks: &PeakParams,
    refine: bool,
) -> Result<LineDetections> {
    let accumulator = accumulate_lines(image, sweep)?;
    let raw = extract_lines(&accumulator, peaks)?;
    let lines = if refine {
        refine_line_scores(image, &raw, sweep)?
    } else {
        raw.clone()
    };
    let peak_scores = lines.iter().map(|l| peak_score(&raw, l)).collect();
    Ok(LineDetections {
        accumulator,
        lines,
        peak_scores,
    })
}

pub fn detect_segments(
    image: &Image,
    sweep: &SweepParams,
    peaks: &PeakParams,
    refine: bool,
    haar_size: usize,
) -> Result<SegmentDetections> {
    let haar = make_haar(haar_size)?;
    let found = detect_lines(image, sweep, peaks, refine)?;
    let segments = extract_segments(image, &found.lines, sweep, &haar)?;
    let peak_scores = segments
        .iter()
        .map(|s| {
            let i = found.lines.iter().position(|l| *l == s.line).unwrap_or(0);
            found.peak_scores.get(i).copied().unwrap_or(s.score())
        })
        .collect();
    Ok(SegmentDetections {
        accumulator: found.accumulator,
        segments,
        peak_scores,
    })
}

pub fn detect_centers(
    image: &Image,
    sweep: &SweepParams,
    peaks: &PeakParams,
) -> Result<(CenterLikelihoodMap, Vec<Center>)> {
    let map = accumulate_centers(image, sweep)?;
    let centers = extract_centers(&map, peaks)?;
    Ok((map, centers))
}
