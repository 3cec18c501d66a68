//! Peak extraction from accumulators and segment endpoint localization.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::conv::Image;
use crate::error::{invalid, Error, Result};
use crate::geometry::{point_line_distance, Point};
use crate::symmetry::{
    perpendicular_votes, top_k_sum, CenterLikelihoodMap, LineAccumulator, SweepParams,
    ROBUST_TOP_K,
};
use crate::wavelets::HaarKernel;

/// Infinite symmetry axis `{x : ⟨x, (sin ρ, −cos ρ)⟩ = δ}`, direction `(cos ρ, sin ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryLine {
    pub rho: f64,
    pub delta: f64,
    pub score: f64,
}

impl SymmetryLine {
    pub fn distance_to(&self, p: &Point) -> f64 {
        point_line_distance(p, self.rho, self.delta)
    }
}

/// A symmetry axis clipped to the extent of its supporting votes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrySegment {
    pub line: SymmetryLine,
    pub endpoint_a: Point,
    pub endpoint_b: Point,
    pub center: Point,
    pub length: f64,
}

impl SymmetrySegment {
    pub fn new(line: SymmetryLine, endpoint_a: Point, endpoint_b: Point) -> Result<Self> {
        let length = endpoint_a.distance(&endpoint_b);
        if !(length > 0.0) {
            return Err(invalid("segment endpoints coincide"));
        }
        Ok(Self {
            line,
            endpoint_a,
            endpoint_b,
            center: endpoint_a.midpoint(&endpoint_b),
            length,
        })
    }

    pub fn score(&self) -> f64 {
        self.line.score
    }
}

/// Peak selection and non-maximum suppression settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    pub max_detections: usize,
    /// Suppression half-width along ρ, in radians.
    pub nms_rho_window: f64,
    /// Suppression half-width along δ (or image distance for centers), in pixels.
    pub nms_delta_window: f64,
    /// Peaks below this fraction of the global maximum are ignored.
    pub threshold_fraction: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self {
            max_detections: 5,
            nms_rho_window: 2.0 * PI / SweepParams::DEFAULT_N_ALPHA as f64,
            nms_delta_window: 10.0,
            threshold_fraction: 0.1,
        }
    }
}

impl PeakParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_detections == 0 {
            return Err(invalid("max_detections must be at least 1"));
        }
        if !(self.nms_rho_window > 0.0 && self.nms_delta_window > 0.0) {
            return Err(invalid("suppression windows must be positive"));
        }
        if !(self.threshold_fraction > 0.0 && self.threshold_fraction <= 1.0) {
            return Err(invalid(format!(
                "threshold fraction must lie in (0, 1], got {}",
                self.threshold_fraction
            )));
        }
        Ok(())
    }
}

/// Greedy non-maximum suppression over the line accumulator. ρ is circular
/// modulo π, and crossing the seam negates δ.
pub fn extract_lines(acc: &LineAccumulator, pk: &PeakParams) -> Result<Vec<SymmetryLine>> {
    pk.validate()?;
    let max = acc.max();
    if !(max > 0.0) {
        return Ok(Vec::new());
    }
    let threshold = pk.threshold_fraction * max;
    let n_rho = acc.rho_bins();
    let n_delta = acc.delta_bins();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for r in 0..n_rho {
        for (c, &v) in acc.row(r).iter().enumerate() {
            if v > 0.0 && v >= threshold {
                candidates.push((v, r, c));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let rho_window = (pk.nms_rho_window / acc.rho_step()).round() as usize;
    let delta_window = pk.nms_delta_window;
    let center = (n_delta / 2) as f64;
    let suppressed = |r1: usize, c1: usize, r2: usize, c2: usize| {
        let d1 = c1 as f64 - center;
        let d2 = c2 as f64 - center;
        let direct = r1.abs_diff(r2);
        let wrapped = n_rho - direct;
        (direct <= rho_window && (d1 - d2).abs() <= delta_window)
            || (wrapped <= rho_window && (d1 + d2).abs() <= delta_window)
    };

    let mut picked: Vec<(f64, usize, usize)> = Vec::new();
    for (v, r, c) in candidates {
        if picked.len() >= pk.max_detections {
            break;
        }
        if picked.iter().all(|&(_, pr, pc)| !suppressed(r, c, pr, pc)) {
            picked.push((v, r, c));
        }
    }
    Ok(picked
        .into_iter()
        .map(|(score, r, c)| SymmetryLine {
            rho: acc.rho(r),
            delta: acc.delta(c),
            score,
        })
        .collect())
}

/// Robust along-line histogram: at each integer position of the line's trace
/// through the image, the sum of the five strongest perpendicular stencil
/// votes (positive real part of the coefficient) across `(β, d)`. Empty
/// when the line misses the image.
pub fn segment_histogram(
    image: &Image,
    line: &SymmetryLine,
    params: &SweepParams,
) -> Result<Vec<f64>> {
    let (_, votes) = perpendicular_votes(image, line, params)?;
    Ok(votes.iter().map(|v| top_k_sum(v, ROBUST_TOP_K)).collect())
}

/// Weakest accepted endpoint response, relative to the stronger of the pair.
pub const ENDPOINT_MIN_CONTRAST: f64 = 0.25;

/// Locates the rise `a` and fall `b` (`a < b`) of a vote histogram from the
/// extrema of its Haar response.
pub fn find_endpoints(histogram: &[f64], haar: &HaarKernel) -> Result<(usize, usize)> {
    find_endpoints_with_contrast(histogram, haar, ENDPOINT_MIN_CONTRAST)
}

pub fn find_endpoints_with_contrast(
    histogram: &[f64],
    haar: &HaarKernel,
    min_contrast: f64,
) -> Result<(usize, usize)> {
    if histogram.len() <= haar.size() {
        return Err(invalid(format!(
            "histogram of length {} is not longer than the haar kernel ({})",
            histogram.len(),
            haar.size()
        )));
    }
    let hi = histogram.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = histogram.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::NoSupport("flat histogram".into()));
    }

    let response = haar.convolve(histogram);
    let argmax = first_extremum(&response, |a, b| a > b);
    let argmin = first_extremum(&response, |a, b| a < b);
    let (a, b) = if argmax < argmin {
        (argmax, argmin)
    } else {
        best_rise_fall(&response)
    };

    let rise = response[a];
    let fall = -response[b];
    if !(rise > 0.0 && fall > 0.0) {
        return Err(Error::NoSupport("no rise followed by a fall".into()));
    }
    if rise.min(fall) < min_contrast * rise.max(fall) {
        return Err(Error::NoSupport(format!(
            "unbalanced edges (rise {rise:.3e}, fall {fall:.3e})"
        )));
    }
    Ok((a, b))
}

fn first_extremum(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = i;
        }
    }
    best
}

/// Pair `a < b` maximizing `response[a] − response[b]`.
fn best_rise_fall(response: &[f64]) -> (usize, usize) {
    let mut best_a = 0;
    let mut pair = (0, 1);
    let mut gap = f64::NEG_INFINITY;
    for b in 1..response.len() {
        if response[b - 1] > response[best_a] {
            best_a = b - 1;
        }
        let g = response[best_a] - response[b];
        if g > gap {
            gap = g;
            pair = (best_a, b);
        }
    }
    pair
}

/// Endpoints for each line; lines without detectable support are dropped.
/// Output keeps the input order.
pub fn extract_segments(
    image: &Image,
    lines: &[SymmetryLine],
    params: &SweepParams,
    haar: &HaarKernel,
) -> Result<Vec<SymmetrySegment>> {
    params.validate()?;
    let found = lines
        .par_iter()
        .map(|line| -> Result<Option<SymmetrySegment>> {
            let (trace, votes) = perpendicular_votes(image, line, params)?;
            let Some(trace) = trace else {
                return Ok(None);
            };
            let histogram: Vec<f64> = votes.iter().map(|v| top_k_sum(v, ROBUST_TOP_K)).collect();
            let Ok((a, b)) = find_endpoints(&histogram, haar) else {
                return Ok(None);
            };
            let pa = Point::from(trace.point(a as f64));
            let pb = Point::from(trace.point(b as f64));
            Ok(SymmetrySegment::new(*line, pa, pb).ok())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// A detected ellipse/circle center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Center {
    pub x: usize,
    pub y: usize,
    pub score: f64,
}

/// 8-neighborhood local maxima of the center map above the threshold,
/// suppressed within `nms_delta_window` pixels, strongest first.
pub fn extract_centers(map: &CenterLikelihoodMap, pk: &PeakParams) -> Result<Vec<Center>> {
    pk.validate()?;
    let max = map.max();
    if !(max > 0.0) {
        return Ok(Vec::new());
    }
    let threshold = pk.threshold_fraction * max;
    let (w, h) = (map.width(), map.height());

    let mut candidates = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = map.get(x, y);
            if !(v > 0.0 && v >= threshold) {
                continue;
            }
            let is_peak = (y.saturating_sub(1)..=(y + 1).min(h - 1))
                .flat_map(|ny| (x.saturating_sub(1)..=(x + 1).min(w - 1)).map(move |nx| (nx, ny)))
                .all(|(nx, ny)| map.get(nx, ny) <= v);
            if is_peak {
                candidates.push(Center { x, y, score: v });
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.y.cmp(&b.y))
            .then(a.x.cmp(&b.x))
    });

    let mut picked: Vec<Center> = Vec::new();
    for c in candidates {
        if picked.len() >= pk.max_detections {
            break;
        }
        let far = picked.iter().all(|p| {
            let dx = p.x as f64 - c.x as f64;
            let dy = p.y as f64 - c.y as f64;
            dx.hypot(dy) > pk.nms_delta_window
        });
        if far {
            picked.push(c);
        }
    }
    Ok(picked)
}
