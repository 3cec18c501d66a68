//! Detection scoring against ground-truth segments: the angle/center
//! true-positive criteria, one-to-one greedy matching and precision/recall.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::detect::{SymmetryLine, SymmetrySegment};
use crate::error::{invalid, Error, Result};
use crate::geometry::{angle_difference, point_line_distance, segment_angle, Point};

/// Largest accepted orientation error, exclusive.
pub const MAX_ANGLE_ERROR_DEG: f64 = 10.0;
/// Center-distance tolerance as a fraction of segment length, exclusive.
pub const CENTER_TOLERANCE: f64 = 0.2;

/// Annotated symmetry segment. Angle, center and length derive from the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthSegment {
    pub endpoint_a: Point,
    pub endpoint_b: Point,
}

impl GroundTruthSegment {
    pub fn new(endpoint_a: Point, endpoint_b: Point) -> Result<Self> {
        if !(endpoint_a.distance(&endpoint_b) > 0.0) {
            return Err(invalid("ground-truth segment has zero length"));
        }
        Ok(Self {
            endpoint_a,
            endpoint_b,
        })
    }

    /// Undirected orientation in `[0, π)`.
    pub fn angle(&self) -> f64 {
        segment_angle(&self.endpoint_a, &self.endpoint_b)
    }

    pub fn center(&self) -> Point {
        self.endpoint_a.midpoint(&self.endpoint_b)
    }

    pub fn length(&self) -> f64 {
        self.endpoint_a.distance(&self.endpoint_b)
    }

    /// Same segment in an image resized by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            endpoint_a: self.endpoint_a.scaled(factor),
            endpoint_b: self.endpoint_b.scaled(factor),
        }
    }
}

fn angle_ok(a: f64, b: f64) -> bool {
    angle_difference(a, b) < MAX_ANGLE_ERROR_DEG.to_radians()
}

/// Segment criterion: angle error below 10° and center distance below a
/// fifth of the shorter of the two lengths.
pub fn is_tp_segment(det: &SymmetrySegment, gt: &GroundTruthSegment) -> bool {
    let phi_d = segment_angle(&det.endpoint_a, &det.endpoint_b);
    angle_ok(phi_d, gt.angle())
        && det.center.distance(&gt.center()) < CENTER_TOLERANCE * det.length.min(gt.length())
}

/// Line criterion: angle error below 10° and distance from the ground-truth
/// center to the line below a fifth of the ground-truth length.
pub fn is_tp_line(det: &SymmetryLine, gt: &GroundTruthSegment) -> bool {
    angle_ok(det.rho, gt.angle())
        && point_line_distance(&gt.center(), det.rho, det.delta) < CENTER_TOLERANCE * gt.length()
}

/// Which criterion a detection is judged by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Segment,
    Line,
}

/// A scored detection that can be ranked deterministically.
pub trait Detection {
    fn score(&self) -> f64;
    /// Secondary ordering among equal scores, ascending.
    fn tie_key(&self) -> [f64; 4];
}

impl Detection for SymmetryLine {
    fn score(&self) -> f64 {
        self.score
    }

    fn tie_key(&self) -> [f64; 4] {
        [self.rho, self.delta, 0.0, 0.0]
    }
}

impl Detection for SymmetrySegment {
    fn score(&self) -> f64 {
        self.line.score
    }

    fn tie_key(&self) -> [f64; 4] {
        [
            self.endpoint_a.x,
            self.endpoint_a.y,
            self.endpoint_b.x,
            self.endpoint_b.y,
        ]
    }
}

/// Indices of `detections` by descending score, ties broken by `tie_key`.
pub fn rank<D: Detection>(detections: &[D]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&detections[i], &detections[j]);
        b.score().total_cmp(&a.score()).then_with(|| {
            a.tie_key()
                .iter()
                .zip(b.tie_key().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `(detection index, ground-truth index)` pairs.
    pub pairs: Vec<(usize, usize)>,
}

impl MatchResult {
    /// `tp / (tp + fp)`, or 1 with no detections.
    pub fn precision(&self) -> f64 {
        precision(self.tp, self.fp)
    }

    /// `tp / (tp + fn)`, or 1 with no ground truth.
    pub fn recall(&self) -> f64 {
        recall(self.tp, self.fn_)
    }
}

fn precision(tp: usize, fp: usize) -> f64 {
    if tp + fp == 0 {
        1.0
    } else {
        tp as f64 / (tp + fp) as f64
    }
}

fn recall(tp: usize, fn_: usize) -> f64 {
    if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    }
}

/// Greedy one-to-one matching in rank order: each detection claims the
/// lowest-index unclaimed ground truth it satisfies. Pair indices refer to
/// the input order of `detections`.
pub fn match_detections<D: Detection>(
    detections: &[D],
    ground_truth: &[GroundTruthSegment],
    is_tp: impl Fn(&D, &GroundTruthSegment) -> bool,
) -> MatchResult {
    let mut claimed = vec![false; ground_truth.len()];
    let mut pairs = Vec::new();
    let mut fp = 0;
    for i in rank(detections) {
        let hit = ground_truth
            .iter()
            .enumerate()
            .position(|(g, gt)| !claimed[g] && is_tp(&detections[i], gt));
        match hit {
            Some(g) => {
                claimed[g] = true;
                pairs.push((i, g));
            }
            None => fp += 1,
        }
    }
    MatchResult {
        tp: pairs.len(),
        fp,
        fn_: ground_truth.len() - pairs.len(),
        pairs,
    }
}

pub fn match_segments(dets: &[SymmetrySegment], gts: &[GroundTruthSegment]) -> MatchResult {
    match_detections(dets, gts, is_tp_segment)
}

pub fn match_lines(dets: &[SymmetryLine], gts: &[GroundTruthSegment]) -> MatchResult {
    match_detections(dets, gts, is_tp_line)
}

/// Detections and annotations of one image.
#[derive(Debug, Clone)]
pub struct ImageEvaluation<D> {
    pub detections: Vec<D>,
    pub ground_truth: Vec<GroundTruthSegment>,
}

/// Values swept to trace a precision/recall curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Keep detections scoring at least `t ×` the image's best score.
    RelativeThreshold(Vec<f64>),
    /// Keep detections scoring at least `t`.
    AbsoluteThreshold(Vec<f64>),
    /// Keep the `k` best-ranked detections.
    TopK(Vec<usize>),
}

impl Sweep {
    /// Relative thresholds `0.1, 0.2, …, 1.0`.
    pub fn default_thresholds() -> Self {
        Sweep::RelativeThreshold((1..=10).map(|i| i as f64 / 10.0).collect())
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Sweep::RelativeThreshold(v) | Sweep::AbsoluteThreshold(v) => v.clone(),
            Sweep::TopK(v) => v.iter().map(|&k| k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub sweep: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

fn retained<D: Detection + Clone>(detections: &[D], sweep: &Sweep, index: usize) -> Vec<D> {
    let order = rank(detections);
    let best = order.first().map(|&i| detections[i].score());
    let keep: Vec<usize> = match sweep {
        Sweep::RelativeThreshold(v) => {
            let cut = v[index] * best.unwrap_or(0.0);
            order.into_iter().filter(|&i| detections[i].score() >= cut).collect()
        }
        Sweep::AbsoluteThreshold(v) => order
            .into_iter()
            .filter(|&i| detections[i].score() >= v[index])
            .collect(),
        Sweep::TopK(v) => order.into_iter().take(v[index]).collect(),
    };
    keep.into_iter().map(|i| detections[i].clone()).collect()
}

/// One precision/recall point per sweep value, counts aggregated over images,
/// in the order the sweep lists them.
pub fn pr_curve<D: Detection + Clone + Sync>(
    images: &[ImageEvaluation<D>],
    sweep: &Sweep,
    is_tp: impl Fn(&D, &GroundTruthSegment) -> bool + Sync,
) -> Result<Vec<PrPoint>> {
    if images.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let values = sweep.values();
    Ok(values
        .iter()
        .enumerate()
        .map(|(idx, &value)| {
            let (tp, fp, fn_) = images
                .par_iter()
                .map(|img| {
                    let kept = retained(&img.detections, sweep, idx);
                    let m = match_detections(&kept, &img.ground_truth, &is_tp);
                    (m.tp, m.fp, m.fn_)
                })
                .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
            PrPoint {
                sweep: value,
                precision: precision(tp, fp),
                recall: recall(tp, fn_),
                tp,
                fp,
                fn_,
            }
        })
        .collect())
}

pub const PR_CSV_HEADER: &str = "sweep,precision,recall,tp,fp,fn";

pub fn write_pr_csv(points: &[PrPoint], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{PR_CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{:.6},{:.6},{:.6},{},{},{}",
            p.sweep, p.precision, p.recall, p.tp, p.fp, p.fn_
        )?;
    }
    out.flush()
}

/// Ground truth of one image.
pub type GroundTruthEntry = (String, Vec<GroundTruthSegment>);

/// Reads `image_id,ax,ay,bx,by` rows. Image ids keep first-appearance order;
/// an optional first row starting with `image_id` is treated as a header.
pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<Vec<GroundTruthEntry>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ground_truth(file, path)
}

pub fn parse_ground_truth(reader: impl Read, path: &Path) -> Result<Vec<GroundTruthEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut out: Vec<GroundTruthEntry> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let err = |message: String| Error::GroundTruth {
            path: path.to_path_buf(),
            row,
            message,
        };
        let record = record.map_err(|e| err(e.to_string()))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if row == 1 && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("image_id")) {
            continue;
        }
        if record.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", record.len())));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(err("empty image id".into()));
        }
        let mut coords = [0.0; 4];
        for (c, field) in coords.iter_mut().zip(record.iter().skip(1)) {
            *c = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("invalid coordinate {field:?}")))?;
        }
        let seg = GroundTruthSegment::new(
            Point::new(coords[0], coords[1]),
            Point::new(coords[2], coords[3]),
        )
        .map_err(|e| err(e.to_string()))?;
        match out.iter_mut().find(|(k, _)| *k == id) {
            Some((_, segs)) => segs.push(seg),
            None => out.push((id, vec![seg])),
        }
    }
    Ok(out)
}
