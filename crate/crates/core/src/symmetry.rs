//! Stencil sweeps: per-configuration coefficient maps and their accumulation
//! into the (ρ, δ) line space or the image-space center likelihood.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::conv::{add_shifted_product, BorderMode, ComplexMap, Convolver, Image};
use crate::detect::SymmetryLine;
use crate::error::{invalid, Result};
use crate::wavelets::{MorletKernel, WaveletGeometry};

/// One orbiting wavelet pair: outer angle `alpha` of the line joining the
/// wavelet centers, inner angle `beta` of the wavelets and inner distance `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConfig {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
}

impl StencilConfig {
    pub fn new(alpha: f64, beta: f64, d: f64) -> Result<Self> {
        let cfg = Self { alpha, beta, d };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(invalid(format!("stencil distance must be positive, got {}", self.d)));
        }
        if !(0.0..PI).contains(&self.alpha) {
            return Err(invalid(format!("alpha must lie in [0, π), got {}", self.alpha)));
        }
        if !self.beta.is_finite() {
            return Err(invalid("beta must be finite"));
        }
        Ok(())
    }

    /// Pixel offset from the stencil center to the `v` end, `(d/2)(cos α, sin α)`
    /// rounded to the nearest pixel. The `w` end sits at the negated offset.
    pub fn offset(&self) -> (isize, isize) {
        let half = 0.5 * self.d;
        let (sin, cos) = self.alpha.sin_cos();
        ((half * cos).round() as isize, (half * sin).round() as isize)
    }

    /// Carrier angles of the `v` and `w` kernels.
    ///
    /// The wavelet stripes run at `β` from the perpendicular to the stencil,
    /// so `v` oscillates along `α + β`. `w` is `v` mirrored across the
    /// candidate axis (angle `α + π/2`), which puts its carrier at
    /// `α + π − β`. For `β = 0` the pair is conjugate and both respond to
    /// edges tangent to a circle of diameter `d` centered at the stencil.
    pub fn kernel_angles(&self) -> (f64, f64) {
        (self.alpha + self.beta, self.alpha + PI - self.beta)
    }
}

/// How the per-stencil coefficients at one pixel and one outer angle are
/// combined into a vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// `|Σ_(β,d) c|^n`: phase-coherent sum, then magnitude.
    #[default]
    Coherent,
    /// `Σ_(β,d) |c|^n`: magnitudes of individual stencils.
    Magnitude,
}

/// The set of stencils swept over an image.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub n_alpha: usize,
    pub betas: Vec<f64>,
    pub distances: Vec<f64>,
    pub exponent: f64,
    pub geometry: WaveletGeometry,
    pub border: BorderMode,
    pub aggregation: Aggregation,
}

impl SweepParams {
    pub const DEFAULT_N_ALPHA: usize = 32;

    /// Symmetry-line defaults: β ∈ {−π/4, 0, π/4}, d from 6 px in 4 px steps
    /// up to 0.8 × the larger image side, exponent 2.
    pub fn for_lines(width: usize, height: usize) -> Self {
        let d_max = 0.8 * width.max(height) as f64;
        Self {
            n_alpha: Self::DEFAULT_N_ALPHA,
            betas: vec![-PI / 4.0, 0.0, PI / 4.0],
            distances: distance_range(6.0, d_max, 4.0),
            exponent: 2.0,
            geometry: WaveletGeometry::default(),
            border: BorderMode::Mean,
            aggregation: Aggregation::Coherent,
        }
    }

    /// Ellipse-center defaults: β = 0 and exponent 1 over the given diameters.
    pub fn for_ellipses(distances: Vec<f64>) -> Self {
        Self {
            n_alpha: Self::DEFAULT_N_ALPHA,
            betas: vec![0.0],
            distances,
            exponent: 1.0,
            geometry: WaveletGeometry::default(),
            border: BorderMode::Mean,
            aggregation: Aggregation::Coherent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_alpha == 0 {
            return Err(invalid("n_alpha must be at least 1"));
        }
        if self.betas.is_empty() || self.betas.iter().any(|b| !b.is_finite()) {
            return Err(invalid("betas must be a non-empty list of finite angles"));
        }
        if self.distances.is_empty() {
            return Err(invalid("at least one stencil distance is required"));
        }
        if self.distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(invalid("stencil distances must be positive"));
        }
        if self.distances.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("stencil distances must be strictly increasing"));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(invalid(format!("exponent must be positive, got {}", self.exponent)));
        }
        Ok(())
    }

    /// Outer angle of index `k`, sampling `[0, π)` in `n_alpha` equal steps.
    pub fn alpha(&self, k: usize) -> f64 {
        k as f64 * PI / self.n_alpha as f64
    }

    /// Every `(β, d)` pair, β-major.
    pub fn inner_configs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.betas
            .iter()
            .flat_map(move |&b| self.distances.iter().map(move |&d| (b, d)))
    }

    pub fn inner_count(&self) -> usize {
        self.betas.len() * self.distances.len()
    }
}

/// `start, start + step, …` up to and including `end`.
pub fn distance_range(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || start > end {
        return Vec::new();
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// The `v` and `w` kernels of a stencil.
pub fn stencil_kernels(
    cfg: &StencilConfig,
    geometry: &WaveletGeometry,
) -> Result<(MorletKernel, MorletKernel)> {
    cfg.validate()?;
    let (av, aw) = cfg.kernel_angles();
    Ok((geometry.kernel(av)?, geometry.kernel(aw)?))
}

fn angle_key(angle: f64) -> i64 {
    const SCALE: f64 = 1e9;
    let full = (2.0 * PI * SCALE).round() as i64;
    ((angle.rem_euclid(2.0 * PI) * SCALE).round() as i64).rem_euclid(full)
}

/// Convolutions of one image with every kernel angle a sweep needs.
pub(crate) struct ResponseBank {
    maps: BTreeMap<i64, ComplexMap>,
}

impl ResponseBank {
    pub(crate) fn build(
        image: &Image,
        geometry: &WaveletGeometry,
        border: BorderMode,
        angles: impl IntoIterator<Item = f64>,
    ) -> Result<Self> {
        let mut wanted: BTreeMap<i64, f64> = BTreeMap::new();
        for a in angles {
            wanted.entry(angle_key(a)).or_insert(a);
        }
        let convolver = Convolver::new(image, geometry.support, border)?;
        let maps = wanted
            .into_par_iter()
            .map(|(key, angle)| {
                let kernel = geometry.kernel(angle)?;
                Ok((key, convolver.convolve(&kernel)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self { maps })
    }

    pub(crate) fn for_sweep(image: &Image, params: &SweepParams, alphas: &[f64]) -> Result<Self> {
        let angles = alphas.iter().flat_map(|&alpha| {
            params.betas.iter().flat_map(move |&beta| {
                let (v, w) = StencilConfig { alpha, beta, d: 1.0 }.kernel_angles();
                [v, w]
            })
        });
        Self::build(image, &params.geometry, params.border, angles.collect::<Vec<_>>())
    }

    pub(crate) fn get(&self, angle: f64) -> &ComplexMap {
        &self.maps[&angle_key(angle)]
    }

    pub(crate) fn pair(&self, cfg: &StencilConfig) -> (&ComplexMap, &ComplexMap) {
        let (v, w) = cfg.kernel_angles();
        (self.get(v), self.get(w))
    }
}

/// Per-pixel stencil coefficient `I_v(p + o) · conj(I_w(p − o))` for one
/// configuration, computed from two whole-image convolutions and one
/// shifted product. Convolutions use [`BorderMode::Mean`].
pub fn stencil_coefficient_map(
    image: &Image,
    cfg: &StencilConfig,
    geometry: &WaveletGeometry,
) -> Result<ComplexMap> {
    stencil_coefficient_map_with_border(image, cfg, geometry, BorderMode::Mean)
}

pub fn stencil_coefficient_map_with_border(
    image: &Image,
    cfg: &StencilConfig,
    geometry: &WaveletGeometry,
    border: BorderMode,
) -> Result<ComplexMap> {
    let (v, w) = stencil_kernels(cfg, geometry)?;
    let convolver = Convolver::new(image, geometry.support, border)?;
    let iv = convolver.convolve(&v)?;
    let iw = convolver.convolve(&w)?;
    let mut out = ComplexMap::zeros(image.width(), image.height());
    add_shifted_product(&iv, &iw, cfg.offset(), &mut out)?;
    Ok(out)
}

/// Line through `p` perpendicular to direction `alpha`, as `(ρ, δ)` with
/// `ρ = α + π/2` reduced into `[0, π)` and `δ = p_x cos α + p_y sin α`,
/// negated whenever the reduction shifts ρ by an odd multiple of π.
///
/// The resulting line is the point set `{x : ⟨x, (sin ρ, −cos ρ)⟩ = δ}`.
pub fn line_params(p: (f64, f64), alpha: f64) -> (f64, f64) {
    let rho = alpha + PI / 2.0;
    let delta = p.0 * alpha.cos() + p.1 * alpha.sin();
    let wraps = (rho / PI).floor();
    let mut reduced = rho - wraps * PI;
    if reduced >= PI {
        reduced -= PI;
    }
    if (wraps as i64).rem_euclid(2) == 1 {
        (reduced, -delta)
    } else {
        (reduced, delta)
    }
}

/// Vote grid over `(ρ, δ)`: `rho_bins` rows of angle, `delta_bins = 2D + 1`
/// columns of 1 px displacement covering `[−D, D]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineAccumulator {
    rho_bins: usize,
    delta_max: usize,
    votes: Vec<f64>,
}

impl LineAccumulator {
    pub fn new(rho_bins: usize, delta_max: usize) -> Self {
        Self {
            rho_bins,
            delta_max,
            votes: vec![0.0; rho_bins * (2 * delta_max + 1)],
        }
    }

    /// Wraps existing votes laid out row-major as `rho_bins × (2 delta_max + 1)`.
    pub fn from_votes(rho_bins: usize, delta_max: usize, votes: Vec<f64>) -> Result<Self> {
        if rho_bins == 0 || votes.len() != rho_bins * (2 * delta_max + 1) {
            return Err(invalid("accumulator votes do not match its shape"));
        }
        if votes.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("votes must be finite and non-negative"));
        }
        Ok(Self {
            rho_bins,
            delta_max,
            votes,
        })
    }

    /// Accumulator sized for `image` with `rho_bins` angle rows.
    pub fn for_image(image: &Image, rho_bins: usize) -> Self {
        Self::new(rho_bins, image.diagonal().ceil() as usize)
    }

    pub fn rho_bins(&self) -> usize {
        self.rho_bins
    }

    pub fn delta_bins(&self) -> usize {
        2 * self.delta_max + 1
    }

    /// `D`, the largest representable |δ|.
    pub fn delta_max(&self) -> usize {
        self.delta_max
    }

    pub fn votes(&self) -> &[f64] {
        &self.votes
    }

    pub fn get(&self, rho_bin: usize, delta_bin: usize) -> f64 {
        self.votes[rho_bin * self.delta_bins() + delta_bin]
    }

    pub fn row(&self, rho_bin: usize) -> &[f64] {
        let n = self.delta_bins();
        &self.votes[rho_bin * n..(rho_bin + 1) * n]
    }

    fn row_mut(&mut self, rho_bin: usize) -> &mut [f64] {
        let n = self.delta_bins();
        &mut self.votes[rho_bin * n..(rho_bin + 1) * n]
    }

    /// Angular width of one ρ bin.
    pub fn rho_step(&self) -> f64 {
        PI / self.rho_bins as f64
    }

    /// ρ of the first row. Rows hold the values `α + π/2 (mod π)` for the
    /// swept α, so the grid is offset by half a bin when `rho_bins` is odd.
    pub fn rho_origin(&self) -> f64 {
        PI / 2.0 - (self.rho_bins / 2) as f64 * self.rho_step()
    }

    pub fn rho(&self, rho_bin: usize) -> f64 {
        self.rho_origin() + rho_bin as f64 * self.rho_step()
    }

    pub fn delta(&self, delta_bin: usize) -> f64 {
        delta_bin as f64 - self.delta_max as f64
    }

    /// Row index and sign of δ for outer-angle index `k` of an `n_alpha` sweep.
    fn row_of_alpha(&self, k: usize) -> (usize, f64) {
        let shifted = k + self.rho_bins / 2;
        if shifted >= self.rho_bins {
            (shifted - self.rho_bins, -1.0)
        } else {
            (shifted, 1.0)
        }
    }

    /// Nearest bin to `(rho, delta)`, wrapping ρ modulo π.
    pub fn bin_of(&self, rho: f64, delta: f64) -> Option<(usize, usize)> {
        let steps = ((rho - self.rho_origin()) / self.rho_step()).round() as i64;
        let n = self.rho_bins as i64;
        let row = steps.rem_euclid(n);
        let delta = if steps.div_euclid(n).rem_euclid(2) == 1 {
            -delta
        } else {
            delta
        };
        let col = delta.round() + self.delta_max as f64;
        if col < 0.0 || col >= self.delta_bins() as f64 {
            return None;
        }
        Some((row as usize, col as usize))
    }

    pub fn max(&self) -> f64 {
        self.votes.iter().copied().fold(0.0, f64::max)
    }
}

fn powered(z: Complex64, exponent: f64) -> f64 {
    let m = z.norm();
    if exponent == 2.0 {
        z.norm_sqr()
    } else if exponent == 1.0 {
        m
    } else {
        m.powf(exponent)
    }
}

/// Per-pixel votes of one outer angle: all `(β, d)` stencils aggregated
/// according to `params.aggregation`.
fn alpha_votes(bank: &ResponseBank, params: &SweepParams, alpha: f64, w: usize, h: usize) -> Result<Vec<f64>> {
    match params.aggregation {
        Aggregation::Coherent => {
            let mut sum = ComplexMap::zeros(w, h);
            for (beta, d) in params.inner_configs() {
                let cfg = StencilConfig { alpha, beta, d };
                let (iv, iw) = bank.pair(&cfg);
                add_shifted_product(iv, iw, cfg.offset(), &mut sum)?;
            }
            Ok(sum.values().iter().map(|&z| powered(z, params.exponent)).collect())
        }
        Aggregation::Magnitude => {
            let mut votes = vec![0.0; w * h];
            let mut scratch = ComplexMap::zeros(w, h);
            for (beta, d) in params.inner_configs() {
                let cfg = StencilConfig { alpha, beta, d };
                let (iv, iw) = bank.pair(&cfg);
                scratch.values_mut().iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                add_shifted_product(iv, iw, cfg.offset(), &mut scratch)?;
                votes
                    .iter_mut()
                    .zip(scratch.values())
                    .for_each(|(v, &z)| *v += powered(z, params.exponent));
            }
            Ok(votes)
        }
    }
}

/// Sweeps every stencil over `image` and bins each pixel's aggregate vote
/// per outer angle into the line `(ρ(α), δ(p, α))`.
pub fn accumulate_lines(image: &Image, params: &SweepParams) -> Result<LineAccumulator> {
    params.validate()?;
    let (w, h) = image.dimensions();
    let alphas: Vec<f64> = (0..params.n_alpha).map(|k| params.alpha(k)).collect();
    let bank = ResponseBank::for_sweep(image, params, &alphas)?;
    let mut acc = LineAccumulator::for_image(image, params.n_alpha);
    let delta_max = acc.delta_max() as f64;
    let delta_bins = acc.delta_bins();

    let rows = alphas
        .par_iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let votes = alpha_votes(&bank, params, alpha, w, h)?;
            let (sin, cos) = alpha.sin_cos();
            let (row, sign) = acc.row_of_alpha(k);
            let mut bins = vec![0.0; delta_bins];
            for y in 0..h {
                for x in 0..w {
                    let delta = sign * (x as f64 * cos + y as f64 * sin);
                    let col = (delta.round() + delta_max) as usize;
                    bins[col] += votes[y * w + x];
                }
            }
            Ok((row, bins))
        })
        .collect::<Result<Vec<_>>>()?;

    for (row, bins) in rows {
        acc.row_mut(row)
            .iter_mut()
            .zip(bins)
            .for_each(|(a, b)| *a += b);
    }
    Ok(acc)
}

/// Image-space accumulator: at each pixel, the aggregate symmetry coefficient
/// over all outer angles and distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterLikelihoodMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl CenterLikelihoodMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(invalid("center map size mismatch"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("center map values must be finite and non-negative"));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Location of the global maximum, first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }
}

/// Center likelihood `|Σ_(α,d) c|^n` stored at each pixel. Requires `β = {0}`.
pub fn accumulate_centers(image: &Image, params: &SweepParams) -> Result<CenterLikelihoodMap> {
    params.validate()?;
    if params.betas.len() != 1 || params.betas[0] != 0.0 {
        return Err(invalid("center accumulation requires betas = {0}"));
    }
    let (w, h) = image.dimensions();
    let alphas: Vec<f64> = (0..params.n_alpha).map(|k| params.alpha(k)).collect();
    let bank = ResponseBank::for_sweep(image, params, &alphas)?;

    let sum = alphas
        .par_iter()
        .map(|&alpha| {
            let mut partial = ComplexMap::zeros(w, h);
            for &d in &params.distances {
                let cfg = StencilConfig {
                    alpha,
                    beta: 0.0,
                    d,
                };
                let (iv, iw) = bank.pair(&cfg);
                add_shifted_product(iv, iw, cfg.offset(), &mut partial)?;
            }
            Ok(partial)
        })
        .try_reduce(
            || ComplexMap::zeros(w, h),
            |mut a, b| {
                a.add_assign(&b)?;
                Ok(a)
            },
        )?;

    let values = sum
        .values()
        .iter()
        .map(|&z| powered(z, params.exponent))
        .collect();
    CenterLikelihoodMap::new(w, h, values)
}

/// Integer arc-length samples of a line clipped to an image.
#[derive(Debug, Clone, PartialEq)]
pub struct LineTrace {
    foot: (f64, f64),
    direction: (f64, f64),
    start: f64,
    len: usize,
}

impl LineTrace {
    /// Clips the line `(rho, delta)` to `[0, w−1] × [0, h−1]`. `None` when the
    /// line misses the image.
    pub fn new(rho: f64, delta: f64, width: usize, height: usize) -> Option<Self> {
        let (sin, cos) = rho.sin_cos();
        let foot = (delta * sin, -delta * cos);
        let direction = (cos, sin);
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (p, u, max) in [
            (foot.0, direction.0, (width - 1) as f64),
            (foot.1, direction.1, (height - 1) as f64),
        ] {
            if u.abs() < 1e-12 {
                if p < -1e-9 || p > max + 1e-9 {
                    return None;
                }
            } else {
                let a = (0.0 - p) / u;
                let b = (max - p) / u;
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
        }
        if !(hi >= lo) {
            return None;
        }
        let len = ((hi - lo) + 1e-9).floor() as usize + 1;
        Some(Self {
            foot,
            direction,
            start: lo,
            len,
        })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unit direction `(cos ρ, sin ρ)` of increasing position.
    pub fn direction(&self) -> (f64, f64) {
        self.direction
    }

    /// Point at (possibly fractional) sample position `t`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        let s = self.start + t;
        (
            self.foot.0 + s * self.direction.0,
            self.foot.1 + s * self.direction.1,
        )
    }
}

/// Outer angle in `[0, π)` of stencils perpendicular to a line of angle `rho`.
pub fn normal_alpha(rho: f64) -> f64 {
    let a = (rho - PI / 2.0).rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Magnitudes of every `(β, d)` stencil coefficient perpendicular to `line`,
/// for each sample of its trace through the image. Empty when the line
/// misses the image.
pub fn perpendicular_votes(
    image: &Image,
    line: &SymmetryLine,
    params: &SweepParams,
) -> Result<(Option<LineTrace>, Vec<Vec<f64>>)> {
    params.validate()?;
    let Some(trace) = LineTrace::new(line.rho, line.delta, image.width(), image.height()) else {
        return Ok((None, Vec::new()));
    };
    let alpha = normal_alpha(line.rho);
    let bank = ResponseBank::for_sweep(image, params, &[alpha])?;
    let votes = votes_along(&bank, params, alpha, &trace);
    Ok((Some(trace), votes))
}

/// Per-stencil symmetry vote: the positive real part of the coefficient,
/// which on an exact mirror axis equals `|I_v|²`.
fn votes_along(bank: &ResponseBank, params: &SweepParams, alpha: f64, trace: &LineTrace) -> Vec<Vec<f64>> {
    let configs: Vec<StencilConfig> = params
        .inner_configs()
        .map(|(beta, d)| StencilConfig { alpha, beta, d })
        .collect();
    (0..trace.len())
        .map(|t| {
            let (px, py) = trace.point(t as f64);
            let (px, py) = (px.round() as isize, py.round() as isize);
            configs
                .iter()
                .map(|cfg| {
                    let (iv, iw) = bank.pair(cfg);
                    let (ox, oy) = cfg.offset();
                    (iv.get_or_zero(px + ox, py + oy) * iw.get_or_zero(px - ox, py - oy).conj())
                        .re
                        .max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Sum of the `k` largest values (all of them when fewer than `k`).
pub fn top_k_sum(values: &[f64], k: usize) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.iter().take(k).sum()
}

/// Number of strongest stencil votes kept per point by the robust statistic.
pub const ROBUST_TOP_K: usize = 5;

/// Rescores candidate lines by the robust along-line statistic: for every
/// sample on the line, the mean of the five strongest perpendicular stencil
/// votes, summed over the line. Sorted by the new score, descending.
pub fn refine_line_scores(
    image: &Image,
    candidates: &[SymmetryLine],
    params: &SweepParams,
) -> Result<Vec<SymmetryLine>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    params.validate()?;
    let alphas: Vec<f64> = candidates.iter().map(|l| normal_alpha(l.rho)).collect();
    let bank = ResponseBank::for_sweep(image, params, &alphas)?;
    let mut rescored: Vec<SymmetryLine> = candidates
        .par_iter()
        .zip(&alphas)
        .map(|(line, &alpha)| {
            let score = match LineTrace::new(line.rho, line.delta, image.width(), image.height()) {
                Some(trace) => votes_along(&bank, params, alpha, &trace)
                    .iter()
                    .map(|v| top_k_sum(v, ROBUST_TOP_K) / v.len().min(ROBUST_TOP_K) as f64)
                    .sum(),
                None => 0.0,
            };
            SymmetryLine { score, ..*line }
        })
        .collect();
    rescored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.rho.total_cmp(&b.rho))
            .then(a.delta.total_cmp(&b.delta))
    });
    Ok(rescored)
}
