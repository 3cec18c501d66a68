//! Synthetic images with analytically known symmetry axes and centers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conv::Image;
use crate::error::Result;
use crate::geometry::Point;

/// Smooth random texture: a sum of Gaussian blobs of mixed sign.
#[derive(Debug, Clone)]
pub struct BlobTexture {
    blobs: Vec<(f64, f64, f64, f64)>,
}

impl BlobTexture {
    pub fn random(width: usize, height: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blobs = (0..count)
            .map(|_| {
                let x = rng.gen_range(-4.0..width as f64 + 4.0);
                let y = rng.gen_range(-4.0..height as f64 + 4.0);
                let sigma = rng.gen_range(1.5..4.0);
                let amp = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.0);
                (x, y, sigma, amp)
            })
            .collect();
        Self { blobs }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.blobs
            .iter()
            .map(|&(bx, by, s, a)| {
                let r2 = (x - bx).powi(2) + (y - by).powi(2);
                a * (-r2 / (2.0 * s * s)).exp()
            })
            .sum()
    }
}

/// Reflection of `p` across the line through `through` with direction angle `angle`.
pub fn reflect(p: Point, through: Point, angle: f64) -> Point {
    let (sin, cos) = angle.sin_cos();
    let (dx, dy) = (p.x - through.x, p.y - through.y);
    let along = dx * cos + dy * sin;
    let (px, py) = (along * cos, along * sin);
    Point::new(through.x + 2.0 * px - dx, through.y + 2.0 * py - dy)
}

fn normalize(values: Vec<f64>, width: usize, height: usize) -> Result<Image> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    Image::new(width, height, values.into_iter().map(|v| (v - lo) / span).collect())
}

/// Random texture made exactly mirror-symmetric about the line through
/// `through` with direction `axis_angle`; values in `[0, 1]`.
pub fn mirrored_texture(
    width: usize,
    height: usize,
    through: Point,
    axis_angle: f64,
    seed: u64,
) -> Result<Image> {
    let tex = BlobTexture::random(width, height, width * height / 24, seed);
    let values = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x, y)))
        .map(|(x, y)| {
            let p = Point::new(x as f64, y as f64);
            let m = reflect(p, through, axis_angle);
            tex.eval(p.x, p.y) + tex.eval(m.x, m.y)
        })
        .collect();
    normalize(values, width, height)
}

/// Mirrored texture confined to rows `rows.0..=rows.1`, symmetric about the
/// vertical line `x = axis_x`. Zero elsewhere.
pub fn mirrored_strip(
    width: usize,
    height: usize,
    rows: (usize, usize),
    axis_x: f64,
    seed: u64,
) -> Result<Image> {
    let tex = BlobTexture::random(width, height, width * height / 24, seed);
    let inside: Vec<f64> = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x, y)))
        .map(|(x, y)| {
            let (x, y) = (x as f64, y as f64);
            tex.eval(x, y) + tex.eval(2.0 * axis_x - x, y)
        })
        .collect();
    let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    Image::from_fn(width, height, |x, y| {
        if (rows.0..=rows.1).contains(&y) {
            0.1 + 0.9 * (inside[y * width + x] - lo) / span
        } else {
            0.0
        }
    })
}

/// Fraction of each pixel covered by `inside`, from 4×4 supersampling.
fn coverage(width: usize, height: usize, inside: impl Fn(f64, f64) -> bool) -> Result<Image> {
    const N: usize = 4;
    Image::from_fn(width, height, |x, y| {
        let mut hits = 0;
        for sy in 0..N {
            for sx in 0..N {
                let px = x as f64 - 0.5 + (sx as f64 + 0.5) / N as f64;
                let py = y as f64 - 0.5 + (sy as f64 + 0.5) / N as f64;
                if inside(px, py) {
                    hits += 1;
                }
            }
        }
        hits as f64 / (N * N) as f64
    })
}

/// Bright anti-aliased disks on a black background.
pub fn disks(width: usize, height: usize, disks: &[(Point, f64)]) -> Result<Image> {
    coverage(width, height, |x, y| {
        disks
            .iter()
            .any(|(c, r)| (x - c.x).powi(2) + (y - c.y).powi(2) <= r * r)
    })
}

/// Bright axis-aligned rectangle `[x0, x1] × [y0, y1]` on black.
pub fn rectangle(width: usize, height: usize, x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Image> {
    coverage(width, height, |x, y| x >= x0 && x <= x1 && y >= y0 && y <= y1)
}
