//! Brute-force reference implementations shared by the integration tests.
//! Everything here works pixel by pixel from the defining formulas and does
//! not touch the FFT convolution, shifted products or accumulator binning.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symconv::wavelets::{make_morlet, MorletKernel};
use symconv::{Image, WaveletGeometry};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(width: usize, height: usize, seed: u64) -> Image {
    let mut r = rng(seed);
    Image::from_fn(width, height, |_, _| r.gen::<f64>()).unwrap()
}

pub fn mean(img: &Image) -> f64 {
    img.pixels().iter().sum::<f64>() / img.pixels().len() as f64
}

/// `Σ_q J(p − q) k(q)` where `J = I − fill` inside the image and 0 outside.
pub fn naive_response(img: &Image, k: &MorletKernel, px: isize, py: isize, fill: f64) -> Complex64 {
    let r = (k.support() / 2) as isize;
    let mut acc = Complex64::new(0.0, 0.0);
    for qy in -r..=r {
        for qx in -r..=r {
            let (x, y) = (px - qx, py - qy);
            if x < 0 || y < 0 || x >= img.width() as isize || y >= img.height() as isize {
                continue;
            }
            let kv = k.values()[((qy + r) as usize) * k.support() + (qx + r) as usize];
            acc += kv * (img.get(x as usize, y as usize) - fill);
        }
    }
    acc
}

/// Direct 2D convolution over the whole image, zero padded.
pub fn naive_convolve(img: &Image, k: &MorletKernel) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(img.width() * img.height());
    for y in 0..img.height() as isize {
        for x in 0..img.width() as isize {
            out.push(naive_response(img, k, x, y, 0.0));
        }
    }
    out
}

fn inside(img: &Image, x: isize, y: isize) -> bool {
    x >= 0 && y >= 0 && x < img.width() as isize && y < img.height() as isize
}

/// Stencil kernels placed explicitly: `v` carrier at `α + β`, `w` its mirror
/// across the axis at `α + π/2`, i.e. carrier `α + π − β`.
pub fn oracle_kernels(alpha: f64, beta: f64, geom: &WaveletGeometry) -> (MorletKernel, MorletKernel) {
    let v = make_morlet(alpha + beta, geom.wavelength, geom.envelope_sigma, geom.support).unwrap();
    let w = make_morlet(alpha + PI - beta, geom.wavelength, geom.envelope_sigma, geom.support).unwrap();
    (v, w)
}

/// Stencil coefficient at `p` for one `(α, β, d)`, both ends evaluated by
/// direct summation. Ends outside the image contribute 0.
pub fn naive_coefficient(
    img: &Image,
    kernels: &(MorletKernel, MorletKernel),
    alpha: f64,
    d: f64,
    px: isize,
    py: isize,
    fill: f64,
) -> Complex64 {
    let ox = (0.5 * d * alpha.cos()).round() as isize;
    let oy = (0.5 * d * alpha.sin()).round() as isize;
    let (vx, vy) = (px + ox, py + oy);
    let (wx, wy) = (px - ox, py - oy);
    if !inside(img, vx, vy) || !inside(img, wx, wy) {
        return Complex64::new(0.0, 0.0);
    }
    naive_response(img, &kernels.0, vx, vy, fill) * naive_response(img, &kernels.1, wx, wy, fill).conj()
}

/// Brute-force line accumulator: loops over `(p, α, β, d)` with explicit
/// kernel placement. Layout: `n_alpha` rows of ρ starting at
/// `π/2 − ⌊n/2⌋π/n`, `2D + 1` columns of 1 px δ with `D = ⌈diagonal⌉`.
pub fn naive_accumulate_lines(
    img: &Image,
    n_alpha: usize,
    betas: &[f64],
    distances: &[f64],
    exponent: f64,
    geom: &WaveletGeometry,
    fill: f64,
) -> (usize, Vec<f64>) {
    let dmax = (img.width() as f64).hypot(img.height() as f64).ceil() as usize;
    let cols = 2 * dmax + 1;
    let mut votes = vec![0.0; n_alpha * cols];
    let step = PI / n_alpha as f64;
    let rho0 = PI / 2.0 - (n_alpha / 2) as f64 * step;
    for k in 0..n_alpha {
        let alpha = k as f64 * step;
        let kernels: Vec<_> = betas.iter().map(|&b| oracle_kernels(alpha, b, geom)).collect();
        let mut rho = alpha + PI / 2.0;
        let mut sign = 1.0;
        if rho >= PI - 1e-12 {
            rho -= PI;
            sign = -1.0;
        }
        let row = ((rho - rho0) / step).round() as usize;
        for py in 0..img.height() as isize {
            for px in 0..img.width() as isize {
                let mut sum = Complex64::new(0.0, 0.0);
                for ks in &kernels {
                    for &d in distances {
                        sum += naive_coefficient(img, ks, alpha, d, px, py, fill);
                    }
                }
                let delta = sign * (px as f64 * alpha.cos() + py as f64 * alpha.sin());
                let col = (delta.round() + dmax as f64) as usize;
                votes[row * cols + col] += sum.norm().powf(exponent);
            }
        }
    }
    (dmax, votes)
}

/// Brute-force center likelihood `|Σ_(α,d) c|^n` with β = 0.
pub fn naive_centers(
    img: &Image,
    n_alpha: usize,
    distances: &[f64],
    exponent: f64,
    geom: &WaveletGeometry,
    fill: f64,
) -> Vec<f64> {
    let alphas: Vec<f64> = (0..n_alpha).map(|k| k as f64 * PI / n_alpha as f64).collect();
    let kernels: Vec<_> = alphas.iter().map(|&a| oracle_kernels(a, 0.0, geom)).collect();
    let mut out = Vec::new();
    for py in 0..img.height() as isize {
        for px in 0..img.width() as isize {
            let mut sum = Complex64::new(0.0, 0.0);
            for (a, ks) in alphas.iter().zip(&kernels) {
                for &d in distances {
                    sum += naive_coefficient(img, ks, *a, d, px, py, fill);
                }
            }
            out.push(sum.norm().powf(exponent));
        }
    }
    out
}

/// Relative bin error with a floor tied to the largest bin.
pub fn max_relative_error(got: &[f64], want: &[f64]) -> f64 {
    let top = want.iter().copied().fold(0.0, f64::max);
    let floor = 1e-12 * top.max(1e-300);
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs().max(floor))
        .fold(0.0, f64::max)
}
