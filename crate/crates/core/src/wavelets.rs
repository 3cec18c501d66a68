//! Complex Morlet kernels for the stencil ends and the 1D Haar kernel used
//! for segment endpoint localization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Shape parameters shared by every Morlet kernel in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletGeometry {
    /// Carrier wavelength in pixels.
    pub wavelength: f64,
    /// Standard deviation of the isotropic Gaussian envelope in pixels.
    pub envelope_sigma: f64,
    /// Odd side length of the sampled kernel grid.
    pub support: usize,
}

impl Default for WaveletGeometry {
    fn default() -> Self {
        Self {
            wavelength: 8.0,
            envelope_sigma: 4.0,
            support: 17,
        }
    }
}

impl WaveletGeometry {
    pub fn kernel(&self, angle: f64) -> Result<MorletKernel> {
        make_morlet(angle, self.wavelength, self.envelope_sigma, self.support)
    }
}

/// A zero-mean, unit-energy complex Morlet kernel.
///
/// `values` is a `support × support` grid stored row-major; the entry at
/// `(row, col)` samples the offset `(col - r, row - r)` from the kernel
/// center with `r = support / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MorletKernel {
    angle: f64,
    support: usize,
    values: Vec<Complex64>,
}

impl MorletKernel {
    /// Carrier direction in radians, normalized to `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn support(&self) -> usize {
        self.support
    }

    /// Half-width of the kernel grid.
    pub fn radius(&self) -> usize {
        self.support / 2
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at pixel offset `(dx, dy)` from the center, zero outside the grid.
    pub fn at_offset(&self, dx: isize, dy: isize) -> Complex64 {
        let r = self.radius() as isize;
        if dx.abs() > r || dy.abs() > r {
            return Complex64::new(0.0, 0.0);
        }
        let col = (dx + r) as usize;
        let row = (dy + r) as usize;
        self.values[row * self.support + col]
    }
}

/// Builds `C · g(u) · (exp(i·2π/λ·⟨u, (cos θ, sin θ)⟩) − κ)` with a Gaussian
/// envelope `g`, where `κ` removes the envelope-weighted DC term and `C`
/// normalizes the energy to one.
pub fn make_morlet(
    angle: f64,
    wavelength: f64,
    envelope_sigma: f64,
    support: usize,
) -> Result<MorletKernel> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(invalid(format!("wavelength must be positive, got {wavelength}")));
    }
    if !(envelope_sigma > 0.0 && envelope_sigma.is_finite()) {
        return Err(invalid(format!(
            "envelope sigma must be positive, got {envelope_sigma}"
        )));
    }
    if support < 3 || support % 2 == 0 {
        return Err(invalid(format!("support must be odd and >= 3, got {support}")));
    }
    if !angle.is_finite() {
        return Err(invalid("angle must be finite"));
    }

    let angle = angle.rem_euclid(2.0 * PI);
    let wavenumber = 2.0 * PI / wavelength;
    let (sin, cos) = angle.sin_cos();
    let center = (support / 2) as f64;
    let two_var = 2.0 * envelope_sigma * envelope_sigma;

    let mut envelope = Vec::with_capacity(support * support);
    let mut carrier = Vec::with_capacity(support * support);
    for row in 0..support {
        let uy = row as f64 - center;
        for col in 0..support {
            let ux = col as f64 - center;
            envelope.push((-(ux * ux + uy * uy) / two_var).exp());
            carrier.push(Complex64::from_polar(1.0, wavenumber * (ux * cos + uy * sin)));
        }
    }

    let env_sum: f64 = envelope.iter().sum();
    let weighted: Complex64 = envelope.iter().zip(&carrier).map(|(g, c)| c * g).sum();
    let kappa = weighted / env_sum;

    let mut values: Vec<Complex64> = envelope
        .iter()
        .zip(&carrier)
        .map(|(g, c)| (c - kappa) * g)
        .collect();
    let energy: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let scale = energy.sqrt().recip();
    values.iter_mut().for_each(|v| *v *= scale);

    Ok(MorletKernel {
        angle,
        support,
        values,
    })
}

/// Antisymmetric step kernel: `+1/size` on the first half, `-1/size` on the second.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarKernel {
    values: Vec<f64>,
}

impl HaarKernel {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the kernel origin used by [`HaarKernel::convolve`].
    pub fn origin(&self) -> usize {
        self.size() / 2 - 1
    }

    /// Zero-padded, same-length convolution
    /// `out[t] = Σ_j k[j] · x[t + origin − j]`.
    ///
    /// With this alignment a step rising at index `e` (`x[i] = 1` for
    /// `i >= e`) produces its maximum exactly at `t = e`.
    pub fn convolve(&self, signal: &[f64]) -> Vec<f64> {
        let origin = self.origin() as isize;
        let n = signal.len() as isize;
        (0..n)
            .map(|t| {
                self.values
                    .iter()
                    .enumerate()
                    .filter_map(|(j, k)| {
                        let i = t + origin - j as isize;
                        (0..n).contains(&i).then(|| k * signal[i as usize])
                    })
                    .sum()
            })
            .collect()
    }
}

pub fn make_haar(size: usize) -> Result<HaarKernel> {
    if size < 2 || size % 2 != 0 {
        return Err(invalid(format!("haar size must be even and >= 2, got {size}")));
    }
    let w = 1.0 / size as f64;
    let values = (0..size).map(|i| if i < size / 2 { w } else { -w }).collect();
    Ok(HaarKernel { values })
}
