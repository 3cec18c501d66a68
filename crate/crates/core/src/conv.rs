//! Image containers, 2D complex convolution and the shifted conjugate
//! product used by the block-based stencil evaluation.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::wavelets::MorletKernel;

/// Single-channel real image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("image must be non-empty, got {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(invalid(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(invalid("image contains non-finite values"));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel in row-major order.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Pixel value with zero outside the image.
    pub fn get_or_zero(&self, x: isize, y: isize) -> f64 {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            0.0
        } else {
            self.pixels[y as usize * self.width + x as usize]
        }
    }

    /// Length of the image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        (self.width as f64).hypot(self.height as f64)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.width, self.height, self.pixels.iter().map(|&v| f(v)).collect())
    }

    /// Rotates the image content by 90° so that `(x, y)` moves to `(h - 1 - y, x)`.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut pixels = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (nx, ny) = (h - 1 - y, x);
                pixels[ny * h + nx] = self.get(x, y);
            }
        }
        Self {
            width: h,
            height: w,
            pixels,
        }
    }
}

/// Complex grid with the dimensions of the image it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMap {
    width: usize,
    height: usize,
    values: Vec<Complex64>,
}

impl ComplexMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![Complex64::new(0.0, 0.0); width * height],
        }
    }

    pub fn new(width: usize, height: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(invalid(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                values.len()
            )));
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

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.values[y * self.width + x]
    }

    /// Value with zero outside the grid.
    pub fn get_or_zero(&self, x: isize, y: isize) -> Complex64 {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[y as usize * self.width + x as usize]
        }
    }

    pub fn add_assign(&mut self, other: &ComplexMap) -> Result<()> {
        check_same(self.dimensions(), other.dimensions())?;
        self.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }
}

/// How convolution treats pixels beyond the image border.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderMode {
    /// Pixels outside the image are zero.
    #[default]
    Zero,
    /// Pixels outside the image equal the image mean. Implemented as zero
    /// padding of the mean-removed image; with zero-mean kernels the result
    /// differs from [`BorderMode::Zero`] only within a kernel radius of the
    /// border.
    Mean,
    /// The image wraps around (periodic extension).
    Circular,
}

fn check_same(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// Smallest integer `>= n` whose only prime factors are 2, 3, 5 and 7.
fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

struct Fft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    fn process(&self, data: &mut [Complex64], inverse: bool) {
        let (row, col) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        row.process(data);
        let mut column = vec![Complex64::new(0.0, 0.0); self.height];
        for x in 0..self.width {
            for (y, c) in column.iter_mut().enumerate() {
                *c = data[y * self.width + x];
            }
            col.process(&mut column);
            for (y, c) in column.iter().enumerate() {
                data[y * self.width + x] = *c;
            }
        }
        if inverse {
            let norm = 1.0 / (self.width * self.height) as f64;
            data.iter_mut().for_each(|v| *v *= norm);
        }
    }
}

/// Convolves one image with many kernels, reusing the image spectrum.
pub struct Convolver {
    width: usize,
    height: usize,
    border: BorderMode,
    fft: Fft2,
    spectrum: Vec<Complex64>,
    max_support: usize,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("border", &self.border)
            .field("padded", &(self.fft.width, self.fft.height))
            .finish()
    }
}

impl Convolver {
    /// Prepares convolution of `image` with kernels of side at most `max_support`.
    pub fn new(image: &Image, max_support: usize, border: BorderMode) -> Result<Self> {
        let (w, h) = image.dimensions();
        if max_support > w.min(h) {
            return Err(invalid(format!(
                "kernel support {max_support} exceeds image size {w}x{h}"
            )));
        }
        let (pw, ph) = match border {
            BorderMode::Zero | BorderMode::Mean => (
                fast_len(w + max_support - 1),
                fast_len(h + max_support - 1),
            ),
            BorderMode::Circular => (w, h),
        };
        let fft = Fft2::new(pw, ph);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); pw * ph];
        let fill = match border {
            BorderMode::Mean => image.pixels().iter().sum::<f64>() / (w * h) as f64,
            BorderMode::Zero | BorderMode::Circular => 0.0,
        };
        for y in 0..h {
            for x in 0..w {
                spectrum[y * pw + x] = Complex64::new(image.get(x, y) - fill, 0.0);
            }
        }
        fft.process(&mut spectrum, false);
        Ok(Self {
            width: w,
            height: h,
            border,
            fft,
            spectrum,
            max_support,
        })
    }

    pub fn border(&self) -> BorderMode {
        self.border
    }

    /// Same-size convolution `out(p) = Σ_q I(p − q) · k(q)` with `q` measured
    /// from the kernel center.
    pub fn convolve(&self, kernel: &MorletKernel) -> Result<ComplexMap> {
        let support = kernel.support();
        if support > self.max_support {
            return Err(invalid(format!(
                "kernel support {support} exceeds prepared maximum {}",
                self.max_support
            )));
        }
        let (pw, ph) = (self.fft.width, self.fft.height);
        let r = kernel.radius();
        let mut buf = vec![Complex64::new(0.0, 0.0); pw * ph];
        for ky in 0..support {
            for kx in 0..support {
                let v = kernel.values()[ky * support + kx];
                // Zero mode: full linear convolution, cropped by r below.
                // Circular mode: center the kernel at the origin with wrap.
                let (x, y) = match self.border {
                    BorderMode::Zero | BorderMode::Mean => (kx, ky),
                    BorderMode::Circular => (
                        (kx + pw - r) % pw,
                        (ky + ph - r) % ph,
                    ),
                };
                buf[y * pw + x] += v;
            }
        }
        self.fft.process(&mut buf, false);
        buf.iter_mut().zip(&self.spectrum).for_each(|(k, s)| *k *= s);
        self.fft.process(&mut buf, true);

        let shift = match self.border {
            BorderMode::Zero | BorderMode::Mean => r,
            BorderMode::Circular => 0,
        };
        let mut values = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            let start = (y + shift) * pw + shift;
            values.extend_from_slice(&buf[start..start + self.width]);
        }
        ComplexMap::new(self.width, self.height, values)
    }
}

/// Convolves `image` with `kernel` under zero padding.
pub fn convolve(image: &Image, kernel: &MorletKernel) -> Result<ComplexMap> {
    convolve_with_border(image, kernel, BorderMode::Zero)
}

pub fn convolve_with_border(
    image: &Image,
    kernel: &MorletKernel,
    border: BorderMode,
) -> Result<ComplexMap> {
    Convolver::new(image, kernel.support(), border)?.convolve(kernel)
}

/// `out(p) = a(p + offset) · conj(b(p − offset))`, zero where either read
/// falls outside the grid.
pub fn shifted_product(
    a: &ComplexMap,
    b: &ComplexMap,
    offset: (isize, isize),
) -> Result<ComplexMap> {
    let mut out = ComplexMap::zeros(a.width, a.height);
    add_shifted_product(a, b, offset, &mut out)?;
    Ok(out)
}

/// Adds `shifted_product(a, b, offset)` into `acc` without allocating.
pub fn add_shifted_product(
    a: &ComplexMap,
    b: &ComplexMap,
    offset: (isize, isize),
    acc: &mut ComplexMap,
) -> Result<()> {
    check_same(a.dimensions(), b.dimensions())?;
    check_same(a.dimensions(), acc.dimensions())?;
    let (w, h) = (a.width as isize, a.height as isize);
    let (dx, dy) = offset;
    // Both p + o and p − o must be inside [0, w) × [0, h).
    let x0 = dx.abs();
    let x1 = w - dx.abs();
    let y0 = dy.abs();
    let y1 = h - dy.abs();
    if x0 >= x1 || y0 >= y1 {
        return Ok(());
    }
    let width = a.width;
    for y in y0..y1 {
        let ra = ((y + dy) as usize) * width;
        let rb = ((y - dy) as usize) * width;
        let ro = (y as usize) * width;
        for x in x0..x1 {
            let va = a.values[ra + (x + dx) as usize];
            let vb = b.values[rb + (x - dx) as usize];
            acc.values[ro + x as usize] += va * vb.conj();
        }
    }
    Ok(())
}
