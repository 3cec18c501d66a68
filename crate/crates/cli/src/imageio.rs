use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::imageops::{self, FilterType};
use image::{ImageBuffer, ImageError, Luma};
use symconv::Image;

use crate::error::{CliError, Result};

/// Reads a PNG or PGM file as grayscale in [0, 1] (unweighted channel
/// average) and shrinks it so its larger side is at most `resize_max`,
/// keeping the aspect ratio. Returns the image and the applied scale factor.
pub fn load_image(path: &Path, resize_max: usize) -> Result<(Image, f64)> {
    let decoded = image::open(path).map_err(|e| match e {
        ImageError::IoError(io) => CliError::io(path, io),
        other => CliError::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let rgb = decoded.to_rgb32f();
    let (w, h) = rgb.dimensions();
    let gray: ImageBuffer<Luma<f32>, Vec<f32>> = ImageBuffer::from_fn(w, h, |x, y| {
        let p = rgb.get_pixel(x, y).0;
        Luma([(p[0] + p[1] + p[2]) / 3.0])
    });

    let longest = w.max(h) as usize;
    let (gray, scale) = if longest > resize_max {
        let scale = resize_max as f64 / longest as f64;
        let nw = ((w as f64 * scale).round() as u32).max(1);
        let nh = ((h as f64 * scale).round() as u32).max(1);
        (imageops::resize(&gray, nw, nh, FilterType::Triangle), scale)
    } else {
        (gray, 1.0)
    };

    let (w, h) = gray.dimensions();
    let pixels = gray
        .into_raw()
        .into_iter()
        .map(|v| f64::from(v).clamp(0.0, 1.0))
        .collect();
    Ok((Image::new(w as usize, h as usize, pixels)?, scale))
}

/// Writes `values` as a binary 16-bit PGM, linearly rescaled so the
/// maximum maps to 65535.
pub fn write_pgm16(path: &Path, width: usize, height: usize, values: &[f64]) -> Result<()> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut out = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    let mut bytes = format!("P5\n{width} {height}\n65535\n").into_bytes();
    bytes.reserve(values.len() * 2);
    for &v in values {
        let level = if max > 0.0 {
            (v.max(0.0) / max * 65535.0).round() as u16
        } else {
            0
        };
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    out.write_all(&bytes)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}
