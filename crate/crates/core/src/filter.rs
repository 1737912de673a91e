//! Linear filtering with clamp-to-edge borders.
//!
//! Kernels are applied as correlation. Every kernel used in the crate is
//! point-symmetric, so this coincides with convolution.

use crate::image::ImageBuffer;
use rayon::prelude::*;

/// Square 2-D kernel with odd side length, row-major taps.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2d {
    size: usize,
    taps: Vec<f64>,
}

impl Kernel2d {
    pub fn new(size: usize, taps: Vec<f64>) -> Self {
        assert!(size % 2 == 1, "kernel side must be odd");
        assert_eq!(taps.len(), size * size);
        Self { size, taps }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    /// Tap at offset `(dx, dy)` from the kernel center.
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius() as isize;
        self.taps[((dy + r) as usize) * self.size + (dx + r) as usize]
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Separable filtering: `taps` horizontally, then vertically.
pub fn convolve_separable(src: &ImageBuffer, taps: &[f64]) -> ImageBuffer {
    let (w, h) = src.dims();
    let r = (taps.len() / 2) as isize;
    let mut tmp = ImageBuffer::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                acc += t * src.get(clamp_index(x as isize + k as isize - r, w), y);
            }
            tmp.set(x, y, acc);
        }
    }
    let mut out = ImageBuffer::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                acc += t * tmp.get(x, clamp_index(y as isize + k as isize - r, h));
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Full 2-D filtering, parallel over rows. The per-pixel sum order is fixed,
/// so the result does not depend on the thread count.
pub fn convolve_2d(src: &ImageBuffer, kernel: &Kernel2d) -> ImageBuffer {
    let (w, h) = src.dims();
    let r = kernel.radius() as isize;
    let size = kernel.size();
    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut row = Vec::with_capacity(w);
            for x in 0..w {
                let mut acc = 0.0;
                for ky in 0..size {
                    let sy = clamp_index(y as isize + ky as isize - r, h);
                    for kx in 0..size {
                        let sx = clamp_index(x as isize + kx as isize - r, w);
                        acc += kernel.taps[ky * size + kx] * src.get(sx, sy);
                    }
                }
                row.push(acc);
            }
            row
        })
        .collect();
    ImageBuffer::from_vec(w, h, rows.concat()).expect("row lengths match")
}

/// Normalized 1-D Gaussian taps truncated at `truncate` standard deviations.
pub fn gaussian_taps(sigma: f64, truncate: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (truncate * sigma).ceil().max(1.0) as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_preserves_constant() {
        let src = ImageBuffer::filled(7, 5, 0.4);
        let out = convolve_separable(&src, &[1.0 / 16.0, 0.25, 0.375, 0.25, 1.0 / 16.0]);
        assert!(out.data().iter().all(|&v| (v - 0.4).abs() < 1e-15));
    }

    #[test]
    fn impulse_reproduces_kernel() {
        let taps: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let k = Kernel2d::new(3, taps);
        let mut src = ImageBuffer::new(7, 7);
        src.set(3, 3, 1.0);
        let out = convolve_2d(&src, &k);
        // Correlation mirrors the kernel around the impulse.
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let v = out.get((3 + dx) as usize, (3 + dy) as usize);
                assert_eq!(v, k.at(-dx, -dy));
            }
        }
    }

    #[test]
    fn gaussian_taps_are_normalized_and_truncated() {
        let t = gaussian_taps(2.0, 3.0);
        assert_eq!(t.len(), 13);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(t[0], t[12]);
    }
}
