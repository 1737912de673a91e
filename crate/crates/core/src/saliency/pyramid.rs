//! Gaussian pyramids and the intensity channel.

use crate::filter::convolve_separable;
use crate::image::{ImageBuffer, RgbImage};
use crate::{Error, Result};

/// Number of pyramid levels, scales 0 through 8.
pub const LEVELS: usize = 9;

/// Nine-level dyadic pyramid. Level `k` is `ceil(W / 2^k)` × `ceil(H / 2^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pyramid {
    levels: Vec<ImageBuffer>,
}

impl Pyramid {
    pub(crate) fn from_levels(levels: Vec<ImageBuffer>) -> Self {
        debug_assert_eq!(levels.len(), LEVELS);
        Self { levels }
    }

    pub fn level(&self, k: usize) -> &ImageBuffer {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[ImageBuffer] {
        &self.levels
    }

    pub fn base_dims(&self) -> (usize, usize) {
        self.levels[0].dims()
    }

    /// Applies `f` to every level.
    pub fn map_levels(&self, f: impl Fn(&ImageBuffer) -> ImageBuffer) -> Self {
        Self {
            levels: self.levels.iter().map(f).collect(),
        }
    }
}

/// Per-pixel mean of the three channels.
pub fn intensity_image(img: &RgbImage) -> Result<ImageBuffer> {
    let (w, h) = img.dims();
    if w == 0 || h == 0 {
        return Err(Error::invalid("zero-sized image"));
    }
    let data = img
        .red()
        .iter()
        .zip(img.green())
        .zip(img.blue())
        .map(|((r, g), b)| (r + g + b) / 3.0)
        .collect();
    ImageBuffer::from_vec(w, h, data)
}

/// Normalizes kernel weights to unit sum.
pub(crate) fn normalized_taps(kernel: &[f64]) -> Vec<f64> {
    let sum: f64 = kernel.iter().sum();
    kernel.iter().map(|k| k / sum).collect()
}

/// Low-pass filters with `kernel` (separable, clamped borders) and keeps
/// every other sample, starting at index 0.
pub fn reduce(buf: &ImageBuffer, kernel: &[f64]) -> ImageBuffer {
    let blurred = convolve_separable(buf, kernel);
    let (w, h) = buf.dims();
    ImageBuffer::from_fn(w.div_ceil(2), h.div_ceil(2), |x, y| {
        blurred.get(2 * x, 2 * y)
    })
}

/// Builds the nine-level pyramid by repeated filter-then-decimate.
/// `kernel` is normalized before use.
pub fn build_gaussian_pyramid(buf: &ImageBuffer, kernel: &[f64]) -> Result<Pyramid> {
    if buf.is_empty() {
        return Err(Error::invalid("cannot build a pyramid of an empty buffer"));
    }
    if kernel.len() % 2 == 0 || kernel.iter().sum::<f64>() <= 0.0 {
        return Err(Error::invalid(
            "downsampling kernel needs odd length and positive sum",
        ));
    }
    let taps = normalized_taps(kernel);
    let mut levels = Vec::with_capacity(LEVELS);
    levels.push(buf.clone());
    for k in 1..LEVELS {
        let next = reduce(&levels[k - 1], &taps);
        levels.push(next);
    }
    Ok(Pyramid::from_levels(levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::level_dims;

    const BINOMIAL: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];

    #[test]
    fn intensity_is_channel_mean() {
        let img = RgbImage::from_fn(2, 1, |x, _| {
            if x == 0 {
                [0.3, 0.6, 0.9]
            } else {
                [0.0, 0.0, 0.0]
            }
        })
        .unwrap();
        let i = intensity_image(&img).unwrap();
        assert!((i.get(0, 0) - 0.6).abs() < 1e-15);
        assert_eq!(i.get(1, 0), 0.0);
    }

    #[test]
    fn constant_image_stays_constant() {
        let p = build_gaussian_pyramid(&ImageBuffer::filled(37, 21, 0.7), &BINOMIAL).unwrap();
        for lvl in p.levels() {
            assert!(lvl.data().iter().all(|&v| (v - 0.7).abs() < 1e-14));
        }
    }

    #[test]
    fn level_dims_follow_ceil_halving() {
        let p = build_gaussian_pyramid(&ImageBuffer::new(640, 480), &BINOMIAL).unwrap();
        assert_eq!(p.level(4).dims(), (40, 30));
        for k in 0..LEVELS {
            assert_eq!(p.level(k).dims(), level_dims(640, 480, k as u32));
        }
        let tiny = build_gaussian_pyramid(&ImageBuffer::new(5, 3), &BINOMIAL).unwrap();
        assert_eq!(tiny.level(8).dims(), (1, 1));
    }

    #[test]
    fn impulse_level_one_matches_direct_filter() {
        // Direct 2-D convolution with the outer-product kernel, clamped
        // borders, then even-sample decimation.
        let mut src = ImageBuffer::new(32, 32);
        src.set(13, 18, 1.0);
        let p = build_gaussian_pyramid(&src, &BINOMIAL).unwrap();
        let w1 = |i: isize| BINOMIAL[(i + 2) as usize] / 16.0;
        for y in 0..16 {
            for x in 0..16 {
                let mut acc = 0.0;
                for dy in -2..=2isize {
                    for dx in -2..=2isize {
                        let sx = (2 * x as isize + dx).clamp(0, 31) as usize;
                        let sy = (2 * y as isize + dy).clamp(0, 31) as usize;
                        acc += w1(dx) * w1(dy) * src.get(sx, sy);
                    }
                }
                assert!((p.level(1).get(x, y) - acc).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bad_kernel_rejected() {
        let b = ImageBuffer::new(8, 8);
        assert!(build_gaussian_pyramid(&b, &[1.0, 1.0]).is_err());
        assert!(build_gaussian_pyramid(&b, &[0.0]).is_err());
    }
}
