//! Raster types shared by every stage, plus the pyramid-aware bilinear
//! resampler.
//!
//! Coordinates are pixel indices, row-major, origin at the top-left. Sample
//! `j` of pyramid level `k` sits on sample `2^k * j` of level 0, and the
//! resampler follows the same convention so maps from different levels stay
//! registered.

use crate::{Error, Result};

/// Single-channel floating point raster.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "buffer holds {} samples, expected {width}x{height}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Location of the largest sample; ties go to the first in row-major
    /// order.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.data.iter().enumerate() {
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((i, v)),
            }
        }
        best.map(|(i, _)| (i % self.width, i / self.width))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two equally sized buffers.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mirror_horizontal(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| {
            self.get(self.width - 1 - x, y)
        })
    }
}

/// RGB raster with one plane per channel, samples in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    r: Vec<f64>,
    g: Vec<f64>,
    b: Vec<f64>,
}

impl RgbImage {
    pub fn from_planes(
        width: usize,
        height: usize,
        r: Vec<f64>,
        g: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        let n = width * height;
        if n == 0 {
            return Err(Error::invalid("zero-sized image"));
        }
        for (name, plane) in [("r", &r), ("g", &g), ("b", &b)] {
            if plane.len() != n {
                return Err(Error::invalid(format!(
                    "{name} plane holds {} samples, expected {width}x{height}",
                    plane.len()
                )));
            }
            if plane.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::invalid(format!(
                    "{name} plane has samples outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            r,
            g,
            b,
        })
    }

    /// Builds an image from a per-pixel colour function. Colours are clamped
    /// to `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let n = width * height;
        let (mut r, mut g, mut b) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for y in 0..height {
            for x in 0..width {
                let [pr, pg, pb] = f(x, y);
                r.push(pr.clamp(0.0, 1.0));
                g.push(pg.clamp(0.0, 1.0));
                b.push(pb.clamp(0.0, 1.0));
            }
        }
        Self::from_planes(width, height, r, g, b)
    }

    pub fn gray(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::from_fn(width, height, |_, _| [value; 3])
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::invalid("RGB byte buffer has the wrong length"));
        }
        let plane = |c: usize| {
            bytes
                .chunks_exact(3)
                .map(|px| f64::from(px[c]) / 255.0)
                .collect::<Vec<_>>()
        };
        Self::from_planes(width, height, plane(0), plane(1), plane(2))
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        let q = |v: f64| (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8;
        let mut out = Vec::with_capacity(self.r.len() * 3);
        for i in 0..self.r.len() {
            out.extend_from_slice(&[q(self.r[i]), q(self.g[i]), q(self.b[i])]);
        }
        out
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = y * self.width + x;
        [self.r[i], self.g[i], self.b[i]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        let i = y * self.width + x;
        self.r[i] = rgb[0].clamp(0.0, 1.0);
        self.g[i] = rgb[1].clamp(0.0, 1.0);
        self.b[i] = rgb[2].clamp(0.0, 1.0);
    }

    pub fn red(&self) -> &[f64] {
        &self.r
    }

    pub fn green(&self) -> &[f64] {
        &self.g
    }

    pub fn blue(&self) -> &[f64] {
        &self.b
    }

    pub fn mirror_horizontal(&self) -> Self {
        let w = self.width;
        Self::from_fn(w, self.height, |x, y| self.pixel(w - 1 - x, y))
            .expect("mirroring preserves validity")
    }
}

/// Number of ceil-halvings that take `from` to `to`, if any.
pub(crate) fn halvings(mut from: usize, to: usize) -> Option<u32> {
    let mut d = 0;
    while from > to {
        from = from.div_ceil(2);
        d += 1;
    }
    (from == to).then_some(d)
}

/// Source-coordinate scale between two pyramid-related lengths: the factor
/// that multiplies a destination index to give the source position.
fn axis_scale(src: usize, dst: usize) -> Option<f64> {
    if src >= dst {
        halvings(src, dst).map(|d| f64::from(1u32 << d))
    } else {
        halvings(dst, src).map(|d| 1.0 / f64::from(1u32 << d))
    }
}

struct AxisTaps {
    lo: Vec<usize>,
    hi: Vec<usize>,
    frac: Vec<f64>,
}

fn axis_taps(src: usize, dst: usize, scale: f64) -> AxisTaps {
    let last = (src - 1) as f64;
    let mut taps = AxisTaps {
        lo: Vec::with_capacity(dst),
        hi: Vec::with_capacity(dst),
        frac: Vec::with_capacity(dst),
    };
    for i in 0..dst {
        let pos = (i as f64 * scale).min(last);
        let lo = pos.floor() as usize;
        taps.lo.push(lo);
        taps.hi.push((lo + 1).min(src - 1));
        taps.frac.push(pos - lo as f64);
    }
    taps
}

/// Bilinear resampling between two pyramid levels of the same image.
///
/// The two sizes must be related by repeated ceil-halving on each axis
/// (independently; an axis that has collapsed to 1 pixel matches any
/// depth). Upsampling interpolates between coarse samples, downsampling
/// reads the coincident fine samples.
pub fn resample(src: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if src.is_empty() || width == 0 || height == 0 {
        return Err(Error::invalid("cannot resample an empty buffer"));
    }
    if src.dims() == (width, height) {
        return Ok(src.clone());
    }
    let unrelated = || {
        Error::invalid(format!(
            "{:?} and {:?} are not levels of one pyramid",
            src.dims(),
            (width, height)
        ))
    };
    let sx = axis_scale(src.width, width).ok_or_else(unrelated)?;
    let sy = axis_scale(src.height, height).ok_or_else(unrelated)?;
    let tx = axis_taps(src.width, width, sx);
    let ty = axis_taps(src.height, height, sy);

    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let (y0, y1, fy) = (ty.lo[y], ty.hi[y], ty.frac[y]);
        for x in 0..width {
            let (x0, x1, fx) = (tx.lo[x], tx.hi[x], tx.frac[x]);
            let top = src.get(x0, y0) * (1.0 - fx) + src.get(x1, y0) * fx;
            let bottom = src.get(x0, y1) * (1.0 - fx) + src.get(x1, y1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Ok(ImageBuffer {
        width,
        height,
        data: out,
    })
}

/// Dimensions of pyramid level `level` for a base of `width`×`height`.
pub fn level_dims(width: usize, height: usize, level: u32) -> (usize, usize) {
    let mut dims = (width.max(1), height.max(1));
    for _ in 0..level {
        dims = (dims.0.div_ceil(2), dims.1.div_ceil(2));
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halvings_follow_ceil() {
        assert_eq!(halvings(640, 40), Some(4));
        assert_eq!(halvings(257, 2), Some(8));
        assert_eq!(halvings(640, 41), None);
        assert_eq!(halvings(5, 5), Some(0));
    }

    #[test]
    fn level_dims_ceil_halving() {
        assert_eq!(level_dims(640, 480, 4), (40, 30));
        assert_eq!(level_dims(3, 3, 8), (1, 1));
        assert_eq!(level_dims(33, 17, 2), (9, 5));
    }

    #[test]
    fn resample_identity_and_constant() {
        let a = ImageBuffer::from_fn(9, 5, |x, y| (x * 3 + y) as f64);
        assert_eq!(resample(&a, 9, 5).unwrap(), a);
        let c = ImageBuffer::filled(5, 3, 0.25);
        let up = resample(&c, 17, 9).unwrap();
        assert!(up.data().iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn upsample_hits_coarse_samples_on_grid() {
        let coarse = ImageBuffer::from_fn(5, 4, |x, y| (x * x + 2 * y) as f64);
        let fine = resample(&coarse, 17, 13).unwrap();
        for y in 0..4 {
            for x in 0..5 {
                if 4 * x < 17 && 4 * y < 13 {
                    assert_eq!(fine.get(4 * x, 4 * y), coarse.get(x, y));
                }
            }
        }
        // Halfway between two coarse samples.
        assert_eq!(fine.get(2, 0), 0.5 * (coarse.get(0, 0) + coarse.get(1, 0)));
    }

    #[test]
    fn unrelated_dims_are_rejected() {
        let a = ImageBuffer::new(10, 10);
        assert!(resample(&a, 7, 10).is_err());
    }

    #[test]
    fn rgb_validation() {
        assert!(RgbImage::from_planes(0, 0, vec![], vec![], vec![]).is_err());
        assert!(RgbImage::from_planes(1, 1, vec![1.5], vec![0.0], vec![0.0]).is_err());
        assert!(RgbImage::from_planes(2, 1, vec![0.0], vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn argmax_prefers_first_in_scan_order() {
        let mut m = ImageBuffer::new(5, 4);
        m.set(3, 1, 2.0);
        m.set(2, 2, 2.0);
        assert_eq!(m.argmax(), Some((3, 1)));
    }
}
