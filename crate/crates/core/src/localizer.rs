//! From a saliency map to a salient point and a salient region.
//!
//! The map is brought to input resolution as 8-bit gray, the brightest
//! pixel is taken as the salient point, and the region is grown from that
//! point over a Gaussian-blurred copy of the map.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::filter::{convolve_separable, gaussian_taps};
use crate::image::{resample, ImageBuffer};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizerConfig {
    /// Blur standard deviation as a fraction of the image width.
    pub blur_sigma_frac: f64,
    /// Region pixels must reach this fraction of the blurred value at the
    /// salient point.
    pub threshold_frac: f64,
    /// A saliency map whose maximum is below this value holds no target.
    pub detection_floor: f64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        Self {
            blur_sigma_frac: 0.01,
            threshold_frac: 0.5,
            detection_floor: 0.5,
        }
    }
}

impl LocalizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.blur_sigma_frac.is_finite() && self.blur_sigma_frac >= 0.0) {
            return Err(Error::Config(
                "localizer.blur_sigma_frac must be non-negative".into(),
            ));
        }
        if !(self.threshold_frac > 0.0 && self.threshold_frac < 1.0) {
            return Err(Error::Config(
                "localizer.threshold_frac must lie in (0, 1)".into(),
            ));
        }
        if !self.detection_floor.is_finite() || self.detection_floor < 0.0 {
            return Err(Error::Config(
                "localizer.detection_floor must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn blur_sigma(&self, width: usize) -> f64 {
        self.blur_sigma_frac * width as f64
    }
}

/// 8-bit gray raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayMap {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayMap {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height || data.is_empty() {
            return Err(Error::invalid("gray map size does not match its data"));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn to_buffer(&self) -> ImageBuffer {
        ImageBuffer::from_fn(self.width, self.height, |x, y| f64::from(self.get(x, y)))
    }
}

/// The saliency map upsampled to `width`×`height` and mapped affinely so the
/// minimum becomes 0 and the maximum 255, before rounding. A constant map
/// yields all zeros.
pub fn export_levels(s: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if s.is_empty() {
        return Err(Error::invalid("empty saliency map"));
    }
    let up = resample(s, width, height)?;
    let (lo, hi) = (up.min(), up.max());
    if !(hi > lo) {
        return Ok(ImageBuffer::new(width, height));
    }
    Ok(up.map(|v| (v - lo) / (hi - lo) * 255.0))
}

/// [`export_levels`] rounded half-up to integers.
pub fn export_gray(s: &ImageBuffer, width: usize, height: usize) -> Result<GrayMap> {
    let levels = export_levels(s, width, height)?;
    let data = levels
        .data()
        .iter()
        .map(|&v| (v + 0.5).floor().clamp(0.0, 255.0) as u8)
        .collect();
    GrayMap::from_vec(width, height, data)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SalientPoint {
    pub x: usize,
    pub y: usize,
    pub gray: u8,
}

impl SalientPoint {
    /// The report line, e.g. `Coordinate: (522,239), Gray value: 243`.
    pub fn report_line(&self) -> String {
        format!(
            "Coordinate: ({},{}), Gray value: {}",
            self.x, self.y, self.gray
        )
    }
}

/// Brightest pixel; the first one in row-major order wins ties.
pub fn find_salient_point(gray: &GrayMap) -> SalientPoint {
    let (mut best_i, mut best) = (0, gray.data[0]);
    for (i, &v) in gray.data.iter().enumerate().skip(1) {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    SalientPoint {
        x: best_i % gray.width,
        y: best_i / gray.width,
        gray: best,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SalientRegion {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    /// Inclusive bounds `(x0, y0, x1, y1)`.
    pub bbox: (usize, usize, usize, usize),
    /// Weighted by the blurred map, in pixel-index coordinates.
    pub centroid: (f64, f64),
    pub area_fraction: f64,
}

impl SalientRegion {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.mask[y * self.width + x]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn pixel_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Grows the 4-connected region of blurred values at least
/// `threshold_frac × blurred(point)` that contains `point`.
pub fn extract_salient_region(
    gray: &GrayMap,
    point: SalientPoint,
    blur_sigma: f64,
    threshold_frac: f64,
) -> Result<SalientRegion> {
    let (w, h) = (gray.width, gray.height);
    if point.x >= w || point.y >= h {
        return Err(Error::invalid(format!(
            "point ({}, {}) outside a {w}x{h} map",
            point.x, point.y
        )));
    }
    if !(threshold_frac > 0.0 && threshold_frac < 1.0) {
        return Err(Error::invalid("threshold fraction must lie in (0, 1)"));
    }
    let blurred = convolve_separable(&gray.to_buffer(), &gaussian_taps(blur_sigma, 3.0));
    let threshold = threshold_frac * blurred.get(point.x, point.y);

    let mut mask = vec![false; w * h];
    let mut queue = VecDeque::new();
    mask[point.y * w + point.x] = true;
    queue.push_back((point.x, point.y));
    let (mut x0, mut y0, mut x1, mut y1) = (point.x, point.y, point.x, point.y);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    let mut count = 0usize;
    while let Some((x, y)) = queue.pop_front() {
        let v = blurred.get(x, y);
        sw += v;
        sx += v * x as f64;
        sy += v * y as f64;
        count += 1;
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
        let neighbours = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbours {
            if nx < w && ny < h && !mask[ny * w + nx] && blurred.get(nx, ny) >= threshold {
                mask[ny * w + nx] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    let centroid = if sw > 0.0 {
        (sx / sw, sy / sw)
    } else {
        // All-zero map: plain mean of the member pixels.
        let (mut mx, mut my) = (0.0, 0.0);
        for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            mx += (i % w) as f64;
            my += (i / w) as f64;
        }
        (mx / count as f64, my / count as f64)
    };
    Ok(SalientRegion {
        width: w,
        height: h,
        mask,
        bbox: (x0, y0, x1, y1),
        centroid,
        area_fraction: count as f64 / (w * h) as f64,
    })
}

/// Point and region found in one saliency map.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub point: SalientPoint,
    pub region: SalientRegion,
    pub gray: GrayMap,
    /// Maximum of the raw saliency map.
    pub peak_saliency: f64,
}

impl Detection {
    pub fn is_above_floor(&self, cfg: &LocalizerConfig) -> bool {
        self.peak_saliency >= cfg.detection_floor
    }
}

/// Exports `s` to `width`×`height`, then finds the point and region.
pub fn locate(
    s: &ImageBuffer,
    width: usize,
    height: usize,
    cfg: &LocalizerConfig,
) -> Result<Detection> {
    let gray = export_gray(s, width, height)?;
    let point = find_salient_point(&gray);
    let region = extract_salient_region(&gray, point, cfg.blur_sigma(width), cfg.threshold_frac)?;
    Ok(Detection {
        point,
        region,
        gray,
        peak_saliency: s.max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_from(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> GrayMap {
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                data.push(f(x, y));
            }
        }
        GrayMap::from_vec(w, h, data).unwrap()
    }

    #[test]
    fn constant_map_exports_black() {
        let g = export_gray(&ImageBuffer::filled(40, 30, 0.3), 640, 480).unwrap();
        assert!(g.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn unique_max_maps_to_exactly_one_255_before_rounding() {
        let mut s = ImageBuffer::from_fn(40, 30, |x, y| ((x * 7 + y * 3) % 11) as f64 * 0.01);
        s.set(17, 9, 1.0);
        let levels = export_levels(&s, 640, 480).unwrap();
        let at_top = levels.data().iter().filter(|&&v| v == 255.0).count();
        assert_eq!(at_top, 1);
        assert_eq!(levels.get(17 * 16, 9 * 16), 255.0);
    }

    #[test]
    fn single_bright_pixel() {
        let g = gray_from(200, 100, |x, y| if (x, y) == (100, 50) { 255 } else { 0 });
        let p = find_salient_point(&g);
        assert_eq!((p.x, p.y, p.gray), (100, 50, 255));
    }

    #[test]
    fn ties_break_in_scan_order() {
        let g = gray_from(5, 4, |x, y| {
            if (x, y) == (3, 1) || (x, y) == (2, 2) {
                9
            } else {
                1
            }
        });
        let p = find_salient_point(&g);
        assert_eq!((p.x, p.y), (3, 1));
    }

    #[test]
    fn report_line_format() {
        let p = SalientPoint {
            x: 522,
            y: 239,
            gray: 243,
        };
        assert_eq!(p.report_line(), "Coordinate: (522,239), Gray value: 243");
    }

    #[test]
    fn square_centroid() {
        let g = gray_from(100, 80, |x, y| {
            if (40..50).contains(&x) && (20..30).contains(&y) {
                200
            } else {
                0
            }
        });
        let point = SalientPoint {
            x: 41,
            y: 28,
            gray: 200,
        };
        let r = extract_salient_region(&g, point, 1.0, 0.5).unwrap();
        assert!((r.centroid.0 - 44.5).abs() <= 0.5);
        assert!((r.centroid.1 - 24.5).abs() <= 0.5);
        assert!(r.contains(41, 28));
        let (x0, y0, x1, y1) = r.bbox;
        assert!(x0 as f64 <= r.centroid.0 && r.centroid.0 <= x1 as f64);
        assert!(y0 as f64 <= r.centroid.1 && r.centroid.1 <= y1 as f64);
        assert!((r.area_fraction - r.pixel_count() as f64 / 8000.0).abs() < 1e-15);
    }

    #[test]
    fn point_outside_rejected() {
        let g = gray_from(10, 10, |_, _| 0);
        let p = SalientPoint {
            x: 10,
            y: 0,
            gray: 0,
        };
        assert!(extract_salient_region(&g, p, 1.0, 0.5).is_err());
    }
}
