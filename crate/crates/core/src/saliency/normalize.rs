//! The map normalization operator N(·).
//!
//! The map is first rescaled to `[0, M]` with `M = 1`. With `m̄` the mean of
//! all local maxima other than the global one, the rescaled map is multiplied
//! by `(M − m̄)²`. A map with a single strong peak keeps its full range; a map
//! with many comparable peaks is driven toward zero.

use crate::image::ImageBuffer;

/// Upper end of the rescaled range.
pub const NORMALIZED_MAX: f64 = 1.0;

/// Whether `(x, y)` is at least as large as its 8-neighbours and positive.
fn is_local_max(m: &ImageBuffer, x: usize, y: usize) -> bool {
    let v = m.get(x, y);
    if v <= 0.0 {
        return false;
    }
    let (w, h) = m.dims();
    for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
        for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
            if (nx, ny) != (x, y) && m.get(nx, ny) > v {
                return false;
            }
        }
    }
    true
}

pub fn normalize_map(m: &ImageBuffer) -> ImageBuffer {
    let (w, h) = m.dims();
    let (lo, hi) = (m.min(), m.max());
    if m.is_empty() || !(hi > lo) {
        return ImageBuffer::new(w, h);
    }
    let span = hi - lo;
    let scaled = m.map(|v| (v - lo) / span * NORMALIZED_MAX);
    let peak = scaled.argmax().expect("non-empty map");

    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..h {
        for x in 0..w {
            if (x, y) != peak && is_local_max(&scaled, x, y) {
                sum += scaled.get(x, y);
                count += 1;
            }
        }
    }
    let mean_other = if count > 0 { sum / count as f64 } else { 0.0 };
    let gain = (NORMALIZED_MAX - mean_other).powi(2);
    scaled.map(|v| v * gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map_is_zeroed() {
        let out = normalize_map(&ImageBuffer::filled(8, 8, 3.0));
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_peak_beats_many_peaks() {
        let mut one = ImageBuffer::new(40, 40);
        one.set(20, 20, 1.0);
        let mut ten = ImageBuffer::new(40, 40);
        for k in 0..10 {
            ten.set(3 + 4 * k, 5 + 3 * (k % 3), 1.0);
        }
        // One peak: rescaled to 1, no other maxima, gain (1 − 0)² = 1.
        // Ten equal peaks: m̄ = 1, gain (1 − 1)² = 0.
        let n1 = normalize_map(&one);
        let n10 = normalize_map(&ten);
        assert_eq!(n1.get(20, 20), 1.0);
        assert_eq!(n10.max(), 0.0);
        assert!(n1.get(20, 20) > n10.max());
    }

    #[test]
    fn gain_uses_mean_of_secondary_maxima() {
        let mut m = ImageBuffer::new(20, 20);
        m.set(2, 2, 1.0);
        m.set(10, 10, 0.5);
        m.set(15, 4, 0.25);
        let n = normalize_map(&m);
        let gain = (1.0f64 - 0.375).powi(2);
        assert!((n.get(2, 2) - gain).abs() < 1e-15);
        assert!((n.get(10, 10) - 0.5 * gain).abs() < 1e-15);
    }
}
