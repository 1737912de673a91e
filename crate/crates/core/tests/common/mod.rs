#![allow(dead_code)]

use std::path::PathBuf;

use eagle_eye::image::{ImageBuffer, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(seed: u64, w: usize, h: usize) -> RgbImage {
    let mut r = rng(seed);
    RgbImage::from_fn(w, h, |_, _| [r.gen(), r.gen(), r.gen()]).unwrap()
}

pub fn random_gray(seed: u64, w: usize, h: usize) -> RgbImage {
    let mut r = rng(seed);
    RgbImage::from_fn(w, h, |_, _| [r.gen::<f64>(); 3]).unwrap()
}

pub fn random_buffer(seed: u64, w: usize, h: usize) -> ImageBuffer {
    let mut r = rng(seed);
    ImageBuffer::from_fn(w, h, |_, _| r.gen())
}

/// Inclusive pixel box `(x0, y0, x1, y1)`.
pub type PixelBox = (usize, usize, usize, usize);

/// White bars on black, 5×5 on a 640×480 canvas with centers on multiples of
/// 16 px. Every bar is horizontal except the one at `odd`, which is
/// vertical. Returns the image and the odd bar's box.
pub fn bar_array(odd: (usize, usize)) -> (RgbImage, PixelBox) {
    let (len, thick) = (40, 8);
    let mut boxes = Vec::new();
    let mut odd_box = (0, 0, 0, 0);
    for j in 0..5 {
        for i in 0..5 {
            let (cx, cy) = (64 + 128 * i, 48 + 96 * j);
            let (hw, hh) = if (i, j) == odd {
                (thick / 2, len / 2)
            } else {
                (len / 2, thick / 2)
            };
            let b = (cx - hw, cy - hh, cx + hw - 1, cy + hh - 1);
            if (i, j) == odd {
                odd_box = b;
            }
            boxes.push(b);
        }
    }
    let img = RgbImage::from_fn(640, 480, |x, y| {
        let on = boxes
            .iter()
            .any(|&(x0, y0, x1, y1)| (x0..=x1).contains(&x) && (y0..=y1).contains(&y));
        [if on { 1.0 } else { 0.0 }; 3]
    })
    .unwrap();
    (img, odd_box)
}

pub fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

/// Reference step response of `θ' = clamp((A − θ)/τ, ±slew)` from rest at 0.
pub fn step_response(a: f64, tau: f64, slew: f64, t: f64) -> f64 {
    let sign = a.signum();
    let a = a.abs();
    let knee = slew * tau;
    let t_lin = ((a - knee) / slew).max(0.0);
    let mag = if t < t_lin {
        slew * t
    } else if t_lin > 0.0 {
        a - knee * (-(t - t_lin) / tau).exp()
    } else {
        a * (1.0 - (-t / tau).exp())
    };
    sign * mag
}
