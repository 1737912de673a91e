//! Hue decoupling and the broadly tuned colour channels.

use crate::config::PipelineConfig;
use crate::image::{ImageBuffer, RgbImage};
use crate::{Error, Result};

/// Divides each channel by intensity where intensity exceeds
/// `hue_decouple_threshold × max(I)`; elsewhere the channels are zero.
pub fn hue_decoupled_channels(
    img: &RgbImage,
    intensity: &ImageBuffer,
    cfg: &PipelineConfig,
) -> Result<[ImageBuffer; 3]> {
    if img.dims() != intensity.dims() {
        return Err(Error::invalid("intensity does not match the image size"));
    }
    let floor = cfg.hue_decouple_threshold * intensity.max();
    let (w, h) = img.dims();
    let decouple = |plane: &[f64]| {
        let data = plane
            .iter()
            .zip(intensity.data())
            .map(|(&c, &i)| if i > floor { c / i } else { 0.0 })
            .collect();
        ImageBuffer::from_vec(w, h, data).expect("same size as the image")
    };
    Ok([
        decouple(img.red()),
        decouple(img.green()),
        decouple(img.blue()),
    ])
}

/// Red, green, blue and yellow opponent channels, clamped at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadColors {
    pub red: ImageBuffer,
    pub green: ImageBuffer,
    pub blue: ImageBuffer,
    pub yellow: ImageBuffer,
}

pub fn broadly_tuned_colors(
    r: &ImageBuffer,
    g: &ImageBuffer,
    b: &ImageBuffer,
) -> Result<BroadColors> {
    if r.dims() != g.dims() || r.dims() != b.dims() {
        return Err(Error::invalid("colour channels differ in size"));
    }
    let (w, h) = r.dims();
    let n = w * h;
    let (mut red, mut green, mut blue, mut yellow) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for i in 0..n {
        let (r, g, b) = (r.data()[i], g.data()[i], b.data()[i]);
        red.push((r - (g + b) / 2.0).max(0.0));
        green.push((g - (r + b) / 2.0).max(0.0));
        blue.push((b - (r + g) / 2.0).max(0.0));
        yellow.push(((r + g) / 2.0 - (r - g).abs() / 2.0 - b).max(0.0));
    }
    let buf = |v| ImageBuffer::from_vec(w, h, v).expect("sized above");
    Ok(BroadColors {
        red: buf(red),
        green: buf(green),
        blue: buf(blue),
        yellow: buf(yellow),
    })
}
