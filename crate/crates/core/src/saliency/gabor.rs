//! Orientation channel: even Gabor filters at four orientations.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::filter::{convolve_2d, Kernel2d};
use crate::saliency::Pyramid;
use crate::{Error, Result};

/// Bar orientation a filter is tuned to, measured counter-clockwise from
/// horizontal as seen on screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::Deg0,
        Orientation::Deg45,
        Orientation::Deg90,
        Orientation::Deg135,
    ];

    pub fn degrees(self) -> f64 {
        match self {
            Orientation::Deg0 => 0.0,
            Orientation::Deg45 => 45.0,
            Orientation::Deg90 => 90.0,
            Orientation::Deg135 => 135.0,
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.degrees() == deg)
            .ok_or_else(|| Error::invalid(format!("unsupported orientation {deg}°")))
    }

    /// Orientation after a left-right mirror of the image.
    pub fn mirrored(self) -> Self {
        match self {
            Orientation::Deg45 => Orientation::Deg135,
            Orientation::Deg135 => Orientation::Deg45,
            o => o,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.degrees())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaborParams {
    /// Side of the square kernel in pixels (odd).
    pub kernel_size: usize,
    /// Carrier wavelength in pixels.
    pub wavelength: f64,
    /// Envelope standard deviation in pixels.
    pub sigma: f64,
    /// Envelope aspect ratio along the bar.
    pub aspect: f64,
    pub phase_deg: f64,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            kernel_size: 9,
            wavelength: 7.0,
            sigma: 2.33,
            aspect: 1.0,
            phase_deg: 0.0,
        }
    }
}

/// Zero-mean, unit-energy Gabor kernel tuned to bars at `orientation`.
pub fn gabor_kernel(params: &GaborParams, orientation: Orientation) -> Kernel2d {
    let size = params.kernel_size;
    let r = (size / 2) as isize;
    let theta = orientation.degrees().to_radians();
    let (sin, cos) = theta.sin_cos();
    let phase = params.phase_deg.to_radians();
    let mut taps = Vec::with_capacity(size * size);
    for dy in -r..=r {
        for dx in -r..=r {
            let (dx, dy) = (dx as f64, dy as f64);
            // Across-bar (carrier) and along-bar coordinates; image y points down.
            let across = dx * sin + dy * cos;
            let along = dx * cos - dy * sin;
            let envelope = (-(across * across + params.aspect * params.aspect * along * along)
                / (2.0 * params.sigma * params.sigma))
                .exp();
            taps.push(envelope * (2.0 * PI * across / params.wavelength + phase).cos());
        }
    }
    let mean = taps.iter().sum::<f64>() / taps.len() as f64;
    taps.iter_mut().for_each(|t| *t -= mean);
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    if norm > 0.0 {
        taps.iter_mut().for_each(|t| *t /= norm);
    }
    Kernel2d::new(size, taps)
}

/// Magnitude of the Gabor response at every level of the intensity pyramid.
pub fn build_gabor_pyramid(
    intensity: &Pyramid,
    orientation: Orientation,
    params: &GaborParams,
) -> Pyramid {
    let kernel = gabor_kernel(params, orientation);
    intensity.map_levels(|lvl| convolve_2d(lvl, &kernel).map(f64::abs))
}
