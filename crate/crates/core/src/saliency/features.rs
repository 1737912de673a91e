//! Center-surround feature maps.

use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::image::{resample, ImageBuffer, RgbImage};
use crate::saliency::color::{broadly_tuned_colors, hue_decoupled_channels};
use crate::saliency::gabor::{build_gabor_pyramid, Orientation};
use crate::saliency::pyramid::{build_gaussian_pyramid, intensity_image, Pyramid};
use crate::{Error, Result};

/// A center scale `c` and surround scale `s = c + δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScalePair {
    pub center: usize,
    pub surround: usize,
}

/// `c ∈ {2, 3, 4}`, `δ ∈ {3, 4}`.
pub const SCALE_PAIRS: [ScalePair; 6] = [
    ScalePair {
        center: 2,
        surround: 5,
    },
    ScalePair {
        center: 2,
        surround: 6,
    },
    ScalePair {
        center: 3,
        surround: 6,
    },
    ScalePair {
        center: 3,
        surround: 7,
    },
    ScalePair {
        center: 4,
        surround: 7,
    },
    ScalePair {
        center: 4,
        surround: 8,
    },
];

/// `|center − surround↑|`, with the surround bilinearly upsampled to the
/// center's size. Both inputs must be levels of one pyramid.
pub fn center_surround(center: &ImageBuffer, surround: &ImageBuffer) -> Result<ImageBuffer> {
    if surround.width() > center.width() || surround.height() > center.height() {
        return Err(Error::invalid(format!(
            "surround {:?} is larger than center {:?}",
            surround.dims(),
            center.dims()
        )));
    }
    let up = resample(surround, center.width(), center.height())?;
    center.zip_map(&up, |c, s| (c - s).abs())
}

/// Every pyramid the feature maps are drawn from.
#[derive(Clone, Debug)]
pub struct ChannelPyramids {
    pub intensity: Pyramid,
    pub red: Pyramid,
    pub green: Pyramid,
    pub blue: Pyramid,
    pub yellow: Pyramid,
    /// Indexed by [`Orientation::index`].
    pub orientation: [Pyramid; 4],
}

impl ChannelPyramids {
    pub fn build(img: &RgbImage, cfg: &PipelineConfig) -> Result<Self> {
        let kernel = &cfg.downsample_kernel;
        let intensity_full = intensity_image(img)?;
        let [r, g, b] = hue_decoupled_channels(img, &intensity_full, cfg)?;

        let intensity = build_gaussian_pyramid(&intensity_full, kernel)?;
        let rp = build_gaussian_pyramid(&r, kernel)?;
        let gp = build_gaussian_pyramid(&g, kernel)?;
        let bp = build_gaussian_pyramid(&b, kernel)?;

        let mut red = Vec::with_capacity(rp.levels().len());
        let mut green = Vec::with_capacity(rp.levels().len());
        let mut blue = Vec::with_capacity(rp.levels().len());
        let mut yellow = Vec::with_capacity(rp.levels().len());
        for k in 0..rp.levels().len() {
            let c = broadly_tuned_colors(rp.level(k), gp.level(k), bp.level(k))?;
            red.push(c.red);
            green.push(c.green);
            blue.push(c.blue);
            yellow.push(c.yellow);
        }

        let orientation: Vec<Pyramid> = Orientation::ALL
            .par_iter()
            .map(|&o| build_gabor_pyramid(&intensity, o, &cfg.gabor))
            .collect();
        let orientation: [Pyramid; 4] =
            orientation.try_into().expect("one pyramid per orientation");

        Ok(Self {
            intensity,
            red: Pyramid::from_levels(red),
            green: Pyramid::from_levels(green),
            blue: Pyramid::from_levels(blue),
            yellow: Pyramid::from_levels(yellow),
            orientation,
        })
    }
}

/// The 42 center-surround maps, each stored at its center scale.
#[derive(Clone, Debug)]
pub struct FeatureMapSet {
    /// Size of the level-0 input.
    pub base_dims: (usize, usize),
    pub intensity: Vec<(ScalePair, ImageBuffer)>,
    pub red_green: Vec<(ScalePair, ImageBuffer)>,
    pub blue_yellow: Vec<(ScalePair, ImageBuffer)>,
    /// Indexed by [`Orientation::index`].
    pub orientation: [Vec<(ScalePair, ImageBuffer)>; 4],
}

impl FeatureMapSet {
    pub fn intensity_count(&self) -> usize {
        self.intensity.len()
    }

    pub fn color_count(&self) -> usize {
        self.red_green.len() + self.blue_yellow.len()
    }

    pub fn orientation_count(&self) -> usize {
        self.orientation.iter().map(Vec::len).sum()
    }

    pub fn all_maps(&self) -> impl Iterator<Item = &ImageBuffer> {
        self.intensity
            .iter()
            .chain(&self.red_green)
            .chain(&self.blue_yellow)
            .chain(self.orientation.iter().flatten())
            .map(|(_, m)| m)
    }
}

#[derive(Clone, Copy)]
enum Job {
    Intensity(ScalePair),
    RedGreen(ScalePair),
    BlueYellow(ScalePair),
    Orientation(Orientation, ScalePair),
}

fn difference(a: &ImageBuffer, b: &ImageBuffer) -> Result<ImageBuffer> {
    a.zip_map(b, |x, y| x - y)
}

fn run_job(p: &ChannelPyramids, job: Job) -> Result<ImageBuffer> {
    match job {
        Job::Intensity(sp) => {
            center_surround(p.intensity.level(sp.center), p.intensity.level(sp.surround))
        }
        Job::RedGreen(sp) => {
            let c = difference(p.red.level(sp.center), p.green.level(sp.center))?;
            let s = difference(p.green.level(sp.surround), p.red.level(sp.surround))?;
            center_surround(&c, &s)
        }
        Job::BlueYellow(sp) => {
            let c = difference(p.blue.level(sp.center), p.yellow.level(sp.center))?;
            let s = difference(p.yellow.level(sp.surround), p.blue.level(sp.surround))?;
            center_surround(&c, &s)
        }
        Job::Orientation(o, sp) => {
            let pyr = &p.orientation[o.index()];
            center_surround(pyr.level(sp.center), pyr.level(sp.surround))
        }
    }
}

/// Computes all 42 feature maps. Maps are independent, so they are
/// evaluated in parallel and gathered in a fixed order.
pub fn compute_feature_maps(p: &ChannelPyramids) -> Result<FeatureMapSet> {
    let mut jobs = Vec::with_capacity(42);
    jobs.extend(SCALE_PAIRS.iter().map(|&sp| Job::Intensity(sp)));
    jobs.extend(SCALE_PAIRS.iter().map(|&sp| Job::RedGreen(sp)));
    jobs.extend(SCALE_PAIRS.iter().map(|&sp| Job::BlueYellow(sp)));
    for o in Orientation::ALL {
        jobs.extend(SCALE_PAIRS.iter().map(|&sp| Job::Orientation(o, sp)));
    }
    let maps = jobs
        .par_iter()
        .map(|&job| run_job(p, job))
        .collect::<Result<Vec<_>>>()?;

    let mut maps = maps.into_iter();
    let mut take_six = || -> Vec<(ScalePair, ImageBuffer)> {
        SCALE_PAIRS
            .iter()
            .copied()
            .zip(maps.by_ref().take(6))
            .collect()
    };
    let intensity = take_six();
    let red_green = take_six();
    let blue_yellow = take_six();
    let orientation = [take_six(), take_six(), take_six(), take_six()];
    Ok(FeatureMapSet {
        base_dims: p.intensity.base_dims(),
        intensity,
        red_green,
        blue_yellow,
        orientation,
    })
}
