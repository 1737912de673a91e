//! Bottom-up saliency: pyramids, feature maps, normalization and fusion.

mod color;
mod features;
mod fusion;
mod gabor;
mod normalize;
mod pyramid;

pub use color::{broadly_tuned_colors, hue_decoupled_channels, BroadColors};
pub use features::{
    center_surround, compute_feature_maps, ChannelPyramids, FeatureMapSet, ScalePair, SCALE_PAIRS,
};
pub use fusion::{across_scale_add, conspicuity_maps, saliency_map, ConspicuityMaps};
pub use gabor::{build_gabor_pyramid, gabor_kernel, GaborParams, Orientation};
pub use normalize::{normalize_map, NORMALIZED_MAX};
pub use pyramid::{build_gaussian_pyramid, intensity_image, reduce, Pyramid, LEVELS};

use crate::config::PipelineConfig;
use crate::image::{ImageBuffer, RgbImage};
use crate::Result;

/// Every intermediate of one saliency computation.
#[derive(Clone, Debug)]
pub struct SaliencyMaps {
    pub features: FeatureMapSet,
    pub conspicuity: ConspicuityMaps,
    /// Final saliency map at the fusion scale.
    pub saliency: ImageBuffer,
}

/// Runs the full chain on an RGB image.
pub fn compute_saliency(img: &RgbImage, cfg: &PipelineConfig) -> Result<SaliencyMaps> {
    cfg.validate()?;
    let pyramids = ChannelPyramids::build(img, cfg)?;
    let features = compute_feature_maps(&pyramids)?;
    let conspicuity = conspicuity_maps(&features, cfg)?;
    let saliency = saliency_map(&conspicuity)?;
    Ok(SaliencyMaps {
        features,
        conspicuity,
        saliency,
    })
}
