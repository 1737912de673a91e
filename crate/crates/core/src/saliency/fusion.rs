//! Across-scale addition, conspicuity maps and the final saliency map.

use crate::config::PipelineConfig;
use crate::image::{level_dims, resample, ImageBuffer};
use crate::saliency::features::{FeatureMapSet, ScalePair};
use crate::saliency::normalize::normalize_map;
use crate::{Error, Result};

/// Resamples every map to `width`×`height` and sums them pointwise.
///
/// The per-pixel sum runs over the values sorted ascending, so the result is
/// bit-identical under any permutation of `maps`.
pub fn across_scale_add(maps: &[ImageBuffer], width: usize, height: usize) -> Result<ImageBuffer> {
    if maps.is_empty() {
        return Err(Error::invalid("across-scale addition of an empty list"));
    }
    let resampled = maps
        .iter()
        .map(|m| resample(m, width, height))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(resampled.len());
    let mut out = Vec::with_capacity(width * height);
    for i in 0..width * height {
        values.clear();
        values.extend(resampled.iter().map(|m| m.data()[i]));
        values.sort_by(f64::total_cmp);
        out.push(values.iter().sum());
    }
    ImageBuffer::from_vec(width, height, out)
}

/// Per-channel conspicuity maps at the fusion scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ConspicuityMaps {
    pub intensity: ImageBuffer,
    pub color: ImageBuffer,
    pub orientation: ImageBuffer,
}

fn normalized(maps: &[(ScalePair, ImageBuffer)]) -> Vec<ImageBuffer> {
    maps.iter().map(|(_, m)| normalize_map(m)).collect()
}

pub fn conspicuity_maps(fm: &FeatureMapSet, cfg: &PipelineConfig) -> Result<ConspicuityMaps> {
    let (w, h) = level_dims(fm.base_dims.0, fm.base_dims.1, cfg.fusion_scale);

    let intensity = across_scale_add(&normalized(&fm.intensity), w, h)?;

    let color_terms = fm
        .red_green
        .iter()
        .zip(&fm.blue_yellow)
        .map(|((_, rg), (_, by))| normalize_map(rg).zip_map(&normalize_map(by), |a, b| a + b))
        .collect::<Result<Vec<_>>>()?;
    let color = across_scale_add(&color_terms, w, h)?;

    // Summed in the fixed order 0°, 45°, 90°, 135°.
    let mut orientation = ImageBuffer::new(w, h);
    for maps in &fm.orientation {
        let per_angle = normalize_map(&across_scale_add(&normalized(maps), w, h)?);
        orientation = orientation.zip_map(&per_angle, |a, b| a + b)?;
    }

    Ok(ConspicuityMaps {
        intensity,
        color,
        orientation,
    })
}

/// `S = (N(Ī) + N(C̄) + N(Ō)) / 3`.
pub fn saliency_map(cm: &ConspicuityMaps) -> Result<ImageBuffer> {
    let i = normalize_map(&cm.intensity);
    let c = normalize_map(&cm.color);
    let o = normalize_map(&cm.orientation);
    i.zip_map(&c, |a, b| a + b)?
        .zip_map(&o, |a, b| (a + b) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_map_at_target_size_is_unchanged() {
        let m = ImageBuffer::from_fn(6, 4, |x, y| (x * y) as f64 * 0.1);
        assert_eq!(across_scale_add(&[m.clone()], 6, 4).unwrap(), m);
    }

    #[test]
    fn constants_add() {
        let a = ImageBuffer::filled(24, 16, 0.25);
        let b = ImageBuffer::filled(3, 2, 0.5);
        let s = across_scale_add(&[a, b], 6, 4).unwrap();
        assert!(s.data().iter().all(|&v| v == 0.75));
    }

    #[test]
    fn empty_list_rejected() {
        assert!(across_scale_add(&[], 4, 4).is_err());
    }

    #[test]
    fn zero_conspicuity_gives_zero_saliency() {
        let z = ImageBuffer::new(5, 5);
        let cm = ConspicuityMaps {
            intensity: z.clone(),
            color: z.clone(),
            orientation: z,
        };
        assert!(saliency_map(&cm).unwrap().data().iter().all(|&v| v == 0.0));
    }
}
