//! Camera intrinsics, the pan/tilt mount and its pointing solution.
//!
//! World frame: origin at the wide camera's optical center, `+z` along its
//! optical axis, `+x` to the right, `+y` up. The narrow camera sits on a
//! pan/tilt mount `vertical_offset_mm` above the wide camera. Pan turns about
//! the fixed vertical axis (positive right), tilt about the panned
//! horizontal axis (positive up). At pan = tilt = 0 both cameras look along
//! `+z`.

use serde::{Deserialize, Serialize};

use crate::gimbal::partition::{FovPartition, Region};
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

/// Pinhole intrinsics with the principal point at the image center.
/// Continuous image coordinates put the center of pixel `i` at `i + 0.5`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intrinsics {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
}

impl Intrinsics {
    pub fn from_fov(width: usize, height: usize, hfov_deg: f64, vfov_deg: f64) -> Self {
        Self {
            width,
            height,
            fx: width as f64 / 2.0 / (hfov_deg.to_radians() / 2.0).tan(),
            fy: height as f64 / 2.0 / (vfov_deg.to_radians() / 2.0).tan(),
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width as f64 / 2.0, self.height as f64 / 2.0)
    }

    /// Camera-frame ray (unit depth) through image point `(u, v)`.
    pub fn ray(&self, u: f64, v: f64) -> Vec3 {
        let (cx, cy) = self.center();
        [(u - cx) / self.fx, -(v - cy) / self.fy, 1.0]
    }

    /// Image point of a camera-frame direction, if it lies in front.
    pub fn project(&self, d: Vec3) -> Option<(f64, f64)> {
        if d[2] <= 0.0 {
            return None;
        }
        let (cx, cy) = self.center();
        Some((cx + self.fx * d[0] / d[2], cy - self.fy * d[1] / d[2]))
    }
}

/// Rotates a camera-frame vector into the world for the given pose.
pub fn camera_to_world(pan_deg: f64, tilt_deg: f64, v: Vec3) -> Vec3 {
    let (sp, cp) = pan_deg.to_radians().sin_cos();
    let (st, ct) = tilt_deg.to_radians().sin_cos();
    // Tilt about x, then pan about y.
    let y = ct * v[1] + st * v[2];
    let z = -st * v[1] + ct * v[2];
    [cp * v[0] + sp * z, y, -sp * v[0] + cp * z]
}

/// Inverse of [`camera_to_world`].
pub fn world_to_camera(pan_deg: f64, tilt_deg: f64, v: Vec3) -> Vec3 {
    let (sp, cp) = pan_deg.to_radians().sin_cos();
    let (st, ct) = tilt_deg.to_radians().sin_cos();
    let x = cp * v[0] - sp * v[2];
    let z = sp * v[0] + cp * v[2];
    [x, ct * v[1] - st * z, st * v[1] + ct * z]
}

/// Pan and tilt that put the optical axis along `dir`.
pub fn aim_angles(dir: Vec3) -> (f64, f64) {
    let pan = dir[0].atan2(dir[2]);
    let tilt = dir[1].atan2(dir[0].hypot(dir[2]));
    (pan.to_degrees(), tilt.to_degrees())
}

/// The two cameras and their mounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraGeometry {
    pub short_focal_mm: f64,
    pub long_focal_mm: f64,
    pub short_hfov_deg: f64,
    /// Defaults to the value implied by `short_hfov_deg` and the resolution's
    /// aspect ratio (square pixels).
    pub short_vfov_deg: Option<f64>,
    /// Wide horizontal FOV divided by narrow horizontal FOV.
    pub fov_ratio: f64,
    pub long_vfov_deg: Option<f64>,
    /// Height of the narrow camera above the wide one.
    pub vertical_offset_mm: f64,
    pub short_resolution: [usize; 2],
    pub long_resolution: [usize; 2],
}

impl Default for CameraGeometry {
    fn default() -> Self {
        Self {
            short_focal_mm: 2.1,
            long_focal_mm: 12.0,
            short_hfov_deg: 100.0,
            short_vfov_deg: None,
            fov_ratio: 5.0,
            long_vfov_deg: None,
            vertical_offset_mm: 36.88,
            short_resolution: [640, 480],
            long_resolution: [640, 480],
        }
    }
}

fn square_pixel_vfov(hfov_deg: f64, [w, h]: [usize; 2]) -> f64 {
    2.0 * (h as f64 / w as f64 * (hfov_deg.to_radians() / 2.0).tan())
        .atan()
        .to_degrees()
}

impl CameraGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("short_focal_mm", self.short_focal_mm),
            ("long_focal_mm", self.long_focal_mm),
            ("fov_ratio", self.fov_ratio),
            ("vertical_offset_mm", self.vertical_offset_mm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "camera.{name} = {v} must be positive"
                )));
            }
        }
        let fovs = [
            ("short_hfov_deg", Some(self.short_hfov_deg)),
            ("short_vfov_deg", self.short_vfov_deg),
            ("long_vfov_deg", self.long_vfov_deg),
        ];
        for (name, v) in fovs {
            if let Some(v) = v {
                if !(v > 0.0 && v < 180.0) {
                    return Err(Error::Config(format!(
                        "camera.{name} = {v} must be in (0, 180)"
                    )));
                }
            }
        }
        for (name, [w, h]) in [
            ("short_resolution", self.short_resolution),
            ("long_resolution", self.long_resolution),
        ] {
            if w < 6 || h < 6 {
                return Err(Error::Config(format!(
                    "camera.{name} = {w}x{h} is too small"
                )));
            }
        }
        Ok(())
    }

    pub fn short_vfov(&self) -> f64 {
        self.short_vfov_deg
            .unwrap_or_else(|| square_pixel_vfov(self.short_hfov_deg, self.short_resolution))
    }

    pub fn long_hfov(&self) -> f64 {
        self.short_hfov_deg / self.fov_ratio
    }

    pub fn long_vfov(&self) -> f64 {
        self.long_vfov_deg
            .unwrap_or_else(|| square_pixel_vfov(self.long_hfov(), self.long_resolution))
    }

    pub fn short_intrinsics(&self) -> Intrinsics {
        let [w, h] = self.short_resolution;
        Intrinsics::from_fov(w, h, self.short_hfov_deg, self.short_vfov())
    }

    pub fn long_intrinsics(&self) -> Intrinsics {
        let [w, h] = self.long_resolution;
        Intrinsics::from_fov(w, h, self.long_hfov(), self.long_vfov())
    }

    /// Optical center of the narrow camera in world metres.
    pub fn long_center(&self) -> Vec3 {
        [0.0, self.vertical_offset_mm / 1000.0, 0.0]
    }

    /// Sensor size `(width, height)` in millimetres implied by focal length
    /// and field of view.
    pub fn short_sensor_mm(&self) -> (f64, f64) {
        let t = |fov: f64| 2.0 * self.short_focal_mm * (fov.to_radians() / 2.0).tan();
        (t(self.short_hfov_deg), t(self.short_vfov()))
    }

    pub fn long_sensor_mm(&self) -> (f64, f64) {
        let t = |fov: f64| 2.0 * self.long_focal_mm * (fov.to_radians() / 2.0).tan();
        (t(self.long_hfov()), t(self.long_vfov()))
    }
}

/// Pan and tilt that bring wide-image point `(x, y)` (continuous
/// coordinates on a `width`×`height` image) onto the narrow camera's axis.
///
/// Without a range the target is treated as infinitely far away. With
/// `range_m`, the depth of the target along the wide camera's axis, the
/// narrow camera's offset is taken into account exactly.
pub fn point_to_angles(
    x: f64,
    y: f64,
    width: usize,
    height: usize,
    geom: &CameraGeometry,
    range_m: Option<f64>,
) -> (f64, f64) {
    let k = Intrinsics::from_fov(width, height, geom.short_hfov_deg, geom.short_vfov());
    let ray = k.ray(x, y);
    match range_m {
        Some(range) => {
            let c = geom.long_center();
            aim_angles([ray[0] * range - c[0], ray[1] * range - c[1], range - c[2]])
        }
        None => aim_angles(ray),
    }
}

/// Pointing for the center of `region`.
pub fn region_to_angles(
    region: Region,
    part: &FovPartition,
    geom: &CameraGeometry,
    range_m: Option<f64>,
) -> Result<(f64, f64)> {
    let region = Region::new(region.col, region.row)?;
    if let Some(r) = range_m {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!(
                "target range {r} m must be positive"
            )));
        }
    }
    let (cx, cy) = part.cell_center(region);
    Ok(point_to_angles(
        cx,
        cy,
        part.width(),
        part.height(),
        geom,
        range_m,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gimbal::partition::partition_fov;

    fn geom_100_80() -> CameraGeometry {
        CameraGeometry {
            short_vfov_deg: Some(80.0),
            ..CameraGeometry::default()
        }
    }

    #[test]
    fn boresight_and_edge() {
        let g = geom_100_80();
        let (pan, tilt) = point_to_angles(320.0, 240.0, 640, 480, &g, None);
        assert_eq!((pan, tilt), (0.0, 0.0));
        let (pan, _) = point_to_angles(640.0, 240.0, 640, 480, &g, None);
        assert!((pan - 50.0).abs() < 1e-12);
    }

    #[test]
    fn region_four_two() {
        let g = geom_100_80();
        let part = partition_fov(640, 480).unwrap();
        let (pan, tilt) = region_to_angles(Region { col: 4, row: 2 }, &part, &g, None).unwrap();
        let dx = 0.5 * 50f64.to_radians().tan();
        let dy = 40f64.to_radians().tan() / 6.0;
        assert!((pan - dx.atan().to_degrees()).abs() < 1e-12);
        assert!((pan - 30.79).abs() < 0.01);
        // Row 2 lies above the image center, so the narrow camera tilts up.
        assert!((tilt - (dy / (1.0 + dx * dx).sqrt()).atan().to_degrees()).abs() < 1e-12);
        assert!(tilt > 0.0);
    }

    #[test]
    fn rotation_round_trip() {
        let v = [0.3, -0.2, 0.9];
        let w = camera_to_world(23.0, -11.0, v);
        let back = world_to_camera(23.0, -11.0, w);
        for i in 0..3 {
            assert!((back[i] - v[i]).abs() < 1e-15);
        }
        let (p, t) = aim_angles(camera_to_world(23.0, -11.0, [0.0, 0.0, 1.0]));
        assert!((p - 23.0).abs() < 1e-12 && (t + 11.0).abs() < 1e-12);
    }

    #[test]
    fn parallax_tilts_down_for_near_targets() {
        let g = CameraGeometry::default();
        let part = partition_fov(640, 480).unwrap();
        let r = Region { col: 2, row: 2 };
        let (_, far) = region_to_angles(r, &part, &g, None).unwrap();
        let (_, near) = region_to_angles(r, &part, &g, Some(2.0)).unwrap();
        assert!(near < far);
        assert!(region_to_angles(r, &part, &g, Some(-1.0)).is_err());
    }

    #[test]
    fn default_fovs() {
        let g = CameraGeometry::default();
        assert_eq!(g.long_hfov(), 20.0);
        let t = (g.short_vfov().to_radians() / 2.0).tan();
        assert!((t - 0.75 * 50f64.to_radians().tan()).abs() < 1e-12);
        let k = g.short_intrinsics();
        assert!((k.fx - k.fy).abs() < 1e-9);
    }
}
