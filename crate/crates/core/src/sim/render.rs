//! Pinhole rendering of the planar scene for either camera.

use rayon::prelude::*;

use crate::gimbal::{camera_to_world, world_to_camera, CameraGeometry, Intrinsics, Vec3};
use crate::image::{ImageBuffer, RgbImage};
use crate::sim::scene::{SimScene, Target, Texture};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CameraKind {
    /// Fixed wide-field camera.
    Short,
    /// Narrow-field camera on the pan/tilt mount.
    Long,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub pan_deg: f64,
    pub tilt_deg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderedView {
    pub image: RgbImage,
    /// Per-pixel fraction of the 2×2 subsamples that landed on a target.
    pub coverage: ImageBuffer,
    pub intrinsics: Intrinsics,
    pub camera: CameraKind,
    pub pose: Pose,
    /// Some rays missed the scene plane; those pixels are black.
    pub plane_missed: bool,
}

const SUBSAMPLES: [(f64, f64); 4] = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];

fn camera_setup(geom: &CameraGeometry, camera: CameraKind) -> (Intrinsics, Vec3) {
    match camera {
        CameraKind::Short => (geom.short_intrinsics(), [0.0; 3]),
        CameraKind::Long => (geom.long_intrinsics(), geom.long_center()),
    }
}

/// Where a camera ray meets the plane `z = distance`.
fn hit_plane(origin: Vec3, dir: Vec3, distance: f64) -> Option<(f64, f64)> {
    if dir[2] <= 0.0 {
        return None;
    }
    let t = (distance - origin[2]) / dir[2];
    (t > 0.0).then(|| (origin[0] + t * dir[0], origin[1] + t * dir[1]))
}

fn first_target(targets: &[Target], x: f64, y: f64) -> Option<&Target> {
    targets.iter().find(|t| t.contains(x, y))
}

/// Renders the scene as seen from `camera` at `pose`. Background is sampled
/// once at the pixel center; target coverage uses a fixed 2×2 pattern.
pub fn render_view(
    scene: &SimScene,
    geom: &CameraGeometry,
    camera: CameraKind,
    pose: Pose,
) -> RenderedView {
    let (k, origin) = camera_setup(geom, camera);
    let texture = Texture::new(&scene.background, scene.seed);
    let world_ray = |u: f64, v: f64| camera_to_world(pose.pan_deg, pose.tilt_deg, k.ray(u, v));

    let rows: Vec<(Vec<[f64; 3]>, Vec<f64>, bool)> = (0..k.height)
        .into_par_iter()
        .map(|y| {
            let mut colors = Vec::with_capacity(k.width);
            let mut cover = Vec::with_capacity(k.width);
            let mut missed = false;
            for x in 0..k.width {
                let (px, py) = (x as f64, y as f64);
                let bg = match hit_plane(origin, world_ray(px + 0.5, py + 0.5), scene.distance_m) {
                    Some((wx, wy)) => texture.sample(wx, wy),
                    None => {
                        missed = true;
                        0.0
                    }
                };
                let mut rgb = [0.0; 3];
                let mut hits = 0usize;
                for (ox, oy) in SUBSAMPLES {
                    let hit = hit_plane(origin, world_ray(px + ox, py + oy), scene.distance_m)
                        .and_then(|(wx, wy)| first_target(&scene.targets, wx, wy));
                    let c = match hit {
                        Some(t) => {
                            hits += 1;
                            t.color
                        }
                        None => [bg; 3],
                    };
                    for i in 0..3 {
                        rgb[i] += c[i] / SUBSAMPLES.len() as f64;
                    }
                }
                colors.push(rgb);
                cover.push(hits as f64 / SUBSAMPLES.len() as f64);
            }
            (colors, cover, missed)
        })
        .collect();

    let plane_missed = rows.iter().any(|r| r.2);
    let colors: Vec<[f64; 3]> = rows.iter().flat_map(|r| r.0.iter().copied()).collect();
    let coverage: Vec<f64> = rows.into_iter().flat_map(|r| r.1).collect();
    let image = RgbImage::from_fn(k.width, k.height, |x, y| colors[y * k.width + x])
        .expect("renderer output is in range");
    RenderedView {
        image,
        coverage: ImageBuffer::from_vec(k.width, k.height, coverage).expect("sized by intrinsics"),
        intrinsics: k,
        camera,
        pose,
        plane_missed,
    }
}

/// Ground-truth fraction of the frame covered by targets.
pub fn target_area_fraction(view: &RenderedView) -> f64 {
    let c = view.coverage.data();
    c.iter().sum::<f64>() / c.len() as f64
}

/// Coverage-weighted target centroid in continuous image coordinates.
pub fn target_centroid(view: &RenderedView) -> Option<(f64, f64)> {
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    let w = view.coverage.width();
    for (i, &c) in view.coverage.data().iter().enumerate() {
        if c > 0.0 {
            sw += c;
            sx += c * ((i % w) as f64 + 0.5);
            sy += c * ((i / w) as f64 + 0.5);
        }
    }
    (sw > 0.0).then(|| (sx / sw, sy / sw))
}

/// Image position of a plane point, if it is in front of the camera.
pub fn project_plane_point(
    geom: &CameraGeometry,
    camera: CameraKind,
    pose: Pose,
    point: [f64; 2],
    distance_m: f64,
) -> Option<(f64, f64)> {
    let (k, origin) = camera_setup(geom, camera);
    let rel = [
        point[0] - origin[0],
        point[1] - origin[1],
        distance_m - origin[2],
    ];
    k.project(world_to_camera(pose.pan_deg, pose.tilt_deg, rel))
}

fn clip_polygon(poly: &[(f64, f64)], w: f64, h: f64) -> Vec<(f64, f64)> {
    // Sutherland–Hodgman against the four image edges.
    type Edge = fn((f64, f64), f64, f64) -> f64;
    let edges: [Edge; 4] = [
        |p, _, _| p.0,
        |p, w, _| w - p.0,
        |p, _, _| p.1,
        |p, _, h| h - p.1,
    ];
    let mut out = poly.to_vec();
    for inside in edges {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        for i in 0..input.len() {
            let cur = input[i];
            let prev = input[(i + input.len() - 1) % input.len()];
            let (dc, dp) = (inside(cur, w, h), inside(prev, w, h));
            if dc >= 0.0 {
                if dp < 0.0 {
                    let t = dp / (dp - dc);
                    out.push((prev.0 + t * (cur.0 - prev.0), prev.1 + t * (cur.1 - prev.1)));
                }
                out.push(cur);
            } else if dp >= 0.0 {
                let t = dp / (dp - dc);
                out.push((prev.0 + t * (cur.0 - prev.0), prev.1 + t * (cur.1 - prev.1)));
            }
        }
    }
    out
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Analytic image-area fraction of `target`: its outline is projected
/// through the pinhole model, clipped to the frame and measured. Exact for
/// rectangles, which stay polygons under projection. `None` if part of the
/// outline is behind the camera.
pub fn predicted_area_fraction(
    target: &Target,
    scene: &SimScene,
    geom: &CameraGeometry,
    camera: CameraKind,
    pose: Pose,
) -> Option<f64> {
    let (k, _) = camera_setup(geom, camera);
    let poly = target
        .outline()
        .into_iter()
        .map(|p| project_plane_point(geom, camera, pose, p, scene.distance_m))
        .collect::<Option<Vec<_>>>()?;
    let (w, h) = (k.width as f64, k.height as f64);
    Some(shoelace(&clip_polygon(&poly, w, h)) / (w * h))
}
