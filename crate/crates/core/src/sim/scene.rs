//! Planar scenes and the scene file format.
//!
//! The world is a fronto-parallel plane `distance_m` in front of the wide
//! camera, carrying a background texture and flat coloured targets. Plane
//! coordinates are metres with `+x` right and `+y` up, origin on the wide
//! camera's axis.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gimbal::{partition_fov, CameraGeometry, Region};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Background {
    Constant {
        level: f64,
    },
    /// Linear ramp along `x` from `left` to `right` over `span_m`, centered
    /// on the axis and flat beyond.
    Gradient {
        left: f64,
        right: f64,
        span_m: f64,
    },
    /// Smooth value noise: `level ± amplitude` on a grid of `cell_m` cells.
    Noise {
        level: f64,
        amplitude: f64,
        cell_m: f64,
    },
}

impl Default for Background {
    fn default() -> Self {
        Background::Noise {
            level: 0.5,
            amplitude: 0.1,
            cell_m: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Rect,
    Ellipse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub center_m: [f64; 2],
    pub size_m: [f64; 2],
    pub shape: Shape,
    pub color: [f64; 3],
}

impl Target {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.center_m[0]) / (self.size_m[0] / 2.0);
        let dy = (y - self.center_m[1]) / (self.size_m[1] / 2.0);
        match self.shape {
            Shape::Rect => dx.abs() <= 1.0 && dy.abs() <= 1.0,
            Shape::Ellipse => dx * dx + dy * dy <= 1.0,
        }
    }

    /// Outline as a closed polygon on the plane (counter-clockwise).
    pub fn outline(&self) -> Vec<[f64; 2]> {
        let [cx, cy] = self.center_m;
        let [hw, hh] = [self.size_m[0] / 2.0, self.size_m[1] / 2.0];
        match self.shape {
            Shape::Rect => vec![
                [cx - hw, cy - hh],
                [cx + hw, cy - hh],
                [cx + hw, cy + hh],
                [cx - hw, cy + hh],
            ],
            Shape::Ellipse => (0..720)
                .map(|i| {
                    let a = i as f64 / 720.0 * std::f64::consts::TAU;
                    [cx + hw * a.cos(), cy + hh * a.sin()]
                })
                .collect(),
        }
    }

    /// Area on the plane in square metres.
    pub fn area_m2(&self) -> f64 {
        let a = self.size_m[0] * self.size_m[1];
        match self.shape {
            Shape::Rect => a,
            Shape::Ellipse => a * std::f64::consts::FRAC_PI_4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimScene {
    pub distance_m: f64,
    pub background: Background,
    pub targets: Vec<Target>,
    pub seed: u64,
}

impl SimScene {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m.is_finite() && self.distance_m > 0.0) {
            return Err(Error::Config("scene distance must be positive".into()));
        }
        for t in &self.targets {
            if !(t.size_m[0] > 0.0 && t.size_m[1] > 0.0) {
                return Err(Error::Config("target sizes must be positive".into()));
            }
            if t.color.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::Config("target colours must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    /// Plane point seen at the center of wide-view cell `region`.
    pub fn cell_point(geom: &CameraGeometry, region: Region, distance_m: f64) -> Result<[f64; 2]> {
        let [w, h] = geom.short_resolution;
        let part = partition_fov(w, h)?;
        let (u, v) = part.cell_center(region);
        let ray = geom.short_intrinsics().ray(u, v);
        Ok([ray[0] * distance_m, ray[1] * distance_m])
    }

    /// Target size `[w, h]` whose wide-view image covers `fraction` of the
    /// frame. Exact for this scene geometry: the plane is parallel to the
    /// wide camera's image plane, so areas scale by `fx·fy / d²`.
    pub fn size_for_short_fraction(
        geom: &CameraGeometry,
        distance_m: f64,
        fraction: f64,
        aspect: f64,
        shape: Shape,
    ) -> [f64; 2] {
        let k = geom.short_intrinsics();
        let pixels = fraction * (k.width * k.height) as f64;
        let mut area = pixels * distance_m * distance_m / (k.fx * k.fy);
        if shape == Shape::Ellipse {
            area /= std::f64::consts::FRAC_PI_4;
        }
        let h = (area / aspect).sqrt();
        [aspect * h, h]
    }
}

/// Background sampler with its noise grid generated from the scene seed.
pub(crate) struct Texture {
    background: Background,
    grid: Vec<f64>,
}

const NOISE_GRID: usize = 512;

impl Texture {
    pub(crate) fn new(background: &Background, seed: u64) -> Self {
        let grid = match background {
            Background::Noise {
                level, amplitude, ..
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..NOISE_GRID * NOISE_GRID)
                    .map(|_| level + amplitude * rng.gen_range(-1.0..=1.0))
                    .collect()
            }
            _ => Vec::new(),
        };
        Self {
            background: background.clone(),
            grid,
        }
    }

    fn grid_at(&self, i: i64, j: i64) -> f64 {
        let n = NOISE_GRID as i64;
        self.grid[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize]
    }

    pub(crate) fn sample(&self, x: f64, y: f64) -> f64 {
        let v = match self.background {
            Background::Constant { level } => level,
            Background::Gradient {
                left,
                right,
                span_m,
            } => {
                let t = ((x + span_m / 2.0) / span_m).clamp(0.0, 1.0);
                left + (right - left) * t
            }
            Background::Noise { cell_m, .. } => {
                let (gx, gy) = (x / cell_m, y / cell_m);
                let (i, j) = (gx.floor(), gy.floor());
                let (fx, fy) = (gx - i, gy - j);
                let (i, j) = (i as i64, j as i64);
                let top = self.grid_at(i, j) * (1.0 - fx) + self.grid_at(i + 1, j) * fx;
                let bottom = self.grid_at(i, j + 1) * (1.0 - fx) + self.grid_at(i + 1, j + 1) * fx;
                top * (1.0 - fy) + bottom * fy
            }
        };
        v.clamp(0.0, 1.0)
    }
}

/// A target as written in a scene file. Exactly one of `center_m` / `cell`
/// and one of `size_m` / `short_fraction` must be given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(default = "default_shape")]
    pub shape: Shape,
    pub color: [f64; 3],
    pub center_m: Option<[f64; 2]>,
    /// Place the target at the center of this wide-view cell, `[col, row]`.
    pub cell: Option<[usize; 2]>,
    pub size_m: Option<[f64; 2]>,
    /// Size the target to cover this fraction of the wide view.
    pub short_fraction: Option<f64>,
    /// Width over height when sizing by `short_fraction`.
    #[serde(default = "default_aspect")]
    pub aspect: f64,
}

fn default_shape() -> Shape {
    Shape::Rect
}

fn default_aspect() -> f64 {
    1.0
}

/// Scene file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub distance_m: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub background: Background,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    /// Repeat the run with the first target at each of the 36 cell centers.
    #[serde(default)]
    pub sweep: bool,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    3
}

/// One simulation to run, labelled for output.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneCase {
    pub label: String,
    pub scene: SimScene,
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("scene: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn resolve_target(
        &self,
        spec: &TargetSpec,
        geom: &CameraGeometry,
        cell_override: Option<Region>,
    ) -> Result<Target> {
        let d = self.distance_m;
        let center_m = match (cell_override, spec.center_m, spec.cell) {
            (Some(r), _, _) => SimScene::cell_point(geom, r, d)?,
            (None, Some(c), None) => c,
            (None, None, Some([col, row])) => {
                SimScene::cell_point(geom, Region::new(col, row)?, d)?
            }
            _ => {
                return Err(Error::Config(
                    "each target needs exactly one of center_m or cell".into(),
                ))
            }
        };
        let size_m = match (spec.size_m, spec.short_fraction) {
            (Some(s), None) => s,
            (None, Some(f)) if f > 0.0 && f < 1.0 && spec.aspect > 0.0 => {
                SimScene::size_for_short_fraction(geom, d, f, spec.aspect, spec.shape)
            }
            _ => {
                return Err(Error::Config(
                    "each target needs exactly one of size_m or short_fraction in (0, 1)".into(),
                ))
            }
        };
        Ok(Target {
            center_m,
            size_m,
            shape: spec.shape,
            color: spec.color,
        })
    }

    /// Expands the file into concrete scenes. `seed` overrides the file's.
    pub fn resolve(&self, geom: &CameraGeometry, seed: Option<u64>) -> Result<Vec<SceneCase>> {
        let seed = seed.unwrap_or(self.seed);
        let build = |cell: Option<Region>| -> Result<SimScene> {
            let targets = self
                .targets
                .iter()
                .enumerate()
                .map(|(i, t)| self.resolve_target(t, geom, if i == 0 { cell } else { None }))
                .collect::<Result<Vec<_>>>()?;
            let scene = SimScene {
                distance_m: self.distance_m,
                background: self.background.clone(),
                targets,
                seed,
            };
            scene.validate()?;
            Ok(scene)
        };
        if self.sweep {
            if self.targets.is_empty() {
                return Err(Error::Config("a sweep needs at least one target".into()));
            }
            Region::all()
                .map(|r| {
                    Ok(SceneCase {
                        label: format!("cell_{}_{}", r.col, r.row),
                        scene: build(Some(r))?,
                    })
                })
                .collect()
        } else {
            Ok(vec![SceneCase {
                label: "run".into(),
                scene: build(None)?,
            }])
        }
    }
}
