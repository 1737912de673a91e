//! The three subcommands behind the `eagle-eye` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigFile, RunConfig};
use crate::gimbal::{
    angles_to_pwm, locate_region, partition_fov, step_servo, GimbalState, PwmCalibration,
    PwmCommand, Region,
};
use crate::image::{level_dims, ImageBuffer, RgbImage};
use crate::localizer::{export_gray, locate, Detection};
use crate::netpbm::{read_image, write_pgm, write_ppm};
use crate::reference::reference_saliency;
use crate::saliency::{
    across_scale_add, build_gaussian_pyramid, center_surround, compute_saliency, normalize_map,
    LEVELS,
};
use crate::sim::{run_closed_loop_with, LoopReport, SceneFile};
use crate::{Error, Result};

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Io = 2,
    DetectionFailed = 3,
    SelftestFailed = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn for_error(err: &Error) -> Self {
        match err {
            Error::Config(_) | Error::InvalidInput(_) => Exit::Usage,
            Error::Io { .. } | Error::Format { .. } => Exit::Io,
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Copy of `img` with the region's bounding box in green and a red cross
/// on the centroid.
pub fn region_overlay(img: &RgbImage, det: &Detection) -> RgbImage {
    let mut out = img.clone();
    let (w, h) = img.dims();
    let (x0, y0, x1, y1) = det.region.bbox;
    let green = [0.0, 1.0, 0.0];
    for x in x0..=x1 {
        out.set_pixel(x, y0, green);
        out.set_pixel(x, y1, green);
    }
    for y in y0..=y1 {
        out.set_pixel(x0, y, green);
        out.set_pixel(x1, y, green);
    }
    let cx = det.region.centroid.0.round() as isize;
    let cy = det.region.centroid.1.round() as isize;
    for d in -5..=5 {
        for (x, y) in [(cx + d, cy), (cx, cy + d)] {
            if (0..w as isize).contains(&x) && (0..h as isize).contains(&y) {
                out.set_pixel(x as usize, y as usize, [1.0, 0.0, 0.0]);
            }
        }
    }
    out
}

/// Saliency on one image file. Writes `saliency.pgm`, `point.txt` and
/// `region_overlay.ppm` into the output directory.
pub fn cmd_saliency(input: &Path, run: &RunConfig) -> Result<Detection> {
    let img = read_image(input)?;
    let (w, h) = img.dims();
    let maps = compute_saliency(&img, &run.settings.pipeline)?;
    let det = locate(&maps.saliency, w, h, &run.settings.localizer)?;
    create_dir(&run.out_dir)?;
    write_pgm(&run.out_dir.join("saliency.pgm"), &det.gray)?;
    write_text(
        &run.out_dir.join("point.txt"),
        &format!("{}\n", det.point.report_line()),
    )?;
    write_ppm(
        &run.out_dir.join("region_overlay.ppm"),
        &region_overlay(&img, &det),
    )?;
    Ok(det)
}

/// Outcome of a simulation command, one report per scene case.
#[derive(Clone, Debug)]
pub struct SimulateOutcome {
    pub reports: Vec<(String, LoopReport)>,
}

impl SimulateOutcome {
    pub fn detection_failed(&self) -> bool {
        self.reports.iter().any(|(_, r)| r.detection_failed)
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.verdict() == "PASS")
    }
}

fn simulate_case(
    scene: &crate::sim::SimScene,
    settings: &ConfigFile,
    max_steps: usize,
    dir: &Path,
) -> Result<LoopReport> {
    create_dir(dir)?;
    let report = run_closed_loop_with(scene, settings, max_steps, |a| {
        let (w, h) = a.short.image.dims();
        let prefix = format!("step{}", a.step);
        write_ppm(&dir.join(format!("{prefix}_short.ppm")), &a.short.image)?;
        write_pgm(
            &dir.join(format!("{prefix}_saliency.pgm")),
            &export_gray(&a.saliency.saliency, w, h)?,
        )?;
        write_ppm(
            &dir.join(format!("{prefix}_overlay.ppm")),
            &region_overlay(&a.short.image, a.detection),
        )?;
        write_ppm(&dir.join(format!("{prefix}_long.ppm")), &a.long.image)
    })?;
    write_text(&dir.join("loop_report.csv"), &report.to_csv())?;
    write_text(&dir.join("pwm_log.csv"), &report.pwm_csv())?;
    write_text(&dir.join("summary.txt"), &report.summary())?;
    Ok(report)
}

/// Closed-loop simulation of a scene file. A sweep writes one subdirectory
/// per cell plus an overall `summary.txt`.
pub fn cmd_simulate(scene_path: &Path, run: &RunConfig) -> Result<SimulateOutcome> {
    let file = SceneFile::load(scene_path)?;
    let cases = file.resolve(&run.settings.camera, run.seed)?;
    create_dir(&run.out_dir)?;
    let mut reports = Vec::with_capacity(cases.len());
    if file.sweep {
        let mut summary = String::new();
        for case in &cases {
            let dir = run.out_dir.join(&case.label);
            let report = simulate_case(&case.scene, &run.settings, file.max_steps, &dir)?;
            summary.push_str(&format!("{}: {}\n", case.label, report.verdict()));
            reports.push((case.label.clone(), report));
        }
        let passed = reports
            .iter()
            .filter(|(_, r)| r.verdict() == "PASS")
            .count();
        summary.push_str(&format!("passed: {passed}/{}\n", reports.len()));
        write_text(&run.out_dir.join("summary.txt"), &summary)?;
    } else {
        for case in &cases {
            let report = simulate_case(&case.scene, &run.settings, file.max_steps, &run.out_dir)?;
            reports.push((case.label.clone(), report));
        }
    }
    Ok(SimulateOutcome { reports })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RgbImage {
    RgbImage::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()]).expect("values in [0, 1)")
}

fn random_buffer(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageBuffer {
    ImageBuffer::from_fn(w, h, |_, _| rng.gen())
}

fn max_rel_err(a: &ImageBuffer, b: &ImageBuffer) -> f64 {
    let scale = a.max().abs().max(b.max().abs()).max(f64::MIN_POSITIVE);
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

type Check = (
    &'static str,
    Box<dyn Fn(&ConfigFile, u64) -> Result<String, String>>,
);

fn checks() -> Vec<Check> {
    vec![
        (
            "oracle equivalence (4 random 64x64 images)",
            Box::new(|cfg, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut worst: f64 = 0.0;
                for _ in 0..4 {
                    let img = random_image(&mut rng, 64, 64);
                    let fast = compute_saliency(&img, &cfg.pipeline).map_err(|e| e.to_string())?;
                    let slow =
                        reference_saliency(&img, &cfg.pipeline).map_err(|e| e.to_string())?;
                    worst = worst.max(max_rel_err(&fast.saliency, &slow));
                }
                if worst <= 1e-6 {
                    Ok(format!("max relative error {worst:.2e}"))
                } else {
                    Err(format!("max relative error {worst:.2e} > 1e-6"))
                }
            }),
        ),
        (
            "pyramid dimension law",
            Box::new(|cfg, _| {
                for (w, h) in [(640, 480), (257, 129), (1, 1), (37, 5)] {
                    let p = build_gaussian_pyramid(
                        &ImageBuffer::new(w, h),
                        &cfg.pipeline.downsample_kernel,
                    )
                    .map_err(|e| e.to_string())?;
                    for k in 0..LEVELS {
                        if p.level(k).dims() != level_dims(w, h, k as u32) {
                            return Err(format!("{w}x{h} level {k}"));
                        }
                    }
                }
                Ok(String::new())
            }),
        ),
        (
            "center-surround of a map with itself is zero",
            Box::new(|_, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
                let a = random_buffer(&mut rng, 40, 30);
                let d = center_surround(&a, &a).map_err(|e| e.to_string())?;
                (d.max() == 0.0).then(String::new).ok_or("nonzero".into())
            }),
        ),
        (
            "saliency is non-negative and gray input has no colour",
            Box::new(|cfg, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
                let img = random_image(&mut rng, 96, 72);
                let maps = compute_saliency(&img, &cfg.pipeline).map_err(|e| e.to_string())?;
                if maps.saliency.min() < 0.0 || maps.features.all_maps().any(|m| m.min() < 0.0) {
                    return Err("negative value".into());
                }
                let gray = RgbImage::from_fn(96, 72, |x, y| [img.pixel(x, y)[0]; 3]).unwrap();
                let maps = compute_saliency(&gray, &cfg.pipeline).map_err(|e| e.to_string())?;
                (maps.conspicuity.color.max() == 0.0)
                    .then(String::new)
                    .ok_or("colour conspicuity on a gray image".into())
            }),
        ),
        (
            "normalization keeps the argmax",
            Box::new(|_, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
                for _ in 0..10 {
                    let m = random_buffer(&mut rng, 33, 21);
                    let n = normalize_map(&m);
                    if n.max() > 0.0 && n.argmax() != m.argmax() {
                        return Err("argmax moved".into());
                    }
                }
                Ok(String::new())
            }),
        ),
        (
            "across-scale addition ignores map order",
            Box::new(|_, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
                let maps: Vec<_> = [(80, 60), (40, 30), (20, 15), (10, 8), (5, 4)]
                    .iter()
                    .map(|&(w, h)| random_buffer(&mut rng, w, h))
                    .collect();
                let a = across_scale_add(&maps, 20, 15).map_err(|e| e.to_string())?;
                let mut rev = maps.clone();
                rev.reverse();
                let b = across_scale_add(&rev, 20, 15).map_err(|e| e.to_string())?;
                (a == b).then(String::new).ok_or("sums differ".into())
            }),
        ),
        (
            "mirror equivariance (257 px wide)",
            Box::new(|cfg, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
                let img = random_image(&mut rng, 257, 64);
                let s = compute_saliency(&img, &cfg.pipeline).map_err(|e| e.to_string())?;
                let m = compute_saliency(&img.mirror_horizontal(), &cfg.pipeline)
                    .map_err(|e| e.to_string())?;
                let err = max_rel_err(&s.saliency.mirror_horizontal(), &m.saliency);
                if err <= 1e-6 {
                    Ok(format!("max relative error {err:.2e}"))
                } else {
                    Err(format!("max relative error {err:.2e}"))
                }
            }),
        ),
        (
            "partition arithmetic",
            Box::new(|_, _| {
                let part = partition_fov(640, 480).map_err(|e| e.to_string())?;
                let r = locate_region(522.0, 239.0, &part).map_err(|e| e.to_string())?;
                if r != Region::new(4, 2).unwrap() {
                    return Err(format!("(522,239) -> ({}, {})", r.col, r.row));
                }
                for cell in Region::all() {
                    let (x, y) = part.cell_center(cell);
                    if locate_region(x, y, &part).map_err(|e| e.to_string())? != cell {
                        return Err(format!("center of ({}, {})", cell.col, cell.row));
                    }
                }
                Ok(String::new())
            }),
        ),
        (
            "PWM round trip and servo limits",
            Box::new(|cfg, seed| {
                let cal: &PwmCalibration = &cfg.control.pwm;
                // Half of one microsecond of pulse, in degrees.
                let half_step = cal.range_deg / f64::from(cal.max_us - cal.min_us);
                for i in 0..=1200 {
                    let a = -cal.range_deg + i as f64 * (2.0 * cal.range_deg / 1200.0);
                    let (p, _) = cal.encode(a);
                    if (cal.decode(p) - a).abs() > half_step + 1e-9 {
                        return Err(format!("round trip of {a} deg"));
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
                let servo = &cfg.control.servo;
                let mut s = GimbalState::centered(servo.limit_deg);
                for _ in 0..2000 {
                    let cmd = PwmCommand {
                        pan_pulse_us: rng.gen_range(500..=2500),
                        tilt_pulse_us: rng.gen_range(500..=2500),
                    };
                    s = step_servo(&s, cmd, servo.dt_s, servo, cal);
                    if s.pan_deg.abs() > servo.limit_deg || s.tilt_deg.abs() > servo.limit_deg {
                        return Err("limit exceeded".into());
                    }
                }
                let (_, sat) = angles_to_pwm(0.0, 0.0, cal);
                (!sat).then(String::new).ok_or("center saturates".into())
            }),
        ),
    ]
}

/// Runs the built-in checks, writing one line per check to `out`.
pub fn cmd_selftest(run: &RunConfig, out: &mut impl Write) -> Result<Vec<CheckResult>> {
    run.settings.validate()?;
    let seed = run.seed.unwrap_or(0);
    let mut results = Vec::new();
    for (name, check) in checks() {
        let (passed, detail) = match check(&run.settings, seed) {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let line = match (passed, detail.is_empty()) {
            (true, true) => format!("PASS {name}"),
            (true, false) => format!("PASS {name}: {detail}"),
            (false, _) => format!("FAIL {name}: {detail}"),
        };
        writeln!(out, "{line}").map_err(|e| Error::io(PathBuf::from("<stdout>"), e))?;
        results.push(CheckResult {
            name,
            passed,
            detail,
        });
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_exit_codes() {
        assert_eq!(Exit::for_error(&Error::Config("x".into())).code(), 1);
        assert_eq!(
            Exit::for_error(&Error::io("p", std::io::Error::other("x"))).code(),
            2
        );
        assert_eq!(Exit::DetectionFailed.code(), 3);
        assert_eq!(Exit::SelftestFailed.code(), 4);
    }
}
