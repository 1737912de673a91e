//! Detect, steer, look: the two-camera loop run against a rendered scene.

use std::fmt::Write as _;

use crate::config::ConfigFile;
use crate::gimbal::{
    angles_to_pwm, locate_region, partition_fov, region_to_angles, step_servo, GimbalState,
    PwmCommand, Region,
};
use crate::localizer::{locate, Detection, SalientPoint};
use crate::saliency::{compute_saliency, SaliencyMaps};
use crate::sim::render::{
    predicted_area_fraction, render_view, target_area_fraction, target_centroid, CameraKind, Pose,
    RenderedView,
};
use crate::sim::scene::SimScene;
use crate::{Error, Result};

/// One detect-steer-look cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Simulated time once the servos have settled.
    pub time_s: f64,
    pub point: SalientPoint,
    pub peak_saliency: f64,
    pub region: Region,
    pub cmd_pan_deg: f64,
    pub cmd_tilt_deg: f64,
    pub pwm: PwmCommand,
    pub pwm_saturated: bool,
    pub actual_pan_deg: f64,
    pub actual_tilt_deg: f64,
    pub settle_ticks: usize,
    pub settled: bool,
    pub short_fraction: f64,
    pub long_fraction: f64,
    /// Pinhole prediction of `long_fraction` at the actual pose.
    pub long_predicted_fraction: Option<f64>,
    /// Target centroid minus long-view center, in pixels; `None` when the
    /// target is out of view.
    pub long_offset_px: Option<(f64, f64)>,
}

/// One servo tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwmLogRow {
    pub tick: usize,
    pub time_s: f64,
    pub pwm: PwmCommand,
    pub pan_deg: f64,
    pub tilt_deg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopReport {
    pub steps: Vec<StepRecord>,
    pub pwm_log: Vec<PwmLogRow>,
    /// Target fraction of the wide view, from the renderer.
    pub short_fraction: f64,
    pub detection_failed: bool,
    /// The last step left the target inside the central third of the long
    /// view in both directions.
    pub centered: bool,
    pub long_width: usize,
    pub long_height: usize,
}

/// What the loop saw and did in one step, for callers that save frames.
pub struct StepArtifacts<'a> {
    pub step: usize,
    pub short: &'a RenderedView,
    pub saliency: &'a SaliencyMaps,
    pub detection: &'a Detection,
    pub long: &'a RenderedView,
}

fn in_central_third(offset: Option<(f64, f64)>, w: usize, h: usize) -> bool {
    offset.is_some_and(|(dx, dy)| dx.abs() <= w as f64 / 6.0 && dy.abs() <= h as f64 / 6.0)
}

impl LoopReport {
    pub fn final_step(&self) -> Option<&StepRecord> {
        self.steps.last()
    }

    pub fn long_fraction(&self) -> Option<f64> {
        self.final_step().map(|s| s.long_fraction)
    }

    pub fn verdict(&self) -> &'static str {
        if !self.detection_failed && self.centered {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "step,time_s,point_x,point_y,gray,peak_saliency,region_col,region_row,\
             cmd_pan_deg,cmd_tilt_deg,pan_pulse_us,tilt_pulse_us,pwm_saturated,\
             actual_pan_deg,actual_tilt_deg,settle_ticks,settled,short_fraction,\
             long_fraction,long_predicted_fraction,long_offset_x_px,long_offset_y_px\n",
        );
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.6}"));
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{:.3},{},{},{},{:.9},{},{},{:.6},{:.6},{},{},{},{:.6},{:.6},{},{},{:.6},{:.6},{},{},{}",
                s.step,
                s.time_s,
                s.point.x,
                s.point.y,
                s.point.gray,
                s.peak_saliency,
                s.region.col,
                s.region.row,
                s.cmd_pan_deg,
                s.cmd_tilt_deg,
                s.pwm.pan_pulse_us,
                s.pwm.tilt_pulse_us,
                s.pwm_saturated,
                s.actual_pan_deg,
                s.actual_tilt_deg,
                s.settle_ticks,
                s.settled,
                s.short_fraction,
                s.long_fraction,
                opt(s.long_predicted_fraction),
                opt(s.long_offset_px.map(|o| o.0)),
                opt(s.long_offset_px.map(|o| o.1)),
            );
        }
        out
    }

    pub fn pwm_csv(&self) -> String {
        let mut out = String::from("t_s,pan_pulse_us,tilt_pulse_us,pan_deg,tilt_deg\n");
        for r in &self.pwm_log {
            let _ = writeln!(
                out,
                "{:.3},{},{},{:.6},{:.6}",
                r.time_s, r.pwm.pan_pulse_us, r.pwm.tilt_pulse_us, r.pan_deg, r.tilt_deg
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let pct = |v: f64| format!("{:.3}%", 100.0 * v);
        let _ = writeln!(out, "steps: {}", self.steps.len());
        let _ = writeln!(
            out,
            "short-view target fraction: {}",
            pct(self.short_fraction)
        );
        if let Some(s) = self.final_step() {
            let _ = writeln!(out, "salient point: {}", s.point.report_line());
            let _ = writeln!(out, "region: ({}, {})", s.region.col, s.region.row);
            let _ = writeln!(
                out,
                "gimbal: pan {:.3} deg, tilt {:.3} deg",
                s.actual_pan_deg, s.actual_tilt_deg
            );
            let _ = writeln!(out, "long-view target fraction: {}", pct(s.long_fraction));
            if let Some(p) = s.long_predicted_fraction {
                let _ = writeln!(out, "long-view predicted fraction: {}", pct(p));
            }
            if self.short_fraction > 0.0 {
                let _ = writeln!(
                    out,
                    "area gain: {:.2}x",
                    s.long_fraction / self.short_fraction
                );
            }
            match s.long_offset_px {
                Some((dx, dy)) => {
                    let _ = writeln!(out, "long-view offset: ({dx:.2}, {dy:.2}) px");
                }
                None => {
                    let _ = writeln!(out, "long-view offset: target not in view");
                }
            }
        }
        let _ = writeln!(out, "detection failed: {}", self.detection_failed);
        let _ = writeln!(out, "verdict: {}", self.verdict());
        out
    }
}

/// [`run_closed_loop_with`] without an observer.
pub fn run_closed_loop(
    scene: &SimScene,
    settings: &ConfigFile,
    max_steps: usize,
) -> Result<LoopReport> {
    run_closed_loop_with(scene, settings, max_steps, |_| Ok(()))
}

/// Runs up to `max_steps` cycles. Each one renders the wide view, finds the
/// salient region, steers the narrow camera at that region's center, ticks
/// the servos until they settle and renders the narrow view. The loop stops
/// early when a step selects the same region as the previous one, or when
/// the saliency peak is under the detection floor.
pub fn run_closed_loop_with(
    scene: &SimScene,
    settings: &ConfigFile,
    max_steps: usize,
    mut observe: impl FnMut(&StepArtifacts) -> Result<()>,
) -> Result<LoopReport> {
    settings.validate()?;
    scene.validate()?;
    if max_steps == 0 {
        return Err(Error::invalid("max_steps must be at least 1"));
    }
    let geom = &settings.camera;
    let ctl = &settings.control;
    let cal = &ctl.pwm;
    let short = render_view(scene, geom, CameraKind::Short, Pose::default());
    let short_fraction = target_area_fraction(&short);
    let (sw, sh) = short.image.dims();
    let part = partition_fov(sw, sh)?;

    let mut state = GimbalState::centered(ctl.servo.limit_deg);
    let mut tick = 0usize;
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut pwm_log = Vec::new();
    let mut detection_failed = false;

    for step in 0..max_steps {
        // The wide camera is fixed, so its frame is the same every cycle.
        let maps = compute_saliency(&short.image, &settings.pipeline)?;
        let det = locate(&maps.saliency, sw, sh, &settings.localizer)?;
        if !det.is_above_floor(&settings.localizer) {
            detection_failed = true;
            break;
        }
        let (cx, cy) = det.region.centroid;
        let region = locate_region(cx, cy, &part)?;
        if steps.last().is_some_and(|prev| prev.region == region) {
            break;
        }
        let (pan, tilt) = region_to_angles(region, &part, geom, ctl.parallax_range_m)?;
        let (pwm, saturated) = angles_to_pwm(pan, tilt, cal);

        let mut ticks = 0;
        loop {
            state = step_servo(&state, pwm, ctl.servo.dt_s, &ctl.servo, cal);
            ticks += 1;
            tick += 1;
            let time_s = tick as f64 * ctl.servo.dt_s;
            pwm_log.push(PwmLogRow {
                tick,
                time_s,
                pwm,
                pan_deg: state.pan_deg,
                tilt_deg: state.tilt_deg,
            });
            if state.error_deg() <= ctl.settle_tol_deg || ticks >= ctl.max_settle_ticks {
                break;
            }
        }
        let pose = Pose {
            pan_deg: state.pan_deg,
            tilt_deg: state.tilt_deg,
        };
        let long = render_view(scene, geom, CameraKind::Long, pose);
        let (lw, lh) = long.image.dims();
        let long_offset_px =
            target_centroid(&long).map(|(x, y)| (x - lw as f64 / 2.0, y - lh as f64 / 2.0));
        let long_predicted_fraction = if scene.targets.is_empty() {
            None
        } else {
            scene
                .targets
                .iter()
                .map(|t| predicted_area_fraction(t, scene, geom, CameraKind::Long, pose))
                .sum::<Option<f64>>()
        };

        observe(&StepArtifacts {
            step,
            short: &short,
            saliency: &maps,
            detection: &det,
            long: &long,
        })?;
        steps.push(StepRecord {
            step,
            time_s: tick as f64 * ctl.servo.dt_s,
            point: det.point,
            peak_saliency: det.peak_saliency,
            region,
            cmd_pan_deg: state.pan_cmd_deg,
            cmd_tilt_deg: state.tilt_cmd_deg,
            pwm,
            pwm_saturated: saturated,
            actual_pan_deg: state.pan_deg,
            actual_tilt_deg: state.tilt_deg,
            settle_ticks: ticks,
            settled: state.error_deg() <= ctl.settle_tol_deg,
            short_fraction,
            long_fraction: target_area_fraction(&long),
            long_predicted_fraction,
            long_offset_px,
        });
    }

    let (lw, lh) = (geom.long_resolution[0], geom.long_resolution[1]);
    let centered = steps
        .last()
        .is_some_and(|s| in_central_third(s.long_offset_px, lw, lh));
    Ok(LoopReport {
        steps,
        pwm_log,
        short_fraction,
        detection_failed,
        centered,
        long_width: lw,
        long_height: lh,
    })
}
