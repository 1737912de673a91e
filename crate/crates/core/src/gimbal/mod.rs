//! Cooperative control of the narrow camera: which cell of the wide view to
//! look at, how to point there, and how the servos get there.

mod geometry;
mod partition;
mod servo;

pub use geometry::{
    aim_angles, camera_to_world, point_to_angles, region_to_angles, world_to_camera,
    CameraGeometry, Intrinsics, Vec3,
};
pub use partition::{locate_region, partition_fov, FovPartition, Region, GRID};
pub use servo::{
    advance_axis, angles_to_pwm, step_servo, GimbalState, PwmCalibration, PwmCommand, ServoModel,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub servo: ServoModel,
    pub pwm: PwmCalibration,
    /// Target depth used to correct for the cameras' offset. Unset treats
    /// targets as distant.
    pub parallax_range_m: Option<f64>,
    /// Servos count as settled once both axes are this close to the command.
    pub settle_tol_deg: f64,
    pub max_settle_ticks: usize,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            servo: ServoModel::default(),
            pwm: PwmCalibration::default(),
            parallax_range_m: None,
            settle_tol_deg: 0.01,
            max_settle_ticks: 250,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        self.servo.validate()?;
        self.pwm.validate()?;
        if let Some(r) = self.parallax_range_m {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(
                    "control.parallax_range_m must be positive".into(),
                ));
            }
        }
        if !(self.settle_tol_deg > 0.0) || self.max_settle_ticks == 0 {
            return Err(Error::Config(
                "control.settle_tol_deg and control.max_settle_ticks must be positive".into(),
            ));
        }
        Ok(())
    }
}
