//! PWM encoding and a first-order, slew-limited servo model.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Linear pulse-width calibration: `center_us` at 0°, `max_us` at
/// `+range_deg`, `min_us` at `-range_deg`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PwmCalibration {
    pub min_us: u16,
    pub max_us: u16,
    pub range_deg: f64,
    pub frame_ms: f64,
}

impl Default for PwmCalibration {
    fn default() -> Self {
        Self {
            min_us: 1000,
            max_us: 2000,
            range_deg: 60.0,
            frame_ms: 20.0,
        }
    }
}

impl PwmCalibration {
    pub fn validate(&self) -> Result<()> {
        if self.min_us >= self.max_us {
            return Err(Error::Config(
                "control.pwm.min_us must be below max_us".into(),
            ));
        }
        if !(self.range_deg > 0.0 && self.range_deg.is_finite()) {
            return Err(Error::Config(
                "control.pwm.range_deg must be positive".into(),
            ));
        }
        if !(self.frame_ms > 0.0) || f64::from(self.max_us) > self.frame_ms * 1000.0 {
            return Err(Error::Config(
                "control.pwm.frame_ms must exceed the longest pulse".into(),
            ));
        }
        Ok(())
    }

    pub fn center_us(&self) -> f64 {
        (f64::from(self.min_us) + f64::from(self.max_us)) / 2.0
    }

    fn half_span_us(&self) -> f64 {
        (f64::from(self.max_us) - f64::from(self.min_us)) / 2.0
    }

    /// Pulse for `angle_deg`, rounded to 1 µs. The flag is set when the
    /// angle lies outside `±range_deg` and the pulse was saturated.
    pub fn encode(&self, angle_deg: f64) -> (u16, bool) {
        let raw = (self.center_us() + self.half_span_us() * angle_deg / self.range_deg).round();
        let (lo, hi) = (f64::from(self.min_us), f64::from(self.max_us));
        let saturated = !(lo..=hi).contains(&raw);
        (raw.clamp(lo, hi) as u16, saturated)
    }

    pub fn decode(&self, pulse_us: u16) -> f64 {
        (f64::from(pulse_us) - self.center_us()) / self.half_span_us() * self.range_deg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PwmCommand {
    pub pan_pulse_us: u16,
    pub tilt_pulse_us: u16,
}

/// Encodes both axes. The flag reports whether either axis saturated.
pub fn angles_to_pwm(pan_deg: f64, tilt_deg: f64, cal: &PwmCalibration) -> (PwmCommand, bool) {
    let (pan_pulse_us, pan_sat) = cal.encode(pan_deg);
    let (tilt_pulse_us, tilt_sat) = cal.encode(tilt_deg);
    (
        PwmCommand {
            pan_pulse_us,
            tilt_pulse_us,
        },
        pan_sat || tilt_sat,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServoModel {
    /// First-order time constant.
    pub tau_s: f64,
    /// Slew-rate limit.
    pub slew_deg_per_s: f64,
    /// Mechanical travel is `±limit_deg`.
    pub limit_deg: f64,
    /// Control tick.
    pub dt_s: f64,
}

impl Default for ServoModel {
    fn default() -> Self {
        Self {
            tau_s: 0.03,
            slew_deg_per_s: 500.0,
            limit_deg: 60.0,
            dt_s: 0.02,
        }
    }
}

impl ServoModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau_s >= 0.0
            && self.slew_deg_per_s > 0.0
            && self.limit_deg > 0.0
            && self.dt_s > 0.0
            && [self.tau_s, self.limit_deg, self.dt_s]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "control.servo needs tau_s >= 0 and positive slew, limit and dt".into(),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GimbalState {
    pub pan_deg: f64,
    pub tilt_deg: f64,
    pub pan_cmd_deg: f64,
    pub tilt_cmd_deg: f64,
    pub limit_deg: f64,
}

impl GimbalState {
    /// At rest on the boresight.
    pub fn centered(limit_deg: f64) -> Self {
        Self {
            pan_deg: 0.0,
            tilt_deg: 0.0,
            pan_cmd_deg: 0.0,
            tilt_cmd_deg: 0.0,
            limit_deg,
        }
    }

    /// Largest remaining distance to the commanded angles.
    pub fn error_deg(&self) -> f64 {
        (self.pan_cmd_deg - self.pan_deg)
            .abs()
            .max((self.tilt_cmd_deg - self.tilt_deg).abs())
    }
}

/// Exact solution over `dt` of `θ' = clamp((target − θ) / τ, ±slew)`.
///
/// While the error exceeds `slew·τ` the axis moves at the slew rate; below
/// that it decays exponentially with time constant `τ`.
pub fn advance_axis(angle: f64, target: f64, dt: f64, tau: f64, slew: f64) -> f64 {
    let err = target - angle;
    let mut mag = err.abs();
    if mag == 0.0 {
        return target;
    }
    if tau <= 0.0 {
        mag = (mag - slew * dt).max(0.0);
        return target - err.signum() * mag;
    }
    let knee = slew * tau;
    let mut remaining = dt;
    if mag > knee {
        let linear = (mag - knee) / slew;
        if linear >= remaining {
            mag -= slew * remaining;
            remaining = 0.0;
        } else {
            mag = knee;
            remaining -= linear;
        }
    }
    if remaining > 0.0 {
        mag *= (-remaining / tau).exp();
    }
    target - err.signum() * mag
}

/// Advances both axes by one tick toward the decoded command. Non-positive
/// `dt` leaves the angles where they are.
pub fn step_servo(
    state: &GimbalState,
    cmd: PwmCommand,
    dt: f64,
    model: &ServoModel,
    cal: &PwmCalibration,
) -> GimbalState {
    let limit = state.limit_deg;
    let pan_cmd = cal.decode(cmd.pan_pulse_us).clamp(-limit, limit);
    let tilt_cmd = cal.decode(cmd.tilt_pulse_us).clamp(-limit, limit);
    let step = |angle: f64, target: f64| {
        if dt > 0.0 {
            advance_axis(angle, target, dt, model.tau_s, model.slew_deg_per_s)
        } else {
            angle
        }
        .clamp(-limit, limit)
    };
    GimbalState {
        pan_deg: step(state.pan_deg, pan_cmd),
        tilt_deg: step(state.tilt_deg, tilt_cmd),
        pan_cmd_deg: pan_cmd,
        tilt_cmd_deg: tilt_cmd,
        limit_deg: limit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_reference_points() {
        let cal = PwmCalibration::default();
        assert_eq!(cal.encode(0.0), (1500, false));
        assert_eq!(cal.encode(60.0), (2000, false));
        assert_eq!(cal.encode(-60.0), (1000, false));
        // 1500 + 500·30.79/60 = 1756.58
        assert_eq!(cal.encode(30.79), (1757, false));
        assert_eq!(cal.encode(75.0), (2000, true));
    }

    #[test]
    fn at_target_is_a_fixed_point() {
        let cal = PwmCalibration::default();
        let (cmd, _) = angles_to_pwm(12.0, -6.0, &cal);
        let mut s = GimbalState::centered(60.0);
        s.pan_deg = cal.decode(cmd.pan_pulse_us);
        s.tilt_deg = cal.decode(cmd.tilt_pulse_us);
        let next = step_servo(&s, cmd, 0.02, &ServoModel::default(), &cal);
        assert_eq!((next.pan_deg, next.tilt_deg), (s.pan_deg, s.tilt_deg));
    }

    #[test]
    fn slew_limits_one_tick() {
        let cal = PwmCalibration::default();
        let model = ServoModel {
            tau_s: 0.0005,
            ..ServoModel::default()
        };
        let (cmd, _) = angles_to_pwm(60.0, 0.0, &cal);
        let next = step_servo(&GimbalState::centered(60.0), cmd, 0.02, &model, &cal);
        assert!(next.pan_deg <= 10.0 + 1e-12);
        assert!((next.pan_deg - 10.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_dt_does_not_move() {
        let cal = PwmCalibration::default();
        let (cmd, _) = angles_to_pwm(30.0, 0.0, &cal);
        let s = step_servo(
            &GimbalState::centered(60.0),
            cmd,
            0.0,
            &ServoModel::default(),
            &cal,
        );
        assert_eq!(s.pan_deg, 0.0);
        assert_eq!(s.pan_cmd_deg, 30.0);
    }
}
