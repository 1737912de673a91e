mod common;

use eagle_eye::gimbal::{
    advance_axis, locate_region, partition_fov, step_servo, GimbalState, PwmCalibration,
    PwmCommand, Region, ServoModel,
};
use eagle_eye::image::{level_dims, resample, ImageBuffer};
use eagle_eye::saliency::{across_scale_add, center_surround, normalize_map, reduce};
use proptest::prelude::*;

use common::random_buffer;

fn buffer(max_w: usize, max_h: usize) -> impl Strategy<Value = ImageBuffer> {
    (1..=max_w, 1..=max_h).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..10.0, w * h)
            .prop_map(move |data| ImageBuffer::from_vec(w, h, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pwm_round_trip_within_a_tenth_of_a_degree(angle in -60.0f64..=60.0) {
        let cal = PwmCalibration::default();
        let (pulse, saturated) = cal.encode(angle);
        prop_assert!(!saturated);
        prop_assert!((cal.decode(pulse) - angle).abs() <= 0.12);
    }

    #[test]
    fn pwm_saturates_outside_range(angle in 60.2f64..1000.0, negative: bool) {
        let cal = PwmCalibration::default();
        let a = if negative { -angle } else { angle };
        let (pulse, saturated) = cal.encode(a);
        prop_assert!(saturated);
        prop_assert!(pulse == cal.min_us || pulse == cal.max_us);
    }

    #[test]
    fn every_pixel_has_exactly_one_cell(w in 6usize..400, h in 6usize..400, fx in 0.0f64..1.0, fy in 0.0f64..1.0) {
        let part = partition_fov(w, h).unwrap();
        let (x, y) = ((fx * w as f64) as usize, (fy * h as f64) as usize);
        let r = locate_region(x as f64, y as f64, &part).unwrap();
        let owners: Vec<Region> = Region::all()
            .filter(|&c| {
                let (x0, y0, x1, y1) = part.cell_bounds(c);
                (x0..x1).contains(&x) && (y0..y1).contains(&y)
            })
            .collect();
        prop_assert_eq!(owners, vec![r]);
    }

    #[test]
    fn normalization_keeps_argmax_and_range(m in buffer(24, 24)) {
        let n = normalize_map(&m);
        prop_assert!(n.min() >= 0.0 && n.max() <= 1.0);
        if n.max() > 0.0 {
            prop_assert_eq!(n.argmax(), m.argmax());
        }
    }

    #[test]
    fn across_scale_sum_is_order_free(seed: u64, rot in 0usize..5) {
        let dims = [(64, 48), (32, 24), (16, 12), (8, 6), (4, 3)];
        let maps: Vec<_> = dims
            .iter()
            .enumerate()
            .map(|(i, &(w, h))| random_buffer(seed.wrapping_add(i as u64), w, h))
            .collect();
        let mut rotated = maps.clone();
        rotated.rotate_left(rot);
        rotated.swap(0, 4);
        let a = across_scale_add(&maps, 16, 12).unwrap();
        let b = across_scale_add(&rotated, 16, 12).unwrap();
        prop_assert!(a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn center_surround_with_itself_is_zero(m in buffer(30, 30)) {
        prop_assert!(center_surround(&m, &m).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reduce_follows_the_dimension_law(m in buffer(40, 40), levels in 1u32..6) {
        let mut cur = m.clone();
        for _ in 0..levels {
            cur = reduce(&cur, &[1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0]);
        }
        prop_assert_eq!(cur.dims(), level_dims(m.width(), m.height(), levels));
        // Averaging never leaves the input's range.
        prop_assert!(cur.max() <= m.max() + 1e-12 && cur.min() >= m.min() - 1e-12);
    }

    #[test]
    fn resampling_preserves_constants(w in 1usize..200, h in 1usize..200, d in 0u32..5, v in -5.0f64..5.0) {
        let (cw, ch) = level_dims(w, h, d);
        let up = resample(&ImageBuffer::filled(cw, ch, v), w, h).unwrap();
        prop_assert!(up.data().iter().all(|&x| (x - v).abs() <= 1e-12 * v.abs().max(1.0)));
    }

    #[test]
    fn servo_never_overshoots(angle in -60.0f64..60.0, target in -60.0f64..60.0, dt in 0.0f64..0.5) {
        let m = ServoModel::default();
        let next = advance_axis(angle, target, dt, m.tau_s, m.slew_deg_per_s);
        let (lo, hi) = if angle <= target { (angle, target) } else { (target, angle) };
        prop_assert!(next >= lo - 1e-12 && next <= hi + 1e-12);
        prop_assert!((next - angle).abs() <= m.slew_deg_per_s * dt + 1e-9);
    }

    #[test]
    fn servo_respects_limits(seq in prop::collection::vec((0u16..4000, 0u16..4000, 0.0f64..0.2), 1..60)) {
        let m = ServoModel::default();
        let cal = PwmCalibration::default();
        let mut s = GimbalState::centered(m.limit_deg);
        for (pan, tilt, dt) in seq {
            let cmd = PwmCommand { pan_pulse_us: pan, tilt_pulse_us: tilt };
            s = step_servo(&s, cmd, dt, &m, &cal);
            prop_assert!(s.pan_deg.abs() <= m.limit_deg && s.tilt_deg.abs() <= m.limit_deg);
        }
    }
}
