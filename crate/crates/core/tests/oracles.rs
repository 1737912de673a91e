//! Values checked against independent computations.

mod common;

use eagle_eye::config::ConfigFile;
use eagle_eye::gimbal::{
    aim_angles, partition_fov, region_to_angles, CameraGeometry, PwmCalibration, Region,
};
use eagle_eye::sim::{
    project_plane_point, render_view, run_closed_loop, target_area_fraction, target_centroid,
    Background, CameraKind, Pose, SceneFile, Shape, SimScene, Target,
};

use common::scenes_dir;

fn scene(distance_m: f64, center_m: [f64; 2], size_m: [f64; 2], shape: Shape) -> SimScene {
    SimScene {
        distance_m,
        background: Background::Constant { level: 0.5 },
        targets: vec![Target {
            center_m,
            size_m,
            shape,
            color: [0.9, 0.1, 0.1],
        }],
        seed: 1,
    }
}

/// Square root of the covered pixel area.
fn linear_size(view: &eagle_eye::sim::RenderedView) -> f64 {
    let (w, h) = view.image.dims();
    (target_area_fraction(view) * (w * h) as f64).sqrt()
}

#[test]
fn pointing_angles_for_cell_centers() {
    // Cell (4, 2) of 640x480 is centered at (480, 200). With hfov 100°,
    // fx = fy = 320 / tan 50° and pan = atan(x), tilt = atan(y / hypot(x, 1)).
    let geom = CameraGeometry::default();
    let part = partition_fov(640, 480).unwrap();
    let cases = [
        ((4, 2), 30.789733028832, 7.292631094620),
        ((0, 0), -44.802453534625, 27.856382165972),
        ((5, 5), 44.802453534625, -27.856382165972),
        ((3, 3), 11.234193855496, -8.312935889978),
    ];
    for ((c, r), pan, tilt) in cases {
        let (p, t) = region_to_angles(Region::new(c, r).unwrap(), &part, &geom, None).unwrap();
        assert!((p - pan).abs() < 1e-9, "pan of ({c},{r}): {p}");
        assert!((t - tilt).abs() < 1e-9, "tilt of ({c},{r}): {t}");
    }
    assert!((geom.short_vfov() - 83.58165703059892).abs() < 1e-9);
    assert!((geom.long_vfov() - 15.066760430568214).abs() < 1e-9);
    // 1500 + 500 · 30.7897 / 60 = 1756.58
    assert_eq!(PwmCalibration::default().encode(30.789733028832).0, 1757);
}

#[test]
fn aim_angles_round_trip_through_rotation() {
    for (pan, tilt) in [(0.0, 0.0), (30.0, 10.0), (-45.0, -20.0), (10.0, 55.0)] {
        let d = eagle_eye::gimbal::camera_to_world(pan, tilt, [0.0, 0.0, 1.0]);
        let (p, t) = aim_angles(d);
        assert!((p - pan).abs() < 1e-12 && (t - tilt).abs() < 1e-12);
    }
}

#[test]
fn boresight_target_is_centered() {
    let geom = CameraGeometry::default();
    for (camera, shape) in [
        (CameraKind::Short, Shape::Ellipse),
        (CameraKind::Short, Shape::Rect),
    ] {
        let s = scene(10.0, [0.0, 0.0], [1.0, 0.6], shape);
        let view = render_view(&s, &geom, camera, Pose::default());
        let (x, y) = target_centroid(&view).unwrap();
        assert!(
            (x - 320.0).abs() <= 0.5 && (y - 240.0).abs() <= 0.5,
            "({x}, {y})"
        );
    }
    // The narrow camera sits above the wide one, so aim it with the offset.
    let c = geom.long_center();
    let (pan, tilt) = aim_angles([0.0 - c[0], 0.0 - c[1], 20.0 - c[2]]);
    let s = scene(20.0, [0.0, 0.0], [0.5, 0.5], Shape::Ellipse);
    let view = render_view(
        &s,
        &geom,
        CameraKind::Long,
        Pose {
            pan_deg: pan,
            tilt_deg: tilt,
        },
    );
    let (x, y) = target_centroid(&view).unwrap();
    assert!(
        (x - 320.0).abs() <= 0.5 && (y - 240.0).abs() <= 0.5,
        "({x}, {y})"
    );
}

#[test]
fn doubling_distance_halves_size() {
    let geom = CameraGeometry::default();
    let near = render_view(
        &scene(20.0, [0.0, 0.0], [8.0, 8.0], Shape::Rect),
        &geom,
        CameraKind::Short,
        Pose::default(),
    );
    let far = render_view(
        &scene(40.0, [0.0, 0.0], [8.0, 8.0], Shape::Rect),
        &geom,
        CameraKind::Short,
        Pose::default(),
    );
    let ratio = linear_size(&near) / linear_size(&far);
    assert!((ratio - 2.0).abs() <= 0.02, "ratio {ratio}");
}

#[test]
fn narrow_view_magnifies_by_the_focal_ratio() {
    // Same plane, both cameras at rest: linear magnification is
    // fx_long / fx_short = tan 50° / tan 10°.
    let geom = CameraGeometry::default();
    let expected = 50f64.to_radians().tan() / 10f64.to_radians().tan();
    let s = scene(20.0, [0.0, geom.long_center()[1]], [4.0, 4.0], Shape::Rect);
    let short = render_view(&s, &geom, CameraKind::Short, Pose::default());
    let long = render_view(&s, &geom, CameraKind::Long, Pose::default());
    let ratio = linear_size(&long) / linear_size(&short);
    assert!(
        (ratio / expected - 1.0).abs() <= 0.02,
        "ratio {ratio}, expected {expected}"
    );
}

#[test]
fn area_gain_matches_pinhole_ratio_for_small_central_targets() {
    let geom = CameraGeometry::default();
    let (ks, kl) = (geom.short_intrinsics(), geom.long_intrinsics());
    let expected = (kl.fx * kl.fy) / (ks.fx * ks.fy);
    // 0.5 m at 30 m subtends under 1°.
    let s = scene(
        30.0,
        [0.0, geom.long_center()[1]],
        [0.5, 0.5],
        Shape::Ellipse,
    );
    let short = target_area_fraction(&render_view(&s, &geom, CameraKind::Short, Pose::default()));
    let long = target_area_fraction(&render_view(&s, &geom, CameraKind::Long, Pose::default()));
    let gain = long / short;
    assert!(
        (gain / expected - 1.0).abs() <= 0.05,
        "gain {gain}, expected {expected}"
    );
}

#[test]
fn exact_steering_centers_a_point_target() {
    // With the range known, steering at a cell center puts the plane point
    // seen there within a pixel of the narrow view's center.
    let geom = CameraGeometry::default();
    let part = partition_fov(640, 480).unwrap();
    for d in [5.0, 20.0, 200.0] {
        for cell in Region::all() {
            let p = SimScene::cell_point(&geom, cell, d).unwrap();
            let (pan, tilt) = region_to_angles(cell, &part, &geom, Some(d)).unwrap();
            let pose = Pose {
                pan_deg: pan,
                tilt_deg: tilt,
            };
            let (x, y) = project_plane_point(&geom, CameraKind::Long, pose, p, d).unwrap();
            assert!(
                (x - 320.0).hypot(y - 240.0) <= 1.0,
                "cell {cell:?} at {d} m lands at ({x}, {y})"
            );
        }
    }
}

#[test]
fn loop_report_is_deterministic_and_monotone() {
    let settings = ConfigFile::default();
    let file = SceneFile::load(&scenes_dir().join("replica.toml")).unwrap();
    let case = &file.resolve(&settings.camera, None).unwrap()[0];
    let a = run_closed_loop(&case.scene, &settings, 3).unwrap();
    let b = run_closed_loop(&case.scene, &settings, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    let dist: Vec<f64> = a
        .steps
        .iter()
        .map(|s| s.long_offset_px.map_or(f64::INFINITY, |(x, y)| x.hypot(y)))
        .collect();
    assert!(dist.windows(2).all(|w| w[1] <= w[0]));
    assert!(a.steps.windows(2).all(|w| w[0].time_s < w[1].time_s));
    assert!(
        a.steps
            .iter()
            .all(|s| (0.0..=1.0).contains(&s.short_fraction)
                && (0.0..=1.0).contains(&s.long_fraction))
    );
    assert_eq!(a.verdict(), "PASS");
}

#[test]
fn background_only_scene_is_a_detection_failure() {
    let settings = ConfigFile::default();
    let file = SceneFile::load(&scenes_dir().join("no_target.toml")).unwrap();
    for seed in 0..5 {
        let case = &file.resolve(&settings.camera, Some(seed)).unwrap()[0];
        let r = run_closed_loop(&case.scene, &settings, 3).unwrap();
        assert!(r.detection_failed, "seed {seed}");
        assert!(r.steps.is_empty());
        assert_eq!(r.verdict(), "FAIL");
    }
}
