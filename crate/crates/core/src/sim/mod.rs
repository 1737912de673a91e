//! Synthetic stand-in for the two-camera rig.

mod closed_loop;
mod render;
mod scene;

pub use closed_loop::{
    run_closed_loop, run_closed_loop_with, LoopReport, PwmLogRow, StepArtifacts, StepRecord,
};
pub use render::{
    predicted_area_fraction, project_plane_point, render_view, target_area_fraction,
    target_centroid, CameraKind, Pose, RenderedView,
};
pub use scene::{Background, SceneCase, SceneFile, Shape, SimScene, Target, TargetSpec};
