use std::fs;
use std::path::Path;

use nalgebra::{Matrix3x4, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CameraPose, Intrinsics, PoseSet};
use crate::planner::Trajectory;

/// Radiance-field style camera list: shared horizontal field of view and a
/// camera-to-world matrix per frame (x right, y up, camera looking down -z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transforms {
    pub camera_angle_x: f64,
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub file_path: String,
    pub transform_matrix: [[f64; 4]; 4],
}

impl Frame {
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| self.transform_matrix[r][c])
    }

    /// Upper 3x4 block of the transform.
    pub fn extrinsics(&self) -> Matrix3x4<f64> {
        Matrix3x4::from_fn(|r, c| self.transform_matrix[r][c])
    }
}

impl Transforms {
    /// Frames for the trajectory's poses in visiting order. Frame paths
    /// follow `images/<pose index>` without extension.
    pub fn from_trajectory(candidates: &PoseSet, trajectory: &Trajectory) -> Result<Self> {
        let first = trajectory
            .steps
            .first()
            .ok_or_else(|| Error::invalid("trajectory", "trajectory has no steps"))?;
        let pose_at = |k: usize| {
            candidates
                .poses
                .get(k)
                .ok_or_else(|| Error::invalid("trajectory", format!("pose {k} out of range (0..{})", candidates.len())))
        };
        let camera_angle_x = pose_at(first.pose)?.intrinsics.fov_x_rad();
        let frames = trajectory
            .steps
            .iter()
            .map(|s| {
                let m = pose_at(s.pose)?.transform_matrix();
                Ok(Frame {
                    file_path: format!("./images/{}", s.pose),
                    transform_matrix: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)])),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { camera_angle_x, frames })
    }

    /// Camera poses recovered from the frames, with `width x height` images
    /// at the stored horizontal field of view.
    pub fn poses(&self, width: u32, height: u32) -> Vec<CameraPose> {
        let aspect = width as f64 / height as f64;
        let fov_y = 2.0 * ((0.5 * self.camera_angle_x).tan() / aspect).atan();
        let intrinsics = Intrinsics {
            fov_y_deg: fov_y.to_degrees(),
            width,
            height,
        };
        self.frames
            .iter()
            .map(|f| CameraPose::from_extrinsics(&f.extrinsics(), intrinsics))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transforms serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let t: Self = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if !(t.camera_angle_x > 0.0 && t.camera_angle_x < std::f64::consts::PI) {
            return Err(Error::invalid("camera_angle_x", format!("{} is not in (0, pi)", t.camera_angle_x)));
        }
        Ok(t)
    }
}

/// Writes the transforms file for `trajectory` to `out`.
pub fn export_transforms(candidates: &PoseSet, trajectory: &Trajectory, out: impl AsRef<Path>) -> Result<Transforms> {
    let out = out.as_ref();
    let t = Transforms::from_trajectory(candidates, trajectory)?;
    fs::write(out, t.to_json() + "\n").map_err(|e| Error::io(out, e))?;
    Ok(t)
}
