use nalgebra::Vector3;

use super::functions::{grazing_angle, outlier_score};
use super::lbp::texture_view_score;
use super::log::{face_log_responses, LogKernel};
use super::params::ObjectiveParams;
use crate::geometry::{CameraPose, TriangleMesh};
use crate::visibility::{observe, Resolution, Scene, ViewBuffers, ViewObservation};

/// One observing ray of a face with its outlier score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredRay {
    pub dir: Vector3<f64>,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceEvidence {
    pub face: u32,
    pub pixel_count: usize,
    /// Mean channel-summed |LoG| of the normal map over the face's pixels.
    pub log_response: f64,
    pub rays: Vec<ScoredRay>,
}

/// Everything the objectives need from one view, computed once per view and
/// folded into any number of score states.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewEvidence {
    pub pose_index: usize,
    /// Viewing direction, used to detect repeated views.
    pub forward: Vector3<f64>,
    /// Sorted by face index.
    pub faces: Vec<FaceEvidence>,
    /// Textured fraction of the image; `None` for an all-background view.
    pub texture: Option<f64>,
}

impl ViewEvidence {
    /// Combines an observation with the geometric buffers it came from and
    /// the (possibly higher resolution) buffers used for texture.
    pub fn from_buffers(
        mesh: &TriangleMesh,
        pose: &CameraPose,
        observation: &ViewObservation,
        geometry: &ViewBuffers,
        texture: &ViewBuffers,
        params: &ObjectiveParams,
    ) -> Self {
        let kernel = LogKernel::new(params.sigma_q);
        let responses = face_log_responses(geometry, &kernel);
        let faces = observation
            .sightings
            .iter()
            .map(|s| {
                let normal = mesh.face_normals()[s.face as usize];
                let log_response = responses
                    .binary_search_by_key(&s.face, |&(f, _)| f)
                    .map_or(0.0, |i| responses[i].1);
                FaceEvidence {
                    face: s.face,
                    pixel_count: s.pixel_count,
                    log_response,
                    rays: s
                        .rays
                        .iter()
                        .map(|&dir| ScoredRay {
                            dir,
                            psi: outlier_score(grazing_angle(&dir, &normal), params),
                        })
                        .collect(),
                }
            })
            .collect();
        Self {
            pose_index: observation.pose_index,
            forward: pose.forward(),
            faces,
            texture: texture_view_score(texture, params.r_t, params.p_t),
        }
    }

    /// Renders `pose` and extracts its evidence.
    pub fn capture(scene: &Scene, pose: &CameraPose, pose_index: usize, settings: &EvidenceSettings) -> Self {
        let geometry = scene.render_view(pose, settings.resolution);
        let observation = observe(&geometry, pose_index);
        let texture_buffers;
        let texture = if settings.texture_resolution == settings.resolution {
            &geometry
        } else {
            texture_buffers = scene.render_view(pose, settings.texture_resolution);
            &texture_buffers
        };
        Self::from_buffers(scene.mesh(), pose, &observation, &geometry, texture, &settings.params)
    }

    pub fn visible_faces(&self) -> impl Iterator<Item = u32> + '_ {
        self.faces.iter().map(|f| f.face)
    }
}

/// Render resolutions and objective parameters used to build evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceSettings {
    /// Resolution for visibility, rays and LoG.
    pub resolution: Resolution,
    /// Resolution for the texture descriptor.
    pub texture_resolution: Resolution,
    pub params: ObjectiveParams,
}

impl Default for EvidenceSettings {
    fn default() -> Self {
        Self {
            resolution: Resolution::square(128).expect("valid"),
            texture_resolution: Resolution::square(256).expect("valid"),
            params: ObjectiveParams::default(),
        }
    }
}
