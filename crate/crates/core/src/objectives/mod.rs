//! The four view-quality objectives and the cumulative state they are
//! computed from.
//!
//! * coverage `C`: fraction of faces seen by any visited view;
//! * geometric complexity `Q`: per-face LoG response of rendered normals,
//!   discounted for faces seen repeatedly;
//! * textural complexity `T`: non-flat fraction of an LBP histogram on hue
//!   and saturation;
//! * ray diversity `D`: per-face product of ray-direction variances weighted
//!   by the mean grazing-angle outlier score.
//!
//! Raw values are mapped onto `[0, 1]` by [`smooth_clip`].

mod evidence;
mod functions;
mod lbp;
mod log;
mod params;
mod state;

pub use evidence::{EvidenceSettings, FaceEvidence, ScoredRay, ViewEvidence};
pub use functions::{grazing_angle, outlier_score, smooth_clip};
pub use lbp::{circle_offsets, histogram, lbp_codes, rgb_to_hsv, texture_view_score, Channel};
pub use log::{face_log_responses, log_response, LogKernel};
pub use params::ObjectiveParams;
pub use state::{Objective, RawScores, RayMoments, ScoreState, ScoreVector};
