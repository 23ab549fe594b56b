//! Per-pixel ray-cast rendering into face-id, normal, color and ray buffers,
//! and the per-face visibility derived from them.

mod bvh;
mod dump;
mod intersect;
mod observe;
mod render;

pub use bvh::{cast_brute_force, Hit, MeshBvh};
pub use dump::{color_image, dump_buffers, face_id_image, normal_image, save_png};
pub use intersect::{Ray, T_MIN};
pub use observe::{observe, FaceSighting, ViewObservation, MAX_RAYS_PER_FACE};
pub use render::{Resolution, Scene, ViewBuffers, AMBIENT, BACKGROUND, BACKGROUND_COLOR, MIN_RESOLUTION};
