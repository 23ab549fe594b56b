//! Meshes, OBJ input and camera poses on a viewing sphere.

mod camera;
mod mesh;
mod obj;

pub use camera::{
    generate_sphere_poses, CameraPose, Intrinsics, PoseSet, SamplingMode, SphereSampling, DEFAULT_FOV_Y_DEG,
    DEFAULT_IMAGE_SIZE, DEFAULT_RADIUS, DEFAULT_RING_ELEVATION_DEG,
};
pub use mesh::{Rgb, TriangleMesh, DEFAULT_COLOR};
pub use obj::{load_mesh_obj, mesh_to_obj, parse_obj, write_mesh_obj};
