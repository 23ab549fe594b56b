use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use super::bvh::{Hit, MeshBvh};
use super::intersect::Ray;
use crate::error::{Error, Result};
use crate::geometry::{CameraPose, Rgb, TriangleMesh};

/// Face-id value of pixels that hit nothing.
pub const BACKGROUND: u32 = u32::MAX;
pub const BACKGROUND_COLOR: Rgb = [1.0, 1.0, 1.0];
pub const MIN_RESOLUTION: u32 = 16;
/// Lambert terms are clamped from below to this ambient floor.
pub const AMBIENT: f64 = 0.1;

/// Render size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Resolution {
    width: u32,
    height: u32,
}

impl Resolution {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width < MIN_RESOLUTION || height < MIN_RESOLUTION {
            return Err(Error::invalid(
                "resolution",
                format!("{width}x{height} is below the {MIN_RESOLUTION}x{MIN_RESOLUTION} minimum"),
            ));
        }
        Ok(Self { width, height })
    }

    pub fn square(side: u32) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// Per-pixel render output, row-major from the top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewBuffers {
    pub width: u32,
    pub height: u32,
    /// Hit face index or [`BACKGROUND`].
    pub face_id: Vec<u32>,
    /// World-space normal of the hit face; zero on background.
    pub normal: Vec<Vector3<f64>>,
    /// Shaded color: the image of this view.
    pub color: Vec<Rgb>,
    /// Unit world-space direction from the camera center through the pixel.
    pub ray_dir: Vec<Vector3<f64>>,
}

impl ViewBuffers {
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn is_background(&self, idx: usize) -> bool {
        self.face_id[idx] == BACKGROUND
    }

    pub fn foreground_pixels(&self) -> usize {
        self.face_id.iter().filter(|&&f| f != BACKGROUND).count()
    }
}

/// A mesh paired with its acceleration structure.
#[derive(Debug, Clone)]
pub struct Scene {
    mesh: TriangleMesh,
    bvh: MeshBvh,
}

impl Scene {
    pub fn new(mesh: TriangleMesh) -> Self {
        let bvh = MeshBvh::build(&mesh);
        Self { mesh, bvh }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    /// Nearest hit along a unit direction.
    pub fn cast_ray(&self, origin: Point3<f64>, dir: Vector3<f64>) -> Option<Hit> {
        self.bvh.cast(&Ray::new(origin, dir))
    }

    /// Casts one ray through every pixel center and records the nearest
    /// face, its normal, the Lambert-shaded face color and the ray
    /// direction.
    pub fn render_view(&self, pose: &CameraPose, resolution: Resolution) -> ViewBuffers {
        let pose = pose.with_resolution(resolution.width, resolution.height);
        let width = resolution.width;
        let pixels: Vec<(u32, Vector3<f64>, Rgb, Vector3<f64>)> = (0..resolution.pixels())
            .into_par_iter()
            .map(|idx| {
                let (x, y) = ((idx % width as usize) as u32, (idx / width as usize) as u32);
                let dir = pose.pixel_ray(x, y);
                match self.cast_ray(pose.center, dir) {
                    Some(hit) => {
                        let j = hit.face as usize;
                        let n = self.mesh.face_normals()[j];
                        let shade = (-dir.dot(&n)).max(0.0).clamp(AMBIENT, 1.0);
                        let c = self.mesh.face_colors()[j];
                        (hit.face, n, [c[0] * shade, c[1] * shade, c[2] * shade], dir)
                    }
                    None => (BACKGROUND, Vector3::zeros(), BACKGROUND_COLOR, dir),
                }
            })
            .collect();
        let mut buffers = ViewBuffers {
            width,
            height: resolution.height,
            face_id: Vec::with_capacity(pixels.len()),
            normal: Vec::with_capacity(pixels.len()),
            color: Vec::with_capacity(pixels.len()),
            ray_dir: Vec::with_capacity(pixels.len()),
        };
        for (f, n, c, d) in pixels {
            buffers.face_id.push(f);
            buffers.normal.push(n);
            buffers.color.push(c);
            buffers.ray_dir.push(d);
        }
        buffers
    }
}
