use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Matrix3x4, Matrix4, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 3.0;
pub const DEFAULT_FOV_Y_DEG: f64 = 50.0;
pub const DEFAULT_RING_ELEVATION_DEG: f64 = 30.0;
pub const DEFAULT_IMAGE_SIZE: u32 = 128;

/// Pinhole intrinsics: vertical field of view plus image size. The principal
/// point sits at the image center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fov_y_deg: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    /// Focal length in pixels.
    pub fn focal(&self) -> f64 {
        0.5 * self.height as f64 / (0.5 * self.fov_y_deg.to_radians()).tan()
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (0.5 * self.width as f64, 0.5 * self.height as f64)
    }

    pub fn fov_x_rad(&self) -> f64 {
        2.0 * (0.5 * self.width as f64 / self.focal()).atan()
    }
}

impl Default for Intrinsics {
    fn default() -> Self {
        Self {
            fov_y_deg: DEFAULT_FOV_Y_DEG,
            width: DEFAULT_IMAGE_SIZE,
            height: DEFAULT_IMAGE_SIZE,
        }
    }
}

/// Camera-to-world pose. Rotation columns are the camera's right, up and
/// backward axes in world coordinates; the camera looks down its local -z
/// with image x to the right and image y downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub rotation: Matrix3<f64>,
    pub center: Point3<f64>,
    pub intrinsics: Intrinsics,
}

impl CameraPose {
    /// Places a camera at `center` looking at `target`. The up hint is +z,
    /// falling back to +x when the view direction is (anti)parallel to it.
    pub fn look_at(center: Point3<f64>, target: Point3<f64>, intrinsics: Intrinsics) -> Result<Self> {
        let forward = target - center;
        let dist = forward.norm();
        if !(dist > 0.0) {
            return Err(Error::invalid("center", "camera center coincides with target"));
        }
        let forward = forward / dist;
        let mut right = forward.cross(&Vector3::z());
        if right.norm() < 1e-6 {
            right = forward.cross(&Vector3::x());
        }
        let right = right.normalize();
        let up = right.cross(&forward);
        Ok(Self {
            rotation: Matrix3::from_columns(&[right, up, -forward]),
            center,
            intrinsics,
        })
    }

    pub fn from_extrinsics(m: &Matrix3x4<f64>, intrinsics: Intrinsics) -> Self {
        Self {
            rotation: m.fixed_view::<3, 3>(0, 0).into_owned(),
            center: Point3::from(m.column(3).into_owned()),
            intrinsics,
        }
    }

    pub fn extrinsics(&self) -> Matrix3x4<f64> {
        let mut m = Matrix3x4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.set_column(3, &self.center.coords);
        m
    }

    /// Row-major 3x4 extrinsics as nested rows.
    pub fn extrinsics_rows(&self) -> [[f64; 4]; 3] {
        let m = self.extrinsics();
        std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
    }

    /// 4x4 homogeneous camera-to-world transform.
    pub fn transform_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 4>(0, 0).copy_from(&self.extrinsics());
        m
    }

    pub fn forward(&self) -> Vector3<f64> {
        -self.rotation.column(2).into_owned()
    }

    pub fn with_resolution(mut self, width: u32, height: u32) -> Self {
        self.intrinsics.width = width;
        self.intrinsics.height = height;
        self
    }

    /// Unit world-space direction of the ray through the center of pixel
    /// `(px, py)`.
    pub fn pixel_ray(&self, px: u32, py: u32) -> Vector3<f64> {
        let f = self.intrinsics.focal();
        let (cx, cy) = self.intrinsics.principal_point();
        let local = Vector3::new((px as f64 + 0.5 - cx) / f, -(py as f64 + 0.5 - cy) / f, -1.0);
        (self.rotation * local).normalize()
    }

    /// Angle in degrees between the two cameras' viewing directions.
    pub fn angular_distance_deg(&self, other: &CameraPose) -> f64 {
        self.forward().dot(&other.forward()).clamp(-1.0, 1.0).acos().to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Random,
    Ring,
}

/// Arguments for [`generate_sphere_poses`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphereSampling {
    pub radius: f64,
    pub count: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub elevation_deg: f64,
    pub fov_y_deg: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for SphereSampling {
    fn default() -> Self {
        Self {
            radius: DEFAULT_RADIUS,
            count: 100,
            mode: SamplingMode::Random,
            seed: 0,
            elevation_deg: DEFAULT_RING_ELEVATION_DEG,
            fov_y_deg: DEFAULT_FOV_Y_DEG,
            width: DEFAULT_IMAGE_SIZE,
            height: DEFAULT_IMAGE_SIZE,
        }
    }
}

/// Candidate camera poses on a sphere around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSet {
    pub poses: Vec<CameraPose>,
    pub radius: f64,
    pub seed: u64,
}

impl PoseSet {
    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = PoseSetDoc {
            radius: self.radius,
            seed: self.seed,
            poses: self
                .poses
                .iter()
                .map(|p| PoseDoc {
                    extrinsics: Extrinsics::Rows(p.extrinsics_rows()),
                    fov_y_deg: p.intrinsics.fov_y_deg,
                    width: p.intrinsics.width,
                    height: p.intrinsics.height,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("pose set serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let doc: PoseSetDoc = serde_json::from_str(text)?;
        let poses = doc
            .poses
            .into_iter()
            .map(|p| {
                let rows = p.extrinsics.rows();
                let m = Matrix3x4::from_fn(|r, c| rows[r][c]);
                CameraPose::from_extrinsics(
                    &m,
                    Intrinsics {
                        fov_y_deg: p.fov_y_deg,
                        width: p.width,
                        height: p.height,
                    },
                )
            })
            .collect();
        Ok(Self {
            poses,
            radius: doc.radius,
            seed: doc.seed,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::json(path, e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseSetDoc {
    radius: f64,
    seed: u64,
    poses: Vec<PoseDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseDoc {
    extrinsics: Extrinsics,
    fov_y_deg: f64,
    width: u32,
    height: u32,
}

/// Row-major 3x4 extrinsics, written as three rows and accepted either as
/// rows or as a flat list of 12 numbers.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Extrinsics {
    Rows([[f64; 4]; 3]),
    Flat([f64; 12]),
}

impl Extrinsics {
    fn rows(&self) -> [[f64; 4]; 3] {
        match self {
            Extrinsics::Rows(r) => *r,
            Extrinsics::Flat(f) => std::array::from_fn(|r| std::array::from_fn(|c| f[4 * r + c])),
        }
    }
}

/// Samples `count` inward-looking poses on a sphere of the given radius.
///
/// `Random` draws centers uniformly on the sphere from a seeded generator;
/// `Ring` spaces azimuths evenly at a fixed elevation.
pub fn generate_sphere_poses(args: &SphereSampling) -> Result<PoseSet> {
    if args.count == 0 {
        return Err(Error::invalid("count", "at least one pose is required"));
    }
    if !(args.radius > 0.0) || !args.radius.is_finite() {
        return Err(Error::invalid("radius", "must be positive"));
    }
    if !(args.fov_y_deg > 0.0 && args.fov_y_deg < 180.0) {
        return Err(Error::invalid("fov_y_deg", "must lie in (0, 180)"));
    }
    let intrinsics = Intrinsics {
        fov_y_deg: args.fov_y_deg,
        width: args.width,
        height: args.height,
    };
    let directions: Vec<Vector3<f64>> = match args.mode {
        SamplingMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.count)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..=1.0);
                    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    Vector3::new(r * phi.cos(), r * phi.sin(), z)
                })
                .collect()
        }
        SamplingMode::Ring => {
            let elev = args.elevation_deg.to_radians();
            (0..args.count)
                .map(|k| {
                    let az = std::f64::consts::TAU * k as f64 / args.count as f64;
                    Vector3::new(elev.cos() * az.cos(), elev.cos() * az.sin(), elev.sin())
                })
                .collect()
        }
    };
    let poses = directions
        .into_iter()
        .map(|d| CameraPose::look_at(Point3::from(d.normalize() * args.radius), Point3::origin(), intrinsics))
        .collect::<Result<Vec<_>>>()?;
    Ok(PoseSet {
        poses,
        radius: args.radius,
        seed: args.seed,
    })
}
