use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// RGB triple with components in `[0, 1]`.
pub type Rgb = [f64; 3];

/// Fallback face color when a mesh carries no color information.
pub const DEFAULT_COLOR: Rgb = [0.5, 0.5, 0.5];

/// Indexed triangle mesh with per-face unit normals and per-face colors.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[u32; 3]>,
    face_normals: Vec<Vector3<f64>>,
    face_colors: Vec<Rgb>,
}

impl TriangleMesh {
    /// Builds a mesh, computing right-hand-rule face normals.
    ///
    /// `face_colors` must either be empty (all faces get [`DEFAULT_COLOR`]) or
    /// have one entry per face.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[u32; 3]>, face_colors: Vec<Rgb>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let face_colors = if face_colors.is_empty() {
            vec![DEFAULT_COLOR; faces.len()]
        } else if face_colors.len() == faces.len() {
            face_colors
        } else {
            return Err(Error::invalid(
                "face_colors",
                format!("{} colors for {} faces", face_colors.len(), faces.len()),
            ));
        };
        let mut face_normals = Vec::with_capacity(faces.len());
        for (j, face) in faces.iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&v| v as usize >= vertices.len()) {
                return Err(Error::invalid(
                    "faces",
                    format!("face {j} references vertex {bad} but only {} exist", vertices.len()),
                ));
            }
            face_normals.push(triangle_normal(&vertices, face).ok_or_else(|| {
                Error::DegenerateGeometry(format!("face {j} has zero area"))
            })?);
        }
        Ok(Self {
            vertices,
            faces,
            face_normals,
            face_colors,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn face_normals(&self) -> &[Vector3<f64>] {
        &self.face_normals
    }

    pub fn face_colors(&self) -> &[Rgb] {
        &self.face_colors
    }

    /// Number of faces `J`.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn triangle(&self, face: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[face];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounds(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for a in 0..3 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    /// Recenters the bounding box on the origin and scales uniformly so the
    /// largest half-extent is 1.
    pub fn normalize_scale(&self) -> Result<Self> {
        let (lo, hi) = self.bounds();
        let center = nalgebra::center(&lo, &hi);
        let half = (hi - lo) / 2.0;
        let max_half = half.x.max(half.y).max(half.z);
        if !(max_half > 0.0) || !max_half.is_finite() {
            return Err(Error::DegenerateGeometry(
                "bounding box has zero extent on every axis".into(),
            ));
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point3::from((v - center) / max_half))
            .collect();
        Self::new(vertices, self.faces.clone(), self.face_colors.clone())
    }

    /// Returns a copy whose face `j` is this mesh's face `order[j]`.
    pub fn permute_faces(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.faces.len() {
            return Err(Error::invalid("order", "permutation length differs from face count"));
        }
        let faces = order.iter().map(|&j| self.faces[j]).collect();
        let colors = order.iter().map(|&j| self.face_colors[j]).collect();
        Self::new(self.vertices.clone(), faces, colors)
    }

    pub fn with_face_colors(mut self, colors: Vec<Rgb>) -> Result<Self> {
        if colors.len() != self.faces.len() {
            return Err(Error::invalid("face_colors", "one color per face required"));
        }
        self.face_colors = colors;
        Ok(self)
    }

    /// Concatenates meshes, offsetting vertex indices.
    pub fn merge(parts: &[TriangleMesh]) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let mut colors = Vec::new();
        for part in parts {
            let base = vertices.len() as u32;
            vertices.extend_from_slice(&part.vertices);
            faces.extend(part.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
            colors.extend_from_slice(&part.face_colors);
        }
        Self::new(vertices, faces, colors)
    }

    pub fn face_centroid(&self, face: usize) -> Point3<f64> {
        let [a, b, c] = self.triangle(face);
        Point3::from((a.coords + b.coords + c.coords) / 3.0)
    }
}

fn triangle_normal(vertices: &[Point3<f64>], face: &[u32; 3]) -> Option<Vector3<f64>> {
    let a = vertices[face[0] as usize];
    let b = vertices[face[1] as usize];
    let c = vertices[face[2] as usize];
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    (len > 0.0 && len.is_finite()).then(|| n / len)
}
