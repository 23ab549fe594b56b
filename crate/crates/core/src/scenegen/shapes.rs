//! Procedural test objects, each stressing a different objective.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Rgb, TriangleMesh};

pub const FLAT_COLOR: Rgb = [0.8, 0.45, 0.2];
pub const CHECKER_COLORS: [Rgb; 2] = [[0.85, 0.2, 0.15], [0.15, 0.35, 0.85]];
const DEFAULT_CHECKER_PITCH_DEG: f64 = 30.0;
const DIHEDRAL_GRID: usize = 4;
const CHECKER_BALL_SUBDIV: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SceneKind {
    Cube,
    Icosphere { subdiv: u32 },
    /// Two plates meeting at a crease with the given interior angle.
    Dihedral { angle_deg: f64 },
    /// `n` random, possibly interpenetrating boxes.
    Blocks { n: usize, seed: u64 },
    /// Subdivided sphere with a latitude/longitude checker of the given
    /// angular pitch.
    CheckerBall { pitch_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ColorMode {
    Flat,
    Checker,
    PerFaceRandom { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub color_mode: ColorMode,
    #[serde(default)]
    pub seed: u64,
}

impl SceneSpec {
    pub fn new(kind: SceneKind, color_mode: ColorMode) -> Self {
        Self {
            kind,
            color_mode,
            seed: 0,
        }
    }

    /// Short identifier usable as a directory name.
    pub fn name(&self) -> String {
        let kind = match self.kind {
            SceneKind::Cube => "cube".to_string(),
            SceneKind::Icosphere { subdiv } => format!("icosphere{subdiv}"),
            SceneKind::Dihedral { angle_deg } => format!("dihedral{}", angle_deg.round() as i64),
            SceneKind::Blocks { n, seed } => format!("blocks{n}s{seed}"),
            SceneKind::CheckerBall { pitch_deg } => format!("checkerball{}", pitch_deg.round() as i64),
        };
        let color = match self.color_mode {
            ColorMode::Flat => "flat".to_string(),
            ColorMode::Checker => "checker".to_string(),
            ColorMode::PerFaceRandom { seed } => format!("rand{seed}"),
        };
        format!("{kind}_{color}")
    }

    /// The five reference families used throughout the tests.
    pub fn reference_families() -> Vec<SceneSpec> {
        vec![
            SceneSpec::new(SceneKind::Cube, ColorMode::Flat),
            SceneSpec::new(SceneKind::Icosphere { subdiv: 2 }, ColorMode::PerFaceRandom { seed: 1 }),
            SceneSpec::new(SceneKind::Dihedral { angle_deg: 90.0 }, ColorMode::Flat),
            SceneSpec::new(SceneKind::Blocks { n: 5, seed: 1 }, ColorMode::PerFaceRandom { seed: 2 }),
            SceneSpec::new(SceneKind::CheckerBall { pitch_deg: 30.0 }, ColorMode::Checker),
        ]
    }
}

/// Builds the mesh for `spec`, normalized to the `[-1, 1]` cube.
pub fn generate_scene(spec: &SceneSpec) -> Result<TriangleMesh> {
    let (vertices, faces) = match spec.kind {
        SceneKind::Cube => box_geometry(Vector3::zeros(), Vector3::repeat(1.0)),
        SceneKind::Icosphere { subdiv } => {
            if subdiv > 6 {
                return Err(Error::invalid("subdiv", "at most 6 subdivisions"));
            }
            icosphere(subdiv)
        }
        SceneKind::Dihedral { angle_deg } => {
            if !(angle_deg > 0.0 && angle_deg <= 180.0) {
                return Err(Error::invalid("angle_deg", "must lie in (0, 180]"));
            }
            dihedral(angle_deg.to_radians())
        }
        SceneKind::Blocks { n, seed } => {
            if n == 0 {
                return Err(Error::invalid("n", "at least one block"));
            }
            blocks(n, seed)
        }
        SceneKind::CheckerBall { pitch_deg } => {
            if !(pitch_deg > 0.0) {
                return Err(Error::invalid("pitch_deg", "must be positive"));
            }
            icosphere(CHECKER_BALL_SUBDIV)
        }
    };
    let mesh = TriangleMesh::new(vertices, faces, vec![])?.normalize_scale()?;
    let colors = face_colors(&mesh, spec)?;
    mesh.with_face_colors(colors)
}

fn face_colors(mesh: &TriangleMesh, spec: &SceneSpec) -> Result<Vec<Rgb>> {
    Ok(match spec.color_mode {
        ColorMode::Flat => vec![FLAT_COLOR; mesh.face_count()],
        ColorMode::Checker => {
            let pitch = match spec.kind {
                SceneKind::CheckerBall { pitch_deg } => pitch_deg,
                _ => DEFAULT_CHECKER_PITCH_DEG,
            };
            (0..mesh.face_count())
                .map(|j| {
                    let c = mesh.face_centroid(j).coords;
                    let lon = c.y.atan2(c.x).to_degrees() + 180.0;
                    let lat = (c.z / c.norm().max(1e-12)).clamp(-1.0, 1.0).asin().to_degrees() + 90.0;
                    let cell = (lon / pitch).floor() as i64 + (lat / pitch).floor() as i64;
                    CHECKER_COLORS[cell.rem_euclid(2) as usize]
                })
                .collect()
        }
        ColorMode::PerFaceRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ spec.seed.rotate_left(32));
            (0..mesh.face_count())
                .map(|_| [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)])
                .collect()
        }
    })
}

type Geometry = (Vec<Point3<f64>>, Vec<[u32; 3]>);

fn box_geometry(center: Vector3<f64>, half: Vector3<f64>) -> Geometry {
    let vertices = (0..8)
        .map(|i| {
            let sign = |bit: usize| if i & bit == 0 { -1.0 } else { 1.0 };
            Point3::from(center + Vector3::new(sign(1) * half.x, sign(2) * half.y, sign(4) * half.z))
        })
        .collect();
    let faces = vec![
        [0, 2, 1], [1, 2, 3],
        [4, 5, 6], [5, 7, 6],
        [0, 1, 4], [1, 5, 4],
        [2, 6, 3], [3, 6, 7],
        [0, 4, 2], [2, 4, 6],
        [1, 3, 5], [3, 7, 5],
    ];
    (vertices, faces)
}

fn icosphere(subdiv: u32) -> Geometry {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, t, 0.0), (1.0, t, 0.0), (-1.0, -t, 0.0), (1.0, -t, 0.0),
        (0.0, -1.0, t), (0.0, 1.0, t), (0.0, -1.0, -t), (0.0, 1.0, -t),
        (t, 0.0, -1.0), (t, 0.0, 1.0), (-t, 0.0, -1.0), (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::from(Vector3::new(x, y, z).normalize()))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdiv {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<Point3<f64>>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = (vertices[a as usize].coords + vertices[b as usize].coords).normalize();
                vertices.push(Point3::from(m));
                vertices.len() as u32 - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (vertices, faces)
}

/// Two square plates hinged along the y axis, each tessellated into a grid,
/// with normals on the convex (+z) side.
fn dihedral(angle: f64) -> Geometry {
    let h = angle / 2.0;
    let dirs = [Vector3::new(-h.sin(), 0.0, -h.cos()), Vector3::new(h.sin(), 0.0, -h.cos())];
    let n = DIHEDRAL_GRID;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for dir in dirs {
        let base = vertices.len() as u32;
        for i in 0..=n {
            for k in 0..=n {
                let along = i as f64 / n as f64;
                let y = -1.0 + 2.0 * k as f64 / n as f64;
                vertices.push(Point3::from(dir * (2.0 * along) + Vector3::new(0.0, y, 0.0)));
            }
        }
        let idx = |i: usize, k: usize| base + (i * (n + 1) + k) as u32;
        for i in 0..n {
            for k in 0..n {
                let quad = [idx(i, k), idx(i + 1, k), idx(i + 1, k + 1), idx(i, k + 1)];
                for tri in [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]] {
                    let [a, b, c] = tri.map(|v| vertices[v as usize]);
                    let normal: Vector3<f64> = (b - a).cross(&(c - a));
                    if normal.z >= 0.0 {
                        faces.push(tri);
                    } else {
                        faces.push([tri[0], tri[2], tri[1]]);
                    }
                }
            }
        }
    }
    (vertices, faces)
}

fn blocks(n: usize, seed: u64) -> Geometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for _ in 0..n {
        let center = Vector3::from_fn(|_, _| rng.gen_range(-0.6..0.6));
        let half = Vector3::from_fn(|_, _| rng.gen_range(0.15..0.5));
        let (v, f) = box_geometry(center, half);
        let base = vertices.len() as u32;
        vertices.extend(v);
        faces.extend(f.into_iter().map(|t| t.map(|i| i + base)));
    }
    (vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(mesh: &TriangleMesh) {
        let (lo, hi) = mesh.bounds();
        let half = (hi - lo) / 2.0;
        assert!((half.max() - 1.0).abs() < 1e-9);
        assert!(nalgebra::center(&lo, &hi).coords.norm() < 1e-6);
        for n in mesh.face_normals() {
            assert!((n.norm() - 1.0).abs() < 1e-6);
        }
        for c in mesh.face_colors() {
            assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn face_counts() {
        let count = |kind| generate_scene(&SceneSpec::new(kind, ColorMode::Flat)).unwrap().face_count();
        assert_eq!(count(SceneKind::Cube), 12);
        assert_eq!(count(SceneKind::Icosphere { subdiv: 0 }), 20);
        assert_eq!(count(SceneKind::Icosphere { subdiv: 1 }), 80);
        assert_eq!(count(SceneKind::Icosphere { subdiv: 2 }), 320);
        assert_eq!(count(SceneKind::Dihedral { angle_deg: 90.0 }), 64);
        assert_eq!(count(SceneKind::Blocks { n: 5, seed: 1 }), 60);
        assert_eq!(count(SceneKind::CheckerBall { pitch_deg: 30.0 }), 1280);
    }

    #[test]
    fn reference_families_are_valid() {
        for spec in SceneSpec::reference_families() {
            check_invariants(&generate_scene(&spec).unwrap());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SceneSpec::new(SceneKind::Blocks { n: 5, seed: 1 }, ColorMode::PerFaceRandom { seed: 9 });
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
        let other = SceneSpec::new(SceneKind::Blocks { n: 5, seed: 2 }, ColorMode::PerFaceRandom { seed: 9 });
        assert_ne!(generate_scene(&spec).unwrap(), generate_scene(&other).unwrap());
    }

    #[test]
    fn icosphere_outward_normals() {
        let m = generate_scene(&SceneSpec::new(SceneKind::Icosphere { subdiv: 1 }, ColorMode::Flat)).unwrap();
        for j in 0..m.face_count() {
            assert!(m.face_normals()[j].dot(&m.face_centroid(j).coords) > 0.0);
        }
    }

    #[test]
    fn dihedral_crease_angle() {
        let m = generate_scene(&SceneSpec::new(SceneKind::Dihedral { angle_deg: 90.0 }, ColorMode::Flat)).unwrap();
        let a = m.face_normals()[0];
        let b = m.face_normals()[m.face_count() - 1];
        assert!(a.z > 0.0 && b.z > 0.0);
        assert!((a.dot(&b).acos().to_degrees() - 90.0).abs() < 1e-9);
        let flat = generate_scene(&SceneSpec::new(SceneKind::Dihedral { angle_deg: 180.0 }, ColorMode::Flat)).unwrap();
        assert!(flat.face_normals().iter().all(|n| (n - Vector3::z()).norm() < 1e-12));
    }

    #[test]
    fn checker_uses_both_colors() {
        let m = generate_scene(&SceneSpec::new(SceneKind::CheckerBall { pitch_deg: 30.0 }, ColorMode::Checker)).unwrap();
        for color in CHECKER_COLORS {
            let share = m.face_colors().iter().filter(|&&c| c == color).count() as f64 / m.face_count() as f64;
            assert!(share > 0.3, "share {share}");
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate_scene(&SceneSpec::new(SceneKind::Dihedral { angle_deg: 0.0 }, ColorMode::Flat)).is_err());
        assert!(generate_scene(&SceneSpec::new(SceneKind::Blocks { n: 0, seed: 0 }, ColorMode::Flat)).is_err());
        assert!(generate_scene(&SceneSpec::new(SceneKind::Icosphere { subdiv: 9 }, ColorMode::Flat)).is_err());
    }

    #[test]
    fn spec_json_is_strict() {
        let spec: SceneSpec =
            serde_json::from_str(r#"{"kind": {"icosphere": {"subdiv": 2}}, "color_mode": "flat"}"#).unwrap();
        assert_eq!(spec.kind, SceneKind::Icosphere { subdiv: 2 });
        assert!(serde_json::from_str::<SceneSpec>(r#"{"kind": "cube", "color_mode": "flat", "x": 1}"#).is_err());
    }
}
