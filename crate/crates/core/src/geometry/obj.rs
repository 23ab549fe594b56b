//! Minimal Wavefront OBJ reader and writer.
//!
//! Supports `v` (with optional trailing RGB vertex colors), `f` in any of the
//! `v`, `v/vt`, `v//vn`, `v/vt/vn` forms with negative indices, `mtllib` and
//! `usemtl` with `Kd` diffuse colors. Polygons are fan-triangulated.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Point3;

use super::mesh::{Rgb, TriangleMesh, DEFAULT_COLOR};
use crate::error::{Error, Result};

pub fn load_mesh_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_obj(&text, |name| {
        let mtl = base.join(name);
        fs::read_to_string(&mtl).ok()
    })
}

/// Parses OBJ text. `read_mtl` resolves `mtllib` names; unresolved libraries
/// are ignored and their materials fall back to the default color.
pub fn parse_obj(text: &str, mut read_mtl: impl FnMut(&str) -> Option<String>) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut vertex_colors: Vec<Option<Rgb>> = Vec::new();
    let mut faces = Vec::new();
    let mut face_colors = Vec::new();
    let mut materials: HashMap<String, Rgb> = HashMap::new();
    let mut current_material: Option<Rgb> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let malformed = |message: String| Error::Malformed {
            line: line_no,
            message,
        };
        match keyword {
            "v" => {
                let nums = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| malformed(format!("bad number `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                match nums.len() {
                    3 | 4 => vertex_colors.push(None),
                    6 => vertex_colors.push(Some([nums[3], nums[4], nums[5]])),
                    n => return Err(malformed(format!("vertex with {n} components"))),
                }
                if nums[..3].iter().any(|x| !x.is_finite()) {
                    return Err(malformed("non-finite vertex coordinate".into()));
                }
                vertices.push(Point3::new(nums[0], nums[1], nums[2]));
            }
            "f" => {
                let corners = tokens
                    .map(|t| resolve_index(t, vertices.len()).ok_or_else(|| malformed(format!("bad face index `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                if corners.len() < 3 {
                    return Err(malformed(format!("face with {} vertices", corners.len())));
                }
                for k in 1..corners.len() - 1 {
                    let tri = [corners[0], corners[k], corners[k + 1]];
                    let color = current_material.or_else(|| average_vertex_color(&vertex_colors, &tri));
                    faces.push(tri.map(|v| v as u32));
                    face_colors.push(color.unwrap_or(DEFAULT_COLOR));
                }
            }
            "mtllib" => {
                for name in tokens {
                    if let Some(src) = read_mtl(name) {
                        materials.extend(parse_mtl(&src));
                    } else {
                        log::warn!("line {line_no}: material library `{name}` not found");
                    }
                }
            }
            "usemtl" => {
                let name = tokens.next().unwrap_or("");
                current_material = materials.get(name).copied();
            }
            _ => {}
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptyMesh);
    }
    TriangleMesh::new(vertices, faces, face_colors)
}

fn resolve_index(token: &str, vertex_count: usize) -> Option<usize> {
    let first = token.split('/').next()?;
    let i: i64 = first.parse().ok()?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        vertex_count as i64 + i
    } else {
        return None;
    };
    (0..vertex_count as i64).contains(&resolved).then_some(resolved as usize)
}

fn average_vertex_color(colors: &[Option<Rgb>], tri: &[usize; 3]) -> Option<Rgb> {
    let first = colors[tri[0]]?;
    if tri.iter().all(|&v| colors[v] == Some(first)) {
        return Some(first);
    }
    let mut acc = [0.0; 3];
    for &v in tri {
        let c = colors[v]?;
        for a in 0..3 {
            acc[a] += c[a] / 3.0;
        }
    }
    Some(acc)
}

fn parse_mtl(text: &str) -> HashMap<String, Rgb> {
    let mut out = HashMap::new();
    let mut current = None;
    for line in text.lines() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("newmtl") => current = tokens.next().map(str::to_owned),
            Some("Kd") => {
                let nums: Vec<f64> = tokens.filter_map(|t| t.parse().ok()).collect();
                if let (Some(name), [r, g, b, ..]) = (&current, nums.as_slice()) {
                    out.insert(name.clone(), [*r, *g, *b]);
                }
            }
            _ => {}
        }
    }
    out
}

/// Serializes a mesh as OBJ with per-vertex colors. Vertices are duplicated
/// per face so face colors survive the round trip exactly.
pub fn write_mesh_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, mesh_to_obj(mesh)).map_err(|e| Error::io(path, e))
}

pub fn mesh_to_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for j in 0..mesh.face_count() {
        let c = mesh.face_colors()[j];
        for v in mesh.triangle(j) {
            let _ = writeln!(out, "v {} {} {} {} {} {}", v.x, v.y, v.z, c[0], c[1], c[2]);
        }
    }
    for j in 0..mesh.face_count() {
        let _ = writeln!(out, "f {} {} {}", 3 * j + 1, 3 * j + 2, 3 * j + 3);
    }
    out
}
