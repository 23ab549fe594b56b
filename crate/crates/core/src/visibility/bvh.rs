//! Bounding-volume hierarchy over mesh triangles.

use nalgebra::{Point3, Vector3};

use super::intersect::Ray;
use crate::geometry::TriangleMesh;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    lo: Point3<f64>,
    hi: Point3<f64>,
    /// Leaf: range into `order`. Inner: `start` is the right child index and
    /// the left child immediately follows this node.
    start: u32,
    count: u32,
}

/// Nearest ray hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub face: u32,
    pub t: f64,
}

impl Hit {
    /// Nearest-first ordering with the lower face index winning exact ties.
    fn closer_than(&self, other: &Option<Hit>) -> bool {
        match other {
            None => true,
            Some(o) => self.t < o.t || (self.t == o.t && self.face < o.face),
        }
    }
}

/// Ray-casting acceleration structure bound to one mesh.
#[derive(Debug, Clone)]
pub struct MeshBvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    triangles: Vec<[Point3<f64>; 3]>,
}

impl MeshBvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let triangles: Vec<_> = (0..mesh.face_count()).map(|j| mesh.triangle(j)).collect();
        let centroids: Vec<Point3<f64>> = triangles
            .iter()
            .map(|t| Point3::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
            .collect();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len());
        build_node(&triangles, &centroids, &mut order, 0, triangles.len(), &mut nodes);
        Self { nodes, order, triangles }
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    /// Nearest intersection with `t > T_MIN`; ties go to the lowest face index.
    pub fn cast(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            let limit = best.map_or(f64::INFINITY, |h| h.t);
            if ray.intersect_aabb(&node.lo, &node.hi, limit).is_none() {
                continue;
            }
            if node.count > 0 {
                let range = node.start as usize..(node.start + node.count) as usize;
                for &face in &self.order[range] {
                    if let Some(t) = ray.intersect_triangle(&self.triangles[face as usize]) {
                        let hit = Hit { face, t };
                        if hit.closer_than(&best) {
                            best = Some(hit);
                        }
                    }
                }
            } else {
                stack.push(node.start as usize);
                stack.push(idx + 1);
            }
        }
        best
    }
}

/// Brute-force nearest hit over every triangle. Reference for [`MeshBvh::cast`].
pub fn cast_brute_force(mesh: &TriangleMesh, ray: &Ray) -> Option<Hit> {
    let mut best = None;
    for face in 0..mesh.face_count() {
        if let Some(t) = ray.intersect_triangle(&mesh.triangle(face)) {
            let hit = Hit { face: face as u32, t };
            if hit.closer_than(&best) {
                best = Some(hit);
            }
        }
    }
    best
}

fn build_node(
    triangles: &[[Point3<f64>; 3]],
    centroids: &[Point3<f64>],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let (lo, hi) = padded_bounds(order[start..end].iter().flat_map(|&f| triangles[f as usize].iter()));
    let idx = nodes.len();
    nodes.push(Node {
        lo,
        hi,
        start: start as u32,
        count: (end - start) as u32,
    });
    if end - start <= LEAF_SIZE {
        return idx;
    }

    let (clo, chi) = bounds(order[start..end].iter().map(|&f| &centroids[f as usize]));
    let extent = chi - clo;
    let axis = extent.imax();
    if extent[axis] <= 0.0 {
        return idx;
    }
    let mid = start + (end - start) / 2;
    order[start..end].sort_by(|&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });

    build_node(triangles, centroids, order, start, mid, nodes);
    let right = build_node(triangles, centroids, order, mid, end, nodes);
    nodes[idx].start = right as u32;
    nodes[idx].count = 0;
    idx
}

fn bounds<'a>(points: impl Iterator<Item = &'a Point3<f64>>) -> (Point3<f64>, Point3<f64>) {
    let mut lo = Point3::from(Vector3::repeat(f64::INFINITY));
    let mut hi = Point3::from(Vector3::repeat(f64::NEG_INFINITY));
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Bounds grown by a relative margin so slab-test rounding never rejects a
/// triangle lying on the box surface.
fn padded_bounds<'a>(points: impl Iterator<Item = &'a Point3<f64>>) -> (Point3<f64>, Point3<f64>) {
    let (lo, hi) = bounds(points);
    let pad = 1e-9 * (1.0 + lo.coords.abs().max().max(hi.coords.abs().max()));
    (lo - Vector3::repeat(pad), hi + Vector3::repeat(pad))
}
