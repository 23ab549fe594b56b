#![allow(dead_code)]

use nalgebra::Point3;
use viewplan::geometry::{CameraPose, Intrinsics, TriangleMesh};
use viewplan::objectives::{EvidenceSettings, ObjectiveParams};
use viewplan::visibility::Resolution;

pub fn settings(side: u32) -> EvidenceSettings {
    EvidenceSettings {
        resolution: Resolution::square(side).unwrap(),
        texture_resolution: Resolution::square(side).unwrap(),
        params: ObjectiveParams::default(),
    }
}

pub fn look_from(x: f64, y: f64, z: f64) -> CameraPose {
    CameraPose::look_at(Point3::new(x, y, z), Point3::origin(), Intrinsics::default()).unwrap()
}

/// A unit square in the z = 0 plane facing +z.
pub fn plane(half: f64) -> TriangleMesh {
    let v = vec![
        Point3::new(-half, -half, 0.0),
        Point3::new(half, -half, 0.0),
        Point3::new(half, half, 0.0),
        Point3::new(-half, half, 0.0),
    ];
    TriangleMesh::new(v, vec![[0, 1, 2], [0, 2, 3]], vec![]).unwrap()
}

/// Regular tetrahedron centered at the origin, outward normals.
pub fn tetrahedron() -> TriangleMesh {
    let v = vec![
        Point3::new(1.0, 1.0, 1.0),
        Point3::new(1.0, -1.0, -1.0),
        Point3::new(-1.0, 1.0, -1.0),
        Point3::new(-1.0, -1.0, 1.0),
    ];
    TriangleMesh::new(v, vec![[0, 2, 3], [0, 3, 1], [0, 1, 2], [1, 3, 2]], vec![]).unwrap()
}
