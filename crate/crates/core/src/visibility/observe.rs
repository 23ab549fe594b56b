use std::collections::BTreeMap;

use nalgebra::Vector3;

use super::render::{ViewBuffers, BACKGROUND};

/// Observing rays kept per face per view.
pub const MAX_RAYS_PER_FACE: usize = 64;

/// What one view reveals about one face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSighting {
    pub face: u32,
    pub pixel_count: usize,
    /// Unit directions of covering pixel rays, thinned by uniform stride to
    /// at most [`MAX_RAYS_PER_FACE`] in scan order.
    pub rays: Vec<Vector3<f64>>,
}

/// Per-view visibility: the faces owning at least one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewObservation {
    pub pose_index: usize,
    /// Sorted by face index.
    pub sightings: Vec<FaceSighting>,
}

impl ViewObservation {
    pub fn visible_faces(&self) -> impl Iterator<Item = u32> + '_ {
        self.sightings.iter().map(|s| s.face)
    }

    pub fn is_empty(&self) -> bool {
        self.sightings.is_empty()
    }

    pub fn pixel_count(&self, face: u32) -> usize {
        self.sightings
            .binary_search_by_key(&face, |s| s.face)
            .map_or(0, |i| self.sightings[i].pixel_count)
    }
}

pub fn observe(buffers: &ViewBuffers, pose_index: usize) -> ViewObservation {
    let mut per_face: BTreeMap<u32, Vec<Vector3<f64>>> = BTreeMap::new();
    for (idx, &face) in buffers.face_id.iter().enumerate() {
        if face != BACKGROUND {
            per_face.entry(face).or_default().push(buffers.ray_dir[idx]);
        }
    }
    let sightings = per_face
        .into_iter()
        .map(|(face, rays)| FaceSighting {
            face,
            pixel_count: rays.len(),
            rays: thin_by_stride(rays, MAX_RAYS_PER_FACE),
        })
        .collect();
    ViewObservation { pose_index, sightings }
}

fn thin_by_stride<T: Copy>(items: Vec<T>, cap: usize) -> Vec<T> {
    let n = items.len();
    if n <= cap {
        return items;
    }
    (0..cap).map(|i| items[i * n / cap]).collect()
}
