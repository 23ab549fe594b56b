//! PNG dumps of render buffers for debugging.

use std::path::Path;

use image::{Rgb, RgbImage};

use super::render::{ViewBuffers, BACKGROUND};
use crate::error::{Error, Result};

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn color_image(buffers: &ViewBuffers) -> RgbImage {
    RgbImage::from_fn(buffers.width, buffers.height, |x, y| {
        let c = buffers.color[buffers.index(x, y)];
        Rgb([to_u8(c[0]), to_u8(c[1]), to_u8(c[2])])
    })
}

/// Normals remapped from [-1, 1] to [0, 255]; background is black.
pub fn normal_image(buffers: &ViewBuffers) -> RgbImage {
    RgbImage::from_fn(buffers.width, buffers.height, |x, y| {
        let idx = buffers.index(x, y);
        if buffers.is_background(idx) {
            return Rgb([0, 0, 0]);
        }
        let n = buffers.normal[idx];
        Rgb([to_u8(0.5 * (n.x + 1.0)), to_u8(0.5 * (n.y + 1.0)), to_u8(0.5 * (n.z + 1.0))])
    })
}

/// Each face id hashed to a stable pseudo-random color; background is white.
pub fn face_id_image(buffers: &ViewBuffers) -> RgbImage {
    RgbImage::from_fn(buffers.width, buffers.height, |x, y| {
        let face = buffers.face_id[buffers.index(x, y)];
        if face == BACKGROUND {
            return Rgb([255, 255, 255]);
        }
        let h = (face as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        Rgb([(h >> 40) as u8, (h >> 48) as u8, (h >> 56) as u8])
    })
}

pub fn save_png(img: &RgbImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<stem>_color.png`, `<stem>_normal.png` and `<stem>_faces.png`.
pub fn dump_buffers(buffers: &ViewBuffers, dir: &Path, stem: &str) -> Result<()> {
    save_png(&color_image(buffers), &dir.join(format!("{stem}_color.png")))?;
    save_png(&normal_image(buffers), &dir.join(format!("{stem}_normal.png")))?;
    save_png(&face_id_image(buffers), &dir.join(format!("{stem}_faces.png")))
}
