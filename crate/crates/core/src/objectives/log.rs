//! Laplacian-of-Gaussian response of rendered normal maps, pooled per face.

use std::collections::BTreeMap;

use crate::visibility::{ViewBuffers, BACKGROUND};

/// Square LoG kernel with zero sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LogKernel {
    pub radius: usize,
    pub weights: Vec<f64>,
}

impl LogKernel {
    /// Samples the continuous LoG on a `(2 ceil(2.5 sigma) + 1)^2` grid and
    /// removes the sampled mean so the weights sum to zero.
    pub fn new(sigma: f64) -> Self {
        let radius = (2.5 * sigma).ceil() as usize;
        let side = 2 * radius + 1;
        let s2 = sigma * sigma;
        let scale = -1.0 / (std::f64::consts::PI * s2 * s2);
        let mut weights = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                let dx = x as f64 - radius as f64;
                let dy = y as f64 - radius as f64;
                let q = (dx * dx + dy * dy) / (2.0 * s2);
                weights.push(scale * (1.0 - q) * (-q).exp());
            }
        }
        let mean = weights.iter().sum::<f64>() / weights.len() as f64;
        for w in &mut weights {
            *w -= mean;
        }
        Self { radius, weights }
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
}

/// Channel-summed absolute LoG response of the normal map at every
/// foreground pixel (zero on background).
///
/// Taps that fall outside the image or on background pixels take the center
/// pixel's normal, so a face contributes nothing where its neighborhood is
/// flat or empty; only normal changes across the surface respond.
pub fn log_response(buffers: &ViewBuffers, kernel: &LogKernel) -> Vec<f64> {
    let (w, h) = (buffers.width as i64, buffers.height as i64);
    let r = kernel.radius as i64;
    let side = kernel.side();
    let mut out = vec![0.0; buffers.face_id.len()];
    for y in 0..h {
        for x in 0..w {
            let idx = (y * w + x) as usize;
            if buffers.face_id[idx] == BACKGROUND {
                continue;
            }
            let center = buffers.normal[idx];
            let mut acc = [0.0; 3];
            for ky in 0..side as i64 {
                let sy = y + ky - r;
                for kx in 0..side as i64 {
                    let sx = x + kx - r;
                    let weight = kernel.weights[(ky as usize) * side + kx as usize];
                    let n = if sx < 0 || sy < 0 || sx >= w || sy >= h {
                        center
                    } else {
                        let sidx = (sy * w + sx) as usize;
                        if buffers.face_id[sidx] == BACKGROUND {
                            center
                        } else {
                            buffers.normal[sidx]
                        }
                    };
                    // Differences from the center keep flat regions exactly zero.
                    let d = n - center;
                    acc[0] += weight * d.x;
                    acc[1] += weight * d.y;
                    acc[2] += weight * d.z;
                }
            }
            out[idx] = acc[0].abs() + acc[1].abs() + acc[2].abs();
        }
    }
    out
}

/// Mean absolute LoG response over each visible face's pixels, as sorted
/// `(face, response)` pairs.
pub fn face_log_responses(buffers: &ViewBuffers, kernel: &LogKernel) -> Vec<(u32, f64)> {
    let response = log_response(buffers, kernel);
    let mut sums: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for (idx, &face) in buffers.face_id.iter().enumerate() {
        if face != BACKGROUND {
            let e = sums.entry(face).or_insert((0.0, 0));
            e.0 += response[idx];
            e.1 += 1;
        }
    }
    sums.into_iter().map(|(f, (s, n))| (f, s / n as f64)).collect()
}
