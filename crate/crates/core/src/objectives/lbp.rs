//! Local binary patterns on the hue and saturation channels of a rendered
//! view.

use crate::geometry::Rgb;
use crate::visibility::{ViewBuffers, BACKGROUND};

/// Tolerance of the `neighbor >= center` comparison. Shading scales RGB, so
/// hue and saturation of a single-colored surface agree only up to rounding.
const CMP_EPS: f64 = 1e-9;

/// Hexcone HSV with hue in `[0, 1)`.
pub fn rgb_to_hsv(c: Rgb) -> [f64; 3] {
    let [r, g, b] = c;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta <= 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    [if h >= 1.0 { 0.0 } else { h }, s, max]
}

/// Single-channel image with a foreground mask.
#[derive(Debug, Clone)]
pub struct Channel<'a> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub foreground: &'a [bool],
}

impl Channel<'_> {
    fn at(&self, x: i64, y: i64, center: f64) -> f64 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return center;
        }
        let idx = y as usize * self.width + x as usize;
        if self.foreground[idx] {
            self.values[idx]
        } else {
            center
        }
    }

    /// Bilinear sample; taps off the image or on background read as `center`.
    fn sample(&self, x: f64, y: f64, center: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let v00 = self.at(x0, y0, center);
        let v10 = self.at(x0 + 1, y0, center);
        let v01 = self.at(x0, y0 + 1, center);
        let v11 = self.at(x0 + 1, y0 + 1, center);
        let top = v00 + fx * (v10 - v00);
        let bottom = v01 + fx * (v11 - v01);
        top + fy * (bottom - top)
    }
}

/// Offsets of `points` samples on a circle of `radius` pixels, starting at
/// +x and turning counter-clockwise in image coordinates.
pub fn circle_offsets(radius: f64, points: u32) -> Vec<(f64, f64)> {
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    (0..points)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / points as f64;
            (snap(radius * a.cos()), snap(-radius * a.sin()))
        })
        .collect()
}

/// Plain LBP codes of every foreground pixel: bit `k` is set when neighbor
/// `k` is at least the center value.
pub fn lbp_codes(channel: &Channel<'_>, radius: f64, points: u32) -> Vec<u32> {
    let offsets = circle_offsets(radius, points);
    let mut codes = Vec::new();
    for y in 0..channel.height {
        for x in 0..channel.width {
            let idx = y * channel.width + x;
            if !channel.foreground[idx] {
                continue;
            }
            let center = channel.values[idx];
            let mut code = 0u32;
            for (k, &(dx, dy)) in offsets.iter().enumerate() {
                let v = channel.sample(x as f64 + dx, y as f64 + dy, center);
                if v >= center - CMP_EPS {
                    code |= 1 << k;
                }
            }
            codes.push(code);
        }
    }
    codes
}

/// Normalized histogram over the `2^points` codes.
pub fn histogram(codes: &[u32], points: u32) -> Vec<f64> {
    let mut hist = vec![0.0; 1 << points];
    for &c in codes {
        hist[c as usize] += 1.0;
    }
    if !codes.is_empty() {
        let n = codes.len() as f64;
        hist.iter_mut().for_each(|h| *h /= n);
    }
    hist
}

/// Textured fraction of one view: `1 - hist[all-ones]`, averaged over the
/// hue and saturation channels. `None` when the view has no foreground.
pub fn texture_view_score(buffers: &ViewBuffers, radius: f64, points: u32) -> Option<f64> {
    let foreground: Vec<bool> = buffers.face_id.iter().map(|&f| f != BACKGROUND).collect();
    if !foreground.iter().any(|&f| f) {
        return None;
    }
    let hsv: Vec<[f64; 3]> = buffers.color.iter().map(|&c| rgb_to_hsv(c)).collect();
    let flat_bin = (1usize << points) - 1;
    let mut total = 0.0;
    for ch in 0..2 {
        let channel = Channel {
            width: buffers.width as usize,
            height: buffers.height as usize,
            values: hsv.iter().map(|v| v[ch]).collect(),
            foreground: &foreground,
        };
        let hist = histogram(&lbp_codes(&channel, radius, points), points);
        total += 1.0 - hist[flat_bin];
    }
    Some(total / 2.0)
}
