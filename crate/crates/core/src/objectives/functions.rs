//! Closed-form scalar pieces of the objectives.

use std::f64::consts::E;

use nalgebra::Vector3;

use super::params::ObjectiveParams;

/// Augmented grazing angle in degrees: 90 head-on, 0 at grazing incidence,
/// negative when the ray meets the face from behind.
pub fn grazing_angle(ray: &Vector3<f64>, normal: &Vector3<f64>) -> f64 {
    let cos = (ray.dot(normal) / (ray.norm() * normal.norm())).clamp(-1.0, 1.0);
    cos.acos().to_degrees().abs() - 90.0
}

/// Soft outlier score `1 - alpha1 / (1 + exp(-theta + alpha2))`.
///
/// Evaluated as `(1 - alpha1) s + z s` with `z = exp(-theta + alpha2)` and
/// `s = 1 / (1 + z)`, which keeps full relative precision for well-observed
/// rays whose score is close to zero.
pub fn outlier_score(theta: f64, params: &ObjectiveParams) -> f64 {
    let x = -theta + params.alpha2;
    if x > 0.0 {
        let w = (-x).exp();
        let s = w / (1.0 + w);
        (1.0 - params.alpha1) * s + 1.0 / (1.0 + w)
    } else {
        let z = x.exp();
        let s = 1.0 / (1.0 + z);
        (1.0 - params.alpha1) * s + z * s
    }
}

/// Logistic smoothing onto `[0, 1]` centered at 0.5.
pub fn smooth_clip(x: f64, alpha3: f64) -> f64 {
    let exponent = -alpha3 * E * x + alpha3 * 0.5 * E;
    (1.0 / (1.0 + exponent.exp())).clamp(0.0, 1.0)
}
