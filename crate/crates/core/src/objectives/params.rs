use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunables of the four objectives and the smoothing transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveParams {
    /// Gaussian standard deviation of the LoG filter, in pixels.
    pub sigma_q: f64,
    /// Scale applied to per-face LoG responses.
    pub beta_q: f64,
    /// Discount applied to a face's geometric weight each time it is seen again.
    pub d_q: f64,
    /// LBP sampling radius in pixels.
    pub r_t: f64,
    /// LBP neighbor count.
    pub p_t: u32,
    /// Discount for views repeating an already-visited viewing direction.
    pub d_t: f64,
    /// Outlier sigmoid amplitude.
    pub alpha1: f64,
    /// Outlier sigmoid offset in degrees.
    pub alpha2: f64,
    /// Smoothing sharpness.
    pub alpha3: f64,
    /// Views closer than this (degrees between viewing directions) count as
    /// repeats for the texture discount.
    pub repeat_angle_deg: f64,
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        Self {
            sigma_q: 1.5,
            beta_q: 1.0,
            d_q: 0.5,
            r_t: 3.0,
            p_t: 3,
            d_t: 0.5,
            alpha1: 1.0,
            alpha2: -10.0,
            alpha3: 3.0,
            repeat_angle_deg: 5.0,
        }
    }
}

impl ObjectiveParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, key: &'static str, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(key, msg))
            }
        }
        check(self.sigma_q > 0.0 && self.sigma_q.is_finite(), "sigma_q", "must be positive")?;
        check(self.beta_q.is_finite(), "beta_q", "must be finite")?;
        check(self.d_q > 0.0 && self.d_q <= 1.0, "d_q", "must lie in (0, 1]")?;
        check(self.d_t > 0.0 && self.d_t <= 1.0, "d_t", "must lie in (0, 1]")?;
        check(self.r_t >= 1.0 && self.r_t.is_finite(), "r_t", "must be at least 1")?;
        check((2..=16).contains(&self.p_t), "p_t", "must lie in 2..=16")?;
        check(self.alpha1.is_finite(), "alpha1", "must be finite")?;
        check(self.alpha2.is_finite(), "alpha2", "must be finite")?;
        check(self.alpha3.is_finite(), "alpha3", "must be finite")?;
        check(self.repeat_angle_deg >= 0.0, "repeat_angle_deg", "must be non-negative")
    }

    /// Geometric-complexity value of a state in which no face carries any
    /// LoG response: `1 / (5 sigma_q)^2`.
    pub fn q_floor(&self) -> f64 {
        1.0 / (5.0 * self.sigma_q).powi(2)
    }
}
