use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::evidence::ViewEvidence;
use super::functions::smooth_clip;
use super::params::ObjectiveParams;
use crate::error::{Error, Result};

/// The four objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    /// Surface coverage.
    C,
    /// Geometric complexity.
    Q,
    /// Ray diversity.
    D,
    /// Textural complexity.
    T,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Objective::C, Objective::Q, Objective::D, Objective::T];

    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::C => "C",
            Objective::Q => "Q",
            Objective::D => "D",
            Objective::T => "T",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" => Ok(Objective::C),
            "Q" => Ok(Objective::Q),
            "D" => Ok(Objective::D),
            "T" => Ok(Objective::T),
            other => Err(Error::invalid("sequence", format!("unknown objective `{other}`"))),
        }
    }
}

/// Objective values before smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawScores {
    pub coverage: f64,
    pub geometric: f64,
    pub diversity: f64,
    pub textural: f64,
}

impl RawScores {
    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::C => self.coverage,
            Objective::Q => self.geometric,
            Objective::D => self.diversity,
            Objective::T => self.textural,
        }
    }

    pub fn smoothed(&self, alpha3: f64) -> ScoreVector {
        ScoreVector {
            f_c: smooth_clip(self.coverage, alpha3),
            f_q: smooth_clip(self.geometric, alpha3),
            f_d: smooth_clip(self.diversity, alpha3),
            f_t: smooth_clip(self.textural, alpha3),
        }
    }
}

/// Smoothed objective scores, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreVector {
    #[serde(rename = "f_C")]
    pub f_c: f64,
    #[serde(rename = "f_Q")]
    pub f_q: f64,
    #[serde(rename = "f_D")]
    pub f_d: f64,
    #[serde(rename = "f_T")]
    pub f_t: f64,
}

impl ScoreVector {
    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::C => self.f_c,
            Objective::Q => self.f_q,
            Objective::D => self.f_d,
            Objective::T => self.f_t,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.f_c, self.f_q, self.f_d, self.f_t]
    }
}

/// Running moments of one face's observing rays. Sums are taken about the
/// first ray so that a constant axis has exactly zero variance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RayMoments {
    pub count: u64,
    pub psi_sum: f64,
    shift: Vector3<f64>,
    sum: Vector3<f64>,
    sum_sq: Vector3<f64>,
}

impl RayMoments {
    pub fn push(&mut self, dir: &Vector3<f64>, psi: f64) {
        if self.count == 0 {
            self.shift = *dir;
        }
        let d = dir - self.shift;
        self.count += 1;
        self.psi_sum += psi;
        self.sum += d;
        self.sum_sq += d.component_mul(&d);
    }

    /// Population variance of each direction component.
    pub fn variances(&self) -> Vector3<f64> {
        if self.count == 0 {
            return Vector3::zeros();
        }
        let n = self.count as f64;
        Vector3::from_fn(|a, _| ((self.sum_sq[a] - self.sum[a] * self.sum[a] / n) / n).max(0.0))
    }

    /// Product of the three axis variances.
    pub fn diversity(&self) -> f64 {
        let v = self.variances();
        v.x * v.y * v.z
    }

    /// Mean outlier score.
    pub fn outlier_ratio(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.psi_sum / self.count as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TextureEntry {
    score: f64,
    weight: f64,
}

/// Cumulative per-face accumulators over the views visited so far.
///
/// Cloned per candidate when previewing a fold; never shared mutably.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreState {
    params: ObjectiveParams,
    times_seen: Vec<u32>,
    seen: usize,
    max_log_response: Vec<f64>,
    rays: Vec<RayMoments>,
    texture: Vec<TextureEntry>,
    forwards: Vec<Vector3<f64>>,
    visited: Vec<usize>,
    empty_views: usize,
}

impl ScoreState {
    pub fn new(face_count: usize, params: ObjectiveParams) -> Self {
        Self {
            params,
            times_seen: vec![0; face_count],
            seen: 0,
            max_log_response: vec![0.0; face_count],
            rays: vec![RayMoments::default(); face_count],
            texture: Vec::new(),
            forwards: Vec::new(),
            visited: Vec::new(),
            empty_views: 0,
        }
    }

    pub fn params(&self) -> &ObjectiveParams {
        &self.params
    }

    pub fn face_count(&self) -> usize {
        self.times_seen.len()
    }

    /// Pose indices in fold order.
    pub fn visited(&self) -> &[usize] {
        &self.visited
    }

    pub fn is_seen(&self, face: usize) -> bool {
        self.times_seen[face] > 0
    }

    pub fn seen_count(&self) -> usize {
        self.seen
    }

    pub fn times_seen(&self, face: usize) -> u32 {
        self.times_seen[face]
    }

    /// Geometric discount `d_q^(times_seen - 1)`; 1 for unseen faces.
    pub fn q_weight(&self, face: usize) -> f64 {
        match self.times_seen[face] {
            0 => 1.0,
            n => self.params.d_q.powi(n as i32 - 1),
        }
    }

    pub fn ray_moments(&self, face: usize) -> &RayMoments {
        &self.rays[face]
    }

    /// Number of folded views that had no foreground at all.
    pub fn empty_views(&self) -> usize {
        self.empty_views
    }

    /// Folds one view into the state.
    pub fn fold(&mut self, evidence: &ViewEvidence) -> Result<()> {
        if self.visited.contains(&evidence.pose_index) {
            return Err(Error::invalid(
                "pose_index",
                format!("pose {} already folded", evidence.pose_index),
            ));
        }
        for fe in &evidence.faces {
            let j = fe.face as usize;
            if j >= self.face_count() {
                return Err(Error::invalid("face", format!("face {j} out of range")));
            }
        }
        for fe in &evidence.faces {
            let j = fe.face as usize;
            if self.times_seen[j] == 0 {
                self.seen += 1;
            }
            self.times_seen[j] += 1;
            self.max_log_response[j] = self.max_log_response[j].max(fe.log_response);
            for ray in &fe.rays {
                self.rays[j].push(&ray.dir, ray.psi);
            }
        }

        let limit = self.params.repeat_angle_deg;
        let repeats = self
            .forwards
            .iter()
            .filter(|f| f.dot(&evidence.forward).clamp(-1.0, 1.0).acos().to_degrees() < limit)
            .count();
        let score = evidence.texture.unwrap_or_else(|| {
            log::warn!("pose {} has no foreground; texture contributes 0", evidence.pose_index);
            self.empty_views += 1;
            0.0
        });
        self.texture.push(TextureEntry {
            score,
            weight: self.params.d_t.powi(repeats as i32),
        });
        self.forwards.push(evidence.forward);
        self.visited.push(evidence.pose_index);
        Ok(())
    }

    /// Copy of the state with `evidence` folded in.
    pub fn folded(&self, evidence: &ViewEvidence) -> Result<Self> {
        let mut next = self.clone();
        next.fold(evidence)?;
        Ok(next)
    }

    /// Fraction of faces seen by at least one view.
    pub fn coverage(&self) -> f64 {
        self.seen as f64 / self.face_count() as f64
    }

    /// Mean of `1 + beta_q * q_weight * max LoG response` over all faces
    /// (unseen faces contribute 1), divided by `(5 sigma_q)^2`.
    pub fn geometric_complexity(&self) -> f64 {
        let beta = self.params.beta_q;
        let total: f64 = (0..self.face_count())
            .map(|j| {
                if self.times_seen[j] == 0 {
                    1.0
                } else {
                    self.max_log_response[j] * beta * self.q_weight(j) + 1.0
                }
            })
            .sum();
        total * self.params.q_floor() / self.face_count() as f64
    }

    /// Mean over faces of (product of ray-direction axis variances) times
    /// (mean outlier score); unseen faces contribute 0.
    pub fn ray_diversity(&self) -> f64 {
        let total: f64 = self.rays.iter().map(|m| m.diversity() * m.outlier_ratio()).sum();
        total / self.face_count() as f64
    }

    /// Discount-weighted textured fraction, averaged over visited views.
    /// Views repeating an earlier viewing direction are down-weighted by
    /// `d_t` per repeat, so they add less than a fresh view.
    pub fn textural_complexity(&self) -> f64 {
        if self.texture.is_empty() {
            return 0.0;
        }
        let total: f64 = self.texture.iter().map(|e| e.weight * e.score).sum();
        total / self.texture.len() as f64
    }

    pub fn raw_scores(&self) -> RawScores {
        RawScores {
            coverage: self.coverage(),
            geometric: self.geometric_complexity(),
            diversity: self.ray_diversity(),
            textural: self.textural_complexity(),
        }
    }

    pub fn raw_score(&self, objective: Objective) -> f64 {
        match objective {
            Objective::C => self.coverage(),
            Objective::Q => self.geometric_complexity(),
            Objective::D => self.ray_diversity(),
            Objective::T => self.textural_complexity(),
        }
    }

    pub fn score_vector(&self) -> ScoreVector {
        self.raw_scores().smoothed(self.params.alpha3)
    }
}
