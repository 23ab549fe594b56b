use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Objective, ScoreVector};

/// How a trajectory step was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    #[serde(rename = "INIT")]
    Init,
    C,
    Q,
    D,
    T,
    #[serde(rename = "RANDOM")]
    Random,
}

impl StepKind {
    pub fn objective(&self) -> Option<Objective> {
        match self {
            StepKind::C => Some(Objective::C),
            StepKind::Q => Some(Objective::Q),
            StepKind::D => Some(Objective::D),
            StepKind::T => Some(Objective::T),
            StepKind::Init | StepKind::Random => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Init => "INIT",
            StepKind::C => "C",
            StepKind::Q => "Q",
            StepKind::D => "D",
            StepKind::T => "T",
            StepKind::Random => "RANDOM",
        }
    }
}

impl From<Objective> for StepKind {
    fn from(o: Objective) -> Self {
        match o {
            Objective::C => StepKind::C,
            Objective::Q => StepKind::Q,
            Objective::D => StepKind::D,
            Objective::T => StepKind::T,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    /// 1-based step number.
    pub step: usize,
    /// Index of the selected candidate pose.
    pub pose: usize,
    pub objective: StepKind,
    /// Scores of the trajectory up to and including this step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<ScoreVector>,
    /// Raw active-objective score of every unseen candidate at this step,
    /// as `(pose, score)`; only kept when requested.
    #[serde(skip)]
    pub candidate_scores: Vec<(usize, f64)>,
}

/// Ordered selection of candidate poses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub budget: usize,
    pub sequence: Vec<Objective>,
    pub steps: Vec<Step>,
}

impl Trajectory {
    pub fn poses(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.pose).collect()
    }

    pub fn final_scores(&self) -> Option<ScoreVector> {
        self.steps.last().and_then(|s| s.scores)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::json(path, e))
    }

    /// Per-step score table: `step,pose_index,f_C,f_Q,f_D,f_T` with six
    /// decimals. Steps without scores are skipped.
    pub fn scores_csv(&self) -> String {
        let mut out = String::from("step,pose_index,f_C,f_Q,f_D,f_T\n");
        for s in &self.steps {
            if let Some(v) = s.scores {
                let _ = writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{:.6}",
                    s.step, s.pose, v.f_c, v.f_q, v.f_d, v.f_t
                );
            }
        }
        out
    }

    /// Candidate score table: `step,objective,pose_index,score,selected`.
    pub fn candidates_csv(&self) -> String {
        let mut out = String::from("step,objective,pose_index,score,selected\n");
        for s in &self.steps {
            for &(pose, score) in &s.candidate_scores {
                let _ = writeln!(
                    out,
                    "{},{},{},{:e},{}",
                    s.step,
                    s.objective.as_str(),
                    pose,
                    score,
                    (pose == s.pose) as u8
                );
            }
        }
        out
    }
}
