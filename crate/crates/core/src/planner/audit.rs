use serde::Serialize;

use super::config::PlannerConfig;
use super::greedy::{pseudo_coverage_init, CandidatePool};
use super::trajectory::{StepKind, Trajectory};
use crate::error::Result;

/// Tolerance for comparing recorded against recomputed scores.
pub const SCORE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditIssue {
    pub step: usize,
    pub message: String,
}

/// Outcome of replaying a planned trajectory against its candidate pool.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub steps_checked: usize,
    pub issues: Vec<AuditIssue>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Replays `trajectory` step by step and checks that
///
/// * the initialization steps are the pseudo-coverage picks,
/// * each greedy step used the scheduled objective and picked a candidate
///   no other unseen candidate beats,
/// * recorded score vectors match a fresh recomputation.
pub fn audit_trajectory(pool: &CandidatePool, config: &PlannerConfig, trajectory: &Trajectory) -> Result<AuditReport> {
    config.validate(pool.len())?;
    let mut issues = Vec::new();
    let mut flag = |step: usize, message: String| issues.push(AuditIssue { step, message });

    if trajectory.steps.len() != config.budget {
        flag(0, format!("{} steps recorded, budget is {}", trajectory.steps.len(), config.budget));
    }
    let init = pseudo_coverage_init(pool.candidates(), config.n_init)?;
    let mut state = pool.empty_state();

    for (i, step) in trajectory.steps.iter().enumerate() {
        let n = i + 1;
        if step.step != n {
            flag(n, format!("step numbered {}", step.step));
        }
        if step.pose >= pool.len() {
            flag(n, format!("pose {} out of range", step.pose));
            break;
        }
        if state.visited().contains(&step.pose) {
            flag(n, format!("pose {} selected twice", step.pose));
            break;
        }
        if n <= config.n_init {
            if step.objective != StepKind::Init {
                flag(n, format!("expected INIT, found {}", step.objective.as_str()));
            }
            if init.get(i) != Some(&step.pose) {
                flag(n, format!("initialization picked {}, expected {:?}", step.pose, init.get(i)));
            }
        } else {
            let objective = config.objective_at(n);
            if step.objective.objective() != Some(objective) {
                flag(n, format!("expected {}, found {}", objective.as_str(), step.objective.as_str()));
            }
            let scores = pool.candidate_scores(&state, objective);
            let chosen = scores.iter().find(|(k, _)| *k == step.pose).map(|&(_, s)| s);
            let best = scores.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
            match chosen {
                Some(s) if s >= best => {}
                Some(s) => flag(n, format!("pose {} scores {s:e}, best unseen candidate scores {best:e}", step.pose)),
                None => flag(n, format!("pose {} is not an unseen candidate", step.pose)),
            }
        }
        state.fold(pool.evidence(step.pose))?;
        if let Some(recorded) = step.scores {
            let fresh = state.score_vector();
            let diff = recorded
                .as_array()
                .iter()
                .zip(fresh.as_array())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if !(diff <= SCORE_TOLERANCE) {
                flag(n, format!("recorded scores differ from recomputation by {diff:e}"));
            }
        }
    }

    Ok(AuditReport {
        steps_checked: trajectory.steps.len(),
        issues,
    })
}
