use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::PlannerConfig;
use super::trajectory::{Step, StepKind, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::{PoseSet, TriangleMesh};
use crate::objectives::{EvidenceSettings, Objective, ScoreState, ViewEvidence};
use crate::visibility::Scene;

/// A scene together with pre-rendered evidence for every candidate pose.
///
/// Each candidate is rendered once; the planner, the auditor and the data
/// exporter all fold the cached evidence.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    scene: Scene,
    candidates: PoseSet,
    settings: EvidenceSettings,
    evidence: Vec<ViewEvidence>,
}

impl CandidatePool {
    pub fn new(mesh: TriangleMesh, candidates: PoseSet, settings: EvidenceSettings) -> Result<Self> {
        settings.params.validate()?;
        if candidates.is_empty() {
            return Err(Error::invalid("candidates", "candidate set is empty"));
        }
        let scene = Scene::new(mesh);
        let evidence = candidates
            .poses
            .par_iter()
            .enumerate()
            .map(|(k, pose)| ViewEvidence::capture(&scene, pose, k, &settings))
            .collect();
        Ok(Self {
            scene,
            candidates,
            settings,
            evidence,
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn candidates(&self) -> &PoseSet {
        &self.candidates
    }

    pub fn settings(&self) -> &EvidenceSettings {
        &self.settings
    }

    pub fn len(&self) -> usize {
        self.evidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evidence.is_empty()
    }

    pub fn evidence(&self, pose: usize) -> &ViewEvidence {
        &self.evidence[pose]
    }

    pub fn empty_state(&self) -> ScoreState {
        ScoreState::new(self.scene.mesh().face_count(), self.settings.params)
    }

    /// State after folding `poses` in order.
    pub fn state_for(&self, poses: &[usize]) -> Result<ScoreState> {
        let mut state = self.empty_state();
        for &k in poses {
            if k >= self.len() {
                return Err(Error::invalid("pose", format!("pose {k} out of range (0..{})", self.len())));
            }
            state.fold(&self.evidence[k])?;
        }
        Ok(state)
    }

    /// Raw `objective` score each unseen candidate would reach if folded
    /// next, as `(pose, score)` in pose order.
    pub fn candidate_scores(&self, state: &ScoreState, objective: Objective) -> Vec<(usize, f64)> {
        let visited = state.visited();
        (0..self.len())
            .into_par_iter()
            .filter(|k| !visited.contains(k))
            .map(|k| {
                let next = state.folded(&self.evidence[k]).expect("unvisited candidate folds");
                (k, next.raw_score(objective))
            })
            .collect()
    }

    /// Fills each step's score vector by replaying the trajectory.
    pub fn annotate_scores(&self, trajectory: &mut Trajectory) -> Result<()> {
        let mut state = self.empty_state();
        for step in &mut trajectory.steps {
            if step.pose >= self.len() {
                return Err(Error::invalid("pose", format!("pose {} out of range", step.pose)));
            }
            state.fold(&self.evidence[step.pose])?;
            step.scores = Some(state.score_vector());
        }
        Ok(())
    }
}

/// Picks `n_init` poses cycling through the x, y and z axes, each time
/// taking the unselected camera with the largest absolute coordinate on
/// that axis (lowest index on ties).
pub fn pseudo_coverage_init(candidates: &PoseSet, n_init: usize) -> Result<Vec<usize>> {
    if candidates.is_empty() {
        return Err(Error::invalid("candidates", "candidate set is empty"));
    }
    if n_init > candidates.len() {
        return Err(Error::invalid(
            "n_init",
            format!("n_init ({n_init}) exceeds candidate count ({})", candidates.len()),
        ));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n_init);
    for i in 0..n_init {
        let axis = i % 3;
        let mut best: Option<(usize, f64)> = None;
        for (k, pose) in candidates.poses.iter().enumerate() {
            if chosen.contains(&k) {
                continue;
            }
            let v = pose.center[axis].abs();
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        chosen.push(best.expect("n_init <= candidate count").0);
    }
    Ok(chosen)
}

/// Index of the maximum score; the first (lowest pose index) wins ties.
fn argmax(scores: &[(usize, f64)]) -> Option<(usize, f64)> {
    scores.iter().copied().fold(None, |best, (k, s)| match best {
        Some((_, b)) if s <= b => best,
        _ => Some((k, s)),
    })
}

/// Greedy budget-constrained planning: pseudo-coverage initialization,
/// then at each step the unseen candidate maximizing the step's objective
/// on the cumulative state.
pub fn plan_trajectory(pool: &CandidatePool, config: &PlannerConfig) -> Result<Trajectory> {
    config.validate(pool.len())?;
    let mut state = pool.empty_state();
    let mut steps = Vec::with_capacity(config.budget);

    for (i, pose) in pseudo_coverage_init(pool.candidates(), config.n_init)?.into_iter().enumerate() {
        state.fold(pool.evidence(pose))?;
        steps.push(Step {
            step: i + 1,
            pose,
            objective: StepKind::Init,
            scores: Some(state.score_vector()),
            candidate_scores: Vec::new(),
        });
    }

    for step in config.n_init + 1..=config.budget {
        let objective = config.objective_at(step);
        let scores = pool.candidate_scores(&state, objective);
        let (pose, _) = argmax(&scores).expect("budget <= candidate count leaves an unseen candidate");
        state.fold(pool.evidence(pose))?;
        log::debug!("step {step}: {} -> pose {pose}", objective.as_str());
        steps.push(Step {
            step,
            pose,
            objective: objective.into(),
            scores: Some(state.score_vector()),
            candidate_scores: if config.record_candidates { scores } else { Vec::new() },
        });
    }

    Ok(Trajectory {
        budget: config.budget,
        sequence: config.sequence.clone(),
        steps,
    })
}

/// Uniformly random selection of `budget` distinct poses. Scores are left
/// empty; see [`CandidatePool::annotate_scores`].
pub fn plan_random(candidates: &PoseSet, budget: usize, seed: u64) -> Result<Trajectory> {
    if budget > candidates.len() {
        return Err(Error::invalid(
            "budget",
            format!("budget ({budget}) exceeds candidate count ({})", candidates.len()),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, candidates.len(), budget).into_vec();
    Ok(Trajectory {
        budget,
        sequence: Vec::new(),
        steps: picks
            .into_iter()
            .enumerate()
            .map(|(i, pose)| Step {
                step: i + 1,
                pose,
                objective: StepKind::Random,
                scores: None,
                candidate_scores: Vec::new(),
            })
            .collect(),
    })
}
