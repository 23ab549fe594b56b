use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;

/// How greedy steps map onto the objective sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceIndexing {
    /// The first greedy step uses the first objective.
    #[default]
    Restart,
    /// Objective index is the 1-based step number modulo the sequence length.
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub budget: usize,
    pub sequence: Vec<Objective>,
    pub n_init: usize,
    pub seed: u64,
    pub sequence_indexing: SequenceIndexing,
    /// Keep every candidate's score for every greedy step.
    pub record_candidates: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            budget: 6,
            sequence: Self::ensemble(),
            n_init: 3,
            seed: 0,
            sequence_indexing: SequenceIndexing::Restart,
            record_candidates: false,
        }
    }
}

impl PlannerConfig {
    /// The interleaved default schedule `[C, Q, Q, D, D, T]`.
    pub fn ensemble() -> Vec<Objective> {
        use Objective::*;
        vec![C, Q, Q, D, D, T]
    }

    pub fn validate(&self, candidate_count: usize) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::invalid("budget", "must be positive"));
        }
        if self.n_init > self.budget {
            return Err(Error::invalid(
                "n_init",
                format!("n_init ({}) exceeds budget ({})", self.n_init, self.budget),
            ));
        }
        if self.budget > candidate_count {
            return Err(Error::invalid(
                "budget",
                format!("budget ({}) exceeds candidate count ({candidate_count})", self.budget),
            ));
        }
        if self.sequence.is_empty() {
            return Err(Error::invalid("sequence", "must not be empty"));
        }
        Ok(())
    }

    /// Objective driving 1-based step `step` (which must be past the
    /// initialization steps).
    pub fn objective_at(&self, step: usize) -> Objective {
        let len = self.sequence.len();
        let idx = match self.sequence_indexing {
            SequenceIndexing::Restart => (step - self.n_init - 1) % len,
            SequenceIndexing::PaperLiteral => step % len,
        };
        self.sequence[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Objective::*;

    #[test]
    fn restart_indexing_begins_with_first_objective() {
        let cfg = PlannerConfig { budget: 9, ..Default::default() };
        let used: Vec<_> = (4..=9).map(|s| cfg.objective_at(s)).collect();
        assert_eq!(used, vec![C, Q, Q, D, D, T]);
        assert_eq!(cfg.objective_at(10), C);
    }

    #[test]
    fn literal_indexing() {
        let cfg = PlannerConfig { sequence_indexing: SequenceIndexing::PaperLiteral, ..Default::default() };
        let used: Vec<_> = (4..=9).map(|s| cfg.objective_at(s)).collect();
        assert_eq!(used, vec![D, T, C, Q, Q, D]);
    }

    #[test]
    fn validation_names_keys() {
        let err = PlannerConfig { budget: 2, n_init: 3, ..Default::default() }.validate(10).unwrap_err();
        assert!(err.to_string().contains("n_init"));
        let err = PlannerConfig { budget: 11, ..Default::default() }.validate(10).unwrap_err();
        assert!(err.to_string().contains("budget"));
        let err = PlannerConfig { sequence: vec![], ..Default::default() }.validate(10).unwrap_err();
        assert!(err.to_string().contains("sequence"));
        PlannerConfig::default().validate(6).unwrap();
    }

    #[test]
    fn json_defaults_and_strictness() {
        let cfg: PlannerConfig = serde_json::from_str(r#"{"budget": 12, "sequence": ["C"]}"#).unwrap();
        assert_eq!(cfg.n_init, 3);
        assert_eq!(cfg.sequence, vec![C]);
        assert!(serde_json::from_str::<PlannerConfig>(r#"{"budget": 1, "ninit": 0}"#).is_err());
        assert!(serde_json::from_str::<PlannerConfig>(r#"{"sequence": ["X"]}"#).is_err());
    }
}
