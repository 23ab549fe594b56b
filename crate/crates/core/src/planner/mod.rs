//! Budget-constrained greedy view planning.

mod audit;
mod config;
mod greedy;
mod trajectory;

pub use audit::{audit_trajectory, AuditIssue, AuditReport, SCORE_TOLERANCE};
pub use config::{PlannerConfig, SequenceIndexing};
pub use greedy::{plan_random, plan_trajectory, pseudo_coverage_init, CandidatePool};
pub use trajectory::{Step, StepKind, Trajectory};
