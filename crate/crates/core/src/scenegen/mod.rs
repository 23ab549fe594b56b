//! Synthetic scenes, random walks, labeled training tuples and
//! transforms-file export.

mod dataset;
mod shapes;
mod transforms;
mod walk;

pub use dataset::{
    audit_dataset, export_dataset, DatasetConfig, DatasetSummary, Manifest, SceneEntry, SplitCounts, TrainingTuple,
    TupleEntry, MANIFEST_FILE, MANIFEST_VERSION,
};
pub use shapes::*;
pub use transforms::{export_transforms, Frame, Transforms};
pub use walk::{nearest_unvisited, random_walk_trajectories, WALK_NEIGHBORS};
