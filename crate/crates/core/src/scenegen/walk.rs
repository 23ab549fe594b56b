use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::PoseSet;

/// Number of nearest unvisited neighbors a walk step chooses from.
pub const WALK_NEIGHBORS: usize = 8;

/// Random walks over a candidate set. Each walk starts at a uniformly drawn
/// pose, then repeatedly moves to one of the [`WALK_NEIGHBORS`] nearest
/// unvisited poses (by angular distance of camera centers, lowest index on
/// ties), chosen uniformly.
pub fn random_walk_trajectories(candidates: &PoseSet, length: usize, count: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = candidates.len();
    if length == 0 || length > n {
        return Err(Error::invalid(
            "walk_length",
            format!("must be in 1..={n} (candidate count), got {length}"),
        ));
    }
    let dist: Vec<Vec<f64>> = candidates
        .poses
        .iter()
        .map(|a| candidates.poses.iter().map(|b| a.angular_distance_deg(b)).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walks = Vec::with_capacity(count);
    for _ in 0..count {
        let mut visited = vec![false; n];
        let mut current = rng.gen_range(0..n);
        visited[current] = true;
        let mut walk = vec![current];
        while walk.len() < length {
            let near = nearest_unvisited(&dist[current], &visited, WALK_NEIGHBORS);
            current = near[rng.gen_range(0..near.len())];
            visited[current] = true;
            walk.push(current);
        }
        walks.push(walk);
    }
    Ok(walks)
}

/// Up to `k` unvisited indices sorted by `(distance, index)`.
pub fn nearest_unvisited(dist: &[f64], visited: &[bool], k: usize) -> Vec<usize> {
    let mut open: Vec<usize> = (0..dist.len()).filter(|&i| !visited[i]).collect();
    open.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    open.truncate(k);
    open
}
