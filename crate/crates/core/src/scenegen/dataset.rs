use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shapes::{generate_scene, SceneSpec};
use super::walk::random_walk_trajectories;
use crate::error::{Error, Result};
use crate::geometry::{generate_sphere_poses, load_mesh_obj, write_mesh_obj, PoseSet, SphereSampling};
use crate::objectives::{EvidenceSettings, ObjectiveParams, ScoreVector, ViewEvidence};
use crate::planner::CandidatePool;
use crate::visibility::{color_image, save_png, Resolution, Scene};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

/// Number of scenes in each split. Scenes never appear in two splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        Self {
            train: 30,
            val: 10,
            test: 20,
        }
    }
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }

    pub fn split_of(&self, scene: usize) -> &'static str {
        if scene < self.train {
            "train"
        } else if scene < self.train + self.val {
            "val"
        } else {
            "test"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    /// Scene families; scene `i` uses family `i mod len` with seed `i`.
    pub families: Vec<SceneSpec>,
    pub splits: SplitCounts,
    /// Candidate sampling per scene; its seed is offset by the scene index.
    pub candidates: SphereSampling,
    pub walk_length: usize,
    pub walks_per_scene: usize,
    pub candidates_per_prefix: usize,
    pub seed: u64,
    /// Number of tuples re-derived from the files on disk after export.
    pub audit_samples: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            families: SceneSpec::reference_families(),
            splits: SplitCounts::default(),
            candidates: SphereSampling::default(),
            walk_length: 30,
            walks_per_scene: 1,
            candidates_per_prefix: 16,
            seed: 0,
            audit_samples: 10,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::invalid("families", "must not be empty"));
        }
        if self.splits.total() == 0 {
            return Err(Error::invalid("splits", "at least one scene is required"));
        }
        if self.walk_length == 0 || self.walk_length > self.candidates.count {
            return Err(Error::invalid(
                "walk_length",
                format!("must be in 1..={} (candidate count), got {}", self.candidates.count, self.walk_length),
            ));
        }
        Ok(())
    }

    /// Spec of scene `index`.
    pub fn scene_spec(&self, index: usize) -> SceneSpec {
        let mut spec = self.families[index % self.families.len()];
        spec.seed = index as u64;
        spec
    }

    pub fn scene_name(&self, index: usize) -> String {
        format!("{index:03}_{}", self.scene_spec(index).name())
    }
}

/// One supervised example: visited views with images, an unseen candidate
/// pose without image, and the cumulative scores before and after adding
/// the candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingTuple {
    pub id: String,
    pub scene: String,
    pub split: String,
    pub walk: usize,
    pub visited_indices: Vec<usize>,
    pub visited_poses: Vec<[[f64; 4]; 3]>,
    /// Paths relative to the dataset root.
    pub visited_images: Vec<String>,
    pub candidate_index: usize,
    pub candidate_pose: [[f64; 4]; 3],
    #[serde(rename = "label_F_n")]
    pub label_f_n: ScoreVector,
    #[serde(rename = "label_F_n1")]
    pub label_f_n1: ScoreVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneEntry {
    pub name: String,
    pub split: String,
    pub spec: SceneSpec,
    pub mesh: String,
    pub poses: String,
    pub walks: Vec<Vec<usize>>,
    pub tuple_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleEntry {
    pub id: String,
    pub path: String,
    pub scene: String,
    pub split: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub config: DatasetConfig,
    pub params: ObjectiveParams,
    pub resolution: u32,
    pub texture_resolution: u32,
    pub scenes: Vec<SceneEntry>,
    pub tuples: Vec<TupleEntry>,
}

impl Manifest {
    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let path = root.as_ref().join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(&path, e))
    }

    pub fn load_tuple(&self, root: impl AsRef<Path>, index: usize) -> Result<TrainingTuple> {
        let path = root.as_ref().join(&self.tuples[index].path);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(&path, e))
    }

    /// Evidence settings the labels were computed with.
    pub fn settings(&self) -> Result<EvidenceSettings> {
        Ok(EvidenceSettings {
            resolution: Resolution::square(self.resolution)?,
            texture_resolution: Resolution::square(self.texture_resolution)?,
            params: self.params,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub scenes: usize,
    pub tuples: usize,
    pub images: usize,
    pub audited: usize,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Seed for the candidate draw of one `(scene, walk, prefix)` triple.
fn prefix_seed(base: u64, scene: usize, walk: usize, prefix: usize) -> u64 {
    let mut h = base ^ 0x5851_F42D_4C95_7F2D;
    for v in [scene as u64, walk as u64, prefix as u64] {
        h = (h ^ v).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29);
    }
    h
}

fn image_path(scene: &str, pose: usize) -> String {
    format!("scenes/{scene}/images/{pose}.png")
}

/// Writes a labeled dataset under `root`: for every scene, the mesh, its
/// candidate poses, images of every pose a walk visits and one JSON file
/// per tuple, then `manifest.json` last. Finishes by recomputing
/// `audit_samples` tuples from the written files.
pub fn export_dataset(root: impl AsRef<Path>, config: &DatasetConfig, settings: &EvidenceSettings) -> Result<DatasetSummary> {
    let root = root.as_ref();
    config.validate()?;
    settings.params.validate()?;
    create_dir(root)?;

    let mut scenes = Vec::new();
    let mut tuples = Vec::new();
    let mut images = 0;
    for index in 0..config.splits.total() {
        let name = config.scene_name(index);
        let spec = config.scene_spec(index);
        let split = config.splits.split_of(index).to_string();
        let dir = root.join("scenes").join(&name);
        create_dir(&dir.join("images"))?;
        create_dir(&dir.join("tuples"))?;

        let mesh = generate_scene(&spec)?;
        write_mesh_obj(&mesh, dir.join("mesh.obj"))?;
        let sampling = SphereSampling {
            seed: config.candidates.seed.wrapping_add(index as u64),
            ..config.candidates
        };
        let candidates = generate_sphere_poses(&sampling)?;
        candidates.save(dir.join("poses.json"))?;

        let pool = CandidatePool::new(mesh, candidates, *settings)?;
        let walk_seed = prefix_seed(config.seed, index, usize::MAX, 0);
        let walks = random_walk_trajectories(pool.candidates(), config.walk_length, config.walks_per_scene, walk_seed)?;
        log::info!("scene {name}: {} faces, {} walks", pool.scene().mesh().face_count(), walks.len());

        let visited: BTreeSet<usize> = walks.iter().flatten().copied().collect();
        visited.par_iter().try_for_each(|&k| {
            let buffers = pool.scene().render_view(&pool.candidates().poses[k], settings.resolution);
            save_png(&color_image(&buffers), &root.join(image_path(&name, k)))
        })?;
        images += visited.len();

        let pairs: Vec<(usize, usize)> = (0..walks.len())
            .flat_map(|w| (1..=walks[w].len()).map(move |n| (w, n)))
            .collect();
        let per_pair: Vec<Vec<TupleEntry>> = pairs
            .par_iter()
            .map(|&(w, n)| {
                let ctx = PrefixContext {
                    root,
                    pool: &pool,
                    scene: &name,
                    split: &split,
                    walk: w,
                    prefix: &walks[w][..n],
                };
                ctx.export(config.candidates_per_prefix, prefix_seed(config.seed, index, w, n))
            })
            .collect::<Result<_>>()?;
        let entries: Vec<TupleEntry> = per_pair.into_iter().flatten().collect();

        scenes.push(SceneEntry {
            name: name.clone(),
            split,
            spec,
            mesh: format!("scenes/{name}/mesh.obj"),
            poses: format!("scenes/{name}/poses.json"),
            walks,
            tuple_count: entries.len(),
        });
        tuples.extend(entries);
    }

    let manifest = Manifest {
        version: MANIFEST_VERSION,
        config: config.clone(),
        params: settings.params,
        resolution: settings.resolution.width(),
        texture_resolution: settings.texture_resolution.width(),
        scenes,
        tuples,
    };
    write_json(&root.join(MANIFEST_FILE), &manifest)?;

    let audited = audit_dataset(root, config.audit_samples)?;
    Ok(DatasetSummary {
        scenes: manifest.scenes.len(),
        tuples: manifest.tuples.len(),
        images,
        audited,
    })
}

struct PrefixContext<'a> {
    root: &'a Path,
    pool: &'a CandidatePool,
    scene: &'a str,
    split: &'a str,
    walk: usize,
    prefix: &'a [usize],
}

impl PrefixContext<'_> {
    fn export(&self, per_prefix: usize, seed: u64) -> Result<Vec<TupleEntry>> {
        let unseen: Vec<usize> = (0..self.pool.len()).filter(|k| !self.prefix.contains(k)).collect();
        let take = per_prefix.min(unseen.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks: Vec<usize> = rand::seq::index::sample(&mut rng, unseen.len(), take)
            .into_iter()
            .map(|i| unseen[i])
            .collect();
        picks.sort_unstable();

        let state = self.pool.state_for(self.prefix)?;
        let label_f_n = state.score_vector();
        let poses = &self.pool.candidates().poses;
        let n = self.prefix.len();
        picks
            .into_iter()
            .map(|c| {
                let label_f_n1 = state.folded(self.pool.evidence(c))?.score_vector();
                let id = format!("{}_w{}_n{:02}_c{:03}", self.scene, self.walk, n, c);
                let tuple = TrainingTuple {
                    id: id.clone(),
                    scene: self.scene.to_string(),
                    split: self.split.to_string(),
                    walk: self.walk,
                    visited_indices: self.prefix.to_vec(),
                    visited_poses: self.prefix.iter().map(|&k| poses[k].extrinsics_rows()).collect(),
                    visited_images: self.prefix.iter().map(|&k| image_path(self.scene, k)).collect(),
                    candidate_index: c,
                    candidate_pose: poses[c].extrinsics_rows(),
                    label_f_n,
                    label_f_n1,
                };
                let path = format!("scenes/{}/tuples/{id}.json", self.scene);
                write_json(&self.root.join(&path), &tuple)?;
                Ok(TupleEntry {
                    id,
                    path,
                    scene: self.scene.to_string(),
                    split: self.split.to_string(),
                })
            })
            .collect()
    }
}

/// Largest absolute difference between two score vectors.
fn max_diff(a: &ScoreVector, b: &ScoreVector) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Recomputes the labels of `samples` evenly spaced tuples from the mesh,
/// pose and tuple files alone (fresh scene, fresh renders) and checks them
/// to 1e-9. Returns the number of tuples checked.
pub fn audit_dataset(root: impl AsRef<Path>, samples: usize) -> Result<usize> {
    let root = root.as_ref();
    let manifest = Manifest::load(root)?;
    let settings = manifest.settings()?;
    let total = manifest.tuples.len();
    let take = samples.min(total);
    let mut checked = 0;
    for i in 0..take {
        let index = i * total / take;
        let tuple = manifest.load_tuple(root, index)?;
        let entry = manifest
            .scenes
            .iter()
            .find(|s| s.name == tuple.scene)
            .ok_or_else(|| Error::invalid("scene", format!("tuple {} names unknown scene {}", tuple.id, tuple.scene)))?;
        let scene = Scene::new(load_mesh_obj(root.join(&entry.mesh))?);
        let poses = PoseSet::load(root.join(&entry.poses))?;

        if tuple.visited_indices.contains(&tuple.candidate_index) {
            return Err(Error::invalid("candidate_index", format!("tuple {} candidate already visited", tuple.id)));
        }
        for (k, rows) in tuple.visited_indices.iter().zip(&tuple.visited_poses) {
            if poses.poses[*k].extrinsics_rows() != *rows {
                return Err(Error::invalid("visited_poses", format!("tuple {} pose {k} differs from poses.json", tuple.id)));
            }
        }
        for image in &tuple.visited_images {
            let path: PathBuf = root.join(image);
            if !path.is_file() {
                return Err(Error::invalid("visited_images", format!("missing image {}", path.display())));
            }
        }

        let mut state = crate::objectives::ScoreState::new(scene.mesh().face_count(), settings.params);
        for &k in &tuple.visited_indices {
            state.fold(&ViewEvidence::capture(&scene, &poses.poses[k], k, &settings))?;
        }
        let f_n = state.score_vector();
        let c = tuple.candidate_index;
        state.fold(&ViewEvidence::capture(&scene, &poses.poses[c], c, &settings))?;
        let f_n1 = state.score_vector();
        let diff = max_diff(&f_n, &tuple.label_f_n).max(max_diff(&f_n1, &tuple.label_f_n1));
        if !(diff <= 1e-9) {
            return Err(Error::invalid(
                "labels",
                format!("tuple {} labels differ from recomputation by {diff:e}", tuple.id),
            ));
        }
        checked += 1;
    }
    Ok(checked)
}
