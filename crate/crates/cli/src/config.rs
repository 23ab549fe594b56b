use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use viewplan::geometry::{generate_sphere_poses, load_mesh_obj, PoseSet, SphereSampling, TriangleMesh};
use viewplan::objectives::{EvidenceSettings, ObjectiveParams};
use viewplan::planner::PlannerConfig;
use viewplan::scenegen::{generate_scene, DatasetConfig, SceneSpec};
use viewplan::visibility::Resolution;

/// A problem with the configuration rather than with the run itself.
/// Reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl fmt::Display) -> anyhow::Error {
    ConfigError(msg.to_string()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneSource {
    /// Wavefront OBJ file, rescaled to fit the [-1, 1] cube.
    Obj(PathBuf),
    Spec(SceneSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    File(PathBuf),
    Generate(SphereSampling),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scene: Option<SceneSource>,
    pub candidates: Option<CandidateSource>,
    pub planner: PlannerConfig,
    pub params: ObjectiveParams,
    pub resolution: u32,
    pub texture_resolution: u32,
    /// Pose indices evaluated by `score`.
    pub visited: Vec<usize>,
    /// Trajectory file read by `audit` and `export-transforms`.
    pub trajectory: Option<PathBuf>,
    pub dataset: DatasetConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: None,
            candidates: None,
            planner: PlannerConfig::default(),
            params: ObjectiveParams::default(),
            resolution: 128,
            texture_resolution: 256,
            visited: Vec::new(),
            trajectory: None,
            dataset: DatasetConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(SceneSource::Obj(p)) = &mut cfg.scene {
            rebase(p);
        }
        if let Some(CandidateSource::File(p)) = &mut cfg.candidates {
            rebase(p);
        }
        if let Some(p) = &mut cfg.trajectory {
            rebase(p);
        }
        Ok(cfg)
    }

    pub fn settings(&self) -> anyhow::Result<EvidenceSettings> {
        self.params.validate().map_err(config_error)?;
        let res = |key: &str, side: u32| {
            Resolution::square(side).map_err(|e| config_error(format!("`{key}`: {e}")))
        };
        Ok(EvidenceSettings {
            resolution: res("resolution", self.resolution)?,
            texture_resolution: res("texture_resolution", self.texture_resolution)?,
            params: self.params,
        })
    }

    /// Mesh for the configured scene and a short name for it.
    pub fn mesh(&self) -> anyhow::Result<(TriangleMesh, String)> {
        match &self.scene {
            None => Err(config_error("missing `scene` (expected {\"obj\": path} or {\"spec\": {...}})")),
            Some(SceneSource::Spec(spec)) => {
                let mesh = generate_scene(spec).map_err(|e| config_error(format!("`scene`: {e}")))?;
                Ok((mesh, spec.name()))
            }
            Some(SceneSource::Obj(path)) => {
                let mesh = load_mesh_obj(path)?.normalize_scale()?;
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Ok((mesh, name))
            }
        }
    }

    pub fn candidate_set(&self) -> anyhow::Result<PoseSet> {
        match &self.candidates {
            None => Err(config_error("missing `candidates` (expected {\"file\": path} or {\"generate\": {...}})")),
            Some(CandidateSource::Generate(sampling)) => {
                generate_sphere_poses(sampling).map_err(|e| config_error(format!("`candidates`: {e}")))
            }
            Some(CandidateSource::File(path)) => Ok(PoseSet::load(path)?),
        }
    }

    pub fn trajectory_path(&self) -> anyhow::Result<&Path> {
        self.trajectory
            .as_deref()
            .ok_or_else(|| config_error("missing `trajectory` (set it in the config or pass --trajectory)"))
    }

    /// Applies the global `--seed` override to every seeded component.
    pub fn override_seed(&mut self, seed: u64) {
        self.planner.seed = seed;
        self.dataset.seed = seed;
        if let Some(CandidateSource::Generate(s)) = &mut self.candidates {
            s.seed = seed;
        }
    }
}
