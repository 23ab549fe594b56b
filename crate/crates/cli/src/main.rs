mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use viewplan::objectives::{ObjectiveParams, RawScores, ScoreVector};
use viewplan::planner::{audit_trajectory, plan_random, plan_trajectory, AuditReport, CandidatePool, Trajectory};
use viewplan::scenegen::{export_dataset, export_transforms};
use viewplan::visibility::dump_buffers;

use config::{config_error, ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "viewplan", version, about = "Budget-constrained camera view planning")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Render side length for visibility and geometry scoring.
    #[arg(long, global = true)]
    resolution: Option<u32>,
    /// Also write color, normal and face-id PNGs for the evaluated views.
    #[arg(long, global = true)]
    dump_png: bool,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a list of visited poses.
    Score {
        /// Comma-separated pose indices; overrides `visited` in the config.
        #[arg(long, value_delimiter = ',')]
        visited: Option<Vec<usize>>,
    },
    /// Plan a trajectory within the configured budget.
    Plan {
        /// Uniformly random baseline instead of the greedy planner.
        #[arg(long)]
        random: bool,
    },
    /// Export a labeled training dataset.
    GenData,
    /// Write a transforms.json for a trajectory.
    ExportTransforms {
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Replay a trajectory and check every greedy step.
    Audit {
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    params: &'a ObjectiveParams,
    scene: Option<SceneInfo>,
    candidate_count: Option<usize>,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct SceneInfo {
    name: String,
    faces: usize,
}

#[derive(Serialize)]
struct ScoreReport {
    visited: Vec<usize>,
    scores: ScoreVector,
    raw: RawScores,
    prefixes: Vec<ScoreVector>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_error("`--threads` must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    if let Some(r) = cli.resolution {
        cfg.resolution = r;
    }

    match &cli.command {
        Command::Score { visited } => {
            if let Some(v) = visited {
                cfg.visited = v.clone();
            }
            score(&cli, &cfg)
        }
        Command::Plan { random } => plan(&cli, &cfg, *random),
        Command::GenData => {
            let out = require_out(&cli)?;
            let settings = cfg.settings()?;
            cfg.dataset.validate().map_err(config_error)?;
            let summary = export_dataset(out, &cfg.dataset, &settings)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::ExportTransforms { trajectory } => {
            if let Some(t) = trajectory {
                cfg.trajectory = Some(t.clone());
            }
            let out = require_out(&cli)?;
            let candidates = cfg.candidate_set()?;
            let traj = Trajectory::load(cfg.trajectory_path()?)?;
            create_dir(out)?;
            let t = export_transforms(&candidates, &traj, out.join("transforms.json"))?;
            println!("wrote {} frames to {}", t.frames.len(), out.join("transforms.json").display());
            Ok(())
        }
        Command::Audit { trajectory } => {
            if let Some(t) = trajectory {
                cfg.trajectory = Some(t.clone());
            }
            audit(&cli, &cfg)
        }
    }
}

fn require_out(cli: &Cli) -> anyhow::Result<&Path> {
    cli.out.as_deref().ok_or_else(|| config_error("this command needs `--out <dir>`"))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Builds the candidate pool, turning configuration problems into exit-2
/// errors before any rendering starts.
fn pool(cfg: &RunConfig) -> anyhow::Result<(CandidatePool, String)> {
    let settings = cfg.settings()?;
    let (mesh, name) = cfg.mesh()?;
    let candidates = cfg.candidate_set()?;
    if candidates.is_empty() {
        return Err(config_error("`candidates`: candidate set is empty"));
    }
    log::info!("scene {name}: {} faces, {} candidates", mesh.face_count(), candidates.len());
    Ok((CandidatePool::new(mesh, candidates, settings)?, name))
}

fn dump_views(pool: &CandidatePool, poses: &[usize], dir: &Path) -> anyhow::Result<()> {
    create_dir(dir)?;
    for &k in poses {
        let buffers = pool.scene().render_view(&pool.candidates().poses[k], pool.settings().resolution);
        dump_buffers(&buffers, dir, &format!("pose{k:03}"))?;
    }
    Ok(())
}

fn score(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<()> {
    let (pool, _) = pool(cfg)?;
    if let Some(&bad) = cfg.visited.iter().find(|&&k| k >= pool.len()) {
        return Err(config_error(format!("`visited`: pose {bad} out of range (0..{})", pool.len())));
    }
    let mut state = pool.empty_state();
    let mut prefixes = Vec::with_capacity(cfg.visited.len());
    for &k in &cfg.visited {
        state.fold(pool.evidence(k)).map_err(config_error)?;
        prefixes.push(state.score_vector());
    }
    let report = ScoreReport {
        visited: cfg.visited.clone(),
        scores: state.score_vector(),
        raw: state.raw_scores(),
        prefixes,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    print!("{json}");
    if let Some(out) = &cli.out {
        create_dir(out)?;
        write(&out.join("score.json"), &json)?;
        let mut csv = String::from("step,pose_index,f_C,f_Q,f_D,f_T\n");
        for (i, (k, v)) in report.visited.iter().zip(&report.prefixes).enumerate() {
            csv += &format!("{},{},{:.6},{:.6},{:.6},{:.6}\n", i + 1, k, v.f_c, v.f_q, v.f_d, v.f_t);
        }
        write(&out.join("scores.csv"), &csv)?;
        if cli.dump_png {
            dump_views(&pool, &cfg.visited, &out.join("renders"))?;
        }
    }
    Ok(())
}

fn plan(cli: &Cli, cfg: &RunConfig, random: bool) -> anyhow::Result<()> {
    let out = require_out(cli)?;
    let (pool, name) = pool(cfg)?;
    cfg.planner.validate(pool.len()).map_err(config_error)?;
    let trajectory = if random {
        let mut t = plan_random(pool.candidates(), cfg.planner.budget, cfg.planner.seed)?;
        pool.annotate_scores(&mut t)?;
        t
    } else {
        plan_trajectory(&pool, &cfg.planner)?
    };

    create_dir(out)?;
    let mut outputs = vec!["trajectory.json".to_string(), "scores.csv".into(), "poses.json".into()];
    trajectory.save(out.join("trajectory.json"))?;
    write(&out.join("scores.csv"), &trajectory.scores_csv())?;
    pool.candidates().save(out.join("poses.json"))?;
    if cfg.planner.record_candidates && !random {
        write(&out.join("candidates.csv"), &trajectory.candidates_csv())?;
        outputs.push("candidates.csv".into());
    }
    if cli.dump_png {
        dump_views(&pool, &trajectory.poses(), &out.join("renders"))?;
        outputs.push("renders/".into());
    }
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        tool: "viewplan",
        version: env!("CARGO_PKG_VERSION"),
        command: if random { "plan --random" } else { "plan" },
        config: cfg,
        params: &cfg.params,
        scene: Some(SceneInfo {
            name,
            faces: pool.scene().mesh().face_count(),
        }),
        candidate_count: Some(pool.len()),
        outputs,
    };
    write(&out.join("manifest.json"), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;

    let scores = trajectory.final_scores().expect("planned steps carry scores");
    println!(
        "poses {:?}  f_C {:.4}  f_Q {:.4}  f_D {:.4}  f_T {:.4}",
        trajectory.poses(),
        scores.f_c,
        scores.f_q,
        scores.f_d,
        scores.f_t
    );
    Ok(())
}

fn audit(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<()> {
    let traj_path = cfg.trajectory_path()?.to_path_buf();
    let trajectory = Trajectory::load(&traj_path)?;
    let (pool, _) = pool(cfg)?;
    cfg.planner.validate(pool.len()).map_err(config_error)?;
    let report: AuditReport = audit_trajectory(&pool, &cfg.planner, &trajectory)?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(out) = &cli.out {
        create_dir(out)?;
        write(&out.join("audit.json"), &json)?;
    }
    for issue in &report.issues {
        eprintln!("step {}: {}", issue.step, issue.message);
    }
    if !report.passed() {
        bail!("audit failed for {}: {} issue(s)", traj_path.display(), report.issues.len());
    }
    println!("audit passed: {} steps", report.steps_checked);
    Ok(())
}
