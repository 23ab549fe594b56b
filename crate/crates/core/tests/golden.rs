//! Regression goldens. Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`
//! after an intentional behavior change, and review the diff.

use std::path::PathBuf;

use serde_json::{json, Value};
use viewplan::geometry::{generate_sphere_poses, SamplingMode, SphereSampling};
use viewplan::objectives::EvidenceSettings;
use viewplan::planner::{plan_trajectory, pseudo_coverage_init, CandidatePool, PlannerConfig};
use viewplan::scenegen::{generate_scene, ColorMode, SceneKind, SceneSpec};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, actual: &Value) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(actual).unwrap() + "\n").unwrap();
        return;
    }
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let expected: Value = serde_json::from_str(&text).unwrap();
    assert_values_close(&expected, actual, name);
}

/// Structural equality with a 1e-12 relative tolerance on floats.
fn assert_values_close(expected: &Value, actual: &Value, at: &str) {
    match (expected, actual) {
        (Value::Number(a), Value::Number(b)) if a.is_f64() || b.is_f64() => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{at}: {a} vs {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{at}: length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_values_close(x, y, &format!("{at}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>(), "{at}: keys");
            for (k, x) in a {
                assert_values_close(x, &b[k], &format!("{at}.{k}"));
            }
        }
        _ => assert_eq!(expected, actual, "{at}"),
    }
}

fn cube_pool(count: usize, seed: u64) -> CandidatePool {
    let mesh = generate_scene(&SceneSpec::new(SceneKind::Cube, ColorMode::Flat)).unwrap();
    let poses = generate_sphere_poses(&SphereSampling { count, seed, ..Default::default() }).unwrap();
    CandidatePool::new(mesh, poses, EvidenceSettings::default()).unwrap()
}

#[test]
fn cube_score_vector() {
    let pool = cube_pool(30, 7);
    let visited = [0, 5, 11, 17];
    let state = pool.state_for(&visited).unwrap();
    let raw = state.raw_scores();
    check_golden(
        "cube_scores.json",
        &json!({
            "visited": visited,
            "raw": raw,
            "scores": state.score_vector(),
        }),
    );
}

#[test]
fn pseudo_coverage_triple() {
    let poses = generate_sphere_poses(&SphereSampling { count: 100, seed: 7, mode: SamplingMode::Random, ..Default::default() }).unwrap();
    let picks = pseudo_coverage_init(&poses, 3).unwrap();
    for a in 0..3 {
        for b in a + 1..3 {
            assert!(poses.poses[picks[a]].angular_distance_deg(&poses.poses[picks[b]]) > 30.0);
        }
    }
    check_golden("pseudo_coverage_init.json", &json!({ "count": 100, "seed": 7, "picks": picks }));
}

#[test]
fn cube_trajectory() {
    let pool = cube_pool(30, 7);
    let traj = plan_trajectory(&pool, &PlannerConfig { budget: 6, seed: 7, ..Default::default() }).unwrap();
    let value: Value = serde_json::from_str(&traj.to_json()).unwrap();
    check_golden("cube_b6_seed7.json", &value);
}
