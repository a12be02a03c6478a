//! End-to-end runs on a small cube.

use mq_helmholtz::experiment::{run_experiment, ExperimentConfig, RunRow};

fn run(json: &str) -> Vec<RunRow> {
    let dir = tempfile::tempdir().unwrap();
    let json = json.replace("OUT", &format!("{:?}", dir.path()));
    let cfg = ExperimentConfig::from_json(&json).unwrap();
    let out = run_experiment(&cfg).unwrap();
    assert!(out.csv_path.exists());
    out.rows
}

#[test]
fn every_solver_reaches_one_percent_on_uniform_cube() {
    let rows = run(
        r#"{"geometry": "cube", "distribution": "uniform", "n_target": 125,
            "epsilon": [0.5, 1, 2, 4], "wavenumber": 3,
            "methods": ["tikh_rg", "tsvd", "ine_tsvd", "hkt", "reg_gmres"],
            "k_trunc": 20, "output_dir": OUT}"#,
    );
    assert_eq!(rows.len(), 20);
    for m in ["tikh_rg", "tsvd", "ine_tsvd", "hkt", "reg_gmres"] {
        let best = rows
            .iter()
            .filter(|r| r.method.name() == m && r.re_nodes.is_finite())
            .min_by(|a, b| a.re_nodes.total_cmp(&b.re_nodes))
            .unwrap_or_else(|| panic!("{m}: no finite rows"));
        eprintln!(
            "{m}: Re {:.2e} at ε={}, interior residual {:.2e}",
            best.re_nodes, best.epsilon, best.interior_residual
        );
        assert!(best.re_nodes <= 1e-2, "{m}: {:.3e}", best.re_nodes);
    }
}

#[test]
fn offnode_error_tracks_node_error() {
    let rows = run(
        r#"{"geometry": "cube", "distribution": {"kind": "random", "seed": 5}, "n_target": 216,
            "epsilon": 1, "methods": ["tikh_rg", "hkt"], "k_trunc": 30,
            "n_offnodes": 500, "compute_kappa": false, "output_dir": OUT}"#,
    );
    for r in &rows {
        let ratio = r.re_offnodes / r.re_nodes;
        assert!((0.1..=10.0).contains(&ratio), "{}: {ratio}", r.method.name());
    }
}
