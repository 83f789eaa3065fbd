use std::path::Path;
use std::process::{Command, Output};

fn sbg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_game(dir: &Path) {
    std::fs::write(
        dir.join("g.json"),
        r#"{"xs":[0.0,1.0],"ys":[0.0,1.0],"u":[[1.0,0.5],[0.2,0.8]]}"#,
    )
    .unwrap();
}

#[test]
fn gen_game_round_trips_floats() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbg(
        &[
            "gen-game", "--seed", "1", "--n", "4", "--m", "3", "--out", "g.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("g.json")).unwrap();
    let game = sbg_core::FiniteGame::from_json(&text).unwrap();
    assert_eq!((game.grid().n(), game.grid().m()), (4, 3));
    assert_eq!(
        sbg_core::FiniteGame::from_json(&game.to_json()).unwrap(),
        game
    );
}

#[test]
fn solve_reports_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    write_game(dir.path());
    let out = sbg(
        &[
            "solve", "--game", "g.json", "--noise", "0.01", "--out", "log.csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["x_index"], 0);
    let log = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert!(log.starts_with("t,x_index,y_index,u_tilde\n"));
    assert_eq!(
        log.lines().count() as u64,
        report["rounds_used"].as_u64().unwrap() + 1
    );
}

#[test]
fn solve_gp_se_uses_schedule() {
    let dir = tempfile::tempdir().unwrap();
    write_game(dir.path());
    let out = sbg(
        &[
            "solve",
            "--game",
            "g.json",
            "--algorithm",
            "gp_se",
            "--budget",
            "100",
            "--noise",
            "0.1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rounds_used"], 99);
}

#[test]
fn bounds_prints_all_keys() {
    let dir = tempfile::tempdir().unwrap();
    write_game(dir.path());
    let out = sbg(
        &["bounds", "--game", "g.json", "--budget", "2000"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "delta_T",
            "delta_T_eps",
            "delta_opt",
            "h_one",
            "h_star",
            "h_two",
            "k_eps",
            "t_delta"
        ]
    );
    assert_eq!(v["k_eps"], 11);
    assert!(v["h_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn spitfire_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbg(
        &[
            "spitfire",
            "--k-eps",
            "4,8",
            "--runs",
            "2",
            "--round-cap",
            "2000",
            "--plot",
            "plot.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("run,k_eps,eps_theoretical,eps_hat,rounds,terminated")
    );
    assert_eq!(lines.count(), 4);
    let plot = std::fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    assert!(plot.starts_with("k_eps,eps,eps_hat\n4,"));
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write_game(dir.path());
    std::fs::write(
        dir.path().join("exp.toml"),
        "algorithm = \"m_g_lucb\"\nnoise = 0.01\nruns = 4\n\n[source]\nkind = \"file\"\npath = \"g.json\"\n",
    )
    .unwrap();
    let out = sbg(
        &["experiment", "--config", "exp.toml", "--out", "res"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("res/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["n_runs"], 4);
    assert_eq!(summary["pct_opt"], 100.0);
    let runs = std::fs::read_to_string(dir.path().join("res/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_game(dir.path());
    let code = |args: &[&str]| sbg(args, dir.path()).status.code();
    assert_eq!(
        code(&["solve", "--game", "g.json", "--delta", "1.5"]),
        Some(2)
    );
    assert_eq!(code(&["solve", "--game", "missing.json"]), Some(2));
    assert_eq!(code(&["bounds"]), Some(2));
    assert_eq!(code(&["gen-game", "--n", "1"]), Some(2));
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"xs":[0.0,1.0],"ys":[0.0,1.0],"u":[[1e308,-1e308],[1e308,-1e308]]}"#,
    )
    .unwrap();
    let overflow = [
        "solve",
        "--game",
        "bad.json",
        "--noise",
        "0.01",
        "--algorithm",
        "gp_se",
        "--budget",
        "100",
    ];
    assert_eq!(code(&overflow), Some(3));
}

#[test]
fn presets_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            sbg_core::harness::ExperimentConfig::load(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
