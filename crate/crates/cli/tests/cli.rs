use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qspace(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qspace"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("QSPACE_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("report on stdout")
}

#[test]
fn star_of_coordinates_prints_the_relation() {
    let o = qspace(&["eval", "x3 ⋆ x+"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "q^2 * x+ x3");
    let o = qspace(&["eval", "x3", "star", "x+"], &[]);
    assert_eq!(stdout(&o).trim(), "q^2 * x+ x3");
}

#[test]
fn derivative_of_a_square_is_a_q_number() {
    let o = qspace(&["eval", "∂+ ▷ x+^2"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "(1+q^4) * x+");
    let o = qspace(&["eval", "x+^2", "partial", "+"], &[]);
    assert_eq!(stdout(&o).trim(), "(1+q^4) * x+");
}

#[test]
fn classical_eval_specializes_at_one() {
    let o = qspace(&["--classical", "--q", "1", "eval", "x3 ⋆ x+"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "x+ x3");
}

#[test]
fn malformed_input_exits_with_usage_code() {
    let o = qspace(&["eval", "x+^", "star", "x3"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ParseError at 3"), "{}", stderr(&o));
    let o = qspace(&["eval", "x+", "partial", "7"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("BadIndex"));
    let o = qspace(&["eval", "x+", "cube", "x3"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = qspace(&["eval", "x+ x3"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ordering_mismatch_is_surfaced() {
    let o = qspace(&["eval", "x+ x3", "partial", "hat 3"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("OrderingMismatch"), "{}", stderr(&o));
    let o = qspace(&["eval", "x+ x3", "partial", "hat 3", "--ordering", "reversed"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn translations_and_inversions_evaluate() {
    let o = qspace(&["--order", "3", "eval", "x+ x-", "translate", "plus-bar"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "y+ y- + x+ y- + x- y+ + x+ x-");
    let o = qspace(&["eval", "x3", "invert", "minus-bar"], &[]);
    assert_eq!(stdout(&o).trim(), "-x3");
}

#[test]
fn algebra_suite_passes_on_defaults() {
    let out = scratch("algebra.json");
    let o = qspace(&["identities", "algebra", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["schema"], "qspace-report/1");
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["result"]["failed"], 0);
    let ids = doc["result"]["identities"].as_array().unwrap();
    assert!(ids.iter().any(|i| i["name"] == "coordinate relations" && i["topic"] == "coordinate relations"));
}

#[test]
fn deformed_mode_rejects_q_one() {
    let o = qspace(&["--q", "1/1", "identities", "all"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("classical"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn unknown_suite_prints_usage() {
    let o = qspace(&["identities", "geometry"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("possible values"));
}

#[test]
fn invalid_configs_exit_with_usage_code() {
    for args in [
        vec!["--jmin", "1", "--jmax", "1", "scatter", "smatrix"],
        vec!["--dt", "0", "scatter", "smatrix"],
        vec!["--q", "-3/2", "scatter", "smatrix"],
        vec!["--set", "potential=square", "scatter", "smatrix"],
        vec!["--set", "nonsense=1", "scatter", "smatrix"],
        vec!["--classical", "--q", "1", "scatter", "smatrix"],
    ] {
        let o = qspace(&args, &[]);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn zero_potential_smatrix_is_the_identity() {
    let o = qspace(&["--potential", "zero", "scatter", "smatrix"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json_stdout(&o);
    assert_eq!(doc["result"]["identity_deviation"].as_f64(), Some(0.0));
    let total = doc["result"]["total"].as_array().unwrap();
    assert_eq!(total.len(), 64);
    for (r, row) in total.iter().enumerate() {
        for (c, z) in row.as_array().unwrap().iter().enumerate() {
            let want = if r == c { 1.0 } else { 0.0 };
            assert_eq!(z[0].as_f64(), Some(want));
            assert_eq!(z[1].as_f64(), Some(0.0));
        }
    }
}

#[test]
fn gaussian_unitarity_holds_at_first_order() {
    let o = qspace(&["--potential", "gaussian", "--set", "s_order=1", "scatter", "unitarity"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json_stdout(&o);
    let d = doc["result"]["defects"][0]["defect"].as_f64().unwrap();
    assert!(d < 1e-12, "{d}");
}

#[test]
fn dyson_with_a_short_window_fails() {
    let o = qspace(&["--t1", "1", "--dt", "1", "scatter", "dyson"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("WindowTooSmall"));
    let doc = json_stdout(&o);
    assert_eq!(doc["status"], "error");
}

#[test]
fn dyson_report_passes_on_defaults() {
    let o = qspace(&["scatter", "dyson"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json_stdout(&o);
    assert!(doc["result"]["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn violated_threshold_exits_one() {
    let o = qspace(&["--set", "cross_tol=1e-30", "scatter", "dyson"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_stdout(&o)["status"], "fail");
    assert!(stderr(&o).contains("FAIL"));
}

#[test]
fn born_report_counts_orders() {
    let o = qspace(&["scatter", "born"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json_stdout(&o);
    let orders = doc["result"]["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 2);
    for (n, row) in orders.iter().enumerate() {
        let want = 2f64.powi(n as i32 + 2);
        assert!((row["ratio"].as_f64().unwrap() / want - 1.0).abs() < 0.2);
    }
}

#[test]
fn reports_are_byte_identical_and_hashed() {
    let (a, b) = (scratch("det-a.json"), scratch("det-b.json"));
    for p in [&a, &b] {
        let o = qspace(&["scatter", "unitarity", "--out", p.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let doc: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    let other = qspace(&["--seed", "8", "scatter", "unitarity"], &[]);
    assert_ne!(json_stdout(&other)["config_hash"], doc["config_hash"]);
}

#[test]
fn flags_override_environment_override_file() {
    let file = scratch("layered.conf");
    std::fs::write(&file, "# layered config\nq = 5/4\norder = 4\nseed = 11 # trailing comment\n\n").unwrap();
    let path = file.to_str().unwrap();
    let run = |args: &[&str], env: &[(&str, &str)]| {
        let o = qspace(args, env);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        json_stdout(&o)["config"].clone()
    };
    let c = run(&["--config", path, "--potential", "zero", "scatter", "smatrix"], &[]);
    assert_eq!((c["q"].as_str(), c["order"].as_str(), c["seed"].as_str()), (Some("5/4"), Some("4"), Some("11")));
    let c = run(&["--config", path, "--potential", "zero", "scatter", "smatrix"], &[("QSPACE_ORDER", "5")]);
    assert_eq!((c["q"].as_str(), c["order"].as_str()), (Some("5/4"), Some("5")));
    let c = run(
        &["--config", path, "--order", "6", "--potential", "zero", "scatter", "smatrix"],
        &[("QSPACE_ORDER", "5"), ("QSPACE_Q", "1.1")],
    );
    assert_eq!((c["q"].as_str(), c["order"].as_str()), (Some("11/10"), Some("6")));
}

#[test]
fn bad_config_file_lines_are_rejected() {
    let file = scratch("bad.conf");
    std::fs::write(&file, "q 3/2\n").unwrap();
    let o = qspace(&["--config", file.to_str().unwrap(), "scatter", "smatrix"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));
    let o = qspace(&["scatter", "smatrix"], &[("QSPACE_ORDER", "many")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn potential_files_are_read_on_the_grid() {
    let file = scratch("zero-potential.json");
    let zeros = vec![[0.0, 0.0]; 512];
    std::fs::write(&file, serde_json::to_string(&zeros).unwrap()).unwrap();
    let set = format!("potential_file={}", file.display());
    let o = qspace(&["--potential", "file", "--set", &set, "scatter", "smatrix"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json_stdout(&o)["result"]["identity_deviation"].as_f64(), Some(0.0));
    std::fs::write(&file, "[[0.0, 0.0]]").unwrap();
    let o = qspace(&["--potential", "file", "--set", &set, "scatter", "smatrix"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 512"));
}
