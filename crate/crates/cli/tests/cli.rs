use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.display().to_string()
}

fn daml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daml"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn allergy_inputs() -> Vec<String> {
    vec![
        "--model".into(),
        data("allergy.json"),
        "--actions".into(),
        format!("{},{}", data("allergy_U.json"), data("allergy_U2.json")),
    ]
}

fn run(args: &[String]) -> Output {
    daml(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let args = |f: &str| {
        let mut v = vec!["check".to_string()];
        v.extend(allergy_inputs());
        v.extend(["--formula".to_string(), f.to_string()]);
        v
    };
    let ok = run(&args("O{b}(U.delta | O{a}(U2.beta | K{a} A))"));
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "true");
    let fails = run(&args("O{b}(U.gamma | O{a}(U2.beta | K{a} A))"));
    assert_eq!(fails.status.code(), Some(1));
    let bad = run(&args("O{b}(U.delta | "));
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("syntax error"));
}

#[test]
fn explain_prints_exact_values() {
    let mut args = vec!["check".to_string()];
    args.extend(allergy_inputs());
    args.extend(
        ["--formula", "O{b}(U.delta | O{a}(U2.beta | K{a} A))", "--explain"].map(String::from),
    );
    let out = stdout(&run(&args));
    assert!(out.contains("e{a; U.delta;U2.beta} @ v@U.delta [v@U.delta;U2.beta=40/1, w3@U.delta;U2.alpha=0/1]"));
    assert!(out.contains("pre(U.delta) = A @ v"));
}

#[test]
fn expect_prints_one_line_per_agent_and_trace() {
    let mut args = vec!["expect".to_string()];
    args.extend(allergy_inputs());
    args.extend(["--at", "v", "--agent", "a", "--trace", "U.delta;U2.beta"].map(String::from));
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "E[a; U.delta;U2.beta] = 40/1\n");
    let mut all = vec!["expect".to_string()];
    all.extend(allergy_inputs());
    all.extend(["--agent", "a"].map(String::from));
    let lines: Vec<String> = stdout(&run(&all)).lines().map(String::from).collect();
    assert_eq!(
        lines,
        [
            "E[a; U.delta;U2.alpha] = 0/1",
            "E[a; U.delta;U2.beta] = 40/1",
            "E[a; U.gamma;U2.alpha] = 50/1",
            "E[a; U.gamma;U2.beta] = 40/1",
        ]
    );
}

#[test]
fn scenario_command_reports_and_writes_dot() {
    let dir = std::env::temp_dir().join(format!("daml-dot-{}", std::process::id()));
    let out = daml(&["scenario", "miners", "--dot", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("[pass]").count(), 6);
    assert!(dir.join("miners_model.dot").exists());
    assert!(dir.join("miners_product_U.dot").exists());
    assert!(std::fs::read_dir(&dir).unwrap().count() > 2);
    std::fs::remove_dir_all(&dir).unwrap();
    let unknown = daml(&["scenario", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn translate_traces_steps() {
    let out = daml(&[
        "translate",
        "--actions",
        &data("miners_U.json"),
        "--formula",
        "O{i}(U.gamma | s9)",
        "--trace",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("R1: O{i}(U.gamma | s9)"));
    assert!(lines[0].ends_with("(c: 6 -> 3)"));
    assert_eq!(lines.last().copied(), Some("((s9 & s9) & e{i; U.gamma})"));
}

#[test]
fn update_and_validate() {
    let mut args = vec!["update".to_string()];
    args.extend(allergy_inputs());
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["worlds"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["id"] == "v@U.delta;U2.beta"));
    let ok = daml(&["validate", "--model", &data("miners.json"), "--actions", &data("miners_U.json")]);
    assert_eq!(ok.status.code(), Some(0));
    let broken = std::env::temp_dir().join(format!("daml-broken-{}.json", std::process::id()));
    let text = std::fs::read_to_string(data("allergy.json")).unwrap().replace("\"KD45\"", "\"S5\"");
    std::fs::write(&broken, text).unwrap();
    let bad = daml(&["validate", "--model", broken.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("invalid:"));
    std::fs::remove_file(&broken).unwrap();
}

#[test]
fn export_dot_of_a_submodel() {
    let out = daml(&[
        "export-dot",
        "--model",
        &data("allergy.json"),
        "--root",
        "v",
        "--agent",
        "a",
        "--no-loops",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph model {"));
    assert!(text.contains("shape=doublecircle"));
}

#[test]
fn axioms_json_is_deterministic() {
    let a = daml(&["axioms", "--trials", "20", "--seed", "5", "--json"]);
    let b = daml(&["axioms", "--trials", "20", "--seed", "5", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["trials"], 20);
}
