use std::path::{Path, PathBuf};

use daml::io::{load_workspace, model_to_doc, parse_actions, parse_model, IoError};
use daml::scenarios::{allergy, miners, Scenario};

fn data(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect()
}

fn same_as_builtin(s: &Scenario, model: &str, actions: &[&str]) {
    let paths: Vec<PathBuf> = actions.iter().map(|a| data(a)).collect();
    let refs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    let ws = load_workspace(&data(model), &refs).unwrap();
    assert_eq!(model_to_doc(&ws.model), model_to_doc(&s.model));
    assert_eq!(ws.points, s.points);
    assert!(ws.warnings.is_empty());
}

#[test]
fn data_files_match_the_builtin_scenarios() {
    same_as_builtin(&miners(), "miners.json", &["miners_U.json"]);
    same_as_builtin(&allergy(), "allergy.json", &["allergy_U.json", "allergy_U2.json"]);
}

#[test]
fn malformed_json_reports_a_position() {
    match parse_model("{\n  \"agents\": [\"a\",\n", "broken.json") {
        Err(IoError::Json { file, line, .. }) => {
            assert_eq!(file, "broken.json");
            assert_eq!(line, 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn preconditions_may_only_mention_earlier_points() {
    let later = r#"{"id":"V","owner":"a","events":[{"name":"x","pre":"<W.y> p"},{"name":"z","pre":"true"}]}"#;
    let w = r#"{"id":"W","owner":"a","events":[{"name":"y","pre":"p"},{"name":"q","pre":"true"}]}"#;
    assert!(parse_actions([("v.json", later), ("w.json", w)]).is_err());
    assert!(parse_actions([("w.json", w), ("v.json", later)]).is_ok());
}
