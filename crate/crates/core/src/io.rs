//! JSON documents for models, submodels and decision points.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{DecisionPoint, Library, LibraryError};
use crate::formula::{parse_in, Env, ParseError};
use crate::model::{validate_model, FrameClass, GradedKripkeModel, World};
use crate::submodel::RootedSubmodel;
use crate::symbol::{AgentId, EventName, PropId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldDoc {
    pub id: String,
    #[serde(default)]
    pub true_atoms: Vec<String>,
    #[serde(default)]
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub agents: Vec<String>,
    #[serde(default)]
    pub atoms: Vec<String>,
    pub frame: FrameClass,
    pub worlds: Vec<WorldDoc>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_filter: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventDoc {
    pub name: String,
    pub pre: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub id: String,
    pub owner: String,
    pub events: Vec<EventDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<BTreeMap<String, Vec<(String, String)>>>,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}:{line}:{column}: {message}")]
    Json {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Validation { file: String, message: String },
    #[error("{file}: precondition of `{event}`: {error}")]
    Precondition {
        file: String,
        event: String,
        error: ParseError,
    },
    #[error("{file}: {error}")]
    Library { file: String, error: LibraryError },
}

impl IoError {
    fn validation(file: &str, message: impl Into<String>) -> Self {
        IoError::Validation {
            file: file.to_string(),
            message: message.into(),
        }
    }
}

pub fn model_to_doc(m: &GradedKripkeModel) -> ModelDoc {
    let relations = m
        .relations()
        .iter()
        .map(|(a, rows)| {
            let pairs = rows
                .iter()
                .enumerate()
                .flat_map(|(x, row)| {
                    row.iter()
                        .map(move |&y| (m.world(x).id.to_string(), m.world(y).id.to_string()))
                })
                .collect();
            (a.to_string(), pairs)
        })
        .collect();
    ModelDoc {
        agents: m.agents().iter().map(ToString::to_string).collect(),
        atoms: m.atoms().iter().map(ToString::to_string).collect(),
        frame: m.frame(),
        worlds: m
            .worlds()
            .iter()
            .map(|w| WorldDoc {
                id: w.id.to_string(),
                true_atoms: w.atoms.iter().map(ToString::to_string).collect(),
                value: w.value,
            })
            .collect(),
        relations,
        point: m.point().map(|p| m.world(p).id.to_string()),
        root: None,
        agent_filter: None,
    }
}

pub fn submodel_to_doc(sub: &RootedSubmodel) -> ModelDoc {
    let mut doc = model_to_doc(&sub.model);
    doc.root = Some(sub.model.world(sub.root).id.to_string());
    doc.agent_filter = sub.agent_filter.as_ref().map(ToString::to_string);
    doc
}

/// Builds and validates a model. `file` names the source in errors.
pub fn doc_to_model(doc: &ModelDoc, file: &str) -> Result<GradedKripkeModel, IoError> {
    let mut index = HashMap::new();
    for (k, w) in doc.worlds.iter().enumerate() {
        if w.id.is_empty() || index.insert(w.id.clone(), k).is_some() {
            return Err(IoError::validation(file, format!("duplicate or empty world id `{}`", w.id)));
        }
    }
    let mut atoms: BTreeSet<PropId> = doc.atoms.iter().map(PropId::new).collect();
    let worlds: Vec<World> = doc
        .worlds
        .iter()
        .map(|w| World::new(&w.id, w.true_atoms.iter().map(PropId::new), w.value))
        .collect();
    for w in &worlds {
        atoms.extend(w.atoms.iter().cloned());
    }
    let agents: Vec<AgentId> = doc.agents.iter().map(AgentId::new).collect();
    let mut relations = BTreeMap::new();
    for (agent, pairs) in &doc.relations {
        if !doc.agents.contains(agent) {
            return Err(IoError::validation(file, format!("relation for undeclared agent `{agent}`")));
        }
        let mut rows = vec![BTreeSet::new(); worlds.len()];
        for (a, b) in pairs {
            let (x, y) = match (index.get(a), index.get(b)) {
                (Some(&x), Some(&y)) => (x, y),
                _ => {
                    return Err(IoError::validation(
                        file,
                        format!("relation of `{agent}` names an unknown world in ({a}, {b})"),
                    ))
                }
            };
            rows[x].insert(y);
        }
        relations.insert(AgentId::new(agent), rows);
    }
    let mut m = GradedKripkeModel::from_parts(agents, atoms, worlds, relations, doc.frame);
    let report = validate_model(&m);
    if !report.is_empty() {
        return Err(IoError::validation(file, report.to_string().trim().to_string()));
    }
    let designated = doc.root.as_ref().or(doc.point.as_ref());
    if let Some(p) = designated {
        let k = *index
            .get(p)
            .ok_or_else(|| IoError::validation(file, format!("unknown point `{p}`")))?;
        m = m.with_point(k);
    }
    Ok(m)
}

pub fn action_to_doc(u: &DecisionPoint) -> ActionDoc {
    let relations = (!u.relations.is_empty()).then(|| {
        u.relations
            .iter()
            .map(|(a, pairs)| {
                let pairs = pairs
                    .iter()
                    .map(|&(x, y)| (u.events[x].0.to_string(), u.events[y].0.to_string()))
                    .collect();
                (a.to_string(), pairs)
            })
            .collect()
    });
    ActionDoc {
        id: u.id.to_string(),
        owner: u.owner.to_string(),
        events: u
            .events
            .iter()
            .map(|(n, pre)| EventDoc {
                name: n.to_string(),
                pre: pre.to_string(),
            })
            .collect(),
        relations,
    }
}

/// Builds a decision point whose preconditions may refer to the points
/// already in `library`.
pub fn doc_to_action(doc: &ActionDoc, library: &Library, file: &str) -> Result<DecisionPoint, IoError> {
    let env = Env {
        points: Some(library),
        agents: None,
        precondition: true,
    };
    let mut events = Vec::with_capacity(doc.events.len());
    for e in &doc.events {
        let pre = parse_in(&e.pre, env).map_err(|error| IoError::Precondition {
            file: file.to_string(),
            event: e.name.clone(),
            error,
        })?;
        events.push((EventName::new(&e.name), pre));
    }
    let mut u = DecisionPoint::new(&doc.id, &doc.owner, events);
    if let Some(rels) = &doc.relations {
        for (agent, pairs) in rels {
            let mut set = BTreeSet::new();
            for (a, b) in pairs {
                let x = u.event_index(&EventName::new(a));
                let y = u.event_index(&EventName::new(b));
                match (x, y) {
                    (Some(x), Some(y)) => {
                        set.insert((x, y));
                    }
                    _ => {
                        return Err(IoError::validation(
                            file,
                            format!("relation of `{agent}` names an unknown event in ({a}, {b})"),
                        ))
                    }
                }
            }
            u.relations.insert(AgentId::new(agent), set);
        }
    }
    Ok(u)
}

/// A loaded model with its decision points in application order.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub model: Arc<GradedKripkeModel>,
    pub points: Vec<DecisionPoint>,
    pub library: Library,
    /// Non-fatal remarks, such as decision points with extra event edges.
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, file: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_model(text: &str, file: &str) -> Result<GradedKripkeModel, IoError> {
    doc_to_model(&from_json(text, file)?, file)
}

pub fn load_model(path: &Path) -> Result<GradedKripkeModel, IoError> {
    parse_model(&read(path)?, &path.display().to_string())
}

/// Adds the decision points described by `texts` (name, JSON) in order.
pub fn parse_actions<'a>(
    texts: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<(Vec<DecisionPoint>, Library, Vec<String>), IoError> {
    let mut library = Library::new();
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for (file, text) in texts {
        let doc: ActionDoc = from_json(text, file)?;
        let u = doc_to_action(&doc, &library, file)?;
        if u.has_extra_edges() {
            warnings.push(format!("{file}: decision point {} has non-reflexive event edges", u.id));
        }
        library.add(u.clone()).map_err(|error| IoError::Library {
            file: file.to_string(),
            error,
        })?;
        points.push(u);
    }
    Ok((points, library, warnings))
}

pub fn load_workspace(model_path: &Path, action_paths: &[&Path]) -> Result<Workspace, IoError> {
    let model = load_model(model_path)?;
    let texts: Vec<(String, String)> = action_paths
        .iter()
        .map(|p| Ok((p.display().to_string(), read(p)?)))
        .collect::<Result<_, IoError>>()?;
    let (points, library, warnings) =
        parse_actions(texts.iter().map(|(f, t)| (f.as_str(), t.as_str())))?;
    Ok(Workspace {
        model: Arc::new(model),
        points,
        library,
        warnings,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{allergy, miners};

    #[test]
    fn scenario_documents_round_trip() {
        for s in [miners(), allergy()] {
            let text = to_json(&model_to_doc(&s.model));
            let back = parse_model(&text, "model.json").unwrap();
            assert_eq!(back, *s.model);
            let texts: Vec<String> = s.points.iter().map(|u| to_json(&action_to_doc(u))).collect();
            let (points, _, warnings) =
                parse_actions(texts.iter().map(|t| ("a.json", t.as_str()))).unwrap();
            assert_eq!(points, s.points);
            assert!(warnings.is_empty());
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_model("{\"agents\": [\n  1,", "m.json").unwrap_err();
        match err {
            IoError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn forward_reference_is_rejected() {
        let text = r#"{"id":"U","owner":"i","events":[{"name":"a","pre":"<V.x> p"},{"name":"b","pre":"true"}]}"#;
        let err = parse_actions([("U.json", text)]).unwrap_err();
        assert!(matches!(err, IoError::Precondition { .. }), "{err}");
    }

    #[test]
    fn unvalidated_model_is_refused() {
        let text = r#"{"agents":["i"],"frame":"S5","worlds":[{"id":"w","value":1}],"relations":{"i":[]}}"#;
        let err = parse_model(text, "m.json").unwrap_err();
        assert!(err.to_string().contains("reflexivity"), "{err}");
    }
}
