//! Decision points (single-agent action models) and action model composition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{Formula, Preconditions};
use crate::model::ValidationReport;
use crate::symbol::{AgentId, EventName, EventTrace, PointId, Step};

/// One agent's menu of alternatives at one choice moment.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionPoint {
    pub id: PointId,
    pub owner: AgentId,
    pub events: Vec<(EventName, Formula)>,
    /// Explicit event relations by agent, as index pairs into `events`.
    /// Agents without an entry get the identity relation.
    pub relations: BTreeMap<AgentId, BTreeSet<(usize, usize)>>,
}

impl DecisionPoint {
    /// A decision point whose relations are reflexive-only for every agent.
    pub fn new(
        id: impl AsRef<str>,
        owner: impl AsRef<str>,
        events: impl IntoIterator<Item = (EventName, Formula)>,
    ) -> Self {
        DecisionPoint {
            id: PointId::new(id),
            owner: AgentId::new(owner),
            events: events.into_iter().collect(),
            relations: BTreeMap::new(),
        }
    }

    pub fn event_index(&self, name: &EventName) -> Option<usize> {
        self.events.iter().position(|(n, _)| n == name)
    }

    pub fn step(&self, k: usize) -> Step {
        Step {
            point: self.id.clone(),
            event: self.events[k].0.clone(),
        }
    }

    /// Whether `a Q_agent b`.
    pub fn related(&self, agent: &AgentId, a: usize, b: usize) -> bool {
        match self.relations.get(agent) {
            Some(rel) => rel.contains(&(a, b)),
            None => a == b,
        }
    }

    /// True when some agent's relation has a non-loop edge.
    pub fn has_extra_edges(&self) -> bool {
        self.relations
            .values()
            .any(|rel| rel.iter().any(|(a, b)| a != b))
    }

    pub fn as_action_model(&self) -> ActionModel {
        let events = (0..self.events.len())
            .map(|k| ActionEvent {
                trace: EventTrace::single(self.step(k)),
                pre: self.events[k].1.clone(),
            })
            .collect();
        let n = self.events.len();
        let relations = self
            .relations
            .keys()
            .map(|a| {
                let pairs = (0..n)
                    .flat_map(|x| (0..n).map(move |y| (x, y)))
                    .filter(|&(x, y)| self.related(a, x, y))
                    .collect();
                (a.clone(), pairs)
            })
            .collect();
        ActionModel {
            name: self.id.to_string(),
            events,
            relations,
        }
    }
}

/// Checks the decision-point invariants: at least two events, distinct
/// names, reflexive relations, ought-free preconditions.
pub fn validate_decision_point(u: &DecisionPoint) -> ValidationReport {
    let mut report = ValidationReport::default();
    if u.events.len() < 2 {
        report.push(
            "cardinality",
            format!("decision point {} has fewer than two actions", u.id),
        );
    }
    let mut names = BTreeSet::new();
    for (name, pre) in &u.events {
        if !names.insert(name) {
            report.push("events", format!("duplicate event `{name}` in {}", u.id));
        }
        if !pre.is_ought_free() {
            report.push(
                "precondition",
                format!("precondition of {}.{name} is outside AML fragment", u.id),
            );
        }
    }
    let n = u.events.len();
    for (agent, rel) in &u.relations {
        for &(a, b) in rel {
            if a >= n || b >= n {
                report.push(
                    "relations",
                    format!("relation of {agent} in {} references a missing event", u.id),
                );
            }
        }
        for k in 0..n {
            if !rel.contains(&(k, k)) {
                report.push(
                    "reflexivity",
                    format!(
                        "Q_{agent} of {} is not reflexive at {}",
                        u.id, u.events[k].0
                    ),
                );
            }
        }
    }
    report
}

/// An event of a (possibly composed) action model.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionEvent {
    pub trace: EventTrace,
    pub pre: Formula,
}

/// An action model over traces: a decision point, or a composition of several.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionModel {
    pub name: String,
    pub events: Vec<ActionEvent>,
    /// Explicit relations; agents without an entry get the identity relation.
    pub relations: BTreeMap<AgentId, BTreeSet<(usize, usize)>>,
}

impl ActionModel {
    pub fn related(&self, agent: &AgentId, a: usize, b: usize) -> bool {
        match self.relations.get(agent) {
            Some(rel) => rel.contains(&(a, b)),
            None => a == b,
        }
    }

    pub fn is_reflexive_only(&self) -> bool {
        self.relations
            .values()
            .all(|rel| rel.iter().all(|(a, b)| a == b) && (0..self.events.len()).all(|k| rel.contains(&(k, k))))
    }

    pub fn event_index(&self, trace: &EventTrace) -> Option<usize> {
        self.events.iter().position(|e| &e.trace == trace)
    }
}

/// `U ∘ U'`: events are pairs `α;β`, related for `j` iff both components
/// are, with precondition `<α> pre'(β)`.
pub fn compose(u: &ActionModel, u2: &ActionModel) -> ActionModel {
    let n2 = u2.events.len();
    let mut events = Vec::with_capacity(u.events.len() * n2);
    for a in &u.events {
        for b in &u2.events {
            events.push(ActionEvent {
                trace: a.trace.concat(&b.trace),
                pre: Formula::diamond(a.trace.clone(), b.pre.clone()),
            });
        }
    }
    let agents: BTreeSet<&AgentId> = u.relations.keys().chain(u2.relations.keys()).collect();
    let n = events.len();
    let relations = agents
        .into_iter()
        .map(|agent| {
            let pairs = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| {
                    u.related(agent, x / n2, y / n2) && u2.related(agent, x % n2, y % n2)
                })
                .collect();
            (agent.clone(), pairs)
        })
        .collect();
    ActionModel {
        name: format!("{}*{}", u.name, u2.name),
        events,
        relations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("decision point `{0}` is declared twice")]
    Duplicate(PointId),
    #[error("decision point `{0}` is invalid: {1}")]
    Invalid(PointId, String),
    #[error("precondition in `{point}` refers to `{reference}`, which is not declared before it")]
    CyclicPrecondition { point: PointId, reference: PointId },
}

/// The declared decision points, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Library {
    points: Vec<Arc<DecisionPoint>>,
    index: HashMap<PointId, usize>,
}

impl Library {
    pub fn new() -> Self {
        Library::default()
    }

    pub fn from_points(points: impl IntoIterator<Item = DecisionPoint>) -> Result<Self, LibraryError> {
        let mut lib = Library::new();
        for p in points {
            lib.add(p)?;
        }
        Ok(lib)
    }

    /// Adds a validated decision point. Preconditions may only mention
    /// decision points declared earlier.
    pub fn add(&mut self, point: DecisionPoint) -> Result<(), LibraryError> {
        if self.index.contains_key(&point.id) {
            return Err(LibraryError::Duplicate(point.id));
        }
        let report = validate_decision_point(&point);
        if !report.is_empty() {
            return Err(LibraryError::Invalid(point.id, report.to_string().trim().to_string()));
        }
        for (_, pre) in &point.events {
            for reference in pre.points() {
                if !self.index.contains_key(&reference) {
                    return Err(LibraryError::CyclicPrecondition {
                        point: point.id.clone(),
                        reference,
                    });
                }
            }
        }
        self.index.insert(point.id.clone(), self.points.len());
        self.points.push(Arc::new(point));
        Ok(())
    }

    pub fn get(&self, id: &PointId) -> Option<&Arc<DecisionPoint>> {
        self.index.get(id).map(|&k| &self.points[k])
    }

    pub fn points(&self) -> &[Arc<DecisionPoint>] {
        &self.points
    }

    /// The composed action model of a trace's decision points, restricted
    /// to nothing: all event combinations are present.
    pub fn composed(&self, points: &[PointId]) -> Option<ActionModel> {
        let mut it = points.iter();
        let first = self.get(it.next()?)?.as_action_model();
        it.try_fold(first, |acc, id| Some(compose(&acc, &self.get(id)?.as_action_model())))
    }
}

impl Preconditions for Library {
    fn pre(&self, step: &Step) -> Option<&Formula> {
        let point = self.get(&step.point)?;
        point
            .events
            .iter()
            .find(|(n, _)| n == &step.event)
            .map(|(_, f)| f)
    }

    fn owner(&self, point: &PointId) -> Option<&AgentId> {
        self.get(point).map(|p| &p.owner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn dp(id: &str, owner: &str, events: &[(&str, &str)]) -> DecisionPoint {
        DecisionPoint::new(
            id,
            owner,
            events
                .iter()
                .map(|(n, p)| (EventName::new(n), parse(p).unwrap())),
        )
    }

    #[test]
    fn miners_point_is_valid() {
        let u = dp(
            "U",
            "i",
            &[
                ("alpha", "(A & s10) | (B & s0)"),
                ("beta", "(A & s0) | (B & s10)"),
                ("gamma", "s9"),
            ],
        );
        assert!(validate_decision_point(&u).is_empty());
    }

    #[test]
    fn single_event_is_rejected() {
        let u = dp("U", "i", &[("alpha", "true")]);
        let report = validate_decision_point(&u);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains("fewer than two actions"));
    }

    #[test]
    fn ought_in_precondition_is_rejected() {
        let u = dp("U", "i", &[("alpha", "O{i}(V.a | p)"), ("beta", "true")]);
        let report = validate_decision_point(&u);
        assert!(report.violations[0]
            .message
            .contains("precondition of U.alpha is outside AML fragment"));
    }

    #[test]
    fn non_reflexive_relation_is_reported() {
        let mut u = dp("U", "i", &[("a", "true"), ("b", "true")]);
        u.relations
            .insert(AgentId::new("i"), BTreeSet::from([(0, 0), (0, 1)]));
        let report = validate_decision_point(&u);
        assert!(report.violations.iter().any(|v| v.clause == "reflexivity"));
    }

    #[test]
    fn composition_is_a_cartesian_product() {
        let u = dp("U", "b", &[("delta", "A"), ("gamma", "true")]);
        let u2 = dp("U2", "a", &[("alpha", "d"), ("beta", "d'")]);
        let c = compose(&u.as_action_model(), &u2.as_action_model());
        assert_eq!(c.events.len(), 4);
        let traces: Vec<String> = c.events.iter().map(|e| e.trace.to_string()).collect();
        assert_eq!(
            traces,
            ["U.delta;U2.alpha", "U.delta;U2.beta", "U.gamma;U2.alpha", "U.gamma;U2.beta"]
        );
        assert_eq!(c.events[0].pre.to_string(), "<U.delta> d");
        let a = AgentId::new("a");
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(c.related(&a, x, y), x == y);
            }
        }
        assert!(c.is_reflexive_only());
    }

    #[test]
    fn library_rejects_forward_references() {
        let mut lib = Library::new();
        let u = dp("U", "i", &[("a", "<V.x> p"), ("b", "true")]);
        assert!(matches!(
            lib.add(u),
            Err(LibraryError::CyclicPrecondition { .. })
        ));
        let v = dp("V", "i", &[("x", "p"), ("y", "true")]);
        lib.add(v).unwrap();
        let u = dp("U", "i", &[("a", "<V.x> p"), ("b", "true")]);
        lib.add(u).unwrap();
        assert!(matches!(
            lib.add(dp("U", "i", &[("a", "p"), ("b", "q")])),
            Err(LibraryError::Duplicate(_))
        ));
    }
}
