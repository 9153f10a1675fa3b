//! The two worked examples: the Miners' Puzzle and the obligation to inform
//! about a drug allergy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::action::{DecisionPoint, Library};
use crate::checker::Checker;
use crate::error::ModelError;
use crate::expectation::expected_value;
use crate::formula::{parse, parse_in, Env, Formula};
use crate::model::{validate_model, FrameClass, GradedKripkeModel, World};
use crate::product::apply_sequence;
use crate::rational::Rational;
use crate::submodel::{action_component, agent_submodel};
use crate::symbol::{AgentId, EventName, EventTrace, PropId, Step, WorldId};

/// A formula with the verdict it must receive at the scenario's point.
#[derive(Clone, Debug)]
pub struct Claim {
    pub formula: String,
    pub expected: bool,
}

/// The expected value of one action-generated submodel.
#[derive(Clone, Debug)]
pub struct ExpectationClaim {
    pub agent: AgentId,
    pub trace: EventTrace,
    pub root: WorldId,
    pub expected: Rational,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub model: Arc<GradedKripkeModel>,
    /// Decision points in application order.
    pub points: Vec<DecisionPoint>,
    pub library: Library,
    pub claims: Vec<Claim>,
    pub expectations: Vec<ExpectationClaim>,
    /// Formulas whose intended verdict is not settled; reported under both
    /// ambient readings without pass or fail.
    pub informational: Vec<String>,
}

impl Scenario {
    pub fn point(&self) -> usize {
        self.model.point().expect("scenario models have a point")
    }

    pub fn parse(&self, text: &str) -> Formula {
        let env = Env {
            points: Some(&self.library),
            agents: Some(self.model.agents()),
            precondition: false,
        };
        parse_in(text, env).expect("scenario formulas parse")
    }
}

fn build_model(
    agents: &[&str],
    worlds: &[(&str, &[&str], u64)],
    relations: &[(&str, Vec<(&str, &str)>)],
    frame: FrameClass,
    point: &str,
) -> GradedKripkeModel {
    let worlds: Vec<World> = worlds
        .iter()
        .map(|(id, atoms, value)| World::new(id, atoms.iter().map(PropId::new), *value))
        .collect();
    let atoms: BTreeSet<PropId> = worlds.iter().flat_map(|w| w.atoms.iter().cloned()).collect();
    let index = |id: &str| worlds.iter().position(|w| w.id.as_str() == id).expect("declared world");
    let rels: BTreeMap<AgentId, Vec<BTreeSet<usize>>> = relations
        .iter()
        .map(|(agent, pairs)| {
            let mut rows = vec![BTreeSet::new(); worlds.len()];
            for (a, b) in pairs {
                rows[index(a)].insert(index(b));
            }
            (AgentId::new(agent), rows)
        })
        .collect();
    let p = index(point);
    let m = GradedKripkeModel::from_parts(
        agents.iter().map(AgentId::new).collect(),
        atoms,
        worlds,
        rels,
        frame,
    )
    .with_point(p);
    debug_assert!(validate_model(&m).is_empty());
    m
}

fn all_pairs<'a>(xs: &[&'a str], ys: &[&'a str]) -> Vec<(&'a str, &'a str)> {
    xs.iter().flat_map(|x| ys.iter().map(move |y| (*x, *y))).collect()
}

fn point(id: &str, owner: &str, events: &[(&str, &str)]) -> DecisionPoint {
    DecisionPoint::new(
        id,
        owner,
        events
            .iter()
            .map(|(n, pre)| (EventName::new(n), parse(pre).expect("precondition parses"))),
    )
}

fn trace(steps: &[(&str, &str)]) -> EventTrace {
    EventTrace(steps.iter().map(|(p, e)| Step::new(p, e)).collect())
}

/// Ten miners in shaft A or B; agent `i` may block A, block B, or neither.
pub fn miners() -> Scenario {
    let names = ["A10", "A9", "A0", "B10", "B9", "B0"];
    let model = build_model(
        &["i"],
        &[
            ("A10", &["A", "s10"], 10),
            ("A9", &["A", "s9"], 9),
            ("A0", &["A", "s0"], 0),
            ("B10", &["B", "s10"], 10),
            ("B9", &["B", "s9"], 9),
            ("B0", &["B", "s0"], 0),
        ],
        &[("i", all_pairs(&names, &names))],
        FrameClass::S5,
        "A9",
    );
    let u = point(
        "U",
        "i",
        &[
            ("alpha", "(A & s10) | (B & s0)"),
            ("beta", "(A & s0) | (B & s10)"),
            ("gamma", "s9"),
        ],
    );
    let library = Library::from_points([u.clone()]).expect("valid decision point");
    let i = AgentId::new("i");
    Scenario {
        name: "miners",
        model: Arc::new(model),
        points: vec![u],
        library,
        claims: vec![
            Claim { formula: "O{i}(U.alpha | true)".into(), expected: false },
            Claim { formula: "O{i}(U.beta | true)".into(), expected: false },
            Claim { formula: "O{i}(U.gamma | true)".into(), expected: true },
        ],
        expectations: vec![
            ExpectationClaim {
                agent: i.clone(),
                trace: trace(&[("U", "gamma")]),
                root: WorldId::new("A9@U.gamma"),
                expected: Rational::from_integer(9),
            },
            ExpectationClaim {
                agent: i.clone(),
                trace: trace(&[("U", "alpha")]),
                root: WorldId::new("A10@U.alpha"),
                expected: Rational::from_integer(5),
            },
            ExpectationClaim {
                agent: i,
                trace: trace(&[("U", "beta")]),
                root: WorldId::new("A0@U.beta"),
                expected: Rational::from_integer(5),
            },
        ],
        informational: vec![],
    }
}

/// Agent `b` knows the patient is allergic to drug `d`; agent `a`, who
/// administers the drug, does not.
pub fn allergy() -> Scenario {
    let top = ["w", "v"];
    let bottom = ["w3", "w4", "w5", "w6"];
    let mut rb = all_pairs(&top, &top);
    rb.extend(all_pairs(&bottom, &bottom));
    let mut ra = all_pairs(&top, &bottom);
    ra.extend(all_pairs(&bottom, &bottom));
    let model = build_model(
        &["a", "b"],
        &[
            ("w", &["A", "d"], 0),
            ("v", &["A", "d'"], 40),
            ("w3", &["A", "d"], 0),
            ("w4", &["A", "d'"], 40),
            ("w5", &["d"], 100),
            ("w6", &["d'"], 40),
        ],
        &[("a", ra), ("b", rb)],
        FrameClass::KD45,
        "v",
    );
    let u = point("U", "b", &[("delta", "A"), ("gamma", "true")]);
    let u2 = point("U2", "a", &[("alpha", "d"), ("beta", "d'")]);
    let library = Library::from_points([u.clone(), u2.clone()]).expect("valid decision points");
    let expectations = [
        ("a", "delta", "alpha", "w", 0),
        ("a", "delta", "beta", "v", 40),
        ("a", "gamma", "alpha", "w", 50),
        ("a", "gamma", "beta", "v", 40),
        ("b", "delta", "alpha", "w", 0),
        ("b", "delta", "beta", "v", 40),
        ("b", "gamma", "alpha", "w", 0),
        ("b", "gamma", "beta", "v", 40),
    ]
    .into_iter()
    .map(|(agent, first, second, root, value)| {
        let t = trace(&[("U", first), ("U2", second)]);
        ExpectationClaim {
            agent: AgentId::new(agent),
            root: WorldId::new(format!("{root}@{t}")),
            trace: t,
            expected: Rational::from_integer(value),
        }
    })
    .collect();
    Scenario {
        name: "allergy",
        model: Arc::new(model),
        points: vec![u, u2],
        library,
        claims: vec![
            Claim {
                formula: "O{b}(U.delta | O{a}(U2.beta | K{a} A))".into(),
                expected: true,
            },
            Claim {
                formula: "O{b}(U.gamma | O{a}(U2.beta | K{a} A))".into(),
                expected: false,
            },
        ],
        expectations,
        informational: vec![
            "K{b} O{a}(U2.beta | A)".into(),
            "K{b} O{a}(U2.alpha | true)".into(),
        ],
    }
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "miners" => Some(miners()),
        "allergy" => Some(allergy()),
        _ => None,
    }
}

pub const NAMES: [&str; 2] = ["miners", "allergy"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportLine {
    pub item: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub lines: Vec<ReportLine>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.name)?;
        for l in &self.lines {
            let tag = match l.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Informational => "info",
            };
            writeln!(f, "  [{tag}] {}: expected {}, got {}", l.item, l.expected, l.actual)?;
        }
        Ok(())
    }
}

/// Expected value of the agent-filtered action component rooted at `root`
/// of the model obtained by applying the trace's decision points in order.
pub fn component_expectation(
    scenario: &Scenario,
    agent: &AgentId,
    trace: &EventTrace,
    root: &WorldId,
) -> Result<Rational, ModelError> {
    let points: Vec<DecisionPoint> = trace
        .steps()
        .iter()
        .map(|s| {
            scenario
                .library
                .get(&s.point)
                .map(|p| (**p).clone())
                .ok_or_else(|| ModelError::UnknownPoint(s.point.clone()))
        })
        .collect::<Result<_, _>>()?;
    let pm = apply_sequence(&scenario.model, &points, &scenario.library)?;
    let k = pm.world_index(root)?;
    expected_value(&action_component(&pm, k, Some(agent))?, agent)
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport, ModelError> {
    let checker = Checker::new(&scenario.library);
    let v = scenario.point();
    let mut lines = Vec::new();
    for claim in &scenario.claims {
        let f = scenario.parse(&claim.formula);
        let got = checker.holds(&scenario.model, v, &f)?;
        lines.push(ReportLine {
            item: claim.formula.clone(),
            expected: claim.expected.to_string(),
            actual: got.to_string(),
            status: if got == claim.expected { Status::Pass } else { Status::Fail },
        });
    }
    for e in &scenario.expectations {
        let got = component_expectation(scenario, &e.agent, &e.trace, &e.root)?;
        lines.push(ReportLine {
            item: format!("E[{}; {}] at {}", e.agent, e.trace, e.root),
            expected: e.expected.to_string(),
            actual: got.to_string(),
            status: if got == e.expected { Status::Pass } else { Status::Fail },
        });
    }
    for text in &scenario.informational {
        let f = scenario.parse(text);
        let reading = |r: Result<bool, ModelError>| match r {
            Ok(b) => b.to_string(),
            Err(e) => format!("error ({e})"),
        };
        let full = reading(checker.holds(&scenario.model, v, &f));
        let viewer = match &f {
            Formula::Know(agent, _) => agent.clone(),
            _ => unreachable!("informational claims are knowledge formulas"),
        };
        let sub = agent_submodel(&scenario.model, v, &viewer)?;
        let sub_model = Arc::new(sub.model);
        let local = reading(Checker::new(&scenario.library).holds(&sub_model, sub.root, &f));
        lines.push(ReportLine {
            item: text.clone(),
            expected: "unsettled".into(),
            actual: format!(
                "{full} in the full model, {local} in the {viewer}-submodel of {}",
                scenario.model.world(v).id
            ),
            status: Status::Informational,
        });
    }
    Ok(ScenarioReport {
        name: scenario.name.to_string(),
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_models_validate() {
        for s in [miners(), allergy()] {
            assert!(validate_model(&s.model).is_empty(), "{}", s.name);
        }
    }

    #[test]
    fn scenarios_pass() {
        for s in [miners(), allergy()] {
            let report = run_scenario(&s).unwrap();
            assert!(report.passed(), "{report}");
        }
    }
}
