//! Expected deontic values and the truth of expectation atoms.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::action::{DecisionPoint, Library};
use crate::checker::Checker;
use crate::error::ModelError;
use crate::formula::ExpAtom;
use crate::model::GradedKripkeModel;
use crate::rational::Rational;
use crate::submodel::{strict_reach, RootedSubmodel};
use crate::symbol::{AgentId, EventName, EventTrace, WorldId};

/// `𝔼_i` of a rooted submodel: the desirability sum over its domain divided
/// by the number of the root's `i`-successors inside it.
pub fn expected_value(sub: &RootedSubmodel, agent: &AgentId) -> Result<Rational, ModelError> {
    let succ = sub.model.successors(agent, sub.root)?;
    if succ.is_empty() {
        return Err(ModelError::NoSuccessors {
            agent: agent.clone(),
            world: sub.model.world(sub.root).id.clone(),
        });
    }
    Rational::average(
        sub.domain().into_iter().map(|k| sub.model.world(k).value),
        succ.len(),
    )
}

/// Value of the agent-filtered action component rooted at world `y`.
pub fn component_value(
    pm: &GradedKripkeModel,
    y: usize,
    agent: &AgentId,
) -> Result<Rational, ModelError> {
    let succ = pm.successors(agent, y)?;
    if succ.is_empty() {
        return Err(ModelError::NoSuccessors {
            agent: agent.clone(),
            world: pm.world(y).id.clone(),
        });
    }
    let reach = strict_reach(pm, y, Some(agent))?;
    Rational::average(reach.into_iter().map(|k| pm.world(k).value), succ.len())
}

/// Traces an expectation atom is compared against: same prefix, same
/// decision point, different final event.
pub fn rival_events(atom: &ExpAtom, dp: &DecisionPoint) -> Result<Vec<EventTrace>, ModelError> {
    let last = atom.trace.last().ok_or_else(|| ModelError::InvalidModel(
        "expectation atom with an empty trace".into(),
    ))?;
    if last.point != dp.id {
        return Err(ModelError::UnknownPoint(last.point.clone()));
    }
    if dp.event_index(&last.event).is_none() {
        return Err(ModelError::UnknownEvent(dp.id.clone(), last.event.clone()));
    }
    let prefix = atom.trace.prefix();
    Ok((0..dp.events.len())
        .filter(|&k| dp.events[k].0 != last.event)
        .map(|k| prefix.push(dp.step(k)))
        .collect())
}

/// Outcome of an expectation-atom comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomVerdict {
    pub holds: bool,
    /// Values on the atom's own side.
    pub own: Vec<(WorldId, Rational)>,
    /// Values of every rival instance.
    pub rivals: Vec<(WorldId, Rational)>,
}

fn compare(
    pm: &GradedKripkeModel,
    own: &[usize],
    rivals: &[usize],
    agent: &AgentId,
) -> Result<AtomVerdict, ModelError> {
    let value = |k: usize| component_value(pm, k, agent).map(|v| (pm.world(k).id.clone(), v));
    let own: Vec<_> = own.iter().map(|&k| value(k)).collect::<Result<_, _>>()?;
    let rivals: Vec<_> = rivals.iter().map(|&k| value(k)).collect::<Result<_, _>>()?;
    let holds = !own.is_empty()
        && own
            .iter()
            .all(|(_, a)| rivals.iter().all(|(_, r)| a >= r));
    Ok(AtomVerdict { holds, own, rivals })
}

fn owning_point<'l>(
    library: &'l Library,
    atom: &ExpAtom,
) -> Result<(&'l Arc<DecisionPoint>, EventName), ModelError> {
    let last = atom.trace.last().ok_or_else(|| ModelError::InvalidModel(
        "expectation atom with an empty trace".into(),
    ))?;
    let dp = library
        .get(&last.point)
        .ok_or_else(|| ModelError::UnknownPoint(last.point.clone()))?;
    if dp.event_index(&last.event).is_none() {
        return Err(ModelError::UnknownEvent(dp.id.clone(), last.event.clone()));
    }
    if dp.owner != atom.agent {
        return Err(ModelError::NoDecisionContext {
            agent: atom.agent.clone(),
            step: last.clone(),
        });
    }
    Ok((dp, last.event.clone()))
}

/// The atom evaluated inside one product model: the atom's own side is the
/// component at `at`, rivals are every world of `pm` carrying a rival trace.
pub fn atom_holds(
    pm: &GradedKripkeModel,
    at: usize,
    atom: &ExpAtom,
    library: &Library,
) -> Result<AtomVerdict, ModelError> {
    let (dp, _) = owning_point(library, atom)?;
    if pm.world(at).trace != atom.trace {
        return Err(ModelError::NoDecisionContext {
            agent: atom.agent.clone(),
            step: atom.trace.last().expect("checked").clone(),
        });
    }
    let rival_traces = rival_events(atom, dp)?;
    let rivals: Vec<usize> = (0..pm.len())
        .filter(|&k| rival_traces.contains(&pm.world(k).trace))
        .collect();
    compare(pm, &[at], &rivals, &atom.agent)
}

/// The atom `e_i^{π;β}` evaluated at world `x` of `model`.
///
/// The deciding world is the descendant along `π` of the deepest ancestor
/// of `x` whose trace is a prefix of both `x`'s trace and `π`. From there
/// the decision point of `β` is applied; the atom's own side is the
/// deciding world's `β`-successor (or every `β` instance when it does not
/// survive), and rival instances range over the deciding world and the
/// worlds agent `i` considers possible from it.
pub fn anchored_atom(
    checker: &Checker<'_>,
    model: &Arc<GradedKripkeModel>,
    x: usize,
    atom: &ExpAtom,
) -> Result<AtomVerdict, ModelError> {
    let (dp, event) = owning_point(checker.library(), atom)?;
    let agent = &atom.agent;
    let pi = atom.trace.prefix();
    let shared = model.world(x).trace.common_prefix_len(&pi);

    let mut m = Arc::clone(model);
    let mut k = x;
    while m.world(k).trace.len() > shared {
        let lineage = m.lineage().ok_or_else(|| {
            ModelError::InvalidModel(format!("world `{}` has a trace but no parent model", m.world(k).id))
        })?;
        let origin = m.world(k).origin.ok_or_else(|| {
            ModelError::InvalidModel(format!("world `{}` has no origin", m.world(k).id))
        })?;
        let parent = Arc::clone(&lineage.parent);
        m = parent;
        k = origin;
    }

    let done = m.world(k).trace.len();
    for step in &pi.steps()[done..] {
        let point = checker
            .library()
            .get(&step.point)
            .ok_or_else(|| ModelError::UnknownPoint(step.point.clone()))?;
        let pm = checker.product(&m, &point.as_action_model())?;
        let trace = m.world(k).trace.push(step.clone());
        match (0..pm.len()).find(|&y| pm.world(y).origin == Some(k) && pm.world(y).trace == trace) {
            Some(y) => {
                m = pm;
                k = y;
            }
            None => {
                return Ok(AtomVerdict {
                    holds: false,
                    own: vec![],
                    rivals: vec![],
                })
            }
        }
    }

    let mut scope: BTreeSet<usize> = strict_reach(&m, k, Some(agent))?;
    scope.insert(k);
    let pm = checker.product(&m, &dp.as_action_model())?;
    let last_event = |y: usize| pm.world(y).trace.last().map(|s| s.event.clone());
    let instances = |e: &EventName| -> Vec<usize> {
        (0..pm.len())
            .filter(|&y| {
                pm.world(y).origin.is_some_and(|o| scope.contains(&o))
                    && last_event(y).as_ref() == Some(e)
            })
            .collect()
    };
    let own: Vec<usize> = match (0..pm.len())
        .find(|&y| pm.world(y).origin == Some(k) && last_event(y).as_ref() == Some(&event))
    {
        Some(y) => vec![y],
        None => instances(&event),
    };
    let rivals: Vec<usize> = dp
        .events
        .iter()
        .filter(|(e, _)| e != &event)
        .flat_map(|(e, _)| instances(e))
        .collect();
    compare(&pm, &own, &rivals, agent)
}
