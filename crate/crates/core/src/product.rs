//! Product update of a graded model with an action model.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::action::{ActionModel, DecisionPoint, Library};
use crate::checker::Checker;
use crate::error::ModelError;
use crate::formula::Formula;
use crate::model::{FrameClass, GradedKripkeModel, Lineage, World};
use crate::symbol::{AgentId, WorldId};

/// `M ⊗ U` where the precondition test is supplied by the caller. The
/// result may be empty.
pub fn product_with<F>(
    m: &Arc<GradedKripkeModel>,
    action: &ActionModel,
    mut pre_holds: F,
) -> Result<GradedKripkeModel, ModelError>
where
    F: FnMut(&Arc<GradedKripkeModel>, usize, &Formula) -> Result<bool, ModelError>,
{
    let mut pairs = Vec::new();
    for v in 0..m.len() {
        for (k, event) in action.events.iter().enumerate() {
            if pre_holds(m, v, &event.pre)? {
                pairs.push((v, k));
            }
        }
    }
    let worlds: Vec<World> = pairs
        .iter()
        .map(|&(v, k)| {
            let parent = m.world(v);
            let trace = parent.trace.concat(&action.events[k].trace);
            World {
                id: WorldId::new(format!("{}@{}", parent.base, trace)),
                base: parent.base.clone(),
                trace,
                atoms: parent.atoms.clone(),
                value: parent.value,
                origin: Some(v),
            }
        })
        .collect();
    let relations: BTreeMap<AgentId, Vec<BTreeSet<usize>>> = m
        .relations()
        .iter()
        .map(|(agent, rel)| {
            let rows = pairs
                .iter()
                .map(|&(v, a)| {
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|&(_, &(u, b))| rel[v].contains(&u) && action.related(agent, a, b))
                        .map(|(y, _)| y)
                        .collect()
                })
                .collect();
            (agent.clone(), rows)
        })
        .collect();
    let frame = if m.frame() == FrameClass::S5
        && m.agents().iter().all(|a| is_equivalence(action, a))
    {
        FrameClass::S5
    } else {
        FrameClass::K
    };
    let product = GradedKripkeModel::from_parts(
        m.agents().to_vec(),
        m.atoms().clone(),
        worlds,
        relations,
        frame,
    );
    Ok(product.with_lineage(Lineage {
        parent: Arc::clone(m),
        action: action.name.clone(),
        reflexive_only: action.is_reflexive_only(),
    }))
}

fn is_equivalence(action: &ActionModel, agent: &AgentId) -> bool {
    let n = action.events.len();
    let q = |a, b| action.related(agent, a, b);
    (0..n).all(|a| q(a, a))
        && (0..n).all(|a| (0..n).all(|b| !q(a, b) || q(b, a)))
        && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(q(a, b) && q(b, c)) || q(a, c))))
}

/// `M ⊗ U`, failing with `EmptyProduct` when no world survives.
pub fn product(
    m: &Arc<GradedKripkeModel>,
    action: &ActionModel,
    library: &Library,
) -> Result<Arc<GradedKripkeModel>, ModelError> {
    let checker = Checker::new(library);
    let pm = checker.product(m, action)?;
    if pm.is_empty() {
        return Err(ModelError::EmptyProduct { step: None });
    }
    Ok(pm)
}

/// Applies the decision points one after another.
pub fn apply_sequence(
    m: &Arc<GradedKripkeModel>,
    us: &[DecisionPoint],
    library: &Library,
) -> Result<Arc<GradedKripkeModel>, ModelError> {
    let checker = Checker::new(library);
    let mut current = Arc::clone(m);
    for (k, u) in us.iter().enumerate() {
        current = checker.product(&current, &u.as_action_model())?;
        if current.is_empty() {
            return Err(ModelError::EmptyProduct { step: Some(k) });
        }
    }
    Ok(current)
}
