//! Reachability-generated submodels: full, agent-based and action-generated.

use std::collections::{BTreeSet, VecDeque};

use crate::error::ModelError;
use crate::model::GradedKripkeModel;
use crate::symbol::AgentId;

/// A submodel generated from a root by strict reachability.
///
/// `model` holds the domain in parent order. When the root is not
/// reachable from itself it is still present in `model` as a retained
/// evaluation point: it keeps its outgoing edges into the domain, nothing
/// points back at it, and it is excluded from [`RootedSubmodel::domain`].
#[derive(Clone, Debug)]
pub struct RootedSubmodel {
    pub model: GradedKripkeModel,
    /// Index of the root in `model`.
    pub root: usize,
    pub root_in_domain: bool,
    pub agent_filter: Option<AgentId>,
    /// For each world of `model`, its index in the parent model.
    pub parent_index: Vec<usize>,
}

impl RootedSubmodel {
    /// Indices (in `model`) of the worlds of the domain proper.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.model.len())
            .filter(|&k| k != self.root || self.root_in_domain)
            .collect()
    }

    /// Index in `model` of the world with parent index `k`.
    pub fn local(&self, k: usize) -> Option<usize> {
        self.parent_index.iter().position(|&p| p == k)
    }
}

/// Worlds reachable from `v` by paths of length at least one, following
/// every agent's relation or only `agent`'s.
pub fn strict_reach(
    m: &GradedKripkeModel,
    v: usize,
    agent: Option<&AgentId>,
) -> Result<BTreeSet<usize>, ModelError> {
    let rels: Vec<_> = match agent {
        Some(a) => vec![m.relation(a)?],
        None => m.relations().values().map(Vec::as_slice).collect(),
    };
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for rel in &rels {
            for &y in &rel[x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(seen)
}

fn build(
    m: &GradedKripkeModel,
    v: usize,
    agent: Option<&AgentId>,
) -> Result<RootedSubmodel, ModelError> {
    let reach = strict_reach(m, v, agent)?;
    if reach.is_empty() {
        return Err(ModelError::IsolatedRoot(m.world(v).id.clone()));
    }
    let root_in_domain = reach.contains(&v);
    let mut keep: Vec<usize> = reach.iter().copied().collect();
    if !root_in_domain {
        keep.push(v);
        keep.sort_unstable();
    }
    let mut model = m.restrict(&keep);
    let root = keep.iter().position(|&k| k == v).expect("root kept");
    if !root_in_domain {
        model = drop_incoming(model, root);
    }
    let model = model.with_point(root);
    Ok(RootedSubmodel {
        model,
        root,
        root_in_domain,
        agent_filter: agent.cloned(),
        parent_index: keep,
    })
}

fn drop_incoming(m: GradedKripkeModel, root: usize) -> GradedKripkeModel {
    let relations = m
        .relations()
        .iter()
        .map(|(a, rel)| {
            let rows = rel
                .iter()
                .map(|row| row.iter().copied().filter(|&u| u != root).collect())
                .collect();
            (a.clone(), rows)
        })
        .collect();
    let lineage = m.lineage().cloned();
    let rebuilt = GradedKripkeModel::from_parts(
        m.agents().to_vec(),
        m.atoms().clone(),
        m.worlds().to_vec(),
        relations,
        m.frame(),
    );
    match lineage {
        Some(l) => rebuilt.with_lineage(l),
        None => rebuilt,
    }
}

/// `𝓜^v`: everything reachable from `v` over all agents' relations.
pub fn generated_submodel(m: &GradedKripkeModel, v: usize) -> Result<RootedSubmodel, ModelError> {
    build(m, v, None)
}

/// `𝓜_i^v`: everything reachable from `v` over agent `i`'s relation, with
/// every agent's edges restricted to that domain.
pub fn agent_submodel(
    m: &GradedKripkeModel,
    v: usize,
    agent: &AgentId,
) -> Result<RootedSubmodel, ModelError> {
    build(m, v, Some(agent))
}

/// The action-generated submodel of a product model rooted at `root`.
/// When the applied action model is reflexive-only every reached world must
/// carry the root's trace.
pub fn action_component(
    pm: &GradedKripkeModel,
    root: usize,
    agent: Option<&AgentId>,
) -> Result<RootedSubmodel, ModelError> {
    let sub = build(pm, root, agent)?;
    if pm.lineage().is_some_and(|l| l.reflexive_only) {
        let trace = &pm.world(root).trace;
        if let Some(w) = sub.model.worlds().iter().find(|w| &w.trace != trace) {
            return Err(ModelError::TraceLeak {
                root: pm.world(root).id.clone(),
                reached: w.id.clone(),
            });
        }
    }
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FrameClass, World};
    use std::collections::BTreeMap;

    fn chain() -> GradedKripkeModel {
        let i = AgentId::new("i");
        let worlds = vec![World::new("v", [], 1), World::new("u", [], 2)];
        let rel = vec![BTreeSet::from([1]), BTreeSet::from([1])];
        GradedKripkeModel::from_parts(
            vec![i.clone()],
            BTreeSet::new(),
            worlds,
            BTreeMap::from([(i, rel)]),
            FrameClass::KD45,
        )
    }

    #[test]
    fn loopless_root_is_retained_but_not_in_domain() {
        let m = chain();
        let sub = generated_submodel(&m, 0).unwrap();
        assert!(!sub.root_in_domain);
        assert_eq!(sub.domain(), vec![1]);
        assert_eq!(sub.model.len(), 2);
        let i = AgentId::new("i");
        assert_eq!(sub.model.successors(&i, 0).unwrap(), &BTreeSet::from([1]));
    }

    #[test]
    fn isolated_root_is_an_error() {
        let i = AgentId::new("i");
        let m = GradedKripkeModel::from_parts(
            vec![i.clone()],
            BTreeSet::new(),
            vec![World::new("v", [], 0)],
            BTreeMap::from([(i.clone(), vec![BTreeSet::new()])]),
            FrameClass::K,
        );
        assert!(matches!(
            agent_submodel(&m, 0, &i),
            Err(ModelError::IsolatedRoot(_))
        ));
    }

    #[test]
    fn agent_submodel_keeps_other_agents_edges_inside() {
        let (i, j) = (AgentId::new("i"), AgentId::new("j"));
        let worlds = (0..3).map(|k| World::new(format!("w{k}"), [], 0)).collect();
        let ri = vec![BTreeSet::from([0, 1]), BTreeSet::from([0, 1]), BTreeSet::from([2])];
        let rj = vec![BTreeSet::from([1, 2]), BTreeSet::from([0]), BTreeSet::from([2])];
        let m = GradedKripkeModel::from_parts(
            vec![i.clone(), j.clone()],
            BTreeSet::new(),
            worlds,
            BTreeMap::from([(i.clone(), ri), (j.clone(), rj)]),
            FrameClass::K,
        );
        let sub = agent_submodel(&m, 0, &i).unwrap();
        assert_eq!(sub.parent_index, vec![0, 1]);
        assert_eq!(sub.model.successors(&j, 0).unwrap(), &BTreeSet::from([1]));
        assert_eq!(sub.model.successors(&j, 1).unwrap(), &BTreeSet::from([0]));
    }
}
