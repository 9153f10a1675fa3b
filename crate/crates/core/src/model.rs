//! Graded Kripke models: worlds carrying a valuation and a desirability value,
//! one accessibility relation per agent, and a declared frame class.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::symbol::{AgentId, EventTrace, PropId, WorldId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameClass {
    K,
    KD45,
    S5,
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::K => "K",
            FrameClass::KD45 => "KD45",
            FrameClass::S5 => "S5",
        })
    }
}

impl std::str::FromStr for FrameClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K" => Ok(FrameClass::K),
            "KD45" => Ok(FrameClass::KD45),
            "S5" => Ok(FrameClass::S5),
            other => Err(format!("unknown frame class `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub id: WorldId,
    /// Name of the world of the original (un-updated) model this world descends from.
    pub base: WorldId,
    /// Events applied since the original model.
    pub trace: EventTrace,
    pub atoms: BTreeSet<PropId>,
    pub value: u64,
    /// Index of the world this one was produced from, in `Lineage::parent`.
    pub origin: Option<usize>,
}

impl World {
    pub fn new(id: impl AsRef<str>, atoms: impl IntoIterator<Item = PropId>, value: u64) -> Self {
        let id = WorldId::new(id);
        World {
            base: id.clone(),
            id,
            trace: EventTrace::empty(),
            atoms: atoms.into_iter().collect(),
            value,
            origin: None,
        }
    }

    pub fn holds(&self, p: &PropId) -> bool {
        self.atoms.contains(p)
    }
}

/// Where a product model came from.
#[derive(Clone, Debug)]
pub struct Lineage {
    pub parent: Arc<GradedKripkeModel>,
    /// Name of the applied action model (a decision point id or a composed name).
    pub action: String,
    pub reflexive_only: bool,
}

#[derive(Clone, Debug)]
pub struct GradedKripkeModel {
    agents: Vec<AgentId>,
    atoms: BTreeSet<PropId>,
    worlds: Vec<World>,
    index: HashMap<WorldId, usize>,
    relations: BTreeMap<AgentId, Vec<BTreeSet<usize>>>,
    frame: FrameClass,
    point: Option<usize>,
    lineage: Option<Lineage>,
}

impl PartialEq for GradedKripkeModel {
    fn eq(&self, other: &Self) -> bool {
        self.agents == other.agents
            && self.atoms == other.atoms
            && self.worlds == other.worlds
            && self.relations == other.relations
            && self.frame == other.frame
            && self.point == other.point
    }
}

impl GradedKripkeModel {
    /// Assembles a model from parts. Relations are given as index pairs; pairs
    /// out of range are kept out of the adjacency and reported by
    /// [`validate_model`] through `dangling`.
    pub fn from_parts(
        agents: Vec<AgentId>,
        atoms: BTreeSet<PropId>,
        worlds: Vec<World>,
        relations: BTreeMap<AgentId, Vec<BTreeSet<usize>>>,
        frame: FrameClass,
    ) -> Self {
        let index = worlds
            .iter()
            .enumerate()
            .map(|(k, w)| (w.id.clone(), k))
            .collect();
        let mut relations = relations;
        for a in &agents {
            relations
                .entry(a.clone())
                .or_insert_with(|| vec![BTreeSet::new(); worlds.len()]);
        }
        GradedKripkeModel {
            agents,
            atoms,
            worlds,
            index,
            relations,
            frame,
            point: None,
            lineage: None,
        }
    }

    pub fn with_point(mut self, point: usize) -> Self {
        assert!(point < self.worlds.len(), "point out of range");
        self.point = Some(point);
        self
    }

    pub fn with_lineage(mut self, lineage: Lineage) -> Self {
        self.lineage = Some(lineage);
        self
    }

    pub fn with_frame(mut self, frame: FrameClass) -> Self {
        self.frame = frame;
        self
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn atoms(&self) -> &BTreeSet<PropId> {
        &self.atoms
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world(&self, k: usize) -> &World {
        &self.worlds[k]
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn frame(&self) -> FrameClass {
        self.frame
    }

    pub fn point(&self) -> Option<usize> {
        self.point
    }

    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }

    pub fn has_agent(&self, agent: &AgentId) -> bool {
        self.relations.contains_key(agent)
    }

    pub fn world_index(&self, id: &WorldId) -> Result<usize, ModelError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(id.clone()))
    }

    /// Index of the world with the given base name and trace, if it survived.
    pub fn find(&self, base: &WorldId, trace: &EventTrace) -> Option<usize> {
        self.worlds
            .iter()
            .position(|w| &w.base == base && &w.trace == trace)
    }

    pub fn relation(&self, agent: &AgentId) -> Result<&[BTreeSet<usize>], ModelError> {
        self.relations
            .get(agent)
            .map(Vec::as_slice)
            .ok_or_else(|| ModelError::UnknownAgent(agent.clone()))
    }

    pub fn relations(&self) -> &BTreeMap<AgentId, Vec<BTreeSet<usize>>> {
        &self.relations
    }

    /// Successor indices of world `w` for agent `agent`.
    pub fn successors(&self, agent: &AgentId, w: usize) -> Result<&BTreeSet<usize>, ModelError> {
        Ok(&self.relation(agent)?[w])
    }

    /// Whether `w` has an outgoing edge for any agent.
    pub fn has_any_successor(&self, w: usize) -> bool {
        self.relations.values().any(|r| !r[w].is_empty())
    }

    /// The sub-structure induced by `keep` (in the given order). Lineage,
    /// base names and traces are preserved.
    pub fn restrict(&self, keep: &[usize]) -> GradedKripkeModel {
        let mut remap = vec![usize::MAX; self.worlds.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let worlds = keep.iter().map(|&k| self.worlds[k].clone()).collect();
        let relations = self
            .relations
            .iter()
            .map(|(a, rel)| {
                let rows = keep
                    .iter()
                    .map(|&k| {
                        rel[k]
                            .iter()
                            .filter(|&&u| remap[u] != usize::MAX)
                            .map(|&u| remap[u])
                            .collect()
                    })
                    .collect();
                (a.clone(), rows)
            })
            .collect();
        let mut sub = GradedKripkeModel::from_parts(
            self.agents.clone(),
            self.atoms.clone(),
            worlds,
            relations,
            self.frame,
        );
        sub.lineage = self.lineage.clone();
        sub.point = self.point.and_then(|p| (remap[p] != usize::MAX).then(|| remap[p]));
        sub
    }
}

/// `R_i(w)` as a set of world names.
pub fn accessible(
    m: &GradedKripkeModel,
    agent: &AgentId,
    world: &WorldId,
) -> Result<BTreeSet<WorldId>, ModelError> {
    let w = m.world_index(world)?;
    Ok(m
        .successors(agent, w)?
        .iter()
        .map(|&u| m.world(u).id.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, clause: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            clause: clause.to_string(),
            message: message.into(),
        });
    }

    pub fn into_result(self) -> Result<(), ModelError> {
        if self.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<_> = self.violations.iter().map(|v| v.message.clone()).collect();
            Err(ModelError::InvalidModel(msgs.join("; ")))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "[{}] {}", v.clause, v.message)?;
        }
        Ok(())
    }
}

/// Checks the structural invariants and the declared frame conditions.
pub fn validate_model(m: &GradedKripkeModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    if m.worlds.is_empty() {
        report.push("domain", "model has no worlds");
        return report;
    }
    let mut seen = BTreeSet::new();
    for w in &m.worlds {
        if !seen.insert(&w.id) {
            report.push("domain", format!("duplicate world `{}`", w.id));
        }
        for p in &w.atoms {
            if !m.atoms.contains(p) {
                report.push(
                    "valuation",
                    format!("world `{}` makes undeclared atom `{p}` true", w.id),
                );
            }
        }
    }
    let mut agents = BTreeSet::new();
    for a in &m.agents {
        if !agents.insert(a) {
            report.push("agents", format!("duplicate agent `{a}`"));
        }
    }
    for (a, rel) in &m.relations {
        if !agents.contains(a) {
            report.push("agents", format!("relation for undeclared agent `{a}`"));
        }
        if rel.len() != m.worlds.len() {
            report.push("relations", format!("relation of `{a}` is not total over worlds"));
        }
    }
    if !report.is_empty() {
        return report;
    }
    let name = |k: usize| m.worlds[k].id.as_str();
    for a in &m.agents {
        let rel = &m.relations[a];
        let needs_reflexive = m.frame == FrameClass::S5;
        let needs_serial = m.frame == FrameClass::KD45;
        let needs_te = m.frame != FrameClass::K;
        for w in 0..rel.len() {
            if needs_reflexive && !rel[w].contains(&w) {
                report.push(
                    "reflexivity",
                    format!("reflexivity fails at {} for agent {a}", name(w)),
                );
            }
            if needs_serial && rel[w].is_empty() {
                report.push(
                    "seriality",
                    format!("seriality fails at {} for agent {a}", name(w)),
                );
            }
            if !needs_te {
                continue;
            }
            for &u in &rel[w] {
                for &x in &rel[u] {
                    if !rel[w].contains(&x) {
                        report.push(
                            "transitivity",
                            format!(
                                "transitivity fails for agent {a}: {} -> {} -> {} but not {} -> {}",
                                name(w),
                                name(u),
                                name(x),
                                name(w),
                                name(x)
                            ),
                        );
                    }
                }
                for &x in &rel[w] {
                    if !rel[u].contains(&x) {
                        report.push(
                            "euclideanness",
                            format!(
                                "euclideanness fails for agent {a}: {} -> {} and {} -> {} but not {} -> {}",
                                name(w),
                                name(u),
                                name(w),
                                name(x),
                                name(u),
                                name(x)
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}

/// A model together with a designated world.
#[derive(Clone, Debug)]
pub struct PointedModel {
    pub model: Arc<GradedKripkeModel>,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: GradedKripkeModel, point: &WorldId) -> Result<Self, ModelError> {
        let point = model.world_index(point)?;
        Ok(PointedModel {
            model: Arc::new(model),
            point,
        })
    }

    pub fn point_id(&self) -> &WorldId {
        &self.model.world(self.point).id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, edges: &[(usize, usize)], frame: FrameClass) -> GradedKripkeModel {
        let agent = AgentId::new("i");
        let worlds = (0..n).map(|k| World::new(format!("w{k}"), [], 0)).collect();
        let mut rel = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            rel[a].insert(b);
        }
        GradedKripkeModel::from_parts(
            vec![agent.clone()],
            BTreeSet::new(),
            worlds,
            BTreeMap::from([(agent, rel)]),
            frame,
        )
    }

    #[test]
    fn empty_relation_is_not_reflexive() {
        let m = model(1, &[], FrameClass::S5);
        let report = validate_model(&m);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].message, "reflexivity fails at w0 for agent i");
    }

    #[test]
    fn kd45_needs_seriality_only() {
        // w0 -> w1, w1 -> w1: serial, transitive, euclidean, not reflexive.
        let m = model(2, &[(0, 1), (1, 1)], FrameClass::KD45);
        assert!(validate_model(&m).is_empty());
        let s5 = m.with_frame(FrameClass::S5);
        let report = validate_model(&s5);
        assert!(report.violations.iter().all(|v| v.clause == "reflexivity"));
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn transitivity_violation_names_witnesses() {
        let m = model(3, &[(0, 1), (1, 2)], FrameClass::KD45);
        let report = validate_model(&m);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("w0 -> w1 -> w2")));
    }

    #[test]
    fn accessible_rejects_unknowns() {
        let m = model(2, &[(0, 0), (1, 1)], FrameClass::S5);
        assert!(matches!(
            accessible(&m, &AgentId::new("j"), &WorldId::new("w0")),
            Err(ModelError::UnknownAgent(_))
        ));
        assert!(matches!(
            accessible(&m, &AgentId::new("i"), &WorldId::new("nope")),
            Err(ModelError::UnknownWorld(_))
        ));
        let s = accessible(&m, &AgentId::new("i"), &WorldId::new("w1")).unwrap();
        assert_eq!(s, BTreeSet::from([WorldId::new("w1")]));
    }

    #[test]
    fn restrict_keeps_internal_edges() {
        let m = model(3, &[(0, 1), (1, 2), (2, 0), (1, 1)], FrameClass::K);
        let sub = m.restrict(&[1, 2]);
        let i = AgentId::new("i");
        assert_eq!(sub.successors(&i, 0).unwrap(), &BTreeSet::from([0, 1]));
        assert!(sub.successors(&i, 1).unwrap().is_empty());
    }
}
