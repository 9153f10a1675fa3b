//! Seeded random generation of models, decision points and formulas, and
//! the empirical checks built on them.

mod axioms;
mod translation;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{DecisionPoint, Library};
use crate::formula::{ExpAtom, Formula};
use crate::model::{FrameClass, GradedKripkeModel, World};
use crate::symbol::{AgentId, EventName, EventTrace, PropId, Step};

pub use axioms::{run_axiom_suite, AxiomReport, AxiomStats, Context, Counterexample};
pub use translation::{run_translation_suite, TranslationMismatch, TranslationReport};

#[derive(Clone, Debug, Serialize)]
pub struct GenParams {
    pub seed: u64,
    pub worlds: RangeInclusive<usize>,
    pub agents: RangeInclusive<usize>,
    pub atoms: RangeInclusive<usize>,
    pub values: RangeInclusive<u64>,
    pub frame: FrameClass,
    pub events: RangeInclusive<usize>,
    pub depth: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            worlds: 1..=6,
            agents: 1..=3,
            atoms: 1..=3,
            values: 0..=10,
            frame: FrameClass::S5,
            events: 2..=4,
            depth: 4,
        }
    }
}

impl GenParams {
    pub fn with_seed(&self, seed: u64) -> Self {
        GenParams {
            seed,
            ..self.clone()
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Independent seed for trial `k`.
    pub fn trial(&self, k: u64) -> Self {
        let mut z = self.seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        self.with_seed(z ^ (z >> 31))
    }
}

const AGENT_NAMES: [&str; 3] = ["a", "b", "c"];

/// A model satisfying the declared frame class by construction.
pub fn gen_model(p: &GenParams) -> GradedKripkeModel {
    gen_model_with(p, &mut p.rng())
}

fn partition(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn gen_model_with(p: &GenParams, rng: &mut impl Rng) -> GradedKripkeModel {
    let n = rng.gen_range(p.worlds.clone());
    let agents: Vec<AgentId> = AGENT_NAMES[..rng.gen_range(p.agents.clone()).min(3)]
        .iter()
        .map(AgentId::new)
        .collect();
    let atoms: Vec<PropId> = (0..rng.gen_range(p.atoms.clone()))
        .map(|k| PropId::new(format!("p{k}")))
        .collect();
    let worlds: Vec<World> = (0..n)
        .map(|k| {
            let true_atoms = atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect::<Vec<_>>();
            World::new(format!("w{k}"), true_atoms, rng.gen_range(p.values.clone()))
        })
        .collect();
    let mut relations = BTreeMap::new();
    for a in &agents {
        let rows: Vec<BTreeSet<usize>> = match p.frame {
            FrameClass::S5 => {
                let class = partition(n, rng);
                (0..n)
                    .map(|x| (0..n).filter(|&y| class[y] == class[x]).collect())
                    .collect()
            }
            FrameClass::KD45 => {
                let cluster = partition(n, rng);
                let mut believed: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for c in cluster.iter().copied().collect::<BTreeSet<_>>() {
                    let members: Vec<usize> = (0..n).filter(|&y| cluster[y] == c).collect();
                    let mut chosen: BTreeSet<usize> =
                        members.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                    if chosen.is_empty() {
                        chosen.insert(*members.choose(rng).expect("clusters are non-empty"));
                    }
                    believed.insert(c, chosen);
                }
                (0..n).map(|x| believed[&cluster[x]].clone()).collect()
            }
            FrameClass::K => (0..n)
                .map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect())
                .collect(),
        };
        relations.insert(a.clone(), rows);
    }
    GradedKripkeModel::from_parts(agents, atoms.into_iter().collect(), worlds, relations, p.frame)
        .with_point(0)
}

fn literal_at(m: &GradedKripkeModel, w: usize, rng: &mut impl Rng) -> Option<Formula> {
    let p = m.atoms().iter().collect::<Vec<_>>().choose(rng).copied()?.clone();
    let atom = Formula::Atom(p.clone());
    Some(if m.world(w).holds(&p) { atom } else { Formula::not(atom) })
}

fn random_literal(m: &GradedKripkeModel, rng: &mut impl Rng) -> Option<Formula> {
    let p = m.atoms().iter().collect::<Vec<_>>().choose(rng).copied()?.clone();
    let atom = Formula::Atom(p);
    Some(if rng.gen_bool(0.5) { atom } else { Formula::not(atom) })
}

/// A precondition that holds at world `w` of `m`.
fn precondition_at(m: &GradedKripkeModel, w: usize, rng: &mut impl Rng) -> Formula {
    let lit = |rng: &mut _| literal_at(m, w, rng).unwrap_or_else(Formula::top);
    match rng.gen_range(0..5) {
        0 => Formula::top(),
        1 => lit(rng),
        2 => Formula::and(lit(rng), lit(rng)),
        3 => Formula::or(lit(rng), random_literal(m, rng).unwrap_or_else(Formula::bot)),
        _ => {
            let agent = m.agents().choose(rng).expect("models have agents").clone();
            let succ = m.successors(&agent, w).expect("declared agent");
            let candidate = lit(rng);
            let holds_everywhere = succ.iter().all(|&u| match &candidate {
                Formula::Atom(p) => m.world(u).holds(p),
                Formula::Not(a) => matches!(&**a, Formula::Atom(p) if !m.world(u).holds(p)),
                _ => true,
            });
            if holds_everywhere {
                Formula::know(agent, candidate)
            } else {
                candidate
            }
        }
    }
}

/// A decision point whose every event is executable somewhere in `m`,
/// with reflexive-only event relations.
pub fn gen_decision_point(
    p: &GenParams,
    m: &GradedKripkeModel,
    id: &str,
    owner: &AgentId,
    rng: &mut impl Rng,
) -> DecisionPoint {
    let k = rng.gen_range(p.events.clone()).max(2);
    let events = (0..k).map(|e| {
        let w = rng.gen_range(0..m.len());
        (EventName::new(format!("{}{e}", id.to_lowercase())), precondition_at(m, w, rng))
    });
    DecisionPoint::new(id, owner.as_str(), events.collect::<Vec<_>>())
}

/// A generated model with its decision points: `U` and `U2` owned by the
/// first agent, and `V` owned by the second agent when there is one.
#[derive(Clone, Debug)]
pub struct Instance {
    pub model: Arc<GradedKripkeModel>,
    pub points: Vec<DecisionPoint>,
    pub library: Library,
    pub actor: AgentId,
}

impl Instance {
    pub fn point(&self, id: &str) -> Option<&DecisionPoint> {
        self.points.iter().find(|u| u.id.as_str() == id)
    }

    pub fn step(&self, id: &str, rng: &mut impl Rng) -> Step {
        let u = self.point(id).expect("generated point");
        u.step(rng.gen_range(0..u.events.len()))
    }
}

pub fn gen_instance(p: &GenParams) -> Instance {
    let mut rng = p.rng();
    let model = gen_model_with(p, &mut rng);
    let actor = model.agents()[0].clone();
    let mut points = vec![
        gen_decision_point(p, &model, "U", &actor, &mut rng),
        gen_decision_point(p, &model, "U2", &actor, &mut rng),
    ];
    if let Some(other) = model.agents().get(1) {
        points.push(gen_decision_point(p, &model, "V", other, &mut rng));
    }
    let library = Library::from_points(points.clone()).expect("generated points are valid");
    Instance {
        model: Arc::new(model),
        points,
        library,
        actor,
    }
}

/// Vocabulary for random formulas.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub atoms: Vec<PropId>,
    pub agents: Vec<AgentId>,
    /// Every step with the owner of its decision point.
    pub steps: Vec<(Step, AgentId)>,
    pub oughts: bool,
}

impl Vocabulary {
    pub fn of(instance: &Instance) -> Self {
        Vocabulary {
            atoms: instance.model.atoms().iter().cloned().collect(),
            agents: instance.model.agents().to_vec(),
            steps: instance
                .points
                .iter()
                .flat_map(|u| (0..u.events.len()).map(move |k| (u.step(k), u.owner.clone())))
                .collect(),
            oughts: true,
        }
    }

    fn atom(&self, rng: &mut impl Rng) -> Formula {
        match self.atoms.choose(rng) {
            Some(p) => Formula::Atom(p.clone()),
            None => Formula::top(),
        }
    }

    /// One step, or with small probability two steps of different points.
    fn trace(&self, rng: &mut impl Rng) -> (EventTrace, AgentId) {
        let (first, owner) = self.steps.choose(rng).expect("vocabulary has steps").clone();
        if rng.gen_bool(0.2) {
            let later: Vec<_> = self.steps.iter().filter(|(s, _)| s.point != first.point).collect();
            if let Some((second, owner2)) = later.choose(rng) {
                return (EventTrace(vec![first, second.clone()]), owner2.clone());
            }
        }
        (EventTrace::single(first), owner)
    }
}

pub fn gen_formula(v: &Vocabulary, depth: usize, rng: &mut impl Rng) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        if rng.gen_bool(0.1) {
            let (step, owner) = v.steps.choose(rng).expect("vocabulary has steps").clone();
            return Formula::Exp(ExpAtom::new(owner, EventTrace::single(step)));
        }
        return v.atom(rng);
    }
    let sub = |rng: &mut _| gen_formula(v, depth - 1, rng);
    let choices = if v.oughts { 6 } else { 5 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => {
            let agent = v.agents.choose(rng).expect("vocabulary has agents").clone();
            Formula::know(agent, sub(rng))
        }
        3 | 4 => {
            let (t, _) = v.trace(rng);
            Formula::diamond(t, sub(rng))
        }
        _ => {
            let (t, owner) = v.trace(rng);
            Formula::ought(owner, t, sub(rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;

    #[test]
    fn generated_models_validate() {
        for frame in [FrameClass::S5, FrameClass::KD45] {
            let p = GenParams {
                frame,
                ..GenParams::default()
            };
            for k in 0..300 {
                let m = gen_model(&p.trial(k));
                assert!(validate_model(&m).is_empty(), "{frame} trial {k}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::default().with_seed(7);
        assert_eq!(gen_model(&p), gen_model(&p));
        let a = gen_instance(&p);
        let b = gen_instance(&p);
        assert_eq!(a.points, b.points);
    }
}
