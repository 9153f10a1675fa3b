//! Evaluation of formulas at worlds of graded models.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;

use crate::action::{ActionModel, Library};
use crate::error::ModelError;
use crate::expectation::anchored_atom;
use crate::formula::{ExpAtom, Formula, ParseError, Preconditions};
use crate::model::GradedKripkeModel;
use crate::product::product_with;
use crate::rational::Rational;
use crate::symbol::{EventTrace, WorldId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    Atom,
    Exp,
    Not,
    And,
    Know,
    Diamond,
    Ought,
    /// Precondition check of a diamond.
    Pre,
    /// Conjunction over every world of a model.
    Global,
}

/// A truth value together with the sub-verdicts that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub clause: Clause,
    pub label: String,
    pub world: WorldId,
    pub children: Vec<Verdict>,
    /// Expected values consulted by an expectation atom, keyed by world.
    pub values: Vec<(String, Rational)>,
}

impl Verdict {
    fn leaf(holds: bool, clause: Clause, label: String, world: WorldId) -> Self {
        Verdict {
            holds,
            clause,
            label,
            world,
            children: vec![],
            values: vec![],
        }
    }

    /// The chain of conjuncts an ought or diamond verdict rests on:
    /// preconditions, the innermost body, then expectation atoms from the
    /// inside out.
    pub fn conjunct_trail(&self) -> Vec<&Verdict> {
        match self.clause {
            Clause::Ought => {
                let mut out = self.children[0].conjunct_trail();
                out.extend(self.children[1..].iter());
                out
            }
            Clause::Diamond => {
                let mut out = vec![&self.children[0]];
                if let Some(body) = self.children.get(1) {
                    out.extend(body.conjunct_trail());
                }
                out
            }
            _ => vec![self],
        }
    }

    /// A sub-verdict responsible for a failure: an atom, an expectation
    /// atom or a negation of something true.
    pub fn culprit(&self) -> Option<&Verdict> {
        if self.holds {
            return None;
        }
        match self.clause {
            Clause::Atom | Clause::Exp | Clause::Not => Some(self),
            _ => self.children.iter().find_map(Verdict::culprit),
        }
    }

    /// Indented rendering of the verdict tree.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.render(0, &mut out);
        out
    }

    fn render(&self, depth: usize, out: &mut String) {
        let mark = if self.holds { "+" } else { "-" };
        let _ = write!(out, "{:indent$}{mark} {} @ {}", "", self.label, self.world, indent = depth * 2);
        if !self.values.is_empty() {
            let vals: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(out, " [{}]", vals.join(", "));
        }
        out.push('\n');
        for c in &self.children {
            c.render(depth + 1, out);
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.explain())
    }
}

type CacheKey = (usize, String);

/// Evaluator over one library of decision points. Product models are
/// cached per (model, action model) pair for the checker's lifetime.
pub struct Checker<'l> {
    library: &'l Library,
    cache: RefCell<HashMap<CacheKey, (Arc<GradedKripkeModel>, Arc<GradedKripkeModel>)>>,
    /// Off while `holds` runs: verdict trees are then discarded unread.
    labels: Cell<bool>,
}

fn resolve(e: ParseError) -> ModelError {
    match e {
        ParseError::UnknownPoint(p) => ModelError::UnknownPoint(p),
        ParseError::UnknownEvent(s) => ModelError::UnknownEvent(s.point, s.event),
        other => ModelError::InvalidModel(other.to_string()),
    }
}

impl<'l> Checker<'l> {
    pub fn new(library: &'l Library) -> Self {
        Checker {
            library,
            cache: RefCell::new(HashMap::new()),
            labels: Cell::new(true),
        }
    }

    pub fn library(&self) -> &'l Library {
        self.library
    }

    /// `M ⊗ U`, possibly empty.
    pub fn product(
        &self,
        m: &Arc<GradedKripkeModel>,
        action: &ActionModel,
    ) -> Result<Arc<GradedKripkeModel>, ModelError> {
        let key = (Arc::as_ptr(m) as usize, action.name.clone());
        if let Some((_, pm)) = self.cache.borrow().get(&key) {
            return Ok(Arc::clone(pm));
        }
        let pm = Arc::new(product_with(m, action, |m, v, pre| {
            Ok(self.eval(m, v, pre)?.holds)
        })?);
        self.cache
            .borrow_mut()
            .insert(key, (Arc::clone(m), Arc::clone(&pm)));
        Ok(pm)
    }

    /// The product with the composed action model of a trace's points.
    pub fn trace_product(
        &self,
        m: &Arc<GradedKripkeModel>,
        trace: &EventTrace,
    ) -> Result<Arc<GradedKripkeModel>, ModelError> {
        let points: Vec<_> = trace.steps().iter().map(|s| s.point.clone()).collect();
        for p in &points {
            if self.library.get(p).is_none() {
                return Err(ModelError::UnknownPoint(p.clone()));
            }
        }
        let action = self.library.composed(&points).expect("points resolved");
        self.product(m, &action)
    }

    pub fn holds(
        &self,
        m: &Arc<GradedKripkeModel>,
        w: usize,
        f: &Formula,
    ) -> Result<bool, ModelError> {
        let previous = self.labels.replace(false);
        let verdict = self.eval(m, w, f);
        self.labels.set(previous);
        Ok(verdict?.holds)
    }

    fn label(&self, text: impl FnOnce() -> String) -> String {
        if self.labels.get() {
            text()
        } else {
            String::new()
        }
    }

    /// Evaluates `f` at world `w` of `m`.
    pub fn eval(
        &self,
        m: &Arc<GradedKripkeModel>,
        w: usize,
        f: &Formula,
    ) -> Result<Verdict, ModelError> {
        let here = m.world(w).id.clone();
        Ok(match f {
            Formula::Atom(p) => Verdict::leaf(m.world(w).holds(p), Clause::Atom, self.label(|| f.to_string()), here),
            Formula::Exp(atom) => self.eval_atom(m, w, atom)?,
            Formula::Not(g) => {
                let inner = self.eval(m, w, g)?;
                Verdict {
                    holds: !inner.holds,
                    clause: Clause::Not,
                    label: self.label(|| f.to_string()),
                    world: here,
                    children: vec![inner],
                    values: vec![],
                }
            }
            Formula::And(a, b) => {
                let left = self.eval(m, w, a)?;
                let right = self.eval(m, w, b)?;
                Verdict {
                    holds: left.holds && right.holds,
                    clause: Clause::And,
                    label: self.label(|| f.to_string()),
                    world: here,
                    children: vec![left, right],
                    values: vec![],
                }
            }
            Formula::Know(agent, g) => {
                let succ = m.successors(agent, w)?.clone();
                let mut children = Vec::with_capacity(succ.len());
                for u in succ {
                    children.push(self.eval(m, u, g)?);
                }
                Verdict {
                    holds: children.iter().all(|c| c.holds),
                    clause: Clause::Know,
                    label: self.label(|| f.to_string()),
                    world: here,
                    children,
                    values: vec![],
                }
            }
            Formula::Diamond(trace, g) => self.eval_diamond(m, w, trace, g, self.label(|| f.to_string()))?,
            Formula::Ought(agent, trace, g) => {
                let owner = trace
                    .last()
                    .and_then(|s| self.library.owner(&s.point))
                    .ok_or_else(|| match trace.last() {
                        Some(s) => ModelError::UnknownPoint(s.point.clone()),
                        None => ModelError::InvalidModel("ought with an empty trace".into()),
                    })?;
                if owner != agent {
                    return Err(ModelError::NoDecisionContext {
                        agent: agent.clone(),
                        step: trace.last().expect("non-empty").clone(),
                    });
                }
                let diamond = self.eval_diamond(m, w, trace, g, self.label(|| format!("<{trace}> {g}")))?;
                let atom = ExpAtom::new(agent.clone(), m.world(w).trace.concat(trace));
                let exp = self.eval_atom(m, w, &atom)?;
                Verdict {
                    holds: diamond.holds && exp.holds,
                    clause: Clause::Ought,
                    label: self.label(|| f.to_string()),
                    world: here,
                    children: vec![diamond, exp],
                    values: vec![],
                }
            }
        })
    }

    fn eval_atom(
        &self,
        m: &Arc<GradedKripkeModel>,
        w: usize,
        atom: &ExpAtom,
    ) -> Result<Verdict, ModelError> {
        let outcome = anchored_atom(self, m, w, atom)?;
        let values = outcome
            .own
            .iter()
            .chain(outcome.rivals.iter())
            .map(|(id, v)| (id.to_string(), *v))
            .collect();
        Ok(Verdict {
            holds: outcome.holds,
            clause: Clause::Exp,
            label: self.label(|| atom.to_string()),
            world: m.world(w).id.clone(),
            children: vec![],
            values,
        })
    }

    fn eval_diamond(
        &self,
        m: &Arc<GradedKripkeModel>,
        w: usize,
        trace: &EventTrace,
        body: &Formula,
        label: String,
    ) -> Result<Verdict, ModelError> {
        let here = m.world(w).id.clone();
        let pre = self.library.trace_pre(trace).map_err(resolve)?;
        let pre_verdict = self.eval(m, w, &pre)?;
        let pre_verdict = Verdict {
            holds: pre_verdict.holds,
            clause: Clause::Pre,
            label: self.label(|| format!("pre({trace}) = {pre}")),
            world: here.clone(),
            children: vec![pre_verdict],
            values: vec![],
        };
        if !pre_verdict.holds {
            return Ok(Verdict {
                holds: false,
                clause: Clause::Diamond,
                label,
                world: here,
                children: vec![pre_verdict],
                values: vec![],
            });
        }
        let pm = self.trace_product(m, trace)?;
        let target = m.world(w).trace.concat(trace);
        let y = (0..pm.len())
            .find(|&y| pm.world(y).origin == Some(w) && pm.world(y).trace == target)
            .expect("a world whose precondition holds survives the product");
        let inner = self.eval(&pm, y, body)?;
        Ok(Verdict {
            holds: inner.holds,
            clause: Clause::Diamond,
            label,
            world: here,
            children: vec![pre_verdict, inner],
            values: vec![],
        })
    }

    /// Conjunction of `f` over every world of `m`.
    pub fn holds_globally(
        &self,
        m: &Arc<GradedKripkeModel>,
        f: &Formula,
    ) -> Result<Verdict, ModelError> {
        let mut children = Vec::with_capacity(m.len());
        for w in 0..m.len() {
            children.push(self.eval(m, w, f)?);
        }
        Ok(Verdict {
            holds: children.iter().all(|c| c.holds),
            clause: Clause::Global,
            label: f.to_string(),
            world: WorldId::new("*"),
            children,
            values: vec![],
        })
    }
}
