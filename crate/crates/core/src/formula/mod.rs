//! Formulas of the deontic action language: atoms, expectation atoms,
//! Boolean connectives, knowledge, action diamonds and the conditional ought.

mod complexity;
mod parse;

use std::fmt;

use crate::symbol::{AgentId, EventTrace, PointId, PropId, Step};

pub use complexity::{complexity, precondition_complexity, Preconditions};
pub use parse::{parse, parse_in, Env, ParseError};

/// Name of the atom used to spell `false` as `p & !p`. It is not a legal
/// identifier in the concrete syntax, so no model ever makes it true.
pub const BOTTOM_ATOM: &str = "⊥";

/// `e_i^τ`: agent `i`'s action `τ` reaches maximal expected deontic value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExpAtom {
    pub agent: AgentId,
    pub trace: EventTrace,
}

impl ExpAtom {
    pub fn new(agent: AgentId, trace: EventTrace) -> Self {
        ExpAtom { agent, trace }
    }
}

impl fmt::Display for ExpAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{{{}; {}}}", self.agent, self.trace)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Atom(PropId),
    Exp(ExpAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(AgentId, Box<Formula>),
    /// `<τ> φ`; a multi-step trace denotes the composed action model.
    Diamond(EventTrace, Box<Formula>),
    /// `O_i(τ | φ)`.
    Ought(AgentId, EventTrace, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl AsRef<str>) -> Formula {
        Formula::Atom(PropId::new(name))
    }

    pub fn exp(agent: AgentId, trace: EventTrace) -> Formula {
        Formula::Exp(ExpAtom::new(agent, trace))
    }

    pub fn bot() -> Formula {
        let p = Formula::atom(BOTTOM_ATOM);
        Formula::and(p.clone(), Formula::not(p))
    }

    pub fn top() -> Formula {
        Formula::not(Formula::bot())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// Left-nested conjunction of all parts; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction of all parts; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bot)
    }

    pub fn know(agent: AgentId, f: Formula) -> Formula {
        Formula::Know(agent, Box::new(f))
    }

    /// `K̂_i φ := ¬K_i¬φ`.
    pub fn possible(agent: AgentId, f: Formula) -> Formula {
        Formula::not(Formula::know(agent, Formula::not(f)))
    }

    pub fn diamond(trace: impl Into<EventTrace>, f: Formula) -> Formula {
        Formula::Diamond(trace.into(), Box::new(f))
    }

    /// `[τ] φ := ¬<τ>¬φ`.
    pub fn boxed(trace: impl Into<EventTrace>, f: Formula) -> Formula {
        Formula::not(Formula::diamond(trace, Formula::not(f)))
    }

    pub fn ought(agent: AgentId, trace: impl Into<EventTrace>, f: Formula) -> Formula {
        Formula::Ought(agent, trace.into(), Box::new(f))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Formula::And(a, b)
            if matches!(&**a, Formula::Atom(p) if p.as_str() == BOTTOM_ATOM)
                && matches!(&**b, Formula::Not(n) if matches!(&**n, Formula::Atom(q) if q.as_str() == BOTTOM_ATOM)))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Not(f) if f.is_bot())
    }

    /// True when no ought operator occurs anywhere inside.
    pub fn is_ought_free(&self) -> bool {
        !self.any(&mut |f| matches!(f, Formula::Ought(..)))
    }

    pub fn is_diamond_free(&self) -> bool {
        !self.any(&mut |f| matches!(f, Formula::Diamond(..)))
    }

    /// Pre-order search over all sub-formulas (including `self`).
    pub fn any(&self, pred: &mut impl FnMut(&Formula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Formula::Atom(_) | Formula::Exp(_) => false,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Diamond(_, f) | Formula::Ought(_, _, f) => {
                f.any(pred)
            }
            Formula::And(a, b) => a.any(pred) || b.any(pred),
        }
    }

    /// Immediate sub-formulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Exp(_) => vec![],
            Formula::Not(f) | Formula::Know(_, f) | Formula::Diamond(_, f) | Formula::Ought(_, _, f) => {
                vec![f]
            }
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// All proper sub-formulas, pre-order.
    pub fn proper_subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack: Vec<&Formula> = self.children();
        stack.reverse();
        while let Some(f) = stack.pop() {
            out.push(f);
            let mut kids = f.children();
            kids.reverse();
            stack.extend(kids);
        }
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Every step mentioned by a diamond, ought or expectation atom.
    pub fn steps(&self) -> Vec<&Step> {
        let mut out = Vec::new();
        self.collect_steps(&mut out);
        out
    }

    fn collect_steps<'a>(&'a self, out: &mut Vec<&'a Step>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Exp(e) => out.extend(e.trace.steps()),
            Formula::Not(f) | Formula::Know(_, f) => f.collect_steps(out),
            Formula::Diamond(t, f) | Formula::Ought(_, t, f) => {
                out.extend(t.steps());
                f.collect_steps(out);
            }
            Formula::And(a, b) => {
                a.collect_steps(out);
                b.collect_steps(out);
            }
        }
    }

    pub fn points(&self) -> Vec<PointId> {
        let mut ids: Vec<PointId> = self.steps().into_iter().map(|s| s.point.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Agents named by knowledge, ought and expectation atoms.
    pub fn agents(&self) -> Vec<AgentId> {
        let mut out = Vec::new();
        self.any(&mut |f| {
            match f {
                Formula::Know(a, _) | Formula::Ought(a, _, _) => out.push(a.clone()),
                Formula::Exp(e) => out.push(e.agent.clone()),
                _ => {}
            }
            false
        });
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bot() {
            return f.write_str("false");
        }
        if self.is_top() {
            return f.write_str("true");
        }
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Exp(e) => write!(f, "{e}"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Know(a, g) => write!(f, "K{{{a}}} {g}"),
            Formula::Diamond(t, g) => write!(f, "<{t}> {g}"),
            Formula::Ought(a, t, g) => write!(f, "O{{{a}}}({t} | {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(p: &str, e: &str) -> EventTrace {
        EventTrace::single(Step::new(p, e))
    }

    #[test]
    fn prints_core_constructs() {
        assert_eq!(Formula::not(Formula::atom("p")).to_string(), "!p");
        let f = Formula::know(
            AgentId::new("i"),
            Formula::diamond(step("U", "alpha"), Formula::top()),
        );
        assert_eq!(f.to_string(), "K{i} <U.alpha> true");
        let trace = EventTrace(vec![Step::new("U", "delta"), Step::new("U2", "beta")]);
        assert_eq!(
            Formula::exp(AgentId::new("a"), trace).to_string(),
            "e{a; U.delta;U2.beta}"
        );
        assert_eq!(Formula::bot().to_string(), "false");
    }

    #[test]
    fn sugar_expands_to_core() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        assert_eq!(
            Formula::or(p.clone(), q.clone()),
            Formula::not(Formula::and(Formula::not(p.clone()), Formula::not(q.clone())))
        );
        assert_eq!(
            Formula::boxed(step("U", "a"), p.clone()),
            Formula::not(Formula::diamond(step("U", "a"), Formula::not(p)))
        );
        assert!(Formula::top().is_ought_free());
        assert!(!Formula::ought(AgentId::new("i"), step("U", "a"), q).is_ought_free());
    }

    #[test]
    fn proper_subformulas_are_strict() {
        let f = Formula::and(Formula::atom("p"), Formula::not(Formula::atom("q")));
        let subs = f.proper_subformulas();
        assert_eq!(subs.len(), 3);
        assert!(!subs.contains(&&f));
    }
}
