//! Translation of formulas into the ought-free, diamond-free fragment by
//! outermost-leftmost rewriting, with per-step complexity certificates.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::action::Library;
use crate::checker::Checker;
use crate::formula::{complexity, Formula, ParseError, Preconditions};
use crate::model::GradedKripkeModel;
use crate::symbol::{AgentId, EventTrace, WorldId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TranslationMode {
    Literal,
    #[default]
    Standard,
}

impl std::str::FromStr for TranslationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(TranslationMode::Standard),
            "literal" => Ok(TranslationMode::Literal),
            other => Err(format!("unknown translation mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// `O(τ|ℓ)` for a literal `ℓ`.
    R1,
    /// Conjunction in the scope of an ought.
    R2,
    /// Negation in the scope of an ought.
    R3,
    /// `O_i(τ|K_i φ)`.
    R4,
    /// `O(τ|<σ>φ)`.
    R5,
    /// `O_i(τ|O_i(σ|φ))`.
    R6,
    /// An ought whose body is knowledge or an ought of another agent.
    OD,
    AM1,
    AM2,
    AM3,
    AM4,
    AM5,
}

impl Rule {
    pub fn is_ought_rule(self) -> bool {
        !matches!(self, Rule::AM1 | Rule::AM2 | Rule::AM3 | Rule::AM4 | Rule::AM5)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewriteStep {
    pub rule: Rule,
    #[serde(serialize_with = "as_text")]
    pub before: Formula,
    #[serde(serialize_with = "as_text")]
    pub after: Formula,
    pub c_before: u128,
    pub c_after: u128,
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}  ~>  {}  (c: {} -> {})",
            self.rule, self.before, self.after, self.c_before, self.c_after
        )
    }
}

/// Whether the step strictly decreased the complexity measure.
pub fn check_inequalities(step: &RewriteStep) -> bool {
    step.c_after < step.c_before
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Reference(#[from] ParseError),
    #[error("rewriting did not terminate within {0} steps")]
    NonTermination(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub formula: Formula,
    pub steps: Vec<RewriteStep>,
}

const STEP_BUDGET: usize = 200_000;

/// `t(φ)` for evaluation at worlds of an un-updated model.
pub fn translate(
    f: &Formula,
    mode: TranslationMode,
    library: &Library,
) -> Result<Translation, ReductionError> {
    translate_at(f, mode, library, &EventTrace::empty())
}

/// `t(φ)` for evaluation at worlds whose trace is `prefix`; expectation
/// atoms introduced by the rewriting carry absolute traces.
pub fn translate_at(
    f: &Formula,
    mode: TranslationMode,
    library: &Library,
    prefix: &EventTrace,
) -> Result<Translation, ReductionError> {
    let rewriter = Rewriter { mode, library };
    let mut current = f.clone();
    let mut steps = Vec::new();
    while let Some((next, step)) = rewriter.first(&current, prefix)? {
        steps.push(step);
        if steps.len() > STEP_BUDGET {
            return Err(ReductionError::NonTermination(STEP_BUDGET));
        }
        current = next;
    }
    Ok(Translation {
        formula: current,
        steps,
    })
}

struct Rewriter<'l> {
    mode: TranslationMode,
    library: &'l Library,
}

impl Rewriter<'_> {
    fn pre(&self, t: &EventTrace) -> Result<Formula, ParseError> {
        self.library.trace_pre(t)
    }

    /// Rewrites the outermost-leftmost redex, returning the whole new formula.
    fn first(
        &self,
        f: &Formula,
        prefix: &EventTrace,
    ) -> Result<Option<(Formula, RewriteStep)>, ReductionError> {
        if let Some((rule, after)) = self.at_root(f, prefix)? {
            let step = RewriteStep {
                rule,
                before: f.clone(),
                c_before: complexity(f, self.library)?,
                c_after: complexity(&after, self.library)?,
                after: after.clone(),
            };
            return Ok(Some((after, step)));
        }
        Ok(match f {
            Formula::Atom(_) | Formula::Exp(_) => None,
            Formula::Not(g) => self.first(g, prefix)?.map(|(g, s)| (Formula::not(g), s)),
            Formula::Know(a, g) => self
                .first(g, prefix)?
                .map(|(g, s)| (Formula::know(a.clone(), g), s)),
            Formula::And(a, b) => match self.first(a, prefix)? {
                Some((a2, s)) => Some((Formula::and(a2, (**b).clone()), s)),
                None => self
                    .first(b, prefix)?
                    .map(|(b2, s)| (Formula::and((**a).clone(), b2), s)),
            },
            Formula::Diamond(t, g) => self
                .first(g, &prefix.concat(t))?
                .map(|(g, s)| (Formula::diamond(t.clone(), g), s)),
            Formula::Ought(a, t, g) => self
                .first(g, &prefix.concat(t))?
                .map(|(g, s)| (Formula::ought(a.clone(), t.clone(), g), s)),
        })
    }

    fn at_root(
        &self,
        f: &Formula,
        prefix: &EventTrace,
    ) -> Result<Option<(Rule, Formula)>, ReductionError> {
        Ok(match f {
            Formula::Ought(i, t, body) => Some(self.ought(i, t, body, prefix)?),
            Formula::Diamond(t, body) => self.diamond(t, body)?,
            _ => None,
        })
    }

    fn ought(
        &self,
        i: &AgentId,
        t: &EventTrace,
        body: &Formula,
        prefix: &EventTrace,
    ) -> Result<(Rule, Formula), ReductionError> {
        let e = Formula::exp(i.clone(), prefix.concat(t));
        let pre = self.pre(t)?;
        let literal = self.mode == TranslationMode::Literal;
        Ok(match body {
            Formula::Atom(_) | Formula::Exp(_) => (
                Rule::R1,
                Formula::and(Formula::and(pre, body.clone()), e),
            ),
            Formula::And(a, b) => (
                Rule::R2,
                Formula::and(
                    Formula::ought(i.clone(), t.clone(), (**a).clone()),
                    Formula::ought(i.clone(), t.clone(), (**b).clone()),
                ),
            ),
            Formula::Not(g) => {
                let negated = Formula::not(Formula::ought(i.clone(), t.clone(), (**g).clone()));
                if literal {
                    (Rule::R3, Formula::and(pre, negated))
                } else {
                    (Rule::R3, Formula::and(Formula::and(pre, e), negated))
                }
            }
            Formula::Know(j, g) if literal && j == i => (
                Rule::R4,
                Formula::know(j.clone(), Formula::ought(i.clone(), t.clone(), (**g).clone())),
            ),
            Formula::Know(j, _) => (
                if j == i { Rule::R4 } else { Rule::OD },
                Formula::and(Formula::diamond(t.clone(), body.clone()), e),
            ),
            Formula::Diamond(s, g) => (
                Rule::R5,
                Formula::and(Formula::diamond(t.concat(s), (**g).clone()), e),
            ),
            Formula::Ought(j, s, g) if j == i => (
                Rule::R6,
                Formula::and(Formula::ought(i.clone(), t.concat(s), (**g).clone()), e),
            ),
            Formula::Ought(..) => (
                Rule::OD,
                Formula::and(Formula::diamond(t.clone(), body.clone()), e),
            ),
        })
    }

    fn diamond(
        &self,
        t: &EventTrace,
        body: &Formula,
    ) -> Result<Option<(Rule, Formula)>, ReductionError> {
        let pre = || self.pre(t);
        Ok(Some(match body {
            Formula::Atom(_) | Formula::Exp(_) => (Rule::AM1, Formula::and(pre()?, body.clone())),
            Formula::Not(g) => (
                Rule::AM2,
                Formula::and(pre()?, Formula::not(Formula::diamond(t.clone(), (**g).clone()))),
            ),
            Formula::And(a, b) => (
                Rule::AM3,
                Formula::and(
                    Formula::diamond(t.clone(), (**a).clone()),
                    Formula::diamond(t.clone(), (**b).clone()),
                ),
            ),
            Formula::Know(j, g) => match self.mode {
                TranslationMode::Literal => (Rule::AM4, Formula::and(pre()?, body.clone())),
                TranslationMode::Standard => {
                    let alternatives = self.related_traces(j, t)?;
                    let knows = alternatives.into_iter().map(|s| {
                        Formula::know(j.clone(), Formula::boxed(s, (**g).clone()))
                    });
                    (Rule::AM4, Formula::and(pre()?, Formula::conj(knows)))
                }
            },
            Formula::Diamond(s, g) => (Rule::AM5, Formula::diamond(t.concat(s), (**g).clone())),
            Formula::Ought(..) => return Ok(None),
        }))
    }

    /// Traces `σ` with `τ Q_j σ` in the composed action model of `τ`.
    fn related_traces(&self, j: &AgentId, t: &EventTrace) -> Result<Vec<EventTrace>, ParseError> {
        let points: Vec<_> = t.steps().iter().map(|s| s.point.clone()).collect();
        for (p, s) in points.iter().zip(t.steps()) {
            if self.library.pre(s).is_none() {
                return Err(if self.library.get(p).is_none() {
                    ParseError::UnknownPoint(p.clone())
                } else {
                    ParseError::UnknownEvent(s.clone())
                });
            }
        }
        let action = self.library.composed(&points).expect("points resolved");
        let k = action.event_index(t).expect("trace is an event of its composed model");
        Ok((0..action.events.len())
            .filter(|&x| action.related(j, k, x))
            .map(|x| action.events[x].trace.clone())
            .collect())
    }
}

/// Agreement of two formulas over a set of evaluation contexts.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub agreements: usize,
    /// `(world, verdict of φ, verdict of ψ)`.
    pub disagreements: Vec<(WorldId, bool, bool)>,
    pub errors: Vec<(WorldId, String)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.errors.is_empty()
    }
}

pub fn equivalence_oracle(
    checker: &Checker<'_>,
    phi: &Formula,
    psi: &Formula,
    contexts: &[(Arc<GradedKripkeModel>, usize)],
) -> OracleReport {
    let mut report = OracleReport::default();
    for (m, w) in contexts {
        let id = m.world(*w).id.clone();
        match (checker.holds(m, *w, phi), checker.holds(m, *w, psi)) {
            (Ok(a), Ok(b)) if a == b => report.agreements += 1,
            (Ok(a), Ok(b)) => report.disagreements.push((id, a, b)),
            (Err(e), _) | (_, Err(e)) => report.errors.push((id, e.to_string())),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_in;
    use crate::formula::Env;
    use crate::scenarios::{allergy, miners};

    fn env(lib: &Library) -> Env<'_> {
        Env {
            points: Some(lib),
            agents: None,
            precondition: false,
        }
    }

    #[test]
    fn atom_is_a_fixed_point() {
        let s = miners();
        let f = parse_in("p", env(&s.library)).unwrap();
        let t = translate(&f, TranslationMode::Standard, &s.library).unwrap();
        assert_eq!(t.formula, f);
        assert!(t.steps.is_empty());
    }

    #[test]
    fn r1_first_step() {
        let s = miners();
        let f = parse_in("O{i}(U.gamma | p)", env(&s.library)).unwrap();
        let t = translate(&f, TranslationMode::Standard, &s.library).unwrap();
        assert_eq!(t.steps[0].rule, Rule::R1);
        assert_eq!(t.steps[0].after.to_string(), "((s9 & p) & e{i; U.gamma})");
        assert_eq!((t.steps[0].c_before, t.steps[0].c_after), (6, 3));
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn r6_first_step_composes_traces() {
        use crate::action::DecisionPoint;
        use crate::symbol::EventName;
        let dp = |id: &str| {
            DecisionPoint::new(
                id,
                "i",
                [
                    (EventName::new("a"), Formula::atom("q")),
                    (EventName::new("b"), Formula::atom("r")),
                ],
            )
        };
        let lib = Library::from_points([dp("U"), dp("V")]).unwrap();
        let f = parse_in("O{i}(U.a | O{i}(V.b | p))", env(&lib)).unwrap();
        let t = translate(&f, TranslationMode::Standard, &lib).unwrap();
        assert_eq!(t.steps[0].rule, Rule::R6);
        assert_eq!(t.steps[0].after.to_string(), "(O{i}(U.a;V.b | p) & e{i; U.a})");
        assert_eq!((t.steps[0].c_before, t.steps[0].c_after), (36, 11));
        assert_eq!(t.steps[1].rule, Rule::R1);
        assert_eq!(
            t.steps[1].after.to_string(),
            "((<U.a> r & p) & e{i; U.a;V.b})"
        );
    }

    #[test]
    fn translation_removes_oughts_and_diamonds() {
        let s = allergy();
        let f = s.parse("O{b}(U.delta | O{a}(U2.beta | K{a} A))");
        for mode in [TranslationMode::Standard, TranslationMode::Literal] {
            let t = translate(&f, mode, &s.library).unwrap();
            assert!(t.formula.is_ought_free() && t.formula.is_diamond_free(), "{}", t.formula);
            assert!(t.steps.iter().filter(|s| s.rule.is_ought_rule()).all(check_inequalities));
            let again = translate(&t.formula, mode, &s.library).unwrap();
            assert!(again.steps.is_empty());
        }
    }

    #[test]
    fn standard_translation_agrees_on_worked_examples() {
        for s in [miners(), allergy()] {
            let checker = Checker::new(&s.library);
            let contexts: Vec<_> = (0..s.model.len()).map(|w| (Arc::clone(&s.model), w)).collect();
            for claim in &s.claims {
                let f = s.parse(&claim.formula);
                let t = translate(&f, TranslationMode::Standard, &s.library).unwrap();
                let report = equivalence_oracle(&checker, &f, &t.formula, &contexts);
                assert!(report.passed(), "{}: {report:?}", claim.formula);
            }
        }
    }
}
