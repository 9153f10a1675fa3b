use std::sync::Arc;

use serde::Serialize;

use super::{gen_formula, gen_instance, GenParams, Vocabulary};
use crate::checker::Checker;
use crate::reduction::{check_inequalities, translate, TranslationMode};
use crate::submodel::agent_submodel;

#[derive(Clone, Debug, Serialize)]
pub struct TranslationMismatch {
    pub seed: u64,
    pub formula: String,
    pub translation: String,
    pub context: String,
    pub original_holds: bool,
    pub translation_holds: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TranslationReport {
    pub seed: u64,
    pub mode: Option<TranslationMode>,
    pub pairs: usize,
    pub contexts: usize,
    pub disagreements: Vec<TranslationMismatch>,
    /// `(seed, formula, error)` for pairs that could not be evaluated.
    pub errors: Vec<(u64, String, String)>,
    pub steps: usize,
    pub ought_steps: usize,
    /// Ought-rule steps whose complexity strictly decreased.
    pub certified: usize,
    /// Results still containing an ought or a dynamic modality.
    pub fixed_point_failures: usize,
}

impl TranslationReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
            && self.errors.is_empty()
            && self.fixed_point_failures == 0
            && self.certified == self.ought_steps
    }
}

impl std::fmt::Display for TranslationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "translation suite: {} formulas, {} contexts, seed {}",
            self.pairs, self.contexts, self.seed
        )?;
        writeln!(f, "  disagreements {}", self.disagreements.len())?;
        writeln!(f, "  errors {}", self.errors.len())?;
        writeln!(f, "  fixed-point failures {}", self.fixed_point_failures)?;
        writeln!(
            f,
            "  rewrite steps {}, ought steps {}, certified {}",
            self.steps, self.ought_steps, self.certified
        )
    }
}

/// Translates one random formula per trial and compares the verdicts of
/// the formula and its translation at every world of the generated model
/// and at the root of every agent submodel of the acting agent.
pub fn run_translation_suite(p: &GenParams, trials: usize, mode: TranslationMode) -> TranslationReport {
    let mut report = TranslationReport {
        seed: p.seed,
        mode: Some(mode),
        ..TranslationReport::default()
    };
    for k in 0..trials {
        let tp = p.trial(k as u64);
        let inst = gen_instance(&tp);
        let mut rng = tp.rng();
        let phi = gen_formula(&Vocabulary::of(&inst), p.depth, &mut rng);
        report.pairs += 1;
        let t = match translate(&phi, mode, &inst.library) {
            Ok(t) => t,
            Err(e) => {
                report.errors.push((tp.seed, phi.to_string(), e.to_string()));
                continue;
            }
        };
        report.steps += t.steps.len();
        for s in t.steps.iter().filter(|s| s.rule.is_ought_rule()) {
            report.ought_steps += 1;
            if check_inequalities(s) {
                report.certified += 1;
            }
        }
        if !t.formula.is_ought_free() || !t.formula.is_diamond_free() {
            report.fixed_point_failures += 1;
        }
        let mut contexts: Vec<(Arc<_>, usize, String)> = (0..inst.model.len())
            .map(|w| (Arc::clone(&inst.model), w, inst.model.world(w).id.to_string()))
            .collect();
        for root in 0..inst.model.len() {
            if let Ok(sub) = agent_submodel(&inst.model, root, &inst.actor) {
                let label = format!("{}-submodel of {}", inst.actor, inst.model.world(root).id);
                let r = sub.root;
                contexts.push((Arc::new(sub.model), r, label));
            }
        }
        let checker = Checker::new(&inst.library);
        for (m, w, label) in &contexts {
            report.contexts += 1;
            match (checker.holds(m, *w, &phi), checker.holds(m, *w, &t.formula)) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(a), Ok(b)) => report.disagreements.push(TranslationMismatch {
                    seed: tp.seed,
                    formula: phi.to_string(),
                    translation: t.formula.to_string(),
                    context: label.clone(),
                    original_holds: a,
                    translation_holds: b,
                }),
                (Err(e), _) | (_, Err(e)) => {
                    report.errors.push((tp.seed, phi.to_string(), format!("{label}: {e}")))
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_agrees() {
        let r = run_translation_suite(&GenParams::default().with_seed(3), 40, TranslationMode::Standard);
        assert_eq!(r.pairs, 40);
        assert!(r.passed(), "{r}\n{:?}\n{:?}", r.disagreements.first(), r.errors.first());
    }
}
