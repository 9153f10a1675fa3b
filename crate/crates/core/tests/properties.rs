use std::sync::Arc;

use daml::checker::{Checker, Clause, Verdict};
use daml::formula::{complexity, parse, parse_in, Env, Formula};
use daml::io::{doc_to_model, model_to_doc};
use daml::verify::{gen_formula, gen_instance, GenParams, Instance, Vocabulary};
use proptest::prelude::*;

fn instance_and_formula(seed: u64, depth: usize) -> (Instance, Formula) {
    let p = GenParams::default().with_seed(seed);
    let inst = gen_instance(&p);
    let mut rng = p.rng();
    let f = gen_formula(&Vocabulary::of(&inst), depth, &mut rng);
    (inst, f)
}

fn env(inst: &Instance) -> Env<'_> {
    Env {
        points: Some(&inst.library),
        agents: Some(inst.model.agents()),
        precondition: false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_inverts_print(seed in any::<u64>()) {
        let (inst, f) = instance_and_formula(seed, 8);
        let text = f.to_string();
        let back = parse_in(&text, env(&inst)).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn complexity_exceeds_every_proper_subformula(seed in any::<u64>()) {
        let (inst, f) = instance_and_formula(seed, 6);
        let c = complexity(&f, &inst.library).unwrap();
        for g in f.proper_subformulas() {
            prop_assert!(complexity(g, &inst.library).unwrap() < c, "{} vs {}", g, f);
        }
    }
}

#[test]
fn headline_formula_parses_to_the_expected_tree() {
    let f = parse("O{b}(U.delta | O{a}(U2.beta | K{a} A))").unwrap();
    let expected = Formula::ought(
        "b".into(),
        daml::symbol::EventTrace::single(daml::symbol::Step::new("U", "delta")),
        Formula::ought(
            "a".into(),
            daml::symbol::EventTrace::single(daml::symbol::Step::new("U2", "beta")),
            Formula::know("a".into(), Formula::atom("A")),
        ),
    );
    assert_eq!(f, expected);
}

fn leaves_fail(v: &Verdict) -> bool {
    match v.culprit() {
        None => false,
        Some(c) => !c.holds && matches!(c.clause, Clause::Atom | Clause::Exp | Clause::Not),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn failing_verdicts_name_a_failing_leaf(seed in any::<u64>()) {
        let (inst, f) = instance_and_formula(seed, 4);
        let checker = Checker::new(&inst.library);
        for w in 0..inst.model.len() {
            if let Ok(v) = checker.eval(&inst.model, w, &f) {
                if v.holds {
                    prop_assert!(v.culprit().is_none());
                } else {
                    prop_assert!(leaves_fail(&v), "{}", v);
                }
            }
        }
    }

    #[test]
    fn scaling_values_preserves_expectation_verdicts(seed in any::<u64>(), k in 2u64..7) {
        let p = GenParams::default().with_seed(seed);
        let inst = gen_instance(&p);
        let mut doc = model_to_doc(&inst.model);
        for w in &mut doc.worlds {
            w.value *= k;
        }
        let scaled = Arc::new(doc_to_model(&doc, "scaled").unwrap());
        let checker = Checker::new(&inst.library);
        for u in &inst.points {
            let action = u.as_action_model();
            let pm = checker.product(&inst.model, &action).unwrap();
            let qm = checker.product(&scaled, &action).unwrap();
            prop_assert_eq!(pm.len(), qm.len());
            for x in 0..pm.len() {
                for e in 0..u.events.len() {
                    let atom = Formula::exp(u.owner.clone(), daml::symbol::EventTrace::single(u.step(e)));
                    let a = checker.holds(&pm, x, &atom).ok();
                    let b = checker.holds(&qm, x, &atom).ok();
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
