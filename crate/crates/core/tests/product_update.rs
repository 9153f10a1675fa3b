use std::collections::BTreeSet;

use daml::action::{DecisionPoint, Library};
use daml::error::ModelError;
use daml::formula::Formula;
use daml::io::model_to_doc;
use daml::model::GradedKripkeModel;
use daml::product::{apply_sequence, product};
use daml::symbol::{EventName, PropId};
use daml::verify::{gen_instance, GenParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct evaluation of ought-free, diamond-free formulas.
fn oracle(m: &GradedKripkeModel, w: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => m.world(w).atoms.contains(p),
        Formula::Not(g) => !oracle(m, w, g),
        Formula::And(a, b) => oracle(m, w, a) && oracle(m, w, b),
        Formula::Know(i, g) => m.relations()[i][w].iter().all(|&u| oracle(m, u, g)),
        other => panic!("oracle does not cover {other}"),
    }
}

#[test]
fn product_keeps_exactly_the_executable_pairs() {
    for k in 0..200 {
        let p = GenParams::default().trial(k);
        let inst = gen_instance(&p);
        let m = &inst.model;
        for u in &inst.points {
            let pm = product(m, &u.as_action_model(), &inst.library).unwrap();
            let expected: Vec<(usize, usize)> = (0..m.len())
                .flat_map(|w| (0..u.events.len()).map(move |e| (w, e)))
                .filter(|&(w, e)| oracle(m, w, &u.events[e].1))
                .collect();
            assert_eq!(pm.len(), expected.len(), "trial {k}");
            for (x, &(w, e)) in expected.iter().enumerate() {
                let pw = pm.world(x);
                let base = m.world(w);
                assert_eq!(pw.id.as_str(), format!("{}@{}.{}", base.id, u.id, u.events[e].0));
                assert_eq!(pw.atoms, base.atoms);
                assert_eq!(pw.value, base.value);
                for (agent, rows) in pm.relations() {
                    let got: BTreeSet<usize> = rows[x].clone();
                    let want: BTreeSet<usize> = expected
                        .iter()
                        .enumerate()
                        .filter(|(_, &(w2, e2))| e2 == e && m.relations()[agent][w].contains(&w2))
                        .map(|(y, _)| y)
                        .collect();
                    assert_eq!(got, want, "trial {k}, agent {agent}");
                }
            }
        }
    }
}

#[test]
fn iterated_and_composed_products_coincide() {
    let mut compared = 0;
    for k in 0..200 {
        let p = GenParams::default().trial(k);
        let inst = gen_instance(&p);
        let u = inst.point("U").unwrap();
        let u2 = inst.point("U2").unwrap();
        let iterated = match apply_sequence(&inst.model, &[u.clone(), u2.clone()], &inst.library) {
            Ok(m) => model_to_doc(&m),
            Err(ModelError::EmptyProduct { .. }) => continue,
            Err(e) => panic!("trial {k}: {e}"),
        };
        let composed = inst.library.composed(&[u.id.clone(), u2.id.clone()]).unwrap();
        let direct = product(&inst.model, &composed, &inst.library).unwrap();
        assert_eq!(model_to_doc(&direct), iterated, "trial {k}");
        compared += 1;
    }
    assert!(compared >= 150, "{compared}");
}

#[test]
fn empty_product_exactly_when_nothing_is_executable() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut empties = 0;
    for k in 0..300 {
        let inst = gen_instance(&GenParams::default().trial(k));
        let atoms: Vec<PropId> = inst.model.atoms().iter().cloned().collect();
        let literal = |rng: &mut ChaCha8Rng| {
            let a = Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone());
            if rng.gen_bool(0.5) {
                a
            } else {
                Formula::not(a)
            }
        };
        let events: Vec<(EventName, Formula)> = (0..2)
            .map(|e| {
                let pre = Formula::and(Formula::and(literal(&mut rng), literal(&mut rng)), literal(&mut rng));
                (EventName::new(format!("x{e}")), pre)
            })
            .collect();
        let dp = DecisionPoint::new("X", inst.actor.as_str(), events);
        let lib = Library::from_points([dp.clone()]).unwrap();
        let none = (0..inst.model.len()).all(|w| dp.events.iter().all(|(_, f)| !oracle(&inst.model, w, f)));
        match product(&inst.model, &dp.as_action_model(), &lib) {
            Err(ModelError::EmptyProduct { step: None }) => {
                assert!(none, "trial {k}");
                empties += 1;
            }
            Ok(pm) => assert!(!none && !pm.is_empty(), "trial {k}"),
            Err(e) => panic!("trial {k}: {e}"),
        }
    }
    assert!(empties > 0);
}
