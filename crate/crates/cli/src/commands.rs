use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use daml::action::DecisionPoint;
use daml::checker::{Checker, Clause, Verdict};
use daml::dot::{export_dot as render_dot, DotOptions};
use daml::expectation::expected_value;
use daml::formula::{parse_in, Env, Formula};
use daml::io::{load_workspace, model_to_doc, parse_actions, to_json, IoError, Workspace};
use daml::model::{FrameClass, GradedKripkeModel};
use daml::product::apply_sequence;
use daml::rational::Rational;
use daml::reduction::{translate as rewrite, TranslationMode};
use daml::scenarios::{by_name, run_scenario, Scenario, NAMES};
use daml::submodel::{action_component, agent_submodel, generated_submodel};
use daml::symbol::{AgentId, EventTrace, WorldId};
use daml::verify::{run_axiom_suite, GenParams};

use crate::{InputError, Inputs, Outcome};

fn workspace(inputs: &Inputs) -> Result<Workspace, InputError> {
    let actions: Vec<&Path> = inputs.actions.iter().map(PathBuf::as_path).collect();
    let ws = load_workspace(&inputs.model, &actions)?;
    for w in &ws.warnings {
        eprintln!("warning: {w}");
    }
    Ok(ws)
}

fn env(ws: &Workspace) -> Env<'_> {
    Env {
        points: Some(&ws.library),
        agents: Some(ws.model.agents()),
        precondition: false,
    }
}

fn world(m: &GradedKripkeModel, id: Option<&str>) -> Result<usize, InputError> {
    match id {
        Some(id) => Ok(m.world_index(&WorldId::new(id))?),
        None => m
            .point()
            .ok_or_else(|| InputError("the model has no point; pass --at".into())),
    }
}

fn outcome(holds: bool) -> Outcome {
    if holds {
        Outcome::Success
    } else {
        Outcome::Failure
    }
}

fn strict_notes(v: &Verdict, out: &mut Vec<String>) {
    if v.clause == Clause::Diamond && !v.holds && !v.children[0].holds {
        out.push(format!(
            "note: `{}` at {} fails at its precondition; the body is not consulted",
            v.label, v.world
        ));
    }
    for c in &v.children {
        strict_notes(c, out);
    }
}

pub fn check(
    inputs: &Inputs,
    text: &str,
    at: Option<&str>,
    global: bool,
    explain: bool,
    json: bool,
    notes: bool,
) -> Result<Outcome, InputError> {
    let ws = workspace(inputs)?;
    let f = parse_in(text, env(&ws))?;
    let checker = Checker::new(&ws.library);
    let verdict = if global {
        checker.holds_globally(&ws.model, &f)?
    } else {
        checker.eval(&ws.model, world(&ws.model, at)?, &f)?
    };
    if json {
        println!("{}", to_json(&verdict));
    } else {
        println!("{}", verdict.holds);
        if explain {
            print!("{}", verdict.explain());
        }
        if notes {
            let mut lines = Vec::new();
            strict_notes(&verdict, &mut lines);
            for l in lines {
                println!("{l}");
            }
        }
    }
    Ok(outcome(verdict.holds))
}

pub fn update(inputs: &Inputs) -> Result<Outcome, InputError> {
    let ws = workspace(inputs)?;
    let pm = apply_sequence(&ws.model, &ws.points, &ws.library)?;
    println!("{}", to_json(&model_to_doc(&pm)));
    Ok(Outcome::Success)
}

/// Every trace choosing one event from each decision point, in order.
fn full_traces(points: &[DecisionPoint]) -> Vec<EventTrace> {
    points.iter().fold(vec![EventTrace::empty()], |acc, u| {
        acc.iter()
            .flat_map(|t| (0..u.events.len()).map(move |k| t.push(u.step(k))))
            .collect()
    })
}

pub fn expect(
    inputs: &Inputs,
    at: Option<&str>,
    agent: Option<&str>,
    trace: Option<&str>,
    json: bool,
) -> Result<Outcome, InputError> {
    let ws = workspace(inputs)?;
    if ws.points.is_empty() {
        return Err(InputError("expect needs at least one action document".into()));
    }
    let pm = apply_sequence(&ws.model, &ws.points, &ws.library)?;
    let agents: Vec<AgentId> = match agent {
        Some(a) => vec![AgentId::new(a)],
        None => ws.model.agents().to_vec(),
    };
    let traces: Vec<EventTrace> = full_traces(&ws.points)
        .into_iter()
        .filter(|t| trace.map_or(true, |s| t.to_string() == s))
        .collect();
    if let Some(s) = trace {
        if traces.is_empty() {
            return Err(InputError(format!("`{s}` is not a trace of the loaded decision points")));
        }
    }
    let base = at.map(WorldId::new);
    let mut rows: Vec<(String, String, BTreeMap<String, String>)> = Vec::new();
    for a in &agents {
        if !ws.model.has_agent(a) {
            return Err(InputError(format!("unknown agent `{a}`")));
        }
        for t in &traces {
            let mut values = BTreeMap::new();
            for k in 0..pm.len() {
                let w = pm.world(k);
                if &w.trace != t || base.as_ref().is_some_and(|b| b != &w.base) {
                    continue;
                }
                let value = action_component(&pm, k, Some(a))
                    .and_then(|sub| expected_value(&sub, a))
                    .map_or_else(|e| format!("undefined ({e})"), |v: Rational| v.to_string());
                values.insert(w.id.to_string(), value);
            }
            rows.push((a.to_string(), t.to_string(), values));
        }
    }
    if json {
        let doc: Vec<_> = rows
            .iter()
            .map(|(a, t, v)| serde_json::json!({"agent": a, "trace": t, "values": v}))
            .collect();
        println!("{}", to_json(&doc));
        return Ok(Outcome::Success);
    }
    for (a, t, values) in rows {
        let distinct: Vec<&String> = values.values().collect::<BTreeSet<_>>().into_iter().collect();
        match distinct.as_slice() {
            [] => println!("E[{a}; {t}] = undefined (no surviving instance)"),
            [one] => println!("E[{a}; {t}] = {one}"),
            _ => {
                let parts: Vec<String> = values.iter().map(|(w, v)| format!("{w}: {v}")).collect();
                println!("E[{a}; {t}] = {{{}}}", parts.join(", "));
            }
        }
    }
    Ok(Outcome::Success)
}

pub fn translate(
    text: &str,
    actions: &[PathBuf],
    mode: TranslationMode,
    trace: bool,
    json: bool,
) -> Result<Outcome, InputError> {
    let texts: Vec<(String, String)> = actions
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|t| (p.display().to_string(), t))
                .map_err(|e| InputError(format!("{}: {e}", p.display())))
        })
        .collect::<Result<_, _>>()?;
    let (_, library, _) = parse_actions(texts.iter().map(|(f, t)| (f.as_str(), t.as_str())))?;
    let f: Formula = parse_in(
        text,
        Env {
            points: Some(&library),
            agents: None,
            precondition: false,
        },
    )?;
    let t = rewrite(&f, mode, &library)?;
    if json {
        let doc = serde_json::json!({
            "formula": f.to_string(),
            "mode": mode,
            "translation": t.formula.to_string(),
            "steps": t.steps,
        });
        println!("{}", to_json(&doc));
        return Ok(Outcome::Success);
    }
    if trace {
        for s in &t.steps {
            println!("{s}");
        }
    }
    println!("{}", t.formula);
    Ok(Outcome::Success)
}

pub fn axioms(trials: usize, seed: u64, frame: FrameClass, json: bool) -> Outcome {
    let p = GenParams {
        frame,
        ..GenParams::default()
    }
    .with_seed(seed);
    let report = run_axiom_suite(&p, trials);
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    outcome(report.axioms.iter().all(|s| s.failures == 0))
}

fn write_dot(dir: &Path, name: &str, m: &GradedKripkeModel, root: Option<usize>) -> Result<(), InputError> {
    let file = dir.join(format!("{}.dot", name.replace(['@', ';', '.'], "_")));
    let text = render_dot(m, DotOptions { no_loops: false, root });
    std::fs::write(&file, text).map_err(|e| InputError(format!("{}: {e}", file.display())))
}

fn scenario_dots(s: &Scenario, dir: &Path) -> Result<(), InputError> {
    std::fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    write_dot(dir, &format!("{}_model", s.name), &s.model, None)?;
    let mut current = Arc::clone(&s.model);
    let checker = Checker::new(&s.library);
    for u in &s.points {
        current = checker.product(&current, &u.as_action_model())?;
        write_dot(dir, &format!("{}_product_{}", s.name, u.id), &current, None)?;
    }
    let agents = current.agents().to_vec();
    for k in 0..current.len() {
        for a in &agents {
            if let Ok(sub) = action_component(&current, k, Some(a)) {
                let name = format!("{}_component_{}_{}", s.name, a, current.world(k).id);
                write_dot(dir, &name, &sub.model, Some(sub.root))?;
            }
        }
    }
    Ok(())
}

pub fn scenario(name: &str, json: bool, dot: Option<&Path>) -> Result<Outcome, InputError> {
    let s = by_name(name).ok_or_else(|| {
        InputError(format!("unknown scenario `{name}`; expected one of {}", NAMES.join(", ")))
    })?;
    let report = run_scenario(&s)?;
    if json {
        println!("{}", to_json(&report));
    } else {
        print!("{report}");
    }
    if let Some(dir) = dot {
        scenario_dots(&s, dir)?;
    }
    Ok(outcome(report.passed()))
}

pub fn export_dot(
    inputs: &Inputs,
    root: Option<&str>,
    agent: Option<&str>,
    no_loops: bool,
) -> Result<Outcome, InputError> {
    let ws = workspace(inputs)?;
    let m = if ws.points.is_empty() {
        Arc::clone(&ws.model)
    } else {
        apply_sequence(&ws.model, &ws.points, &ws.library)?
    };
    let text = match root {
        None => render_dot(&m, DotOptions { no_loops, root: None }),
        Some(id) => {
            let v = m.world_index(&WorldId::new(id))?;
            let sub = match agent {
                Some(a) => agent_submodel(&m, v, &AgentId::new(a))?,
                None => generated_submodel(&m, v)?,
            };
            render_dot(
                &sub.model,
                DotOptions {
                    no_loops,
                    root: Some(sub.root),
                },
            )
        }
    };
    print!("{text}");
    Ok(Outcome::Success)
}

pub fn validate(inputs: &Inputs, json: bool) -> Result<Outcome, InputError> {
    let actions: Vec<&Path> = inputs.actions.iter().map(PathBuf::as_path).collect();
    match load_workspace(&inputs.model, &actions) {
        Ok(ws) => {
            if json {
                let doc = serde_json::json!({
                    "valid": true,
                    "model": model_to_doc(&ws.model),
                    "points": ws.points.iter().map(|u| u.id.to_string()).collect::<Vec<_>>(),
                    "warnings": ws.warnings,
                });
                println!("{}", to_json(&doc));
            } else {
                println!(
                    "valid: {} worlds, {} agents, frame {}, {} decision points",
                    ws.model.len(),
                    ws.model.agents().len(),
                    ws.model.frame(),
                    ws.points.len()
                );
                for w in &ws.warnings {
                    println!("warning: {w}");
                }
            }
            Ok(Outcome::Success)
        }
        Err(e @ (IoError::Validation { .. } | IoError::Precondition { .. } | IoError::Library { .. })) => {
            if json {
                println!("{}", to_json(&serde_json::json!({"valid": false, "error": e.to_string()})));
            } else {
                println!("invalid: {e}");
            }
            Ok(Outcome::Failure)
        }
        Err(e) => Err(e.into()),
    }
}
