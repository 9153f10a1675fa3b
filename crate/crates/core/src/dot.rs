//! Graphviz rendering of models and submodels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::GradedKripkeModel;

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    /// Omit reflexive edges.
    pub no_loops: bool,
    /// World drawn double-circled; defaults to the model's point.
    pub root: Option<usize>,
}

fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(m: &GradedKripkeModel, options: DotOptions) -> String {
    let root = options.root.or(m.point());
    let mut out = String::from("digraph model {\n  node [shape=circle];\n");
    for (k, w) in m.worlds().iter().enumerate() {
        let atoms: Vec<&str> = w.atoms.iter().map(|p| p.as_str()).collect();
        let shape = if Some(k) == root { " shape=doublecircle" } else { "" };
        let _ = writeln!(
            out,
            "  n{k} [label=\"{}\\n{}\\nf={}\"{shape}];",
            quote(w.id.as_str()),
            quote(&atoms.join(",")),
            w.value
        );
    }
    let mut edges: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for (agent, rows) in m.relations() {
        for (x, row) in rows.iter().enumerate() {
            for &y in row {
                if options.no_loops && x == y {
                    continue;
                }
                edges.entry((x, y)).or_default().push(agent.as_str());
            }
        }
    }
    for ((x, y), agents) in edges {
        let _ = writeln!(out, "  n{x} -> n{y} [label=\"{}\"];", quote(&agents.join(",")));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::miners;

    #[test]
    fn miners_dot_is_deterministic() {
        let s = miners();
        let a = export_dot(&s.model, DotOptions::default());
        assert_eq!(a, export_dot(&s.model, DotOptions::default()));
        assert_eq!(a.matches("[label=\"").count(), 6 + 36);
        assert!(a.contains("n1 [label=\"A9\\nA,s9\\nf=9\" shape=doublecircle];"));
        let b = export_dot(&s.model, DotOptions { no_loops: true, root: None });
        assert_eq!(b.matches(" -> ").count(), 30);
    }
}
