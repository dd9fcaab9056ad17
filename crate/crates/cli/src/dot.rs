use std::fmt::Write as _;

use nfst_core::Transducer;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Accepting states are double circles, the initial
/// state is bold and edges are labelled `symbol/output`.
pub fn to_dot(t: &Transducer) -> String {
    let mut s = String::from("digraph fst {\n  rankdir=LR;\n  node [shape=circle];\n");
    for &q in t.states() {
        let shape = if t.is_accepting(q) {
            "doublecircle"
        } else {
            "circle"
        };
        let style = if q == t.initial() { ", style=bold" } else { "" };
        let _ = writeln!(s, "  {q} [shape={shape}{style}];");
    }
    let mut edges: Vec<_> = t.transitions().iter().collect();
    edges.sort_by(|a, b| {
        (a.src, a.symbol, a.dst, &a.output).cmp(&(b.src, b.symbol, b.dst, &b.output))
    });
    for e in edges {
        let out = if e.output.is_empty() { "ε" } else { &e.output };
        let label = escape(&format!("{}/{}", e.symbol, out));
        let _ = writeln!(s, "  {} -> {} [label=\"{label}\"];", e.src, e.dst);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_machine() {
        let t = Transducer::build(0, &[0], &[(0, 'a', 0, "x")]);
        let d = to_dot(&t);
        assert!(d.contains("0 [shape=doublecircle, style=bold];"));
        assert!(d.contains("0 -> 0 [label=\"a/x\"];"));
    }

    #[test]
    fn quotes_are_escaped() {
        let t = Transducer::build(0, &[1], &[(0, '"', 1, "\\")]);
        assert!(to_dot(&t).contains(r#"[label="\"/\\"]"#));
    }
}
