use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Dfg, DfgBuilder, ModelError, VertexLabel, END, START};
use crate::event_log::Activity;

/// JSON form of a model. Ids are canonical: `start` is 0, `end` is 1 and
/// labelled nodes follow in display-label order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfgJson {
    pub nodes: Vec<NodeJson>,
    pub arcs: Vec<[usize; 2]>,
    /// Observed count of each arc, parallel to `arcs`; absent when unknown.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frequencies: Vec<u64>,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: usize,
    pub label: String,
    pub display_label: String,
}

impl From<&Dfg> for DfgJson {
    fn from(m: &Dfg) -> Self {
        DfgJson {
            nodes: m
                .labelled()
                .map(|v| {
                    let l = m.label(v).expect("labelled vertex");
                    NodeJson { id: v, label: l.base.to_string(), display_label: l.display() }
                })
                .collect(),
            arcs: m.arcs().map(|(u, v)| [u, v]).collect(),
            frequencies: if m.arcs().all(|(u, v)| m.frequency(u, v) == 0) {
                Vec::new()
            } else {
                m.arcs().map(|(u, v)| m.frequency(u, v)).collect()
            },
            start: START,
            end: END,
        }
    }
}

fn parse_label(node: &NodeJson) -> Result<VertexLabel, ModelError> {
    let base = Activity::new(&node.label).map_err(|e| ModelError::Json(e.to_string()))?;
    if node.display_label == node.label {
        return Ok(VertexLabel::plain(base));
    }
    node.display_label
        .strip_prefix(node.label.as_str())
        .and_then(|rest| rest.strip_prefix('.'))
        .and_then(|idx| idx.parse::<u32>().ok())
        .filter(|&i| i > 0)
        .map(|i| VertexLabel::indexed(base, i))
        .ok_or_else(|| ModelError::BadDisplayLabel { label: node.label.clone(), display: node.display_label.clone() })
}

impl TryFrom<&DfgJson> for Dfg {
    type Error = ModelError;

    fn try_from(j: &DfgJson) -> Result<Self, Self::Error> {
        let mut b = DfgBuilder::new();
        let mut ids = std::collections::BTreeMap::new();
        ids.insert(j.start, START);
        ids.insert(j.end, END);
        if j.start == j.end {
            return Err(ModelError::Json("start and end must differ".into()));
        }
        for n in &j.nodes {
            let id = b.add_vertex(parse_label(n)?);
            if ids.insert(n.id, id).is_some() {
                return Err(ModelError::Json(format!("node id {} used twice", n.id)));
            }
        }
        if !j.frequencies.is_empty() && j.frequencies.len() != j.arcs.len() {
            return Err(ModelError::Json("frequencies must match arcs".into()));
        }
        for (k, &[u, v]) in j.arcs.iter().enumerate() {
            match (ids.get(&u), ids.get(&v)) {
                (Some(&a), Some(&b2)) => b.add_arc(a, b2, j.frequencies.get(k).copied().unwrap_or(0)),
                _ => return Err(ModelError::DanglingArc(u, v)),
            }
        }
        Ok(b.build()?.0)
    }
}

impl Dfg {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DfgJson::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Dfg, ModelError> {
        let j: DfgJson = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        Dfg::try_from(&j)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Deterministic Graphviz rendering. Arc frequencies, when known, become
/// edge labels.
pub fn to_dot(model: &Dfg) -> String {
    let mut out = String::from("digraph dfg {\n    rankdir=LR;\n");
    let _ = writeln!(out, "    n{START} [label=\"start\", shape=circle, style=filled, fillcolor=\"#7fbf7f\"];");
    let _ = writeln!(out, "    n{END} [label=\"end\", shape=doublecircle, style=filled, fillcolor=\"#bf7f7f\"];");
    for v in model.labelled() {
        let _ = writeln!(out, "    n{v} [label={}, shape=box];", quote(&model.display(v)));
    }
    for (u, v) in model.arcs() {
        match model.frequency(u, v) {
            0 => {
                let _ = writeln!(out, "    n{u} -> n{v};");
            }
            f => {
                let _ = writeln!(out, "    n{u} -> n{v} [label=\"{f}\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::discover_dfg;
    use crate::event_log::EventLog;

    #[test]
    fn dot_chain() {
        let m = discover_dfg(&EventLog::from_sequences(&[&["A", "B"]]).unwrap()).unwrap();
        let dot = to_dot(&m);
        assert_eq!(dot.matches("shape=").count(), 4);
        assert_eq!(dot.matches("->").count(), 3);
        assert_eq!(dot, to_dot(&m));
    }

    #[test]
    fn dot_shows_indexed_duplicates() {
        let f = Activity::new("F").unwrap();
        let mut b = DfgBuilder::new();
        let f1 = b.add_vertex(VertexLabel::indexed(f.clone(), 1));
        let f2 = b.add_vertex(VertexLabel::indexed(f, 2));
        for (u, v) in [(START, f1), (START, f2), (f1, END), (f2, END)] {
            b.add_arc(u, v, 0);
        }
        let dot = to_dot(&b.build().unwrap().0);
        assert!(dot.contains("label=\"F.1\""));
        assert!(dot.contains("label=\"F.2\""));
    }

    #[test]
    fn dot_escapes_quotes() {
        let m = discover_dfg(&EventLog::from_sequences(&[&["say \"hi\""]]).unwrap()).unwrap();
        assert!(to_dot(&m).contains(r#"label="say \"hi\"""#));
    }

    #[test]
    fn json_layout() {
        let m = discover_dfg(&EventLog::from_sequences(&[&["B", "A"]]).unwrap()).unwrap();
        let j = DfgJson::from(&m);
        assert_eq!(j.nodes.iter().map(|n| n.display_label.as_str()).collect::<Vec<_>>(), ["A", "B"]);
        let mut sorted = j.arcs.clone();
        sorted.sort();
        assert_eq!(sorted, j.arcs);
        assert_eq!(Dfg::from_json(&m.to_json()).unwrap().to_json(), m.to_json());
    }

    #[test]
    fn json_rejects_inconsistent_display() {
        let text = r#"{"nodes":[{"id":5,"label":"A","display_label":"B.1"}],"arcs":[[0,5],[5,1]],"start":0,"end":1}"#;
        assert!(matches!(Dfg::from_json(text), Err(ModelError::BadDisplayLabel { .. })));
        let text = r#"{"nodes":[{"id":5,"label":"A","display_label":"A.2"}],"arcs":[[0,5],[5,1]],"start":0,"end":1}"#;
        let m = Dfg::from_json(text).unwrap();
        assert_eq!(m.display(2), "A.2");
        let text = r#"{"nodes":[],"arcs":[[0,7]],"start":0,"end":1}"#;
        assert!(matches!(Dfg::from_json(text), Err(ModelError::DanglingArc(0, 7))));
    }
}
