//! Concrete pattern graphs and the instances built from them.
//!
//! Pattern element ids have the form `<entity>#<copy>#<local>`: the entity
//! that produced the element, which copy of it (0 for the original), and a
//! position inside the entity (`0` for a node entity, motif node indices,
//! `e<k>` for edges, `link` for chain links, `path` for path markers).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::query::{ParamAssignment, Predicate};

/// How an element came to exist: entity, copy, local index, and the
/// `(rule, iteration)` applications that copied it, outermost last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub entity: String,
    pub copy: usize,
    pub local: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lineage: Vec<(String, usize)>,
}

impl Origin {
    pub fn root(entity: impl Into<String>, copy: usize) -> Self {
        Origin {
            entity: entity.into(),
            copy,
            local: "0".into(),
            lineage: Vec::new(),
        }
    }

    pub fn new(entity: impl Into<String>, copy: usize, local: impl Into<String>) -> Self {
        Origin {
            entity: entity.into(),
            copy,
            local: local.into(),
            lineage: Vec::new(),
        }
    }

    pub fn pid(&self) -> String {
        pid(&self.entity, self.copy, &self.local)
    }
}

pub fn pid(entity: &str, copy: usize, local: &str) -> String {
    format!("{entity}#{copy}#{local}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicates: Vec<Predicate>,
    pub origin: Origin,
}

/// Stand-in for a path motif whose size is not fixed yet: the marker edge
/// joins head and tail and remembers what the expanded path must carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMarker {
    pub min_nodes: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_predicates: Vec<Predicate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edge_predicates: Vec<Predicate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PEdge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicates: Vec<Predicate>,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_marker: Option<PathMarker>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternGraph {
    pub nodes: Vec<PNode>,
    pub edges: Vec<PEdge>,
}

impl PatternGraph {
    pub fn node(&self, id: &str) -> Option<&PNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&PEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_positions(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    pub fn has_markers(&self) -> bool {
        self.edges.iter().any(|e| e.path_marker.is_some())
    }

    /// Sorts elements by natural id order and every predicate list, so
    /// structurally equal patterns compare equal.
    pub fn normalize(&mut self) {
        for n in &mut self.nodes {
            normalize_predicates(&mut n.predicates);
        }
        for e in &mut self.edges {
            normalize_predicates(&mut e.predicates);
            if let Some(m) = &mut e.path_marker {
                normalize_predicates(&mut m.node_predicates);
                normalize_predicates(&mut m.edge_predicates);
            }
        }
        self.nodes.sort_by(|a, b| natural_cmp(&a.id, &b.id));
        self.edges.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    }

    /// Replaces every path marker with the path at its minimum size.
    /// Interior nodes and edges reuse the marker's entity and copy.
    pub fn concretize(&self) -> PatternGraph {
        if !self.has_markers() {
            return self.clone();
        }
        let mut out = PatternGraph {
            nodes: self.nodes.clone(),
            edges: Vec::with_capacity(self.edges.len()),
        };
        for e in &self.edges {
            let Some(marker) = &e.path_marker else {
                out.edges.push(e.clone());
                continue;
            };
            let entity = &e.origin.entity;
            let copy = e.origin.copy;
            let mut chain = vec![e.source.clone()];
            for i in 1..marker.min_nodes.saturating_sub(1) {
                let mut origin = e.origin.clone();
                origin.local = i.to_string();
                let id = origin.pid();
                out.nodes.push(PNode {
                    id: id.clone(),
                    predicates: marker.node_predicates.clone(),
                    origin,
                });
                chain.push(id);
            }
            chain.push(e.target.clone());
            for (j, w) in chain.windows(2).enumerate() {
                let local = format!("e{j}");
                let mut origin = e.origin.clone();
                origin.local = local.clone();
                out.edges.push(PEdge {
                    id: pid(entity, copy, &local),
                    source: w[0].clone(),
                    target: w[1].clone(),
                    directed: e.directed,
                    predicates: marker.edge_predicates.clone(),
                    origin,
                    path_marker: None,
                });
            }
        }
        out.normalize();
        out
    }
}

pub fn normalize_predicates(preds: &mut Vec<Predicate>) {
    preds.sort();
    preds.dedup();
}

/// Orders ids so embedded digit runs compare numerically (`C0#2#0` before
/// `C0#10#0`); ties fall back to plain byte order.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let lx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let ly = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let (dx, dy) = (trim_zeros(&x[..lx]), trim_zeros(&y[..ly]));
                let ord = dx.len().cmp(&dy.len()).then_with(|| dx.cmp(dy));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[lx..];
                y = &y[ly..];
            }
            (Some(c), Some(d)) => {
                if c != d {
                    return c.cmp(d);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let z = d.iter().take_while(|&&c| c == b'0').count();
    &d[z.min(d.len().saturating_sub(1))..]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stage {
    Backbone,
    Preview { rule: String },
    FsFinal,
    Combo { layer: usize, rules: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryInstance {
    pub id: String,
    pub stage: Stage,
    /// Parameter choice per applied structural rule.
    pub assignment: BTreeMap<String, ParamAssignment>,
    pub pattern: PatternGraph,
}

impl QueryInstance {
    pub fn is_concrete(&self) -> bool {
        !self.pattern.has_markers()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::CmpOp;

    #[test]
    fn natural_order() {
        let mut ids = vec!["C0#10#0", "C0#2#0", "C0#2#e1", "C0#2#1", "a", "C0#02#0"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, vec!["C0#02#0", "C0#2#0", "C0#2#1", "C0#2#e1", "C0#10#0", "a"]);
    }

    #[test]
    fn concretize_expands_marker_at_minimum() {
        let pred = Predicate::new("value", CmpOp::Gt, 1.0);
        let mut p = PatternGraph {
            nodes: vec![
                PNode {
                    id: "P#0#0".into(),
                    predicates: vec![],
                    origin: Origin::new("P", 0, "0"),
                },
                PNode {
                    id: "P#0#3".into(),
                    predicates: vec![],
                    origin: Origin::new("P", 0, "3"),
                },
            ],
            edges: vec![PEdge {
                id: "P#0#path".into(),
                source: "P#0#0".into(),
                target: "P#0#3".into(),
                directed: true,
                predicates: vec![],
                origin: Origin::new("P", 0, "path"),
                path_marker: Some(PathMarker {
                    min_nodes: 4,
                    node_predicates: vec![],
                    edge_predicates: vec![pred.clone()],
                }),
            }],
        };
        p.normalize();
        let c = p.concretize();
        let ids: Vec<&str> = c.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, vec!["P#0#0", "P#0#1", "P#0#2", "P#0#3"]);
        assert_eq!(c.edges.len(), 3);
        assert!(c.edges.iter().all(|e| e.predicates == vec![pred.clone()] && e.directed));
        assert_eq!(c.edges[2].target, "P#0#3");
        assert!(!c.has_markers());
    }
}
