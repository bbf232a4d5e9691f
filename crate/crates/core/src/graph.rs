//! In-memory multivariate property graph.
//!
//! Nodes and edges carry attribute maps; parallel edges between the same
//! pair are allowed and distinguished by edge id. A graph is immutable once
//! built, so it can be shared freely between concurrent match runs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest integer magnitude an `f64` represents exactly.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// Attribute value stored on nodes, edges and predicate literals.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Text(String),
    Number(f64),
    Bool(bool),
}

impl AttrValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            AttrValue::Number(n) => n.is_finite(),
            _ => true,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            AttrValue::Text(_) => "text",
            AttrValue::Number(_) => "number",
            AttrValue::Bool(_) => "boolean",
        }
    }
}

/// Shortest decimal text that round-trips through `f64`.
pub fn format_number(n: f64) -> String {
    if n == 0.0 {
        // normalises -0
        return "0".to_string();
    }
    format!("{n}")
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Text(s) => write!(f, "{s:?}"),
            AttrValue::Number(n) => f.write_str(&format_number(*n)),
            AttrValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Text(s.to_string())
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Text(s)
    }
}

impl From<f64> for AttrValue {
    fn from(n: f64) -> Self {
        AttrValue::Number(n)
    }
}

impl From<i64> for AttrValue {
    fn from(n: i64) -> Self {
        AttrValue::Number(n as f64)
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

impl Serialize for AttrValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AttrValue::Text(s) => serializer.serialize_str(s),
            AttrValue::Bool(b) => serializer.serialize_bool(*b),
            AttrValue::Number(n) => {
                if n.fract() == 0.0 && n.abs() <= EXACT_INT_LIMIT {
                    serializer.serialize_i64(*n as i64)
                } else {
                    serializer.serialize_f64(*n)
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for AttrValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Bool(bool),
            Number(f64),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Text(s) => AttrValue::Text(s),
            Raw::Bool(b) => AttrValue::Bool(b),
            Raw::Number(n) => {
                if !n.is_finite() {
                    return Err(serde::de::Error::custom("non-finite number"));
                }
                AttrValue::Number(n)
            }
        })
    }
}

pub type Attrs = BTreeMap<String, AttrValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    #[serde(default)]
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub attrs: Attrs,
}

impl Edge {
    /// Attribute lookup. The optional edge label is visible as `label`
    /// unless an explicit `label` attribute shadows it.
    pub fn attr(&self, name: &str) -> Option<AttrValue> {
        match self.attrs.get(name) {
            Some(v) => Some(v.clone()),
            None if name == "label" => self.label.clone().map(AttrValue::Text),
            None => None,
        }
    }
}

/// The on-disk graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub directed: bool,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("malformed graph document at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} references missing node {node:?}")]
    DanglingEndpoint { edge: String, node: String },
    #[error("{owner:?} attribute {attr:?} is not a finite number")]
    NonFinite { owner: String, attr: String },
}

/// Per-node degree counts. Undirected graphs report `in = out = total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Degree {
    pub in_degree: usize,
    pub out_degree: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct PropertyGraph {
    directed: bool,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    // (neighbour, edge) lists; for undirected graphs both lists hold every
    // incident edge
    out_adj: Vec<Vec<(usize, usize)>>,
    in_adj: Vec<Vec<(usize, usize)>>,
    pair_edges: HashMap<(usize, usize), Vec<usize>>,
}

impl PropertyGraph {
    pub fn new(directed: bool, nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
            check_finite(&n.id, &n.attrs)?;
        }
        let mut seen_edges = HashSet::with_capacity(edges.len());
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        let mut pair_edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if !seen_edges.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            check_finite(&e.id, &e.attrs)?;
            let resolve = |id: &str| {
                node_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::DanglingEndpoint {
                        edge: e.id.clone(),
                        node: id.to_string(),
                    })
            };
            let s = resolve(&e.source)?;
            let t = resolve(&e.target)?;
            endpoints.push((s, t));
            if directed {
                out_adj[s].push((t, i));
                in_adj[t].push((s, i));
            } else {
                out_adj[s].push((t, i));
                in_adj[s].push((t, i));
                if s != t {
                    out_adj[t].push((s, i));
                    in_adj[t].push((s, i));
                }
            }
            pair_edges.entry(pair_key(directed, s, t)).or_default().push(i);
        }
        Ok(PropertyGraph {
            directed,
            nodes,
            edges,
            node_index,
            endpoints,
            out_adj,
            in_adj,
            pair_edges,
        })
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        Self::new(doc.directed, doc.nodes, doc.edges)
    }

    /// Parses and validates a JSON graph document.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| GraphError::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            directed: self.directed,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph documents always serialize")
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn node_idx(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.endpoints[edge]
    }

    /// Outgoing `(neighbour, edge)` pairs; every incident edge when undirected.
    pub fn out_adj(&self, node: usize) -> &[(usize, usize)] {
        &self.out_adj[node]
    }

    /// Incoming `(neighbour, edge)` pairs; every incident edge when undirected.
    pub fn in_adj(&self, node: usize) -> &[(usize, usize)] {
        &self.in_adj[node]
    }

    /// Edges from `a` to `b` (any orientation when undirected).
    pub fn edges_between(&self, a: usize, b: usize) -> &[usize] {
        self.pair_edges
            .get(&pair_key(self.directed, a, b))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn degree(&self, node: usize) -> Degree {
        if self.directed {
            let out_degree = self.out_adj[node].len();
            let in_degree = self.in_adj[node].len();
            Degree {
                in_degree,
                out_degree,
                total: in_degree + out_degree,
            }
        } else {
            let d: usize = self.out_adj[node]
                .iter()
                .map(|&(nbr, _)| if nbr == node { 2 } else { 1 })
                .sum();
            Degree {
                in_degree: d,
                out_degree: d,
                total: d,
            }
        }
    }

    pub fn degree_index(&self) -> BTreeMap<String, Degree> {
        (0..self.nodes.len())
            .map(|i| (self.nodes[i].id.clone(), self.degree(i)))
            .collect()
    }
}

fn pair_key(directed: bool, a: usize, b: usize) -> (usize, usize) {
    if directed || a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_finite(owner: &str, attrs: &Attrs) -> Result<(), GraphError> {
    for (k, v) in attrs {
        if !v.is_finite() {
            return Err(GraphError::NonFinite {
                owner: owner.to_string(),
                attr: k.clone(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str) -> Node {
        Node {
            id: id.into(),
            attrs: Attrs::new(),
        }
    }

    fn edge(id: &str, s: &str, t: &str) -> Edge {
        Edge {
            id: id.into(),
            source: s.into(),
            target: t.into(),
            label: None,
            attrs: Attrs::new(),
        }
    }

    #[test]
    fn empty_document_loads() {
        let g = PropertyGraph::from_json(r#"{"directed": true, "nodes": [], "edges": []}"#).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
        assert!(g.degree_index().is_empty());
    }

    #[test]
    fn dangling_endpoint_names_the_node() {
        let err = PropertyGraph::new(false, vec![node("a")], vec![edge("e", "a", "x9")]).unwrap_err();
        assert_eq!(
            err,
            GraphError::DanglingEndpoint {
                edge: "e".into(),
                node: "x9".into()
            }
        );
        assert!(err.to_string().contains("x9"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = PropertyGraph::new(false, vec![node("a"), node("a")], vec![]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateNode("a".into()));
        let err = PropertyGraph::new(
            false,
            vec![node("a"), node("b")],
            vec![edge("e", "a", "b"), edge("e", "b", "a")],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge("e".into()));
    }

    #[test]
    fn non_finite_rejected() {
        let mut n = node("a");
        n.attrs.insert("w".into(), AttrValue::Number(f64::NAN));
        let err = PropertyGraph::new(false, vec![n], vec![]).unwrap_err();
        assert!(matches!(err, GraphError::NonFinite { .. }));
        let err = PropertyGraph::from_json(
            r#"{"directed": true, "nodes": [{"id": "a", "attrs": {"w": 1e999}}], "edges": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::Malformed { .. }));
    }

    #[test]
    fn malformed_reports_position_and_unknown_keys() {
        let err = PropertyGraph::from_json("{\n \"directed\": true,\n \"nodes\": [,]}").unwrap_err();
        match err {
            GraphError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = PropertyGraph::from_json(r#"{"directed": true, "nodes": [], "edges": [], "extra": 1}"#)
            .unwrap_err();
        assert!(matches!(err, GraphError::Malformed { .. }));
    }

    #[test]
    fn degrees() {
        let g = PropertyGraph::new(false, vec![node("a")], vec![]).unwrap();
        assert_eq!(g.degree_index()["a"], Degree::default());

        let g = PropertyGraph::new(true, vec![node("a"), node("b")], vec![edge("e", "a", "b")]).unwrap();
        let d = g.degree_index();
        assert_eq!(
            d["a"],
            Degree {
                in_degree: 0,
                out_degree: 1,
                total: 1
            }
        );
        assert_eq!(
            d["b"],
            Degree {
                in_degree: 1,
                out_degree: 0,
                total: 1
            }
        );
    }

    #[test]
    fn undirected_pairs_are_unordered() {
        let g = PropertyGraph::new(
            false,
            vec![node("a"), node("b")],
            vec![edge("e0", "a", "b"), edge("e1", "b", "a")],
        )
        .unwrap();
        assert_eq!(g.edges_between(0, 1), &[0, 1]);
        assert_eq!(g.edges_between(1, 0), &[0, 1]);
        assert_eq!(g.degree(0).total, 2);
    }

    #[test]
    fn self_loop_counts_twice() {
        let g = PropertyGraph::new(false, vec![node("a")], vec![edge("e", "a", "a")]).unwrap();
        assert_eq!(g.degree(0).total, 2);
        let g = PropertyGraph::new(true, vec![node("a")], vec![edge("e", "a", "a")]).unwrap();
        assert_eq!(g.degree(0).total, 2);
    }

    #[test]
    fn integral_numbers_serialize_without_fraction() {
        let mut n = node("a");
        n.attrs.insert("v".into(), AttrValue::Number(3.0));
        n.attrs.insert("w".into(), AttrValue::Number(0.5));
        let g = PropertyGraph::new(false, vec![n], vec![]).unwrap();
        let text = g.to_json();
        assert!(text.contains("\"v\": 3"));
        assert!(text.contains("\"w\": 0.5"));
    }

    #[test]
    fn edge_label_visible_as_attribute() {
        let mut e = edge("e", "a", "b");
        e.label = Some("calls".into());
        assert_eq!(e.attr("label"), Some(AttrValue::Text("calls".into())));
        e.attrs.insert("label".into(), AttrValue::Bool(true));
        assert_eq!(e.attr("label"), Some(AttrValue::Bool(true)));
    }
}
