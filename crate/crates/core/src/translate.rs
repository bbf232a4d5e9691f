//! Cypher text for concrete query instances.
//!
//! ```text
//! MATCH (n0)-[e0]->(n1), (n2)
//! WHERE n0.label = "heist" AND e0.value > 100 AND n0 <> n1 AND n0 <> n2 AND n1 <> n2
//! RETURN DISTINCT n0, n1, n2
//! LIMIT 10
//! ```
//!
//! Nodes are named `n<k>` and edges `e<k>` by their position in natural id
//! order. Node distinctness is spelled out because the matcher is
//! node-injective while Cypher only keeps relationships distinct; parallel
//! edges get explicit distinctness terms too.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::dsl::quote;
use crate::graph::{format_number, AttrValue};
use crate::pattern::{natural_cmp, PatternGraph, QueryInstance};
use crate::query::{CmpOp, Predicate};

#[derive(Debug, Error, PartialEq)]
pub enum TranslateError {
    #[error("instance {0} still contains abstract path motifs; execute or translate a concrete instance")]
    NotConcrete(String),
    #[error("instance {0} has an empty pattern")]
    Empty(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslatedQuery {
    pub text: String,
    pub var_map: BTreeMap<String, String>,
}

pub fn translate(instance: &QueryInstance, limit: Option<usize>) -> Result<TranslatedQuery, TranslateError> {
    if !instance.is_concrete() {
        return Err(TranslateError::NotConcrete(instance.id.clone()));
    }
    if instance.pattern.is_empty() {
        return Err(TranslateError::Empty(instance.id.clone()));
    }
    Ok(translate_pattern(&instance.pattern, limit))
}

/// Translation of a concrete, non-empty pattern.
pub fn translate_pattern(p: &PatternGraph, limit: Option<usize>) -> TranslatedQuery {
    let mut nodes: Vec<usize> = (0..p.nodes.len()).collect();
    nodes.sort_by(|&a, &b| natural_cmp(&p.nodes[a].id, &p.nodes[b].id));
    let mut edges: Vec<usize> = (0..p.edges.len()).collect();
    edges.sort_by(|&a, &b| natural_cmp(&p.edges[a].id, &p.edges[b].id));

    let mut var: HashMap<&str, String> = HashMap::new();
    let mut var_map = BTreeMap::new();
    for (k, &i) in nodes.iter().enumerate() {
        let v = format!("n{k}");
        var.insert(p.nodes[i].id.as_str(), v.clone());
        var_map.insert(p.nodes[i].id.clone(), v);
    }
    for (k, &i) in edges.iter().enumerate() {
        let v = format!("e{k}");
        var.insert(p.edges[i].id.as_str(), v.clone());
        var_map.insert(p.edges[i].id.clone(), v);
    }

    let mut patterns = Vec::new();
    let mut touched = std::collections::HashSet::new();
    for &i in &edges {
        let e = &p.edges[i];
        touched.insert(e.source.as_str());
        touched.insert(e.target.as_str());
        let arrow = if e.directed { "->" } else { "-" };
        patterns.push(format!("({})-[{}]{arrow}({})", var[e.source.as_str()], var[e.id.as_str()], var[e.target.as_str()]));
    }
    for &i in &nodes {
        let n = &p.nodes[i];
        if !touched.contains(n.id.as_str()) {
            patterns.push(format!("({})", var[n.id.as_str()]));
        }
    }

    let mut owned: Vec<(&str, &Predicate)> = Vec::new();
    for n in &p.nodes {
        owned.extend(n.predicates.iter().map(|pr| (n.id.as_str(), pr)));
    }
    for e in &p.edges {
        owned.extend(e.predicates.iter().map(|pr| (e.id.as_str(), pr)));
    }
    owned.sort_by(|a, b| {
        natural_cmp(a.0, b.0)
            .then_with(|| a.1.attr.cmp(&b.1.attr))
            .then_with(|| a.1.op.cmp(&b.1.op))
            .then_with(|| a.1.cmp(b.1))
    });
    let mut terms: Vec<String> = owned
        .iter()
        .map(|(id, pr)| {
            format!(
                "{}.{} {} {}",
                var[id],
                property(&pr.attr),
                operator(pr.op),
                cypher_literal(&pr.literal)
            )
        })
        .collect();
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            terms.push(format!("{} <> {}", var[p.nodes[i].id.as_str()], var[p.nodes[j].id.as_str()]));
        }
    }
    let ends = |i: usize| {
        let e = &p.edges[i];
        let (s, t) = (e.source.as_str(), e.target.as_str());
        if natural_cmp(s, t).is_le() {
            (s, t)
        } else {
            (t, s)
        }
    };
    for (a, &i) in edges.iter().enumerate() {
        for &j in &edges[a + 1..] {
            if ends(i) == ends(j) {
                terms.push(format!("{} <> {}", var[p.edges[i].id.as_str()], var[p.edges[j].id.as_str()]));
            }
        }
    }

    let mut lines = vec![format!("MATCH {}", patterns.join(", "))];
    if !terms.is_empty() {
        lines.push(format!("WHERE {}", terms.join(" AND ")));
    }
    let returned: Vec<&str> = nodes.iter().map(|&i| var[p.nodes[i].id.as_str()].as_str()).collect();
    lines.push(format!("RETURN DISTINCT {}", returned.join(", ")));
    if let Some(n) = limit {
        lines.push(format!("LIMIT {n}"));
    }
    TranslatedQuery {
        text: lines.join("\n"),
        var_map,
    }
}

fn operator(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "=",
        CmpOp::Ne => "<>",
        other => other.symbol(),
    }
}

fn property(name: &str) -> String {
    let mut chars = name.chars();
    let plain = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    };
    if plain {
        name.to_string()
    } else {
        format!("`{}`", name.replace('`', "``"))
    }
}

fn cypher_literal(v: &AttrValue) -> String {
    match v {
        AttrValue::Text(s) => quote(s),
        AttrValue::Number(n) => format_number(*n),
        AttrValue::Bool(b) => b.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{Origin, PEdge, PNode, Stage};

    fn inst(p: PatternGraph) -> QueryInstance {
        QueryInstance {
            id: "x".into(),
            stage: Stage::FsFinal,
            assignment: Default::default(),
            pattern: p,
        }
    }

    fn node(id: &str, preds: Vec<Predicate>) -> PNode {
        PNode {
            id: id.into(),
            predicates: preds,
            origin: Origin::root(id, 0),
        }
    }

    #[test]
    fn single_node_with_label() {
        let p = PatternGraph {
            nodes: vec![node("n0#0#0", vec![Predicate::new("label", CmpOp::Eq, "heist")])],
            edges: vec![],
        };
        let t = translate(&inst(p), None).unwrap();
        assert_eq!(t.text, "MATCH (n0)\nWHERE n0.label = \"heist\"\nRETURN DISTINCT n0");
    }

    #[test]
    fn directed_edge_gets_distinctness() {
        let p = PatternGraph {
            nodes: vec![node("a", vec![]), node("b", vec![])],
            edges: vec![PEdge {
                id: "e".into(),
                source: "a".into(),
                target: "b".into(),
                directed: true,
                predicates: vec![Predicate::new("value", CmpOp::Gt, 100i64)],
                origin: Origin::root("e", 0),
                path_marker: None,
            }],
        };
        let t = translate(&inst(p), Some(5)).unwrap();
        assert_eq!(
            t.text,
            "MATCH (n0)-[e0]->(n1)\nWHERE e0.value > 100 AND n0 <> n1\nRETURN DISTINCT n0, n1\nLIMIT 5"
        );
    }

    #[test]
    fn empty_and_abstract_instances_are_rejected() {
        assert!(matches!(translate(&inst(PatternGraph::default()), None), Err(TranslateError::Empty(_))));
    }

    #[test]
    fn odd_attribute_names_are_backticked() {
        assert_eq!(property("my attr"), "`my attr`");
        assert_eq!(property("value"), "value");
    }
}
