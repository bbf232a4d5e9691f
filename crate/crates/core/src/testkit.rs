//! Seeded generators for representations, graphs and patterns, plus the
//! reference queries used by the bundled fixtures. Shared by the unit
//! tests, the acceptance suite and the fixture generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{AttrValue, Attrs, Edge, Node, PropertyGraph};
use crate::pattern::{PEdge, PNode, Origin, PatternGraph};
use crate::query::{
    validate, ChainMode, CmpOp, EndpointRef, Entity, EntityKind, IntRange, MotifKind, PathPort, Predicate,
    QueryRepresentation, Rule, RuleBody,
};

/// Valjean connected to a 5-clique repeated 0..3 times, optionally with
/// `value > threshold` on every clique edge.
pub fn case2_query(edge_value_gt: Option<f64>) -> QueryRepresentation {
    let mut qr = QueryRepresentation::new("valjean-communities");
    qr.entities.push(Entity::node("n0"));
    qr.entities.push(Entity::motif("C0", MotifKind::Clique));
    qr.entities.push(Entity::edge(
        "e0",
        EndpointRef::entity("n0"),
        EndpointRef::entity("C0"),
        false,
    ));
    let mut push = |target: &str, body: RuleBody| {
        let id = format!("r{}", qr.rules.len());
        qr.rules.push(Rule {
            id,
            target: target.into(),
            body,
        });
    };
    push(
        "C0",
        RuleBody::MotifConfig {
            nodes: IntRange::fixed(5),
            width: None,
            depth: None,
        },
    );
    push(
        "n0",
        RuleBody::NodeAttr {
            predicate: Predicate::new("name", CmpOp::Eq, "Valjean"),
        },
    );
    push(
        "C0",
        RuleBody::Repeating {
            count: IntRange::new(0, 3),
        },
    );
    if let Some(t) = edge_value_gt {
        push(
            "C0",
            RuleBody::EdgeAttr {
                predicate: Predicate::new("value", CmpOp::Gt, t),
            },
        );
    }
    qr
}

const ODD_IDS: &[&str] = &["Node 0", "tail", "x-y", "é", "with \"quote\"", "a\\b", "9lives", "rule"];
const ATTRS: &[&str] = &["name", "value", "label", "weight", "my attr"];

fn pick_id<R: Rng>(rng: &mut R, prefix: &str, i: usize, used: &mut Vec<String>) -> String {
    let id = if rng.gen_bool(0.15) {
        let base = ODD_IDS.choose(rng).unwrap();
        format!("{base}{i}")
    } else {
        format!("{prefix}{i}")
    };
    used.push(id.clone());
    id
}

fn random_literal<R: Rng>(rng: &mut R, numeric: bool) -> AttrValue {
    if numeric {
        return match rng.gen_range(0..4) {
            0 => AttrValue::Number(rng.gen_range(-50..50) as f64),
            1 => AttrValue::Number(rng.gen_range(-1000..1000) as f64 / 8.0),
            2 => AttrValue::Number(0.1 * rng.gen_range(1..30) as f64),
            _ => AttrValue::Number(rng.gen::<f64>() * 1e6),
        };
    }
    match rng.gen_range(0..4) {
        0 => AttrValue::Bool(rng.gen()),
        1 => AttrValue::Text(["heist", "Valjean", "a \"b\"", "back\\slash", "", "ünï"].choose(rng).unwrap().to_string()),
        _ => random_literal(rng, true),
    }
}

fn random_predicate<R: Rng>(rng: &mut R) -> Predicate {
    let op = *CmpOp::ALL.choose(rng).unwrap();
    Predicate {
        attr: ATTRS.choose(rng).unwrap().to_string(),
        op,
        literal: random_literal(rng, op.is_ordering()),
    }
}

fn random_range<R: Rng>(rng: &mut R, min: i64) -> IntRange {
    let lo = min + rng.gen_range(0..3);
    let hi = lo + rng.gen_range(0..3);
    IntRange::new(lo, hi)
}

/// A random representation that passes validation.
pub fn random_query<R: Rng>(rng: &mut R) -> QueryRepresentation {
    loop {
        let qr = random_query_candidate(rng);
        if validate(&qr).iter().all(|d| !d.is_error()) {
            return qr;
        }
    }
}

fn random_query_candidate<R: Rng>(rng: &mut R) -> QueryRepresentation {
    let mut qr = QueryRepresentation::new(["q", "case 2", "ünicode", "quo\"te"].choose(rng).unwrap().to_string());
    let mut ids = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    let n_entities = rng.gen_range(0..9);
    for i in 0..n_entities {
        let attachable: Vec<&Entity> = qr
            .entities
            .iter()
            .filter(|e| matches!(e.kind, EntityKind::Node | EntityKind::Motif { .. }))
            .collect();
        let choice = rng.gen_range(0..10);
        let entity = if choice < 4 || attachable.is_empty() {
            Entity::node(pick_id(rng, "n", i, &mut ids))
        } else if choice < 6 {
            let kind = *[MotifKind::Path, MotifKind::Loop, MotifKind::Tree, MotifKind::Clique]
                .choose(rng)
                .unwrap();
            let id = pick_id(rng, "M", i, &mut ids);
            let nodes = random_range(rng, kind.min_nodes());
            let (width, depth) = if kind == MotifKind::Tree {
                (
                    rng.gen_bool(0.3).then(|| IntRange::new(1, rng.gen_range(2..4))),
                    rng.gen_bool(0.3).then(|| IntRange::new(1, rng.gen_range(2..4))),
                )
            } else {
                (None, None)
            };
            rules.push(Rule {
                id: String::new(),
                target: id.clone(),
                body: RuleBody::MotifConfig { nodes, width, depth },
            });
            Entity::motif(id, kind)
        } else if choice < 9 {
            let mut end = || {
                let e = attachable.choose(rng).unwrap();
                match e.kind {
                    EntityKind::Motif { motif: MotifKind::Path } => EndpointRef::port(
                        e.id.clone(),
                        if rng.gen() { PathPort::Head } else { PathPort::Tail },
                    ),
                    _ => EndpointRef::entity(e.id.clone()),
                }
            };
            let (s, t) = (end(), end());
            Entity::edge(pick_id(rng, "e", i, &mut ids), s, t, rng.gen())
        } else {
            let pool: Vec<String> = qr
                .entities
                .iter()
                .filter(|e| !matches!(e.kind, EntityKind::Custom { .. }))
                .map(|e| e.id.clone())
                .collect();
            let k = rng.gen_range(1..=pool.len().min(4));
            let members: Vec<String> = pool.choose_multiple(rng, k).cloned().collect();
            Entity::custom(pick_id(rng, "G", i, &mut ids), members)
        };
        qr.entities.push(entity);
    }
    // extra rules on random targets
    let n_rules = if qr.entities.is_empty() { 0 } else { rng.gen_range(0..6) };
    let mut grown = std::collections::HashSet::new();
    for _ in 0..n_rules {
        let target = qr.entities.choose(rng).unwrap().clone();
        let body = match (rng.gen_range(0..4), &target.kind) {
            (0, EntityKind::Edge { .. }) | (1, EntityKind::Edge { .. }) => RuleBody::EdgeAttr {
                predicate: random_predicate(rng),
            },
            (0, _) => RuleBody::NodeAttr {
                predicate: random_predicate(rng),
            },
            (1, EntityKind::Node) => RuleBody::NodeAttr {
                predicate: random_predicate(rng),
            },
            (1, _) => RuleBody::EdgeAttr {
                predicate: random_predicate(rng),
            },
            (2, _) if grown.insert(target.id.clone()) => RuleBody::Repeating {
                count: random_range(rng, 0),
            },
            (3, EntityKind::Node) if grown.insert(target.id.clone()) => RuleBody::Chaining {
                start: target.id.clone(),
                end: target.id.clone(),
                iterations: random_range(rng, 0),
                mode: ChainMode::LinkedChain,
            },
            (3, EntityKind::Custom { members }) => {
                let nodes: Vec<&String> = members
                    .iter()
                    .filter(|m| matches!(qr.entity(m).map(|e| &e.kind), Some(EntityKind::Node)))
                    .collect();
                if nodes.is_empty() || !grown.insert(target.id.clone()) {
                    continue;
                }
                let start = (*nodes.choose(rng).unwrap()).clone();
                let end = (*nodes.choose(rng).unwrap()).clone();
                let mode = if start != end && rng.gen() {
                    ChainMode::SharedNode
                } else {
                    ChainMode::LinkedChain
                };
                RuleBody::Chaining {
                    start,
                    end,
                    iterations: random_range(rng, 0),
                    mode,
                }
            }
            _ => continue,
        };
        let pos = rng.gen_range(0..=rules.len());
        rules.insert(
            pos,
            Rule {
                id: String::new(),
                target: target.id.clone(),
                body,
            },
        );
    }
    for (i, r) in rules.iter_mut().enumerate() {
        r.id = if rng.gen_bool(0.2) {
            format!("{}{i}", ["custom", "Rule ", "as", "r9"].choose(rng).unwrap())
        } else {
            format!("r{i}")
        };
    }
    qr.rules = rules;
    qr
}

/// Random graph over `n` nodes with attributes `label` (a..c) and
/// `value` (0..5) drawn from small domains so predicates bite.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, edge_prob: f64, directed: bool, parallel_prob: f64) -> PropertyGraph {
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            let mut attrs = Attrs::new();
            attrs.insert("label".into(), AttrValue::Text(["a", "b", "c"].choose(rng).unwrap().to_string()));
            if rng.gen_bool(0.8) {
                attrs.insert("value".into(), AttrValue::Number(rng.gen_range(0..5) as f64));
            }
            Node {
                id: format!("v{i}"),
                attrs,
            }
        })
        .collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t || (!directed && t < s) {
                continue;
            }
            if rng.gen_bool(edge_prob) {
                let copies = if rng.gen_bool(parallel_prob) { 2 } else { 1 };
                for _ in 0..copies {
                    let mut attrs = Attrs::new();
                    attrs.insert("value".into(), AttrValue::Number(rng.gen_range(0..5) as f64));
                    let (a, b) = if !directed && rng.gen() { (t, s) } else { (s, t) };
                    edges.push(Edge {
                        id: format!("x{}", edges.len()),
                        source: format!("v{a}"),
                        target: format!("v{b}"),
                        label: None,
                        attrs,
                    });
                }
            }
        }
    }
    PropertyGraph::new(directed, nodes, edges).expect("generated graphs are valid")
}

fn random_pattern_predicate<R: Rng>(rng: &mut R, node: bool) -> Predicate {
    if node && rng.gen() {
        let op = if rng.gen_bool(0.7) { CmpOp::Eq } else { CmpOp::Ne };
        Predicate::new("label", op, ["a", "b", "c"].choose(rng).unwrap().to_string())
    } else {
        let op = *CmpOp::ALL.choose(rng).unwrap();
        Predicate::new("value", op, rng.gen_range(0..5) as f64)
    }
}

/// Random pattern with up to `max_nodes` nodes; edges may be parallel.
pub fn random_pattern<R: Rng>(rng: &mut R, max_nodes: usize, directed: bool) -> PatternGraph {
    let n = rng.gen_range(1..=max_nodes);
    let mut p = PatternGraph::default();
    for i in 0..n {
        let mut predicates = Vec::new();
        if rng.gen_bool(0.3) {
            predicates.push(random_pattern_predicate(rng, true));
        }
        p.nodes.push(PNode {
            id: format!("p{i}"),
            predicates,
            origin: Origin::root(format!("p{i}"), 0),
        });
    }
    let m = rng.gen_range(0..=n + 1);
    for i in 0..m {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s == t {
            continue;
        }
        let mut predicates = Vec::new();
        if rng.gen_bool(0.25) {
            predicates.push(random_pattern_predicate(rng, false));
        }
        p.edges.push(PEdge {
            id: format!("q{i}"),
            source: format!("p{s}"),
            target: format!("p{t}"),
            directed,
            predicates,
            origin: Origin::root(format!("q{i}"), 0),
            path_marker: None,
        });
    }
    p
}
