use std::collections::{BTreeMap, HashMap, HashSet};

use super::InstantiateError;
use crate::motif::{self, MotifFragment, MotifKind};
use crate::pattern::{normalize_predicates, Origin, PEdge, PNode, PathMarker, PatternGraph};
use crate::query::{tree_shape_for, ChainMode, EntityKind, ParamAssignment, PathPort, Predicate, QueryRepresentation, Rule, RuleBody};

/// Builds the pattern for one plan: the structural rules present in `plan`
/// are applied with the given choice, all others are left out (motifs
/// without an applied configuration stay abstract).
///
/// Order: entities in declaration order (motifs expanded or abstracted),
/// attribute predicates, then repeating and chaining rules in rule order.
pub fn build_pattern(
    qr: &QueryRepresentation,
    directed: bool,
    plan: &BTreeMap<String, ParamAssignment>,
) -> Result<PatternGraph, InstantiateError> {
    let mut b = Builder {
        qr,
        directed,
        nodes: Vec::new(),
        edges: Vec::new(),
        next_copy: HashMap::new(),
        anchors: HashMap::new(),
    };
    for entity in &qr.entities {
        match &entity.kind {
            EntityKind::Node => {
                let id = b.add_node(Origin::new(&entity.id, 0, "0"), Vec::new());
                b.anchors.insert(entity.id.clone(), Anchor::single(id));
            }
            EntityKind::Motif { motif } => b.add_motif(&entity.id, *motif, plan)?,
            EntityKind::Edge {
                source,
                target,
                directed: edge_directed,
            } => {
                let s = b.anchors[&source.entity].port(source.port);
                let t = b.anchors[&target.entity].port(target.port);
                b.add_edge(
                    Origin::new(&entity.id, 0, "e0"),
                    s,
                    t,
                    directed && *edge_directed,
                    Vec::new(),
                    None,
                );
            }
            EntityKind::Custom { .. } => {}
        }
    }
    for rule in &qr.rules {
        match &rule.body {
            RuleBody::NodeAttr { predicate } => b.attach_node_predicate(&rule.target, predicate),
            RuleBody::EdgeAttr { predicate } => b.attach_edge_predicate(&rule.target, predicate),
            _ => {}
        }
    }
    for rule in &qr.rules {
        let Some(choice) = plan.get(&rule.id) else {
            continue;
        };
        match &rule.body {
            RuleBody::Repeating { .. } => b.repeat(rule, choice["count"] as usize),
            RuleBody::Chaining {
                start, end, mode, ..
            } => b.chain(rule, start, end, *mode, choice["iterations"] as usize)?,
            _ => {}
        }
    }
    let mut p = PatternGraph {
        nodes: b.nodes,
        edges: b.edges,
    };
    p.normalize();
    Ok(p)
}

struct Anchor {
    representative: String,
    head: String,
    tail: String,
}

impl Anchor {
    fn single(id: String) -> Self {
        Anchor {
            representative: id.clone(),
            head: id.clone(),
            tail: id,
        }
    }

    fn port(&self, port: Option<PathPort>) -> String {
        match port {
            None => self.representative.clone(),
            Some(PathPort::Head) => self.head.clone(),
            Some(PathPort::Tail) => self.tail.clone(),
        }
    }
}

struct Builder<'a> {
    qr: &'a QueryRepresentation,
    directed: bool,
    nodes: Vec<PNode>,
    edges: Vec<PEdge>,
    next_copy: HashMap<(String, String), usize>,
    anchors: HashMap<String, Anchor>,
}

impl Builder<'_> {
    fn claim(&mut self, origin: &Origin) {
        let slot = self
            .next_copy
            .entry((origin.entity.clone(), origin.local.clone()))
            .or_insert(0);
        *slot = (*slot).max(origin.copy + 1);
    }

    fn fresh_copy(&self, entity: &str, local: &str) -> usize {
        self.next_copy
            .get(&(entity.to_string(), local.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn add_node(&mut self, origin: Origin, predicates: Vec<Predicate>) -> String {
        self.claim(&origin);
        let id = origin.pid();
        self.nodes.push(PNode {
            id: id.clone(),
            predicates,
            origin,
        });
        id
    }

    fn add_edge(
        &mut self,
        origin: Origin,
        source: String,
        target: String,
        directed: bool,
        predicates: Vec<Predicate>,
        path_marker: Option<PathMarker>,
    ) -> String {
        self.claim(&origin);
        let id = origin.pid();
        self.edges.push(PEdge {
            id: id.clone(),
            source,
            target,
            directed,
            predicates,
            origin,
            path_marker,
        });
        id
    }

    fn add_motif(
        &mut self,
        id: &str,
        kind: MotifKind,
        plan: &BTreeMap<String, ParamAssignment>,
    ) -> Result<(), InstantiateError> {
        let config = self.qr.motif_config(id).ok_or_else(|| InstantiateError::MissingConfig(id.to_string()))?;
        let Some(choice) = plan.get(&config.id) else {
            return self.add_abstract_motif(id, kind, config);
        };
        let n = choice["nodes"] as usize;
        let frag: MotifFragment = match kind {
            MotifKind::Path => motif::path(n)?,
            MotifKind::Loop => motif::cycle(n)?,
            MotifKind::Clique => motif::clique(n, self.directed)?,
            MotifKind::Tree => tree_shape_for(choice)
                .ok_or_else(|| InstantiateError::MissingConfig(id.to_string()))?
                .fragment(),
        };
        let ids: Vec<String> = (0..frag.node_count)
            .map(|i| self.add_node(Origin::new(id, 0, i.to_string()), Vec::new()))
            .collect();
        for (j, &(s, t)) in frag.edges.iter().enumerate() {
            self.add_edge(
                Origin::new(id, 0, format!("e{j}")),
                ids[s].clone(),
                ids[t].clone(),
                self.directed,
                Vec::new(),
                None,
            );
        }
        self.anchors.insert(
            id.to_string(),
            Anchor {
                representative: ids[frag.representative].clone(),
                head: ids[frag.head].clone(),
                tail: ids[frag.tail].clone(),
            },
        );
        Ok(())
    }

    fn add_abstract_motif(&mut self, id: &str, kind: MotifKind, config: &Rule) -> Result<(), InstantiateError> {
        let RuleBody::MotifConfig { nodes, .. } = &config.body else {
            return Err(InstantiateError::MissingConfig(id.to_string()));
        };
        let head = self.add_node(Origin::new(id, 0, "0"), Vec::new());
        if kind != MotifKind::Path {
            self.anchors.insert(id.to_string(), Anchor::single(head));
            return Ok(());
        }
        let min = nodes.lo.max(2) as usize;
        let tail = self.add_node(Origin::new(id, 0, (min - 1).to_string()), Vec::new());
        self.add_edge(
            Origin::new(id, 0, "path"),
            head.clone(),
            tail.clone(),
            self.directed,
            Vec::new(),
            Some(PathMarker {
                min_nodes: min,
                node_predicates: Vec::new(),
                edge_predicates: Vec::new(),
            }),
        );
        self.anchors.insert(
            id.to_string(),
            Anchor {
                representative: head.clone(),
                head,
                tail,
            },
        );
        Ok(())
    }

    /// Entity ids whose materialised nodes belong to `target`.
    fn node_entities(&self, target: &str) -> HashSet<String> {
        match self.qr.entity(target).map(|e| &e.kind) {
            Some(EntityKind::Custom { members }) => members
                .iter()
                .filter(|m| {
                    matches!(
                        self.qr.entity(m).map(|e| &e.kind),
                        Some(EntityKind::Node | EntityKind::Motif { .. })
                    )
                })
                .cloned()
                .collect(),
            Some(EntityKind::Node | EntityKind::Motif { .. }) => HashSet::from([target.to_string()]),
            _ => HashSet::new(),
        }
    }

    /// Entity ids whose materialised edges belong to `target`.
    fn edge_entities(&self, target: &str) -> HashSet<String> {
        match self.qr.entity(target).map(|e| &e.kind) {
            Some(EntityKind::Custom { members }) => members
                .iter()
                .filter(|m| {
                    matches!(
                        self.qr.entity(m).map(|e| &e.kind),
                        Some(EntityKind::Edge { .. } | EntityKind::Motif { .. })
                    )
                })
                .cloned()
                .collect(),
            Some(EntityKind::Edge { .. } | EntityKind::Motif { .. }) => HashSet::from([target.to_string()]),
            _ => HashSet::new(),
        }
    }

    fn attach_node_predicate(&mut self, target: &str, pred: &Predicate) {
        let owners = self.node_entities(target);
        for n in &mut self.nodes {
            if owners.contains(&n.origin.entity) {
                n.predicates.push(pred.clone());
                normalize_predicates(&mut n.predicates);
            }
        }
        for e in &mut self.edges {
            if let Some(m) = &mut e.path_marker {
                if owners.contains(&e.origin.entity) {
                    m.node_predicates.push(pred.clone());
                    normalize_predicates(&mut m.node_predicates);
                }
            }
        }
    }

    fn attach_edge_predicate(&mut self, target: &str, pred: &Predicate) {
        let owners = self.edge_entities(target);
        for e in &mut self.edges {
            if !owners.contains(&e.origin.entity) {
                continue;
            }
            match &mut e.path_marker {
                Some(m) => {
                    m.edge_predicates.push(pred.clone());
                    normalize_predicates(&mut m.edge_predicates);
                }
                None => {
                    e.predicates.push(pred.clone());
                    normalize_predicates(&mut e.predicates);
                }
            }
        }
    }

    fn copy_origin(&self, o: &Origin, rule: &str, iteration: usize) -> Origin {
        let mut origin = o.clone();
        origin.copy = self.fresh_copy(&o.entity, &o.local);
        origin.lineage.push((rule.to_string(), iteration));
        origin
    }

    fn copy_node(&mut self, idx: usize, rule: &str, iteration: usize) -> String {
        let src = self.nodes[idx].clone();
        let origin = self.copy_origin(&src.origin, rule, iteration);
        self.add_node(origin, src.predicates)
    }

    fn copy_edge(&mut self, idx: usize, source: String, target: String, rule: &str, iteration: usize) {
        let src = self.edges[idx].clone();
        let origin = self.copy_origin(&src.origin, rule, iteration);
        self.add_edge(origin, source, target, src.directed, src.predicates, src.path_marker);
    }

    fn repeat(&mut self, rule: &Rule, k: usize) {
        let node_owners = self.node_entities(&rule.target);
        let edge_owners = self.edge_entities(&rule.target);
        let members: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| node_owners.contains(&self.nodes[i].origin.entity))
            .collect();
        let member_ids: HashSet<String> = members.iter().map(|&i| self.nodes[i].id.clone()).collect();
        let touched: Vec<usize> = (0..self.edges.len())
            .filter(|&i| {
                let e = &self.edges[i];
                member_ids.contains(&e.source)
                    || member_ids.contains(&e.target)
                    || edge_owners.contains(&e.origin.entity)
            })
            .collect();
        for iteration in 1..=k {
            let mut image: HashMap<String, String> = HashMap::new();
            for &i in &members {
                let old = self.nodes[i].id.clone();
                let new = self.copy_node(i, &rule.id, iteration);
                image.insert(old, new);
            }
            for &i in &touched {
                let e = &self.edges[i];
                let s = image.get(&e.source).cloned().unwrap_or_else(|| e.source.clone());
                let t = image.get(&e.target).cloned().unwrap_or_else(|| e.target.clone());
                self.copy_edge(i, s, t, &rule.id, iteration);
            }
        }
    }

    fn chain(&mut self, rule: &Rule, start: &str, end: &str, mode: ChainMode, k: usize) -> Result<(), InstantiateError> {
        let owners = self.node_entities(&rule.target);
        let members: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| owners.contains(&self.nodes[i].origin.entity))
            .collect();
        let resolve = |entity: &str| -> Result<String, InstantiateError> {
            let hits: Vec<&PNode> = members
                .iter()
                .map(|&i| &self.nodes[i])
                .filter(|n| n.origin.entity == entity)
                .collect();
            match hits.as_slice() {
                [one] => Ok(one.id.clone()),
                _ => Err(InstantiateError::AmbiguousChainEndpoint {
                    rule: rule.id.clone(),
                    node: entity.to_string(),
                    count: hits.len(),
                }),
            }
        };
        let start_id = resolve(start)?;
        let end_id = resolve(end)?;
        let member_ids: HashSet<String> = members.iter().map(|&i| self.nodes[i].id.clone()).collect();
        let internal: Vec<usize> = (0..self.edges.len())
            .filter(|&i| member_ids.contains(&self.edges[i].source) && member_ids.contains(&self.edges[i].target))
            .collect();
        let mut prev_end = end_id.clone();
        for iteration in 1..=k {
            let mut image: HashMap<String, String> = HashMap::new();
            for &i in &members {
                let old = self.nodes[i].id.clone();
                if mode == ChainMode::SharedNode && old == start_id {
                    let preds = self.nodes[i].predicates.clone();
                    if let Some(merged) = self.nodes.iter_mut().find(|n| n.id == prev_end) {
                        merged.predicates.extend(preds);
                        normalize_predicates(&mut merged.predicates);
                    }
                    image.insert(old, prev_end.clone());
                } else {
                    let new = self.copy_node(i, &rule.id, iteration);
                    image.insert(old, new);
                }
            }
            for &i in &internal {
                let e = &self.edges[i];
                let s = image[&e.source].clone();
                let t = image[&e.target].clone();
                self.copy_edge(i, s, t, &rule.id, iteration);
            }
            if mode == ChainMode::LinkedChain {
                let copy = self.fresh_copy(&rule.target, "link");
                let mut origin = Origin::new(&rule.target, copy, "link");
                origin.lineage.push((rule.id.clone(), iteration));
                self.add_edge(origin, prev_end.clone(), image[&start_id].clone(), self.directed, Vec::new(), None);
            }
            prev_end = image[&end_id].clone();
        }
        Ok(())
    }
}

/// Element ids of the pattern the `entity` materialised into, for tests
/// and callers that address entities in a built pattern.
pub fn elements_of<'p>(p: &'p PatternGraph, entity: &str) -> (Vec<&'p str>, Vec<&'p str>) {
    (
        p.nodes
            .iter()
            .filter(|n| n.origin.entity == entity)
            .map(|n| n.id.as_str())
            .collect(),
        p.edges
            .iter()
            .filter(|e| e.origin.entity == entity)
            .map(|e| e.id.as_str())
            .collect(),
    )
}
