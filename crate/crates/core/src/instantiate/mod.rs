//! From a query representation to the instantiation lattice.
//!
//! The lattice holds the backbone (no structural rule applied), one preview
//! per fully specified rule, the fully specified instance, and for `n`
//! underspecified rules the layers `1..=n`: layer `k` has one cell per
//! `k`-subset of those rules, each cell enumerating the product of its
//! rules' choices while every other underspecified rule sits at its first
//! (minimum) choice. Witnesses are verified pattern embeddings between
//! instances; execution uses them to prune.

mod build;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{has_errors, Diagnostic};
use crate::matcher::{embed_pattern, verify_embedding};
use crate::motif::MotifError;
use crate::pattern::{PatternGraph, QueryInstance, Stage};
use crate::query::{choices, classify_rules, validate, EntityKind, ParamAssignment, QueryRepresentation, RuleBody};

pub use build::{build_pattern, elements_of};

pub const DEFAULT_MAX_INSTANCES: usize = 10_000;
pub const DEFAULT_MAX_PATTERN_NODES: usize = 500;

#[derive(Debug, Error)]
pub enum InstantiateError {
    #[error("query has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error("motif {0} has no usable configuration")]
    MissingConfig(String),
    #[error(transparent)]
    Motif(#[from] MotifError),
    #[error("rule {rule}: chain endpoint {node} resolves to {count} pattern nodes, expected exactly one")]
    AmbiguousChainEndpoint { rule: String, node: String, count: usize },
    #[error("cell {cell} brings the lattice to {count} instances, above the cap of {cap}")]
    TooManyInstances { cell: String, count: usize, cap: usize },
    #[error("instance {instance} has {nodes} pattern nodes, above the cap of {cap}")]
    PatternTooLarge { instance: String, nodes: usize, cap: usize },
}

impl InstantiateError {
    /// Whether the failure is a size cap rather than a malformed query.
    pub fn is_size_error(&self) -> bool {
        matches!(
            self,
            InstantiateError::TooManyInstances { .. } | InstantiateError::PatternTooLarge { .. }
        )
    }
}

#[derive(Debug, Clone)]
pub struct LatticeOptions {
    /// Graph mode; inferred from the query's edges when absent.
    pub directed: Option<bool>,
    pub max_instances: usize,
    pub max_pattern_nodes: usize,
    /// Search steps allowed per witness candidate before giving up on it.
    pub witness_budget: u64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            directed: None,
            max_instances: DEFAULT_MAX_INSTANCES,
            max_pattern_nodes: DEFAULT_MAX_PATTERN_NODES,
            witness_budget: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboCell {
    pub id: String,
    pub layer: usize,
    pub rules: Vec<String>,
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub from: String,
    pub to: String,
}

/// Certified embedding of `from`'s pattern into `to`'s (both with path
/// markers expanded at their minimum).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub from: String,
    pub to: String,
    pub node_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantiationLattice {
    pub name: String,
    pub directed: bool,
    pub fully_specified: Vec<String>,
    pub underspecified: Vec<String>,
    pub backbone: String,
    pub previews: Vec<String>,
    pub fs_final: String,
    pub layers: Vec<Vec<ComboCell>>,
    pub flows: Vec<Flow>,
    pub witnesses: Vec<Witness>,
    pub instances: Vec<QueryInstance>,
}

/// Sizes and ids only, for listings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub name: String,
    pub directed: bool,
    pub fully_specified: Vec<String>,
    pub underspecified: Vec<String>,
    pub instance_count: usize,
    pub layer_sizes: Vec<usize>,
    pub cells: Vec<CellSummary>,
    pub final_instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub id: String,
    pub layer: usize,
    pub rules: Vec<String>,
    pub instances: usize,
}

impl InstantiationLattice {
    pub fn instance(&self, id: &str) -> Option<&QueryInstance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn cell(&self, id: &str) -> Option<&ComboCell> {
        self.layers.iter().flatten().find(|c| c.id == id)
    }

    pub fn cell_by_rules(&self, rules: &[String]) -> Option<&ComboCell> {
        let mut want = rules.to_vec();
        want.sort();
        self.layers.iter().flatten().find(|c| {
            let mut have = c.rules.clone();
            have.sort();
            have == want
        })
    }

    /// Instances of the last layer, or the fully specified instance when
    /// there are no underspecified rules.
    pub fn final_instances(&self) -> Vec<String> {
        match self.layers.last().and_then(|l| l.first()) {
            Some(cell) => cell.instances.clone(),
            None => vec![self.fs_final.clone()],
        }
    }

    pub fn summary(&self) -> LatticeSummary {
        LatticeSummary {
            name: self.name.clone(),
            directed: self.directed,
            fully_specified: self.fully_specified.clone(),
            underspecified: self.underspecified.clone(),
            instance_count: self.instances.len(),
            layer_sizes: self.layers.iter().map(Vec::len).collect(),
            cells: self
                .layers
                .iter()
                .flatten()
                .map(|c| CellSummary {
                    id: c.id.clone(),
                    layer: c.layer,
                    rules: c.rules.clone(),
                    instances: c.instances.len(),
                })
                .collect(),
            final_instances: self.final_instances(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattices always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Directed iff the query declares at least one edge and every declared
/// edge is directed.
pub fn infer_directed(qr: &QueryRepresentation) -> bool {
    let mut any = false;
    for e in &qr.entities {
        if let EntityKind::Edge { directed, .. } = e.kind {
            if !directed {
                return false;
            }
            any = true;
        }
    }
    any
}

/// The backbone instance alone.
pub fn build_backbone(qr: &QueryRepresentation, directed: bool) -> Result<QueryInstance, InstantiateError> {
    Ok(QueryInstance {
        id: "backbone".into(),
        stage: Stage::Backbone,
        assignment: BTreeMap::new(),
        pattern: build_pattern(qr, directed, &BTreeMap::new())?,
    })
}

/// Previews (backbone plus one fully specified rule each) and the fully
/// specified instance.
pub fn instantiate_fully_specified(
    qr: &QueryRepresentation,
    directed: bool,
) -> Result<(Vec<QueryInstance>, QueryInstance), InstantiateError> {
    let (fully, _) = classify_rules(qr);
    let mut all = BTreeMap::new();
    let mut previews = Vec::new();
    for rid in &fully {
        let rule = qr.rule(rid).expect("classified rules exist");
        let choice = choices(qr, rule).swap_remove(0);
        let plan = BTreeMap::from([(rid.clone(), choice.clone())]);
        previews.push(QueryInstance {
            id: format!("preview:{rid}"),
            stage: Stage::Preview { rule: rid.clone() },
            pattern: build_pattern(qr, directed, &plan)?,
            assignment: plan,
        });
        all.insert(rid.clone(), choice);
    }
    let fs_final = QueryInstance {
        id: "fs-final".into(),
        stage: Stage::FsFinal,
        pattern: build_pattern(qr, directed, &all)?,
        assignment: all,
    };
    Ok((previews, fs_final))
}

/// Every `k`-subset of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Mixed-radix enumeration, first position most significant.
fn product(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn build_lattice(qr: &QueryRepresentation, opts: &LatticeOptions) -> Result<InstantiationLattice, InstantiateError> {
    let diags = validate(qr);
    if has_errors(&diags) {
        return Err(InstantiateError::Invalid(diags));
    }
    let directed = opts.directed.unwrap_or_else(|| infer_directed(qr));
    let (fully, under) = classify_rules(qr);
    let under_choices: Vec<Vec<ParamAssignment>> = under
        .iter()
        .map(|rid| choices(qr, qr.rule(rid).expect("classified rules exist")))
        .collect();
    let n = under.len();

    // size check before building anything
    let cell_sets: Vec<Vec<Vec<usize>>> = (1..=n).map(|k| subsets(n, k)).collect();
    let mut total = 2 + fully.len();
    for (k, sets) in cell_sets.iter().enumerate() {
        for (j, set) in sets.iter().enumerate() {
            let size = set
                .iter()
                .fold(1usize, |acc, &r| acc.saturating_mul(under_choices[r].len()));
            total = total.saturating_add(size);
            if total > opts.max_instances {
                return Err(InstantiateError::TooManyInstances {
                    cell: cell_id(k + 1, j),
                    count: total,
                    cap: opts.max_instances,
                });
            }
        }
    }

    let check_size = |inst: &QueryInstance| -> Result<(), InstantiateError> {
        let nodes = inst.pattern.concretize().nodes.len();
        if nodes > opts.max_pattern_nodes {
            return Err(InstantiateError::PatternTooLarge {
                instance: inst.id.clone(),
                nodes,
                cap: opts.max_pattern_nodes,
            });
        }
        Ok(())
    };

    let backbone = build_backbone(qr, directed)?;
    let (previews, fs_final) = instantiate_fully_specified(qr, directed)?;
    check_size(&backbone)?;
    for p in &previews {
        check_size(p)?;
    }
    check_size(&fs_final)?;
    let fs_plan = fs_final.assignment.clone();

    let mut instances = vec![backbone];
    instances.extend(previews.iter().cloned());
    instances.push(fs_final);
    // (subset mask, full choice vector) -> instance position
    let mut index: HashMap<(u64, Vec<usize>), usize> = HashMap::new();
    let mut layers = Vec::with_capacity(n);
    for (k, sets) in cell_sets.iter().enumerate() {
        let mut cells = Vec::with_capacity(sets.len());
        for (j, set) in sets.iter().enumerate() {
            let id = cell_id(k + 1, j);
            let rules: Vec<String> = set.iter().map(|&r| under[r].clone()).collect();
            let radices: Vec<usize> = set.iter().map(|&r| under_choices[r].len()).collect();
            let mut ids = Vec::new();
            for (i, picks) in product(&radices).into_iter().enumerate() {
                let mut vector = vec![0; n];
                for (&r, &c) in set.iter().zip(&picks) {
                    vector[r] = c;
                }
                let mut plan = fs_plan.clone();
                for (r, rid) in under.iter().enumerate() {
                    plan.insert(rid.clone(), under_choices[r][vector[r]].clone());
                }
                let inst = QueryInstance {
                    id: format!("{id}I{i}"),
                    stage: Stage::Combo {
                        layer: k + 1,
                        rules: rules.clone(),
                    },
                    pattern: build_pattern(qr, directed, &plan)?,
                    assignment: plan,
                };
                check_size(&inst)?;
                index.insert((mask(set), vector), instances.len());
                ids.push(inst.id.clone());
                instances.push(inst);
            }
            cells.push(ComboCell {
                id,
                layer: k + 1,
                rules,
                instances: ids,
            });
        }
        layers.push(cells);
    }

    let mut flows = Vec::new();
    for k in 1..layers.len() {
        for (j, lower) in cell_sets[k - 1].iter().enumerate() {
            for (h, upper) in cell_sets[k].iter().enumerate() {
                if mask(lower) & !mask(upper) == 0 {
                    flows.push(Flow {
                        from: layers[k - 1][j].id.clone(),
                        to: layers[k][h].id.clone(),
                    });
                }
            }
        }
    }

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let backbone_pos = 0;
    let fs_pos = previews.len() + 1;
    for p in 1..=previews.len() {
        candidates.push((backbone_pos, p));
        candidates.push((p, fs_pos));
    }
    if previews.is_empty() && n + fully.len() > 0 {
        candidates.push((backbone_pos, fs_pos));
    }
    for (&(m, ref vector), &at) in &index {
        if m.count_ones() == 1 && vector.iter().all(|&c| c == 0) {
            candidates.push((fs_pos, at));
        }
        // same choices one layer up
        for r in 0..n {
            if m & (1 << r) == 0 {
                if let Some(&up) = index.get(&(m | (1 << r), vector.clone())) {
                    candidates.push((at, up));
                }
            }
        }
        // one rule grown by one step inside the cell
        for r in 0..n {
            if m & (1 << r) == 0 {
                continue;
            }
            for next in growth(&under_choices[r], vector[r]) {
                let mut v = vector.clone();
                v[r] = next;
                if let Some(&to) = index.get(&(m, v)) {
                    candidates.push((at, to));
                }
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let concrete: Vec<PatternGraph> = instances.iter().map(|i| i.pattern.concretize()).collect();
    let mut witnesses = Vec::new();
    for (a, b) in candidates {
        if let Some(w) = find_witness(&concrete[a], &concrete[b], opts.witness_budget) {
            let (node_map, edge_map) = w;
            witnesses.push(Witness {
                from: instances[a].id.clone(),
                to: instances[b].id.clone(),
                node_map,
                edge_map,
            });
        }
    }

    Ok(InstantiationLattice {
        name: qr.name.clone(),
        directed,
        fully_specified: fully,
        underspecified: under,
        backbone: "backbone".into(),
        previews: previews.iter().map(|p| p.id.clone()).collect(),
        fs_final: "fs-final".into(),
        layers,
        flows,
        witnesses,
        instances,
    })
}

fn cell_id(layer: usize, index: usize) -> String {
    format!("L{layer}C{index}")
}

fn mask(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &r| m | (1 << r))
}

/// Choice indices that grow choice `i` by one step: one more node for
/// motif configurations (any admissible shape), the next value otherwise.
fn growth(choices: &[ParamAssignment], i: usize) -> Vec<usize> {
    let cur = &choices[i];
    match cur.get("nodes") {
        Some(&n) => (0..choices.len())
            .filter(|&j| choices[j].get("nodes") == Some(&(n + 1)))
            .collect(),
        None if i + 1 < choices.len() => vec![i + 1],
        None => Vec::new(),
    }
}

type IdMaps = (BTreeMap<String, String>, BTreeMap<String, String>);

/// Tries the identity-by-id map first, then a bounded search.
fn find_witness(p: &PatternGraph, q: &PatternGraph, budget: u64) -> Option<IdMaps> {
    let qpos = q.node_positions();
    let qedge: HashMap<&str, usize> = q.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let guided_nodes: Option<Vec<usize>> = p.nodes.iter().map(|n| qpos.get(n.id.as_str()).copied()).collect();
    let guided_edges: Option<Vec<usize>> = p.edges.iter().map(|e| qedge.get(e.id.as_str()).copied()).collect();
    let found = match (guided_nodes, guided_edges) {
        (Some(n), Some(e)) if verify_embedding(p, q, &n, &e) => Some((n, e)),
        _ => embed_pattern(p, q, budget).filter(|(n, e)| verify_embedding(p, q, n, e)),
    }?;
    Some((
        p.nodes
            .iter()
            .zip(&found.0)
            .map(|(a, &b)| (a.id.clone(), q.nodes[b].id.clone()))
            .collect(),
        p.edges
            .iter()
            .zip(&found.1)
            .map(|(a, &b)| (a.id.clone(), q.edges[b].id.clone()))
            .collect(),
    ))
}

/// Re-checks a recorded witness against the lattice's patterns.
pub fn verify_witness(lattice: &InstantiationLattice, w: &Witness) -> bool {
    let (Some(a), Some(b)) = (lattice.instance(&w.from), lattice.instance(&w.to)) else {
        return false;
    };
    let p = a.pattern.concretize();
    let q = b.pattern.concretize();
    let qpos = q.node_positions();
    let qedge: HashMap<&str, usize> = q.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let nodes: Option<Vec<usize>> = p
        .nodes
        .iter()
        .map(|n| w.node_map.get(&n.id).and_then(|t| qpos.get(t.as_str()).copied()))
        .collect();
    let edges: Option<Vec<usize>> = p
        .edges
        .iter()
        .map(|e| w.edge_map.get(&e.id).and_then(|t| qedge.get(t.as_str()).copied()))
        .collect();
    match (nodes, edges) {
        (Some(n), Some(e)) => verify_embedding(&p, &q, &n, &e),
        _ => false,
    }
}

/// Reads back how many copies and motif nodes an instance carries, per
/// structural rule, from element origins.
pub fn realised_parameters(qr: &QueryRepresentation, inst: &QueryInstance) -> BTreeMap<String, i64> {
    let p = &inst.pattern;
    let mut out = BTreeMap::new();
    for rule in qr.structural_rules() {
        let value = match &rule.body {
            RuleBody::MotifConfig { .. } => {
                if !inst.assignment.contains_key(&rule.id) {
                    continue;
                }
                p.nodes
                    .iter()
                    .filter(|n| n.origin.entity == rule.target && n.origin.lineage.is_empty())
                    .count() as i64
            }
            RuleBody::Repeating { .. } | RuleBody::Chaining { .. } => {
                let mut iterations: Vec<usize> = p
                    .nodes
                    .iter()
                    .map(|n| &n.origin.lineage)
                    .chain(p.edges.iter().map(|e| &e.origin.lineage))
                    .flatten()
                    .filter(|(r, _)| r == &rule.id)
                    .map(|(_, i)| *i)
                    .collect();
                iterations.sort_unstable();
                iterations.dedup();
                iterations.len() as i64
            }
            _ => continue,
        };
        out.insert(rule.id.clone(), value);
    }
    out
}
