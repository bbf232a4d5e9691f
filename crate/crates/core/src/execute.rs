//! Progressive execution over a lattice.
//!
//! Steps run on demand. Each run records a status per instance; an empty
//! result prunes every instance reachable from it along witnesses, since a
//! witness certifies that the larger pattern contains the smaller one.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, SystemTime};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PropertyGraph;
use crate::instantiate::InstantiationLattice;
use crate::matcher::{match_pattern, MatchOptions, MatchResult};
use crate::pattern::{PatternGraph, QueryInstance};
use crate::query::ParamAssignment;

pub const DEFAULT_LIMIT: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    NotRun,
    Empty,
    Found { count: usize, complete: bool },
    PrunedEmpty { cause: String },
    /// The time budget ran out before any result or a proof of emptiness.
    TimedOut,
}

#[derive(Debug, Error, PartialEq)]
pub enum ExecError {
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("instance {0} has not been executed")]
    NotExecuted(String),
    #[error("instance {0} has no results")]
    NoResults(String),
    #[error("lattice was built for a {} graph but the graph is {}", mode(*.lattice), mode(*.graph))]
    ModeMismatch { lattice: bool, graph: bool },
    #[error("edge {edge} of instance {instance} is undirected but the graph is directed")]
    UndirectedEdge { instance: String, edge: String },
    #[error("limit must be at least 1")]
    ZeroLimit,
}

fn mode(directed: bool) -> &'static str {
    if directed {
        "directed"
    } else {
        "undirected"
    }
}

#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub limit: usize,
    pub time_budget: Option<Duration>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            limit: DEFAULT_LIMIT,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: String,
    pub limit: usize,
    pub matcher_calls: usize,
    #[serde(skip)]
    pub started: Option<SystemTime>,
    #[serde(skip)]
    pub finished: Option<SystemTime>,
}

#[derive(Debug, Clone, Default)]
pub struct ExecutionState {
    statuses: BTreeMap<String, Status>,
    results: BTreeMap<String, Vec<MatchResult>>,
    pub steps: Vec<StepRecord>,
}

impl ExecutionState {
    pub fn new(lattice: &InstantiationLattice) -> Self {
        ExecutionState {
            statuses: lattice
                .instances
                .iter()
                .map(|i| (i.id.clone(), Status::NotRun))
                .collect(),
            results: BTreeMap::new(),
            steps: Vec::new(),
        }
    }

    pub fn status(&self, id: &str) -> Option<&Status> {
        self.statuses.get(id)
    }

    pub fn results(&self, id: &str) -> &[MatchResult] {
        self.results.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn statuses(&self) -> &BTreeMap<String, Status> {
        &self.statuses
    }
}

/// Status of every instance touched by one step, in step order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: String,
    pub statuses: Vec<(String, Status)>,
    pub matcher_calls: usize,
}

/// Instances addressed by a step reference: `backbone`, `preview:<rule>`,
/// `fs-final`, `final`, `layer:<k>`, `cell:<cell-id>`, `cell:<rule>,<rule>`,
/// a bare cell id, or an instance id.
pub fn resolve_step(lattice: &InstantiationLattice, step: &str) -> Result<Vec<String>, ExecError> {
    let unknown = || ExecError::UnknownStep(step.to_string());
    if step == "final" {
        return Ok(lattice.final_instances());
    }
    if let Some(k) = step.strip_prefix("layer:") {
        let k: usize = k.trim().parse().map_err(|_| unknown())?;
        let layer = k.checked_sub(1).and_then(|i| lattice.layers.get(i)).ok_or_else(unknown)?;
        return Ok(layer.iter().flat_map(|c| c.instances.iter().cloned()).collect());
    }
    if let Some(spec) = step.strip_prefix("cell:") {
        if let Some(cell) = lattice.cell(spec) {
            return Ok(cell.instances.clone());
        }
        let rules: Vec<String> = spec.split(',').map(|r| r.trim().to_string()).collect();
        return lattice
            .cell_by_rules(&rules)
            .map(|c| c.instances.clone())
            .ok_or_else(unknown);
    }
    if let Some(cell) = lattice.cell(step) {
        return Ok(cell.instances.clone());
    }
    if lattice.instance(step).is_some() {
        return Ok(vec![step.to_string()]);
    }
    Err(unknown())
}

/// Step references in the order a user would normally run them.
pub fn suggested_order(lattice: &InstantiationLattice) -> Vec<String> {
    let mut out = vec![lattice.backbone.clone()];
    out.extend(lattice.previews.iter().cloned());
    out.push(lattice.fs_final.clone());
    out.extend((1..=lattice.layers.len()).map(|k| format!("layer:{k}")));
    out
}

/// Rejects graph/lattice combinations the matcher cannot answer faithfully.
pub fn check_mode(lattice: &InstantiationLattice, g: &PropertyGraph, ids: &[String]) -> Result<(), ExecError> {
    if lattice.directed != g.is_directed() {
        return Err(ExecError::ModeMismatch {
            lattice: lattice.directed,
            graph: g.is_directed(),
        });
    }
    if g.is_directed() {
        for id in ids {
            let inst = lattice.instance(id).ok_or_else(|| ExecError::UnknownInstance(id.clone()))?;
            if let Some(e) = inst.pattern.edges.iter().find(|e| !e.directed) {
                return Err(ExecError::UndirectedEdge {
                    instance: id.clone(),
                    edge: e.id.clone(),
                });
            }
        }
    }
    Ok(())
}

/// The pattern an instance is executed with (path markers expanded at
/// their minimum size).
pub fn executable_pattern(inst: &QueryInstance) -> PatternGraph {
    inst.pattern.concretize()
}

pub fn execute_step(
    lattice: &InstantiationLattice,
    g: &PropertyGraph,
    state: &mut ExecutionState,
    step: &str,
    opts: &ExecOptions,
) -> Result<StepReport, ExecError> {
    if opts.limit == 0 {
        return Err(ExecError::ZeroLimit);
    }
    let ids = resolve_step(lattice, step)?;
    check_mode(lattice, g, &ids)?;
    let started = SystemTime::now();
    let mut calls = 0;
    for id in &ids {
        let run = match state.statuses.get(id) {
            Some(Status::NotRun | Status::TimedOut) | None => true,
            Some(Status::Found { count, complete }) => !complete && *count < opts.limit,
            Some(Status::Empty | Status::PrunedEmpty { .. }) => false,
        };
        if !run {
            continue;
        }
        let inst = lattice.instance(id).ok_or_else(|| ExecError::UnknownInstance(id.clone()))?;
        let out = match_pattern(
            &executable_pattern(inst),
            g,
            &MatchOptions {
                limit: Some(opts.limit),
                time_budget: opts.time_budget,
                count_only: false,
                step_budget: None,
                break_symmetry: true,
            },
        );
        calls += 1;
        let status = match (out.count, out.complete) {
            (0, true) => Status::Empty,
            (0, false) => Status::TimedOut,
            (count, complete) => Status::Found { count, complete },
        };
        let empty = status == Status::Empty;
        state.statuses.insert(id.clone(), status);
        if out.results.is_empty() {
            state.results.remove(id);
        } else {
            state.results.insert(id.clone(), out.results);
        }
        if empty {
            propagate_pruning(lattice, state);
        }
    }
    state.steps.push(StepRecord {
        step: step.to_string(),
        limit: opts.limit,
        matcher_calls: calls,
        started: Some(started),
        finished: Some(SystemTime::now()),
    });
    Ok(StepReport {
        step: step.to_string(),
        statuses: ids
            .iter()
            .map(|id| (id.clone(), state.statuses.get(id).cloned().unwrap_or(Status::NotRun)))
            .collect(),
        matcher_calls: calls,
    })
}

/// Marks every not-yet-run instance reachable from an empty one along
/// witnesses as pruned, naming the empty instance it was reached from.
pub fn propagate_pruning(lattice: &InstantiationLattice, state: &mut ExecutionState) {
    let mut next: HashMap<&str, Vec<&str>> = HashMap::new();
    for w in &lattice.witnesses {
        next.entry(w.from.as_str()).or_default().push(w.to.as_str());
    }
    for inst in &lattice.instances {
        if state.statuses.get(&inst.id) != Some(&Status::Empty) {
            continue;
        }
        let cause = inst.id.clone();
        let mut seen = std::collections::HashSet::from([inst.id.as_str()]);
        let mut queue = VecDeque::from([inst.id.as_str()]);
        while let Some(cur) = queue.pop_front() {
            for &to in next.get(cur).into_iter().flatten() {
                if !seen.insert(to) {
                    continue;
                }
                if state.statuses.get(to) == Some(&Status::NotRun) {
                    state
                        .statuses
                        .insert(to.to_string(), Status::PrunedEmpty { cause: cause.clone() });
                }
                queue.push_back(to);
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrequencyOverview {
    pub node_freq: BTreeMap<String, usize>,
    pub edge_freq: BTreeMap<String, usize>,
    pub over: Vec<String>,
}

/// How often each data node and edge occurs across the stored results of
/// the selected instances.
pub fn aggregate(state: &ExecutionState, ids: &[String]) -> Result<FrequencyOverview, ExecError> {
    let mut out = FrequencyOverview {
        over: ids.to_vec(),
        ..Default::default()
    };
    for id in ids {
        match state.statuses.get(id) {
            None => return Err(ExecError::UnknownInstance(id.clone())),
            Some(Status::NotRun) | Some(Status::TimedOut) => return Err(ExecError::NotExecuted(id.clone())),
            _ => {}
        }
        for r in state.results(id) {
            for v in r.node_map.values() {
                *out.node_freq.entry(v.clone()).or_default() += 1;
            }
            for v in r.edge_map.values() {
                *out.edge_freq.entry(v.clone()).or_default() += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultGroup {
    pub instance: String,
    pub structure: PatternGraph,
    pub embeddings: Vec<MatchResult>,
    pub complete: bool,
}

/// The stored embeddings of one instance, in matcher order.
pub fn group_results(lattice: &InstantiationLattice, state: &ExecutionState, id: &str) -> Result<ResultGroup, ExecError> {
    let inst = lattice.instance(id).ok_or_else(|| ExecError::UnknownInstance(id.to_string()))?;
    match state.statuses.get(id) {
        Some(Status::Found { complete, .. }) => Ok(ResultGroup {
            instance: id.to_string(),
            structure: executable_pattern(inst),
            embeddings: state.results(id).to_vec(),
            complete: *complete,
        }),
        Some(Status::NotRun) | Some(Status::TimedOut) | None => Err(ExecError::NotExecuted(id.to_string())),
        Some(_) => Err(ExecError::NoResults(id.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResults {
    pub id: String,
    pub assignment: BTreeMap<String, ParamAssignment>,
    #[serde(flatten)]
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub embeddings: Vec<MatchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsExport {
    pub query: String,
    pub steps: Vec<StepRecord>,
    pub instances: Vec<InstanceResults>,
    pub overview: FrequencyOverview,
}

impl PartialEq for StepRecord {
    fn eq(&self, other: &Self) -> bool {
        self.step == other.step && self.limit == other.limit && self.matcher_calls == other.matcher_calls
    }
}

/// Everything executed so far, in lattice order, with the overview over
/// all instances that have results. Contains no timestamps, so equal runs
/// export byte-identical JSON.
pub fn export(lattice: &InstantiationLattice, state: &ExecutionState) -> ResultsExport {
    let instances: Vec<InstanceResults> = lattice
        .instances
        .iter()
        .map(|i| InstanceResults {
            id: i.id.clone(),
            assignment: i.assignment.clone(),
            status: state.statuses.get(&i.id).cloned().unwrap_or(Status::NotRun),
            embeddings: state.results(&i.id).to_vec(),
        })
        .collect();
    let found: Vec<String> = instances
        .iter()
        .filter(|i| matches!(i.status, Status::Found { .. }))
        .map(|i| i.id.clone())
        .collect();
    let overview = aggregate(state, &found).unwrap_or_default();
    ResultsExport {
        query: lattice.name.clone(),
        steps: state.steps.clone(),
        instances,
        overview,
    }
}

impl ResultsExport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("exports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Rebuilds an execution state (statuses and results) from an export.
    pub fn to_state(&self) -> ExecutionState {
        ExecutionState {
            statuses: self.instances.iter().map(|i| (i.id.clone(), i.status.clone())).collect(),
            results: self
                .instances
                .iter()
                .filter(|i| !i.embeddings.is_empty())
                .map(|i| (i.id.clone(), i.embeddings.clone()))
                .collect(),
            steps: self.steps.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::graph::{AttrValue, Edge, Node};
    use crate::instantiate::{build_lattice, LatticeOptions};
    use crate::matcher::count;

    fn path_graph(n: usize) -> PropertyGraph {
        let nodes = (0..n)
            .map(|i| Node {
                id: format!("v{i}"),
                attrs: [("label".to_string(), AttrValue::from(if i == 0 { "heist" } else { "x" }))].into(),
            })
            .collect();
        let edges = (1..n)
            .map(|i| Edge {
                id: format!("x{i}"),
                source: format!("v{}", i - 1),
                target: format!("v{i}"),
                label: None,
                attrs: Default::default(),
            })
            .collect();
        PropertyGraph::new(true, nodes, edges).unwrap()
    }

    fn lattice(src: &str, directed: bool) -> InstantiationLattice {
        let qr = parse(&format!("query \"t\" {{\n{src}\n}}")).unwrap().query;
        build_lattice(
            &qr,
            &LatticeOptions {
                directed: Some(directed),
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn empty_instance_prunes_bigger_repeats() {
        // a star with k extra leaves around the heist node; the data has one
        // out-edge from v0, so only k = 0 matches
        let l = lattice(
            "node h; node t; edge e = h -> t; rule attr node h : label == \"heist\"; rule repeat t : count=0..3;",
            true,
        );
        let g = path_graph(4);
        let mut st = ExecutionState::new(&l);
        let ids = resolve_step(&l, "final").unwrap();
        execute_step(&l, &g, &mut st, &ids[1], &ExecOptions::default()).unwrap();
        assert_eq!(st.status(&ids[1]), Some(&Status::Empty));
        for id in &ids[2..] {
            assert_eq!(
                st.status(id),
                Some(&Status::PrunedEmpty {
                    cause: ids[1].clone()
                })
            );
            let inst = l.instance(id).unwrap();
            assert_eq!(count(&executable_pattern(inst), &g, &MatchOptions::default()), (0, true));
        }
        let report = execute_step(&l, &g, &mut st, "final", &ExecOptions::default()).unwrap();
        assert_eq!(report.matcher_calls, 1);
        assert!(matches!(st.status(&ids[0]), Some(Status::Found { count: 1, complete: true })));
    }

    #[test]
    fn loop_emptiness_does_not_prune_larger_loops() {
        let l = lattice("motif L = loop(nodes=3..4);", true);
        let g = path_graph(5);
        let mut st = ExecutionState::new(&l);
        let ids = resolve_step(&l, "final").unwrap();
        execute_step(&l, &g, &mut st, &ids[0], &ExecOptions::default()).unwrap();
        assert_eq!(st.status(&ids[0]), Some(&Status::Empty));
        assert_eq!(st.status(&ids[1]), Some(&Status::NotRun));
    }

    #[test]
    fn no_empty_instances_means_nothing_pruned() {
        let l = lattice("node a; rule repeat a : count=0..1;", true);
        let mut st = ExecutionState::new(&l);
        let before = st.statuses().clone();
        propagate_pruning(&l, &mut st);
        assert_eq!(&before, st.statuses());
    }

    #[test]
    fn larger_limit_extends_results() {
        let l = lattice("node a; node b; edge e = a -> b;", true);
        let g = path_graph(6);
        let mut st = ExecutionState::new(&l);
        execute_step(&l, &g, &mut st, "final", &ExecOptions { limit: 2, time_budget: None }).unwrap();
        assert_eq!(
            st.status("fs-final"),
            Some(&Status::Found {
                count: 2,
                complete: false
            })
        );
        let first = st.results("fs-final").to_vec();
        execute_step(&l, &g, &mut st, "final", &ExecOptions::default()).unwrap();
        assert_eq!(
            st.status("fs-final"),
            Some(&Status::Found {
                count: 5,
                complete: true
            })
        );
        assert_eq!(&st.results("fs-final")[..2], &first[..]);
        let group = group_results(&l, &st, "fs-final").unwrap();
        assert_eq!(group.embeddings.len(), 5);
    }

    #[test]
    fn aggregate_counts_occurrences() {
        let l = lattice("node a; node b; edge e = a -> b;", true);
        let g = path_graph(3);
        let mut st = ExecutionState::new(&l);
        assert_eq!(
            aggregate(&st, &["fs-final".to_string()]),
            Err(ExecError::NotExecuted("fs-final".into()))
        );
        execute_step(&l, &g, &mut st, "fs-final", &ExecOptions::default()).unwrap();
        let o = aggregate(&st, &["fs-final".to_string()]).unwrap();
        assert_eq!(o.node_freq["v1"], 2);
        assert_eq!(o.node_freq.values().sum::<usize>(), 2 * 2);
        assert_eq!(aggregate(&st, &[]).unwrap().node_freq.len(), 0);
    }

    #[test]
    fn step_references() {
        let l = lattice("node a; node b; rule repeat a : count=0..1; rule repeat b : count=0..2;", true);
        assert_eq!(resolve_step(&l, "layer:1").unwrap().len(), 5);
        assert_eq!(resolve_step(&l, "cell:r1,r0").unwrap().len(), 6);
        assert_eq!(resolve_step(&l, "cell:L1C1").unwrap().len(), 3);
        assert_eq!(resolve_step(&l, "L2C0").unwrap(), resolve_step(&l, "final").unwrap());
        assert!(matches!(resolve_step(&l, "layer:3"), Err(ExecError::UnknownStep(_))));
        assert_eq!(suggested_order(&l), vec!["backbone", "fs-final", "layer:1", "layer:2"]);
    }

    #[test]
    fn undirected_pattern_on_directed_graph_is_rejected() {
        let l = lattice("node a; node b; edge e = a -- b;", true);
        let mut st = ExecutionState::new(&l);
        let err = execute_step(&l, &path_graph(2), &mut st, "final", &ExecOptions::default()).unwrap_err();
        assert!(matches!(err, ExecError::UndirectedEdge { .. }));
        let l = lattice("node a;", false);
        let err = execute_step(&l, &path_graph(2), &mut st, "final", &ExecOptions::default()).unwrap_err();
        assert!(matches!(err, ExecError::ModeMismatch { .. }));
    }

    #[test]
    fn export_round_trips() {
        let l = lattice("node a; node b; edge e = a -> b;", true);
        let g = path_graph(3);
        let mut st = ExecutionState::new(&l);
        execute_step(&l, &g, &mut st, "final", &ExecOptions::default()).unwrap();
        let text = export(&l, &st).to_json();
        let back = ResultsExport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.to_state().statuses(), st.statuses());
    }
}
