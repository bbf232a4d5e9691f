//! Query representations: entities plus parameterized rules.
//!
//! A representation may be underspecified: structural rules carry integer
//! ranges, and each combination of values denotes one concrete query.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostic;
use crate::graph::AttrValue;
pub use crate::motif::MotifKind;
use crate::motif::{self, MAX_TREE_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub attr: String,
    pub op: CmpOp,
    pub literal: AttrValue,
}

impl Predicate {
    pub fn new(attr: impl Into<String>, op: CmpOp, literal: impl Into<AttrValue>) -> Self {
        Predicate {
            attr: attr.into(),
            op,
            literal: literal.into(),
        }
    }

    /// Missing attributes and cross-type comparisons never satisfy a predicate.
    pub fn eval(&self, value: Option<&AttrValue>) -> bool {
        let Some(value) = value else { return false };
        let ord = match (value, &self.literal) {
            (AttrValue::Number(a), AttrValue::Number(b)) => a.partial_cmp(b),
            (AttrValue::Text(a), AttrValue::Text(b)) if !self.op.is_ordering() => Some(a.cmp(b)),
            (AttrValue::Bool(a), AttrValue::Bool(b)) if !self.op.is_ordering() => Some(a.cmp(b)),
            _ => None,
        };
        let Some(ord) = ord else { return false };
        match self.op {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

impl Eq for Predicate {}

impl PartialOrd for Predicate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Predicate {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(v: &AttrValue) -> u8 {
            match v {
                AttrValue::Bool(_) => 0,
                AttrValue::Number(_) => 1,
                AttrValue::Text(_) => 2,
            }
        }
        self.attr
            .cmp(&other.attr)
            .then(self.op.cmp(&other.op))
            .then_with(|| match (&self.literal, &other.literal) {
                (AttrValue::Number(a), AttrValue::Number(b)) => a.total_cmp(b),
                (AttrValue::Text(a), AttrValue::Text(b)) => a.cmp(b),
                (AttrValue::Bool(a), AttrValue::Bool(b)) => a.cmp(b),
                (a, b) => rank(a).cmp(&rank(b)),
            })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.attr, self.op.symbol(), self.literal)
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    pub fn fixed(v: i64) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fixed() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathPort {
    Head,
    Tail,
}

/// Edge endpoint: a node or motif, plus `head`/`tail` for path motifs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndpointRef {
    pub entity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port: Option<PathPort>,
}

impl EndpointRef {
    pub fn entity(id: impl Into<String>) -> Self {
        EndpointRef {
            entity: id.into(),
            port: None,
        }
    }

    pub fn port(id: impl Into<String>, port: PathPort) -> Self {
        EndpointRef {
            entity: id.into(),
            port: Some(port),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntityKind {
    Node,
    Edge {
        source: EndpointRef,
        target: EndpointRef,
        directed: bool,
    },
    Motif {
        motif: MotifKind,
    },
    Custom {
        members: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    #[serde(flatten)]
    pub kind: EntityKind,
}

impl Entity {
    pub fn node(id: impl Into<String>) -> Self {
        Entity {
            id: id.into(),
            kind: EntityKind::Node,
        }
    }

    pub fn motif(id: impl Into<String>, motif: MotifKind) -> Self {
        Entity {
            id: id.into(),
            kind: EntityKind::Motif { motif },
        }
    }

    pub fn edge(id: impl Into<String>, source: EndpointRef, target: EndpointRef, directed: bool) -> Self {
        Entity {
            id: id.into(),
            kind: EntityKind::Edge {
                source,
                target,
                directed,
            },
        }
    }

    pub fn custom<S: Into<String>>(id: impl Into<String>, members: impl IntoIterator<Item = S>) -> Self {
        Entity {
            id: id.into(),
            kind: EntityKind::Custom {
                members: members.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            EntityKind::Node => "node",
            EntityKind::Edge { .. } => "edge",
            EntityKind::Motif { .. } => "motif",
            EntityKind::Custom { .. } => "group",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    LinkedChain,
    SharedNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RuleBody {
    NodeAttr {
        predicate: Predicate,
    },
    EdgeAttr {
        predicate: Predicate,
    },
    MotifConfig {
        nodes: IntRange,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<IntRange>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<IntRange>,
    },
    Repeating {
        count: IntRange,
    },
    Chaining {
        start: String,
        end: String,
        iterations: IntRange,
        mode: ChainMode,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub target: String,
    #[serde(flatten)]
    pub body: RuleBody,
}

impl Rule {
    pub fn is_structural(&self) -> bool {
        !matches!(self.body, RuleBody::NodeAttr { .. } | RuleBody::EdgeAttr { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.body {
            RuleBody::NodeAttr { .. } => "node attribute",
            RuleBody::EdgeAttr { .. } => "edge attribute",
            RuleBody::MotifConfig { .. } => "motif configuration",
            RuleBody::Repeating { .. } => "repeating",
            RuleBody::Chaining { .. } => "chaining",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRepresentation {
    pub name: String,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub rules: Vec<Rule>,
}

impl QueryRepresentation {
    pub fn new(name: impl Into<String>) -> Self {
        QueryRepresentation {
            name: name.into(),
            entities: Vec::new(),
            rules: Vec::new(),
        }
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn structural_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.is_structural())
    }

    /// The MotifConfig rule attached to a motif entity.
    pub fn motif_config(&self, motif_id: &str) -> Option<&Rule> {
        self.rules
            .iter()
            .find(|r| r.target == motif_id && matches!(r.body, RuleBody::MotifConfig { .. }))
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("representations always serialize")
    }
}

/// One value per rule parameter, keyed by parameter name
/// (`nodes`, `width`, `depth`, `shape`, `count`, `iterations`).
pub type ParamAssignment = BTreeMap<String, i64>;

/// Validates every entity and rule invariant. An empty result means the
/// representation is well-formed.
pub fn validate(qr: &QueryRepresentation) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut position: HashMap<&str, usize> = HashMap::new();
    for (i, e) in qr.entities.iter().enumerate() {
        if e.id.is_empty() {
            diags.push(Diagnostic::error(None, format!("entity #{i} has an empty id")));
        }
        if position.insert(e.id.as_str(), i).is_some() {
            diags.push(Diagnostic::error(e.id.clone(), format!("duplicate entity id {:?}", e.id)));
        }
    }
    // first declaration wins for lookups
    let mut by_id: HashMap<&str, (usize, &Entity)> = HashMap::new();
    for (i, e) in qr.entities.iter().enumerate() {
        by_id.entry(e.id.as_str()).or_insert((i, e));
    }

    for (i, e) in qr.entities.iter().enumerate() {
        let subject = || Some(e.id.clone());
        let earlier = |id: &str| -> Result<&Entity, String> {
            match by_id.get(id) {
                None => Err(format!("references undeclared entity {id:?}")),
                Some(&(j, _)) if j >= i => Err(format!("references {id:?} before it is declared")),
                Some(&(_, ent)) => Ok(ent),
            }
        };
        match &e.kind {
            EntityKind::Node => {}
            EntityKind::Motif { .. } => {
                if qr.motif_config(&e.id).is_none() {
                    diags.push(Diagnostic::error(subject(), "motif has no configuration rule"));
                }
            }
            EntityKind::Edge { source, target, .. } => {
                for end in [source, target] {
                    match earlier(&end.entity) {
                        Err(msg) => diags.push(Diagnostic::error(subject(), msg)),
                        Ok(ent) => match (&ent.kind, end.port) {
                            (EntityKind::Node, None) => {}
                            (EntityKind::Node, Some(_)) => diags.push(Diagnostic::error(
                                subject(),
                                format!("node {:?} has no head/tail", ent.id),
                            )),
                            (EntityKind::Motif { motif: MotifKind::Path }, None) => diags.push(Diagnostic::error(
                                subject(),
                                format!("path {:?} must be attached at head or tail", ent.id),
                            )),
                            (EntityKind::Motif { motif: MotifKind::Path }, Some(_)) => {}
                            (EntityKind::Motif { .. }, None) => {}
                            (EntityKind::Motif { .. }, Some(_)) => diags.push(Diagnostic::error(
                                subject(),
                                format!("only paths expose head/tail; {:?} attaches at its representative node", ent.id),
                            )),
                            (_, _) => diags.push(Diagnostic::error(
                                subject(),
                                format!("edge endpoint {:?} must be a node or motif, not a {}", ent.id, ent.kind_name()),
                            )),
                        },
                    }
                }
            }
            EntityKind::Custom { members } => {
                if members.is_empty() {
                    diags.push(Diagnostic::error(subject(), "group has no members"));
                }
                let mut seen = HashSet::new();
                for m in members {
                    if !seen.insert(m.as_str()) {
                        diags.push(Diagnostic::error(subject(), format!("member {m:?} listed twice")));
                        continue;
                    }
                    match earlier(m) {
                        Err(msg) => diags.push(Diagnostic::error(subject(), msg)),
                        Ok(ent) if matches!(ent.kind, EntityKind::Custom { .. }) => diags.push(Diagnostic::error(
                            subject(),
                            format!("groups cannot contain other groups ({m:?})"),
                        )),
                        Ok(_) => {}
                    }
                }
            }
        }
    }

    let mut rule_ids = HashSet::new();
    let mut motif_configs: HashMap<&str, usize> = HashMap::new();
    let mut growth_rules: HashMap<&str, usize> = HashMap::new();
    for rule in &qr.rules {
        let subject = || Some(rule.id.clone());
        if rule.id.is_empty() {
            diags.push(Diagnostic::error(None, "rule with empty id"));
        }
        if !rule_ids.insert(rule.id.as_str()) {
            diags.push(Diagnostic::error(subject(), format!("duplicate rule id {:?}", rule.id)));
        }
        let Some(&(_, target)) = by_id.get(rule.target.as_str()) else {
            diags.push(Diagnostic::error(
                subject(),
                format!("rule targets undeclared entity {:?}", rule.target),
            ));
            continue;
        };
        match &rule.body {
            RuleBody::NodeAttr { predicate } => {
                if matches!(target.kind, EntityKind::Edge { .. }) {
                    diags.push(Diagnostic::error(
                        subject(),
                        format!("node attribute rule cannot target edge {:?}", target.id),
                    ));
                }
                check_predicate(predicate, &rule.id, &mut diags);
            }
            RuleBody::EdgeAttr { predicate } => {
                if matches!(target.kind, EntityKind::Node) {
                    diags.push(Diagnostic::error(
                        subject(),
                        format!("edge attribute rule cannot target node {:?}", target.id),
                    ));
                }
                check_predicate(predicate, &rule.id, &mut diags);
            }
            RuleBody::MotifConfig { nodes, width, depth } => {
                let EntityKind::Motif { motif } = target.kind else {
                    diags.push(Diagnostic::error(
                        subject(),
                        format!("motif configuration must target a motif, {:?} is a {}", target.id, target.kind_name()),
                    ));
                    continue;
                };
                *motif_configs.entry(rule.target.as_str()).or_default() += 1;
                if motif_configs[rule.target.as_str()] > 1 {
                    diags.push(Diagnostic::error(
                        subject(),
                        format!("motif {:?} already has a configuration rule", target.id),
                    ));
                }
                check_range(nodes, motif.min_nodes(), "nodes", &rule.id, &mut diags);
                if motif != MotifKind::Tree && (width.is_some() || depth.is_some()) {
                    diags.push(Diagnostic::error(subject(), "width/depth apply to tree motifs only"));
                }
                if let Some(w) = width {
                    check_range(w, 1, "width", &rule.id, &mut diags);
                }
                if let Some(d) = depth {
                    check_range(d, 1, "depth", &rule.id, &mut diags);
                }
                if motif == MotifKind::Tree && nodes.lo >= 2 && nodes.lo <= nodes.hi {
                    if nodes.hi > MAX_TREE_NODES as i64 {
                        diags.push(Diagnostic::error(
                            subject(),
                            format!("tree motifs are limited to {MAX_TREE_NODES} nodes"),
                        ));
                    } else if tree_choices(nodes, *width, *depth).is_empty() {
                        diags.push(Diagnostic::error(subject(), "no tree shape satisfies the width/depth ranges"));
                    }
                }
            }
            RuleBody::Repeating { count } => {
                check_growth_target(rule, &mut growth_rules, &mut diags);
                check_range(count, 0, "count", &rule.id, &mut diags);
            }
            RuleBody::Chaining {
                start,
                end,
                iterations,
                mode,
            } => {
                check_growth_target(rule, &mut growth_rules, &mut diags);
                check_range(iterations, 0, "iterations", &rule.id, &mut diags);
                match &target.kind {
                    EntityKind::Node => {
                        if start != &target.id || end != &target.id {
                            diags.push(Diagnostic::error(
                                subject(),
                                "chaining a node uses the node itself as start and end",
                            ));
                        } else if *mode == ChainMode::SharedNode {
                            diags.push(Diagnostic::warning(
                                subject(),
                                "shared-node chaining of a single node adds nothing",
                            ));
                        }
                    }
                    EntityKind::Custom { members } => {
                        for (role, id) in [("start", start), ("end", end)] {
                            let is_member = members.contains(id);
                            let is_node = by_id
                                .get(id.as_str())
                                .is_some_and(|(_, e)| matches!(e.kind, EntityKind::Node));
                            if !is_member || !is_node {
                                diags.push(Diagnostic::error(
                                    subject(),
                                    format!("chain {role} {id:?} must be a node member of {:?}", target.id),
                                ));
                            }
                        }
                        if start == end && *mode == ChainMode::SharedNode {
                            diags.push(Diagnostic::error(
                                subject(),
                                "shared-node chaining with start = end would fold each copy onto itself",
                            ));
                        }
                    }
                    _ => diags.push(Diagnostic::error(
                        subject(),
                        format!("chaining targets a node or group, {:?} is a {}", target.id, target.kind_name()),
                    )),
                }
            }
        }
    }
    diags
}

fn check_growth_target<'a>(rule: &'a Rule, seen: &mut HashMap<&'a str, usize>, diags: &mut Vec<Diagnostic>) {
    let n = seen.entry(rule.target.as_str()).or_default();
    *n += 1;
    if *n > 1 {
        diags.push(Diagnostic::error(
            Some(rule.id.clone()),
            format!(
                "{:?} already has a repeating or chaining rule; at most one is allowed per entity",
                rule.target
            ),
        ));
    }
}

fn check_range(r: &IntRange, min: i64, param: &str, rule: &str, diags: &mut Vec<Diagnostic>) {
    if r.lo > r.hi {
        diags.push(Diagnostic::error(
            Some(rule.to_string()),
            format!("{param} range {}..{} is empty", r.lo, r.hi),
        ));
    } else if r.lo < min {
        diags.push(Diagnostic::error(
            Some(rule.to_string()),
            format!("{param} must be at least {min}, got {}", r.lo),
        ));
    }
}

fn check_predicate(p: &Predicate, rule: &str, diags: &mut Vec<Diagnostic>) {
    if p.attr.is_empty() {
        diags.push(Diagnostic::error(Some(rule.to_string()), "predicate names no attribute"));
    }
    if p.op.is_ordering() && p.literal.as_number().is_none() {
        diags.push(Diagnostic::error(
            Some(rule.to_string()),
            format!("operator {} needs a numeric literal", p.op.symbol()),
        ));
    }
    if !p.literal.is_finite() {
        diags.push(Diagnostic::error(Some(rule.to_string()), "literal is not a finite number"));
    }
}

/// Structural rule ids split into (fully specified, underspecified), each
/// in declaration order. Attribute rules appear in neither list.
///
/// Tree configurations admitting several shapes count as underspecified
/// even when their ranges are fixed, since they yield several instances.
pub fn classify_rules(qr: &QueryRepresentation) -> (Vec<String>, Vec<String>) {
    let mut fully = Vec::new();
    let mut under = Vec::new();
    for rule in qr.structural_rules() {
        if choices(qr, rule).len() == 1 {
            fully.push(rule.id.clone());
        } else {
            under.push(rule.id.clone());
        }
    }
    (fully, under)
}

/// Cartesian product of a structural rule's ranges, nodes-major.
pub fn assignments(rule: &Rule) -> Vec<ParamAssignment> {
    match &rule.body {
        RuleBody::NodeAttr { .. } | RuleBody::EdgeAttr { .. } => Vec::new(),
        RuleBody::Repeating { count } => single("count", count),
        RuleBody::Chaining { iterations, .. } => single("iterations", iterations),
        RuleBody::MotifConfig { nodes, width, depth } => {
            let mut out = Vec::new();
            let unit = IntRange::fixed(0);
            for n in nodes.values() {
                for w in width.unwrap_or(unit).values() {
                    for d in depth.unwrap_or(unit).values() {
                        let mut a = ParamAssignment::new();
                        a.insert("nodes".into(), n);
                        if width.is_some() {
                            a.insert("width".into(), w);
                        }
                        if depth.is_some() {
                            a.insert("depth".into(), d);
                        }
                        out.push(a);
                    }
                }
            }
            out
        }
    }
}

fn single(name: &str, r: &IntRange) -> Vec<ParamAssignment> {
    r.values().map(|v| ParamAssignment::from([(name.to_string(), v)])).collect()
}

/// The concrete choices a structural rule contributes to instantiation:
/// its assignments, except that tree configurations expand each
/// assignment into one choice per admissible shape (`shape` = index of
/// the shape among those sharing the other parameters).
pub fn choices(qr: &QueryRepresentation, rule: &Rule) -> Vec<ParamAssignment> {
    if let RuleBody::MotifConfig { nodes, width, depth } = &rule.body {
        let is_tree = matches!(
            qr.entity(&rule.target).map(|e| &e.kind),
            Some(EntityKind::Motif { motif: MotifKind::Tree })
        );
        if is_tree {
            return tree_choices(nodes, *width, *depth);
        }
    }
    assignments(rule)
}

fn tree_choices(nodes: &IntRange, width: Option<IntRange>, depth: Option<IntRange>) -> Vec<ParamAssignment> {
    let mut out = Vec::new();
    for n in nodes.values() {
        if n < 2 || n > MAX_TREE_NODES as i64 {
            continue;
        }
        let shapes = motif::rooted_trees(n as usize).unwrap_or_default();
        let unit = IntRange::fixed(-1);
        for w in width.unwrap_or(unit).values() {
            for d in depth.unwrap_or(unit).values() {
                let fits = |s: &&motif::TreeShape| {
                    (width.is_none() || s.width as i64 == w) && (depth.is_none() || s.depth as i64 == d)
                };
                for (idx, _) in shapes.iter().filter(fits).enumerate() {
                    let mut a = ParamAssignment::new();
                    a.insert("nodes".into(), n);
                    if width.is_some() {
                        a.insert("width".into(), w);
                    }
                    if depth.is_some() {
                        a.insert("depth".into(), d);
                    }
                    a.insert("shape".into(), idx as i64);
                    out.push(a);
                }
            }
        }
    }
    out
}

/// Resolves a tree choice back to its shape.
pub fn tree_shape_for(choice: &ParamAssignment) -> Option<motif::TreeShape> {
    let n = *choice.get("nodes")? as usize;
    let shape = *choice.get("shape")? as usize;
    let width = choice.get("width").map(|&w| w as usize);
    let depth = choice.get("depth").map(|&d| d as usize);
    motif::rooted_trees(n)
        .ok()?
        .into_iter()
        .filter(|s| width.is_none_or(|w| s.width == w) && depth.is_none_or(|d| s.depth == d))
        .nth(shape)
}
