use std::collections::HashSet;
use std::fmt::Write;

use crate::graph::{format_number, AttrValue};
use crate::query::{
    ChainMode, EntityKind, IntRange, PathPort, Predicate, QueryRepresentation, Rule, RuleBody,
};

const KEYWORDS: &[&str] = &[
    "query", "node", "motif", "edge", "group", "rule", "attr", "nodes", "edges", "in", "repeat", "chain",
    "count", "start", "end", "iterations", "mode", "linked", "shared", "path", "loop", "tree", "clique",
    "width", "depth", "head", "tail", "true", "false", "as",
];

/// Renders a representation as DSL text.
///
/// Entities and rules keep their relative declaration order; each rule is
/// emitted as soon as everything it references has been declared, and a
/// motif's configuration is inlined into the motif declaration whenever
/// it is the next rule due.
pub fn serialize(qr: &QueryRepresentation) -> String {
    let mut out = String::new();
    let _ = write!(out, "query {} {{", quote(&qr.name));
    if qr.entities.is_empty() && qr.rules.is_empty() {
        out.push_str(" }\n");
        return out;
    }
    out.push('\n');

    let mut declared: HashSet<&str> = HashSet::new();
    let mut next_rule = 0;
    let emit_ready = |out: &mut String, next_rule: &mut usize, declared: &HashSet<&str>| {
        while let Some(rule) = qr.rules.get(*next_rule) {
            if !rule_refs(rule).iter().all(|id| declared.contains(id)) {
                break;
            }
            let _ = writeln!(out, "  {}", rule_line(qr, rule, *next_rule));
            *next_rule += 1;
        }
    };
    for entity in &qr.entities {
        declared.insert(entity.id.as_str());
        let id = ident(&entity.id);
        match &entity.kind {
            EntityKind::Node => {
                let _ = writeln!(out, "  node {id};");
            }
            EntityKind::Motif { motif } => {
                let inline = qr.rules.get(next_rule).filter(|r| {
                    r.target == entity.id && matches!(r.body, RuleBody::MotifConfig { .. })
                });
                match inline {
                    Some(rule) => {
                        let _ = writeln!(
                            out,
                            "  motif {id} = {}({}){};",
                            motif.keyword(),
                            motif_params(&rule.body),
                            alias(rule, next_rule)
                        );
                        next_rule += 1;
                    }
                    None => {
                        let _ = writeln!(out, "  motif {id} = {};", motif.keyword());
                    }
                }
            }
            EntityKind::Edge {
                source,
                target,
                directed,
            } => {
                let endpoint = |e: &crate::query::EndpointRef| match e.port {
                    None => ident(&e.entity),
                    Some(PathPort::Head) => format!("{}.head", ident(&e.entity)),
                    Some(PathPort::Tail) => format!("{}.tail", ident(&e.entity)),
                };
                let arrow = if *directed { "->" } else { "--" };
                let _ = writeln!(out, "  edge {id} = {} {arrow} {};", endpoint(source), endpoint(target));
            }
            EntityKind::Custom { members } => {
                let list: Vec<String> = members.iter().map(|m| ident(m)).collect();
                let _ = writeln!(out, "  group {id} = {{ {} }};", list.join(", "));
            }
        }
        emit_ready(&mut out, &mut next_rule, &declared);
    }
    // rules that reference undeclared ids cannot come from a valid
    // representation; emit them anyway so nothing is silently dropped
    for (i, rule) in qr.rules.iter().enumerate().skip(next_rule) {
        let _ = writeln!(out, "  {}", rule_line(qr, rule, i));
    }
    out.push_str("}\n");
    out
}

fn rule_refs(rule: &Rule) -> Vec<&str> {
    let mut refs = vec![rule.target.as_str()];
    if let RuleBody::Chaining { start, end, .. } = &rule.body {
        refs.push(start);
        refs.push(end);
    }
    refs
}

fn alias(rule: &Rule, index: usize) -> String {
    if rule.id == format!("r{index}") {
        String::new()
    } else {
        format!(" as {}", ident(&rule.id))
    }
}

fn range(r: &IntRange) -> String {
    r.to_string()
}

fn motif_params(body: &RuleBody) -> String {
    let RuleBody::MotifConfig { nodes, width, depth } = body else {
        return String::new();
    };
    let mut s = format!("nodes={}", range(nodes));
    if let Some(w) = width {
        let _ = write!(s, ", width={}", range(w));
    }
    if let Some(d) = depth {
        let _ = write!(s, ", depth={}", range(d));
    }
    s
}

fn rule_line(qr: &QueryRepresentation, rule: &Rule, index: usize) -> String {
    let target = ident(&rule.target);
    let target_kind = qr.entity(&rule.target).map(|e| &e.kind);
    let tail = alias(rule, index);
    match &rule.body {
        RuleBody::NodeAttr { predicate } => {
            let form = if matches!(target_kind, Some(EntityKind::Node)) {
                "node"
            } else {
                "nodes in"
            };
            format!("rule attr {form} {target} : {}{tail};", predicate_text(predicate))
        }
        RuleBody::EdgeAttr { predicate } => {
            let form = if matches!(target_kind, Some(EntityKind::Edge { .. })) {
                "edge"
            } else {
                "edges in"
            };
            format!("rule attr {form} {target} : {}{tail};", predicate_text(predicate))
        }
        RuleBody::MotifConfig { .. } => format!("rule motif {target} : {}{tail};", motif_params(&rule.body)),
        RuleBody::Repeating { count } => format!("rule repeat {target} : count={}{tail};", range(count)),
        RuleBody::Chaining {
            start,
            end,
            iterations,
            mode,
        } => {
            let mode = match mode {
                ChainMode::LinkedChain => "linked",
                ChainMode::SharedNode => "shared",
            };
            format!(
                "rule chain {target} : start={}, end={}, iterations={}, mode={mode}{tail};",
                ident(start),
                ident(end),
                range(iterations)
            )
        }
    }
}

fn predicate_text(p: &Predicate) -> String {
    format!("{} {} {}", ident(&p.attr), p.op.symbol(), literal(&p.literal))
}

/// Literal text that lexes back to the same value.
pub fn literal(v: &AttrValue) -> String {
    match v {
        AttrValue::Text(s) => quote(s),
        AttrValue::Bool(b) => b.to_string(),
        AttrValue::Number(n) => {
            if n.fract() == 0.0 && n.abs() < 9_007_199_254_740_992.0 {
                format_number(*n)
            } else if n.fract() == 0.0 {
                format!("{n:e}")
            } else {
                let s = format_number(*n);
                if s.contains('.') {
                    s
                } else {
                    format!("{n:e}")
                }
            }
        }
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Bare identifier when it lexes as one and is not a keyword, else quoted.
pub fn ident(s: &str) -> String {
    let mut chars = s.chars();
    let plain = match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => chars.all(|c| c.is_alphanumeric() || c == '_'),
        _ => false,
    };
    if plain && !KEYWORDS.contains(&s) {
        s.to_string()
    } else {
        quote(s)
    }
}
