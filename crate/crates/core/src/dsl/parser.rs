use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use crate::diagnostics::{has_errors, Diagnostic, SourceSpan};
use crate::graph::AttrValue;
use crate::query::{
    validate, ChainMode, CmpOp, EndpointRef, Entity, EntityKind, IntRange, MotifKind, PathPort, Predicate,
    QueryRepresentation, Rule, RuleBody,
};

/// A successfully parsed representation plus any warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub query: QueryRepresentation,
    pub warnings: Vec<Diagnostic>,
}

/// Parses DSL text. On failure every diagnostic carries a source span.
pub fn parse(src: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let tokens = tokenize(src).map_err(|d| vec![d])?;
    let mut p = Parser {
        tokens,
        pos: 0,
        qr: QueryRepresentation::new("unnamed"),
        diags: Vec::new(),
        entity_spans: HashMap::new(),
        rule_spans: HashMap::new(),
    };
    p.file();
    if has_errors(&p.diags) {
        return Err(p.diags);
    }
    let header_span = p.tokens[0].span;
    for d in validate(&p.qr) {
        let span = d
            .subject
            .as_deref()
            .and_then(|s| p.rule_spans.get(s).or_else(|| p.entity_spans.get(s)))
            .copied()
            .unwrap_or(header_span);
        p.diags.push(d.with_span(span));
    }
    if has_errors(&p.diags) {
        Err(p.diags)
    } else {
        Ok(Parsed {
            query: p.qr,
            warnings: p.diags,
        })
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qr: QueryRepresentation,
    diags: Vec<Diagnostic>,
    entity_spans: HashMap<String, SourceSpan>,
    rule_spans: HashMap<String, SourceSpan>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(None, format!("expected {expected}, found {}", t.tok.describe())).with_span(t.span)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.is_kw(kw) {
            Ok(self.next())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// Identifier or quoted string.
    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(s) | Tok::Str(s) => {
                let s = s.clone();
                let span = self.next().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().tok {
            Tok::Int(v) => {
                self.next();
                Ok(v)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn range(&mut self) -> PResult<IntRange> {
        let lo = self.int()?;
        if self.peek().tok == Tok::DotDot {
            self.next();
            let hi = self.int()?;
            Ok(IntRange::new(lo, hi))
        } else {
            Ok(IntRange::fixed(lo))
        }
    }

    fn file(&mut self) {
        if self.peek().tok == Tok::Eof {
            self.diags.push(
                Diagnostic::warning(None, "empty input; using an empty query named \"unnamed\"")
                    .with_span(self.peek().span),
            );
            return;
        }
        if let Err(d) = self.header() {
            self.diags.push(d);
            return;
        }
        loop {
            match self.peek().tok {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Eof => {
                    self.diags.push(self.unexpected("`}`"));
                    return;
                }
                _ => {
                    if let Err(d) = self.decl() {
                        self.diags.push(d);
                        self.recover();
                    }
                }
            }
        }
        if self.peek().tok != Tok::Eof {
            self.diags.push(self.unexpected("end of input"));
        }
    }

    fn header(&mut self) -> PResult<()> {
        self.expect_kw("query")?;
        match &self.peek().tok {
            Tok::Str(s) => {
                self.qr.name = s.clone();
                self.next();
            }
            _ => return Err(self.unexpected("a quoted query name")),
        }
        self.expect(Tok::LBrace)?;
        Ok(())
    }

    fn recover(&mut self) {
        loop {
            match self.peek().tok {
                Tok::Semi => {
                    self.next();
                    return;
                }
                Tok::RBrace | Tok::Eof => return,
                _ => {
                    self.next();
                }
            }
        }
    }

    fn decl(&mut self) -> PResult<()> {
        let kw = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a declaration")),
        };
        match kw.as_str() {
            "node" => {
                self.next();
                let (id, span) = self.ident("a node id")?;
                self.expect(Tok::Semi)?;
                self.add_entity(Entity::node(id), span)
            }
            "motif" => self.motif_decl(),
            "edge" => self.edge_decl(),
            "group" => self.group_decl(),
            "rule" => self.rule_decl(),
            _ => Err(self.unexpected("`node`, `motif`, `edge`, `group` or `rule`")),
        }
    }

    fn add_entity(&mut self, e: Entity, span: SourceSpan) -> PResult<()> {
        if self.entity_spans.contains_key(&e.id) {
            return Err(Diagnostic::error(e.id.clone(), format!("duplicate declaration of {:?}", e.id)).with_span(span));
        }
        self.entity_spans.insert(e.id.clone(), span);
        self.qr.entities.push(e);
        Ok(())
    }

    fn add_rule(&mut self, explicit: Option<(String, SourceSpan)>, target: String, body: RuleBody, span: SourceSpan) -> PResult<()> {
        let (id, span) = explicit.unwrap_or_else(|| (format!("r{}", self.qr.rules.len()), span));
        if self.rule_spans.contains_key(&id) {
            return Err(Diagnostic::error(id.clone(), format!("duplicate rule id {id:?}")).with_span(span));
        }
        self.rule_spans.insert(id.clone(), span);
        self.qr.rules.push(Rule { id, target, body });
        Ok(())
    }

    fn declared(&self, id: &str, span: SourceSpan) -> PResult<&Entity> {
        self.qr
            .entity(id)
            .ok_or_else(|| Diagnostic::error(id.to_string(), format!("reference to undeclared {id:?}")).with_span(span))
    }

    fn rule_alias(&mut self) -> PResult<Option<(String, SourceSpan)>> {
        if self.is_kw("as") {
            self.next();
            Ok(Some(self.ident("a rule id")?))
        } else {
            Ok(None)
        }
    }

    fn motif_decl(&mut self) -> PResult<()> {
        let start = self.next().span;
        let (id, span) = self.ident("a motif id")?;
        self.expect(Tok::Assign)?;
        let kind = match &self.peek().tok {
            Tok::Ident(s) => match s.as_str() {
                "path" => MotifKind::Path,
                "loop" => MotifKind::Loop,
                "tree" => MotifKind::Tree,
                "clique" => MotifKind::Clique,
                _ => return Err(self.unexpected("`path`, `loop`, `tree` or `clique`")),
            },
            _ => return Err(self.unexpected("a motif kind")),
        };
        self.next();
        let config = if self.peek().tok == Tok::LParen {
            self.next();
            let body = self.motif_params()?;
            self.expect(Tok::RParen)?;
            Some(body)
        } else {
            None
        };
        let alias = if config.is_some() { self.rule_alias()? } else { None };
        self.expect(Tok::Semi)?;
        self.add_entity(Entity::motif(id.clone(), kind), span)?;
        if let Some(body) = config {
            self.add_rule(alias, id, body, start)?;
        }
        Ok(())
    }

    fn motif_params(&mut self) -> PResult<RuleBody> {
        let (mut nodes, mut width, mut depth) = (None, None, None);
        loop {
            let (key, span) = self.ident("`nodes`, `width` or `depth`")?;
            self.expect(Tok::Assign)?;
            let r = self.range()?;
            let slot = match key.as_str() {
                "nodes" => &mut nodes,
                "width" => &mut width,
                "depth" => &mut depth,
                _ => {
                    return Err(Diagnostic::error(None, format!("unknown motif parameter `{key}`")).with_span(span));
                }
            };
            if slot.replace(r).is_some() {
                return Err(Diagnostic::error(None, format!("parameter `{key}` given twice")).with_span(span));
            }
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        let nodes = nodes.ok_or_else(|| self.unexpected("a `nodes=` parameter"))?;
        Ok(RuleBody::MotifConfig { nodes, width, depth })
    }

    fn endpoint(&mut self) -> PResult<EndpointRef> {
        let (id, span) = self.ident("an entity id")?;
        self.declared(&id, span)?;
        if self.peek().tok == Tok::Dot {
            self.next();
            let port = if self.is_kw("head") {
                PathPort::Head
            } else if self.is_kw("tail") {
                PathPort::Tail
            } else {
                return Err(self.unexpected("`head` or `tail`"));
            };
            self.next();
            Ok(EndpointRef::port(id, port))
        } else {
            Ok(EndpointRef::entity(id))
        }
    }

    fn edge_decl(&mut self) -> PResult<()> {
        self.next();
        let (id, span) = self.ident("an edge id")?;
        self.expect(Tok::Assign)?;
        let source = self.endpoint()?;
        let directed = match self.peek().tok {
            Tok::Arrow => true,
            Tok::DashDash => false,
            _ => return Err(self.unexpected("`->` or `--`")),
        };
        self.next();
        let target = self.endpoint()?;
        self.expect(Tok::Semi)?;
        self.add_entity(Entity::edge(id, source, target, directed), span)
    }

    fn group_decl(&mut self) -> PResult<()> {
        self.next();
        let (id, span) = self.ident("a group id")?;
        self.expect(Tok::Assign)?;
        self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        loop {
            let (m, mspan) = self.ident("a member id")?;
            self.declared(&m, mspan)?;
            members.push(m);
            match self.peek().tok {
                Tok::Comma => {
                    self.next();
                }
                Tok::RBrace => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `}`")),
            }
        }
        self.expect(Tok::Semi)?;
        self.add_entity(Entity::custom(id, members), span)
    }

    fn rule_target(&mut self) -> PResult<(String, SourceSpan)> {
        let (id, span) = self.ident("a target id")?;
        self.declared(&id, span)?;
        Ok((id, span))
    }

    fn rule_decl(&mut self) -> PResult<()> {
        let start = self.next().span;
        let (kind, kspan) = match &self.peek().tok {
            Tok::Ident(s) => (s.clone(), self.peek().span),
            _ => return Err(self.unexpected("`attr`, `motif`, `repeat` or `chain`")),
        };
        self.next();
        match kind.as_str() {
            "attr" => self.attr_rule(start),
            "motif" => {
                let (target, _) = self.rule_target()?;
                self.expect(Tok::Colon)?;
                let body = self.motif_params()?;
                let alias = self.rule_alias()?;
                self.expect(Tok::Semi)?;
                self.add_rule(alias, target, body, start)
            }
            "repeat" => {
                let (target, _) = self.rule_target()?;
                self.expect(Tok::Colon)?;
                self.expect_kw("count")?;
                self.expect(Tok::Assign)?;
                let count = self.range()?;
                let alias = self.rule_alias()?;
                self.expect(Tok::Semi)?;
                self.add_rule(alias, target, RuleBody::Repeating { count }, start)
            }
            "chain" => {
                let (target, _) = self.rule_target()?;
                self.expect(Tok::Colon)?;
                let body = self.chain_params()?;
                let alias = self.rule_alias()?;
                self.expect(Tok::Semi)?;
                self.add_rule(alias, target, body, start)
            }
            _ => Err(Diagnostic::error(None, format!("unknown rule kind `{kind}`")).with_span(kspan)),
        }
    }

    fn chain_params(&mut self) -> PResult<RuleBody> {
        let (mut start, mut end, mut iterations, mut mode) = (None, None, None, None);
        loop {
            let (key, span) = self.ident("a chain parameter")?;
            self.expect(Tok::Assign)?;
            let dup = match key.as_str() {
                "start" | "end" => {
                    let (id, ispan) = self.ident("a node id")?;
                    self.declared(&id, ispan)?;
                    let slot = if key == "start" { &mut start } else { &mut end };
                    slot.replace(id).is_some()
                }
                "iterations" => iterations.replace(self.range()?).is_some(),
                "mode" => {
                    let m = if self.is_kw("linked") {
                        ChainMode::LinkedChain
                    } else if self.is_kw("shared") {
                        ChainMode::SharedNode
                    } else {
                        return Err(self.unexpected("`linked` or `shared`"));
                    };
                    self.next();
                    mode.replace(m).is_some()
                }
                _ => {
                    return Err(Diagnostic::error(None, format!("unknown chain parameter `{key}`")).with_span(span));
                }
            };
            if dup {
                return Err(Diagnostic::error(None, format!("parameter `{key}` given twice")).with_span(span));
            }
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        match (start, end, iterations, mode) {
            (Some(start), Some(end), Some(iterations), Some(mode)) => Ok(RuleBody::Chaining {
                start,
                end,
                iterations,
                mode,
            }),
            _ => Err(self.unexpected("all of `start`, `end`, `iterations` and `mode`")),
        }
    }

    fn attr_rule(&mut self, start: SourceSpan) -> PResult<()> {
        // node ID | edge ID | nodes in ID | edges in ID
        let form = match &self.peek().tok {
            Tok::Ident(s) if ["node", "edge", "nodes", "edges"].contains(&s.as_str()) => s.clone(),
            _ => return Err(self.unexpected("`node`, `edge`, `nodes in` or `edges in`")),
        };
        self.next();
        if form == "nodes" || form == "edges" {
            self.expect_kw("in")?;
        }
        let (target, tspan) = self.rule_target()?;
        let kind = self.declared(&target, tspan)?.kind.clone();
        let fits = match form.as_str() {
            "node" => matches!(kind, EntityKind::Node),
            "edge" => matches!(kind, EntityKind::Edge { .. }),
            _ => matches!(kind, EntityKind::Motif { .. } | EntityKind::Custom { .. }),
        };
        if !fits {
            let hint = match kind {
                EntityKind::Node => "use `node`",
                EntityKind::Edge { .. } => "use `edge`",
                _ => "use `nodes in` or `edges in`",
            };
            return Err(Diagnostic::error(
                target.clone(),
                format!("`{form}` does not fit {target:?}; {hint}"),
            )
            .with_span(tspan));
        }
        self.expect(Tok::Colon)?;
        let (attr, _) = self.ident("an attribute name")?;
        let op = match self.peek().tok {
            Tok::Op(op) => match op {
                "==" => CmpOp::Eq,
                "!=" => CmpOp::Ne,
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                _ => CmpOp::Ge,
            },
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.next();
        let literal = match &self.peek().tok {
            Tok::Str(s) => AttrValue::Text(s.clone()),
            Tok::Int(i) => AttrValue::Number(*i as f64),
            Tok::Float(f) => AttrValue::Number(*f),
            Tok::Ident(s) if s == "true" => AttrValue::Bool(true),
            Tok::Ident(s) if s == "false" => AttrValue::Bool(false),
            _ => return Err(self.unexpected("a literal")),
        };
        self.next();
        let alias = self.rule_alias()?;
        self.expect(Tok::Semi)?;
        let predicate = Predicate { attr, op, literal };
        let body = if form.starts_with("node") {
            RuleBody::NodeAttr { predicate }
        } else {
            RuleBody::EdgeAttr { predicate }
        };
        self.add_rule(alias, target, body, start)
    }
}
