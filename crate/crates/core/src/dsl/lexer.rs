use crate::diagnostics::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Float(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Dot,
    DotDot,
    Assign,
    Arrow,
    DashDash,
    Op(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Float(f) => format!("number {f}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DashDash => "`--`".into(),
            Tok::Op(op) => format!("`{op}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, line: usize, col: usize, start: usize) -> SourceSpan {
        SourceSpan {
            line,
            column: col,
            length: self.pos - start,
        }
    }

    fn error(&self, line: usize, col: usize, len: usize, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(None, msg).with_span(SourceSpan {
            line,
            column: col,
            length: len,
        })
    }

    fn run(mut self) -> Result<Vec<Token>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            // whitespace and `#` comments
            while let Some(c) = self.peek(0) {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col, start) = (self.line, self.col, self.pos);
            let Some(c) = self.peek(0) else {
                out.push(Token {
                    tok: Tok::Eof,
                    span: SourceSpan {
                        line,
                        column: col,
                        length: 0,
                    },
                });
                return Ok(out);
            };
            let tok = match c {
                '{' => self.single(Tok::LBrace),
                '}' => self.single(Tok::RBrace),
                '(' => self.single(Tok::LParen),
                ')' => self.single(Tok::RParen),
                ';' => self.single(Tok::Semi),
                ',' => self.single(Tok::Comma),
                ':' => self.single(Tok::Colon),
                '.' if self.peek(1) == Some('.') => {
                    self.bump();
                    self.single(Tok::DotDot)
                }
                '.' => self.single(Tok::Dot),
                '=' if self.peek(1) == Some('=') => {
                    self.bump();
                    self.single(Tok::Op("=="))
                }
                '=' => self.single(Tok::Assign),
                '!' if self.peek(1) == Some('=') => {
                    self.bump();
                    self.single(Tok::Op("!="))
                }
                '<' if self.peek(1) == Some('=') => {
                    self.bump();
                    self.single(Tok::Op("<="))
                }
                '<' => self.single(Tok::Op("<")),
                '>' if self.peek(1) == Some('=') => {
                    self.bump();
                    self.single(Tok::Op(">="))
                }
                '>' => self.single(Tok::Op(">")),
                '-' if self.peek(1) == Some('>') => {
                    self.bump();
                    self.single(Tok::Arrow)
                }
                '-' if self.peek(1) == Some('-') => {
                    self.bump();
                    self.single(Tok::DashDash)
                }
                '-' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => self.number(line, col, start)?,
                '"' => self.string(line, col)?,
                c if c.is_ascii_digit() => self.number(line, col, start)?,
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek(0) {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(self.error(line, col, 1, format!("unexpected character {other:?}")));
                }
            };
            out.push(Token {
                tok,
                span: self.span_from(line, col, start),
            });
        }
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.bump();
        tok
    }

    fn number(&mut self, line: usize, col: usize, start: usize) -> Result<Tok, Diagnostic> {
        let mut text = String::new();
        if self.peek(0) == Some('-') {
            text.push('-');
            self.bump();
        }
        let digits = |lx: &mut Lexer, text: &mut String| {
            while let Some(c) = lx.peek(0) {
                if c.is_ascii_digit() {
                    text.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
        };
        digits(self, &mut text);
        let mut is_float = false;
        // `1..3` is a range, `1.5` a fraction
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push('.');
            self.bump();
            digits(self, &mut text);
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let sign = matches!(self.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                text.push('e');
                self.bump();
                if sign {
                    text.push(self.bump().unwrap_or('+'));
                }
                digits(self, &mut text);
            }
        }
        let len = self.pos - start;
        if is_float {
            let v: f64 = text
                .parse()
                .map_err(|_| self.error(line, col, len, format!("invalid number {text}")))?;
            if !v.is_finite() {
                return Err(self.error(line, col, len, format!("number {text} is out of range")));
            }
            Ok(Tok::Float(v))
        } else {
            text.parse::<i64>()
                .map(Tok::Int)
                .map_err(|_| self.error(line, col, len, format!("integer {text} is out of range")))
        }
    }

    fn string(&mut self, line: usize, col: usize) -> Result<Tok, Diagnostic> {
        let start = self.pos;
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, col, self.pos - start, "unterminated string")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    other => {
                        return Err(self.error(
                            self.line,
                            self.col.saturating_sub(2).max(1),
                            2,
                            format!("unknown escape {:?}", other.map(String::from).unwrap_or_default()),
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_and_floats() {
        assert_eq!(toks("0..3"), vec![Tok::Int(0), Tok::DotDot, Tok::Int(3), Tok::Eof]);
        assert_eq!(toks("1.5 -2"), vec![Tok::Float(1.5), Tok::Int(-2), Tok::Eof]);
        assert_eq!(toks("1e3"), vec![Tok::Float(1000.0), Tok::Eof]);
    }

    #[test]
    fn edges_and_operators() {
        assert_eq!(
            toks("a -> b -- c >= <"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::DashDash,
                Tok::Ident("c".into()),
                Tok::Op(">="),
                Tok::Op("<"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_spans() {
        let t = tokenize("# hi\n  node x;").unwrap();
        assert_eq!(
            t[0].span,
            SourceSpan {
                line: 2,
                column: 3,
                length: 4
            }
        );
        assert_eq!(t[1].span.column, 8);
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\\c""#), vec![Tok::Str("a\"b\\c".into()), Tok::Eof]);
        assert!(tokenize("\"open").is_err());
    }

    #[test]
    fn lexical_error_has_span() {
        let e = tokenize("node $").unwrap_err();
        assert_eq!(e.span.unwrap().column, 6);
    }
}
