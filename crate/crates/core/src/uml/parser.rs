//! Parser and canonical serializer for the `.uml` class-diagram language.
//!
//! ```text
//! diagram Library
//! package library {
//!   class Book @ (20, 30) { attr isbn; op lend(member) }
//!   interface Lendable
//! }
//! Book --> Member : borrows
//! Lendable <|.. Book
//! (Book, Member) .. Loan
//! ```
//!
//! Statements end at a newline or `;`. Edges: `-->` association, `<|--`
//! inheritance, `<|..` realization, `..>` dependency, `o--` aggregation,
//! `*--` composition, `(A, B) .. C` association class. For `<|--` and
//! `<|..` the right-hand side is the child / implementor. Comments start
//! with `//` or `#`.

use std::fmt::Write as _;

use super::model::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate classifier {0}")]
    DuplicateClassifier(String),
    #[error("duplicate package {0}")]
    DuplicatePackage(String),
    #[error("unresolved relationship endpoint {0}")]
    DanglingEndpoint(String),
    #[error("ambiguous reference {0}; qualify it with its package path")]
    AmbiguousReference(String),
    #[error("malformed position: {0}")]
    MalformedPosition(String),
    #[error("realization target {0} is not an interface")]
    RealizationTarget(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Sym(char),
    Arrow(RelationshipKind),
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Num(n) => format!("number {n}"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Arrow(k) => format!("`{}`", k.arrow()),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, column, kind }
    }

    fn peek_byte(&self, off: usize) -> Option<u8> {
        self.src.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek_byte(0) {
                Some(b' ' | b'\t' | b'\r') => {
                    self.bump();
                }
                Some(b'#') => self.skip_line(),
                Some(b'/') if self.peek_byte(1) == Some(b'/') => self.skip_line(),
                _ => return,
            }
        }
    }

    fn skip_line(&mut self) {
        while let Some(b) = self.peek_byte(0) {
            if b == b'\n' {
                break;
            }
            self.bump();
        }
    }

    /// Next token with its starting line and column.
    fn next(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek_byte(0) else {
            return Ok((Tok::Eof, line, col));
        };
        let arrows = [
            ("<|--", RelationshipKind::Inheritance),
            ("<|..", RelationshipKind::Realization),
            ("-->", RelationshipKind::Association),
            ("..>", RelationshipKind::Dependency),
            ("*--", RelationshipKind::Composition),
            ("o--", RelationshipKind::Aggregation),
            ("..", RelationshipKind::AssociationClass),
        ];
        for (text, kind) in arrows {
            let boundary_ok = text != "o--"
                || self.pos == 0
                || !self.src[self.pos - 1].is_ascii_alphanumeric() && self.src[self.pos - 1] != b'_';
            if self.starts_with(text) && boundary_ok {
                for _ in 0..text.len() {
                    self.bump();
                }
                return Ok((Tok::Arrow(kind), line, col));
            }
        }
        let tok = match b {
            b'\n' => {
                self.bump();
                Tok::Newline
            }
            b'"' => {
                self.bump();
                let mut s = Vec::new();
                loop {
                    match self.bump() {
                        None | Some(b'\n') => {
                            return Err(self.err(line, col, ParseErrorKind::Syntax("unterminated string".into())))
                        }
                        Some(b'"') => break,
                        Some(b'\\') => match self.bump() {
                            Some(c @ (b'"' | b'\\')) => s.push(c),
                            _ => {
                                return Err(self.err(line, col, ParseErrorKind::Syntax("bad escape in string".into())))
                            }
                        },
                        Some(c) => s.push(c),
                    }
                }
                Tok::Str(String::from_utf8_lossy(&s).into_owned())
            }
            b'0'..=b'9' | b'-' | b'+' => {
                let start = self.pos;
                self.bump();
                while matches!(self.peek_byte(0), Some(b'0'..=b'9' | b'.' | b'e' | b'E')) {
                    self.bump();
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                let n = text.parse::<f64>().map_err(|_| {
                    self.err(line, col, ParseErrorKind::Syntax(format!("invalid number `{text}`")))
                })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while matches!(self.peek_byte(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.bump();
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            b'{' | b'}' | b'(' | b')' | b',' | b';' | b'@' | b':' | b'.' => {
                self.bump();
                Tok::Sym(b as char)
            }
            other => {
                return Err(self.err(
                    line,
                    col,
                    ParseErrorKind::Syntax(format!("unexpected character `{}`", other as char)),
                ))
            }
        };
        Ok((tok, line, col))
    }

    /// Raw text up to (not including) the next `)`; the `)` is consumed.
    fn raw_until_close_paren(&mut self) -> Result<String, ParseError> {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while let Some(b) = self.peek_byte(0) {
            match b {
                b')' => {
                    let text = String::from_utf8_lossy(&self.src[start..self.pos]).trim().to_string();
                    self.bump();
                    return Ok(text);
                }
                b'\n' => break,
                _ => {
                    self.bump();
                }
            }
        }
        Err(self.err(line, col, ParseErrorKind::Syntax("expected `)`".into())))
    }
}

struct PendingEdge {
    kind: RelationshipKind,
    ends: Vec<(String, usize, usize)>,
    label: Option<String>,
}

struct Parser<'a> {
    lex: Lexer<'a>,
    peeked: Option<(Tok, usize, usize)>,
    model: ClassModel,
    edges: Vec<PendingEdge>,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<&(Tok, usize, usize), ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex.next()?);
        }
        Ok(self.peeked.as_ref().expect("peeked"))
    }

    fn next(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex.next(),
        }
    }

    fn syntax(line: usize, column: usize, msg: String) -> ParseError {
        ParseError { line, column, kind: ParseErrorKind::Syntax(msg) }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.next()? {
            (Tok::Sym(s), ..) if s == c => Ok(()),
            (t, l, col) => Err(Self::syntax(l, col, format!("expected `{c}`, found {}", t.describe()))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.next()? {
            (Tok::Ident(s), l, c) => Ok((s, l, c)),
            (t, l, c) => Err(Self::syntax(l, c, format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn qualified_name(&mut self) -> Result<(String, usize, usize), ParseError> {
        let (mut name, l, c) = self.expect_ident("a name")?;
        while matches!(self.peek()?.0, Tok::Sym('.')) {
            self.next()?;
            let (part, ..) = self.expect_ident("a name after `.`")?;
            name.push('.');
            name.push_str(&part);
        }
        Ok((name, l, c))
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek()?.clone() {
            (Tok::Newline | Tok::Sym(';'), ..) => {
                self.next()?;
                Ok(())
            }
            (Tok::Eof | Tok::Sym('}'), ..) => Ok(()),
            (t, l, c) => Err(Self::syntax(l, c, format!("expected end of statement, found {}", t.describe()))),
        }
    }

    fn attach(&mut self, scope: Option<usize>, node: NodeRef) {
        match scope {
            Some(p) => self.model.packages[p].children.push(node),
            None => self.model.roots.push(node),
        }
    }

    fn block(&mut self, scope: Option<usize>) -> Result<(), ParseError> {
        loop {
            let (tok, line, col) = self.peek()?.clone();
            match tok {
                Tok::Newline | Tok::Sym(';') => {
                    self.next()?;
                }
                Tok::Eof => {
                    if scope.is_some() {
                        return Err(Self::syntax(line, col, "unclosed package, expected `}`".into()));
                    }
                    return Ok(());
                }
                Tok::Sym('}') => {
                    if scope.is_none() {
                        return Err(Self::syntax(line, col, "unexpected `}`".into()));
                    }
                    self.next()?;
                    return Ok(());
                }
                Tok::Ident(ref kw) if kw == "diagram" && scope.is_none() => {
                    self.next()?;
                    self.model.name = match self.next()? {
                        (Tok::Ident(s) | Tok::Str(s), ..) => s,
                        (t, l, c) => return Err(Self::syntax(l, c, format!("expected diagram name, found {}", t.describe()))),
                    };
                    self.end_of_statement()?;
                }
                Tok::Ident(ref kw) if kw == "package" => {
                    self.next()?;
                    let (name, l, c) = self.expect_ident("a package name")?;
                    let taken = match scope {
                        Some(p) => &self.model.packages[p].children,
                        None => &self.model.roots,
                    }
                    .iter()
                    .any(|n| matches!(n, NodeRef::Package(i) if self.model.packages[*i].name == name));
                    if taken {
                        return Err(ParseError { line: l, column: c, kind: ParseErrorKind::DuplicatePackage(name) });
                    }
                    let index = self.model.packages.len();
                    self.model.packages.push(Package { name, parent: scope, children: vec![] });
                    self.attach(scope, NodeRef::Package(index));
                    self.expect_sym('{')?;
                    self.block(Some(index))?;
                    self.end_of_statement()?;
                }
                Tok::Ident(ref kw) if kw == "class" || kw == "interface" => {
                    let kind = if kw == "class" { ClassifierKind::Class } else { ClassifierKind::Interface };
                    self.next()?;
                    self.classifier(scope, kind)?;
                    self.end_of_statement()?;
                }
                Tok::Sym('(') => {
                    self.next()?;
                    let a = self.qualified_name()?;
                    self.expect_sym(',')?;
                    let b = self.qualified_name()?;
                    self.expect_sym(')')?;
                    match self.next()? {
                        (Tok::Arrow(RelationshipKind::AssociationClass), ..) => {}
                        (t, l, c) => return Err(Self::syntax(l, c, format!("expected `..`, found {}", t.describe()))),
                    }
                    let cls = self.qualified_name()?;
                    let label = self.label()?;
                    self.edges.push(PendingEdge { kind: RelationshipKind::AssociationClass, ends: vec![a, b, cls], label });
                    self.end_of_statement()?;
                }
                Tok::Ident(_) => {
                    let left = self.qualified_name()?;
                    let kind = match self.next()? {
                        (Tok::Arrow(k), ..) if k != RelationshipKind::AssociationClass => k,
                        (t, l, c) => return Err(Self::syntax(l, c, format!("expected a relationship arrow, found {}", t.describe()))),
                    };
                    let right = self.qualified_name()?;
                    let label = self.label()?;
                    // `Parent <|-- Child`: the child is the source
                    let ends = match kind {
                        RelationshipKind::Inheritance | RelationshipKind::Realization => vec![right, left],
                        _ => vec![left, right],
                    };
                    self.edges.push(PendingEdge { kind, ends, label });
                    self.end_of_statement()?;
                }
                t => return Err(Self::syntax(line, col, format!("unexpected {}", t.describe()))),
            }
        }
    }

    fn label(&mut self) -> Result<Option<String>, ParseError> {
        if !matches!(self.peek()?.0, Tok::Sym(':')) {
            return Ok(None);
        }
        self.next()?;
        let mut words = Vec::new();
        while let Tok::Ident(s) | Tok::Str(s) = self.peek()?.0.clone() {
            self.next()?;
            words.push(s);
        }
        if words.is_empty() {
            let (t, l, c) = self.peek()?.clone();
            return Err(Self::syntax(l, c, format!("expected a label, found {}", t.describe())));
        }
        Ok(Some(words.join(" ")))
    }

    fn classifier(&mut self, scope: Option<usize>, kind: ClassifierKind) -> Result<(), ParseError> {
        let (name, l, c) = self.expect_ident("a classifier name")?;
        if self.model.classifiers.iter().any(|k| k.package == scope && k.name == name) {
            return Err(ParseError { line: l, column: c, kind: ParseErrorKind::DuplicateClassifier(name) });
        }
        let mut classifier =
            Classifier { name, kind, attributes: vec![], operations: vec![], package: scope, position: None };

        if matches!(self.peek()?.0, Tok::Sym('@')) {
            let (_, pl, pc) = self.next()?;
            let malformed = |msg: &str| ParseError {
                line: pl,
                column: pc,
                kind: ParseErrorKind::MalformedPosition(msg.to_string()),
            };
            let mut coords = [0.0; 2];
            if !matches!(self.next()?.0, Tok::Sym('(')) {
                return Err(malformed("expected `(x, y)`"));
            }
            for (i, slot) in coords.iter_mut().enumerate() {
                match self.next()?.0 {
                    Tok::Num(n) => *slot = n,
                    _ => return Err(malformed("coordinates must be numbers")),
                }
                let want = if i == 0 { ',' } else { ')' };
                if self.next()?.0 != Tok::Sym(want) {
                    return Err(malformed("expected `(x, y)`"));
                }
            }
            classifier.position = Some(
                Position::new(coords[0], coords[1])
                    .ok_or_else(|| malformed(&format!("({}, {}) is outside [0, 100]", coords[0], coords[1])))?,
            );
        }

        if matches!(self.peek()?.0, Tok::Sym('{')) {
            self.next()?;
            loop {
                let (tok, line, col) = self.next()?;
                match tok {
                    Tok::Newline | Tok::Sym(';') => {}
                    Tok::Sym('}') => break,
                    Tok::Ident(kw) if kw == "attr" => {
                        let (n, ..) = self.expect_ident("an attribute name")?;
                        classifier.attributes.push(n);
                    }
                    Tok::Ident(kw) if kw == "op" => {
                        let (n, ..) = self.expect_ident("an operation name")?;
                        // parameters are kept verbatim
                        if self.peeked.is_some() {
                            return Err(Self::syntax(line, col, "expected `(` after operation name".into()));
                        }
                        self.lex.skip_trivia();
                        if self.lex.peek_byte(0) != Some(b'(') {
                            let (t, l, c) = self.next()?;
                            return Err(Self::syntax(l, c, format!("expected `(`, found {}", t.describe())));
                        }
                        self.lex.bump();
                        let params = self.lex.raw_until_close_paren()?;
                        classifier.operations.push(Operation { name: n, params });
                    }
                    Tok::Eof => return Err(Self::syntax(line, col, "unclosed classifier body".into())),
                    t => {
                        return Err(Self::syntax(line, col, format!("expected `attr`, `op` or `}}`, found {}", t.describe())))
                    }
                }
            }
        }

        let index = self.model.classifiers.len();
        self.model.classifiers.push(classifier);
        self.attach(scope, NodeRef::Classifier(index));
        Ok(())
    }

    fn resolve(&self, name: &str, line: usize, column: usize) -> Result<usize, ParseError> {
        let hits: Vec<usize> = (0..self.model.classifiers.len())
            .filter(|&c| {
                if name.contains('.') {
                    self.model.qualified_name(c) == name
                } else {
                    self.model.classifiers[c].name == name
                }
            })
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(ParseError { line, column, kind: ParseErrorKind::DanglingEndpoint(name.to_string()) }),
            _ => Err(ParseError { line, column, kind: ParseErrorKind::AmbiguousReference(name.to_string()) }),
        }
    }

    fn finish(mut self) -> Result<ClassModel, ParseError> {
        for edge in std::mem::take(&mut self.edges) {
            let ids = edge
                .ends
                .iter()
                .map(|(n, l, c)| self.resolve(n, *l, *c))
                .collect::<Result<Vec<_>, _>>()?;
            if edge.kind == RelationshipKind::Realization
                && self.model.classifiers[ids[1]].kind != ClassifierKind::Interface
            {
                let (n, l, c) = &edge.ends[1];
                return Err(ParseError { line: *l, column: *c, kind: ParseErrorKind::RealizationTarget(n.clone()) });
            }
            self.model.relationships.push(Relationship {
                kind: edge.kind,
                source: ids[0],
                target: ids[1],
                assoc_class: ids.get(2).copied(),
                label: edge.label,
            });
        }
        Ok(self.model)
    }
}

/// Parses diagram source. The first error stops parsing.
pub fn parse_diagram(text: &str) -> Result<ClassModel, ParseError> {
    let mut p = Parser {
        lex: Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 },
        peeked: None,
        model: ClassModel::empty("untitled"),
        edges: vec![],
    };
    p.block(None)?;
    p.finish()
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Canonical text form; `parse_diagram(&serialize_diagram(m))` rebuilds `m`.
pub fn serialize_diagram(model: &ClassModel) -> String {
    let mut out = String::new();
    let name = if is_ident(&model.name) { model.name.clone() } else { quoted(&model.name) };
    let _ = writeln!(out, "diagram {name}");

    fn node(model: &ClassModel, n: NodeRef, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match n {
            NodeRef::Package(i) => {
                let _ = writeln!(out, "{pad}package {} {{", model.packages[i].name);
                for &c in &model.packages[i].children {
                    node(model, c, indent + 1, out);
                }
                let _ = writeln!(out, "{pad}}}");
            }
            NodeRef::Classifier(i) => {
                let c = &model.classifiers[i];
                let _ = write!(out, "{pad}{} {}", c.kind, c.name);
                if let Some(p) = c.position {
                    let _ = write!(out, " @ ({}, {})", p.x, p.y);
                }
                if c.attributes.is_empty() && c.operations.is_empty() {
                    out.push('\n');
                    return;
                }
                out.push_str(" {\n");
                for a in &c.attributes {
                    let _ = writeln!(out, "{pad}  attr {a}");
                }
                for o in &c.operations {
                    let _ = writeln!(out, "{pad}  op {}({})", o.name, o.params);
                }
                let _ = writeln!(out, "{pad}}}");
            }
        }
    }
    for &r in &model.roots {
        node(model, r, 0, &mut out);
    }

    for r in &model.relationships {
        let q = |c: usize| model.qualified_name(c);
        match r.kind {
            RelationshipKind::AssociationClass => {
                let _ = write!(out, "({}, {}) .. {}", q(r.source), q(r.target), q(r.assoc_class.unwrap_or(r.target)));
            }
            RelationshipKind::Inheritance | RelationshipKind::Realization => {
                let _ = write!(out, "{} {} {}", q(r.target), r.kind.arrow(), q(r.source));
            }
            _ => {
                let _ = write!(out, "{} {} {}", q(r.source), r.kind.arrow(), q(r.target));
            }
        }
        if let Some(l) = &r.label {
            let _ = write!(out, " : {}", quoted(l));
        }
        out.push('\n');
    }
    out
}
