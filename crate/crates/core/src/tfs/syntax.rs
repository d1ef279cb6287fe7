//! Textual AVM syntax.
//!
//! ```text
//! value := '#' tag value?                  reentrancy tag; body only on first use
//!        | symbol                          typed atom / variable
//!        | '(' symbol (':' feature value)* ')'
//!        | '<' value* ('.' value)? '>'     closed list, or open with tail
//!        | '{' value? '}'                  set, at most one element
//!        | '@' name                        template copy (lexicon files only)
//! ```
//!
//! Only the first occurrence of a tag within one top-level value may carry
//! a body, so `<#1 x #1 y>` is a three-item list whose first two items are shared.
//! `;` starts a comment running to end of line. Strings are double quoted.
//! The printer emits tags `#1`, `#2`, ... for nodes reached more than once,
//! features in lexicographic order, and is the inverse of the reader.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::graph::{Content, FeatureStructure, NodeId};
use super::types::{HierarchyError, TypeDecl, TypeHierarchy};
use super::unify::{UnifyError, WId, Work};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntaxError {
    #[error("{pos}: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("{pos}: {source}")]
    Type {
        pos: Pos,
        #[source]
        source: HierarchyError,
    },
    #[error("{pos}: {source}")]
    Unify {
        pos: Pos,
        #[source]
        source: UnifyError,
    },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Parse { pos, .. }
            | SyntaxError::Type { pos, .. }
            | SyntaxError::Unify { pos, .. } => *pos,
        }
    }

    fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Dot,
    Tag(String),
    Key(String),
    Template(String),
    Str(String),
    Sym(String),
}

fn is_sym_char(c: char) -> bool {
    !c.is_whitespace() && !"()<>{}#:@\";.".contains(c)
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == ';' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            bump(&mut chars);
            out.push((t, pos));
            continue;
        }
        match c {
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\\') => match bump(&mut chars) {
                            Some(e) => s.push(e),
                            None => return Err(SyntaxError::parse(pos, "unterminated string")),
                        },
                        Some(ch) => s.push(ch),
                        None => return Err(SyntaxError::parse(pos, "unterminated string")),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            '#' | ':' | '@' => {
                bump(&mut chars);
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if !is_sym_char(ch) {
                        break;
                    }
                    s.push(ch);
                    bump(&mut chars);
                }
                if s.is_empty() {
                    return Err(SyntaxError::parse(pos, format!("empty name after `{}`", c)));
                }
                out.push((
                    match c {
                        '#' => Tok::Tag(s),
                        ':' => Tok::Key(s.to_lowercase()),
                        _ => Tok::Template(s),
                    },
                    pos,
                ));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if !is_sym_char(ch) {
                        break;
                    }
                    s.push(ch);
                    bump(&mut chars);
                }
                if s.is_empty() {
                    return Err(SyntaxError::parse(
                        pos,
                        format!("unexpected character `{}`", c),
                    ));
                }
                out.push((Tok::Sym(s), pos));
            }
        }
    }
    Ok(out)
}

/// Parsed but not yet type-checked value.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Term {
    Tagged(String, Option<Box<Term>>, Pos),
    Atom(String, Pos),
    Avm(String, Vec<(String, Term, Pos)>, Pos),
    List(Vec<Term>, Option<Box<Term>>, Pos),
    Set(Vec<Term>, Pos),
    Template(String, Pos),
}

impl Term {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Term::Tagged(_, _, p)
            | Term::Atom(_, p)
            | Term::Avm(_, _, p)
            | Term::List(_, _, p)
            | Term::Set(_, p)
            | Term::Template(_, p) => *p,
        }
    }
}

pub(crate) struct Cursor {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
    /// Tags seen in the current top-level value.
    bound: HashSet<String>,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, SyntaxError> {
        let toks = lex(text)?;
        let lines = text.lines().count().max(1);
        let end = Pos {
            line: lines,
            col: text
                .lines()
                .last()
                .map(|l| l.chars().count() + 1)
                .unwrap_or(1),
        };
        Ok(Cursor {
            toks,
            i: 0,
            end,
            bound: HashSet::new(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub(crate) fn next(&mut self) -> Result<(Tok, Pos), SyntaxError> {
        let t = self
            .toks
            .get(self.i)
            .cloned()
            .ok_or_else(|| SyntaxError::parse(self.end, "unexpected end of input"))?;
        self.i += 1;
        Ok(t)
    }

    pub(crate) fn expect(&mut self, want: Tok) -> Result<Pos, SyntaxError> {
        let (t, p) = self.next()?;
        if t != want {
            return Err(SyntaxError::parse(
                p,
                format!("expected {:?}, found {:?}", want, t),
            ));
        }
        Ok(p)
    }

    pub(crate) fn symbol(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.next()? {
            (Tok::Sym(s), p) => Ok((s, p)),
            (t, p) => Err(SyntaxError::parse(
                p,
                format!("expected symbol, found {:?}", t),
            )),
        }
    }

    pub(crate) fn string(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.next()? {
            (Tok::Str(s), p) => Ok((s, p)),
            (t, p) => Err(SyntaxError::parse(
                p,
                format!("expected string, found {:?}", t),
            )),
        }
    }

    /// One top-level value; tag names start fresh.
    pub(crate) fn term(&mut self) -> Result<Term, SyntaxError> {
        self.bound.clear();
        self.value()
    }

    fn value(&mut self) -> Result<Term, SyntaxError> {
        let (t, p) = self.next()?;
        match t {
            Tok::Tag(name) if !self.bound.insert(name.clone()) => Ok(Term::Tagged(name, None, p)),
            Tok::Tag(name) => {
                let body = match self.peek() {
                    Some(Tok::Sym(_))
                    | Some(Tok::LParen)
                    | Some(Tok::LAngle)
                    | Some(Tok::LBrace)
                    | Some(Tok::Template(_)) => Some(Box::new(self.value()?)),
                    _ => None,
                };
                Ok(Term::Tagged(name, body, p))
            }
            Tok::Sym(s) => Ok(Term::Atom(s, p)),
            Tok::Template(s) => Ok(Term::Template(s, p)),
            Tok::LParen => {
                let (ty, _) = self.symbol()?;
                let mut feats = Vec::new();
                loop {
                    match self.next()? {
                        (Tok::RParen, _) => break,
                        (Tok::Key(k), kp) => {
                            let v = self.value()?;
                            feats.push((k, v, kp));
                        }
                        (t, p) => {
                            return Err(SyntaxError::parse(
                                p,
                                format!("expected `:feature` or `)`, found {:?}", t),
                            ))
                        }
                    }
                }
                Ok(Term::Avm(ty, feats, p))
            }
            Tok::LAngle => {
                let mut items = Vec::new();
                let mut tail = None;
                loop {
                    match self.peek() {
                        Some(Tok::RAngle) => {
                            self.next()?;
                            break;
                        }
                        Some(Tok::Dot) => {
                            self.next()?;
                            tail = Some(Box::new(self.value()?));
                            self.expect(Tok::RAngle)?;
                            break;
                        }
                        _ => items.push(self.value()?),
                    }
                }
                Ok(Term::List(items, tail, p))
            }
            Tok::LBrace => {
                let mut elems = Vec::new();
                while self.peek() != Some(&Tok::RBrace) {
                    elems.push(self.value()?);
                }
                self.next()?;
                if elems.len() > 1 {
                    return Err(SyntaxError::parse(p, "sets hold at most one element"));
                }
                Ok(Term::Set(elems, p))
            }
            t => Err(SyntaxError::parse(p, format!("unexpected {:?}", t))),
        }
    }
}

/// Builds terms into a work graph. Tags are scoped to one builder; each
/// template expansion gets a fresh tag scope.
pub(crate) struct Builder<'a, 'h> {
    pub(crate) work: Work<'h>,
    templates: &'a HashMap<String, Term>,
}

impl<'a, 'h> Builder<'a, 'h> {
    pub(crate) fn new(h: &'h TypeHierarchy, templates: &'a HashMap<String, Term>) -> Self {
        Builder {
            work: Work::new(h),
            templates,
        }
    }

    pub(crate) fn build(&mut self, t: &Term) -> Result<WId, SyntaxError> {
        let mut tags = HashMap::new();
        self.build_in(t, &mut tags, 0)
    }

    fn build_in(
        &mut self,
        t: &Term,
        tags: &mut HashMap<String, WId>,
        depth: usize,
    ) -> Result<WId, SyntaxError> {
        let h = self.work.h;
        let ty_err = |pos, source| SyntaxError::Type { pos, source };
        match t {
            Term::Tagged(name, body, pos) => {
                let node = match tags.get(name) {
                    Some(&n) => n,
                    None => {
                        let n = self.work.var(h.top());
                        tags.insert(name.clone(), n);
                        n
                    }
                };
                if let Some(b) = body {
                    let v = self.build_in(b, tags, depth)?;
                    self.work
                        .unify(node, v)
                        .map_err(|source| SyntaxError::Unify { pos: *pos, source })?;
                }
                Ok(node)
            }
            Term::Atom(s, pos) => {
                let ty = h.type_id(s).map_err(|e| ty_err(*pos, e))?;
                Ok(self.work.var(ty))
            }
            Term::Avm(s, feats, pos) => {
                let ty = h.type_id(s).map_err(|e| ty_err(*pos, e))?;
                let mut fv = Vec::new();
                for (k, v, kp) in feats {
                    let f = h.feature(k).map_err(|e| ty_err(*kp, e))?;
                    if !h.is_appropriate(ty, f) {
                        return Err(ty_err(
                            *kp,
                            HierarchyError::UnknownFeature(format!(
                                "{} (not appropriate for `{}`)",
                                k, s
                            )),
                        ));
                    }
                    if fv.iter().any(|(g, _)| *g == f) {
                        return Err(SyntaxError::parse(
                            *kp,
                            format!("feature `{}` given twice", k),
                        ));
                    }
                    let n = self.build_in(v, tags, depth)?;
                    fv.push((f, n));
                }
                Ok(self.work.avm(ty, fv))
            }
            Term::List(items, tail, _) => {
                let mut is = Vec::new();
                for i in items {
                    is.push(self.build_in(i, tags, depth)?);
                }
                let tail = match tail {
                    Some(t) => {
                        let n = self.build_in(t, tags, depth)?;
                        let list = self.work.var(h.list());
                        self.work
                            .unify(n, list)
                            .map_err(|source| SyntaxError::Unify {
                                pos: t.pos(),
                                source,
                            })?;
                        Some(n)
                    }
                    None => None,
                };
                Ok(self.work.list(is, tail))
            }
            Term::Set(elems, _) => {
                let mut es = Vec::new();
                for e in elems {
                    es.push(self.build_in(e, tags, depth)?);
                }
                Ok(self.work.set(es))
            }
            Term::Template(name, pos) => {
                if depth > 32 {
                    return Err(SyntaxError::parse(*pos, "template expansion too deep"));
                }
                let body = self
                    .templates
                    .get(name)
                    .ok_or_else(|| {
                        SyntaxError::parse(*pos, format!("unknown template `@{}`", name))
                    })?
                    .clone();
                let mut fresh = HashMap::new();
                self.build_in(&body, &mut fresh, depth + 1)
            }
        }
    }
}

/// Reads a single AVM value.
pub fn read_fs(h: &TypeHierarchy, text: &str) -> Result<FeatureStructure, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let term = cur.term()?;
    if !cur.at_end() {
        return Err(SyntaxError::parse(cur.pos(), "trailing input after value"));
    }
    let templates = HashMap::new();
    let mut b = Builder::new(h, &templates);
    let root = b.build(&term)?;
    b.work.finish(root).map_err(|source| SyntaxError::Unify {
        pos: term.pos(),
        source,
    })
}

/// Reads a signature file: one `(deftype NAME (PARENT ...) (FEATURE ...))`
/// form per type. Features are introduced by exactly one type.
pub fn read_signature(text: &str) -> Result<TypeHierarchy, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    let mut decls = Vec::new();
    while !cur.at_end() {
        let start = cur.expect(Tok::LParen)?;
        let (kw, kp) = cur.symbol()?;
        if kw != "deftype" {
            return Err(SyntaxError::parse(
                kp,
                format!("expected `deftype`, found `{}`", kw),
            ));
        }
        let (name, _) = cur.symbol()?;
        let mut lists = Vec::new();
        for _ in 0..2 {
            let mut names = Vec::new();
            if cur.peek() == Some(&Tok::LParen) {
                cur.next()?;
                while cur.peek() != Some(&Tok::RParen) {
                    names.push(cur.symbol()?.0);
                }
                cur.next()?;
            }
            lists.push(names);
        }
        cur.expect(Tok::RParen)?;
        let features = lists.pop().unwrap();
        let parents = lists.pop().unwrap();
        decls.push((
            TypeDecl {
                name,
                parents,
                features,
            },
            start,
        ));
    }
    let plain: Vec<TypeDecl> = decls.iter().map(|(d, _)| d.clone()).collect();
    TypeHierarchy::new(&plain).map_err(|source| {
        let pos = match &source {
            HierarchyError::UnknownType(n)
            | HierarchyError::DuplicateType(n)
            | HierarchyError::Cycle(n) => decls
                .iter()
                .find(|(d, _)| &d.name == n || d.parents.contains(n))
                .map(|(_, p)| *p)
                .unwrap_or_default(),
            _ => Pos::default(),
        };
        SyntaxError::Type { pos, source }
    })
}

/// Canonical printer. Tags only nodes that are reached more than once;
/// list nodes are printed inline wherever they occur.
pub struct Printer<'a> {
    h: &'a TypeHierarchy,
    fs: &'a FeatureStructure,
    pretty: bool,
}

impl<'a> Printer<'a> {
    pub fn new(h: &'a TypeHierarchy, fs: &'a FeatureStructure) -> Self {
        Printer {
            h,
            fs,
            pretty: false,
        }
    }

    /// Multi-line output, one feature per line.
    pub fn pretty(mut self) -> Self {
        self.pretty = true;
        self
    }

    fn count(&self, n: NodeId, counts: &mut BTreeMap<NodeId, usize>) {
        let node = self.fs.node(n);
        let is_list = matches!(node.content, Content::List { .. });
        if !is_list {
            let c = counts.entry(n).or_insert(0);
            *c += 1;
            if *c > 1 {
                return;
            }
        }
        match &node.content {
            Content::Avm(fs) => fs.iter().for_each(|(_, v)| self.count(*v, counts)),
            Content::List { items, tail } => {
                items.iter().for_each(|v| self.count(*v, counts));
                if let Some(t) = tail {
                    self.count(*t, counts);
                }
            }
            Content::Set(e) => e.iter().for_each(|v| self.count(*v, counts)),
        }
    }

    fn write(
        &self,
        n: NodeId,
        out: &mut String,
        counts: &BTreeMap<NodeId, usize>,
        tags: &mut HashMap<NodeId, usize>,
        indent: usize,
    ) {
        let node = self.fs.node(n);
        if counts.get(&n).copied().unwrap_or(0) > 1 {
            if let Some(t) = tags.get(&n) {
                out.push_str(&format!("#{}", t));
                return;
            }
            let t = tags.len() + 1;
            tags.insert(n, t);
            out.push_str(&format!("#{} ", t));
        }
        match &node.content {
            Content::Avm(fs) if fs.is_empty() => out.push_str(self.h.type_name(node.ty)),
            Content::Avm(fs) => {
                out.push('(');
                out.push_str(self.h.type_name(node.ty));
                // Lexicographic by name rather than interning order.
                let mut sorted: Vec<_> = fs.iter().collect();
                sorted.sort_by_key(|(f, _)| self.h.feature_name(*f));
                for (f, v) in sorted {
                    if self.pretty {
                        out.push('\n');
                        out.push_str(&"  ".repeat(indent + 1));
                    } else {
                        out.push(' ');
                    }
                    out.push(':');
                    out.push_str(self.h.feature_name(*f));
                    out.push(' ');
                    self.write(*v, out, counts, tags, indent + 1);
                }
                out.push(')');
            }
            Content::List { items, tail } => {
                out.push('<');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    self.write(*v, out, counts, tags, indent + 1);
                }
                if let Some(t) = tail {
                    if !items.is_empty() {
                        out.push(' ');
                    }
                    out.push_str(". ");
                    self.write(*t, out, counts, tags, indent + 1);
                }
                out.push('>');
            }
            Content::Set(e) => {
                out.push('{');
                if let Some(v) = e {
                    self.write(*v, out, counts, tags, indent + 1);
                }
                out.push('}');
            }
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut counts = BTreeMap::new();
        self.count(self.fs.root(), &mut counts);
        let mut out = String::new();
        self.write(self.fs.root(), &mut out, &counts, &mut HashMap::new(), 0);
        f.write_str(&out)
    }
}

pub fn print_fs(h: &TypeHierarchy, fs: &FeatureStructure) -> String {
    Printer::new(h, fs).to_string()
}
