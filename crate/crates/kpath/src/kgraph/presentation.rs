//! The textual presentation format and its expansion into a concrete
//! skeleton.
//!
//! ```text
//! # Λ_tg
//! rank: 2
//! vertices:
//!   v w t u
//! edges:
//!   lambda   1 w -> v
//!   mu       2 t -> v
//!   alpha[n] 2 u -> w
//!   beta[n]  1 u -> t
//! squares:
//!   mu.beta[n] = lambda.alpha[n]
//! ```
//!
//! Words are written from the range end, so `mu.beta[n]` is "β_n then μ".
//! Bracketed indices are variables ranging over `1, 2, 3, ...`; a square
//! must use the same variables on both sides. A presentation is expanded at
//! a cutoff `N`, instantiating every variable with `1..=N`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub name: String,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub pattern: Pattern,
    pub color: usize,
    pub source: Pattern,
    pub range: Pattern,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareDecl {
    pub left: [Pattern; 2],
    pub right: [Pattern; 2],
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub rank: usize,
    pub vertices: Vec<(Pattern, usize)>,
    pub edges: Vec<EdgeDecl>,
    pub squares: Vec<SquareDecl>,
}

/// A concrete vertex or edge name: family plus index tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub family: String,
    pub index: Vec<u32>,
}

impl Label {
    pub fn plain(family: impl Into<String>) -> Self {
        Label {
            family: family.into(),
            index: Vec::new(),
        }
    }

    pub fn indexed(family: impl Into<String>, index: Vec<u32>) -> Self {
        Label {
            family: family.into(),
            index,
        }
    }

    pub fn render(&self) -> String {
        if self.index.is_empty() {
            self.family.clone()
        } else {
            let idx: Vec<String> = self.index.iter().map(u32::to_string).collect();
            format!("{}[{}]", self.family, idx.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkEdge {
    pub label: Label,
    /// Zero-based color.
    pub color: usize,
    pub source: usize,
    pub range: usize,
}

/// A fully instantiated 1-skeleton with its squares. Each square is a pair
/// of two-edge words written from the range end.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Skeleton {
    pub rank: usize,
    pub vertices: Vec<Label>,
    pub edges: Vec<SkEdge>,
    pub squares: Vec<([usize; 2], [usize; 2])>,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn parse_pattern(tok: &str, line: usize) -> Result<Pattern> {
    let err = |m: String| Error::Parse { line, message: m };
    let tok = tok.trim();
    let (name, vars) = match tok.find('[') {
        None => (tok, Vec::new()),
        Some(i) => {
            if !tok.ends_with(']') {
                return Err(err(format!("unterminated index in {tok:?}")));
            }
            let inner = &tok[i + 1..tok.len() - 1];
            let vars: Vec<String> = inner.split(',').map(|v| v.trim().to_string()).collect();
            if vars.iter().any(|v| !is_ident(v)) {
                return Err(err(format!("indices must be variable names in {tok:?}")));
            }
            (&tok[..i], vars)
        }
    };
    if !is_ident(name) {
        return Err(err(format!("bad identifier {name:?}")));
    }
    Ok(Pattern {
        name: name.to_string(),
        vars,
    })
}

/// Splits a vertex list on whitespace and on commas outside brackets.
fn split_vertex_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '[' => {
                depth += 1;
                cur.push(c);
            }
            ']' => {
                depth -= 1;
                cur.push(c);
            }
            ',' | ' ' | '\t' if depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_word(s: &str, line: usize) -> Result<[Pattern; 2]> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in s.trim().chars() {
        match c {
            '[' => {
                depth += 1;
                cur.push(c)
            }
            ']' => {
                depth -= 1;
                cur.push(c)
            }
            '.' if depth == 0 => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    if parts.len() != 2 {
        return Err(Error::Parse {
            line,
            message: format!("square sides must be two-edge words, got {s:?}"),
        });
    }
    Ok([parse_pattern(&parts[0], line)?, parse_pattern(&parts[1], line)?])
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Presentation> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Vertices,
            Edges,
            Squares,
        }
        let mut section = Section::None;
        let mut rank: Option<usize> = None;
        let mut p = Presentation {
            rank: 0,
            vertices: Vec::new(),
            edges: Vec::new(),
            squares: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse { line, message: m };
            if let Some(rest) = body.strip_prefix("rank:") {
                rank = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| err(format!("bad rank {:?}", rest.trim())))?,
                );
                continue;
            }
            match body {
                "vertices:" => {
                    section = Section::Vertices;
                    continue;
                }
                "edges:" => {
                    section = Section::Edges;
                    continue;
                }
                "squares:" => {
                    section = Section::Squares;
                    continue;
                }
                _ => {}
            }
            match section {
                Section::None => return Err(err(format!("content outside a section: {body:?}"))),
                Section::Vertices => {
                    for tok in split_vertex_tokens(body) {
                        p.vertices.push((parse_pattern(&tok, line)?, line));
                    }
                }
                Section::Edges => {
                    let (lhs, target) = body
                        .split_once("->")
                        .ok_or_else(|| err("edge lines read `name color source -> range`".into()))?;
                    let toks: Vec<&str> = lhs.split_whitespace().collect();
                    if toks.len() != 3 {
                        return Err(err("edge lines read `name color source -> range`".into()));
                    }
                    let color: usize = toks[1]
                        .parse()
                        .map_err(|_| err(format!("bad color {:?}", toks[1])))?;
                    if color == 0 {
                        return Err(err("colors start at 1".into()));
                    }
                    p.edges.push(EdgeDecl {
                        pattern: parse_pattern(toks[0], line)?,
                        color,
                        source: parse_pattern(toks[2], line)?,
                        range: parse_pattern(target.trim(), line)?,
                        line,
                    });
                }
                Section::Squares => {
                    let (l, r) = body
                        .split_once('=')
                        .ok_or_else(|| err("square lines read `a.b = c.d`".into()))?;
                    p.squares.push(SquareDecl {
                        left: parse_word(l, line)?,
                        right: parse_word(r, line)?,
                        line,
                    });
                }
            }
        }
        let max_color = p.edges.iter().map(|e| e.color).max().unwrap_or(1);
        p.rank = match rank {
            Some(k) if k < max_color => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("rank {k} but an edge has color {max_color}"),
                })
            }
            Some(k) => k,
            None => max_color,
        };
        if p.rank == 0 {
            return Err(Error::Parse {
                line: 0,
                message: "rank must be positive".into(),
            });
        }
        p.check_declarations()?;
        Ok(p)
    }

    /// Whether any vertex or edge is an indexed family.
    pub fn has_families(&self) -> bool {
        self.vertices.iter().any(|(v, _)| !v.vars.is_empty())
            || self.edges.iter().any(|e| !e.pattern.vars.is_empty())
    }

    fn check_declarations(&self) -> Result<()> {
        let mut names: HashMap<&str, usize> = HashMap::new();
        let decls = self
            .vertices
            .iter()
            .map(|(v, l)| (v, *l))
            .chain(self.edges.iter().map(|e| (&e.pattern, e.line)));
        for (pat, line) in decls {
            if let Some(first) = names.insert(&pat.name, line) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate name {:?} (first declared on line {first})", pat.name),
                });
            }
            let distinct: BTreeSet<&String> = pat.vars.iter().collect();
            if distinct.len() != pat.vars.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("repeated index variable in {:?}", pat.name),
                });
            }
        }
        let vertex_arity: HashMap<&str, usize> = self
            .vertices
            .iter()
            .map(|(v, _)| (v.name.as_str(), v.vars.len()))
            .collect();
        for e in &self.edges {
            for end in [&e.source, &e.range] {
                let arity = vertex_arity.get(end.name.as_str()).ok_or_else(|| Error::Parse {
                    line: e.line,
                    message: format!("edge {:?} refers to undeclared vertex {:?}", e.pattern.name, end.name),
                })?;
                if *arity != end.vars.len() {
                    return Err(Error::Parse {
                        line: e.line,
                        message: format!("vertex {:?} takes {arity} indices", end.name),
                    });
                }
                if let Some(v) = end.vars.iter().find(|v| !e.pattern.vars.contains(v)) {
                    return Err(Error::Parse {
                        line: e.line,
                        message: format!("variable {v:?} is not bound by edge {:?}", e.pattern.name),
                    });
                }
            }
        }
        let edge_arity: HashMap<&str, usize> = self
            .edges
            .iter()
            .map(|e| (e.pattern.name.as_str(), e.pattern.vars.len()))
            .collect();
        for sq in &self.squares {
            for pat in sq.left.iter().chain(sq.right.iter()) {
                let arity = edge_arity.get(pat.name.as_str()).ok_or_else(|| Error::Parse {
                    line: sq.line,
                    message: format!("square refers to undeclared edge {:?}", pat.name),
                })?;
                if *arity != pat.vars.len() {
                    return Err(Error::Parse {
                        line: sq.line,
                        message: format!("edge {:?} takes {arity} indices", pat.name),
                    });
                }
            }
            let vars = |w: &[Pattern; 2]| -> BTreeSet<String> {
                w.iter().flat_map(|p| p.vars.iter().cloned()).collect()
            };
            if vars(&sq.left) != vars(&sq.right) {
                return Err(Error::Parse {
                    line: sq.line,
                    message: "both sides of a square must use the same index variables".into(),
                });
            }
        }
        Ok(())
    }

    /// Instantiates every family with indices `1..=cutoff`.
    pub fn expand(&self, cutoff: u32) -> Result<Skeleton> {
        if cutoff == 0 {
            return Err(Error::Invalid("cutoff must be at least 1".into()));
        }
        let mut sk = Skeleton {
            rank: self.rank,
            ..Skeleton::default()
        };
        let mut vertex_ix: HashMap<Label, usize> = HashMap::new();
        for (v, _) in &self.vertices {
            for idx in tuples(v.vars.len(), cutoff) {
                let label = Label::indexed(v.name.clone(), idx);
                vertex_ix.insert(label.clone(), sk.vertices.len());
                sk.vertices.push(label);
            }
        }
        let resolve = |pat: &Pattern, env: &HashMap<&str, u32>| -> Vec<u32> {
            pat.vars.iter().map(|v| env[v.as_str()]).collect()
        };
        let mut edge_ix: HashMap<Label, usize> = HashMap::new();
        for e in &self.edges {
            for idx in tuples(e.pattern.vars.len(), cutoff) {
                let env: HashMap<&str, u32> = e
                    .pattern
                    .vars
                    .iter()
                    .map(String::as_str)
                    .zip(idx.iter().copied())
                    .collect();
                let src = Label::indexed(e.source.name.clone(), resolve(&e.source, &env));
                let rng = Label::indexed(e.range.name.clone(), resolve(&e.range, &env));
                let label = Label::indexed(e.pattern.name.clone(), idx);
                edge_ix.insert(label.clone(), sk.edges.len());
                sk.edges.push(SkEdge {
                    label,
                    color: e.color - 1,
                    source: vertex_ix[&src],
                    range: vertex_ix[&rng],
                });
            }
        }
        for sq in &self.squares {
            let vars: Vec<&str> = {
                let set: BTreeSet<&str> = sq
                    .left
                    .iter()
                    .flat_map(|p| p.vars.iter().map(String::as_str))
                    .collect();
                set.into_iter().collect()
            };
            for idx in tuples(vars.len(), cutoff) {
                let env: HashMap<&str, u32> = vars.iter().copied().zip(idx.iter().copied()).collect();
                let get = |p: &Pattern| edge_ix[&Label::indexed(p.name.clone(), resolve(p, &env))];
                sk.squares.push((
                    [get(&sq.left[0]), get(&sq.left[1])],
                    [get(&sq.right[0]), get(&sq.right[1])],
                ));
            }
        }
        Ok(sk)
    }
}

/// All tuples in `{1..=n}^len`, lexicographically.
fn tuples(len: usize, n: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n as usize);
        for t in &out {
            for v in 1..=n {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// One square added by [`Skeleton::complete_squares`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub path: [usize; 2],
    pub vertex: usize,
    pub edges: [usize; 2],
}

impl Skeleton {
    fn incoming(&self) -> Vec<Vec<usize>> {
        let mut into = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            into[e.range].push(i);
        }
        into
    }

    /// Two-edge bicolored words `[e, f]` (range end first) lying in no square.
    pub fn unsquared_paths(&self) -> Vec<[usize; 2]> {
        let squared: BTreeSet<[usize; 2]> = self
            .squares
            .iter()
            .flat_map(|(l, r)| [*l, *r])
            .collect();
        let into = self.incoming();
        let mut out = Vec::new();
        for (e, ee) in self.edges.iter().enumerate() {
            for &f in &into[ee.source] {
                if self.edges[f].color != ee.color && !squared.contains(&[e, f]) {
                    out.push([e, f]);
                }
            }
        }
        out
    }

    /// Adds, for each bicolored word lying in no square, a fresh vertex and
    /// two fresh edges forming the complementary side of a new square; repeats
    /// until every bicolored word is squared. New names are derived from the
    /// families of the word and carry the concatenated index tuples, so
    /// index-uniformity is preserved. Rank 2 only.
    pub fn complete_squares(&mut self, max_rounds: usize) -> Result<Vec<Completion>> {
        if self.rank != 2 {
            return Err(Error::Unsupported("square completion needs rank 2".into()));
        }
        let mut added = Vec::new();
        for _ in 0..max_rounds {
            let todo = self.unsquared_paths();
            if todo.is_empty() {
                return Ok(added);
            }
            for [e, f] in todo {
                let (er, fr) = (self.edges[e].clone(), self.edges[f].clone());
                let tag = format!("{}_{}", er.label.family, fr.label.family);
                let index: Vec<u32> = er.label.index.iter().chain(&fr.label.index).copied().collect();
                let x = self.vertices.len();
                self.vertices.push(Label::indexed(format!("x_{tag}"), index.clone()));
                let into_range = self.edges.len();
                self.edges.push(SkEdge {
                    label: Label::indexed(format!("in_{tag}"), index.clone()),
                    color: fr.color,
                    source: x,
                    range: er.range,
                });
                let out_source = self.edges.len();
                self.edges.push(SkEdge {
                    label: Label::indexed(format!("out_{tag}"), index),
                    color: er.color,
                    source: fr.source,
                    range: x,
                });
                self.squares.push(([e, f], [into_range, out_source]));
                added.push(Completion {
                    path: [e, f],
                    vertex: x,
                    edges: [into_range, out_source],
                });
            }
        }
        Err(Error::Invalid(format!(
            "square completion did not close after {max_rounds} rounds"
        )))
    }
}
