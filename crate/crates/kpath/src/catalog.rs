//! Built-in graphs: three infinite 2-graphs (as index-uniform
//! presentations truncated at a cutoff) and small finite
//! fixtures. Ground truth travels with each entry as annotations that the
//! alignment and path-space layers cross-validate.
//!
//! Color convention: solid edges in the skeleton drawings are color 1,
//! dashed edges are color 2.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kgraph::presentation::Presentation;
use crate::kgraph::{split_word, KGraph, Morphism};

/// A morphism name with index variables, e.g. `lambda.alpha[i,n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismPattern {
    text: String,
    tokens: Vec<(String, Vec<Arg>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Arg {
    Var(String),
    Val(u32),
}

impl MorphismPattern {
    pub fn parse(text: &str) -> Result<MorphismPattern> {
        let mut tokens = Vec::new();
        for tok in split_word(text) {
            let (name, args) = match tok.find('[') {
                None => (tok.clone(), Vec::new()),
                Some(i) => {
                    let inner = tok[i + 1..].trim_end_matches(']');
                    let args = inner
                        .split(',')
                        .map(|a| {
                            let a = a.trim();
                            a.parse::<u32>()
                                .map(Arg::Val)
                                .unwrap_or_else(|_| Arg::Var(a.to_string()))
                        })
                        .collect();
                    (tok[..i].to_string(), args)
                }
            };
            if name.is_empty() {
                return Err(Error::Invalid(format!("bad pattern {text:?}")));
            }
            tokens.push((name, args));
        }
        Ok(MorphismPattern {
            text: text.to_string(),
            tokens,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.tokens
            .iter()
            .flat_map(|(_, a)| a.iter())
            .filter_map(|a| match a {
                Arg::Var(v) => Some(v.clone()),
                Arg::Val(_) => None,
            })
            .collect()
    }

    /// The name obtained by substituting `env`; unbound variables are an error.
    pub fn instantiate(&self, env: &HashMap<String, u32>) -> Result<String> {
        let mut out = String::new();
        for (i, (name, args)) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push('.');
            }
            out.push_str(name);
            if !args.is_empty() {
                out.push('[');
                for (j, a) in args.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    let v = match a {
                        Arg::Val(v) => *v,
                        Arg::Var(x) => *env
                            .get(x)
                            .ok_or_else(|| Error::Invalid(format!("unbound variable {x} in {}", self.text)))?,
                    };
                    let _ = write!(out, "{v}");
                }
                out.push(']');
            }
        }
        Ok(out)
    }

    /// The morphism named by substituting `env`, normalized by the graph.
    pub fn morphism(&self, g: &KGraph, env: &HashMap<String, u32>) -> Result<Morphism> {
        g.parse_morphism(&self.instantiate(env)?)
    }

    /// Matches the rendered normal form of `m`, returning the binding.
    pub fn bind(&self, g: &KGraph, m: &Morphism) -> Option<HashMap<String, u32>> {
        let name = g.name(m);
        let toks = split_word(&name);
        if toks.len() != self.tokens.len() {
            return None;
        }
        let mut env = HashMap::new();
        for (tok, (pname, pargs)) in toks.iter().zip(&self.tokens) {
            let (n, vals): (&str, Vec<u32>) = match tok.find('[') {
                None => (tok.as_str(), Vec::new()),
                Some(i) => (
                    &tok[..i],
                    tok[i + 1..tok.len() - 1]
                        .split(',')
                        .map(|v| v.parse().unwrap_or(0))
                        .collect(),
                ),
            };
            if n != pname || vals.len() != pargs.len() {
                return None;
            }
            for (v, a) in vals.iter().zip(pargs) {
                match a {
                    Arg::Val(x) if x != v => return None,
                    Arg::Val(_) => {}
                    Arg::Var(x) => {
                        if let Some(prev) = env.insert(x.clone(), *v) {
                            if prev != *v {
                                return None;
                            }
                        }
                    }
                }
            }
        }
        Some(env)
    }

    pub fn matches(&self, g: &KGraph, m: &Morphism) -> bool {
        self.bind(g, m).is_some()
    }
}

/// Declared finite-alignment ground truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaAnnotation {
    /// Nothing declared.
    None,
    /// FA(Λ) is everything except morphisms matching these patterns.
    Complement(Vec<MorphismPattern>),
    /// FA(Λ) = ∅.
    Empty,
}

/// A declared MCE pair whose MCE set is the infinite family `family`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MceAnnotation {
    pub left: MorphismPattern,
    pub right: MorphismPattern,
    /// Pattern with one extra variable `n` beyond those of `left`/`right`.
    pub family: MorphismPattern,
}

/// A declared sequence `n ↦ ↓pattern(n)` of principal filters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyDecl {
    pub pattern: MorphismPattern,
    pub var: String,
}

impl FamilyDecl {
    pub fn new(pattern: &str) -> FamilyDecl {
        FamilyDecl {
            pattern: MorphismPattern::parse(pattern).expect("static pattern"),
            var: "n".into(),
        }
    }

    pub fn describe(&self) -> String {
        format!("down({})", self.pattern.text())
    }
}

/// Restricts enumeration to the first `blocks` blocks of a materialized
/// prefix of an infinite chain; the extra materialized layer only provides
/// witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scope {
    pub blocks: u32,
    pub vertex_block: Vec<u32>,
    pub edge_block: Vec<u32>,
}

impl Scope {
    pub fn contains(&self, m: &Morphism) -> bool {
        self.vertex_block[m.range() as usize] <= self.blocks
            && m.word().iter().all(|&e| self.edge_block[e as usize] <= self.blocks)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    pub fa: Option<FaAnnotation>,
    pub mce: Vec<MceAnnotation>,
    pub families: Vec<FamilyDecl>,
    pub scope: Option<Scope>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Params {
    pub cutoff: u32,
    pub blocks: Option<u32>,
    pub size: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Params,
    pub graph: KGraph,
    pub annotations: Annotations,
    /// The presentation text (before any square completion).
    pub source: String,
}

impl CatalogEntry {
    /// Wraps a user graph with no annotations.
    pub fn plain(name: &str, graph: KGraph, source: String) -> CatalogEntry {
        CatalogEntry {
            name: name.to_string(),
            params: Params {
                cutoff: graph.cutoff(),
                blocks: None,
                size: None,
            },
            graph,
            annotations: Annotations::default(),
            source,
        }
    }

    pub fn in_scope(&self, m: &Morphism) -> bool {
        self.annotations.scope.as_ref().is_none_or(|s| s.contains(m))
    }

    /// `enumerate_morphisms` restricted to the annotated scope.
    pub fn morphisms(&self, bound: &crate::degree::Degree) -> (Vec<Morphism>, crate::kgraph::Completeness) {
        let (mut all, flag) = self.graph.enumerate_morphisms(bound);
        all.retain(|m| self.in_scope(m));
        (all, flag)
    }

    /// Declared FA membership, if any.
    pub fn declared_fa(&self, m: &Morphism) -> Option<bool> {
        match self.annotations.fa.as_ref()? {
            FaAnnotation::None => None,
            FaAnnotation::Empty => Some(false),
            FaAnnotation::Complement(pats) => Some(!pats.iter().any(|p| p.matches(&self.graph, m))),
        }
    }

    /// Whether the graph's underlying category is finite.
    pub fn is_finite(&self) -> bool {
        !self.graph.is_indexed() && self.annotations.scope.is_none() && !self.graph.has_cycle()
    }
}

pub const TG_TEXT: &str = "\
# Λ_tg: relations mu.beta[n] = lambda.alpha[n]
rank: 2
vertices:
  v w t u
edges:
  lambda   1 w -> v
  mu       2 t -> v
  alpha[n] 2 u -> w
  beta[n]  1 u -> t
squares:
  mu.beta[n] = lambda.alpha[n]
";

pub const YEE_TEXT: &str = "\
# Yeend's 2-graph: relations mu[i].beta[i,j] = lambda.alpha[i,j]
rank: 2
vertices:
  v w t[i] u[i,j]
edges:
  lambda     1 w -> v
  mu[i]      2 t[i] -> v
  alpha[i,j] 2 u[i,j] -> w
  beta[i,j]  1 u[i,j] -> t[i]
squares:
  mu[i].beta[i,j] = lambda.alpha[i,j]
";

/// A finite 2-graph whose squares pair the paths non-diagonally.
pub const TWISTED_TEXT: &str = "\
rank: 2
vertices:
  v p q u
edges:
  x1 1 p -> v
  x2 1 p -> v
  w1 1 u -> q
  w2 1 u -> q
  z1 2 q -> v
  z2 2 q -> v
  y1 2 u -> p
  y2 2 u -> p
squares:
  x1.y1 = z1.w2
  x1.y2 = z2.w1
  x2.y1 = z2.w2
  x2.y2 = z1.w1
";

fn pats(ps: &[&str]) -> Vec<MorphismPattern> {
    ps.iter().map(|p| MorphismPattern::parse(p).expect("static pattern")).collect()
}

fn mce(l: &str, r: &str, fam: &str) -> MceAnnotation {
    MceAnnotation {
        left: MorphismPattern::parse(l).expect("static pattern"),
        right: MorphismPattern::parse(r).expect("static pattern"),
        family: MorphismPattern::parse(fam).expect("static pattern"),
    }
}

/// Λ_tg truncated at `cutoff`.
pub fn lambda_tg(cutoff: u32) -> Result<CatalogEntry> {
    if cutoff == 0 {
        return Err(Error::Invalid("cutoff must be at least 1".into()));
    }
    Ok(CatalogEntry {
        name: "tg".into(),
        params: Params {
            cutoff,
            blocks: None,
            size: None,
        },
        graph: KGraph::load(TG_TEXT, cutoff)?,
        annotations: Annotations {
            fa: Some(FaAnnotation::Complement(pats(&["v", "lambda", "mu"]))),
            mce: vec![mce("lambda", "mu", "lambda.alpha[n]")],
            families: vec![
                FamilyDecl::new("alpha[n]"),
                FamilyDecl::new("beta[n]"),
                FamilyDecl::new("lambda.alpha[n]"),
            ],
            scope: None,
        },
        source: TG_TEXT.to_string(),
    })
}

/// Yeend's 2-graph truncated at `cutoff`.
pub fn lambda_yee(cutoff: u32) -> Result<CatalogEntry> {
    if cutoff == 0 {
        return Err(Error::Invalid("cutoff must be at least 1".into()));
    }
    Ok(CatalogEntry {
        name: "yee".into(),
        params: Params {
            cutoff,
            blocks: None,
            size: None,
        },
        graph: KGraph::load(YEE_TEXT, cutoff)?,
        annotations: Annotations {
            fa: Some(FaAnnotation::Complement(pats(&["v", "lambda", "mu[i]"]))),
            mce: vec![mce("lambda", "mu[i]", "lambda.alpha[i,n]")],
            families: vec![
                FamilyDecl::new("alpha[1,n]"),
                FamilyDecl::new("beta[1,n]"),
                FamilyDecl::new("lambda.alpha[1,n]"),
                FamilyDecl::new("mu[n]"),
                FamilyDecl::new("alpha[n,1]"),
            ],
            scope: None,
        },
        source: YEE_TEXT.to_string(),
    })
}

/// The presentation text of the first `layers` blocks of Λ_tg^∞.
///
/// Block `m` has vertices `v{m}`, `t{m}`, `w{m}` and edges `lambda{m}`,
/// `mu{m}`, `alpha{m}[n]`, `beta{m}[n]`; its top vertex is `v{m+1}`.
pub fn tg_infinity_text(layers: u32) -> String {
    let mut s = String::from("# first blocks of the tg-infinity chain\nrank: 2\nvertices:\n ");
    for m in 1..=layers + 1 {
        let _ = write!(s, " v{m}");
    }
    for m in 1..=layers {
        let _ = write!(s, " t{m} w{m}");
    }
    s.push_str("\nedges:\n");
    for m in 1..=layers {
        let _ = writeln!(s, "  lambda{m} 1 w{m} -> v{m}");
        let _ = writeln!(s, "  mu{m} 2 t{m} -> v{m}");
        let _ = writeln!(s, "  alpha{m}[n] 2 v{} -> w{m}", m + 1);
        let _ = writeln!(s, "  beta{m}[n] 1 v{} -> t{m}", m + 1);
    }
    s.push_str("squares:\n");
    for m in 1..=layers {
        let _ = writeln!(s, "  mu{m}.beta{m}[n] = lambda{m}.alpha{m}[n]");
    }
    s
}

/// Λ_tg^∞ with `blocks` blocks in scope.
///
/// The drawn skeleton leaves the bicolored paths `beta{m}[n].mu{m+1}` and
/// `alpha{m}[n].lambda{m+1}` through each junction vertex without squares,
/// so it does not define a 2-graph by itself. The chain is completed by
/// adjoining, for every such path, a fresh vertex and two edges forming the
/// other side of a square (iterated until closed). The completion adds no
/// edges into any `v{m}`, so the relations `mu{m}.beta{m}[n] =
/// lambda{m}.alpha{m}[n]` and the failure of finite alignment at
/// `(lambda{m}, mu{m})` are unchanged. One extra block is materialized so
/// every in-scope morphism has a witness.
pub fn lambda_tg_infinity(blocks: u32, cutoff: u32) -> Result<CatalogEntry> {
    if blocks == 0 || cutoff == 0 {
        return Err(Error::Invalid("blocks and cutoff must be at least 1".into()));
    }
    let layers = blocks + 1;
    let text = tg_infinity_text(layers);
    let p = Presentation::parse(&text)?;
    let mut sk = p.expand(cutoff)?;
    let block_of = |family: &str| -> u32 {
        let digits: String = family.chars().filter(|c| c.is_ascii_digit()).collect();
        digits.parse().unwrap_or(1)
    };
    let mut vertex_block: Vec<u32> = sk
        .vertices
        .iter()
        .map(|l| {
            let m = block_of(&l.family);
            if l.family.starts_with('v') && m > 1 {
                m - 1
            } else {
                m
            }
        })
        .collect();
    let mut edge_block: Vec<u32> = sk.edges.iter().map(|e| block_of(&e.label.family)).collect();
    let added = sk.complete_squares(4 * layers as usize + 4)?;
    for c in added {
        let b = edge_block[c.path[0]].max(edge_block[c.path[1]]);
        vertex_block.push(b);
        edge_block.push(b);
        edge_block.push(b);
    }
    let graph = KGraph::from_skeleton(&sk, cutoff)?;
    let mut mces = Vec::new();
    for m in 1..=layers {
        mces.push(mce(&format!("lambda{m}"), &format!("mu{m}"), &format!("lambda{m}.alpha{m}[n]")));
    }
    Ok(CatalogEntry {
        name: "tg-infinity".into(),
        params: Params {
            cutoff,
            blocks: Some(blocks),
            size: None,
        },
        graph,
        annotations: Annotations {
            fa: Some(FaAnnotation::Empty),
            mce: mces,
            families: vec![FamilyDecl::new("alpha1[n]"), FamilyDecl::new("beta1[n]")],
            scope: Some(Scope {
                blocks,
                vertex_block,
                edge_block,
            }),
        },
        source: text,
    })
}

/// Presentation text of the `n × n` truncation of Ω₂: vertices `v{a}_{b}`,
/// color-1 edges `h{a}_{b}` from `(a+1,b)` and color-2 edges `k{a}_{b}` from
/// `(a,b+1)`.
pub fn grid_text(n: u32) -> String {
    let mut s = String::from("rank: 2\nvertices:\n ");
    for a in 0..n {
        for b in 0..n {
            let _ = write!(s, " v{a}_{b}");
        }
    }
    s.push_str("\nedges:\n");
    for a in 0..n {
        for b in 0..n {
            if a + 1 < n {
                let _ = writeln!(s, "  h{a}_{b} 1 v{}_{b} -> v{a}_{b}", a + 1);
            }
            if b + 1 < n {
                let _ = writeln!(s, "  k{a}_{b} 2 v{a}_{} -> v{a}_{b}", b + 1);
            }
        }
    }
    s.push_str("squares:\n");
    for a in 0..n.saturating_sub(1) {
        for b in 0..n.saturating_sub(1) {
            let _ = writeln!(s, "  h{a}_{b}.k{}_{b} = k{a}_{b}.h{a}_{}", a + 1, b + 1);
        }
    }
    s
}

fn finite(name: &str, text: String, size: Option<u32>) -> Result<CatalogEntry> {
    Ok(CatalogEntry {
        name: name.into(),
        params: Params {
            cutoff: 1,
            blocks: None,
            size,
        },
        graph: KGraph::load(&text, 1)?,
        annotations: Annotations::default(),
        source: text,
    })
}

pub fn grid(n: u32) -> Result<CatalogEntry> {
    if n == 0 {
        return Err(Error::Invalid("grid size must be at least 1".into()));
    }
    finite("grid", grid_text(n), Some(n))
}

/// The 1-graph cycle on `len` vertices `c0 .. c{len-1}`, edge `e{i}` from
/// `c{i+1}` to `c{i}`.
pub fn cycle(len: u32) -> Result<CatalogEntry> {
    if len == 0 {
        return Err(Error::Invalid("cycle length must be at least 1".into()));
    }
    let mut s = String::from("rank: 1\nvertices:\n ");
    for i in 0..len {
        let _ = write!(s, " c{i}");
    }
    s.push_str("\nedges:\n");
    for i in 0..len {
        let _ = writeln!(s, "  e{i} 1 c{} -> c{i}", (i + 1) % len);
    }
    finite("cycle", s, Some(len))
}

pub fn twisted() -> Result<CatalogEntry> {
    finite("twisted", TWISTED_TEXT.to_string(), None)
}

pub fn point() -> Result<CatalogEntry> {
    finite("point", "rank: 2\nvertices:\n  v\n".to_string(), None)
}

/// The finite fixtures: a 1-graph cycle, 2×2 and 3×3 grids, the twisted
/// 2-graph and the one-vertex graph.
pub fn finite_examples() -> Vec<CatalogEntry> {
    vec![
        cycle(2).expect("static"),
        grid(2).expect("static"),
        grid(3).expect("static"),
        twisted().expect("static"),
        point().expect("static"),
    ]
}

/// Catalog lookup by CLI name.
pub fn by_name(name: &str, cutoff: u32, blocks: u32, size: u32) -> Result<CatalogEntry> {
    match name {
        "tg" => lambda_tg(cutoff),
        "tg-infinity" => lambda_tg_infinity(blocks, cutoff),
        "yee" => lambda_yee(cutoff),
        "grid" => grid(size),
        "cycle" => cycle(size),
        "twisted" => twisted(),
        "point" => point(),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

pub const NAMES: &[&str] = &["tg", "tg-infinity", "yee", "grid", "cycle", "twisted", "point"];
