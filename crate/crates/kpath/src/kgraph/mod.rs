//! k-graphs as computable categories.
//!
//! A graph is built from a [`Skeleton`] (usually the expansion of a
//! [`Presentation`] at a family cutoff). Morphisms are stored in
//! color-sorted normal form: every color-1 edge, then every color-2 edge,
//! written from the range end. For rank 2 the rewrite `c2 c1 -> c1 c2` given
//! by the squares is terminating, and it is confluent because no two rules
//! overlap once each bicolored word lies in exactly one square.

pub mod presentation;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::degree::Degree;
use crate::error::{Error, Result};
pub use presentation::{Label, Presentation, Skeleton};

pub type VertexId = u32;
pub type EdgeId = u32;

/// A morphism in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    range: VertexId,
    source: VertexId,
    degree: Degree,
    word: SmallVec<[EdgeId; 4]>,
}

impl Morphism {
    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn word(&self) -> &[EdgeId] {
        &self.word
    }

    pub fn is_vertex(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}<-{} {:?} {:?})", self.range, self.source, self.degree, self.word)
    }
}

/// Whether an enumeration is the whole answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    /// Every element is listed.
    Exact,
    /// The true set is infinite; only the truncation is listed.
    Truncated,
    /// The cutoff leaves no spare index value, so finiteness was not decided.
    Unknown,
}

impl Completeness {
    pub fn meet(self, other: Completeness) -> Completeness {
        self.max(other)
    }
}

#[derive(Clone, Debug)]
pub struct Fiber {
    pub items: Vec<Morphism>,
    pub completeness: Completeness,
}

#[derive(Clone, Debug)]
struct Edge {
    label: Label,
    name: String,
    color: usize,
    source: VertexId,
    range: VertexId,
}

/// A validated k-graph (k ≤ 2 when built from a skeleton).
#[derive(Clone, Debug)]
pub struct KGraph {
    rank: usize,
    cutoff: u32,
    indexed: bool,
    vertices: Vec<(Label, String)>,
    edges: Vec<Edge>,
    vertex_ix: HashMap<String, VertexId>,
    edge_ix: HashMap<String, EdgeId>,
    /// `into[v][c]`: edges of color `c` with range `v`.
    into: Vec<Vec<Vec<EdgeId>>>,
    /// `(c2 edge, c1 edge) -> (c1 edge, c2 edge)`.
    down: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    /// `(c1 edge, c2 edge) -> (c2 edge, c1 edge)`.
    up: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
}

impl KGraph {
    /// Parses, expands at `cutoff` and validates.
    pub fn load(text: &str, cutoff: u32) -> Result<KGraph> {
        let p = Presentation::parse(text)?;
        let sk = p.expand(cutoff)?;
        KGraph::from_skeleton(&sk, cutoff)
    }

    pub fn from_skeleton(sk: &Skeleton, cutoff: u32) -> Result<KGraph> {
        if sk.rank == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        if sk.rank > 2 {
            return Err(Error::Unsupported(
                "presentations are limited to rank at most 2".into(),
            ));
        }
        let indexed = sk.vertices.iter().any(|l| !l.index.is_empty())
            || sk.edges.iter().any(|e| !e.label.index.is_empty());
        let mut g = KGraph {
            rank: sk.rank,
            cutoff,
            indexed,
            vertices: Vec::with_capacity(sk.vertices.len()),
            edges: Vec::with_capacity(sk.edges.len()),
            vertex_ix: HashMap::new(),
            edge_ix: HashMap::new(),
            into: vec![vec![Vec::new(); sk.rank]; sk.vertices.len()],
            down: HashMap::new(),
            up: HashMap::new(),
        };
        for (i, l) in sk.vertices.iter().enumerate() {
            let name = l.render();
            if g.vertex_ix.insert(name.clone(), i as VertexId).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex {name}")));
            }
            g.vertices.push((l.clone(), name));
        }
        for (i, e) in sk.edges.iter().enumerate() {
            let name = e.label.render();
            if e.color >= sk.rank {
                return Err(Error::Invalid(format!("edge {name} has color {} > rank", e.color + 1)));
            }
            if e.source >= sk.vertices.len() || e.range >= sk.vertices.len() {
                return Err(Error::Invalid(format!("edge {name} has a dangling endpoint")));
            }
            if g.vertex_ix.contains_key(&name) || g.edge_ix.insert(name.clone(), i as EdgeId).is_some() {
                return Err(Error::Invalid(format!("duplicate name {name}")));
            }
            g.into[e.range][e.color].push(i as EdgeId);
            g.edges.push(Edge {
                label: e.label.clone(),
                name,
                color: e.color,
                source: e.source as VertexId,
                range: e.range as VertexId,
            });
        }
        for (l, r) in &sk.squares {
            g.add_square(*l, *r)?;
        }
        if g.rank == 2 {
            g.check_complete()?;
        }
        Ok(g)
    }

    fn word_text(&self, w: &[usize]) -> String {
        w.iter()
            .map(|&e| self.edges[e].name.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }

    fn add_square(&mut self, l: [usize; 2], r: [usize; 2]) -> Result<()> {
        for side in [l, r] {
            let (a, b) = (&self.edges[side[0]], &self.edges[side[1]]);
            if a.source != b.range {
                return Err(Error::Factorisation {
                    reason: "square side is not composable".into(),
                    witness: self.word_text(&side),
                });
            }
            if a.color == b.color {
                return Err(Error::Factorisation {
                    reason: "square side is not bicolored".into(),
                    witness: self.word_text(&side),
                });
            }
        }
        let (l0, l1, r0, r1) = (&self.edges[l[0]], &self.edges[l[1]], &self.edges[r[0]], &self.edges[r[1]]);
        if l0.range != r0.range || l1.source != r1.source {
            return Err(Error::Factorisation {
                reason: "square sides have different endpoints".into(),
                witness: format!("{} vs {}", self.word_text(&l), self.word_text(&r)),
            });
        }
        if l0.color != r1.color || l1.color != r0.color {
            return Err(Error::Factorisation {
                reason: "square sides must use complementary color orders".into(),
                witness: format!("{} vs {}", self.word_text(&l), self.word_text(&r)),
            });
        }
        // `low` is the normal-form side (color 1 at the range end).
        let (low, high) = if l0.color < l1.color { (l, r) } else { (r, l) };
        let low = (low[0] as EdgeId, low[1] as EdgeId);
        let high = (high[0] as EdgeId, high[1] as EdgeId);
        if self.down.get(&high) == Some(&low) {
            return Err(Error::Factorisation {
                reason: "square declared twice".into(),
                witness: self.word_text(&[high.0 as usize, high.1 as usize]),
            });
        }
        let mut clash = None;
        if let Some(prev) = self.down.insert(high, low) {
            if prev != low {
                clash = Some(high);
            }
        }
        if let Some(prev) = self.up.insert(low, high) {
            if prev != high {
                clash = Some(low);
            }
        }
        match clash {
            Some(key) => Err(Error::Factorisation {
                reason: "bicolored path lies in two squares".into(),
                witness: self.word_text(&[key.0 as usize, key.1 as usize]),
            }),
            None => Ok(()),
        }
    }

    fn check_complete(&self) -> Result<()> {
        for (e, ee) in self.edges.iter().enumerate() {
            for c in 0..self.rank {
                if c == ee.color {
                    continue;
                }
                for &f in &self.into[ee.source as usize][c] {
                    let key = (e as EdgeId, f);
                    let found = if ee.color < c {
                        self.up.contains_key(&key)
                    } else {
                        self.down.contains_key(&key)
                    };
                    if !found {
                        return Err(Error::Factorisation {
                            reason: "bicolored path lies in no square".into(),
                            witness: self.word_text(&[e, f as usize]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Whether the graph is the truncation of an index-uniform family.
    pub fn is_indexed(&self) -> bool {
        self.indexed
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: VertexId) -> Morphism {
        Morphism {
            range: v,
            source: v,
            degree: Degree::zero(self.rank),
            word: SmallVec::new(),
        }
    }

    pub fn vertices(&self) -> Vec<Morphism> {
        (0..self.vertices.len() as VertexId).map(|v| self.vertex(v)).collect()
    }

    pub fn edge(&self, e: EdgeId) -> Morphism {
        let ed = &self.edges[e as usize];
        Morphism {
            range: ed.range,
            source: ed.source,
            degree: Degree::unit(self.rank, ed.color),
            word: SmallVec::from_slice(&[e]),
        }
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v as usize].1
    }

    pub fn vertex_label(&self, v: VertexId) -> &Label {
        &self.vertices[v as usize].0
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e as usize].name
    }

    pub fn edge_label(&self, e: EdgeId) -> &Label {
        &self.edges[e as usize].label
    }

    pub fn edge_color(&self, e: EdgeId) -> usize {
        self.edges[e as usize].color
    }

    pub fn lookup_vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_ix.get(name).copied()
    }

    pub fn lookup_edge(&self, name: &str) -> Option<EdgeId> {
        self.edge_ix.get(name).copied()
    }

    /// Normal-form words joined by `.`; vertices print as their name.
    pub fn name(&self, m: &Morphism) -> String {
        if m.word.is_empty() {
            self.vertex_name(m.range).to_string()
        } else {
            m.word
                .iter()
                .map(|&e| self.edges[e as usize].name.as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Renders `m` with each index value replaced by `f(value)`.
    pub fn name_with(&self, m: &Morphism, f: &dyn Fn(u32) -> String) -> String {
        let render = |l: &Label| {
            if l.index.is_empty() {
                l.family.clone()
            } else {
                let idx: Vec<String> = l.index.iter().map(|&v| f(v)).collect();
                format!("{}[{}]", l.family, idx.join(","))
            }
        };
        if m.word.is_empty() {
            render(&self.vertices[m.range as usize].0)
        } else {
            m.word
                .iter()
                .map(|&e| render(&self.edges[e as usize].label))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parses a dotted word of edge names (range end first), or a vertex name.
    pub fn parse_morphism(&self, s: &str) -> Result<Morphism> {
        let s = s.trim();
        if let Some(v) = self.lookup_vertex(s) {
            return Ok(self.vertex(v));
        }
        let mut acc: Option<Morphism> = None;
        for tok in split_word(s) {
            let m = if let Some(e) = self.lookup_edge(&tok) {
                self.edge(e)
            } else if let Some(v) = self.lookup_vertex(&tok) {
                self.vertex(v)
            } else {
                return Err(Error::UnknownName(tok));
            };
            acc = Some(match acc {
                None => m,
                Some(a) => self.compose(&a, &m)?,
            });
        }
        acc.ok_or_else(|| Error::UnknownName(s.to_string()))
    }

    fn word_morphism(&self, word: SmallVec<[EdgeId; 4]>, at: VertexId) -> Morphism {
        if word.is_empty() {
            return self.vertex(at);
        }
        let mut degree = Degree::zero(self.rank);
        for &e in &word {
            degree = degree
                .add(&Degree::unit(self.rank, self.edges[e as usize].color))
                .expect("same rank");
        }
        Morphism {
            range: self.edges[word[0] as usize].range,
            source: self.edges[*word.last().unwrap() as usize].source,
            degree,
            word,
        }
    }

    /// Sorts `word` by color using the squares; `to_low` moves color 1 to the
    /// range end (normal form), otherwise color 2 moves there.
    fn sort_colors(&self, word: &mut [EdgeId], to_low: bool) {
        if self.rank < 2 {
            return;
        }
        let map = if to_low { &self.down } else { &self.up };
        loop {
            let mut changed = false;
            for i in 0..word.len().saturating_sub(1) {
                let (a, b) = (self.edges[word[i] as usize].color, self.edges[word[i + 1] as usize].color);
                let out_of_order = if to_low { a > b } else { a < b };
                if out_of_order {
                    let (x, y) = map[&(word[i], word[i + 1])];
                    word[i] = x;
                    word[i + 1] = y;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn compose(&self, mu: &Morphism, nu: &Morphism) -> Result<Morphism> {
        if mu.source != nu.range {
            return Err(Error::NotComposable {
                left: self.name(mu),
                right: self.name(nu),
            });
        }
        if mu.is_vertex() {
            return Ok(nu.clone());
        }
        if nu.is_vertex() {
            return Ok(mu.clone());
        }
        let mut word: SmallVec<[EdgeId; 4]> = mu.word.iter().chain(nu.word.iter()).copied().collect();
        self.sort_colors(&mut word, true);
        Ok(self.word_morphism(word, mu.range))
    }

    /// The unique `(μ, ν)` with `λ = μν` and `d(μ) = p`.
    pub fn factorize(&self, lambda: &Morphism, p: &Degree) -> Result<(Morphism, Morphism)> {
        if !p.leq(&lambda.degree)? {
            return Err(Error::DegreeNotBelow {
                p: p.clone(),
                q: lambda.degree.clone(),
            });
        }
        let w = &lambda.word;
        let (first, second): (SmallVec<[EdgeId; 4]>, SmallVec<[EdgeId; 4]>) = if self.rank == 1 {
            let a = p.coords()[0] as usize;
            (w[..a].into(), w[a..].into())
        } else {
            let big_a = lambda.degree.coords()[0] as usize;
            let (a, b) = (p.coords()[0] as usize, p.coords()[1] as usize);
            let mut mid: SmallVec<[EdgeId; 4]> = w[a..big_a + b].into();
            self.sort_colors(&mut mid, false);
            let first = w[..a].iter().chain(mid[..b].iter()).copied().collect();
            let second = mid[b..].iter().chain(w[big_a + b..].iter()).copied().collect();
            (first, second)
        };
        let mu = self.word_morphism(first, lambda.range);
        let at = if mu.is_vertex() { lambda.range } else { mu.source };
        let nu = self.word_morphism(second, at);
        Ok((mu, nu))
    }

    /// `μ ⪯ λ`.
    pub fn prefix_leq(&self, mu: &Morphism, lambda: &Morphism) -> bool {
        if mu.range != lambda.range {
            return false;
        }
        match mu.degree.leq(&lambda.degree) {
            Ok(true) => self.factorize(lambda, &mu.degree).map(|(f, _)| &f == mu).unwrap_or(false),
            _ => false,
        }
    }

    /// `σ_μ` on morphisms: the `ν` with `λ = μν`, if `μ ⪯ λ`.
    pub fn strip_prefix(&self, mu: &Morphism, lambda: &Morphism) -> Option<Morphism> {
        if mu.range != lambda.range || !mu.degree.leq(&lambda.degree).ok()? {
            return None;
        }
        let (f, rest) = self.factorize(lambda, &mu.degree).ok()?;
        (&f == mu).then_some(rest)
    }

    /// Every morphism in `vΛ^p`, without a completeness verdict.
    pub fn fiber_items(&self, v: VertexId, p: &Degree) -> Vec<Morphism> {
        let mut out = Vec::new();
        let mut word: SmallVec<[EdgeId; 4]> = SmallVec::new();
        let counts: Vec<usize> = p.coords().iter().map(|&c| c as usize).collect();
        self.walk(v, &counts, 0, &mut word, &mut out, v);
        out
    }

    fn walk(
        &self,
        at: VertexId,
        counts: &[usize],
        color: usize,
        word: &mut SmallVec<[EdgeId; 4]>,
        out: &mut Vec<Morphism>,
        root: VertexId,
    ) {
        if color == counts.len() {
            out.push(self.word_morphism(word.clone(), root));
            return;
        }
        let placed = word.iter().filter(|&&e| self.edges[e as usize].color == color).count();
        if placed == counts[color] {
            self.walk(at, counts, color + 1, word, out, root);
            return;
        }
        for &e in &self.into[at as usize][color] {
            word.push(e);
            self.walk(self.edges[e as usize].source, counts, color, word, out, root);
            word.pop();
        }
    }

    /// `vΛ^p` with a completeness verdict.
    pub fn fiber(&self, v: VertexId, p: &Degree) -> Fiber {
        let items = self.fiber_items(v, p);
        let anchors = self.vertex_values(v);
        let completeness = self.classify(&anchors, &items);
        Fiber { items, completeness }
    }

    /// Every morphism of degree at most `bound`, in canonical order.
    pub fn enumerate_morphisms(&self, bound: &Degree) -> (Vec<Morphism>, Completeness) {
        let mut out = Vec::new();
        let mut flag = Completeness::Exact;
        for v in 0..self.vertices.len() as VertexId {
            for p in bound.below() {
                let f = self.fiber(v, &p);
                flag = flag.meet(f.completeness);
                out.extend(f.items);
            }
        }
        self.sort_canonical(&mut out);
        (out, flag)
    }

    /// `λΛ` up to extensions of degree at most `bound`.
    pub fn extensions(&self, lambda: &Morphism, bound: &Degree) -> Vec<Morphism> {
        let mut out = Vec::new();
        for p in bound.below() {
            for k in self.fiber_items(lambda.source, &p) {
                out.push(self.compose(lambda, &k).expect("composable by construction"));
            }
        }
        out
    }

    /// Sorts by rendered name, the order used in every report.
    pub fn sort_canonical(&self, ms: &mut [Morphism]) {
        ms.sort_by_cached_key(|m| (m.degree.total(), self.name(m)));
    }

    /// Index values occurring in a vertex name.
    pub fn vertex_values(&self, v: VertexId) -> BTreeSet<u32> {
        self.vertices[v as usize].0.index.iter().copied().collect()
    }

    /// Index values occurring anywhere in the morphism's name or endpoints.
    pub fn values(&self, m: &Morphism) -> BTreeSet<u32> {
        let mut s = self.vertex_values(m.range);
        s.extend(self.vertex_values(m.source));
        for &e in &m.word {
            s.extend(self.edges[e as usize].label.index.iter().copied());
        }
        s
    }

    /// Completeness of a set `S` of morphisms cut out by a condition
    /// mentioning only morphisms with index values in `anchors`.
    ///
    /// Any map `f: ℕ → ℕ` fixing the anchor values induces a functor of the
    /// untruncated graph preserving the condition. So an element using a
    /// value outside the anchors can be relabelled to infinitely many others,
    /// and if none lies in the truncation while some spare value remains, the
    /// truncation already lists all of `S`.
    pub fn classify(&self, anchors: &BTreeSet<u32>, items: &[Morphism]) -> Completeness {
        if !self.indexed {
            return Completeness::Exact;
        }
        if items.iter().any(|m| !self.values(m).is_subset(anchors)) {
            return Completeness::Truncated;
        }
        if (1..=self.cutoff).any(|v| !anchors.contains(&v)) {
            Completeness::Exact
        } else {
            Completeness::Unknown
        }
    }

    /// Whether the 1-skeleton contains a directed cycle, i.e. whether the
    /// category has morphisms of unbounded degree.
    pub fn has_cycle(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.source as usize] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for c in 0..self.rank {
                for &e in &self.into[v][c] {
                    let s = self.edges[e as usize].source as usize;
                    indeg[s] -= 1;
                    if indeg[s] == 0 {
                        stack.push(s);
                    }
                }
            }
        }
        seen < n
    }

    /// The number of squares.
    pub fn square_count(&self) -> usize {
        self.down.len()
    }

    /// Replaces each index value by `f(value)`, if the result names a morphism
    /// of this truncation.
    pub fn relabel(&self, m: &Morphism, f: &dyn Fn(u32) -> u32) -> Option<Morphism> {
        if m.is_vertex() {
            let l = &self.vertices[m.range as usize].0;
            let l2 = Label::indexed(l.family.clone(), l.index.iter().map(|&v| f(v)).collect());
            return self.lookup_vertex(&l2.render()).map(|v| self.vertex(v));
        }
        let mut acc: Option<Morphism> = None;
        for &e in &m.word {
            let l = &self.edges[e as usize].label;
            let l2 = Label::indexed(l.family.clone(), l.index.iter().map(|&v| f(v)).collect());
            let e2 = self.edge(self.lookup_edge(&l2.render())?);
            acc = Some(match acc {
                None => e2,
                Some(a) => self.compose(&a, &e2).ok()?,
            });
        }
        acc
    }
}

/// Splits on `.` outside brackets.
pub(crate) fn split_word(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in s.chars() {
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
    parts.into_iter().map(|p| p.trim().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TG: &str = "
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

    fn tg(n: u32) -> KGraph {
        KGraph::load(TG, n).unwrap()
    }

    fn d(c: &[u32]) -> Degree {
        Degree::new(c.iter().copied())
    }

    #[test]
    fn compose_uses_the_squares() {
        let g = tg(3);
        let a = g.parse_morphism("mu.beta[1]").unwrap();
        let b = g.parse_morphism("lambda.alpha[1]").unwrap();
        assert_eq!(a, b);
        assert_eq!(g.name(&a), "lambda.alpha[1]");
        let lam = g.parse_morphism("lambda").unwrap();
        assert_eq!(g.compose(&g.vertex(lam.range()), &lam).unwrap(), lam);
    }

    #[test]
    fn compose_rejects_non_composable() {
        let g = tg(2);
        let lam = g.parse_morphism("lambda").unwrap();
        let mu = g.parse_morphism("mu").unwrap();
        assert!(matches!(g.compose(&lam, &mu), Err(Error::NotComposable { .. })));
    }

    #[test]
    fn factorize_examples() {
        let g = tg(2);
        let m = g.parse_morphism("mu.beta[1]").unwrap();
        let (x, y) = g.factorize(&m, &d(&[0, 1])).unwrap();
        assert_eq!((g.name(&x).as_str(), g.name(&y).as_str()), ("mu", "beta[1]"));
        let (x, y) = g.factorize(&m, &d(&[1, 0])).unwrap();
        assert_eq!((g.name(&x).as_str(), g.name(&y).as_str()), ("lambda", "alpha[1]"));
        let lam = g.parse_morphism("lambda").unwrap();
        let (x, y) = g.factorize(&lam, &d(&[0, 0])).unwrap();
        assert_eq!((g.name(&x).as_str(), y), ("v", lam.clone()));
        assert!(g.factorize(&lam, &d(&[0, 1])).is_err());
    }

    #[test]
    fn fibers_and_their_flags() {
        let g = tg(3);
        let v = g.lookup_vertex("v").unwrap();
        let f = g.fiber(v, &d(&[1, 1]));
        assert_eq!(f.items.len(), 3);
        assert_eq!(f.completeness, Completeness::Truncated);
        let u = g.lookup_vertex("u").unwrap();
        let f = g.fiber(u, &d(&[1, 0]));
        assert!(f.items.is_empty());
        assert_eq!(f.completeness, Completeness::Exact);
        let w = g.lookup_vertex("w").unwrap();
        let f = g.fiber(w, &d(&[0, 0]));
        assert_eq!(f.items, vec![g.vertex(w)]);
        assert_eq!(f.completeness, Completeness::Exact);
        let t = g.lookup_vertex("t").unwrap();
        let f = g.fiber(t, &d(&[1, 0]));
        assert_eq!(f.items.len(), 3);
        assert_eq!(f.completeness, Completeness::Truncated);
    }

    #[test]
    fn prefix_order_examples() {
        let g = tg(2);
        let lam = g.parse_morphism("lambda").unwrap();
        let m = g.parse_morphism("mu.beta[1]").unwrap();
        let a1 = g.parse_morphism("alpha[1]").unwrap();
        let la1 = g.parse_morphism("lambda.alpha[1]").unwrap();
        assert!(g.prefix_leq(&lam, &m));
        assert!(!g.prefix_leq(&a1, &la1));
        assert!(g.prefix_leq(&lam, &lam));
    }

    #[test]
    fn enumeration_at_unit_square() {
        let g = tg(2);
        let (all, flag) = g.enumerate_morphisms(&d(&[1, 1]));
        let names: BTreeSet<String> = all.iter().map(|m| g.name(m)).collect();
        let expected: BTreeSet<String> = [
            "v", "w", "t", "u", "lambda", "mu", "alpha[1]", "alpha[2]", "beta[1]", "beta[2]",
            "lambda.alpha[1]", "lambda.alpha[2]",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(names, expected);
        assert_eq!(flag, Completeness::Truncated);
    }

    #[test]
    fn trivial_graph() {
        let g = KGraph::load("vertices:\n v\n", 1).unwrap();
        let (all, flag) = g.enumerate_morphisms(&d(&[4]));
        assert_eq!(all, vec![g.vertex(0)]);
        assert_eq!(flag, Completeness::Exact);
    }

    #[test]
    fn ambiguous_square_is_rejected() {
        let text = "
vertices:
  a b c d e
edges:
  f 1 b -> a
  g 2 c -> b
  h 2 d -> a
  i 1 c -> d
  j 2 e -> a
  k 1 c -> e
squares:
  f.g = h.i
  f.g = j.k
";
        let err = KGraph::load(text, 1).unwrap_err();
        assert!(err.to_string().contains("factorisation property violated"), "{err}");
        assert!(err.to_string().contains("f.g"), "{err}");
    }

    #[test]
    fn incomplete_square_is_rejected() {
        let text = "vertices:\n a b c\nedges:\n e 1 b -> a\n f 2 c -> b\n";
        let err = KGraph::load(text, 1).unwrap_err();
        assert!(err.to_string().contains("no square"), "{err}");
        assert!(err.to_string().contains("e.f"), "{err}");
    }

    #[test]
    fn rank_three_is_unsupported() {
        let text = "rank: 3\nvertices:\n a\n";
        assert!(matches!(KGraph::load(text, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn relabel_moves_indices() {
        let g = tg(3);
        let m = g.parse_morphism("lambda.alpha[1]").unwrap();
        let m2 = g.relabel(&m, &|v| if v == 1 { 3 } else { v }).unwrap();
        assert_eq!(g.name(&m2), "lambda.alpha[3]");
        assert!(g.relabel(&m, &|_| 9).is_none());
    }
}
