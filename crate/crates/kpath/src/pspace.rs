//! Filters, cylinders and pointwise convergence, and the path spaces built
//! from them.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::alignment::{Check, FaOracle, Verdict};
use crate::catalog::{CatalogEntry, FamilyDecl};
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::kgraph::{Completeness, KGraph, Morphism, VertexId};

pub type MorphismSet = BTreeSet<Morphism>;

/// Membership predicate of a profiled subset.
pub type Predicate = Arc<dyn Fn(&Morphism) -> bool + Send + Sync>;

/// A subset of Λ: either listed, or given by a predicate together with an
/// enumerated fragment.
#[derive(Clone)]
pub enum SubsetView {
    Explicit(MorphismSet),
    Profiled {
        member: Predicate,
        /// Members only; filtered through `member` on construction.
        fragment: Vec<Morphism>,
        /// Whether the fragment is the whole subset.
        finite: bool,
    },
}

impl SubsetView {
    pub fn explicit(items: impl IntoIterator<Item = Morphism>) -> SubsetView {
        SubsetView::Explicit(items.into_iter().collect())
    }

    pub fn profiled(member: Predicate, candidates: Vec<Morphism>, finite: bool) -> SubsetView {
        let fragment = candidates.into_iter().filter(|m| member(m)).collect();
        SubsetView::Profiled { member, fragment, finite }
    }

    pub fn contains(&self, m: &Morphism) -> bool {
        match self {
            SubsetView::Explicit(s) => s.contains(m),
            SubsetView::Profiled { member, .. } => member(m),
        }
    }

    pub fn elements(&self) -> Vec<Morphism> {
        match self {
            SubsetView::Explicit(s) => s.iter().cloned().collect(),
            SubsetView::Profiled { fragment, .. } => fragment.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            SubsetView::Explicit(_) => true,
            SubsetView::Profiled { finite, .. } => *finite,
        }
    }
}

impl fmt::Debug for SubsetView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetView::Explicit(s) => f.debug_tuple("Explicit").field(s).finish(),
            SubsetView::Profiled { fragment, finite, .. } => f
                .debug_struct("Profiled")
                .field("fragment", fragment)
                .field("finite", finite)
                .finish(),
        }
    }
}

/// The order used for "hereditary" and "directed": the prefix order of Λ,
/// or the prefix order of a subcategory given by its enumerated members.
#[derive(Clone, Copy)]
pub enum Order<'a> {
    Ambient,
    Within(&'a MorphismSet),
}

impl Order<'_> {
    /// Prefixes of `lambda` in this order.
    pub fn down(&self, g: &KGraph, lambda: &Morphism) -> MorphismSet {
        let mut out = MorphismSet::new();
        for p in lambda.degree().below() {
            let (a, b) = g.factorize(lambda, &p).expect("p below d(λ)");
            match self {
                Order::Ambient => {
                    out.insert(a);
                }
                Order::Within(s) => {
                    if s.contains(&a) && s.contains(&b) {
                        out.insert(a);
                    }
                }
            }
        }
        out
    }

    pub fn leq(&self, g: &KGraph, a: &Morphism, b: &Morphism) -> bool {
        match self {
            Order::Ambient => g.prefix_leq(a, b),
            Order::Within(s) => {
                s.contains(a) && s.contains(b) && g.strip_prefix(a, b).is_some_and(|r| s.contains(&r))
            }
        }
    }
}

/// Why a subset fails to be a filter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NoVertex,
    TwoVertices(Morphism, Morphism),
    NotHereditary { missing: Morphism, below: Morphism },
    NotDirected(Morphism, Morphism),
    RepeatedDegree(Morphism, Morphism),
}

impl Violation {
    pub fn render(&self, g: &KGraph) -> String {
        match self {
            Violation::Empty => "the set is empty".into(),
            Violation::NoVertex => "the set contains no vertex".into(),
            Violation::TwoVertices(a, b) => format!("contains two vertices {} and {}", g.name(a), g.name(b)),
            Violation::NotHereditary { missing, below } => {
                format!("not hereditary: {} precedes {} but is missing", g.name(missing), g.name(below))
            }
            Violation::NotDirected(a, b) => {
                format!("not directed: no element extends both {} and {}", g.name(a), g.name(b))
            }
            Violation::RepeatedDegree(a, b) => {
                format!("{} and {} have the same degree", g.name(a), g.name(b))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterCheck {
    pub violation: Option<Violation>,
    /// False when only an enumerated fragment was inspected.
    pub exact: bool,
}

impl FilterCheck {
    pub fn is_filter(&self) -> bool {
        self.violation.is_none()
    }
}

/// Filter test. Exact for explicit sets; for profiled sets, checked on the
/// fragment of degree at most `bound`.
pub fn is_filter(g: &KGraph, s: &SubsetView, bound: &Degree) -> FilterCheck {
    let items: Vec<Morphism> = match s {
        SubsetView::Explicit(set) => set.iter().cloned().collect(),
        SubsetView::Profiled { fragment, .. } => fragment
            .iter()
            .filter(|m| m.degree().leq(bound).unwrap_or(false))
            .cloned()
            .collect(),
    };
    let set: MorphismSet = items.iter().cloned().collect();
    FilterCheck {
        violation: filter_violation(g, &set, Order::Ambient),
        exact: s.is_exact(),
    }
}

/// The first violation of the filter axioms in a finite set, in a fixed
/// order of checks.
pub fn filter_violation(g: &KGraph, set: &MorphismSet, order: Order) -> Option<Violation> {
    if set.is_empty() {
        return Some(Violation::Empty);
    }
    let vertices: Vec<&Morphism> = set.iter().filter(|m| m.is_vertex()).collect();
    match vertices.as_slice() {
        [] => return Some(Violation::NoVertex),
        [_] => {}
        [a, b, ..] => return Some(Violation::TwoVertices((*a).clone(), (*b).clone())),
    }
    for m in set {
        if let Some(p) = order.down(g, m).into_iter().find(|p| !set.contains(p)) {
            return Some(Violation::NotHereditary { missing: p, below: m.clone() });
        }
    }
    let items: Vec<&Morphism> = set.iter().collect();
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            if !items.iter().any(|c| order.leq(g, a, c) && order.leq(g, b, c)) {
                let (a, b) = canonical_pair(g, a, b);
                return Some(Violation::NotDirected(a, b));
            }
        }
    }
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            if a.degree() == b.degree() {
                return Some(Violation::RepeatedDegree((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

fn canonical_pair(g: &KGraph, a: &Morphism, b: &Morphism) -> (Morphism, Morphism) {
    let mut v = [a.clone(), b.clone()];
    g.sort_canonical(&mut v);
    let [a, b] = v;
    (a, b)
}

/// A filter, always stored explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Filter {
    range: VertexId,
    set: MorphismSet,
}

impl Filter {
    /// Validates `set` against the filter axioms in the given order.
    #[allow(clippy::result_large_err)]
    pub fn new(g: &KGraph, set: MorphismSet, order: Order) -> std::result::Result<Filter, Violation> {
        if let Some(v) = filter_violation(g, &set, order) {
            return Err(v);
        }
        let range = set.iter().find(|m| m.is_vertex()).expect("checked").range();
        Ok(Filter { range, set })
    }

    /// For sets already known to be filters.
    pub(crate) fn trusted(set: MorphismSet) -> Filter {
        let range = set.iter().next().expect("filters are nonempty").range();
        Filter { range, set }
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn set(&self) -> &MorphismSet {
        &self.set
    }

    pub fn contains(&self, m: &Morphism) -> bool {
        self.set.contains(m)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Morphism> {
        self.set.iter()
    }

    /// `x(e, m)`, the unique element of degree `m`.
    pub fn at_degree(&self, m: &Degree) -> Option<&Morphism> {
        self.set.iter().find(|l| l.degree() == m)
    }

    /// The ⪯-maximum, present exactly when the filter is principal.
    pub fn maximum(&self, g: &KGraph) -> Option<&Morphism> {
        self.set
            .iter()
            .find(|m| self.set.iter().all(|n| g.prefix_leq(n, m)))
    }

    pub fn view(&self) -> SubsetView {
        SubsetView::Explicit(self.set.clone())
    }

    /// Element names, sorted.
    pub fn names(&self, g: &KGraph) -> Vec<String> {
        let mut v: Vec<String> = self.set.iter().map(|m| g.name(m)).collect();
        v.sort();
        v
    }

    /// `{t}` for a vertex filter, `down(λ)` for a principal one, the
    /// element list otherwise.
    pub fn describe(&self, g: &KGraph) -> String {
        match self.maximum(g) {
            Some(m) if m.is_vertex() => format!("{{{}}}", g.name(m)),
            Some(m) if self.set == principal_set(g, m) => format!("down({})", g.name(m)),
            _ => format!("{{{}}}", self.names(g).join(", ")),
        }
    }

    pub fn to_json(&self, g: &KGraph) -> serde_json::Value {
        serde_json::json!(self.names(g))
    }

    /// Report ordering: by size, then by the sorted element names.
    pub fn sort_key(&self, g: &KGraph) -> (usize, Vec<String>) {
        (self.len(), self.names(g))
    }
}

pub fn sort_filters(g: &KGraph, fs: &mut [Filter]) {
    fs.sort_by_cached_key(|f| f.sort_key(g));
}

pub fn principal_set(g: &KGraph, lambda: &Morphism) -> MorphismSet {
    Order::Ambient.down(g, lambda)
}

/// `↓λ`.
pub fn principal(g: &KGraph, lambda: &Morphism) -> Filter {
    Filter::trusted(principal_set(g, lambda))
}

/// Renders a set of morphisms as `{a, b}` with sorted names.
pub fn render_set(g: &KGraph, s: &MorphismSet) -> String {
    let mut v: Vec<String> = s.iter().map(|m| g.name(m)).collect();
    v.sort();
    format!("{{{}}}", v.join(", "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    PowerSet,
    Filters,
    PathSpace,
    BoundaryPathSpace,
}

/// `Z(K₁ \ K₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub include: Vec<Morphism>,
    pub exclude: Vec<Morphism>,
    pub space: Space,
}

impl Cylinder {
    pub fn new(include: Vec<Morphism>, exclude: Vec<Morphism>, space: Space) -> Cylinder {
        Cylinder { include, exclude, space }
    }

    /// `Z(μ \ K)`.
    pub fn basic(mu: &Morphism, exclude: Vec<Morphism>, space: Space) -> Cylinder {
        Cylinder::new(vec![mu.clone()], exclude, space)
    }

    pub fn to_json(&self, g: &KGraph) -> serde_json::Value {
        let names = |v: &[Morphism]| {
            let mut n: Vec<String> = v.iter().map(|m| g.name(m)).collect();
            n.sort();
            n
        };
        serde_json::json!({ "in": names(&self.include), "out": names(&self.exclude) })
    }
}

/// `K₁ ⊆ x ⊆ Λ \ K₂`.
pub fn cylinder_membership(x: &SubsetView, c: &Cylinder) -> bool {
    c.include.iter().all(|m| x.contains(m)) && !c.exclude.iter().any(|m| x.contains(m))
}

/// The eventual behaviour of a sequence.
#[derive(Clone, Debug)]
pub enum Tail {
    Constant(MorphismSet),
    /// `n ↦ ↓pattern(n)`.
    PrincipalFamily(FamilyDecl),
    /// `n ↦ ↓pattern(n)` in the prefix order of a subcategory.
    RelativeFamily { family: FamilyDecl, within: Arc<MorphismSet> },
    /// Even terms, then odd terms.
    Alternating(MorphismSet, MorphismSet),
}

/// A sequence of subsets given by finitely many initial terms and a rule.
#[derive(Clone, Debug)]
pub struct DescribedSequence {
    pub prefix: Vec<MorphismSet>,
    pub tail: Tail,
}

impl DescribedSequence {
    pub fn family(f: &FamilyDecl) -> DescribedSequence {
        DescribedSequence {
            prefix: Vec::new(),
            tail: Tail::PrincipalFamily(f.clone()),
        }
    }

    pub fn constant(s: MorphismSet) -> DescribedSequence {
        DescribedSequence {
            prefix: Vec::new(),
            tail: Tail::Constant(s),
        }
    }

    pub fn describe(&self) -> String {
        match &self.tail {
            Tail::Constant(_) => "constant".into(),
            Tail::PrincipalFamily(f) => f.describe(),
            Tail::RelativeFamily { family, .. } => format!("relative {}", family.describe()),
            Tail::Alternating(_, _) => "alternating".into(),
        }
    }

    fn family_decl(&self) -> Option<&FamilyDecl> {
        match &self.tail {
            Tail::PrincipalFamily(f) | Tail::RelativeFamily { family: f, .. } => Some(f),
            _ => None,
        }
    }

    /// The tail term at family index `k`.
    pub fn tail_term(&self, g: &KGraph, k: u32) -> Result<MorphismSet> {
        match &self.tail {
            Tail::Constant(s) => Ok(s.clone()),
            Tail::Alternating(a, b) => Ok(if k.is_multiple_of(2) { a.clone() } else { b.clone() }),
            Tail::PrincipalFamily(f) => Ok(principal_set(g, &family_member(g, f, k)?)),
            Tail::RelativeFamily { family, within } => {
                let m = family_member(g, family, k)?;
                if !within.contains(&m) {
                    return Err(Error::Invalid(format!("{} lies outside the subcategory", g.name(&m))));
                }
                Ok(Order::Within(within).down(g, &m))
            }
        }
    }

    /// Terms at every index the truncation supports.
    pub fn materialized_terms(&self, g: &KGraph) -> Result<Vec<MorphismSet>> {
        let mut out = self.prefix.clone();
        for k in 1..=g.cutoff() {
            out.push(self.tail_term(g, k)?);
        }
        Ok(out)
    }
}

/// `pattern(k)` for a family declaration.
pub fn family_member(g: &KGraph, f: &FamilyDecl, k: u32) -> Result<Morphism> {
    let env = [(f.var.clone(), k)].into_iter().collect();
    f.pattern.morphism(g, &env)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Eventually {
    Inside,
    Outside,
    Oscillating,
}

/// Whether `lambda` is eventually inside the sequence. Family tails are
/// decided at an index value not used by `lambda` or the pattern: swapping
/// two such values is an automorphism fixing `lambda`, so membership is the
/// same at every such index.
pub fn eventual_status(g: &KGraph, seq: &DescribedSequence, lambda: &Morphism) -> Result<Eventually> {
    match &seq.tail {
        Tail::Constant(s) => Ok(if s.contains(lambda) { Eventually::Inside } else { Eventually::Outside }),
        Tail::Alternating(a, b) => Ok(match (a.contains(lambda), b.contains(lambda)) {
            (true, true) => Eventually::Inside,
            (false, false) => Eventually::Outside,
            _ => Eventually::Oscillating,
        }),
        _ => {
            let f = seq.family_decl().expect("family tail");
            let mut used = g.values(lambda);
            used.extend(pattern_values(f));
            let k = (1..=g.cutoff()).rev().find(|k| !used.contains(k)).ok_or_else(|| {
                Error::Truncated(format!(
                    "no index value in 1..={} is free of those in {}; raise the cutoff",
                    g.cutoff(),
                    g.name(lambda)
                ))
            })?;
            Ok(if seq.tail_term(g, k)?.contains(lambda) {
                Eventually::Inside
            } else {
                Eventually::Outside
            })
        }
    }
}

fn pattern_values(f: &FamilyDecl) -> BTreeSet<u32> {
    let env = [(f.var.clone(), 0)].into_iter().collect();
    let text = f.pattern.instantiate(&env).unwrap_or_default();
    text.split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse().ok())
        .filter(|&v| v != 0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Converges(MorphismSet),
    Divergent(Vec<Morphism>),
}

/// Pointwise limit restricted to `probe`.
pub fn pointwise_limit(g: &KGraph, seq: &DescribedSequence, probe: &[Morphism]) -> Result<Limit> {
    let mut inside = MorphismSet::new();
    let mut bad = Vec::new();
    for m in probe {
        match eventual_status(g, seq, m)? {
            Eventually::Inside => {
                inside.insert(m.clone());
            }
            Eventually::Outside => {}
            Eventually::Oscillating => bad.push(m.clone()),
        }
    }
    Ok(if bad.is_empty() { Limit::Converges(inside) } else { Limit::Divergent(bad) })
}

/// The default probe: every in-scope morphism of degree at most `bound`,
/// plus everything named by the sequence's materialized terms.
pub fn default_probe(entry: &CatalogEntry, seq: &DescribedSequence, bound: &Degree) -> Result<Vec<Morphism>> {
    let (ms, _) = entry.morphisms(bound);
    let mut all: MorphismSet = ms.into_iter().collect();
    for t in seq.materialized_terms(&entry.graph)? {
        all.extend(t);
    }
    Ok(all.into_iter().collect())
}

/// Whether enumeration at `bound` already sees every morphism.
pub fn bound_is_exhaustive(entry: &CatalogEntry, bound: &Degree) -> bool {
    if !entry.is_finite() {
        return false;
    }
    let g = &entry.graph;
    let n = g.enumerate_morphisms(bound).0.len();
    (0..g.rank()).all(|i| {
        let b = bound.add(&Degree::unit(g.rank(), i)).expect("same rank");
        g.enumerate_morphisms(&b).0.len() == n
    })
}

/// `F(Λ)`: every principal filter of a morphism of degree at most `bound`.
/// Exact when the category is finite and the bound sees all of it (every
/// filter then has a maximum by directedness).
pub fn enumerate_filters(entry: &CatalogEntry, bound: &Degree) -> (Vec<Filter>, Completeness) {
    let g = &entry.graph;
    let (ms, _) = entry.morphisms(bound);
    let set: BTreeSet<Filter> = ms.iter().map(|m| principal(g, m)).collect();
    let mut out: Vec<Filter> = set.into_iter().collect();
    sort_filters(g, &mut out);
    let flag = if bound_is_exhaustive(entry, bound) {
        Completeness::Exact
    } else {
        Completeness::Truncated
    };
    (out, flag)
}

/// Filters maximal among `filters`.
pub fn ultrafilters(filters: &[Filter]) -> Vec<Filter> {
    filters
        .iter()
        .filter(|x| !filters.iter().any(|y| y.len() > x.len() && x.set.is_subset(&y.set)))
        .cloned()
        .collect()
}

/// Outcome of a PS-membership test, with both characterizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsVerdict {
    pub value: Verdict,
    /// An element of `x ∩ FA(Λ)`.
    pub witness: Option<Morphism>,
    /// For each `λ ∈ x`, an element of `x ∩ FA(Λ) ∩ λΛ` if one was found.
    pub extensions: Vec<(Morphism, Option<Morphism>)>,
}

impl PsVerdict {
    /// The element-wise characterization holds.
    pub fn strong(&self) -> bool {
        self.extensions.iter().all(|(_, e)| e.is_some())
    }

    /// The two characterizations agree (vacuous when undecided).
    pub fn consistent(&self) -> bool {
        match self.value {
            Verdict::True => self.strong(),
            Verdict::False => self.extensions.iter().all(|(_, e)| e.is_none()),
            Verdict::UnknownAtBound => true,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.value {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::UnknownAtBound => None,
        }
    }
}

/// `x ∈ PS(Λ)`: `x` meets FA(Λ).
pub fn ps_membership(o: &FaOracle, x: &Filter) -> PsVerdict {
    let g = o.graph();
    let mut items: Vec<Morphism> = x.iter().cloned().collect();
    g.sort_canonical(&mut items);
    let verdicts: Vec<Option<bool>> = items.iter().map(|m| o.is_fa(m)).collect();
    let witness = items
        .iter()
        .zip(&verdicts)
        .find(|(_, v)| **v == Some(true))
        .map(|(m, _)| m.clone());
    let value = if witness.is_some() {
        Verdict::True
    } else if verdicts.iter().all(|v| *v == Some(false)) {
        Verdict::False
    } else {
        Verdict::UnknownAtBound
    };
    let extensions = items
        .iter()
        .map(|l| {
            let e = items
                .iter()
                .zip(&verdicts)
                .find(|(m, v)| **v == Some(true) && g.prefix_leq(l, m))
                .map(|(m, _)| m.clone());
            (l.clone(), e)
        })
        .collect();
    PsVerdict { value, witness, extensions }
}

/// Filters of `filters` in PS(Λ); undecided ones are dropped.
pub fn path_space(o: &FaOracle, filters: &[Filter]) -> Vec<Filter> {
    filters
        .iter()
        .filter(|x| ps_membership(o, x).value == Verdict::True)
        .cloned()
        .collect()
}

/// A declared family's limit, as seen from a space of filters.
#[derive(Clone, Debug)]
pub struct FamilyLimit {
    pub family: String,
    pub limit: Limit,
    pub violation: Option<Violation>,
}

/// Limits of every declared family, probed at `bound`.
pub fn family_limits(entry: &CatalogEntry, bound: &Degree) -> Result<Vec<FamilyLimit>> {
    let g = &entry.graph;
    let mut out = Vec::new();
    for f in &entry.annotations.families {
        let seq = DescribedSequence::family(f);
        let probe = default_probe(entry, &seq, bound)?;
        let limit = pointwise_limit(g, &seq, &probe)?;
        let violation = match &limit {
            Limit::Converges(s) => filter_violation(g, s, Order::Ambient),
            Limit::Divergent(_) => None,
        };
        out.push(FamilyLimit {
            family: f.describe(),
            limit,
            violation,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Bps {
    pub points: Vec<Filter>,
    pub completeness: Completeness,
    /// Points added as limits, with the family that produced them.
    pub limits: Vec<(String, Filter)>,
}

/// `BPS(Λ)`: ultrafilters in PS(Λ) together with limits of declared
/// families whose terms are such ultrafilters and whose limit is a filter in
/// PS(Λ).
pub fn bps_enumerate(o: &FaOracle, filters: &[Filter], flag: Completeness) -> Result<Bps> {
    let entry = o.entry;
    let g = &entry.graph;
    let u = ultrafilters(filters);
    let ups: Vec<Filter> = path_space(o, &u);
    let mut points: BTreeSet<Filter> = ups.iter().cloned().collect();
    let mut limits = Vec::new();
    for f in &entry.annotations.families {
        let seq = DescribedSequence::family(f);
        let terms = seq.materialized_terms(g)?;
        if !terms.iter().all(|t| ups.iter().any(|p| p.set() == t)) {
            continue;
        }
        let probe = default_probe(entry, &seq, &o.bound)?;
        if let Limit::Converges(s) = pointwise_limit(g, &seq, &probe)? {
            if let Ok(lim) = Filter::new(g, s, Order::Ambient) {
                if ps_membership(o, &lim).value == Verdict::True {
                    limits.push((f.describe(), lim.clone()));
                    points.insert(lim);
                }
            }
        }
    }
    let mut points: Vec<Filter> = points.into_iter().collect();
    sort_filters(g, &mut points);
    Ok(Bps {
        points,
        completeness: flag,
        limits,
    })
}

/// Points of a space that are limits of declared families with pairwise
/// distinct terms in the space. `accept` decides membership in the space.
pub fn nondiscrete_points(
    g: &KGraph,
    seqs: &[DescribedSequence],
    probe: &[Morphism],
    order: Order,
    accept: &dyn Fn(&Filter) -> bool,
) -> Result<Vec<(String, Filter)>> {
    let mut out: Vec<(String, Filter)> = Vec::new();
    for seq in seqs {
        let terms = seq.materialized_terms(g)?;
        let distinct: BTreeSet<&MorphismSet> = terms.iter().collect();
        if distinct.len() < terms.len() {
            continue;
        }
        let in_space = terms.iter().all(|t| Filter::new(g, t.clone(), order).is_ok_and(|f| accept(&f)));
        if !in_space {
            continue;
        }
        if let Limit::Converges(s) = pointwise_limit(g, seq, probe)? {
            if let Ok(lim) = Filter::new(g, s, order) {
                if accept(&lim) && !out.iter().any(|(_, f)| f == &lim) {
                    out.push((seq.describe(), lim));
                }
            }
        }
    }
    out.sort_by_cached_key(|(_, f)| f.sort_key(g));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompactEvidence {
    /// The presentation has finitely many vertices and edges and no
    /// families, so every λ is finitely aligned and `Z_F(λ)` is compact.
    Compact,
    /// A sequence in `Z_F(λ)` whose pointwise limit (shared by every
    /// subsequence) is not a filter.
    NonCompact { family: String, limit: MorphismSet, violation: Violation },
    /// Each supplied family converges to a filter in `Z_F(λ)`.
    ConsistentWithCompact { limits: Vec<(String, Filter)> },
    /// λ is finitely aligned, yet some family escapes.
    Contradiction { family: String, limit: MorphismSet },
    Inconclusive(String),
}

impl CompactEvidence {
    pub fn kind(&self) -> &'static str {
        match self {
            CompactEvidence::Compact => "compact",
            CompactEvidence::NonCompact { .. } => "non_compact",
            CompactEvidence::ConsistentWithCompact { .. } => "consistent_with_compact",
            CompactEvidence::Contradiction { .. } => "contradiction",
            CompactEvidence::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Declared families whose every term lies in `Z_F(λ)`.
pub fn families_through(entry: &CatalogEntry, lambda: &Morphism) -> Vec<DescribedSequence> {
    let g = &entry.graph;
    entry
        .annotations
        .families
        .iter()
        .map(DescribedSequence::family)
        .filter(|s| {
            s.materialized_terms(g)
                .is_ok_and(|ts| ts.iter().all(|t| t.contains(lambda)))
        })
        .collect()
}

/// Evidence for or against compactness of `Z_F(λ)`.
pub fn compactness_probe(o: &FaOracle, lambda: &Morphism, families: &[DescribedSequence]) -> Result<CompactEvidence> {
    let entry = o.entry;
    let g = &entry.graph;
    if !g.is_indexed() {
        return Ok(CompactEvidence::Compact);
    }
    let mut limits = Vec::new();
    for seq in families {
        for t in seq.materialized_terms(g)? {
            if !t.contains(lambda) {
                return Err(Error::Invalid(format!(
                    "a term of {} lies outside Z({})",
                    seq.describe(),
                    g.name(lambda)
                )));
            }
        }
        let probe = default_probe(entry, seq, &o.bound)?;
        let Limit::Converges(s) = pointwise_limit(g, seq, &probe)? else {
            continue;
        };
        limits.push((seq.describe(), s));
    }
    match o.is_fa(lambda) {
        Some(false) => {
            for (family, s) in limits {
                if let Some(violation) = filter_violation(g, &s, Order::Ambient) {
                    return Ok(CompactEvidence::NonCompact { family, limit: s, violation });
                }
            }
            Ok(CompactEvidence::Inconclusive("no supplied family escapes Z_F".into()))
        }
        Some(true) => {
            let mut ok = Vec::new();
            for (family, s) in limits {
                match Filter::new(g, s.clone(), Order::Ambient) {
                    Ok(f) if f.contains(lambda) => ok.push((family, f)),
                    _ => return Ok(CompactEvidence::Contradiction { family, limit: s }),
                }
            }
            Ok(CompactEvidence::ConsistentWithCompact { limits: ok })
        }
        None => Ok(CompactEvidence::Inconclusive("finite alignment undecided at this bound".into())),
    }
}

/// Every enumerated `x ∈ Z_F(K₁\K₂)` with `K₁ ≠ ∅` lies in some
/// `Z_F(μ\K₂) ⊆ Z_F(K₁\K₂)` with `μ ∈ x`. Cylinders range over `K₁` of at
/// most two elements of `x` and `K₂` of at most one morphism.
pub fn check_basis(g: &KGraph, filters: &[Filter], morphisms: &[Morphism]) -> Check {
    let mut c = Check::new("cylinder_basis");
    let mut excludes: Vec<Vec<Morphism>> = vec![Vec::new()];
    excludes.extend(morphisms.iter().map(|m| vec![m.clone()]));
    for x in filters {
        let xs: Vec<&Morphism> = x.iter().collect();
        let mut includes: Vec<Vec<Morphism>> = xs.iter().map(|m| vec![(*m).clone()]).collect();
        for (i, a) in xs.iter().enumerate() {
            for b in &xs[i + 1..] {
                includes.push(vec![(*a).clone(), (*b).clone()]);
            }
        }
        for k1 in &includes {
            for k2 in &excludes {
                let z = Cylinder::new(k1.clone(), k2.clone(), Space::Filters);
                if !cylinder_membership(&x.view(), &z) {
                    continue;
                }
                let mu = x
                    .iter()
                    .find(|m| k1.iter().all(|k| g.prefix_leq(k, m)))
                    .cloned();
                let ok = mu.as_ref().is_some_and(|mu| {
                    let zm = Cylinder::basic(mu, k2.clone(), Space::Filters);
                    cylinder_membership(&x.view(), &zm)
                        && filters
                            .iter()
                            .filter(|y| cylinder_membership(&y.view(), &zm))
                            .all(|y| cylinder_membership(&y.view(), &z))
                });
                c.record(Some(ok), || format!("{} in Z({})", x.describe(g), render_set(g, &k1.iter().cloned().collect())));
            }
        }
    }
    c
}

/// PS(Λ) is open: each enumerated `x ∈ PS` lies in some `Z(μ)` with
/// `μ ∈ FA(Λ)`, and every enumerated filter in `Z(μ)` is in PS.
pub fn check_ps_open(o: &FaOracle, filters: &[Filter]) -> Check {
    let g = o.graph();
    let mut c = Check::new("path_space_open");
    for x in filters {
        let v = ps_membership(o, x);
        let Some(mu) = v.witness.clone() else {
            if v.value == Verdict::UnknownAtBound {
                c.record(None, String::new);
            }
            continue;
        };
        let ok = filters
            .iter()
            .filter(|y| y.contains(&mu))
            .all(|y| ps_membership(o, y).value == Verdict::True);
        c.record(Some(ok), || format!("Z({}) around {}", g.name(&mu), x.describe(g)));
    }
    c
}

/// Both PS characterizations agree on every enumerated filter.
pub fn check_ps_characterizations(o: &FaOracle, filters: &[Filter]) -> Check {
    let g = o.graph();
    let mut c = Check::new("path_space_characterizations");
    for x in filters {
        let v = ps_membership(o, x);
        let decided = v.value != Verdict::UnknownAtBound;
        c.record(decided.then_some(v.consistent()), || x.describe(g));
    }
    c
}

/// Eventual membership matches limit membership for every probe element,
/// checked against the last materialized terms.
pub fn check_convergence(g: &KGraph, seq: &DescribedSequence, probe: &[Morphism]) -> Result<Check> {
    let mut c = Check::new(&format!("convergence {}", seq.describe()));
    let limit = pointwise_limit(g, seq, probe)?;
    let terms = seq.materialized_terms(g)?;
    let tail = &terms[terms.len().saturating_sub(2)..];
    for m in probe {
        let status = eventual_status(g, seq, m)?;
        // A probe element using the last index values can sit in a late term
        // without being eventually inside; skip those.
        let late: BTreeSet<u32> = (g.cutoff().saturating_sub(1)..=g.cutoff()).collect();
        if !g.values(m).is_disjoint(&late) {
            c.record(None, String::new);
            continue;
        }
        let ok = match (&limit, status) {
            (Limit::Converges(s), Eventually::Inside) => s.contains(m) && tail.iter().all(|t| t.contains(m)),
            (Limit::Converges(s), Eventually::Outside) => !s.contains(m) && tail.iter().all(|t| !t.contains(m)),
            (Limit::Divergent(b), Eventually::Oscillating) => b.contains(m),
            _ => false,
        };
        c.record(Some(ok), || g.name(m));
    }
    Ok(c)
}
