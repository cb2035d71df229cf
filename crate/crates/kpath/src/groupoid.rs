//! The path groupoid PG(Λ) = PS(Λ) ⋊ (ℕ^k, T) and its reduction BPG(Λ).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{act, shift_off, shift_on};
use crate::alignment::{Check, FaOracle, Verdict};
use crate::degree::{Degree, GroupDegree};
use crate::error::{Error, Result};
use crate::kgraph::{Completeness, KGraph, Morphism};
use crate::pspace::{compactness_probe, cylinder_membership, families_through, ps_membership, Bps, CompactEvidence, Cylinder, Filter, Space};

/// `x = σ^μ z` and `y = σ^ν z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub mu: Morphism,
    pub nu: Morphism,
    pub z: Filter,
}

/// An element `(x, q, y)` with a certificate `(m, n)` and a span form.
/// Equality ignores the certificate and the span.
#[derive(Clone)]
pub struct GroupoidElement {
    pub x: Filter,
    pub q: GroupDegree,
    pub y: Filter,
    pub cert: (Degree, Degree),
    pub span: Span,
}

impl PartialEq for GroupoidElement {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for GroupoidElement {}

impl fmt::Debug for GroupoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {}, {:?})", self.x, self.q, self.y)
    }
}

impl GroupoidElement {
    pub fn key(&self) -> (&Filter, &GroupDegree, &Filter) {
        (&self.x, &self.q, &self.y)
    }

    pub fn is_unit(&self) -> bool {
        self.q.is_zero() && self.x == self.y
    }

    pub fn describe(&self, g: &KGraph) -> String {
        format!("({}, {}, {})", self.x.describe(g), self.q, self.y.describe(g))
    }

    pub fn to_json(&self, g: &KGraph) -> serde_json::Value {
        serde_json::json!({
            "x": self.x.to_json(g),
            "q": self.q,
            "y": self.y.to_json(g),
            "cert": { "m": self.cert.0, "n": self.cert.1 },
        })
    }
}

/// `(x, 0, x)`.
pub fn unit(g: &KGraph, x: &Filter) -> GroupoidElement {
    let r = g.vertex(x.range());
    let k = g.rank();
    GroupoidElement {
        x: x.clone(),
        q: GroupDegree::zero(k),
        y: x.clone(),
        cert: (Degree::zero(k), Degree::zero(k)),
        span: Span { mu: r.clone(), nu: r, z: x.clone() },
    }
}

/// The element certified by `T(x, m) = T(y, n)`.
pub fn from_certificate(o: &FaOracle, x: &Filter, m: &Degree, y: &Filter, n: &Degree) -> Result<GroupoidElement> {
    let a = act(o, x, m)?;
    let b = act(o, y, n)?;
    if a.filter != b.filter {
        return Err(Error::Domain("T(x, m) and T(y, n) differ".into()));
    }
    Ok(GroupoidElement {
        x: x.clone(),
        q: m.diff(n)?,
        y: y.clone(),
        cert: (m.clone(), n.clone()),
        span: Span { mu: a.witness, nu: b.witness, z: a.filter },
    })
}

/// `(σ^μ z, d(μ) − d(ν), σ^ν z)`, provided both shifted filters stay in
/// PS(Λ).
pub fn make_element(o: &FaOracle, mu: &Morphism, nu: &Morphism, z: &Filter) -> Result<GroupoidElement> {
    let g = o.graph();
    if mu.source() != z.range() || nu.source() != z.range() {
        return Err(Error::Domain(format!(
            "s({}) and s({}) must both equal r(z) = {}",
            g.name(mu),
            g.name(nu),
            g.vertex_name(z.range())
        )));
    }
    if ps_membership(o, z).value != Verdict::True {
        return Err(Error::Domain(format!("{} is not certified in the path space", z.describe(g))));
    }
    let x = shift_on(g, mu, z)?;
    let y = shift_on(g, nu, z)?;
    for (lam, w) in [(mu, &x), (nu, &y)] {
        if ps_membership(o, w).value != Verdict::True {
            return Err(Error::Domain(format!(
                "right shift leaves the path space: σ^{}{} = {} contains no finitely aligned morphism",
                g.name(lam),
                z.describe(g),
                w.describe(g)
            )));
        }
    }
    Ok(GroupoidElement {
        x,
        q: mu.degree().diff(nu.degree())?,
        y,
        cert: (mu.degree().clone(), nu.degree().clone()),
        span: Span {
            mu: mu.clone(),
            nu: nu.clone(),
            z: z.clone(),
        },
    })
}

pub fn invert(g: &GroupoidElement) -> GroupoidElement {
    GroupoidElement {
        x: g.y.clone(),
        q: g.q.neg(),
        y: g.x.clone(),
        cert: (g.cert.1.clone(), g.cert.0.clone()),
        span: Span {
            mu: g.span.nu.clone(),
            nu: g.span.mu.clone(),
            z: g.span.z.clone(),
        },
    }
}

/// `(r(g), s(g))` as units.
pub fn element_structure(gr: &KGraph, g: &GroupoidElement) -> (GroupoidElement, GroupoidElement) {
    (unit(gr, &g.x), unit(gr, &g.y))
}

/// `(x, q, y)(y, r, w) = (x, q + r, w)`, with a certificate built by
/// passing both spans through the element of `y` of degree
/// `d(ν) ∨ d(κ)`.
pub fn compose_elements(o: &FaOracle, a: &GroupoidElement, b: &GroupoidElement) -> Result<GroupoidElement> {
    let g = o.graph();
    if a.y != b.x {
        return Err(Error::NotComposable {
            left: a.describe(g),
            right: b.describe(g),
        });
    }
    let (mu, nu) = (&a.span.mu, &a.span.nu);
    let (kappa, rho) = (&b.span.mu, &b.span.nu);
    let l = nu.degree().lub(kappa.degree())?;
    let xi = a
        .y
        .at_degree(&l)
        .ok_or_else(|| Error::Truncated(format!("{} has no element of degree {l}", a.y.describe(g))))?
        .clone();
    let nu2 = g.strip_prefix(nu, &xi).ok_or_else(|| Error::Invalid("ν is not a prefix of ξ".into()))?;
    let kappa2 = g.strip_prefix(kappa, &xi).ok_or_else(|| Error::Invalid("κ is not a prefix of ξ".into()))?;
    let z = shift_off(g, &xi, &a.y)?;
    let m = g.compose(mu, &nu2)?;
    let n = g.compose(rho, &kappa2)?;
    let out = GroupoidElement {
        x: a.x.clone(),
        q: a.q.add(&b.q),
        y: b.y.clone(),
        cert: (m.degree().clone(), n.degree().clone()),
        span: Span { mu: m, nu: n, z },
    };
    if !reverify(o, &out) {
        return Err(Error::Invalid(format!("composite {} failed to re-verify", out.describe(g))));
    }
    Ok(out)
}

/// Re-checks the certificate under `T` and the span form.
pub fn reverify(o: &FaOracle, e: &GroupoidElement) -> bool {
    let g = o.graph();
    let (m, n) = &e.cert;
    let cert_ok = match (act(o, &e.x, m), act(o, &e.y, n)) {
        (Ok(a), Ok(b)) => a.filter == b.filter && m.diff(n).as_ref() == Ok(&e.q),
        _ => false,
    };
    let Span { mu, nu, z } = &e.span;
    let span_ok = mu.source() == z.range()
        && nu.source() == z.range()
        && mu.degree().diff(nu.degree()).as_ref() == Ok(&e.q)
        && shift_on(g, mu, z).as_ref() == Ok(&e.x)
        && shift_on(g, nu, z).as_ref() == Ok(&e.y);
    cert_ok && span_ok
}

/// Every element with both points among `filters`, found by matching
/// `T(x, m)` against `T(y, n)` over all degrees met by `x` and `y`.
pub fn enumerate_elements(o: &FaOracle, filters: &[Filter]) -> Vec<GroupoidElement> {
    let g = o.graph();
    let mut by_image: BTreeMap<Filter, Vec<(Filter, Degree)>> = BTreeMap::new();
    for x in filters {
        if ps_membership(o, x).value != Verdict::True {
            continue;
        }
        let mut ds: Vec<Morphism> = x.iter().cloned().collect();
        g.sort_canonical(&mut ds);
        for m in ds {
            let t = act(o, x, m.degree()).expect("x ∈ D_m").filter;
            by_image.entry(t).or_default().push((x.clone(), m.degree().clone()));
        }
    }
    let mut seen: BTreeMap<(Filter, GroupDegree, Filter), GroupoidElement> = BTreeMap::new();
    for pts in by_image.values() {
        for (x, m) in pts {
            for (y, n) in pts {
                let q = m.diff(n).expect("same rank");
                let key = (x.clone(), q, y.clone());
                seen.entry(key)
                    .or_insert_with(|| from_certificate(o, x, m, y, n).expect("matched images"));
            }
        }
    }
    let mut out: Vec<GroupoidElement> = seen.into_values().collect();
    sort_elements(g, &mut out);
    out
}

pub fn sort_elements(g: &KGraph, es: &mut [GroupoidElement]) {
    es.sort_by_cached_key(|e| (e.x.sort_key(g), e.q.clone(), e.y.sort_key(g)));
}

/// `Z(μ\J ; ν\K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicGroupoidSet {
    pub mu: Morphism,
    pub nu: Morphism,
    pub j: Vec<Morphism>,
    pub k: Vec<Morphism>,
}

impl BasicGroupoidSet {
    pub fn new(o: &FaOracle, mu: &Morphism, nu: &Morphism, j: Vec<Morphism>, k: Vec<Morphism>) -> Result<BasicGroupoidSet> {
        let g = o.graph();
        for m in [mu, nu] {
            if o.is_fa(m) != Some(true) {
                return Err(Error::Domain(format!("{} is not certified finitely aligned", g.name(m))));
            }
        }
        Ok(BasicGroupoidSet {
            mu: mu.clone(),
            nu: nu.clone(),
            j,
            k,
        })
    }

    pub fn describe(&self, g: &KGraph) -> String {
        let names = |v: &[Morphism]| v.iter().map(|m| g.name(m)).collect::<Vec<_>>().join(", ");
        format!("Z({}\\{{{}}}; {}\\{{{}}})", g.name(&self.mu), names(&self.j), g.name(&self.nu), names(&self.k))
    }
}

pub fn basic_set_membership(o: &FaOracle, e: &GroupoidElement, b: &BasicGroupoidSet) -> bool {
    let in_x = cylinder_membership(&e.x.view(), &Cylinder::basic(&b.mu, b.j.clone(), Space::PathSpace));
    let in_y = cylinder_membership(&e.y.view(), &Cylinder::basic(&b.nu, b.k.clone(), Space::PathSpace));
    if !(in_x && in_y) || b.mu.degree().diff(b.nu.degree()).as_ref() != Ok(&e.q) {
        return false;
    }
    match (act(o, &e.x, b.mu.degree()), act(o, &e.y, b.nu.degree())) {
        (Ok(a), Ok(c)) => a.filter == c.filter,
        _ => false,
    }
}

/// A basic set around `e` whose `μ` extends `need_x` and whose `ν` extends
/// `need_y`, from pairs `(a, b) ∈ (x ∩ FA) × (y ∩ FA)` with a common image.
pub fn basic_neighbourhood(
    o: &FaOracle,
    e: &GroupoidElement,
    need_x: Option<&Morphism>,
    need_y: Option<&Morphism>,
) -> Option<BasicGroupoidSet> {
    let g = o.graph();
    let mut xs: Vec<&Morphism> = e.x.iter().filter(|a| o.is_fa(a) == Some(true)).collect();
    xs.sort_by_key(|a| a.degree().total());
    for a in xs {
        if need_x.is_some_and(|n| !g.prefix_leq(n, a)) {
            continue;
        }
        let Some(nd) = offset(a.degree(), &e.q) else { continue };
        let Some(b) = e.y.at_degree(&nd) else { continue };
        if o.is_fa(b) != Some(true) || need_y.is_some_and(|n| !g.prefix_leq(n, b)) {
            continue;
        }
        let set = BasicGroupoidSet {
            mu: a.clone(),
            nu: b.clone(),
            j: vec![],
            k: vec![],
        };
        if basic_set_membership(o, e, &set) {
            return Some(set);
        }
    }
    None
}

/// `d − q`, when it lies in `ℕ^k`.
pub fn offset(d: &Degree, q: &GroupDegree) -> Option<Degree> {
    let c: Option<Vec<u32>> = d
        .coords()
        .iter()
        .zip(q.coords())
        .map(|(&a, &b)| u32::try_from(a as i64 - b).ok())
        .collect();
    c.map(Degree::new)
}

/// Reduction to BPS(Λ): both points in the enumerated boundary.
pub fn bpg_membership(bps: &Bps, e: &GroupoidElement) -> (bool, Completeness) {
    let inside = bps.points.contains(&e.x) && bps.points.contains(&e.y);
    (inside, bps.completeness)
}

/// Groupoid axioms over the enumeration, exhaustively or on seeded samples.
#[derive(Clone, Copy, Debug)]
pub struct Sampling {
    pub seed: u64,
    pub triples: usize,
}

pub fn axiom_suite(o: &FaOracle, es: &[GroupoidElement], sampling: Option<Sampling>) -> Vec<Check> {
    let g = o.graph();
    let mut assoc = Check::new("associativity");
    let mut inverse = Check::new("inverse_laws");
    let mut units = Check::new("unit_laws");
    let mut coherence = Check::new("composability_coherence");
    let mut closed = Check::new("closed_under_composition");
    let mut certs = Check::new("certificates_reverify");
    let known: BTreeSet<(&Filter, &GroupDegree, &Filter)> = es.iter().map(|e| e.key()).collect();
    let mut by_range: BTreeMap<&Filter, Vec<usize>> = BTreeMap::new();
    for (i, e) in es.iter().enumerate() {
        by_range.entry(&e.x).or_default().push(i);
    }
    let comp = |a: &GroupoidElement, b: &GroupoidElement| compose_elements(o, a, b);
    for e in es {
        certs.record(Some(reverify(o, e)), || e.describe(g));
        let inv = invert(e);
        let (r, s) = element_structure(g, e);
        let a = comp(e, &inv);
        let b = comp(&inv, e);
        inverse.record(Some(a.as_ref() == Ok(&r) && b.as_ref() == Ok(&s)), || e.describe(g));
        let l = comp(&r, e);
        let rr = comp(e, &s);
        units.record(Some(l.as_ref() == Ok(e) && rr.as_ref() == Ok(e)), || e.describe(g));
    }
    let pairs: Vec<(usize, usize)> = match sampling {
        None => (0..es.len()).flat_map(|i| (0..es.len()).map(move |j| (i, j))).collect(),
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            (0..s.triples)
                .map(|_| (rng.gen_range(0..es.len()), rng.gen_range(0..es.len())))
                .collect()
        }
    };
    for &(i, j) in &pairs {
        let (a, b) = (&es[i], &es[j]);
        let (_, sa) = element_structure(g, a);
        let (rb, _) = element_structure(g, b);
        let ab = comp(a, b);
        coherence.record(Some(ab.is_ok() == (sa == rb)), || format!("{} , {}", a.describe(g), b.describe(g)));
        let Ok(ab) = ab else { continue };
        closed.record(Some(known.contains(&ab.key())), || ab.describe(g));
        let thirds: Vec<usize> = match sampling {
            None => by_range.get(&b.y).cloned().unwrap_or_default(),
            Some(s) => {
                let cands = by_range.get(&b.y).cloned().unwrap_or_default();
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ ((i as u64) << 32 | j as u64));
                if cands.is_empty() {
                    vec![]
                } else {
                    vec![cands[rng.gen_range(0..cands.len())]]
                }
            }
        };
        for k in thirds {
            let c = &es[k];
            let left = comp(&ab, c);
            let right = comp(b, c).and_then(|bc| comp(a, &bc));
            assoc.record(Some(left.is_ok() && left == right), || {
                format!("{} , {} , {}", a.describe(g), b.describe(g), c.describe(g))
            });
        }
    }
    vec![assoc, inverse, units, coherence, closed, certs]
}

/// Every element is `make_element` of its span, and every span
/// `(x(e,m), y(e,n), T(x,m))` recovers the element.
pub fn check_spans(o: &FaOracle, es: &[GroupoidElement]) -> Check {
    let g = o.graph();
    let mut c = Check::new("span_characterization");
    for e in es {
        let Span { mu, nu, z } = &e.span;
        let ok = make_element(o, mu, nu, z).is_ok_and(|f| &f == e)
            && from_certificate(o, &e.x, &e.cert.0, &e.y, &e.cert.1).is_ok_and(|f| &f == e);
        c.record(Some(ok), || e.describe(g));
    }
    c
}

/// `x ↦ (x, 0, x)` is a bijection onto the enumerated units and carries
/// `Z(μ\K)` onto `Z(μ\K; μ\K)`.
pub fn check_unit_space(o: &FaOracle, points: &[Filter], es: &[GroupoidElement]) -> Check {
    let g = o.graph();
    let mut c = Check::new("unit_space");
    let units: BTreeSet<&Filter> = es.iter().filter(|e| e.is_unit()).map(|e| &e.x).collect();
    let pts: BTreeSet<&Filter> = points.iter().collect();
    c.record(Some(units == pts), || "units differ from the points".into());
    let fa: Vec<Morphism> = o.entry.morphisms(&o.bound).0.into_iter().filter(|m| o.is_fa(m) == Some(true)).collect();
    for x in points {
        let u = unit(g, x);
        for mu in &fa {
            for k in std::iter::once(vec![]).chain(fa.iter().filter(|k| k.range() == mu.range() && *k != mu).take(3).map(|k| vec![k.clone()])) {
                let cyl = Cylinder::basic(mu, k.clone(), Space::PathSpace);
                let b = BasicGroupoidSet {
                    mu: mu.clone(),
                    nu: mu.clone(),
                    j: k.clone(),
                    k,
                };
                c.record(Some(cylinder_membership(&x.view(), &cyl) == basic_set_membership(o, &u, &b)), || {
                    format!("{} and {}", x.describe(g), b.describe(g))
                });
            }
        }
    }
    c
}

/// For each element in two basic sets, the refinement `μ₃ = x(e, d(μ₁) ∨
/// d(μ₂))`, `ν₃ = y(e, d(μ₃) − q)` with the union of the exclusions gives a
/// basic set containing the element and contained in both.
pub fn check_basis_refinement(o: &FaOracle, es: &[GroupoidElement]) -> Check {
    let g = o.graph();
    let mut c = Check::new("basis_refinement");
    for e in es {
        let around = neighbourhoods(o, e);
        for (i, b1) in around.iter().enumerate() {
            for b2 in &around[i..] {
                let Ok(l) = b1.mu.degree().lub(b2.mu.degree()) else { continue };
                let ok = (|| {
                    let mu3 = e.x.at_degree(&l)?.clone();
                    let nu3 = e.y.at_degree(&offset(&l, &e.q)?)?.clone();
                    let mut j = b1.j.clone();
                    j.extend(b2.j.iter().cloned());
                    let mut k = b1.k.clone();
                    k.extend(b2.k.iter().cloned());
                    let b3 = BasicGroupoidSet::new(o, &mu3, &nu3, j, k).ok()?;
                    let inside = es
                        .iter()
                        .filter(|f| basic_set_membership(o, f, &b3))
                        .all(|f| basic_set_membership(o, f, b1) && basic_set_membership(o, f, b2));
                    Some(basic_set_membership(o, e, &b3) && inside)
                })()
                .unwrap_or(false);
                c.record(Some(ok), || format!("{} in {} and {}", e.describe(g), b1.describe(g), b2.describe(g)));
            }
        }
    }
    c
}

/// Basic sets around `e`: every admissible `(μ, ν)` pair, with no
/// exclusion or with one excluded morphism outside the point.
fn neighbourhoods(o: &FaOracle, e: &GroupoidElement) -> Vec<BasicGroupoidSet> {
    let g = o.graph();
    let (ms, _) = o.entry.morphisms(&o.bound);
    let outside_x: Vec<&Morphism> = ms.iter().filter(|m| m.range() == e.x.range() && !e.x.contains(m)).take(2).collect();
    let outside_y: Vec<&Morphism> = ms.iter().filter(|m| m.range() == e.y.range() && !e.y.contains(m)).take(2).collect();
    let mut out = Vec::new();
    let mut xs: Vec<&Morphism> = e.x.iter().collect();
    xs.sort_by_cached_key(|m| (m.degree().total(), g.name(m)));
    for a in xs {
        let Some(nd) = offset(a.degree(), &e.q) else { continue };
        let Some(b) = e.y.at_degree(&nd) else { continue };
        let Ok(base) = BasicGroupoidSet::new(o, a, b, vec![], vec![]) else { continue };
        if !basic_set_membership(o, e, &base) {
            continue;
        }
        for j in &outside_x {
            let mut s = base.clone();
            s.j = vec![(*j).clone()];
            out.push(s);
        }
        for k in &outside_y {
            let mut s = base.clone();
            s.k = vec![(*k).clone()];
            out.push(s);
        }
        out.push(base);
    }
    out
}

/// Distinct elements lie in disjoint basic sets: different `q` are
/// separated by any two neighbourhoods; otherwise one side contains some `λ`
/// the other lacks, and requiring versus excluding `λ` separates them.
pub fn check_hausdorff(o: &FaOracle, es: &[GroupoidElement]) -> Check {
    let g = o.graph();
    let mut c = Check::new("hausdorff");
    for (i, a) in es.iter().enumerate() {
        for b in &es[i + 1..] {
            let pair = separate(o, a, b).or_else(|| separate(o, b, a).map(|(p, q)| (q, p)));
            let ok = pair.is_some_and(|(ba, bb)| {
                basic_set_membership(o, a, &ba)
                    && basic_set_membership(o, b, &bb)
                    && !es.iter().any(|f| basic_set_membership(o, f, &ba) && basic_set_membership(o, f, &bb))
            });
            c.record(Some(ok), || format!("{} vs {}", a.describe(g), b.describe(g)));
        }
    }
    c
}

fn separate(o: &FaOracle, a: &GroupoidElement, b: &GroupoidElement) -> Option<(BasicGroupoidSet, BasicGroupoidSet)> {
    if a.q != b.q {
        return Some((basic_neighbourhood(o, a, None, None)?, basic_neighbourhood(o, b, None, None)?));
    }
    if let Some(l) = a.x.iter().find(|l| !b.x.contains(l)) {
        let ba = basic_neighbourhood(o, a, Some(l), None)?;
        let mut bb = basic_neighbourhood(o, b, None, None)?;
        bb.j.push(l.clone());
        return Some((ba, bb));
    }
    if let Some(l) = a.y.iter().find(|l| !b.y.contains(l)) {
        let ba = basic_neighbourhood(o, a, None, Some(l))?;
        let mut bb = basic_neighbourhood(o, b, None, None)?;
        bb.k.push(l.clone());
        return Some((ba, bb));
    }
    None
}

/// Every basic unit set `Z(μ)` with `μ ∈ FA(Λ)` carries compactness
/// evidence.
pub fn check_compact_units(o: &FaOracle) -> Result<Check> {
    let g = o.graph();
    let mut c = Check::new("compact_open_units");
    for mu in o.entry.morphisms(&o.bound).0 {
        if o.is_fa(&mu) != Some(true) {
            continue;
        }
        let ev = compactness_probe(o, &mu, &families_through(o.entry, &mu))?;
        let ok = matches!(ev, CompactEvidence::Compact | CompactEvidence::ConsistentWithCompact { .. });
        c.record(Some(ok), || format!("Z({}): {}", g.name(&mu), ev.kind()));
    }
    Ok(c)
}

/// `s(g) ∈ BPS ⟹ r(g) ∈ BPS` on the enumeration, and closedness against
/// declared family limits.
pub fn invariance_check(o: &FaOracle, es: &[GroupoidElement], bps: &Bps) -> Vec<Check> {
    let g = o.graph();
    let mut inv = Check::new("invariant");
    let mut closed = Check::new("closed");
    let pts: BTreeSet<&Filter> = bps.points.iter().collect();
    for e in es {
        if pts.contains(&e.y) {
            inv.record(Some(pts.contains(&e.x)), || e.describe(g));
        }
    }
    for f in &o.entry.annotations.families {
        let seq = crate::pspace::DescribedSequence::family(f);
        let Ok(terms) = seq.materialized_terms(g) else { continue };
        if !terms.iter().all(|t| pts.iter().any(|p| p.set() == t)) {
            continue;
        }
        let Ok(probe) = crate::pspace::default_probe(o.entry, &seq, &o.bound) else { continue };
        if let Ok(crate::pspace::Limit::Converges(s)) = crate::pspace::pointwise_limit(g, &seq, &probe) {
            if let Ok(lim) = Filter::new(g, s, crate::pspace::Order::Ambient) {
                if ps_membership(o, &lim).value == Verdict::True {
                    closed.record(Some(pts.contains(&lim)), || format!("limit of {}", f.describe()));
                }
            }
        }
    }
    vec![inv, closed]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::pspace::{bps_enumerate, enumerate_filters, path_space, principal};

    fn d(c: &[u32]) -> Degree {
        Degree::new(c.iter().copied())
    }

    fn q(c: &[i64]) -> GroupDegree {
        GroupDegree::new(c.iter().copied())
    }

    #[test]
    fn elements_of_tg() {
        let e = catalog::lambda_tg(3).unwrap();
        let g = &e.graph;
        let o = FaOracle::new(&e, &d(&[2, 2]));
        let m = |s: &str| g.parse_morphism(s).unwrap();
        let u = principal(g, &m("u"));
        let el = make_element(&o, &m("beta[1]"), &m("alpha[1]"), &u).unwrap();
        assert_eq!(el.x, principal(g, &m("beta[1]")));
        assert_eq!(el.y, principal(g, &m("alpha[1]")));
        assert_eq!(el.q, q(&[1, -1]));
        assert!(reverify(&o, &el));
        assert!(make_element(&o, &m("u"), &m("u"), &u).unwrap().is_unit());
        let w = principal(g, &m("w"));
        let err = make_element(&o, &m("lambda"), &m("lambda"), &w).unwrap_err().to_string();
        assert!(err.contains("right shift leaves the path space"), "{err}");

        let h = make_element(&o, &m("alpha[1]"), &m("u"), &u).unwrap();
        let gh = compose_elements(&o, &el, &h).unwrap();
        assert_eq!((gh.x.clone(), gh.q.clone(), gh.y.clone()), (el.x.clone(), q(&[1, 0]), u.clone()));
        let inv = invert(&el);
        assert_eq!((inv.x.clone(), inv.q.clone(), inv.y.clone()), (el.y.clone(), q(&[-1, 1]), el.x.clone()));
        assert_eq!(invert(&inv), el);
        assert_eq!(compose_elements(&o, &el, &inv).unwrap(), unit(g, &el.x));
        assert!(compose_elements(&o, &el, &el).is_err());

        let b = BasicGroupoidSet::new(&o, &m("beta[1]"), &m("alpha[1]"), vec![], vec![]).unwrap();
        assert!(basic_set_membership(&o, &el, &b));
        let b2 = BasicGroupoidSet::new(&o, &m("beta[1]"), &m("alpha[1]"), vec![m("beta[1]")], vec![]).unwrap();
        assert!(!basic_set_membership(&o, &el, &b2));
        let top = principal(g, &m("mu.beta[1]"));
        let b3 = BasicGroupoidSet::new(&o, &m("mu.beta[1]"), &m("mu.beta[1]"), vec![], vec![]).unwrap();
        assert!(basic_set_membership(&o, &unit(g, &top), &b3));
        assert!(BasicGroupoidSet::new(&o, &m("lambda"), &m("lambda"), vec![], vec![]).is_err());
    }

    #[test]
    fn grid_counts() {
        for (n, want) in [(2, 25), (3, 196)] {
            let e = catalog::grid(n).unwrap();
            let o = FaOracle::new(&e, &d(&[n, n]));
            let (fs, _) = enumerate_filters(&e, &d(&[n, n]));
            assert_eq!(enumerate_elements(&o, &fs).len(), want);
        }
    }

    #[test]
    fn suites_on_tg() {
        let e = catalog::lambda_tg(3).unwrap();
        let b = d(&[2, 2]);
        let o = FaOracle::new(&e, &b);
        let (fs, flag) = enumerate_filters(&e, &b);
        let es = enumerate_elements(&o, &fs);
        assert_eq!(es.len(), 102);
        for c in axiom_suite(&o, &es, None) {
            assert!(c.pass && c.checked > 0, "{c:?}");
        }
        let sampled = axiom_suite(&o, &es, Some(Sampling { seed: 7, triples: 50 }));
        assert!(sampled.iter().all(|c| c.pass));
        assert!(check_spans(&o, &es).pass);
        let ps = path_space(&o, &fs);
        assert!(check_unit_space(&o, &ps, &es).pass);
        assert!(check_hausdorff(&o, &es).pass);
        assert!(check_compact_units(&o).unwrap().pass);
        let bps = bps_enumerate(&o, &fs, flag).unwrap();
        assert!(invariance_check(&o, &es, &bps).iter().all(|c| c.pass));
        let u = principal(&e.graph, &e.graph.parse_morphism("u").unwrap());
        assert!(bpg_membership(&bps, &unit(&e.graph, &u)).0);
    }

    #[test]
    fn refinement_on_grid() {
        let e = catalog::grid(2).unwrap();
        let b = d(&[2, 2]);
        let o = FaOracle::new(&e, &b);
        let (fs, _) = enumerate_filters(&e, &b);
        let es = enumerate_elements(&o, &fs);
        let c = check_basis_refinement(&o, &es);
        assert!(c.pass && c.checked > 0, "{c:?}");
    }
}
