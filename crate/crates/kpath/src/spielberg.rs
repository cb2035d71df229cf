//! Spielberg's groupoid of triples `[α, β, x]`, the sets `Ê`, the map
//! `Φ[α, β, x] = (σ^α x, d(α) − d(β), σ^β x)` and the comparison with the
//! filters of FAr(Λ_tg).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::action::{shift_off, shift_on};
use crate::alignment::{far_membership, mce, Check, FaOracle, MceKind};
use crate::catalog::CatalogEntry;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::groupoid::{
    basic_set_membership, compose_elements, enumerate_elements, invert, make_element, BasicGroupoidSet,
    GroupoidElement,
};
use crate::kgraph::{Completeness, KGraph, Morphism};
use crate::pspace::{
    cylinder_membership, default_probe, enumerate_filters, nondiscrete_points, ps_membership, Cylinder,
    DescribedSequence, Filter, MorphismSet, Order, Space, Tail,
};
use crate::alignment::Verdict;

/// Fails unless the graph carries an FA(Λ) = Λ certificate: finitely many
/// vertices and edges and no families, hence row-finite.
pub fn require_finitely_aligned(o: &FaOracle) -> Result<()> {
    let e = o.entry;
    if !e.graph.is_indexed() && e.annotations.scope.is_none() {
        return Ok(());
    }
    let (ms, _) = e.morphisms(&o.bound);
    let bad = ms.iter().find(|m| o.is_fa(m) == Some(false));
    Err(Error::Unsupported(match bad {
        Some(m) => format!(
            "Spielberg's groupoid needs FA(Λ) = Λ, and {} in {} is not finitely aligned",
            e.graph.name(m),
            e.name
        ),
        None => format!("Spielberg's groupoid needs FA(Λ) = Λ, which {} does not certify", e.name),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpielbergTriple {
    pub alpha: Morphism,
    pub beta: Morphism,
    pub x: Filter,
    /// Set once the triple is the chosen representative of its class.
    pub canonical: bool,
}

impl SpielbergTriple {
    pub fn new(g: &KGraph, alpha: &Morphism, beta: &Morphism, x: &Filter) -> Result<SpielbergTriple> {
        if alpha.source() != x.range() || beta.source() != x.range() {
            return Err(Error::Domain(format!(
                "[{}, {}, {}] needs s(α) = s(β) = r(x)",
                g.name(alpha),
                g.name(beta),
                x.describe(g)
            )));
        }
        Ok(SpielbergTriple {
            alpha: alpha.clone(),
            beta: beta.clone(),
            x: x.clone(),
            canonical: false,
        })
    }

    pub fn unit(g: &KGraph, x: &Filter) -> SpielbergTriple {
        let r = g.vertex(x.range());
        SpielbergTriple {
            alpha: r.clone(),
            beta: r,
            x: x.clone(),
            canonical: false,
        }
    }

    pub fn inverse(&self) -> SpielbergTriple {
        SpielbergTriple {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            x: self.x.clone(),
            canonical: false,
        }
    }

    fn key(&self) -> (Morphism, Morphism, Filter) {
        (self.alpha.clone(), self.beta.clone(), self.x.clone())
    }

    pub fn sort_key(&self, g: &KGraph) -> (String, String, Vec<String>) {
        (g.name(&self.alpha), g.name(&self.beta), self.x.names(g))
    }

    pub fn describe(&self, g: &KGraph) -> String {
        format!("[{}, {}, {}]", g.name(&self.alpha), g.name(&self.beta), self.x.describe(g))
    }

    pub fn to_json(&self, g: &KGraph, class: Option<usize>) -> serde_json::Value {
        serde_json::json!({
            "alpha": g.name(&self.alpha),
            "beta": g.name(&self.beta),
            "x": self.x.to_json(g),
            "class": class,
        })
    }
}

/// `(y, γ, γ′)` with `x = σ^γ y`, `x′ = σ^{γ′} y`, `αγ = α′γ′`, `βγ = β′γ′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    pub y: Filter,
    pub gamma: Morphism,
    pub gamma2: Morphism,
}

impl EquivWitness {
    pub fn reverify(&self, g: &KGraph, t1: &SpielbergTriple, t2: &SpielbergTriple) -> bool {
        let c = |a: &Morphism, b: &Morphism| g.compose(a, b).ok();
        shift_on(g, &self.gamma, &self.y).as_ref() == Ok(&t1.x)
            && shift_on(g, &self.gamma2, &self.y).as_ref() == Ok(&t2.x)
            && c(&t1.alpha, &self.gamma).is_some()
            && c(&t1.alpha, &self.gamma) == c(&t2.alpha, &self.gamma2)
            && c(&t1.beta, &self.gamma) == c(&t2.beta, &self.gamma2)
    }
}

/// Decides `t1 ~ t2` by searching `γ ∈ t1.x`, `γ′ ∈ t2.x` with a common
/// `σ_γ t1.x = σ_{γ′} t2.x`.
pub fn triple_equiv(o: &FaOracle, t1: &SpielbergTriple, t2: &SpielbergTriple) -> Result<Option<EquivWitness>> {
    require_finitely_aligned(o)?;
    let g = o.graph();
    for gamma in t1.x.iter() {
        let Ok(a1) = g.compose(&t1.alpha, gamma) else { continue };
        let Ok(b1) = g.compose(&t1.beta, gamma) else { continue };
        let y = shift_off(g, gamma, &t1.x)?;
        for gamma2 in t2.x.iter().filter(|c| c.source() == gamma.source()) {
            if g.compose(&t2.alpha, gamma2).ok().as_ref() != Some(&a1)
                || g.compose(&t2.beta, gamma2).ok().as_ref() != Some(&b1)
            {
                continue;
            }
            if shift_off(g, gamma2, &t2.x)? == y {
                return Ok(Some(EquivWitness {
                    y,
                    gamma: gamma.clone(),
                    gamma2: gamma2.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// The triples over the enumerated filters, grouped into `~`-classes.
pub struct SpielbergClasses {
    pub bound: Degree,
    pub completeness: Completeness,
    pub filters: Vec<Filter>,
    pub triples: Vec<SpielbergTriple>,
    pub class_of: Vec<usize>,
    /// Index into `triples` of each class representative.
    pub reps: Vec<usize>,
    index: HashMap<(Morphism, Morphism, Filter), usize>,
}

impl SpielbergClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn class(&self, t: &SpielbergTriple) -> Option<usize> {
        self.index.get(&t.key()).map(|&i| self.class_of[i])
    }

    pub fn rep(&self, class: usize) -> &SpielbergTriple {
        &self.triples[self.reps[class]]
    }

    pub fn canonical(&self, t: &SpielbergTriple) -> Option<SpielbergTriple> {
        self.class(t).map(|c| self.rep(c).clone())
    }

    pub fn members(&self, class: usize) -> impl Iterator<Item = &SpielbergTriple> {
        self.triples.iter().zip(&self.class_of).filter(move |(_, &c)| c == class).map(|(t, _)| t)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Every `[α, β, x]` with `x`, `σ^α x` and `σ^β x` among the enumerated
/// filters, joined along `[α, β, x] ~ [αγ, βγ, σ_γ x]` for `γ ∈ x`.
pub fn spielberg_classes(o: &FaOracle) -> Result<SpielbergClasses> {
    require_finitely_aligned(o)?;
    let g = o.graph();
    let (filters, completeness) = enumerate_filters(o.entry, &o.bound);
    let known: BTreeSet<&Filter> = filters.iter().collect();
    let (ms, _) = o.entry.morphisms(&o.bound);
    let mut triples: Vec<SpielbergTriple> = Vec::new();
    let mut index: HashMap<(Morphism, Morphism, Filter), usize> = HashMap::new();
    let mut push = |t: SpielbergTriple, triples: &mut Vec<SpielbergTriple>| -> usize {
        *index.entry(t.key()).or_insert_with(|| {
            triples.push(t);
            triples.len() - 1
        })
    };
    for x in &filters {
        let into: Vec<&Morphism> = ms
            .iter()
            .filter(|a| a.source() == x.range() && shift_on(g, a, x).is_ok_and(|f| known.contains(&f)))
            .collect();
        for a in &into {
            for b in &into {
                push(SpielbergTriple::new(g, a, b, x)?, &mut triples);
            }
        }
    }
    let mut parent: Vec<usize> = (0..triples.len()).collect();
    let mut i = 0;
    while i < triples.len() {
        let t = triples[i].clone();
        for gamma in t.x.iter().filter(|c| !c.is_vertex()) {
            let y = shift_off(g, gamma, &t.x)?;
            let r = SpielbergTriple::new(g, &g.compose(&t.alpha, gamma)?, &g.compose(&t.beta, gamma)?, &y)?;
            let j = push(r, &mut triples);
            if j >= parent.len() {
                parent.push(j);
            }
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        i += 1;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..triples.len() {
        groups.entry(find(&mut parent, i)).or_default().push(i);
    }
    let mut reps: Vec<usize> = groups
        .values()
        .map(|mem| *mem.iter().min_by_key(|&&i| triples[i].sort_key(g)).expect("non-empty"))
        .collect();
    reps.sort_by_cached_key(|&i| triples[i].sort_key(g));
    let mut class_of = vec![0; triples.len()];
    for (c, &r) in reps.iter().enumerate() {
        let root = find(&mut parent, r);
        for &m in &groups[&root] {
            class_of[m] = c;
        }
        triples[r].canonical = true;
    }
    Ok(SpielbergClasses {
        bound: o.bound.clone(),
        completeness,
        filters,
        triples,
        class_of,
        reps,
        index,
    })
}

/// `[α, β, x][γ, δ, y] = [αξ, δη, z]` where `ζ = βξ = γη` is the element of
/// `σ^β x = σ^γ y` of degree `d(β) ∨ d(γ)` and `z = σ_ζ(σ^β x)`.
pub fn sp_compose(o: &FaOracle, t1: &SpielbergTriple, t2: &SpielbergTriple) -> Result<SpielbergTriple> {
    require_finitely_aligned(o)?;
    let g = o.graph();
    let w = shift_on(g, &t1.beta, &t1.x)?;
    if shift_on(g, &t2.alpha, &t2.x)? != w {
        return Err(Error::NotComposable {
            left: t1.describe(g),
            right: t2.describe(g),
        });
    }
    let l = t1.beta.degree().lub(t2.alpha.degree())?;
    let zeta = w
        .at_degree(&l)
        .ok_or_else(|| Error::Truncated(format!("{} has no element of degree {l}", w.describe(g))))?;
    let xi = g.strip_prefix(&t1.beta, zeta).expect("β ⪯ ζ");
    let eta = g.strip_prefix(&t2.alpha, zeta).expect("γ ⪯ ζ");
    let z = shift_off(g, zeta, &w)?;
    SpielbergTriple::new(g, &g.compose(&t1.alpha, &xi)?, &g.compose(&t2.beta, &eta)?, &z)
}

pub fn phi(o: &FaOracle, t: &SpielbergTriple) -> Result<GroupoidElement> {
    make_element(o, &t.alpha, &t.beta, &t.x)
}

/// `Ê` for `E = αΛ \ ⋃ β_iΛ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EHatSet {
    pub alpha: Morphism,
    pub exclusions: Vec<Morphism>,
}

impl EHatSet {
    pub fn new(g: &KGraph, alpha: &Morphism, exclusions: Vec<Morphism>) -> Result<EHatSet> {
        if let Some(b) = exclusions.iter().find(|b| *b == alpha || !g.prefix_leq(alpha, b)) {
            return Err(Error::Domain(format!("{} does not strictly extend {}", g.name(b), g.name(alpha))));
        }
        Ok(EHatSet {
            alpha: alpha.clone(),
            exclusions,
        })
    }
}

/// A `γ ∈ x` with `x ∩ γΛ ⊆ αΛ \ ⋃ β_iΛ`. Takes any exclusions, including
/// ones that do not extend `α`.
pub fn e_hat_witness(g: &KGraph, x: &Filter, alpha: &Morphism, exclusions: &[Morphism]) -> Option<Morphism> {
    let in_e = |l: &Morphism| g.prefix_leq(alpha, l) && !exclusions.iter().any(|b| g.prefix_leq(b, l));
    let mut cands: Vec<&Morphism> = x.iter().collect();
    cands.sort_by_cached_key(|m| (m.degree().total(), g.name(m)));
    cands
        .into_iter()
        .find(|gamma| x.iter().filter(|l| g.prefix_leq(gamma, l)).all(in_e))
        .cloned()
}

pub fn e_hat_membership(g: &KGraph, x: &Filter, e: &EHatSet) -> bool {
    e_hat_witness(g, x, &e.alpha, &e.exclusions).is_some()
}

/// Exclusion sets tried for `μ`: every `K ⊆ μΛ` of size at most two within
/// the bound, and every subset of `x ∩ μΛ`, with `μ` itself allowed.
fn exclusion_sets(g: &KGraph, x: &Filter, mu: &Morphism, ext: &[Morphism]) -> Vec<Vec<Morphism>> {
    let mut out: BTreeSet<Vec<Morphism>> = BTreeSet::new();
    out.insert(vec![]);
    for (i, a) in ext.iter().enumerate() {
        out.insert(vec![a.clone()]);
        for b in &ext[i + 1..] {
            out.insert(vec![a.clone(), b.clone()]);
        }
    }
    let inside: Vec<&Morphism> = x.iter().filter(|l| g.prefix_leq(mu, l)).collect();
    if inside.len() <= 12 {
        for mask in 0u32..(1 << inside.len()) {
            let k: Vec<Morphism> = (0..inside.len()).filter(|i| mask >> i & 1 == 1).map(|i| inside[i].clone()).collect();
            out.insert(k);
        }
    }
    out.into_iter().collect()
}

/// `Z(μ\K) = Ê` for `E = μΛ \ ⋃ KΛ`, pointwise on `filters`, over every `μ`
/// within the bound.
pub fn check_ehat_agreement(entry: &CatalogEntry, bound: &Degree, filters: &[Filter]) -> Check {
    let g = &entry.graph;
    let mut c = Check::new("z_equals_e_hat");
    let (ms, _) = entry.morphisms(bound);
    for mu in &ms {
        let ext: Vec<Morphism> = ms.iter().filter(|l| g.prefix_leq(mu, l)).cloned().collect();
        for x in filters.iter().filter(|x| x.range() == mu.range()) {
            for k in exclusion_sets(g, x, mu, &ext) {
                let z = cylinder_membership(&x.view(), &Cylinder::basic(mu, k.clone(), Space::Filters));
                let e = e_hat_witness(g, x, mu, &k).is_some();
                c.record(Some(z == e), || {
                    let names: Vec<String> = k.iter().map(|m| g.name(m)).collect();
                    format!("{} and μ = {}, K = {{{}}}", x.describe(g), g.name(mu), names.join(", "))
                });
            }
        }
    }
    c
}

/// Each basic set of one topology around a filter contains a basic set of
/// the other around it: for `Z(μ\K)` the set `Ê` with `E = μΛ \ ⋃ KΛ`, and
/// for `Ê` with witness `γ` the cylinder `Z(γ\K_γ)` where `K_γ` lists the
/// minimal elements of `γΛ \ E` within the bound.
pub fn check_topologies_agree(entry: &CatalogEntry, bound: &Degree, filters: &[Filter]) -> Check {
    let g = &entry.graph;
    let mut c = Check::new("topologies_agree");
    let (ms, _) = entry.morphisms(bound);
    for mu in &ms {
        let ext: Vec<Morphism> = ms.iter().filter(|l| g.prefix_leq(mu, l) && *l != mu).cloned().collect();
        let mut ks: Vec<Vec<Morphism>> = vec![vec![]];
        ks.extend(ext.iter().map(|k| vec![k.clone()]));
        for k in ks {
            let in_e = |l: &Morphism| g.prefix_leq(mu, l) && !k.iter().any(|b| g.prefix_leq(b, l));
            for x in filters
                .iter()
                .filter(|x| cylinder_membership(&x.view(), &Cylinder::basic(mu, k.clone(), Space::Filters)))
            {
                let fwd = e_hat_witness(g, x, mu, &k).is_some()
                    && filters
                        .iter()
                        .filter(|y| e_hat_witness(g, y, mu, &k).is_some())
                        .all(|y| cylinder_membership(&y.view(), &Cylinder::basic(mu, k.clone(), Space::Filters)));
                let back = e_hat_witness(g, x, mu, &k).is_some_and(|gamma| {
                    let outside: Vec<Morphism> =
                        ms.iter().filter(|l| g.prefix_leq(&gamma, l) && !in_e(l)).cloned().collect();
                    let cyl = Cylinder::basic(&gamma, outside, Space::Filters);
                    cylinder_membership(&x.view(), &cyl)
                        && filters
                            .iter()
                            .filter(|y| cylinder_membership(&y.view(), &cyl))
                            .all(|y| e_hat_witness(g, y, mu, &k).is_some())
                });
                c.record(Some(fwd && back), || format!("{} around Z({})", x.describe(g), g.name(mu)));
            }
        }
    }
    c
}

/// For finitely aligned `μ`, `Z(μ\{ν})` equals `Z(μ\MCE(μ, ν))`, whose
/// exclusions lie in `μΛ`.
pub fn check_exclusion_reduction(o: &FaOracle, filters: &[Filter]) -> Check {
    let g = o.graph();
    let mut c = Check::new("exclusions_reduce_into_mu_lambda");
    let (ms, _) = o.entry.morphisms(&o.bound);
    for mu in ms.iter().filter(|m| o.is_fa(m) == Some(true)) {
        for nu in ms.iter().filter(|n| n.range() == mu.range()) {
            let m = mce(g, mu, nu);
            if m.kind != MceKind::ExactFinite {
                c.record(None, String::new);
                continue;
            }
            let k = m.elements;
            for x in filters.iter().filter(|x| x.range() == mu.range()) {
                let a = cylinder_membership(&x.view(), &Cylinder::basic(mu, vec![nu.clone()], Space::Filters));
                let b = cylinder_membership(&x.view(), &Cylinder::basic(mu, k.clone(), Space::Filters));
                c.record(Some(a == b), || format!("{} in Z({}\\{})", x.describe(g), g.name(mu), g.name(nu)));
            }
        }
    }
    c
}

/// ~ agrees with the witness search on every pair of triples: reflexive,
/// symmetric, and matching the class partition (hence transitive).
pub fn check_equivalence(o: &FaOracle, cl: &SpielbergClasses) -> Result<Check> {
    let g = o.graph();
    let mut c = Check::new("equivalence_relation");
    for (i, t1) in cl.triples.iter().enumerate() {
        let refl = triple_equiv(o, t1, t1)?;
        c.record(Some(refl.as_ref().is_some_and(|w| w.reverify(g, t1, t1))), || t1.describe(g));
        for (j, t2) in cl.triples.iter().enumerate().skip(i + 1) {
            let fwd = triple_equiv(o, t1, t2)?;
            let back = triple_equiv(o, t2, t1)?;
            let same = cl.class_of[i] == cl.class_of[j];
            let ok = fwd.is_some() == same
                && back.is_some() == same
                && fwd.as_ref().is_none_or(|w| w.reverify(g, t1, t2))
                && back.as_ref().is_none_or(|w| w.reverify(g, t2, t1));
            c.record(Some(ok), || format!("{} vs {}", t1.describe(g), t2.describe(g)));
        }
    }
    Ok(c)
}

#[derive(Debug)]
pub struct IsoReport {
    pub bound: Degree,
    pub completeness: Completeness,
    pub triples: usize,
    pub classes: usize,
    pub elements: usize,
    pub checks: Vec<Check>,
}

impl IsoReport {
    pub fn pass(&self) -> bool {
        self.classes == self.elements && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "bound": self.bound,
            "completeness": self.completeness,
            "triples": self.triples,
            "classes": self.classes,
            "elements": self.elements,
            "pass": self.pass(),
            "checks": self.checks,
        })
    }
}

/// Φ on the enumerated classes against the enumerated path groupoid:
/// well-defined, bijective, and matching composition tables, inverses and
/// basic sets entrywise.
pub fn iso_check(o: &FaOracle) -> Result<IsoReport> {
    let g = o.graph();
    let cl = spielberg_classes(o)?;
    let es = enumerate_elements(o, &cl.filters);
    let pos: HashMap<(Filter, crate::degree::GroupDegree, Filter), usize> =
        es.iter().enumerate().map(|(i, e)| ((e.x.clone(), e.q.clone(), e.y.clone()), i)).collect();
    let at = |e: &GroupoidElement| pos.get(&(e.x.clone(), e.q.clone(), e.y.clone())).copied();

    let mut well = Check::new("well_defined");
    let mut image: Vec<Option<usize>> = vec![None; cl.len()];
    for (t, &c) in cl.triples.iter().zip(&cl.class_of) {
        let e = phi(o, t).ok().and_then(|e| at(&e));
        match image[c] {
            None if cl.reps[c] == cl.index[&t.key()] => image[c] = e,
            _ => {}
        }
        let rep = phi(o, cl.rep(c)).ok().and_then(|e| at(&e));
        well.record(Some(e.is_some() && e == rep), || t.describe(g));
    }
    let mut injective = Check::new("injective");
    let mut hit: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, e) in image.iter().enumerate() {
        let ok = e.is_some_and(|e| hit.insert(e, c).is_none());
        injective.record(Some(ok), || cl.rep(c).describe(g));
    }
    let mut surjective = Check::new("surjective");
    for (i, e) in es.iter().enumerate() {
        surjective.record(Some(hit.contains_key(&i)), || e.describe(g));
    }

    let mut units = Check::new("units");
    for x in &cl.filters {
        let u = cl.class(&SpielbergTriple::unit(g, x));
        let ok = u.and_then(|c| image[c]).is_some_and(|i| es[i].is_unit() && es[i].x == *x);
        units.record(Some(ok), || x.describe(g));
    }

    let mut inversion = Check::new("inversion");
    let mut composition = Check::new("composition_table");
    for c in 0..cl.len() {
        let t = cl.rep(c);
        let inv = cl.class(&t.inverse()).and_then(|d| image[d]);
        let want = image[c].and_then(|i| at(&invert(&es[i])));
        inversion.record(Some(inv.is_some() && inv == want), || t.describe(g));
        for d in 0..cl.len() {
            let s = cl.rep(d);
            let lhs = match sp_compose(o, t, s) {
                Ok(u) => Some(cl.class(&u).and_then(|k| image[k])),
                Err(Error::NotComposable { .. }) => None,
                Err(e) => return Err(e),
            };
            let rhs = match (image[c], image[d]) {
                (Some(i), Some(j)) => match compose_elements(o, &es[i], &es[j]) {
                    Ok(e) => Some(at(&e)),
                    Err(Error::NotComposable { .. }) => None,
                    Err(e) => return Err(e),
                },
                _ => Some(None),
            };
            let ok = match (&lhs, &rhs) {
                (None, None) => true,
                (Some(a), Some(b)) => a.is_some() && a == b,
                _ => false,
            };
            composition.record(Some(ok), || format!("{} · {}", t.describe(g), s.describe(g)));
        }
    }

    let basic = check_basic_images(o, &cl, &es)?;
    Ok(IsoReport {
        bound: o.bound.clone(),
        completeness: cl.completeness,
        triples: cl.triples.len(),
        classes: cl.len(),
        elements: es.len(),
        checks: vec![well, injective, surjective, units, inversion, composition, basic],
    })
}

/// Φ carries `[α, β, Z(μ\K)]` onto `Z(αμ\αK; βμ\βK)`.
fn check_basic_images(o: &FaOracle, cl: &SpielbergClasses, es: &[GroupoidElement]) -> Result<Check> {
    let g = o.graph();
    let mut c = Check::new("basic_set_images");
    let (ms, _) = o.entry.morphisms(&o.bound);
    for a in &ms {
        for b in ms.iter().filter(|b| b.source() == a.source()) {
            for mu in ms.iter().filter(|m| m.range() == a.source()) {
                let ext: Vec<&Morphism> = ms.iter().filter(|l| g.prefix_leq(mu, l) && *l != mu).collect();
                let mut ks: Vec<Vec<Morphism>> = vec![vec![]];
                ks.extend(ext.iter().take(3).map(|k| vec![(*k).clone()]));
                for k in ks {
                    let cyl = Cylinder::basic(mu, k.clone(), Space::PathSpace);
                    let mut lhs: BTreeSet<(Vec<String>, String, Vec<String>)> = BTreeSet::new();
                    for y in cl.filters.iter().filter(|y| cylinder_membership(&y.view(), &cyl)) {
                        let t = SpielbergTriple::new(g, a, b, y)?;
                        if cl.class(&t).is_none() {
                            continue;
                        }
                        let e = phi(o, &t)?;
                        lhs.insert((e.x.names(g), e.q.to_string(), e.y.names(g)));
                    }
                    let (Ok(am), Ok(bm)) = (g.compose(a, mu), g.compose(b, mu)) else { continue };
                    let ak: Result<Vec<Morphism>> = k.iter().map(|k| g.compose(a, k)).collect();
                    let bk: Result<Vec<Morphism>> = k.iter().map(|k| g.compose(b, k)).collect();
                    let set = BasicGroupoidSet::new(o, &am, &bm, ak?, bk?)?;
                    let rhs: BTreeSet<(Vec<String>, String, Vec<String>)> = es
                        .iter()
                        .filter(|e| basic_set_membership(o, e, &set))
                        .map(|e| (e.x.names(g), e.q.to_string(), e.y.names(g)))
                        .collect();
                    c.record(Some(lhs == rhs), || {
                        format!("[{}, {}, Z({})] vs {}", g.name(a), g.name(b), g.name(mu), set.describe(g))
                    });
                }
            }
        }
    }
    Ok(c)
}

#[derive(Debug)]
pub struct RelativeComparison {
    pub bound: Degree,
    pub excluded: Vec<String>,
    /// Principal filters of FAr(Λ) in its own prefix order.
    pub relative_filters: Vec<Filter>,
    pub relative_nondiscrete: Vec<(String, Filter)>,
    pub path_space_nondiscrete: Vec<(String, Filter)>,
}

impl RelativeComparison {
    pub fn counts(&self) -> (usize, usize) {
        (self.relative_nondiscrete.len(), self.path_space_nondiscrete.len())
    }

    /// The limit found in F(FAr) but missing from PS.
    pub fn extra_limits(&self) -> Vec<&(String, Filter)> {
        self.relative_nondiscrete
            .iter()
            .filter(|(_, f)| !self.path_space_nondiscrete.iter().any(|(_, p)| p == f))
            .collect()
    }

    pub fn to_json(&self, g: &KGraph) -> serde_json::Value {
        let pts = |v: &[(String, Filter)]| -> Vec<serde_json::Value> {
            v.iter()
                .map(|(fam, f)| serde_json::json!({ "family": fam, "limit": f.describe(g), "set": f.to_json(g) }))
                .collect()
        };
        serde_json::json!({
            "bound": self.bound,
            "far_excluded": self.excluded,
            "relative_filters": self.relative_filters.len(),
            "relative": { "nondiscrete_points": pts(&self.relative_nondiscrete) },
            "path_space": { "nondiscrete_points": pts(&self.path_space_nondiscrete) },
            "counts": { "relative": self.relative_nondiscrete.len(), "path_space": self.path_space_nondiscrete.len() },
        })
    }
}

/// Nondiscrete points of F(FAr(Λ_tg)) against those of PS(Λ_tg), found as
/// limits of the declared families.
pub fn relative_filter_space(o: &FaOracle) -> Result<RelativeComparison> {
    let e = o.entry;
    if e.name != "tg" {
        return Err(Error::Unsupported(format!("the comparison runs on tg only, not {}", e.name)));
    }
    let g = &e.graph;
    let (ms, _) = e.morphisms(&o.bound);
    let far_map = far_membership(o, &ms);
    let mut excluded: Vec<Morphism> = ms.iter().filter(|m| far_map[*m] == Some(false)).cloned().collect();
    g.sort_canonical(&mut excluded);
    let far: Arc<MorphismSet> = Arc::new(ms.iter().filter(|m| far_map[*m] == Some(true)).cloned().collect());

    let mut relative_filters: Vec<Filter> = far
        .iter()
        .filter_map(|m| Filter::new(g, Order::Within(&far).down(g, m), Order::Within(&far)).ok())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    crate::pspace::sort_filters(g, &mut relative_filters);

    let rel_seqs: Vec<DescribedSequence> = e
        .annotations
        .families
        .iter()
        .map(|f| DescribedSequence {
            prefix: vec![],
            tail: Tail::RelativeFamily {
                family: f.clone(),
                within: far.clone(),
            },
        })
        .collect();
    let ps_seqs: Vec<DescribedSequence> = e.annotations.families.iter().map(DescribedSequence::family).collect();
    let mut relative = Vec::new();
    for s in &rel_seqs {
        let probe = default_probe(e, s, &o.bound)?;
        let pts = nondiscrete_points(g, std::slice::from_ref(s), &probe, Order::Within(&far), &|_| true)?;
        relative.extend(pts.into_iter().filter(|(_, f)| f.iter().all(|m| far.contains(m))));
    }
    let mut ps = Vec::new();
    for s in &ps_seqs {
        let probe = default_probe(e, s, &o.bound)?;
        ps.extend(nondiscrete_points(g, std::slice::from_ref(s), &probe, Order::Ambient, &|f| {
            ps_membership(o, f).value == Verdict::True
        })?);
    }
    let dedup = |v: &mut Vec<(String, Filter)>| {
        let mut seen = BTreeSet::new();
        v.retain(|(_, f)| seen.insert(f.clone()));
        v.sort_by_cached_key(|(_, f)| f.sort_key(g));
    };
    dedup(&mut relative);
    dedup(&mut ps);
    Ok(RelativeComparison {
        bound: o.bound.clone(),
        excluded: excluded.iter().map(|m| g.name(m)).collect(),
        relative_filters,
        relative_nondiscrete: relative,
        path_space_nondiscrete: ps,
    })
}
