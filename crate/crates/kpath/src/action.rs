//! Left and right shift maps and the semigroup action of ℕ^k on PS(Λ).

use std::collections::BTreeSet;

use crate::alignment::{Check, FaOracle, Verdict};
use crate::catalog::CatalogEntry;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::kgraph::{KGraph, Morphism};
use crate::pspace::{
    self, default_probe, pointwise_limit, principal_set, ps_membership, ultrafilters, DescribedSequence, Filter, Limit,
    MorphismSet,
};

/// `σ_λ x = {μ : λμ ∈ x}`.
pub fn shift_off(g: &KGraph, lambda: &Morphism, x: &Filter) -> Result<Filter> {
    if !x.contains(lambda) {
        return Err(Error::Domain(format!("{} is not in the filter", g.name(lambda))));
    }
    let set: MorphismSet = x.iter().filter_map(|m| g.strip_prefix(lambda, m)).collect();
    Ok(Filter::trusted(set))
}

/// `σ^λ x = {ζ : ζ ⪯ λμ for some μ ∈ x}`.
pub fn shift_on(g: &KGraph, lambda: &Morphism, x: &Filter) -> Result<Filter> {
    if lambda.source() != x.range() {
        return Err(Error::Domain(format!(
            "s({}) = {} but the filter has range {}",
            g.name(lambda),
            g.vertex_name(lambda.source()),
            g.vertex_name(x.range())
        )));
    }
    let mut set = MorphismSet::new();
    for m in x.iter() {
        let lm = g.compose(lambda, m)?;
        set.extend(principal_set(g, &lm));
    }
    Ok(Filter::trusted(set))
}

/// `T(x, m)` together with its witness and whether `x ∈ PS(Λ)` was
/// certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acted {
    pub filter: Filter,
    pub witness: Morphism,
    pub certified: bool,
}

/// `T(x, m) = σ_{x(e,m)} x`. A point certified outside PS is a domain
/// error; an undecided one yields an uncertified result.
pub fn act(o: &FaOracle, x: &Filter, m: &Degree) -> Result<Acted> {
    let g = o.graph();
    let ps = ps_membership(o, x);
    if ps.value == Verdict::False {
        return Err(Error::Domain(format!("{} is not in the path space", x.describe(g))));
    }
    let witness = x
        .at_degree(m)
        .ok_or_else(|| Error::Domain(format!("{} has no element of degree {}", x.describe(g), m)))?
        .clone();
    let filter = shift_off(g, &witness, x)?;
    Ok(Acted {
        filter,
        witness,
        certified: ps.value == Verdict::True,
    })
}

/// `x ∈ D_m`, with the witness `x(e, m)`. `Z(x(e,m)) ⊆ D_m` holds
/// because every filter containing `x(e,m)` meets `Λ^m`.
pub fn domain_membership(x: &Filter, m: &Degree) -> Option<Morphism> {
    x.at_degree(m).cloned()
}

/// For `x ∈ D_m ∩ D_n`, the least upper bound `l` with the witness
/// `x(e, l)`, found by extending `x(e,m)` and `x(e,n)` to a common element
/// of `x`.
pub fn directed_witness(g: &KGraph, m: &Degree, n: &Degree, x: &Filter) -> Result<(Degree, Morphism)> {
    let a = domain_membership(x, m).ok_or_else(|| Error::Domain(format!("no element of degree {m}")))?;
    let b = domain_membership(x, n).ok_or_else(|| Error::Domain(format!("no element of degree {n}")))?;
    let l = m.lub(n)?;
    let c = x
        .iter()
        .find(|c| g.prefix_leq(&a, c) && g.prefix_leq(&b, c))
        .ok_or_else(|| Error::Truncated("no common extension in the filter".into()))?;
    let (w, _) = g.factorize(c, &l)?;
    if !x.contains(&w) {
        return Err(Error::Invalid("filter is not hereditary".into()));
    }
    Ok((l, w))
}

/// Shift-map invariants over every enumerated `(λ, x)`.
pub fn check_shifts(o: &FaOracle, filters: &[Filter]) -> Vec<Check> {
    let g = o.graph();
    let mut round_trip = Check::new("round_trip");
    let mut cocycle = Check::new("cocycle");
    let mut ultra = Check::new("ultrafilters_preserved");
    let mut ps_left = Check::new("path_space_left_shift");
    let known: BTreeSet<&Filter> = filters.iter().collect();
    let us: BTreeSet<Filter> = ultrafilters(filters).into_iter().collect();
    let (ms, _) = o.entry.morphisms(&o.bound);
    for x in filters {
        let in_ps = ps_membership(o, x).as_bool();
        for lam in x.iter() {
            let off = shift_off(g, lam, x).expect("λ ∈ x");
            let back = shift_on(g, lam, &off).expect("s(λ) = r(σ_λ x)");
            round_trip.record(Some(back == *x), || format!("on(off({}, {}))", g.name(lam), x.describe(g)));
            for mu in off.iter() {
                let lm = g.compose(lam, mu).expect("composable");
                let two = shift_off(g, mu, &off).expect("μ ∈ σ_λ x");
                let one = shift_off(g, &lm, x).expect("λμ ∈ x");
                cocycle.record(Some(two == one), || format!("off {} then {} on {}", g.name(lam), g.name(mu), x.describe(g)));
            }
            if in_ps == Some(true) {
                let v = ps_membership(o, &off).as_bool();
                ps_left.record(v, || format!("off({}, {})", g.name(lam), x.describe(g)));
            }
            if us.contains(x) && known.contains(&off) {
                ultra.record(Some(us.contains(&off)), || format!("off({}, {})", g.name(lam), x.describe(g)));
            }
        }
        for lam in ms.iter().filter(|l| l.source() == x.range()) {
            let on = shift_on(g, lam, x).expect("s(λ) = r(x)");
            let back = shift_off(g, lam, &on).expect("λ ∈ σ^λ x");
            round_trip.record(Some(back == *x), || format!("off(on({}, {}))", g.name(lam), x.describe(g)));
            for mu in ms.iter().filter(|m| m.source() == lam.range()) {
                let ml = g.compose(mu, lam).expect("composable");
                let two = shift_on(g, mu, &on).expect("composable");
                let one = shift_on(g, &ml, x).expect("composable");
                cocycle.record(Some(two == one), || format!("on {} then {} on {}", g.name(lam), g.name(mu), x.describe(g)));
            }
            if us.contains(x) && known.contains(&on) {
                ultra.record(Some(us.contains(&on)), || format!("on({}, {})", g.name(lam), x.describe(g)));
            }
        }
    }
    vec![round_trip, cocycle, ultra, ps_left]
}

/// Identity, cocycle and directedness over every enumerated action point.
pub fn check_action(o: &FaOracle, filters: &[Filter]) -> Vec<Check> {
    let g = o.graph();
    let k = g.rank();
    let mut s1 = Check::new("identity");
    let mut s2 = Check::new("cocycle");
    let mut directed = Check::new("directed");
    for x in filters {
        if ps_membership(o, x).value != Verdict::True {
            continue;
        }
        let e = Degree::zero(k);
        let t = act(o, x, &e).map(|a| a.filter);
        s1.record(Some(t.as_ref() == Ok(x)), || x.describe(g));
        let degrees: Vec<Degree> = x.iter().map(|m| m.degree().clone()).collect();
        for m in &degrees {
            let tm = act(o, x, m).expect("x ∈ D_m");
            for n in &degrees {
                let (l, w) = match directed_witness(g, m, n, x) {
                    Ok(r) => r,
                    Err(_) => {
                        directed.record(Some(false), || format!("{} at {m}, {n}", x.describe(g)));
                        continue;
                    }
                };
                directed.record(Some(w.degree() == &l && m.leq(&l).unwrap() && n.leq(&l).unwrap()), || {
                    format!("{} at {m}, {n}", x.describe(g))
                });
            }
            for n in tm.filter.iter().map(|m| m.degree().clone()).collect::<Vec<_>>() {
                let lhs = act(o, &tm.filter, &n).map(|a| a.filter);
                let mn = m.add(&n).expect("same rank");
                let rhs = act(o, x, &mn).map(|a| a.filter);
                s2.record(Some(lhs.is_ok() && lhs == rhs), || format!("{} at {m} then {n}", x.describe(g)));
            }
        }
        // T(x, m+n) defined forces T(x, m) and T(T(x,m), n) defined.
        for mn in &degrees {
            for m in mn.below() {
                let n = mn.sub(&m).expect("below");
                let ok = act(o, x, &m).and_then(|a| act(o, &a.filter, &n)).is_ok();
                s2.record(Some(ok), || format!("{} splits {mn} at {m}", x.describe(g)));
            }
        }
    }
    vec![s1, s2, directed]
}

/// `C_m` and local homeomorphism witnesses: for each `x ∈ D_m`, with
/// `μ = x(e,m)`, an extension `μμ′ ∈ x ∩ FA(Λ)` such that `μ′ ∈ FA(Λ)`,
/// `T(x,m) ∈ Z(μ′)`, and `σ_μ` maps the enumerated part of `Z(μμ′)`
/// bijectively onto that of `Z(μ′)`, landing inside `C_m`.
pub fn check_local_homeomorphism(o: &FaOracle, filters: &[Filter]) -> Vec<Check> {
    let g = o.graph();
    let mut cod = Check::new("codomain_open");
    let mut local = Check::new("local_homeomorphism");
    let ps: Vec<&Filter> = filters
        .iter()
        .filter(|x| ps_membership(o, x).value == Verdict::True)
        .collect();
    for x in &ps {
        for mu in x.iter() {
            let m = mu.degree();
            let tx = act(o, x, m).expect("x ∈ D_m").filter;
            let ext = x
                .iter()
                .filter(|l| g.prefix_leq(mu, l) && o.is_fa(l) == Some(true))
                .find_map(|l| g.strip_prefix(mu, l).filter(|r| o.is_fa(r) == Some(true)));
            let Some(mu2) = ext else {
                cod.record(Some(false), || format!("{} at {}", x.describe(g), m));
                continue;
            };
            let mm = g.compose(mu, &mu2).expect("composable");
            // Every enumerated y ∈ Z(μ′) is T(σ^μ y, m) with σ^μ y ∈ D_m.
            let ok = tx.contains(&mu2)
                && ps.iter().filter(|y| y.contains(&mu2)).all(|y| {
                    shift_on(g, mu, y)
                        .ok()
                        .and_then(|z| act(o, &z, m).ok())
                        .is_some_and(|a| &a.filter == *y)
                });
            cod.record(Some(ok), || format!("{} at {}", x.describe(g), m));
            let source: Vec<&&Filter> = ps.iter().filter(|y| y.contains(&mm)).collect();
            let image: BTreeSet<Filter> = source
                .iter()
                .map(|y| shift_off(g, mu, y).expect("μ ∈ y"))
                .collect();
            let target: BTreeSet<Filter> = ps.iter().filter(|y| y.contains(&mu2)).map(|y| (*y).clone()).collect();
            local.record(Some(image.len() == source.len() && image == target), || {
                format!("Z({}) onto Z({})", g.name(&mm), g.name(&mu2))
            });
        }
    }
    vec![cod, local]
}

/// Continuity of `σ_λ` and failure of continuity of `σ^λ` along a declared
/// family `n ↦ ↓pattern(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftContinuity {
    pub family_limit: MorphismSet,
    pub image_limit: MorphismSet,
    pub image_of_limit: MorphismSet,
}

impl ShiftContinuity {
    pub fn continuous(&self) -> bool {
        self.image_limit == self.image_of_limit
    }
}

/// Compares `lim σ^λ(x_n)` with `σ^λ(lim x_n)` for a declared family.
pub fn right_shift_along(entry: &CatalogEntry, bound: &Degree, lambda: &Morphism, pattern: &str) -> Result<ShiftContinuity> {
    let g = &entry.graph;
    let fam = crate::catalog::FamilyDecl::new(pattern);
    let seq = DescribedSequence::family(&fam);
    let probe = default_probe(entry, &seq, bound)?;
    let Limit::Converges(lim) = pointwise_limit(g, &seq, &probe)? else {
        return Err(Error::Invalid("family does not converge".into()));
    };
    let lim_f = Filter::new(g, lim.clone(), pspace::Order::Ambient).map_err(|v| Error::Invalid(v.render(g)))?;
    let image_of_limit = shift_on(g, lambda, &lim_f)?.set().clone();
    let images = pspace::Tail::PrincipalFamily(crate::catalog::FamilyDecl::new(&format!(
        "{}.{}",
        g.name(lambda),
        pattern
    )));
    let shifted = DescribedSequence { prefix: vec![], tail: images };
    for k in 1..=g.cutoff() {
        let term = pspace::principal(g, &pspace::family_member(g, &fam, k)?);
        if shift_on(g, lambda, &term)?.set() != &shifted.tail_term(g, k)? {
            return Err(Error::Invalid("shifted family does not match its description".into()));
        }
    }
    let mut probe2 = probe;
    probe2.extend(default_probe(entry, &shifted, bound)?);
    let Limit::Converges(image_limit) = pointwise_limit(g, &shifted, &probe2)? else {
        return Err(Error::Invalid("shifted family does not converge".into()));
    };
    Ok(ShiftContinuity {
        family_limit: lim,
        image_limit,
        image_of_limit,
    })
}

/// Compares `lim σ_λ(x_n)` with `σ_λ(lim x_n)`, for a family whose terms
/// all contain `λ`.
pub fn left_shift_along(entry: &CatalogEntry, bound: &Degree, lambda: &Morphism, pattern: &str) -> Result<ShiftContinuity> {
    let g = &entry.graph;
    let fam = crate::catalog::FamilyDecl::new(pattern);
    let seq = DescribedSequence::family(&fam);
    let probe = default_probe(entry, &seq, bound)?;
    let Limit::Converges(lim) = pointwise_limit(g, &seq, &probe)? else {
        return Err(Error::Invalid("family does not converge".into()));
    };
    // The limit need not be a filter, so σ_λ is applied to it as a set.
    let image_of_limit: MorphismSet = lim.iter().filter_map(|m| g.strip_prefix(lambda, m)).collect();
    // σ_λ commutes with every relabelling fixing λ, so the image sequence's
    // eventual membership is again decided at a fresh index.
    let mut image_limit = MorphismSet::new();
    let used: BTreeSet<u32> = g.values(lambda);
    for m in &probe {
        let mut avoid = used.clone();
        avoid.extend(g.values(m));
        let Some(k) = (1..=g.cutoff()).rev().find(|k| !avoid.contains(k)) else {
            return Err(Error::Truncated("no free index value".into()));
        };
        let term = pspace::principal(g, &pspace::family_member(g, &fam, k)?);
        if shift_off(g, lambda, &term)?.contains(m) {
            image_limit.insert(m.clone());
        }
    }
    Ok(ShiftContinuity {
        family_limit: lim,
        image_limit,
        image_of_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::pspace::{enumerate_filters, principal};

    fn d(c: &[u32]) -> Degree {
        Degree::new(c.iter().copied())
    }

    #[test]
    fn shift_examples() {
        let e = catalog::lambda_tg(3).unwrap();
        let g = &e.graph;
        let m = |s: &str| g.parse_morphism(s).unwrap();
        let x = principal(g, &m("mu.beta[1]"));
        assert_eq!(shift_off(g, &m("mu"), &x).unwrap(), principal(g, &m("beta[1]")));
        assert_eq!(shift_off(g, &m("v"), &x).unwrap(), x);
        assert_eq!(
            shift_off(g, &m("lambda"), &principal(g, &m("lambda.alpha[1]"))).unwrap(),
            principal(g, &m("alpha[1]"))
        );
        assert!(shift_off(g, &m("w"), &x).is_err());
        let on = shift_on(g, &m("lambda"), &principal(g, &m("w"))).unwrap();
        assert_eq!(on.names(g), vec!["lambda", "v"]);
        assert_eq!(shift_on(g, &m("v"), &x).unwrap(), x);
        assert_eq!(shift_on(g, &m("mu"), &principal(g, &m("beta[1]"))).unwrap(), x);
        assert!(shift_on(g, &m("mu"), &x).is_err());
    }

    #[test]
    fn action_examples() {
        let e = catalog::lambda_tg(3).unwrap();
        let g = &e.graph;
        let o = FaOracle::new(&e, &d(&[2, 2]));
        let m = |s: &str| g.parse_morphism(s).unwrap();
        let x = principal(g, &m("mu.beta[1]"));
        let a = act(&o, &x, &d(&[0, 1])).unwrap();
        assert_eq!((a.filter.clone(), g.name(&a.witness)), (principal(g, &m("beta[1]")), "mu".to_string()));
        assert!(a.certified);
        assert_eq!(act(&o, &x, &d(&[0, 0])).unwrap().filter, x);
        assert_eq!(act(&o, &x, &d(&[1, 1])).unwrap().filter.names(g), vec!["u"]);
        assert!(act(&o, &principal(g, &m("lambda")), &d(&[0, 0])).is_err());
        assert_eq!(domain_membership(&x, &d(&[1, 0])).map(|w| g.name(&w)), Some("lambda".into()));
        assert_eq!(domain_membership(&principal(g, &m("u")), &d(&[1, 0])), None);
        let (l, w) = directed_witness(g, &d(&[1, 0]), &d(&[0, 1]), &x).unwrap();
        assert_eq!((l, g.name(&w)), (d(&[1, 1]), "lambda.alpha[1]".to_string()));
        assert_eq!(directed_witness(g, &d(&[1, 0]), &d(&[1, 0]), &x).unwrap().0, d(&[1, 0]));
        assert_eq!(directed_witness(g, &d(&[0, 0]), &d(&[0, 1]), &x).unwrap().0, d(&[0, 1]));
    }

    #[test]
    fn suites_on_tg_and_grid() {
        for e in [catalog::lambda_tg(3).unwrap(), catalog::grid(2).unwrap()] {
            let b = d(&[2, 2]);
            let o = FaOracle::new(&e, &b);
            let (fs, _) = enumerate_filters(&e, &b);
            for c in check_shifts(&o, &fs)
                .into_iter()
                .chain(check_action(&o, &fs))
                .chain(check_local_homeomorphism(&o, &fs))
            {
                assert!(c.pass && c.checked > 0, "{}: {:?}", e.name, c);
            }
        }
    }

    #[test]
    fn tg_shift_counterexamples() {
        let e = catalog::lambda_tg(3).unwrap();
        let g = &e.graph;
        let b = d(&[2, 2]);
        let lam = g.parse_morphism("lambda").unwrap();
        let r = right_shift_along(&e, &b, &lam, "alpha[n]").unwrap();
        assert!(!r.continuous());
        assert_eq!(pspace::render_set(g, &r.image_limit), "{lambda, mu, v}");
        assert_eq!(pspace::render_set(g, &r.image_of_limit), "{lambda, v}");
        let l = left_shift_along(&e, &b, &lam, "lambda.alpha[n]").unwrap();
        assert!(l.continuous());
        assert_eq!(pspace::render_set(g, &l.image_limit), "{w}");
    }
}
