//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kpath::action::{check_action, check_shifts, right_shift_along, shift_on};
use kpath::alignment::{check_fa_structure, validate_constellation, FaOracle, Verdict};
use kpath::catalog::{self, CatalogEntry};
use kpath::groupoid::{axiom_suite, check_spans, enumerate_elements, invariance_check};
use kpath::pspace::{
    bps_enumerate, compactness_probe, enumerate_filters, families_through, path_space, principal, render_set,
    CompactEvidence, Filter, Violation,
};
use kpath::spielberg::{check_ehat_agreement, check_topologies_agree, iso_check, relative_filter_space};
use kpath::{Degree, KGraph, Morphism};

// Bounds and cutoffs every criterion runs at.
const TG_BOUND: [u32; 2] = [2, 2];
const TG_CUTOFF: u32 = 3;
const TG_FILTER_CUTOFFS: [u32; 3] = [2, 5, 10];
const TG_BRUTE_CUTOFFS: [u32; 2] = [2, 3];
const TG_EHAT_CUTOFF: u32 = 5;
const TGI_BLOCKS: u32 = 2;
const YEE_BOUND: [u32; 2] = [1, 1];
const FINITE_BOUND: u32 = 2;
const CYCLE_BOUND: u32 = 3;

fn d(c: &[u32]) -> Degree {
    Degree::new(c.iter().copied())
}

fn finite_bound(e: &CatalogEntry) -> Degree {
    let k = e.graph.rank();
    Degree::new(vec![if e.name == "cycle" { CYCLE_BOUND } else { FINITE_BOUND }; k])
}

fn tg(cutoff: u32) -> CatalogEntry {
    catalog::lambda_tg(cutoff).unwrap()
}

fn m(g: &KGraph, s: &str) -> Morphism {
    g.parse_morphism(s).unwrap()
}

fn names(g: &KGraph, ms: &[Morphism]) -> BTreeSet<String> {
    ms.iter().map(|x| g.name(x)).collect()
}

/// Common extensions of `a` and `b` of degree `d(a) ∨ d(b)`, by scanning
/// every morphism within `bound`.
fn brute_mce(g: &KGraph, all: &[Morphism], a: &Morphism, b: &Morphism) -> BTreeSet<String> {
    let Ok(l) = a.degree().lub(b.degree()) else { return BTreeSet::new() };
    all.iter()
        .filter(|x| *x.degree() == l && g.prefix_leq(a, x) && g.prefix_leq(b, x))
        .map(|x| g.name(x))
        .collect()
}

/// Not finitely aligned at `lambda` iff some `MCE(μ, ν)` with `μ ∈ λΛ`,
/// `ν ∈ r(λ)Λ` grows when the cutoff grows.
fn growth_oracle(small: &CatalogEntry, large: &CatalogEntry, bound: &Degree) -> BTreeSet<String> {
    let (gs, gl) = (&small.graph, &large.graph);
    let (ms, _) = gs.enumerate_morphisms(bound);
    let (ml, _) = gl.enumerate_morphisms(bound);
    let mut bad = BTreeSet::new();
    for lam in &ms {
        let ext: Vec<&Morphism> = ms.iter().filter(|x| gs.prefix_leq(lam, x)).collect();
        let others: Vec<&Morphism> = ms.iter().filter(|x| x.range() == lam.range()).collect();
        let grows = ext.iter().any(|a| {
            others.iter().any(|b| {
                let (a2, b2) = (m(gl, &gs.name(a)), m(gl, &gs.name(b)));
                brute_mce(gs, &ms, a, b).len() < brute_mce(gl, &ml, &a2, &b2).len()
            })
        });
        if grows {
            bad.insert(gs.name(lam));
        }
    }
    bad
}

/// All filters of a finite category, by testing every subset.
fn brute_filters(g: &KGraph, all: &[Morphism]) -> Vec<BTreeSet<Morphism>> {
    assert!(all.len() <= 16, "subset scan too large");
    let mut out = Vec::new();
    for mask in 1u32..(1 << all.len()) {
        let s: BTreeSet<Morphism> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        let hereditary = s.iter().all(|x| all.iter().filter(|p| g.prefix_leq(p, x)).all(|p| s.contains(p)));
        let directed = s.iter().all(|a| s.iter().all(|b| s.iter().any(|c| g.prefix_leq(a, c) && g.prefix_leq(b, c))));
        if hereditary && directed {
            out.push(s);
        }
    }
    out
}

fn describe_all(g: &KGraph, fs: &[Filter]) -> BTreeSet<String> {
    fs.iter().map(|f| f.describe(g)).collect()
}

fn c1() -> Result<String, String> {
    let (e, big) = (tg(TG_CUTOFF), tg(TG_CUTOFF + 1));
    let g = &e.graph;
    let b = d(&TG_BOUND);
    let o = FaOracle::new(&e, &b);
    let (ms, _) = e.morphisms(&b);
    let not_fa: Vec<Morphism> = ms.iter().filter(|x| o.is_fa(x) != Some(true)).cloned().collect();
    let got = names(g, &not_fa);
    let want: BTreeSet<String> = ["v", "lambda", "mu"].map(String::from).into();
    let oracle = growth_oracle(&e, &big, &b);
    if got != want || oracle != want {
        return Err(format!("computed {got:?}, growth oracle {oracle:?}, expected {want:?}"));
    }
    Ok(format!("{} morphisms, Λ \\ FA = {{v, lambda, mu}}", ms.len()))
}

fn c2() -> Result<String, String> {
    let e = catalog::lambda_tg_infinity(TGI_BLOCKS, TG_CUTOFF).unwrap();
    let g = &e.graph;
    let b = d(&TG_BOUND);
    let o = FaOracle::new(&e, &b);
    let (ms, _) = e.morphisms(&b);
    for x in &ms {
        let v = o.fa_at(x);
        if v.value != Verdict::False || !v.reverify(g, x) {
            return Err(format!("{}: {:?}", g.name(x), v));
        }
    }
    Ok(format!("{} morphisms, all False with re-verified witnesses", ms.len()))
}

fn c3() -> Result<String, String> {
    for n in TG_BRUTE_CUTOFFS {
        let e = tg(n);
        let (all, _) = e.graph.enumerate_morphisms(&d(&TG_BOUND));
        let brute = brute_filters(&e.graph, &all);
        let (fs, _) = enumerate_filters(&e, &d(&TG_BOUND));
        let ours: BTreeSet<&BTreeSet<Morphism>> = fs.iter().map(|f| f.set()).collect();
        if ours != brute.iter().collect() {
            return Err(format!("cutoff {n}: enumeration differs from the subset scan"));
        }
    }
    for n in TG_FILTER_CUTOFFS {
        let e = tg(n);
        let g = &e.graph;
        let b = d(&TG_BOUND);
        let o = FaOracle::new(&e, &b);
        let (fs, _) = enumerate_filters(&e, &b);
        if fs.len() != 6 + 3 * n as usize {
            return Err(format!("cutoff {n}: {} filters", fs.len()));
        }
        let ps = path_space(&o, &fs);
        let out: BTreeSet<String> = fs.iter().filter(|f| !ps.contains(f)).map(|f| f.describe(g)).collect();
        let want: BTreeSet<String> = ["{v}", "down(lambda)", "down(mu)"].map(String::from).into();
        if out != want {
            return Err(format!("cutoff {n}: PS excludes {out:?}"));
        }
    }
    Ok("6 + 3N filters for N = 2, 5, 10; PS excludes {v}, down(lambda), down(mu)".into())
}

fn c4() -> Result<String, String> {
    let e = tg(TG_CUTOFF);
    let g = &e.graph;
    let o = FaOracle::new(&e, &d(&TG_BOUND));
    let lam = m(g, "lambda");
    match compactness_probe(&o, &lam, &families_through(&e, &lam)).map_err(|e| e.to_string())? {
        CompactEvidence::NonCompact { limit, violation: Violation::NotDirected(_, _), .. }
            if render_set(g, &limit) == "{lambda, mu, v}" => {}
        other => return Err(format!("probe(lambda) = {other:?}")),
    }
    let w = m(g, "w");
    match compactness_probe(&o, &w, &families_through(&e, &w)).map_err(|e| e.to_string())? {
        CompactEvidence::ConsistentWithCompact { limits } if limits.len() == 1 && limits[0].1.describe(g) == "{w}" => {}
        other => return Err(format!("probe(w) = {other:?}")),
    }
    for f in catalog::finite_examples() {
        let b = finite_bound(&f);
        let o = FaOracle::new(&f, &b);
        let (ms, _) = f.morphisms(&b);
        for x in &ms {
            if o.is_fa(x) != Some(true) {
                return Err(format!("{}: {} not FA", f.name, f.graph.name(x)));
            }
            let ev = compactness_probe(&o, x, &families_through(&f, x)).map_err(|e| e.to_string())?;
            if ev != CompactEvidence::Compact {
                return Err(format!("{}: probe({}) = {}", f.name, f.graph.name(x), ev.kind()));
            }
        }
    }
    Ok("lambda non-compact via {lambda, mu, v}; w consistent with {w}; finite examples compact".into())
}

fn c5() -> Result<String, String> {
    const PROPS: [&str; 5] = ["right_ideal", "final_segments", "source_closed", "source_paths_in_fa", "mce_inside_fa"];
    let mut entries = vec![(tg(TG_CUTOFF), d(&TG_BOUND)), (catalog::lambda_yee(TG_CUTOFF).unwrap(), d(&YEE_BOUND))];
    entries.extend(catalog::finite_examples().into_iter().map(|f| {
        let b = finite_bound(&f);
        (f, b)
    }));
    let mut total = 0;
    for (e, b) in &entries {
        let o = FaOracle::new(e, b);
        let r = check_fa_structure(&o);
        for p in PROPS {
            let c = r.check(p).ok_or(format!("{}: no check {p}", e.name))?;
            if !c.pass || c.skipped > 0 {
                return Err(format!("{}: {p} {:?}", e.name, c));
            }
            total += c.checked;
        }
        if !validate_constellation(&o).all_pass() {
            return Err(format!("{}: constellation", e.name));
        }
        if e.name == "tg" && !r.range_not_closed.contains(&"lambda.alpha[1] -> v".to_string()) {
            return Err(format!("range counterexample missing: {:?}", r.range_not_closed));
        }
    }
    Ok(format!("{total} instances over {} graphs; r(lambda.alpha[1]) = v not in FA", entries.len()))
}

fn c6() -> Result<String, String> {
    let e = tg(TG_CUTOFF);
    let g = &e.graph;
    let b = d(&TG_BOUND);
    for f in [tg(TG_CUTOFF), catalog::grid(2).unwrap()] {
        let b = if f.name == "grid" { finite_bound(&f) } else { d(&TG_BOUND) };
        let o = FaOracle::new(&f, &b);
        let (fs, _) = enumerate_filters(&f, &b);
        for c in check_shifts(&o, &fs) {
            if !c.pass || c.checked == 0 {
                return Err(format!("{}: {:?}", f.name, c));
            }
        }
    }
    let o = FaOracle::new(&e, &b);
    let lam = m(g, "lambda");
    let up = shift_on(g, &lam, &principal(g, &m(g, "w"))).map_err(|e| e.to_string())?;
    let ps = kpath::pspace::ps_membership(&o, &up).value;
    if up.describe(g) != "down(lambda)" || ps != Verdict::False {
        return Err(format!("σ^λ{{w}} = {} with PS {:?}", up.describe(g), ps));
    }
    let r = right_shift_along(&e, &b, &lam, "alpha[n]").map_err(|e| e.to_string())?;
    let (a, c) = (render_set(g, &r.image_limit), render_set(g, &r.image_of_limit));
    if r.continuous() || a != "{lambda, mu, v}" || c != "{lambda, v}" {
        return Err(format!("limit {a} vs image {c}"));
    }
    Ok("invariants pass on tg and grid; σ^λ{w} = down(lambda) ∉ PS; {lambda, mu, v} ≠ {lambda, v}".into())
}

fn c7() -> Result<String, String> {
    let mut n = 0;
    for f in [tg(TG_CUTOFF), catalog::grid(2).unwrap()] {
        let b = if f.name == "grid" { finite_bound(&f) } else { d(&TG_BOUND) };
        let o = FaOracle::new(&f, &b);
        let (fs, _) = enumerate_filters(&f, &b);
        for c in check_action(&o, &fs) {
            if !c.pass || c.checked == 0 {
                return Err(format!("{}: {:?}", f.name, c));
            }
            n += c.checked;
        }
    }
    Ok(format!("{n} instances of identity, cocycle and directedness"))
}

/// `Σ_v |ΛV|²`: on a graph whose filters are all principal, each element
/// is `(↓λ, d(λ) − d(ν), ↓ν)` for one pair with `s(λ) = s(ν)`.
fn pair_count(e: &CatalogEntry, b: &Degree) -> usize {
    let (ms, _) = e.graph.enumerate_morphisms(b);
    let mut by_source: BTreeMap<u32, usize> = BTreeMap::new();
    for x in &ms {
        *by_source.entry(x.source()).or_default() += 1;
    }
    by_source.values().map(|n| n * n).sum()
}

fn c8() -> Result<String, String> {
    let mut sizes = Vec::new();
    for f in [tg(TG_CUTOFF), catalog::grid(2).unwrap()] {
        let b = if f.name == "grid" { finite_bound(&f) } else { d(&TG_BOUND) };
        let o = FaOracle::new(&f, &b);
        let (fs, _) = enumerate_filters(&f, &b);
        let es = enumerate_elements(&o, &fs);
        if f.name == "grid" && es.len() != pair_count(&f, &b) {
            return Err(format!("grid: {} elements, pair oracle {}", es.len(), pair_count(&f, &b)));
        }
        let mut cs = axiom_suite(&o, &es, None);
        cs.push(check_spans(&o, &es));
        for c in cs {
            if !c.pass || c.checked == 0 {
                return Err(format!("{}: {:?}", f.name, c));
            }
        }
        sizes.push(format!("{} {}", f.name, es.len()));
    }
    Ok(format!("axioms, spans and certificates on {}", sizes.join(", ")))
}

fn c9() -> Result<String, String> {
    let e = tg(TG_CUTOFF);
    let g = &e.graph;
    let b = d(&TG_BOUND);
    let o = FaOracle::new(&e, &b);
    let (fs, flag) = enumerate_filters(&e, &b);
    let bps = bps_enumerate(&o, &fs, flag).map_err(|e| e.to_string())?;
    let es = enumerate_elements(&o, &fs);
    for c in invariance_check(&o, &es, &bps) {
        if !c.pass {
            return Err(format!("invariance: {c:?}"));
        }
    }
    // Oracle: maximal filters by inclusion, then limits of the declared
    // families that are filters in PS.
    let ps = path_space(&o, &fs);
    let mut oracle: BTreeSet<String> = fs
        .iter()
        .filter(|x| !fs.iter().any(|y| y != *x && x.set().is_subset(y.set())))
        .map(|x| x.describe(g))
        .collect();
    for (_, lim) in &bps.limits {
        if ps.contains(lim) {
            oracle.insert(lim.describe(g));
        }
    }
    let got = describe_all(g, &bps.points);
    if got != oracle {
        return Err(format!("enumeration {got:?} vs oracle {oracle:?}"));
    }
    let mut want: BTreeSet<String> =
        (1..=TG_CUTOFF).map(|n| principal(g, &m(g, &format!("mu.beta[{n}]"))).describe(g)).collect();
    want.insert("{u}".into());
    if got != want {
        let extra: Vec<&String> = got.difference(&want).collect();
        return Err(format!("expected {{u}} ∪ down(mu.beta[n]) ({} points); computed {} points, extra {extra:?}", want.len(), got.len()));
    }
    Ok(format!("{} points, invariance holds", got.len()))
}

fn c10() -> Result<String, String> {
    let mut out = Vec::new();
    for f in [catalog::grid(2).unwrap(), catalog::twisted().unwrap()] {
        let b = finite_bound(&f);
        let o = FaOracle::new(&f, &b);
        let r = iso_check(&o).map_err(|e| e.to_string())?;
        let oracle = pair_count(&f, &b);
        if !r.pass() || r.classes != oracle {
            return Err(format!("{}: classes {}, elements {}, oracle {oracle}, {:?}", f.name, r.classes, r.elements, r.checks));
        }
        out.push(format!("{} {} classes", f.name, r.classes));
    }
    Ok(out.join(", "))
}

fn c11() -> Result<String, String> {
    let mut n = 0;
    let mut entries: Vec<(CatalogEntry, Degree)> =
        catalog::finite_examples().into_iter().map(|f| {
            let b = finite_bound(&f);
            (f, b)
        }).collect();
    entries.push((tg(TG_EHAT_CUTOFF), d(&TG_BOUND)));
    for (e, b) in &entries {
        let (fs, _) = enumerate_filters(e, b);
        let c = check_ehat_agreement(e, b, &fs);
        if !c.pass || c.checked == 0 {
            return Err(format!("{}: {c:?}", e.name));
        }
        n += c.checked;
        if e.name != "tg" {
            let t = check_topologies_agree(e, b, &fs);
            if !t.pass {
                return Err(format!("{}: {t:?}", e.name));
            }
        }
    }
    Ok(format!("{n} (x, μ, K) instances"))
}

fn c12() -> Result<String, String> {
    let e = tg(TG_CUTOFF);
    let g = &e.graph;
    let o = FaOracle::new(&e, &d(&TG_BOUND));
    let r = relative_filter_space(&o).map_err(|e| e.to_string())?;
    if r.counts() != (3, 2) {
        return Err(format!("counts {:?}", r.counts()));
    }
    // Oracle: ↓(λα_n) in FAr keeps the prefixes a with a and the rest both
    // outside {λ, μ}; the limit keeps what every term shares.
    let out: BTreeSet<Morphism> = [m(g, "lambda"), m(g, "mu")].into();
    let mut common: Option<BTreeSet<Morphism>> = None;
    for n in 1..=TG_CUTOFF {
        let x = m(g, &format!("lambda.alpha[{n}]"));
        let term: BTreeSet<Morphism> = x
            .degree()
            .below()
            .into_iter()
            .map(|p| g.factorize(&x, &p).unwrap())
            .filter(|(a, c)| !out.contains(a) && !out.contains(c))
            .map(|(a, _)| a)
            .collect();
        common = Some(match common {
            None => term,
            Some(c) => c.intersection(&term).cloned().collect(),
        });
    }
    let oracle = render_set(g, &common.unwrap());
    let extra = r.extra_limits();
    if extra.len() != 1 || extra[0].1.describe(g) != "{v}" || oracle != "{v}" {
        return Err(format!("extra limits {extra:?}, oracle {oracle}"));
    }
    Ok(format!("3 vs 2; third limit {{v}} from {}", extra[0].0))
}

fn suites_json() -> String {
    let e = tg(TG_CUTOFF);
    let b = d(&TG_BOUND);
    let o = FaOracle::new(&e, &b);
    let (fs, flag) = enumerate_filters(&e, &b);
    let es = enumerate_elements(&o, &fs);
    let grid = catalog::grid(2).unwrap();
    let go = FaOracle::new(&grid, &finite_bound(&grid));
    let g = &e.graph;
    let v = serde_json::json!({
        "structure": check_fa_structure(&o),
        "shifts": check_shifts(&o, &fs),
        "action": check_action(&o, &fs),
        "axioms": axiom_suite(&o, &es, Some(kpath::groupoid::Sampling { seed: 5, triples: 100 })),
        "elements": es.iter().map(|x| x.to_json(g)).collect::<Vec<_>>(),
        "bps": bps_enumerate(&o, &fs, flag).unwrap().points.iter().map(|x| x.to_json(g)).collect::<Vec<_>>(),
        "iso": iso_check(&go).unwrap().to_json(),
        "relative": relative_filter_space(&o).unwrap().to_json(g),
    });
    serde_json::to_string(&v).unwrap()
}

fn c13() -> Result<String, String> {
    let (a, b) = (suites_json(), suites_json());
    if a != b {
        return Err("two runs differ".into());
    }
    Ok(format!("{} bytes identical across runs", a.len()))
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 13] = [
        ("FA(tg) = tg minus {v, lambda, mu}", c1),
        ("FA(tg-infinity) is empty", c2),
        ("filters and path space of tg", c3),
        ("compactness evidence", c4),
        ("structure of FA", c5),
        ("shift calculus", c6),
        ("action axioms", c7),
        ("groupoid axioms", c8),
        ("boundary path space of tg", c9),
        ("Spielberg isomorphism", c10),
        ("Z(mu minus K) equals E-hat", c11),
        ("FAr comparison", c12),
        ("determinism", c13),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match r {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
