use std::path::Path;

use serde_json::{json, Value};

use kpath::action::{check_action, check_local_homeomorphism, check_shifts};
use kpath::alignment::{check_fa_structure, cross_validate_mce, validate_constellation, validate_relative_cop, Check, FaOracle};
use kpath::catalog::{self, CatalogEntry};
use kpath::groupoid::{
    axiom_suite, check_compact_units, check_hausdorff, check_spans, check_unit_space, enumerate_elements,
    invariance_check, Sampling,
};
use kpath::pspace::{
    bps_enumerate, check_basis, check_ps_characterizations, check_ps_open, compactness_probe, enumerate_filters,
    families_through, family_limits, path_space, ps_membership, render_set, ultrafilters, CompactEvidence, Limit,
};
use kpath::spielberg::{iso_check, relative_filter_space};
use kpath::{Degree, Error, KGraph, Morphism};

use crate::Common;

pub struct Report {
    pub json: Value,
    pub ok: bool,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Factorisation { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: String) -> Failure {
    Failure { code: 2, message }
}

fn load(c: &Common) -> Result<CatalogEntry, Failure> {
    if catalog::NAMES.contains(&c.graph.as_str()) {
        return Ok(catalog::by_name(&c.graph, c.cutoff, c.blocks, c.size)?);
    }
    let path = Path::new(&c.graph);
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", c.graph)))?;
    let graph = KGraph::load(&text, c.cutoff)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    Ok(CatalogEntry::plain(&name, graph, text))
}

fn bound(c: &Common, g: &KGraph) -> Result<Degree, Failure> {
    let b = match &c.bound {
        Some(s) => Degree::parse(s)?,
        None => Degree::new(vec![2; g.rank()]),
    };
    if b.rank() != g.rank() {
        return Err(input(format!("bound {b} has rank {}, the graph has rank {}", b.rank(), g.rank())));
    }
    Ok(b)
}

fn header(command: &str, e: &CatalogEntry, b: &Degree) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("graph".into(), json!(e.name));
    m.insert("bound".into(), json!(b));
    m.insert("cutoff".into(), json!(e.graph.cutoff()));
    m
}

fn morphism(g: &KGraph, name: &str) -> Result<Morphism, Failure> {
    g.parse_morphism(name).map_err(|e| input(format!("{name}: {e}")))
}

fn checks_json(cs: &[Check]) -> Value {
    json!(cs)
}

pub fn validate(c: &Common) -> Result<Report, Failure> {
    let e = match load(c) {
        Ok(e) => e,
        Err(f) if f.code == 1 => {
            return Ok(Report {
                json: json!({ "command": "validate", "graph": c.graph, "valid": false, "diagnostic": f.message }),
                ok: false,
            })
        }
        Err(f) => return Err(f),
    };
    let g = &e.graph;
    Ok(Report {
        json: json!({
            "command": "validate",
            "graph": e.name,
            "valid": true,
            "rank": g.rank(),
            "cutoff": g.cutoff(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "squares": g.square_count(),
            "indexed": g.is_indexed(),
        }),
        ok: true,
    })
}

pub fn align(c: &Common, element: Option<&str>, all: bool, structure: bool) -> Result<Report, Failure> {
    let e = load(c)?;
    let g = &e.graph;
    let b = bound(c, g)?;
    let o = FaOracle::new(&e, &b);
    let mut out = header("align", &e, &b);
    let (targets, flag) = match element {
        Some(name) if !all => (vec![morphism(g, name)?], None),
        _ => {
            let (ms, flag) = e.morphisms(&b);
            (ms, Some(flag))
        }
    };
    let mut ok = true;
    let mut rows = Vec::new();
    let (mut fa, mut not_fa, mut unknown) = (Vec::new(), Vec::new(), Vec::new());
    for m in &targets {
        let v = o.fa_at(m);
        ok &= !v.conflict && v.reverify(g, m);
        let mut row = v.to_json(g);
        row["morphism"] = json!(g.name(m));
        rows.push(row);
        match v.as_bool() {
            Some(true) => fa.push(g.name(m)),
            Some(false) => not_fa.push(g.name(m)),
            None => unknown.push(g.name(m)),
        }
    }
    out.insert("verdicts".into(), json!(rows));
    out.insert("fa".into(), json!(fa));
    out.insert("not_fa".into(), json!(not_fa));
    out.insert("unknown".into(), json!(unknown));
    if let Some(flag) = flag {
        out.insert("enumeration".into(), json!(flag));
    }
    if structure {
        let s = check_fa_structure(&o);
        let k = validate_constellation(&o);
        let r = validate_relative_cop(&o);
        let x = cross_validate_mce(&e);
        ok &= s.all_pass() && k.all_pass() && r.checks.iter().all(|c| c.pass) && x.iter().all(|c| c.pass);
        out.insert("structure".into(), json!(s));
        out.insert("constellation".into(), json!(k));
        out.insert("relative".into(), json!(r));
        out.insert("mce_cross_validation".into(), checks_json(&x));
    }
    Ok(Report { json: Value::Object(out), ok })
}

fn evidence_json(g: &KGraph, ev: &CompactEvidence) -> Value {
    let lims = |v: &[(String, kpath::pspace::Filter)]| -> Vec<Value> {
        v.iter().map(|(f, x)| json!({ "family": f, "limit": x.describe(g) })).collect()
    };
    match ev {
        CompactEvidence::Compact => json!({ "kind": ev.kind() }),
        CompactEvidence::NonCompact { family, limit, violation } => json!({
            "kind": ev.kind(), "family": family, "limit": render_set(g, limit), "violation": violation.render(g),
        }),
        CompactEvidence::ConsistentWithCompact { limits } => json!({ "kind": ev.kind(), "limits": lims(limits) }),
        CompactEvidence::Contradiction { family, limit } => {
            json!({ "kind": ev.kind(), "family": family, "limit": render_set(g, limit) })
        }
        CompactEvidence::Inconclusive(why) => json!({ "kind": ev.kind(), "note": why }),
    }
}

pub fn paths(c: &Common, probe: Option<&str>) -> Result<Report, Failure> {
    let e = load(c)?;
    let g = &e.graph;
    let b = bound(c, g)?;
    let o = FaOracle::new(&e, &b);
    let mut out = header("paths", &e, &b);
    let (filters, flag) = enumerate_filters(&e, &b);
    let ps = path_space(&o, &filters);
    let ultra = ultrafilters(&filters);
    let bps = bps_enumerate(&o, &filters, flag)?;
    let rows: Vec<Value> = filters
        .iter()
        .map(|x| {
            json!({
                "filter": x.describe(g),
                "set": x.to_json(g),
                "path_space": ps_membership(&o, x).value,
                "ultrafilter": ultra.contains(x),
                "boundary": bps.points.contains(x),
            })
        })
        .collect();
    out.insert("completeness".into(), json!(flag));
    out.insert("filters".into(), json!(rows));
    out.insert(
        "counts".into(),
        json!({ "filters": filters.len(), "path_space": ps.len(), "ultrafilters": ultra.len(), "boundary": bps.points.len() }),
    );
    let excluded: Vec<String> = filters.iter().filter(|x| !ps.contains(x)).map(|x| x.describe(g)).collect();
    out.insert("path_space_excludes".into(), json!(excluded));
    let limits: Vec<Value> = family_limits(&e, &b)?
        .iter()
        .map(|l| {
            let limit = match &l.limit {
                Limit::Converges(s) => json!(render_set(g, s)),
                Limit::Divergent(_) => json!("divergent"),
            };
            json!({ "family": l.family, "limit": limit, "violation": l.violation.as_ref().map(|v| v.render(g)) })
        })
        .collect();
    out.insert("family_limits".into(), json!(limits));
    let targets: Vec<Morphism> = match probe {
        Some(name) => vec![morphism(g, name)?],
        None => g.vertices(),
    };
    let mut probes = Vec::new();
    for m in &targets {
        let ev = compactness_probe(&o, m, &families_through(&e, m))?;
        let mut v = evidence_json(g, &ev);
        v["cylinder"] = json!(format!("Z({})", g.name(m)));
        probes.push(v);
    }
    out.insert("compactness".into(), json!(probes));
    let (ms, _) = e.morphisms(&b);
    let checks = vec![
        check_basis(g, &filters, &ms),
        check_ps_open(&o, &filters),
        check_ps_characterizations(&o, &filters),
    ];
    let ok = checks.iter().all(|c| c.pass);
    out.insert("checks".into(), checks_json(&checks));
    Ok(Report { json: Value::Object(out), ok })
}

pub fn groupoid(c: &Common, spielberg: bool, compare_relative: bool) -> Result<Report, Failure> {
    let e = load(c)?;
    let g = &e.graph;
    let b = bound(c, g)?;
    let o = FaOracle::new(&e, &b);
    let mut out = header("groupoid", &e, &b);
    if spielberg {
        let r = iso_check(&o)?;
        let ok = r.pass();
        out.insert("spielberg".into(), r.to_json());
        return Ok(Report { json: Value::Object(out), ok });
    }
    if compare_relative {
        let r = relative_filter_space(&o)?;
        out.insert("comparison".into(), r.to_json(g));
        return Ok(Report { json: Value::Object(out), ok: true });
    }
    let (filters, flag) = enumerate_filters(&e, &b);
    let es = enumerate_elements(&o, &filters);
    let ps = path_space(&o, &filters);
    let bps = bps_enumerate(&o, &filters, flag)?;
    let sampling = c.seed.map(|seed| Sampling { seed, triples: 200 });
    let mut checks = axiom_suite(&o, &es, sampling);
    checks.push(check_spans(&o, &es));
    checks.push(check_unit_space(&o, &ps, &es));
    checks.push(check_hausdorff(&o, &es));
    checks.push(check_compact_units(&o)?);
    checks.extend(check_shifts(&o, &filters));
    checks.extend(check_action(&o, &filters));
    checks.extend(check_local_homeomorphism(&o, &filters));
    checks.extend(invariance_check(&o, &es, &bps));
    let ok = checks.iter().all(|c| c.pass);
    let boundary = es.iter().filter(|x| bps.points.contains(&x.x) && bps.points.contains(&x.y)).count();
    out.insert("completeness".into(), json!(flag));
    out.insert("sampling".into(), json!(c.seed.map(|s| json!({ "seed": s, "pairs": 200 }))));
    out.insert("counts".into(), json!({ "elements": es.len(), "units": ps.len(), "boundary_elements": boundary }));
    out.insert("elements".into(), json!(es.iter().map(|x| x.to_json(g)).collect::<Vec<_>>()));
    out.insert("checks".into(), checks_json(&checks));
    Ok(Report { json: Value::Object(out), ok })
}
