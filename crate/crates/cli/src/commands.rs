use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gbn_core::chain::{is_smooth, Cardinality};
use gbn_core::constraints::{cpt_i_via_cutsets, solve_family};
use gbn_core::graph::{d_separated, enumerate_cutsets};
use gbn_core::model::assignment_labels;
use gbn_core::oracle::iterate_next;
use gbn_core::{
    format_rational, Assignment, CutsetSemantics, FamilyShape, Gbn, IndependenceTriple,
    JointDistribution, LimStatus, Rational, SemanticsFamily, SemanticsKind, VariableSet,
};
use serde_json::{json, Map, Value};

use crate::document::{load_document, load_gbn, parse_distribution};
use crate::Kind;

pub const ASSIGNMENT_ORDER: &str =
    "variables sorted by name; the first is the most significant bit; F=0, T=1 (FF, FT, TF, TT for two variables)";

/// A command's structured result and the exit status it implies.
pub struct Outcome {
    pub value: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, code: 0 }
    }
}

fn with_header(body: Value) -> Value {
    let mut map = Map::new();
    map.insert("assignment_order".into(), json!(ASSIGNMENT_ORDER));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

fn names(set: &VariableSet) -> Value {
    json!(set.names())
}

fn rationals(values: &[Rational]) -> Value {
    json!(values.iter().map(format_rational).collect::<Vec<_>>())
}

pub fn dist_json(mu: &JointDistribution) -> Value {
    json!({
        "variables": names(mu.vars()),
        "order": assignment_labels(mu.vars()),
        "probabilities": mu.to_strings(),
    })
}

fn family_json(family: &SemanticsFamily) -> (Value, i32) {
    let mut map = Map::new();
    map.insert("kind".into(), json!(family.kind.name()));
    let mut code = 0;
    match &family.shape {
        FamilyShape::Empty => {
            map.insert("shape".into(), json!("empty"));
        }
        FamilyShape::Unique(mu) => {
            map.insert("shape".into(), json!("unique"));
            map.insert("distribution".into(), dist_json(mu));
        }
        FamilyShape::Polytope { space, witness } => {
            map.insert("shape".into(), json!("infinite"));
            map.insert("dimension".into(), json!(space.basis.len()));
            map.insert("witness".into(), dist_json(witness));
        }
        FamilyShape::Hull(points) => {
            map.insert("shape".into(), json!("infinite"));
            map.insert(
                "extreme_points".into(),
                json!(points.iter().map(dist_json).collect::<Vec<_>>()),
            );
        }
        FamilyShape::Unsupported(reason) => {
            map.insert("shape".into(), json!("unsupported"));
            map.insert("reason".into(), json!(reason));
            code = 3;
        }
    }
    if !family.notes.is_empty() {
        map.insert("notes".into(), json!(family.notes));
    }
    (Value::Object(map), code)
}

fn parse_set(list: &str) -> Result<VariableSet> {
    VariableSet::parse_list(list).with_context(|| format!("invalid variable list `{list}`"))
}

fn require_cutset(g: &Gbn, list: Option<&str>) -> Result<VariableSet> {
    let list = list.ok_or_else(|| anyhow!("--cutset is required for this command"))?;
    let set = parse_set(list)?;
    if !set.is_subset(g.variables()) {
        bail!("cutset {set} mentions variables outside the network");
    }
    Ok(set)
}

/// `uniform`, `dirac:BITS` (bits over the sorted cutset names) or a TOML file.
pub fn parse_gamma0(spec: Option<&str>, cutset: &VariableSet) -> Result<JointDistribution> {
    match spec.unwrap_or("uniform") {
        "uniform" => Ok(JointDistribution::uniform(cutset.clone())?),
        s if s.starts_with("dirac:") => {
            let bits = &s["dirac:".len()..];
            let b = Assignment::from_bitstring(cutset.clone(), bits)
                .with_context(|| format!("`{bits}` is not an assignment of {cutset}"))?;
            Ok(JointDistribution::dirac(&b)?)
        }
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading initial distribution {path}"))?;
            parse_distribution(&text, cutset).with_context(|| format!("in {path}"))
        }
    }
}

pub fn validate(file: &Path) -> Result<Outcome> {
    let draft = load_document(file)?.to_draft()?;
    let report = draft.validate();
    if report.is_ok() {
        let g = draft.build()?;
        return Ok(Outcome::ok(json!({
            "status": "ok",
            "variables": names(g.variables()),
            "initial": names(&g.initial()),
            "acyclic": g.is_acyclic(),
            "smooth": is_smooth(&g),
        })));
    }
    let capacity = report.has(gbn_core::model::IssueKind::Capacity);
    let issues: Vec<Value> = report
        .issues
        .iter()
        .map(|i| json!({"node": i.node, "kind": format!("{:?}", i.kind), "detail": i.detail}))
        .collect();
    Ok(Outcome {
        value: json!({"status": "invalid", "issues": issues}),
        code: if capacity { 2 } else { 1 },
    })
}

pub fn dsep(file: &Path, x: &str, y: &str, given: &str) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let triple = IndependenceTriple::new(parse_set(x)?, parse_set(y)?, parse_set(given)?)?;
    let separated = d_separated(g.graph(), triple.x(), triple.y(), triple.z())?;
    Ok(Outcome::ok(json!({
        "x": names(triple.x()),
        "y": names(triple.y()),
        "given": names(triple.z()),
        "statement": triple.to_string(),
        "d_separated": separated,
    })))
}

pub fn cutsets(file: &Path, minimal: bool) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let init = g.initial();
    let list: Vec<Value> = enumerate_cutsets(g.graph(), minimal)?
        .iter()
        .map(|c| json!({"nodes": names(c), "admissible": c.is_disjoint(&init)}))
        .collect();
    Ok(Outcome::ok(json!({
        "minimal_only": minimal,
        "count": list.len(),
        "note": "admissible cutsets avoid initial nodes and can be used for the cutset chain",
        "cutsets": list,
    })))
}

pub fn chain(file: &Path, cutset: Option<&str>) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let c = require_cutset(&g, cutset)?;
    let semantics = CutsetSemantics::new(&g, &c)?;
    let chain = semantics.chain()?;
    let labels = assignment_labels(&c);
    let bsccs: Vec<Value> = chain
        .bsccs()
        .iter()
        .map(|b| {
            json!({
                "states": b.states.iter().map(|&s| labels[s].clone()).collect::<Vec<_>>(),
                "period": b.period,
                "lrf": rationals(&b.lrf),
            })
        })
        .collect();
    let transient: Vec<&String> = chain
        .analysis()
        .transient_states()
        .iter()
        .map(|&s| &labels[s])
        .collect();
    Ok(Outcome::ok(with_header(json!({
        "cutset": names(&c),
        "order": labels,
        "matrix": chain.matrix().iter().map(|row| rationals(row)).collect::<Vec<_>>(),
        "bsccs": bsccs,
        "transient": transient,
    }))))
}

pub fn semantics(
    file: &Path,
    kind: Kind,
    cutsets: &[String],
    gamma0: Option<&str>,
) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let single_cutset = || -> Result<VariableSet> {
        match cutsets {
            [one] => require_cutset(&g, Some(one)),
            [] => require_cutset(&g, None),
            _ => bail!("this kind takes exactly one --cutset"),
        }
    };
    let (body, code) = match kind {
        Kind::Bn => {
            let mu = gbn_core::inference::chain_rule_dist(&g)?;
            (
                json!({"kind": "bn", "shape": "unique", "distribution": dist_json(&mu)}),
                0,
            )
        }
        Kind::Cpt => family_json(&solve_family(&g, SemanticsKind::Cpt)?),
        Kind::Wcpt => family_json(&solve_family(&g, SemanticsKind::WCpt)?),
        Kind::Cpti => {
            let family_cutsets: Vec<VariableSet> = if cutsets.is_empty() {
                enumerate_cutsets(g.graph(), true)?
            } else {
                cutsets
                    .iter()
                    .map(|c| require_cutset(&g, Some(c)))
                    .collect::<Result<_>>()?
            };
            let (mut value, code) = family_json(&cpt_i_via_cutsets(&g, &family_cutsets)?);
            value["cutsets"] = json!(family_cutsets.iter().map(names).collect::<Vec<_>>());
            (value, code)
        }
        Kind::Mc => {
            let c = single_cutset()?;
            let semantics = CutsetSemantics::new(&g, &c)?;
            match gamma0 {
                Some(_) => {
                    let start = parse_gamma0(gamma0, &c)?;
                    let mu = semantics.mcs(&start)?;
                    (
                        json!({"kind": "mc", "cutset": names(&c), "gamma0": dist_json(&start), "shape": "unique", "distribution": dist_json(&mu)}),
                        0,
                    )
                }
                None => {
                    let (mut value, code) = family_json(&semantics.family()?);
                    value["cutset"] = names(&c);
                    (value, code)
                }
            }
        }
        Kind::Limavg => {
            let c = single_cutset()?;
            let start = parse_gamma0(gamma0, &c)?;
            let mu = CutsetSemantics::new(&g, &c)?.lim_avg(&start)?;
            (
                json!({"kind": "limavg", "cutset": names(&c), "gamma0": dist_json(&start), "shape": "unique", "distribution": dist_json(&mu)}),
                0,
            )
        }
        Kind::Lim => {
            let c = single_cutset()?;
            let start = parse_gamma0(gamma0, &c)?;
            let status = CutsetSemantics::new(&g, &c)?.lim(&start)?;
            let mut value =
                json!({"kind": "lim", "cutset": names(&c), "gamma0": dist_json(&start)});
            match status {
                LimStatus::Defined(mu) => {
                    value["status"] = json!("defined");
                    value["distribution"] = dist_json(&mu);
                }
                LimStatus::UndefinedPeriodic(periods) => {
                    value["status"] = json!("undefined");
                    value["periods"] = json!(periods);
                }
            }
            (value, 0)
        }
    };
    Ok(Outcome {
        value: with_header(body),
        code,
    })
}

pub fn classify(file: &Path, cutset: Option<&str>, gamma0: Option<&str>) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let c = require_cutset(&g, cutset)?;
    let semantics = CutsetSemantics::new(&g, &c)?;
    let chain = semantics.chain()?;
    let labels = assignment_labels(&c);
    let periods: Vec<usize> = chain.bsccs().iter().map(|b| b.period).collect();
    let mut value = json!({
        "cutset": names(&c),
        "smooth": is_smooth(&g),
        "cardinality": match chain.cardinality() {
            Cardinality::One => "one",
            Cardinality::Infinite => "infinite",
        },
        "bsccs": chain.bsccs().iter().map(|b| json!({
            "states": b.states.iter().map(|&s| labels[s].clone()).collect::<Vec<_>>(),
            "period": b.period,
        })).collect::<Vec<_>>(),
        "lim_defined_for_every_gamma0": periods.iter().all(|&p| p == 1),
    });
    if let Some(spec) = gamma0 {
        let start = parse_gamma0(Some(spec), &c)?;
        value["lim_for_gamma0"] = match semantics.lim(&start)? {
            LimStatus::Defined(_) => json!("defined"),
            LimStatus::UndefinedPeriodic(p) => json!(format!("undefined (periods {p:?})")),
        };
    }
    Ok(Outcome::ok(value))
}

pub fn oracle_iterate(
    file: &Path,
    cutset: Option<&str>,
    steps: usize,
    gamma0: Option<&str>,
) -> Result<Outcome> {
    let g = load_gbn(file)?;
    let c = require_cutset(&g, cutset)?;
    let start = parse_gamma0(gamma0, &c)?;
    let trace = iterate_next(&g, &c, &start, steps)?;
    let rows: Vec<Value> = trace
        .gammas
        .iter()
        .zip(&trace.averages)
        .enumerate()
        .map(|(i, (gamma, avg))| json!({"step": i, "gamma": gamma.to_strings(), "average": avg.to_strings()}))
        .collect();
    Ok(Outcome::ok(with_header(json!({
        "cutset": names(&c),
        "order": assignment_labels(&c),
        "steps": steps,
        "trace": rows,
    }))))
}
