use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Failure, Opts, Outcome, Usage, EXIT_NEGATIVE, EXIT_OK};
use crate::cert::{self, Certificate};
use crate::intersect::{
    counterexample_certificate, intersective_decide_1var, jointly_intersective_up_to, multidim_bounded_check,
    reduce_joint_to_gcd, solvable_mod, JointVerdict, Verdict, DEFAULT_BUDGET,
};
use crate::lattice::{coset_refine, divisibility_sublattice, AffineLattice};
use crate::numeric::{parse_rational, Irrational};
use crate::poly::{parse_poly, parse_poly_vector, IntPoly, RationalVectorPoly};
use crate::recurrence::{
    empty_triple_check, good_set_scan, partition_scan, uc_average_circle, IntervalUnion, WindowSet, WindowSpec,
};
use crate::torus::{closure_with_zero, normalize_form, sample_verify, LinearForm, SampleOptions};
use crate::Error;

type Res = Result<Outcome, Failure>;

const DEFAULT_JOINT_BOUND: u64 = 100;
const DEFAULT_PRIME_BOUND: u64 = 100;
const DEFAULT_EMAX: u32 = 12;
const DEFAULT_INDEX_BOUND: u64 = 6;

pub(super) fn dispatch(name: &str, o: &Opts) -> Res {
    match name {
        "check-mod" => check_mod(o),
        "joint" => joint(o),
        "prove" => prove(o),
        "verify-cert" => verify_cert(o),
        "lattice-refine" => lattice_refine(o),
        "torus-closure" => torus_closure(o),
        "scan" => scan(o),
        "toterg" => toterg(o),
        "empty-triple" => empty_triple(o),
        "multidim" => multidim(o),
        other => Err(usage(format!("unknown command '{other}'"))),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(Usage(vec![msg.into()]))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn vars(o: &Opts) -> Vec<String> {
    match &o.vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => vec!["n".to_string()],
    }
}

fn family(o: &Opts) -> Result<(Vec<IntPoly>, Vec<String>), Failure> {
    if o.poly.is_empty() {
        return Err(usage("at least one -p polynomial is required"));
    }
    let names = vars(o);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let fam = o
        .poly
        .iter()
        .map(|s| parse_poly(s, &refs).map_err(Error::from))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((fam, names))
}

fn budget(o: &Opts) -> u64 {
    o.budget.unwrap_or(DEFAULT_BUDGET)
}

fn verdict_name(v: &Verdict) -> Value {
    match v {
        Verdict::Intersective => json!({ "verdict": "intersective" }),
        Verdict::NotIntersective(k) => json!({ "verdict": "not_intersective", "modulus": k }),
        Verdict::Unknown => json!({ "verdict": "unknown" }),
    }
}

fn render_all(ps: &[IntPoly], names: &[String]) -> Vec<String> {
    ps.iter().map(|p| p.render(names)).collect()
}

fn check_mod(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    let k = o.k.ok_or_else(|| usage("-k is required"))?;
    let s = solvable_mod(&fam, k, budget(o))?;
    let summary = json!({
        "family": render_all(&fam, &names),
        "modulus": k,
        "witness": s.witness.as_ref().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        "witness_modulus": s.witness_modulus,
        "exhaustive": s.exhaustive,
        "obstruction": s.obstruction,
    });
    let mut artifacts = vec![("report.json".to_string(), pretty(&summary))];
    let code = if s.witness.is_some() {
        EXIT_OK
    } else {
        if let Ok(c) = counterexample_certificate(&fam, k) {
            artifacts.push(("certificate.json".into(), c.to_json() + "\n"));
        }
        EXIT_NEGATIVE
    };
    Ok(Outcome { code, summary, artifacts })
}

fn joint(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    let bound = o.bound.unwrap_or(DEFAULT_JOINT_BOUND);
    let verdict = jointly_intersective_up_to(&fam, bound, budget(o))?;
    let mut summary = json!({ "family": render_all(&fam, &names), "bound": bound });
    let mut artifacts = Vec::new();
    let code = match &verdict {
        JointVerdict::SolvableAllModuli { bound } => {
            summary["scan"] = json!({ "solvable_up_to": bound });
            EXIT_OK
        }
        JointVerdict::Counterexample { modulus, certificate } => {
            summary["scan"] = json!({ "counterexample_modulus": modulus });
            if let Some(c) = certificate {
                artifacts.push(("counterexample.json".to_string(), c.to_json() + "\n"));
            }
            EXIT_NEGATIVE
        }
    };
    if fam.first().is_some_and(|p| p.nvars() == 1) {
        let q = o.prime_bound.unwrap_or(DEFAULT_PRIME_BOUND);
        let red = reduce_joint_to_gcd(&fam, q, o.emax.unwrap_or(DEFAULT_EMAX), budget(o))?;
        summary["gcd_reduction"] = json!({
            "gcd": red.bezout.gcd.render(&names),
            "cofactors": render_all(&red.bezout.cofactors, &names),
            "scale": red.bezout.scale.to_string(),
            "identity_verified": red.bezout.verify(&fam),
            "quotients": render_all(&red.quotients, &names),
            "gcd_verdict": verdict_name(&red.gcd_verdict),
            "family_verdict": verdict_name(&red.family_verdict),
        });
        artifacts.push(("certificate.json".to_string(), red.certificate.to_json() + "\n"));
    }
    artifacts.push(("report.json".to_string(), pretty(&summary)));
    Ok(Outcome { code, summary, artifacts })
}

fn prove(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    let [p] = fam.as_slice() else {
        return Err(usage("prove takes exactly one -p polynomial"));
    };
    let q = o.prime_bound.unwrap_or(DEFAULT_PRIME_BOUND);
    let (verdict, cert) = intersective_decide_1var(p, q, o.emax.unwrap_or(DEFAULT_EMAX), budget(o))?;
    let mut summary = verdict_name(&verdict);
    summary["polynomial"] = json!(p.render(&names));
    summary["evidence"] = json!(cert.evidence.kind());
    let code = match verdict {
        Verdict::NotIntersective(_) => EXIT_NEGATIVE,
        // an inconclusive decision still yields a valid bounded certificate
        Verdict::Intersective | Verdict::Unknown => EXIT_OK,
    };
    Ok(Outcome {
        code,
        summary,
        artifacts: vec![("certificate.json".into(), cert.to_json() + "\n")],
    })
}

fn verify_cert(o: &Opts) -> Res {
    let path = o.cert.as_ref().ok_or_else(|| usage("--cert <file> is required"))?;
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    let outcome = Certificate::from_json(&text).map_err(|e| e.to_string()).and_then(|c| {
        cert::verify(&c).map(|_| c).map_err(|e| e.to_string())
    });
    let (code, summary) = match outcome {
        Ok(c) => (EXIT_OK, json!({ "accepted": true, "evidence": c.evidence.kind() })),
        Err(reason) => (EXIT_NEGATIVE, json!({ "accepted": false, "reason": reason })),
    };
    Ok(Outcome {
        code,
        artifacts: vec![("report.json".into(), pretty(&summary))],
        summary,
    })
}

fn lattice_refine(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    let m = names.len();
    let domain = AffineLattice::full(m);
    let bound = o.bound.unwrap_or(DEFAULT_JOINT_BOUND);
    let summary = match (o.k, &o.sub) {
        (Some(k), None) => {
            let (lattice, proof) = divisibility_sublattice(&fam, &domain, k, bound)?;
            json!({ "mode": "divisibility", "lattice": lattice, "proof": proof })
        }
        (None, Some(sub)) => {
            let diag: Vec<i64> = sub
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| usage(format!("bad --sub entry '{s}'"))))
                .collect::<Result<_, _>>()?;
            if diag.len() != m || diag.iter().any(|&d| d <= 0) {
                return Err(usage(format!("--sub needs {m} positive entries")));
            }
            let cols: Vec<Vec<BigInt>> = (0..m)
                .map(|j| (0..m).map(|i| BigInt::from(if i == j { diag[j] } else { 0 })).collect())
                .collect();
            let sub = AffineLattice::new(m, &cols, &vec![BigInt::from(0); m])?;
            let c = coset_refine(&fam, &domain, &sub, bound)?;
            json!({
                "mode": "coset",
                "offset": c.offset.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "lattice": c.lattice,
                "restricted": render_all(&c.restricted, &names),
                "verified_bound": c.verified_bound,
            })
        }
        _ => return Err(usage("lattice-refine takes exactly one of -k or --sub")),
    };
    Ok(Outcome {
        code: EXIT_OK,
        artifacts: vec![("report.json".into(), pretty(&summary))],
        summary,
    })
}

/// Splits `(a, b, c)` at top-level commas.
fn split_tuple(text: &str) -> Result<Vec<String>, Failure> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| usage(format!("'{text}' is not a parenthesized tuple")))?;
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    Ok(out.into_iter().map(|s| s.trim().to_string()).collect())
}

fn torus_closure(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    if o.vectors.len() != fam.len() {
        return Err(usage("give one --vec per -p"));
    }
    let mut labels: Vec<(String, Option<String>)> = o
        .label
        .iter()
        .map(|l| match l.split_once('=') {
            Some((name, value)) => (name.trim().to_string(), Some(value.trim().to_string())),
            None => (l.trim().to_string(), None),
        })
        .collect();
    if labels.is_empty() {
        labels.push(("alpha".into(), o.alpha.clone()));
    }
    let label_names: Vec<&str> = labels.iter().map(|l| l.0.as_str()).collect();
    let vectors = o
        .vectors
        .iter()
        .map(|v| {
            split_tuple(v)?
                .iter()
                .map(|c| LinearForm::parse(c, &label_names).map_err(Failure::from))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let domain = AffineLattice::full(names.len());
    let t = normalize_form(&fam, &vectors, &labels, &domain)?;
    let bound = o.bound.unwrap_or(DEFAULT_JOINT_BOUND);
    let res = closure_with_zero(&t, bound)?;
    let mut summary = json!({
        "family": render_all(&fam, &names),
        "sequence": t,
        "lattice": res.lattice,
        "closure": res.closure,
        "certificate": res.certificate,
    });
    if t.parts().iter().all(|p| p.value.is_some()) {
        let opts = SampleOptions {
            box_radius: o.box_radius.unwrap_or(if names.len() == 1 { 10_000 } else { 100 }),
            seed: o.seed.unwrap_or(0),
            ..SampleOptions::default()
        };
        let report = sample_verify(&t.with_domain(res.lattice.clone())?, &res.closure, &opts)?;
        summary["sampling"] = json!(report);
    }
    Ok(Outcome {
        code: EXIT_OK,
        artifacts: vec![
            ("closure.json".into(), pretty(&res.closure)),
            ("report.json".into(), pretty(&summary)),
        ],
        summary,
    })
}

fn window_spec(o: &Opts) -> Result<WindowSpec, Failure> {
    let raw = o.set.as_ref().ok_or_else(|| usage("--set <json|@file> is required"))?;
    let text = match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(Error::Io)?,
        None => raw.clone(),
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("--set: {e}")))
}

fn scan(o: &Opts) -> Res {
    let (fam, _) = family(o)?;
    let spec = window_spec(o)?;
    let set = spec.build()?;
    let eps = o.eps.as_deref().map(parse_rational).transpose()?;
    let radius = o.box_radius.unwrap_or(50);
    match o.partition {
        None => {
            let report = good_set_scan(&set, &fam, radius, eps)?;
            let summary = json!({
                "set": spec,
                "average": report.average,
                "epsilon": report.epsilon,
                "good_count": report.good.len(),
                "max_gap": report.max_gap,
                "median_gap": report.median_gap,
                "covering_radius": report.covering_radius,
            });
            Ok(Outcome {
                code: EXIT_OK,
                summary,
                artifacts: vec![("report.json".into(), pretty(&report)), ("report.csv".into(), report.to_csv())],
            })
        }
        Some(k) => {
            let (lo, hi) = set.window();
            let cells = (0..k)
                .map(|r| WindowSet::residues(lo, hi, k, &[r]))
                .collect::<Result<Vec<_>, _>>()?;
            let report = partition_scan(&cells, &fam, radius, eps, None)?;
            let summary = json!({
                "window": [lo, hi],
                "cells": report.cells.iter().map(|c| json!({
                    "residue": c.index,
                    "good_count": c.good.len(),
                    "longest_run": c.longest_run,
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome {
                code: EXIT_OK,
                summary,
                artifacts: vec![("report.json".into(), pretty(&report))],
            })
        }
    }
}

fn arc(o: &Opts, default: (f64, f64)) -> Result<IntervalUnion, Failure> {
    let (lo, hi) = match &o.interval {
        Some(s) => {
            let (a, b) = s.split_once(',').ok_or_else(|| usage("--interval takes lo,hi"))?;
            let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{x}'")));
            (parse(a)?, parse(b)?)
        }
        None => default,
    };
    Ok(IntervalUnion::interval(lo, hi)?)
}

fn alpha(o: &Opts, default: &str) -> Result<Irrational, Failure> {
    Ok(Irrational::parse(o.alpha.as_deref().unwrap_or(default))?)
}

fn toterg(o: &Opts) -> Res {
    let (fam, names) = family(o)?;
    let a = arc(o, (0.0, 0.3))?;
    let n = o.box_radius.unwrap_or(100_000) as i64;
    let ranges = vec![(0, n); names.len()];
    let r = uc_average_circle(&a, &alpha(o, "sqrt(2)-1")?, &fam, &ranges)?;
    let summary = json!({ "family": render_all(&fam, &names), "box": [0, n], "result": r });
    Ok(Outcome {
        code: EXIT_OK,
        artifacts: vec![("report.json".into(), pretty(&summary))],
        summary,
    })
}

fn empty_triple(o: &Opts) -> Res {
    let h = match arc(o, (0.0, 0.01))?.parts() {
        [(lo, hi)] if *lo == 0.0 => *hi,
        _ => return Err(usage("empty-triple takes an arc of the form 0,h")),
    };
    let n = o.box_radius.unwrap_or(10_000) as i64;
    let r = empty_triple_check(&alpha(o, "golden")?, h, 1, n)?;
    let summary = json!(r);
    Ok(Outcome {
        code: if r.all_empty { EXIT_OK } else { EXIT_NEGATIVE },
        artifacts: vec![("report.json".into(), pretty(&summary))],
        summary,
    })
}

fn multidim(o: &Opts) -> Res {
    if o.poly.is_empty() {
        return Err(usage("at least one -p vector map is required"));
    }
    let names = vars(o);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let maps = o
        .poly
        .iter()
        .map(|s| {
            let comps = parse_poly_vector(s, &refs).map_err(Error::from)?;
            RationalVectorPoly::new(comps)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = multidim_bounded_check(&maps, o.bound.unwrap_or(DEFAULT_INDEX_BOUND), budget(o))?;
    let summary = json!({
        "index_bound": report.index_bound,
        "subgroups": report.verdicts.len(),
        "passed": report.passed(),
        "first_failure": report.first_failure.map(|i| &report.verdicts[i]),
    });
    Ok(Outcome {
        code: if report.passed() { EXIT_OK } else { EXIT_NEGATIVE },
        artifacts: vec![("report.json".into(), pretty(&report))],
        summary,
    })
}
