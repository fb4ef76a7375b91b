use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::types::{QuasiInequality, QuasiSystem, RuleApplication, RunResult, RunStatus};
use crate::syntax::{print_formula, print_inequality, substitute, Formula, Inequality, Var};

fn var_text(v: &Var) -> String {
    print_formula(&v.to_formula())
}

fn ineq_texts(q: &QuasiInequality) -> Vec<String> {
    q.antecedent.iter().map(print_inequality).collect()
}

/// `exists $j, #n. [ a <= b & c <= d => $i <= #m ]`
pub fn member_text(q: &QuasiInequality) -> String {
    let body = format!("[ {} => {} ]", ineq_texts(q).join(" & "), print_inequality(&q.consequent));
    if q.exists_vars.is_empty() {
        body
    } else {
        let vs: Vec<String> = q.exists_vars.iter().map(var_text).collect();
        format!("exists {}. {}", vs.join(", "), body)
    }
}

pub fn system_text(sys: &QuasiSystem) -> String {
    sys.members.iter().map(member_text).collect::<Vec<_>>().join("\n")
}

pub fn member_json(q: &QuasiInequality) -> Value {
    json!({
        "exists": q.exists_vars.iter().map(var_text).collect::<Vec<_>>(),
        "antecedent": ineq_texts(q),
        "consequent": print_inequality(&q.consequent),
    })
}

pub fn system_json(sys: &QuasiSystem) -> Value {
    Value::Array(sys.members.iter().map(member_json).collect())
}

pub fn step_json(a: &RuleApplication) -> Value {
    let mut v = json!({
        "rule": a.rule.name(),
        "rule_id": serde_json::to_value(&a.rule).unwrap_or(Value::Null),
        "target": a.target,
        "produced": a.produced,
        "result_members": a.result_members.iter().map(member_json).collect::<Vec<_>>(),
    });
    if let Some(c) = &a.certificate {
        v["certificate"] = serde_json::to_value(c).unwrap_or(Value::Null);
    }
    v
}

pub fn run_json(r: &RunResult) -> Value {
    json!({
        "input": print_inequality(&r.input),
        "mode": r.mode,
        "mode_used": r.mode_used,
        "preprocessed": r.preprocessed.iter().map(print_inequality).collect::<Vec<_>>(),
        "order_types": r.guides,
        "initial": system_json(&r.initial),
        "steps": r.trace.iter().map(step_json).collect::<Vec<_>>(),
        "status": r.status,
        "run_kind": r.run_kind,
        "pure_system": r.pure_system().map(system_json),
    })
}

pub fn run_text(r: &RunResult, with_trace: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", print_inequality(&r.input)));
    out.push_str(&format!("mode: {} (attempt: {})\n", r.mode, r.mode_used));
    for (k, p) in r.preprocessed.iter().enumerate() {
        out.push_str(&format!("preprocessed[{k}]: {}\n", print_inequality(p)));
    }
    if with_trace {
        out.push_str("initial:\n");
        for m in &r.initial.members {
            out.push_str(&format!("  {}\n", member_text(m)));
        }
        for (n, a) in r.trace.iter().enumerate() {
            let at = match a.target.inequality {
                Some(i) => format!("member {} inequality {}", a.target.member, i),
                None => format!("member {}", a.target.member),
            };
            out.push_str(&format!("{:>3}. {} at {}\n", n + 1, a.rule.name(), at));
            for m in &a.result_members {
                out.push_str(&format!("       {}\n", member_text(m)));
            }
        }
    }
    match &r.status {
        RunStatus::Success => {
            out.push_str(&format!("status: success ({:?})\n", r.run_kind));
            out.push_str("pure system:\n");
            for m in &r.final_system.members {
                out.push_str(&format!("  {}\n", member_text(m)));
            }
        }
        RunStatus::Stuck { member, inequality, reason } => {
            out.push_str(&format!("status: stuck on member {member}"));
            if let Some(i) = inequality {
                out.push_str(&format!(" at {i}"));
            }
            out.push_str(&format!(": {reason}\n"));
        }
    }
    out
}

fn rename_in(f: &Formula, order: &mut Vec<Var>) {
    f.visit(&mut |g| {
        if let Some(v @ (Var::Nom(_) | Var::CoNom(_))) = g.as_var() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    });
}

/// Renames nominals to `i1, i2, ..` and co-nominals to `m1, m2, ..` in
/// order of first use, so that runs differing only in fresh names compare
/// equal.
pub fn canonical_names(sys: &QuasiSystem) -> QuasiSystem {
    let mut order = Vec::new();
    for m in &sys.members {
        for i in m.antecedent.iter().chain(std::iter::once(&m.consequent)) {
            rename_in(&i.lhs, &mut order);
            rename_in(&i.rhs, &mut order);
        }
        for v in &m.exists_vars {
            if !order.contains(v) {
                order.push(v.clone());
            }
        }
    }
    let (mut noms, mut conoms) = (0, 0);
    let mut map: BTreeMap<Var, Formula> = BTreeMap::new();
    for v in order {
        let f = match &v {
            Var::Nom(_) => {
                noms += 1;
                Formula::Nominal(format!("i{noms}"))
            }
            _ => {
                conoms += 1;
                Formula::CoNominal(format!("m{conoms}"))
            }
        };
        map.insert(v, f);
    }
    let ren = |i: &Inequality| Inequality::new(substitute(&i.lhs, &map), substitute(&i.rhs, &map));
    QuasiSystem {
        members: sys
            .members
            .iter()
            .map(|m| QuasiInequality {
                exists_vars: m.exists_vars.iter().map(|v| map[v].as_var().unwrap()).collect(),
                antecedent: m.antecedent.iter().map(ren).collect(),
                consequent: ren(&m.consequent),
            })
            .collect(),
        fresh_counter: 0,
        mode: sys.mode,
    }
}
