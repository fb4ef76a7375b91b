use serde_json::{json, Value};

use super::{Formula, Inequality};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed formula JSON: {0}")]
pub struct JsonError(pub String);

pub fn formula_to_json(f: &Formula) -> Value {
    let op = op_name(f);
    if let Some(v) = f.as_var() {
        return json!({"op": op, "name": v.name()});
    }
    let args: Vec<Value> = f.children().into_iter().map(formula_to_json).collect();
    match f.binder() {
        Some((x, _)) => json!({"op": op, "var": x, "args": args}),
        None if args.is_empty() => json!({"op": op}),
        None => json!({"op": op, "args": args}),
    }
}

fn op_name(f: &Formula) -> &'static str {
    match f {
        Formula::Bot => "Bot",
        Formula::Top => "Top",
        Formula::PropVar(_) => "PropVar",
        Formula::FixVar(_) => "FixVar",
        Formula::PlaceVar(_) => "PlaceVar",
        Formula::Nominal(_) => "Nominal",
        Formula::CoNominal(_) => "CoNominal",
        Formula::And(..) => "And",
        Formula::Or(..) => "Or",
        Formula::Implies(..) => "Implies",
        Formula::CoImplies(..) => "CoImplies",
        Formula::Box(_) => "Box",
        Formula::Dia(_) => "Dia",
        Formula::BlackBox(_) => "BlackBox",
        Formula::BlackDia(_) => "BlackDia",
        Formula::Mu(..) => "Mu",
        Formula::Nu(..) => "Nu",
        Formula::MuStar(..) => "MuStar",
        Formula::NuStar(..) => "NuStar",
    }
}

pub fn formula_from_json(v: &Value) -> Result<Formula, JsonError> {
    let bad = |m: &str| JsonError(m.to_string());
    let op = v.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
    let name = || -> Result<String, JsonError> {
        v.get("name").and_then(Value::as_str).map(str::to_string).ok_or_else(|| bad("missing name"))
    };
    let args: Vec<Formula> = match v.get("args") {
        Some(Value::Array(a)) => a.iter().map(formula_from_json).collect::<Result<_, _>>()?,
        Some(_) => return Err(bad("args must be an array")),
        None => Vec::new(),
    };
    let arity = |n: usize| -> Result<(), JsonError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(JsonError(format!("{op} takes {n} arguments")))
        }
    };
    let two = |args: &[Formula]| (args[0].clone(), args[1].clone());
    Ok(match op {
        "Bot" => Formula::Bot,
        "Top" => Formula::Top,
        "PropVar" => Formula::PropVar(name()?),
        "FixVar" => Formula::FixVar(name()?),
        "PlaceVar" => Formula::PlaceVar(name()?),
        "Nominal" => Formula::Nominal(name()?),
        "CoNominal" => Formula::CoNominal(name()?),
        "And" | "Or" | "Implies" | "CoImplies" => {
            arity(2)?;
            let (a, b) = two(&args);
            match op {
                "And" => Formula::and(a, b),
                "Or" => Formula::or(a, b),
                "Implies" => Formula::imp(a, b),
                _ => Formula::coimp(a, b),
            }
        }
        "Box" | "Dia" | "BlackBox" | "BlackDia" => {
            arity(1)?;
            let a = args[0].clone();
            match op {
                "Box" => Formula::boxf(a),
                "Dia" => Formula::dia(a),
                "BlackBox" => Formula::bbox(a),
                _ => Formula::bdia(a),
            }
        }
        "Mu" | "Nu" | "MuStar" | "NuStar" => {
            arity(1)?;
            let x = v.get("var").and_then(Value::as_str).ok_or_else(|| bad("missing var"))?;
            let b = args[0].clone();
            match op {
                "Mu" => Formula::mu(x, b),
                "Nu" => Formula::nu(x, b),
                "MuStar" => Formula::mu_star(x, b),
                _ => Formula::nu_star(x, b),
            }
        }
        other => return Err(JsonError(format!("unknown op {other}"))),
    })
}

pub fn inequality_to_json(i: &Inequality) -> Value {
    json!({"lhs": formula_to_json(&i.lhs), "rhs": formula_to_json(&i.rhs)})
}

pub fn inequality_from_json(v: &Value) -> Result<Inequality, JsonError> {
    let side = |k: &str| v.get(k).ok_or_else(|| JsonError(format!("missing {k}"))).and_then(formula_from_json);
    Ok(Inequality::new(side("lhs")?, side("rhs")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn shape() {
        let f = parse_formula("mu X. p | <>X").unwrap();
        let v = formula_to_json(&f);
        assert_eq!(v["op"], "Mu");
        assert_eq!(v["var"], "X");
        assert_eq!(v["args"][0]["args"][0], json!({"op": "PropVar", "name": "p"}));
        assert_eq!(formula_from_json(&v).unwrap(), f);
    }
}
