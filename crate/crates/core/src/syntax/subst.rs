use std::collections::{BTreeMap, BTreeSet};

use super::{Formula, Var};

/// Simultaneous capture-avoiding substitution.
///
/// Bound fixed point variables are renamed to `X'1`, `X'2`, ... whenever a
/// replacement would otherwise be captured. The suffix is the least one that
/// avoids every name in scope, which keeps results independent of history.
pub fn substitute(f: &Formula, bindings: &BTreeMap<Var, Formula>) -> Formula {
    if bindings.is_empty() {
        return f.clone();
    }
    go(f, bindings)
}

pub fn substitute_one(f: &Formula, v: &Var, g: &Formula) -> Formula {
    let mut m = BTreeMap::new();
    m.insert(v.clone(), g.clone());
    substitute(f, &m)
}

fn go(f: &Formula, m: &BTreeMap<Var, Formula>) -> Formula {
    if let Some(v) = f.as_var() {
        return m.get(&v).cloned().unwrap_or_else(|| f.clone());
    }
    if let Some((x, body)) = f.binder() {
        let mut inner = m.clone();
        inner.remove(&Var::Fix(x.to_string()));
        let free = body.free_vars();
        inner.retain(|k, _| free.contains(k));
        if inner.is_empty() {
            return f.clone();
        }
        let captures = inner.values().any(|g| g.free_fix_vars().contains(x));
        let mut bound = x.to_string();
        if captures {
            let mut avoid: BTreeSet<String> = body.names().into_iter().map(|v| v.name().to_string()).collect();
            for g in inner.values() {
                avoid.extend(g.names().into_iter().map(|v| v.name().to_string()));
            }
            bound = fresh_fix_name(x, &avoid);
            inner.insert(Var::Fix(x.to_string()), Formula::FixVar(bound.clone()));
        }
        let nb = Box::new(go(body, &inner));
        return match f {
            Formula::Mu(..) => Formula::Mu(bound, nb),
            Formula::Nu(..) => Formula::Nu(bound, nb),
            Formula::MuStar(..) => Formula::MuStar(bound, nb),
            _ => Formula::NuStar(bound, nb),
        };
    }
    f.with_children(f.children().into_iter().map(|c| go(c, m)).collect())
}

/// Least `base'n` (n >= 1) not in `avoid`, where `base` drops any earlier suffix.
pub fn fresh_fix_name(x: &str, avoid: &BTreeSet<String>) -> String {
    let base = x.split('\'').next().unwrap_or(x);
    (1..)
        .map(|n| format!("{base}'{n}"))
        .find(|c| !avoid.contains(c))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn placeholder_instance() {
        let f = parse_formula("<>?x1 | ?x2").unwrap();
        let mut m = BTreeMap::new();
        m.insert(Var::Place("x1".into()), Formula::nom("j"));
        m.insert(Var::Place("x2".into()), Formula::conom("n"));
        assert_eq!(substitute(&f, &m), Formula::or(Formula::dia(Formula::nom("j")), Formula::conom("n")));
    }

    #[test]
    fn identity_and_capture() {
        let p = Formula::prop("p");
        assert_eq!(substitute(&p, &BTreeMap::new()), p);
        let f = Formula::mu("X", Formula::or(Formula::prop("p"), Formula::fix("X")));
        let g = substitute_one(&f, &Var::Prop("p".into()), &Formula::fix("X"));
        assert_eq!(g, Formula::mu("X'1", Formula::or(Formula::fix("X"), Formula::fix("X'1"))));
    }

    #[test]
    fn bound_variable_shadows() {
        let f = parse_formula("X & mu X. <>X").unwrap();
        let g = substitute_one(&f, &Var::Fix("X".into()), &Formula::Top);
        assert_eq!(g, parse_formula("T & mu X. <>X").unwrap());
    }
}
