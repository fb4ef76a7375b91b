use super::eval::{Assignment, Compiled};
use super::{Elem, FiniteAlgebra};
use crate::engine::QuasiInequality;
use crate::syntax::{Inequality, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Lexicographically least violating assignment, variables in their
    /// natural order and elements by index.
    pub countermodel: Option<Assignment>,
    /// For systems, the first member that fails.
    pub member: Option<usize>,
    pub assignments_checked: u64,
}

impl ValidityReport {
    pub fn describe_countermodel(&self, a: &FiniteAlgebra) -> Vec<(String, String)> {
        self.countermodel
            .iter()
            .flatten()
            .map(|(v, &e)| (v.to_string(), a.element_name(e).to_string()))
            .collect()
    }
}

fn domain(a: &FiniteAlgebra, v: &Var) -> Vec<Elem> {
    match v {
        Var::Nom(_) => a.jty().to_vec(),
        Var::CoNom(_) => a.mty().to_vec(),
        _ => a.elements().collect(),
    }
}

/// Runs `holds` over every sort-respecting assignment of `vars`, first
/// variable most significant, stopping at the first failure.
fn search(
    a: &FiniteAlgebra,
    vars: &[Var],
    mut holds: impl FnMut(&[Elem]) -> bool,
) -> (Option<Vec<Elem>>, u64) {
    let doms: Vec<Vec<Elem>> = vars.iter().map(|v| domain(a, v)).collect();
    if doms.iter().any(|d| d.is_empty()) {
        return (None, 0);
    }
    let mut idx = vec![0usize; vars.len()];
    let mut vals: Vec<Elem> = doms.iter().map(|d| d[0]).collect();
    let mut count = 0u64;
    loop {
        count += 1;
        if !holds(&vals) {
            return (Some(vals), count);
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return (None, count);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < doms[k].len() {
                vals[k] = doms[k][idx[k]];
                break;
            }
            idx[k] = 0;
            vals[k] = doms[k][0];
        }
    }
}

fn report(vars: &[Var], found: Option<Vec<Elem>>, count: u64, member: Option<usize>) -> ValidityReport {
    ValidityReport {
        valid: found.is_none(),
        countermodel: found.map(|vals| vars.iter().cloned().zip(vals).collect()),
        member,
        assignments_checked: count,
    }
}

pub fn check_inequality(a: &FiniteAlgebra, ineq: &Inequality) -> ValidityReport {
    let c = Compiled::many(&[&ineq.lhs, &ineq.rhs]);
    let mut env = vec![0; c.slot_count()];
    let n = c.vars().len();
    let (found, count) = search(a, c.vars(), |vals| {
        env[..n].copy_from_slice(vals);
        let l = c.eval_root(a, 0, &mut env);
        let r = c.eval_root(a, 1, &mut env);
        a.leq(l, r)
    });
    report(c.vars(), found, count, None)
}

pub fn check_quasi(a: &FiniteAlgebra, q: &QuasiInequality) -> ValidityReport {
    let mut fs = Vec::new();
    for i in q.antecedent.iter().chain(std::iter::once(&q.consequent)) {
        fs.push(&i.lhs);
        fs.push(&i.rhs);
    }
    let mut vars: std::collections::BTreeSet<Var> = q.exists_vars.iter().cloned().collect();
    for f in &fs {
        vars.extend(f.free_vars());
    }
    let c = Compiled::with_vars(&fs, vars.into_iter().collect());
    let mut env = vec![0; c.slot_count()];
    let n = c.vars().len();
    let pairs = c.roots() / 2;
    let (found, count) = search(a, c.vars(), |vals| {
        env[..n].copy_from_slice(vals);
        let sat = |k: usize, env: &mut [Elem]| {
            let l = c.eval_root(a, 2 * k, env);
            a.leq(l, c.eval_root(a, 2 * k + 1, env))
        };
        (0..pairs - 1).any(|k| !sat(k, &mut env)) || sat(pairs - 1, &mut env)
    });
    report(c.vars(), found, count, None)
}

/// A system holds iff every member does.
pub fn check_quasi_system(a: &FiniteAlgebra, members: &[QuasiInequality]) -> ValidityReport {
    let mut total = 0;
    for (k, q) in members.iter().enumerate() {
        let mut r = check_quasi(a, q);
        total += r.assignments_checked;
        if !r.valid {
            r.member = Some(k);
            r.assignments_checked = total;
            return r;
        }
    }
    ValidityReport { valid: true, countermodel: None, member: None, assignments_checked: total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{battery, eval};
    use crate::syntax::{parse_inequality, Formula};

    #[test]
    fn reflexivity_everywhere() {
        let i = parse_inequality("p <= p").unwrap();
        for a in battery() {
            assert!(check_inequality(&a, &i).valid);
        }
    }

    #[test]
    fn box_identity_chain() {
        let a = &battery()[0];
        assert!(check_inequality(a, &parse_inequality("p <= []p").unwrap()).valid);
        assert!(!check_inequality(a, &parse_inequality("p & q <= F").unwrap()).valid);
    }

    #[test]
    fn countermodel_replays_and_is_least() {
        let ineq = parse_inequality("p | q <= <>p").unwrap();
        for a in battery() {
            let r = check_inequality(&a, &ineq);
            let Some(cm) = r.countermodel.clone() else { continue };
            let l = eval(&a, &ineq.lhs, &cm).unwrap();
            let rr = eval(&a, &ineq.rhs, &cm).unwrap();
            assert!(!a.leq(l, rr));
            let (p, q) = (cm[&Var::Prop("p".into())], cm[&Var::Prop("q".into())]);
            for x in a.elements() {
                for y in a.elements() {
                    if (x, y) < (p, q) {
                        let v = Assignment::from([(Var::Prop("p".into()), x), (Var::Prop("q".into()), y)]);
                        let l = eval(&a, &ineq.lhs, &v).unwrap();
                        assert!(a.leq(l, eval(&a, &ineq.rhs, &v).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn unsatisfiable_antecedent() {
        let q = QuasiInequality {
            exists_vars: vec![],
            antecedent: vec![Inequality::new(Formula::nom("i"), Formula::Bot)],
            consequent: Inequality::new(Formula::Top, Formula::Bot),
        };
        for a in battery() {
            assert!(check_quasi(&a, &q).valid);
        }
    }

    #[test]
    fn first_approximation_base_case() {
        for src in ["p <= <>p", "[]p <= p", "p & <>q <= <>(p & q)", "mu X.(p | <>X) <= []p"] {
            let ineq = parse_inequality(src).unwrap();
            let q = QuasiInequality {
                exists_vars: vec![],
                antecedent: vec![
                    Inequality::new(Formula::nom("i"), ineq.lhs.clone()),
                    Inequality::new(ineq.rhs.clone(), Formula::conom("m")),
                ],
                consequent: Inequality::new(Formula::nom("i"), Formula::conom("m")),
            };
            for a in battery() {
                assert_eq!(check_inequality(&a, &ineq).valid, check_quasi(&a, &q).valid, "{src} on {}", a.name);
            }
        }
    }
}
