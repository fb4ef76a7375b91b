use std::collections::BTreeMap;

use serde::Serialize;

use super::{Elem, FiniteAlgebra};
use crate::syntax::{Formula, Var};

pub type Assignment = BTreeMap<Var, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum EvalError {
    #[error("variable {var} has no value")]
    UnboundVariable { var: Var },
    #[error("{var} must denote a {expected} element")]
    SortViolation { var: Var, expected: String },
    #[error("fixed point of {formula} disagrees: iteration gives {iterated}, prefixed points give {prefixed}")]
    FixpointDisagreement { formula: String, iterated: String, prefixed: String },
}

#[derive(Debug, Clone)]
enum Node {
    Bot,
    Top,
    Slot(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    CoImp(usize, usize),
    Box(usize),
    Dia(usize),
    BBox(usize),
    BDia(usize),
    Mu(usize, usize),
    Nu(usize, usize),
}

/// Formulas compiled against a shared slot layout. The first `vars().len()`
/// slots hold the free variables, the rest are scratch for bound ones.
#[derive(Debug, Clone)]
pub struct Compiled {
    nodes: Vec<Node>,
    roots: Vec<usize>,
    vars: Vec<Var>,
    slots: usize,
}

impl Compiled {
    pub fn new(f: &Formula) -> Self {
        Self::many(&[f])
    }

    pub fn many(fs: &[&Formula]) -> Self {
        let mut free = std::collections::BTreeSet::new();
        for f in fs {
            free.extend(f.free_vars());
        }
        Self::with_vars(fs, free.into_iter().collect())
    }

    /// `vars` must include every free variable of `fs`; extras are allowed.
    pub fn with_vars(fs: &[&Formula], vars: Vec<Var>) -> Self {
        let mut c = Compiled { nodes: Vec::new(), roots: Vec::new(), vars, slots: 0 };
        c.slots = c.vars.len();
        let mut scope: Vec<(Var, usize)> = c.vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        for f in fs {
            let r = c.compile(f, &mut scope);
            c.roots.push(r);
        }
        c
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn compile(&mut self, f: &Formula, scope: &mut Vec<(Var, usize)>) -> usize {
        use Formula as F;
        if let Some(v) = f.as_var() {
            let slot = scope
                .iter()
                .rev()
                .find(|(w, _)| *w == v)
                .map(|&(_, s)| s)
                .expect("free variable missing from slot layout");
            return self.push(Node::Slot(slot));
        }
        match f {
            F::Bot => self.push(Node::Bot),
            F::Top => self.push(Node::Top),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::CoImplies(a, b) => {
                let x = self.compile(a, scope);
                let y = self.compile(b, scope);
                self.push(match f {
                    F::And(..) => Node::And(x, y),
                    F::Or(..) => Node::Or(x, y),
                    F::Implies(..) => Node::Imp(x, y),
                    _ => Node::CoImp(x, y),
                })
            }
            F::Box(a) | F::Dia(a) | F::BlackBox(a) | F::BlackDia(a) => {
                let x = self.compile(a, scope);
                self.push(match f {
                    F::Box(_) => Node::Box(x),
                    F::Dia(_) => Node::Dia(x),
                    F::BlackBox(_) => Node::BBox(x),
                    _ => Node::BDia(x),
                })
            }
            F::Mu(x, b) | F::Nu(x, b) | F::MuStar(x, b) | F::NuStar(x, b) => {
                let slot = self.slots;
                self.slots += 1;
                scope.push((Var::Fix(x.clone()), slot));
                let body = self.compile(b, scope);
                scope.pop();
                self.push(match f {
                    F::Mu(..) | F::MuStar(..) => Node::Mu(slot, body),
                    _ => Node::Nu(slot, body),
                })
            }
            _ => unreachable!(),
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn roots(&self) -> usize {
        self.roots.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    /// A scratch environment with the given free-variable values.
    pub fn env(&self, values: &[Elem]) -> Vec<Elem> {
        let mut env = vec![0; self.slots];
        env[..values.len()].copy_from_slice(values);
        env
    }

    pub fn eval_root(&self, a: &FiniteAlgebra, root: usize, env: &mut [Elem]) -> Elem {
        self.run(a, self.roots[root], env)
    }

    /// Convenience wrapper for single-formula compilations.
    pub fn eval(&self, a: &FiniteAlgebra, values: &[Elem]) -> Elem {
        let mut env = self.env(values);
        self.eval_root(a, 0, &mut env)
    }

    fn run(&self, a: &FiniteAlgebra, n: usize, env: &mut [Elem]) -> Elem {
        match self.nodes[n] {
            Node::Bot => a.bot(),
            Node::Top => a.top(),
            Node::Slot(s) => env[s],
            Node::And(x, y) => {
                let u = self.run(a, x, env);
                a.meet(u, self.run(a, y, env))
            }
            Node::Or(x, y) => {
                let u = self.run(a, x, env);
                a.join(u, self.run(a, y, env))
            }
            Node::Imp(x, y) => {
                let u = self.run(a, x, env);
                a.heyting_imp(u, self.run(a, y, env))
            }
            Node::CoImp(x, y) => {
                let u = self.run(a, x, env);
                a.co_imp(u, self.run(a, y, env))
            }
            Node::Box(x) => a.boxv(self.run(a, x, env)),
            Node::Dia(x) => a.dia(self.run(a, x, env)),
            Node::BBox(x) => a.black_box(self.run(a, x, env)),
            Node::BDia(x) => a.black_dia(self.run(a, x, env)),
            Node::Mu(s, body) | Node::Nu(s, body) => {
                let least = matches!(self.nodes[n], Node::Mu(..));
                let saved = env[s];
                let mut cur = if least { a.bot() } else { a.top() };
                let mut rounds = 0;
                loop {
                    env[s] = cur;
                    let next = self.run(a, body, env);
                    if next == cur {
                        break;
                    }
                    cur = next;
                    rounds += 1;
                    debug_assert!(rounds <= a.size(), "fixed-point iteration did not stabilise");
                }
                env[s] = saved;
                cur
            }
        }
    }
}

/// Definitional evaluation: binders through the meet of prefixed points and
/// the join of postfixed points.
fn reference(a: &FiniteAlgebra, f: &Formula, env: &mut Assignment) -> Elem {
    use Formula as F;
    if let Some(v) = f.as_var() {
        return env[&v];
    }
    match f {
        F::Bot => a.bot(),
        F::Top => a.top(),
        F::And(x, y) => {
            let u = reference(a, x, env);
            a.meet(u, reference(a, y, env))
        }
        F::Or(x, y) => {
            let u = reference(a, x, env);
            a.join(u, reference(a, y, env))
        }
        F::Implies(x, y) => {
            let u = reference(a, x, env);
            a.heyting_imp(u, reference(a, y, env))
        }
        F::CoImplies(x, y) => {
            let u = reference(a, x, env);
            a.co_imp(u, reference(a, y, env))
        }
        F::Box(x) => a.boxv(reference(a, x, env)),
        F::Dia(x) => a.dia(reference(a, x, env)),
        F::BlackBox(x) => a.black_box(reference(a, x, env)),
        F::BlackDia(x) => a.black_dia(reference(a, x, env)),
        F::Mu(x, b) | F::Nu(x, b) | F::MuStar(x, b) | F::NuStar(x, b) => {
            let least = matches!(f, F::Mu(..) | F::MuStar(..));
            let key = Var::Fix(x.clone());
            let saved = env.remove(&key);
            let mut hits = Vec::new();
            for c in a.elements() {
                env.insert(key.clone(), c);
                let t = reference(a, b, env);
                if (least && a.leq(t, c)) || (!least && a.leq(c, t)) {
                    hits.push(c);
                }
            }
            env.remove(&key);
            if let Some(s) = saved {
                env.insert(key, s);
            }
            if least {
                a.meet_all(hits)
            } else {
                a.join_all(hits)
            }
        }
        _ => unreachable!(),
    }
}

fn check_sorts(a: &FiniteAlgebra, f: &Formula, v: &Assignment) -> Result<(), EvalError> {
    for var in f.free_vars() {
        let Some(&e) = v.get(&var) else {
            return Err(EvalError::UnboundVariable { var });
        };
        match var {
            Var::Nom(_) if !a.jty().contains(&e) => {
                return Err(EvalError::SortViolation { var, expected: "join-irreducible".into() })
            }
            Var::CoNom(_) if !a.mty().contains(&e) => {
                return Err(EvalError::SortViolation { var, expected: "meet-irreducible".into() })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Evaluates `f`, computing every binder both by Kleene iteration and by the
/// prefixed-point definition and failing if the two ever differ.
pub fn eval(a: &FiniteAlgebra, f: &Formula, v: &Assignment) -> Result<Elem, EvalError> {
    check_sorts(a, f, v)?;
    let compiled = Compiled::new(f);
    let values: Vec<Elem> = compiled.vars().iter().map(|x| v[x]).collect();
    let fast = compiled.eval(a, &values);
    let mut env = v.clone();
    let slow = reference(a, f, &mut env);
    if fast != slow {
        return Err(EvalError::FixpointDisagreement {
            formula: crate::syntax::print_formula(f),
            iterated: a.element_name(fast).to_string(),
            prefixed: a.element_name(slow).to_string(),
        });
    }
    Ok(fast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::battery;
    use crate::syntax::parse_formula;

    #[test]
    fn least_fixpoint_of_identity() {
        for a in battery() {
            let f = parse_formula("mu X. X").unwrap();
            assert_eq!(eval(&a, &f, &Assignment::new()).unwrap(), a.bot());
            let g = parse_formula("nu X. X").unwrap();
            assert_eq!(eval(&a, &g, &Assignment::new()).unwrap(), a.top());
        }
    }

    #[test]
    fn constant_join() {
        let f = parse_formula("mu X. (p | X)").unwrap();
        for a in battery() {
            for e in a.elements() {
                let v = Assignment::from([(Var::Prop("p".into()), e)]);
                assert_eq!(eval(&a, &f, &v).unwrap(), e);
            }
        }
    }

    #[test]
    fn unbound_and_sorts() {
        let a = &battery()[3];
        let f = parse_formula("$i & p").unwrap();
        assert!(matches!(eval(a, &f, &Assignment::new()), Err(EvalError::UnboundVariable { .. })));
        let v = Assignment::from([(Var::Nom("i".into()), a.top()), (Var::Prop("p".into()), a.top())]);
        assert!(matches!(eval(a, &f, &v), Err(EvalError::SortViolation { .. })));
    }

    #[test]
    fn shadowed_binders() {
        let f = parse_formula("mu X. (<>X | nu X. (X & p))").unwrap();
        for a in battery() {
            for e in a.elements() {
                let v = Assignment::from([(Var::Prop("p".into()), e)]);
                eval(&a, &f, &v).unwrap();
            }
        }
    }
}
