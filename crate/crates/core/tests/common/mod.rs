//! Slow reference semantics built only from the order and the two operator
//! tables, used to cross-check the library.

#![allow(dead_code)]

use std::collections::BTreeMap;

use mustar_alba::algebra::{Elem, FiniteAlgebra};
use mustar_alba::engine::QuasiInequality;
use mustar_alba::syntax::{Formula, Inequality, Var};

pub struct Naive<'a> {
    pub a: &'a FiniteAlgebra,
    pub els: Vec<Elem>,
}

impl<'a> Naive<'a> {
    pub fn new(a: &'a FiniteAlgebra) -> Self {
        Naive { a, els: a.elements().collect() }
    }

    fn le(&self, x: Elem, y: Elem) -> bool {
        self.a.leq(x, y)
    }

    fn greatest(&self, pred: impl Fn(Elem) -> bool) -> Elem {
        let c: Vec<Elem> = self.els.iter().copied().filter(|&x| pred(x)).collect();
        *c.iter().find(|&&x| c.iter().all(|&y| self.le(y, x))).expect("greatest element")
    }

    fn least(&self, pred: impl Fn(Elem) -> bool) -> Elem {
        let c: Vec<Elem> = self.els.iter().copied().filter(|&x| pred(x)).collect();
        *c.iter().find(|&&x| c.iter().all(|&y| self.le(x, y))).expect("least element")
    }

    pub fn bot(&self) -> Elem {
        self.least(|_| true)
    }
    pub fn top(&self) -> Elem {
        self.greatest(|_| true)
    }
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.greatest(|c| self.le(c, x) && self.le(c, y))
    }
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.least(|c| self.le(x, c) && self.le(y, c))
    }
    pub fn imp(&self, x: Elem, y: Elem) -> Elem {
        self.greatest(|c| self.le(self.meet(x, c), y))
    }
    pub fn coimp(&self, x: Elem, y: Elem) -> Elem {
        self.least(|c| self.le(x, self.join(y, c)))
    }
    pub fn black_box(&self, x: Elem) -> Elem {
        self.greatest(|c| self.le(self.a.dia(c), x))
    }
    pub fn black_dia(&self, x: Elem) -> Elem {
        self.least(|c| self.le(x, self.a.boxv(c)))
    }

    fn strictly_below(&self, x: Elem) -> Vec<Elem> {
        self.els.iter().copied().filter(|&y| y != x && self.le(y, x)).collect()
    }

    /// Completely join-irreducible elements.
    pub fn join_irreducibles(&self) -> Vec<Elem> {
        self.els
            .iter()
            .copied()
            .filter(|&x| {
                let below = self.strictly_below(x);
                let j = below.iter().fold(self.bot(), |acc, &y| self.join(acc, y));
                j != x
            })
            .collect()
    }

    pub fn meet_irreducibles(&self) -> Vec<Elem> {
        self.els
            .iter()
            .copied()
            .filter(|&x| {
                let above: Vec<Elem> = self.els.iter().copied().filter(|&y| y != x && self.le(x, y)).collect();
                let m = above.iter().fold(self.top(), |acc, &y| self.meet(acc, y));
                m != x
            })
            .collect()
    }

    pub fn eval(&self, f: &Formula, env: &BTreeMap<Var, Elem>) -> Elem {
        use Formula as F;
        if let Some(v) = f.as_var() {
            return env[&v];
        }
        match f {
            F::Bot => self.bot(),
            F::Top => self.top(),
            F::And(x, y) => self.meet(self.eval(x, env), self.eval(y, env)),
            F::Or(x, y) => self.join(self.eval(x, env), self.eval(y, env)),
            F::Implies(x, y) => self.imp(self.eval(x, env), self.eval(y, env)),
            F::CoImplies(x, y) => self.coimp(self.eval(x, env), self.eval(y, env)),
            F::Box(x) => self.a.boxv(self.eval(x, env)),
            F::Dia(x) => self.a.dia(self.eval(x, env)),
            F::BlackBox(x) => self.black_box(self.eval(x, env)),
            F::BlackDia(x) => self.black_dia(self.eval(x, env)),
            F::Mu(x, b) | F::MuStar(x, b) => {
                // Meet of all prefixed points.
                let pre: Vec<Elem> = self
                    .els
                    .iter()
                    .copied()
                    .filter(|&c| {
                        let mut e = env.clone();
                        e.insert(Var::Fix(x.clone()), c);
                        self.le(self.eval(b, &e), c)
                    })
                    .collect();
                pre.iter().fold(self.top(), |acc, &c| self.meet(acc, c))
            }
            F::Nu(x, b) | F::NuStar(x, b) => {
                let post: Vec<Elem> = self
                    .els
                    .iter()
                    .copied()
                    .filter(|&c| {
                        let mut e = env.clone();
                        e.insert(Var::Fix(x.clone()), c);
                        self.le(c, self.eval(b, &e))
                    })
                    .collect();
                post.iter().fold(self.bot(), |acc, &c| self.join(acc, c))
            }
            _ => unreachable!("variables handled above"),
        }
    }

    fn domain(&self, v: &Var) -> Vec<Elem> {
        match v {
            Var::Nom(_) => self.join_irreducibles(),
            Var::CoNom(_) => self.meet_irreducibles(),
            _ => self.els.clone(),
        }
    }

    /// Calls `f` on every assignment of `vars`; stops early when `f` is false.
    pub fn forall(&self, vars: &[Var], f: &mut dyn FnMut(&BTreeMap<Var, Elem>) -> bool) -> bool {
        let doms: Vec<Vec<Elem>> = vars.iter().map(|v| self.domain(v)).collect();
        if doms.iter().any(|d| d.is_empty()) {
            return true;
        }
        let mut idx = vec![0; vars.len()];
        loop {
            let env: BTreeMap<Var, Elem> = vars.iter().cloned().zip(idx.iter().zip(&doms).map(|(&i, d)| d[i])).collect();
            if !f(&env) {
                return false;
            }
            let mut k = vars.len();
            loop {
                if k == 0 {
                    return true;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < doms[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn holds(&self, i: &Inequality, env: &BTreeMap<Var, Elem>) -> bool {
        self.le(self.eval(&i.lhs, env), self.eval(&i.rhs, env))
    }

    pub fn valid_inequality(&self, i: &Inequality) -> bool {
        let vars: Vec<Var> = i.lhs.free_vars().into_iter().chain(i.rhs.free_vars()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        self.forall(&vars, &mut |env| self.holds(i, env))
    }

    /// An existential in the antecedent is a universal over the whole member.
    pub fn valid_member(&self, q: &QuasiInequality) -> bool {
        let mut vars = std::collections::BTreeSet::new();
        for i in q.antecedent.iter().chain(std::iter::once(&q.consequent)) {
            vars.extend(i.lhs.free_vars());
            vars.extend(i.rhs.free_vars());
        }
        vars.extend(q.exists_vars.iter().cloned());
        let vars: Vec<Var> = vars.into_iter().collect();
        self.forall(&vars, &mut |env| !q.antecedent.iter().all(|i| self.holds(i, env)) || self.holds(&q.consequent, env))
    }

    pub fn valid_system(&self, qs: &[QuasiInequality]) -> bool {
        qs.iter().all(|q| self.valid_member(q))
    }
}

/// Replaces `$name` and `#name` tokens by `$i1..` and `#m1..` in order of
/// first appearance across the strings.
pub fn canonical_tokens(lines: &[String]) -> Vec<String> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let (mut noms, mut conoms) = (0, 0);
    lines
        .iter()
        .map(|l| {
            let mut out = String::new();
            let cs: Vec<char> = l.chars().collect();
            let mut k = 0;
            while k < cs.len() {
                let c = cs[k];
                if c == '$' || c == '#' {
                    let mut e = k + 1;
                    while e < cs.len() && (cs[e].is_alphanumeric() || cs[e] == '_') {
                        e += 1;
                    }
                    let tok: String = cs[k..e].iter().collect();
                    let name = map
                        .entry(tok)
                        .or_insert_with(|| {
                            if c == '$' {
                                noms += 1;
                                format!("$i{noms}")
                            } else {
                                conoms += 1;
                                format!("#m{conoms}")
                            }
                        })
                        .clone();
                    out.push_str(&name);
                    k = e;
                } else {
                    out.push(c);
                    k += 1;
                }
            }
            out
        })
        .collect()
}
