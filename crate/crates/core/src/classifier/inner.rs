use std::collections::BTreeMap;

use serde::Serialize;

use super::Orient;
use crate::syntax::{Formula, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum InnerKind {
    BoxIF,
    DiaIF,
}

impl InnerKind {
    fn dual(self) -> InnerKind {
        match self {
            InnerKind::BoxIF => InnerKind::DiaIF,
            InnerKind::DiaIF => InnerKind::BoxIF,
        }
    }
}

/// `template[bindings, params]` reconstructs the recognised formula.
/// Placeholders `x1, x2, ..` are the extracted subformulas, `z1, ..` the
/// constant parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InnerFormulaCertificate {
    pub kind: InnerKind,
    #[serde(serialize_with = "ser_formula")]
    pub template: Formula,
    /// Order type of the placeholders, in placeholder order.
    pub tau: Vec<(String, Orient)>,
    #[serde(serialize_with = "ser_map")]
    pub bindings: BTreeMap<String, Formula>,
    #[serde(serialize_with = "ser_map")]
    pub params: BTreeMap<String, Formula>,
    /// Free fixed point variables of the template (all of order type 1).
    pub fix_vars: Vec<String>,
}

fn ser_formula<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::syntax::print_formula(f))
}

fn ser_map<S: serde::Serializer>(m: &BTreeMap<String, Formula>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &crate::syntax::print_formula(v))?;
    }
    map.end()
}

impl InnerFormulaCertificate {
    pub fn orient(&self, x: &str) -> Option<Orient> {
        self.tau.iter().find(|(n, _)| n == x).map(|&(_, o)| o)
    }

    /// The template with the parameters put back, still over the placeholders.
    pub fn instantiated_template(&self) -> Formula {
        let m = self.params.iter().map(|(z, g)| (Var::Place(z.clone()), g.clone())).collect();
        crate::syntax::substitute(&self.template, &m)
    }

    /// The recognised formula.
    pub fn reassemble(&self) -> Formula {
        let mut m: BTreeMap<Var, Formula> = self.params.iter().map(|(z, g)| (Var::Place(z.clone()), g.clone())).collect();
        m.extend(self.bindings.iter().map(|(x, g)| (Var::Place(x.clone()), g.clone())));
        crate::syntax::substitute(&self.template, &m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum InnerError {
    #[error("{formula} cannot head an inner formula of the requested kind")]
    NotInner { formula: String },
}

struct Builder {
    tau: Vec<(String, Orient)>,
    bindings: BTreeMap<String, Formula>,
    params: BTreeMap<String, Formula>,
}

impl Builder {
    fn is_param(&self, f: &Formula) -> bool {
        !f.has_prop_vars() && f.free_fix_vars().is_empty()
    }

    fn param(&mut self, f: &Formula) -> Formula {
        if matches!(f, Formula::Bot | Formula::Top) {
            return f.clone();
        }
        let name = format!("z{}", self.params.len() + 1);
        self.params.insert(name.clone(), f.clone());
        Formula::PlaceVar(name)
    }

    fn cut(&mut self, f: &Formula, rev: bool) -> Option<Formula> {
        if !f.free_fix_vars().is_empty() {
            return None;
        }
        let name = format!("x{}", self.tau.len() + 1);
        self.tau.push((name.clone(), if rev { Orient::Dual } else { Orient::One }));
        self.bindings.insert(name.clone(), f.clone());
        Some(Formula::PlaceVar(name))
    }

    /// Tries each production in turn, rolling back partial work on failure.
    fn attempt(&mut self, go: impl FnOnce(&mut Self) -> Option<Formula>) -> Option<Formula> {
        let (t, b, p) = (self.tau.len(), self.bindings.clone(), self.params.clone());
        let r = go(self);
        if r.is_none() {
            self.tau.truncate(t);
            self.bindings = b;
            self.params = p;
        }
        r
    }

    /// `rev` marks a reversed context (an argument of order type dual to the
    /// surrounding one); `own` lists the fixed point variables bound in the
    /// current orientation.
    fn rec(&mut self, f: &Formula, kind: InnerKind, rev: bool, own: &mut Vec<(String, bool)>) -> Option<Formula> {
        use Formula as F;
        if let F::FixVar(x) = f {
            let bound_here = own.iter().rev().find(|(y, _)| y == x).map(|&(_, r)| r);
            return match bound_here {
                Some(r) if r == rev => Some(f.clone()),
                _ => None,
            };
        }
        if self.is_param(f) {
            return self.cut(f, rev);
        }
        let r = match (kind, f) {
            (InnerKind::DiaIF, F::Dia(a)) => self.attempt(|s| Some(F::Dia(Box::new(s.rec(a, kind, rev, own)?)))),
            (InnerKind::BoxIF, F::Box(a)) => self.attempt(|s| Some(F::Box(Box::new(s.rec(a, kind, rev, own)?)))),
            (InnerKind::DiaIF, F::Or(a, b)) | (InnerKind::BoxIF, F::And(a, b)) => self.attempt(|s| {
                let x = s.rec(a, kind, rev, own)?;
                let y = s.rec(b, kind, rev, own)?;
                Some(f.with_children(vec![x, y]))
            }),
            (InnerKind::DiaIF, F::MuStar(y, a)) | (InnerKind::BoxIF, F::NuStar(y, a)) => self.attempt(|s| {
                own.push((y.clone(), rev));
                let body = s.rec(a, kind, rev, own);
                own.pop();
                Some(f.with_children(vec![body?]))
            }),
            // pi & psi, psi & pi  /  pi | phi, phi | pi
            (InnerKind::DiaIF, F::And(a, b)) | (InnerKind::BoxIF, F::Or(a, b)) => {
                let left = if self.is_param(a) {
                    self.attempt(|s| {
                        let x = s.param(a);
                        let y = s.rec(b, kind, rev, own)?;
                        Some(f.with_children(vec![x, y]))
                    })
                } else {
                    None
                };
                left.or_else(|| {
                    if self.is_param(b) {
                        self.attempt(|s| {
                            let x = s.rec(a, kind, rev, own)?;
                            let y = s.param(b);
                            Some(f.with_children(vec![x, y]))
                        })
                    } else {
                        None
                    }
                })
            }
            // psi - pi, pi - phi^c
            (InnerKind::DiaIF, F::CoImplies(a, b)) => {
                let first = if self.is_param(b) {
                    self.attempt(|s| {
                        let x = s.rec(a, kind, rev, own)?;
                        let y = s.param(b);
                        Some(f.with_children(vec![x, y]))
                    })
                } else {
                    None
                };
                first.or_else(|| {
                    if self.is_param(a) {
                        self.attempt(|s| {
                            let x = s.param(a);
                            let y = s.rec(b, kind.dual(), !rev, own)?;
                            Some(f.with_children(vec![x, y]))
                        })
                    } else {
                        None
                    }
                })
            }
            // pi -> phi, psi^c -> pi
            (InnerKind::BoxIF, F::Implies(a, b)) => {
                let first = if self.is_param(a) {
                    self.attempt(|s| {
                        let x = s.param(a);
                        let y = s.rec(b, kind, rev, own)?;
                        Some(f.with_children(vec![x, y]))
                    })
                } else {
                    None
                };
                first.or_else(|| {
                    if self.is_param(b) {
                        self.attempt(|s| {
                            let x = s.rec(a, kind.dual(), !rev, own)?;
                            let y = s.param(b);
                            Some(f.with_children(vec![x, y]))
                        })
                    } else {
                        None
                    }
                })
            }
            _ => None,
        };
        r.or_else(|| self.cut(f, rev))
    }
}

/// Recognises `f` as an inner formula of the given kind with placeholders
/// cut at the subformulas where the inner recursion cannot continue. The
/// free fixed point variables of `f` play the role of the variables of order
/// type 1 that the enclosing binder contributes.
pub fn recognize_inner(f: &Formula, kind: InnerKind) -> Result<InnerFormulaCertificate, InnerError> {
    let fixed = f.free_fix_vars();
    let mut b = Builder { tau: vec![], bindings: BTreeMap::new(), params: BTreeMap::new() };
    let mut own: Vec<(String, bool)> = fixed.iter().map(|x| (x.clone(), false)).collect();
    let template = b.rec(f, kind, false, &mut own).ok_or_else(|| InnerError::NotInner {
        formula: crate::syntax::print_formula(f),
    })?;
    Ok(InnerFormulaCertificate {
        kind,
        template,
        tau: b.tau,
        bindings: b.bindings,
        params: b.params,
        fix_vars: fixed.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, star};

    fn run(src: &str, kind: InnerKind) -> InnerFormulaCertificate {
        let f = star(&parse_formula(src).unwrap()).unwrap();
        let c = recognize_inner(&f, kind).unwrap();
        assert_eq!(c.reassemble(), f);
        c
    }

    #[test]
    fn diamond_body() {
        let c = run("<>X | []([]<>q | p)", InnerKind::DiaIF);
        assert_eq!(c.template, parse_formula("<>X | ?x1").unwrap());
        assert_eq!(c.tau, vec![("x1".to_string(), Orient::One)]);
        assert_eq!(c.bindings["x1"], parse_formula("[]([]<>q | p)").unwrap());
    }

    #[test]
    fn box_body() {
        let c = run("([]((q -> F) & (p -> F)) -> F) & []Y", InnerKind::BoxIF);
        assert_eq!(c.template, parse_formula("(?x1 -> F) & []Y").unwrap());
        assert_eq!(c.tau, vec![("x1".to_string(), Orient::Dual)]);
    }

    #[test]
    fn parameter_clause() {
        let c = run("p | ([]F -< q) | <>X", InnerKind::DiaIF);
        assert_eq!(c.template, parse_formula("?x1 | (?z1 -< ?x2) | <>X").unwrap());
        assert_eq!(c.tau, vec![("x1".to_string(), Orient::One), ("x2".to_string(), Orient::Dual)]);
        assert_eq!(c.params["z1"], parse_formula("[]F").unwrap());
    }

    #[test]
    fn wrong_head() {
        let f = parse_formula("[]X").unwrap();
        assert!(recognize_inner(&f, InnerKind::DiaIF).is_err());
    }
}
