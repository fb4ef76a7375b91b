use std::collections::{BTreeMap, BTreeSet};

use super::shape::syntactic_shape;
use super::types::{Keep, Mode, QuasiInequality, QuasiSystem, Rule, RuleApplication, RuleError, Target};
use crate::classifier::{recognize_inner, InnerFormulaCertificate, InnerKind, Orient};
use crate::syntax::{is_negative_in, is_positive_in, print_inequality, substitute, Formula, Inequality, Var};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleOptions {
    /// Test fixture: (RA) substitutes bottom instead of the join of its lower bounds.
    pub ackermann_bug: bool,
}

/// `forall i forall m [(i <= lhs & rhs <= m) => i <= m]` with the universals
/// named after the member index.
pub fn first_approximation_member(ineq: &Inequality, k: usize) -> QuasiInequality {
    let i = Formula::Nominal(format!("i{k}"));
    let m = Formula::CoNominal(format!("m{k}"));
    QuasiInequality {
        exists_vars: vec![],
        antecedent: vec![Inequality::new(i.clone(), ineq.lhs.clone()), Inequality::new(ineq.rhs.clone(), m.clone())],
        consequent: Inequality::new(i, m),
    }
}

pub fn first_approximation(ineq: &Inequality) -> QuasiSystem {
    initial_system(std::slice::from_ref(ineq), Mode::Auto)
}

pub fn initial_system(ineqs: &[Inequality], mode: Mode) -> QuasiSystem {
    QuasiSystem {
        members: ineqs.iter().enumerate().map(|(k, i)| first_approximation_member(i, k)).collect(),
        fresh_counter: 0,
        mode,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sort {
    Nom,
    CoNom,
}

struct Fresh<'a> {
    taken: BTreeSet<String>,
    counter: &'a mut u32,
    made: Vec<Var>,
}

impl<'a> Fresh<'a> {
    fn new(sys: &QuasiSystem, counter: &'a mut u32) -> Self {
        let mut taken = BTreeSet::new();
        for m in &sys.members {
            for v in m.names() {
                taken.insert(v.name().to_string());
            }
        }
        Fresh { taken, counter, made: vec![] }
    }

    fn next(&mut self, sort: Sort) -> Formula {
        loop {
            *self.counter += 1;
            let name = match sort {
                Sort::Nom => format!("j{}", self.counter),
                Sort::CoNom => format!("n{}", self.counter),
            };
            if self.taken.insert(name.clone()) {
                let (v, f) = match sort {
                    Sort::Nom => (Var::Nom(name.clone()), Formula::Nominal(name)),
                    Sort::CoNom => (Var::CoNom(name.clone()), Formula::CoNominal(name)),
                };
                self.made.push(v);
                return f;
            }
        }
    }
}

fn mismatch(rule: &Rule, ineq: &Inequality) -> RuleError {
    RuleError::ShapeMismatch { rule: rule.name(), found: print_inequality(ineq) }
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

/// Rules that rewrite one antecedent inequality in place.
fn rewrite_one(rule: &Rule, ineq: &Inequality, fresh: &mut Fresh) -> Result<Vec<Inequality>, RuleError> {
    use Formula as F;
    let (l, r) = (&ineq.lhs, &ineq.rhs);
    let ie = Inequality::new;
    let out = match (rule, l, r) {
        (Rule::MinusLR, F::CoImplies(chi, psi), _) => vec![ie((**chi).clone(), F::Or(psi.clone(), bx(r.clone())))],
        (Rule::ImpRR, _, F::Implies(chi, psi)) => vec![ie(F::And(bx(l.clone()), chi.clone()), (**psi).clone())],
        (Rule::AndLR(Keep::Left), F::And(chi, psi), _) => vec![ie((**chi).clone(), F::Implies(psi.clone(), bx(r.clone())))],
        (Rule::AndLR(Keep::Right), F::And(chi, psi), _) => vec![ie((**psi).clone(), F::Implies(chi.clone(), bx(r.clone())))],
        (Rule::OrRR(Keep::Right), _, F::Or(chi, psi)) => vec![ie(F::CoImplies(bx(l.clone()), chi.clone()), (**psi).clone())],
        (Rule::OrRR(Keep::Left), _, F::Or(chi, psi)) => vec![ie(F::CoImplies(bx(l.clone()), psi.clone()), (**chi).clone())],
        (Rule::OrLA, F::Or(a, b), _) => vec![ie((**a).clone(), r.clone()), ie((**b).clone(), r.clone())],
        (Rule::AndRA, _, F::And(a, b)) => vec![ie(l.clone(), (**a).clone()), ie(l.clone(), (**b).clone())],
        (Rule::DiaLA, F::Dia(a), _) => vec![ie((**a).clone(), F::BlackBox(bx(r.clone())))],
        (Rule::BoxRA, _, F::Box(a)) => vec![ie(F::BlackDia(bx(l.clone())), (**a).clone())],
        (Rule::BoxAppr, F::Box(psi), F::CoNominal(_)) => {
            let n = fresh.next(Sort::CoNom);
            vec![ie(F::Box(bx(n.clone())), r.clone()), ie((**psi).clone(), n)]
        }
        (Rule::DiaAppr, F::Nominal(_), F::Dia(psi)) => {
            let i = fresh.next(Sort::Nom);
            vec![ie(l.clone(), F::Dia(bx(i.clone()))), ie(i, (**psi).clone())]
        }
        (Rule::ImpAppr, F::Implies(chi, phi), F::CoNominal(_)) => {
            let j = fresh.next(Sort::Nom);
            let n = fresh.next(Sort::CoNom);
            vec![
                ie(F::Implies(bx(j.clone()), bx(n.clone())), r.clone()),
                ie(j, (**chi).clone()),
                ie((**phi).clone(), n),
            ]
        }
        (Rule::MinusAppr, F::Nominal(_), F::CoImplies(chi, phi)) => {
            let j = fresh.next(Sort::Nom);
            let n = fresh.next(Sort::CoNom);
            vec![ie(l.clone(), F::CoImplies(bx(j.clone()), bx(n.clone()))), ie(j, (**chi).clone()), ie((**phi).clone(), n)]
        }
        _ => return Err(mismatch(rule, ineq)),
    };
    Ok(out)
}

/// Certificate licensing a fixed point approximation on `ineq`, if any.
pub fn fixed_point_certificate(rule: &Rule, ineq: &Inequality) -> Result<InnerFormulaCertificate, RuleError> {
    let (body, kind) = match (rule, &ineq.lhs, &ineq.rhs) {
        (Rule::MuAR, Formula::Nominal(_), Formula::MuStar(_, b)) => (b, InnerKind::DiaIF),
        (Rule::NuAR, Formula::NuStar(_, b), Formula::CoNominal(_)) => (b, InnerKind::BoxIF),
        _ => return Err(mismatch(rule, ineq)),
    };
    let cert = recognize_inner(body, kind).map_err(|e| RuleError::NotApplicable { rule: rule.name(), reason: e.to_string() })?;
    if cert.tau.is_empty() {
        return Err(RuleError::NotApplicable { rule: rule.name(), reason: "the body has no placeholders to extract".into() });
    }
    Ok(cert)
}

/// One pure inequality and one side inequality per placeholder.
fn fixed_point_cases(
    rule: &Rule,
    ineq: &Inequality,
    cert: &InnerFormulaCertificate,
    fresh: &mut Fresh,
) -> Vec<(Var, [Inequality; 2])> {
    let mu = *rule == Rule::MuAR;
    let template = cert.instantiated_template();
    let mut out = Vec::new();
    for (k, (x, tk)) in cert.tau.iter().enumerate() {
        // The fresh name is a nominal exactly when the case is join-like.
        let nominal = (*tk == Orient::One) == mu;
        let name = fresh.next(if nominal { Sort::Nom } else { Sort::CoNom });
        let mut m = BTreeMap::new();
        for (l, (y, tl)) in cert.tau.iter().enumerate() {
            let v = if l == k {
                name.clone()
            } else if (*tl == Orient::One) == mu {
                Formula::Bot
            } else {
                Formula::Top
            };
            m.insert(Var::Place(y.clone()), v);
        }
        let body = substitute(&template, &m);
        let phi = cert.bindings[x].clone();
        let (main, side) = match (&ineq.lhs, &ineq.rhs) {
            (_, Formula::MuStar(xn, _)) if mu => {
                (Inequality::new(ineq.lhs.clone(), Formula::MuStar(xn.clone(), bx(body))), side_of(nominal, name.clone(), phi))
            }
            (Formula::NuStar(xn, _), _) => {
                (Inequality::new(Formula::NuStar(xn.clone(), bx(body)), ineq.rhs.clone()), side_of(nominal, name.clone(), phi))
            }
            _ => unreachable!("shape checked by the certificate"),
        };
        out.push((name.as_var().unwrap(), [main, side]));
    }
    out
}

fn side_of(nominal: bool, name: Formula, phi: Formula) -> Inequality {
    if nominal {
        Inequality::new(name, phi)
    } else {
        Inequality::new(phi, name)
    }
}

fn fold(items: Vec<Formula>, join: bool) -> Formula {
    let mut it = items.into_iter();
    let Some(first) = it.next() else {
        return if join { Formula::Bot } else { Formula::Top };
    };
    it.fold(first, |acc, g| if join { Formula::Or(bx(acc), bx(g)) } else { Formula::And(bx(acc), bx(g)) })
}

/// (RA) when `right`, (LA) otherwise.
pub fn apply_ackermann(
    q: &QuasiInequality,
    p: &str,
    right: bool,
    opts: &RuleOptions,
) -> Result<QuasiInequality, RuleError> {
    let rule = if right { Rule::RA(p.to_string()) } else { Rule::LA(p.to_string()) };
    let v = Var::Prop(p.to_string());
    let target = Formula::PropVar(p.to_string());
    let violated = |condition: &str, i: &Inequality| RuleError::SideConditionViolated {
        rule: rule.name(),
        condition: condition.to_string(),
        inequality: print_inequality(i),
    };
    if !q.antecedent.iter().any(|i| i.lhs.contains_prop(p) || i.rhs.contains_prop(p)) {
        return Err(RuleError::NotApplicable { rule: rule.name(), reason: format!("{p} does not occur") });
    }
    let mut alphas = Vec::new();
    // None marks a p-free inequality kept as it is.
    let mut rest: Vec<(Inequality, bool)> = Vec::new();
    for i in &q.antecedent {
        let (l, r) = (&i.lhs, &i.rhs);
        if !l.contains_prop(p) && !r.contains_prop(p) {
            rest.push((i.clone(), false));
            continue;
        }
        let (bound, other) = if right { (r, l) } else { (l, r) };
        if *bound == target && !other.contains_prop(p) {
            let s = syntactic_shape(other);
            if right && !s.closed {
                return Err(violated("a lower bound of p must be syntactically closed", i));
            }
            if !right && !s.open {
                return Err(violated("an upper bound of p must be syntactically open", i));
            }
            alphas.push(other.clone());
            continue;
        }
        let (ls, rs) = (syntactic_shape(l), syntactic_shape(r));
        if right {
            if !is_positive_in(l, &v) || !ls.closed {
                return Err(violated("left-hand side must be positive in p and syntactically closed", i));
            }
            if !is_negative_in(r, &v) || !rs.open {
                return Err(violated("right-hand side must be negative in p and syntactically open", i));
            }
        } else {
            if !is_negative_in(l, &v) || !ls.closed {
                return Err(violated("left-hand side must be negative in p and syntactically closed", i));
            }
            if !is_positive_in(r, &v) || !rs.open {
                return Err(violated("right-hand side must be positive in p and syntactically open", i));
            }
        }
        rest.push((i.clone(), true));
    }
    let value = if right && opts.ackermann_bug { Formula::Bot } else { fold(alphas, right) };
    let mut m = BTreeMap::new();
    m.insert(v, value);
    let antecedent = rest
        .into_iter()
        .map(|(i, subst)| if subst { Inequality::new(substitute(&i.lhs, &m), substitute(&i.rhs, &m)) } else { i })
        .collect();
    Ok(QuasiInequality { exists_vars: q.exists_vars.clone(), antecedent, consequent: q.consequent.clone() })
}

pub fn apply_rule(sys: &QuasiSystem, rule: &Rule, target: Target) -> Result<(QuasiSystem, RuleApplication), RuleError> {
    apply_rule_with(sys, rule, target, &RuleOptions::default())
}

pub fn apply_rule_with(
    sys: &QuasiSystem,
    rule: &Rule,
    target: Target,
    opts: &RuleOptions,
) -> Result<(QuasiSystem, RuleApplication), RuleError> {
    let bad = || RuleError::BadTarget { member: target.member, inequality: target.inequality };
    let member = sys.members.get(target.member).ok_or_else(bad)?;
    let mut next = sys.clone();
    let mut certificate = None;
    let replacement: Vec<QuasiInequality> = match rule {
        Rule::RA(p) | Rule::LA(p) => {
            if target.inequality.is_some() {
                return Err(bad());
            }
            vec![apply_ackermann(member, p, matches!(rule, Rule::RA(_)), opts)?]
        }
        Rule::MuAR | Rule::NuAR => {
            let idx = target.inequality.ok_or_else(bad)?;
            let ineq = member.antecedent.get(idx).ok_or_else(bad)?;
            if sys.mode == Mode::Tame {
                return Err(RuleError::NotApplicable { rule: rule.name(), reason: "tame runs exclude fixed point rules".into() });
            }
            let cert = fixed_point_certificate(rule, ineq)?;
            let mut counter = sys.fresh_counter;
            let mut fresh = Fresh::new(sys, &mut counter);
            let cases = fixed_point_cases(rule, ineq, &cert, &mut fresh);
            drop(fresh);
            next.fresh_counter = counter;
            certificate = Some(cert);
            cases
                .into_iter()
                .map(|(v, pair)| {
                    let mut m = member.clone();
                    m.antecedent.splice(idx..=idx, pair);
                    m.exists_vars.push(v);
                    m
                })
                .collect()
        }
        _ => {
            let idx = target.inequality.ok_or_else(bad)?;
            let ineq = member.antecedent.get(idx).ok_or_else(bad)?;
            let mut counter = sys.fresh_counter;
            let mut fresh = Fresh::new(sys, &mut counter);
            let out = rewrite_one(rule, ineq, &mut fresh)?;
            let made = std::mem::take(&mut fresh.made);
            drop(fresh);
            next.fresh_counter = counter;
            let mut m = member.clone();
            m.antecedent.splice(idx..=idx, out);
            m.exists_vars.extend(made);
            vec![m]
        }
    };
    let produced: Vec<usize> = (target.member..target.member + replacement.len()).collect();
    next.members.splice(target.member..=target.member, replacement.clone());
    Ok((next, RuleApplication { rule: rule.clone(), target, produced, result_members: replacement, certificate }))
}

const LOCAL_RULES: [Rule; 16] = [
    Rule::OrLA,
    Rule::AndRA,
    Rule::BoxAppr,
    Rule::DiaAppr,
    Rule::ImpAppr,
    Rule::MinusAppr,
    Rule::MuAR,
    Rule::NuAR,
    Rule::MinusLR,
    Rule::ImpRR,
    Rule::AndLR(Keep::Left),
    Rule::AndLR(Keep::Right),
    Rule::OrRR(Keep::Left),
    Rule::OrRR(Keep::Right),
    Rule::DiaLA,
    Rule::BoxRA,
];

/// Every rule instance whose premise and side conditions hold in `sys`.
pub fn applicable_rules(sys: &QuasiSystem) -> Vec<(Rule, Target)> {
    let mut out = Vec::new();
    for (mi, member) in sys.members.iter().enumerate() {
        for (ii, ineq) in member.antecedent.iter().enumerate() {
            for rule in LOCAL_RULES.iter() {
                let ok = match rule {
                    Rule::MuAR | Rule::NuAR => sys.mode != Mode::Tame && fixed_point_certificate(rule, ineq).is_ok(),
                    _ => {
                        let mut c = sys.fresh_counter;
                        let mut fresh = Fresh { taken: BTreeSet::new(), counter: &mut c, made: vec![] };
                        rewrite_one(rule, ineq, &mut fresh).is_ok()
                    }
                };
                if ok {
                    out.push((rule.clone(), Target { member: mi, inequality: Some(ii) }));
                }
            }
        }
        let mut props = BTreeSet::new();
        for i in &member.antecedent {
            props.extend(i.prop_vars());
        }
        for p in props {
            for right in [true, false] {
                if apply_ackermann(member, &p, right, &RuleOptions::default()).is_ok() {
                    let rule = if right { Rule::RA(p.clone()) } else { Rule::LA(p.clone()) };
                    out.push((rule, Target { member: mi, inequality: None }));
                }
            }
        }
    }
    out
}

/// Re-applies a recorded trace.
pub fn replay(initial: &QuasiSystem, trace: &[RuleApplication]) -> Result<QuasiSystem, RuleError> {
    let mut sys = initial.clone();
    for step in trace {
        let (next, app) = apply_rule(&sys, &step.rule, step.target)?;
        if app.result_members != step.result_members {
            return Err(RuleError::NotApplicable {
                rule: step.rule.name(),
                reason: "replay produced different members".into(),
            });
        }
        sys = next;
    }
    Ok(sys)
}
