//! Brute-force oracles over finite algebras.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::check::{check_inequality, check_quasi_system};
use super::eval::Compiled;
use super::formula_gen::{random_formula, FormulaConfig};
use super::gen::{random_algebra, RandomAlgebraConfig};
use super::{Elem, FiniteAlgebra};
use crate::classifier::{classify, InnerFormulaCertificate, InnerKind, Level, Orient};
use crate::engine::{
    applicable_rules, apply_rule_with, initial_system, member_text, run, syntactic_shape, Mode, QuasiInequality,
    QuasiSystem, Rule, RuleOptions, RunResult, Target,
};
use crate::syntax::{
    is_negative_in, is_positive_in, parse_inequality, print_formula, print_inequality, star_inequality, substitute_one,
    Formula, Inequality, Var,
};

/// Inputs the acceptance goldens are built on.
pub const RESTRICTED_GOLDEN: &str = "<> mu X. (<>X | []([]<>q | p)) <= nu Y. (([]((q -> F) & (p -> F)) -> F) & []Y)";
pub const TAME_GOLDEN: &str = "<>([]F | p) & []q <= mu Y. (<>(p & q) & []Y)";
pub const TAME_GOLDEN_SECOND: &str = "<>p & []q <= mu Y. (<>(p & q) & []Y)";
pub const INDUCTIVE_EXAMPLE: &str =
    "(mu X. (p | <>X)) & (mu X. (q | <>X)) <= mu X. ((p & mu Y. (q | <>Y)) | <>X)";
pub const PARAMETER_EXAMPLE: &str = "<>[]q <= mu X. (p | ([]F -< q) | <>X)";

fn domain_size(a: &FiniteAlgebra, v: &Var) -> u64 {
    match v {
        Var::Nom(_) => a.jty().len() as u64,
        Var::CoNom(_) => a.mty().len() as u64,
        _ => a.size() as u64,
    }
}

fn member_vars(q: &QuasiInequality) -> BTreeSet<Var> {
    let mut vars: BTreeSet<Var> = q.exists_vars.iter().cloned().collect();
    for i in q.antecedent.iter().chain(std::iter::once(&q.consequent)) {
        vars.extend(i.lhs.free_vars());
        vars.extend(i.rhs.free_vars());
    }
    vars
}

/// Upper bound on the assignments a system check enumerates.
pub fn system_cost(a: &FiniteAlgebra, members: &[QuasiInequality]) -> u64 {
    members
        .iter()
        .map(|q| member_vars(q).iter().fold(1u64, |acc, v| acc.saturating_mul(domain_size(a, v))))
        .fold(0u64, |acc, c| acc.saturating_add(c))
}

pub fn random_algebras(seed: u64, count: usize, max_size: usize) -> Vec<FiniteAlgebra> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RandomAlgebraConfig { max_size, ..RandomAlgebraConfig::default() };
    (0..count)
        .map(|k| {
            let mut a = random_algebra(&mut rng, &cfg);
            a.name = format!("{}#{k}", a.name);
            a
        })
        .collect()
}

// ---------------------------------------------------------------------------
// rule soundness

#[derive(Debug, Clone)]
pub struct SoundnessConfig {
    pub seed: u64,
    pub algebra_count: usize,
    pub max_algebra_size: usize,
    pub walks: usize,
    pub max_steps: usize,
    /// Algebras each application is checked on.
    pub algebras_per_step: usize,
    /// Assignments allowed per system check.
    pub budget: u64,
    pub options: RuleOptions,
}

impl Default for SoundnessConfig {
    fn default() -> Self {
        SoundnessConfig {
            seed: 1,
            algebra_count: 60,
            max_algebra_size: 8,
            walks: 60,
            max_steps: 8,
            algebras_per_step: 10,
            budget: 20_000,
            options: RuleOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub rule: String,
    pub target: Target,
    pub algebra: String,
    pub pre_valid: bool,
    pub post_valid: bool,
    /// Pre-state, shrunk by replacing subformulas with top and bottom.
    pub minimized: Vec<String>,
    pub original: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SoundnessReport {
    pub applications: usize,
    /// Application and algebra pairs compared.
    pub comparisons: usize,
    pub algebras_used: usize,
    pub by_rule: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

fn rule_key(r: &Rule) -> String {
    match r {
        Rule::RA(_) => "RA".into(),
        Rule::LA(_) => "LA".into(),
        Rule::AndLR(_) => "AndLR".into(),
        Rule::OrRR(_) => "OrRR".into(),
        other => format!("{other:?}"),
    }
}

fn texts(sys: &QuasiSystem) -> Vec<String> {
    sys.members.iter().map(member_text).collect()
}

fn positions(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        positions(c, path, out);
        path.pop();
    }
}

fn replace_at(f: &Formula, path: &[usize], g: &Formula) -> Formula {
    match path.split_first() {
        None => g.clone(),
        Some((&i, rest)) => {
            let mut kids: Vec<Formula> = f.children().into_iter().cloned().collect();
            kids[i] = replace_at(&kids[i], rest, g);
            f.with_children(kids)
        }
    }
}

fn disagrees(a: &FiniteAlgebra, pre: &QuasiSystem, rule: &Rule, target: Target, opts: &RuleOptions) -> bool {
    match apply_rule_with(pre, rule, target, opts) {
        Ok((post, _)) => check_quasi_system(a, &pre.members).valid != check_quasi_system(a, &post.members).valid,
        Err(_) => false,
    }
}

/// Greedy shrinking: replace subformulas of the pre-state by top or bottom
/// while the rule still applies and the disagreement persists.
pub fn minimize(a: &FiniteAlgebra, pre: &QuasiSystem, rule: &Rule, target: Target, opts: &RuleOptions) -> QuasiSystem {
    let mut cur = pre.clone();
    let mut rounds = 0;
    'outer: while rounds < 200 {
        rounds += 1;
        for mi in 0..cur.members.len() {
            for ii in 0..cur.members[mi].antecedent.len() {
                for side in 0..2 {
                    let f = {
                        let i = &cur.members[mi].antecedent[ii];
                        if side == 0 { i.lhs.clone() } else { i.rhs.clone() }
                    };
                    let mut ps = Vec::new();
                    positions(&f, &mut vec![], &mut ps);
                    for p in ps {
                        for c in [Formula::Top, Formula::Bot] {
                            let g = replace_at(&f, &p, &c);
                            if g == f || g.size() >= f.size() && p.is_empty() && matches!(f, Formula::Top | Formula::Bot) {
                                continue;
                            }
                            let mut cand = cur.clone();
                            let i = &mut cand.members[mi].antecedent[ii];
                            if side == 0 {
                                i.lhs = g;
                            } else {
                                i.rhs = g;
                            }
                            if disagrees(a, &cand, rule, target, opts) {
                                cur = cand;
                                continue 'outer;
                            }
                        }
                    }
                }
            }
        }
        break;
    }
    cur
}

/// Star-free starting points: first approximations of random inequalities
/// together with the worked examples.
fn walk_start(rng: &mut ChaCha8Rng, k: usize) -> QuasiSystem {
    let fixed = [RESTRICTED_GOLDEN, TAME_GOLDEN_SECOND, INDUCTIVE_EXAMPLE, PARAMETER_EXAMPLE];
    let ineq = if k < fixed.len() * 2 {
        parse_inequality(fixed[k % fixed.len()]).unwrap()
    } else {
        let cfg = FormulaConfig::l1(&["p", "q"], 3);
        Inequality::new(random_formula(rng, &cfg), random_formula(rng, &cfg))
    };
    let s = star_inequality(&ineq).unwrap_or(ineq);
    initial_system(&[s], if rng.gen_bool(0.8) { Mode::Proper } else { Mode::Tame })
}

fn check_step(
    report: &mut SoundnessReport,
    pool: &[&FiniteAlgebra],
    pre: &QuasiSystem,
    pre_valid: &[Option<bool>],
    post: &QuasiSystem,
    rule: &Rule,
    target: Target,
    cfg: &SoundnessConfig,
) -> Vec<Option<bool>> {
    report.applications += 1;
    *report.by_rule.entry(rule_key(rule)).or_default() += 1;
    let mut out = Vec::with_capacity(pool.len());
    for (a, pv) in pool.iter().zip(pre_valid) {
        let Some(pv) = *pv else {
            out.push(None);
            continue;
        };
        if system_cost(a, &post.members) > cfg.budget {
            out.push(None);
            continue;
        }
        let qv = check_quasi_system(a, &post.members).valid;
        report.comparisons += 1;
        if pv != qv {
            let m = minimize(a, pre, rule, target, &cfg.options);
            report.violations.push(Violation {
                rule: rule.name(),
                target,
                algebra: a.name.clone(),
                pre_valid: pv,
                post_valid: qv,
                minimized: texts(&m),
                original: texts(pre),
            });
        }
        out.push(Some(qv));
    }
    out
}

fn validity(pool: &[&FiniteAlgebra], sys: &QuasiSystem, budget: u64) -> Vec<Option<bool>> {
    pool.iter()
        .map(|a| (system_cost(a, &sys.members) <= budget).then(|| check_quasi_system(a, &sys.members).valid))
        .collect()
}

/// Random rule walks plus the steps of strategy-driven runs, each step
/// compared on a sample of random algebras.
pub fn rule_soundness(cfg: &SoundnessConfig) -> SoundnessReport {
    let algebras = random_algebras(cfg.seed, cfg.algebra_count, cfg.max_algebra_size);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut report = SoundnessReport::default();
    let mut used = BTreeSet::new();
    if algebras.is_empty() {
        return report;
    }
    for k in 0..cfg.walks {
        let pool: Vec<&FiniteAlgebra> = {
            let mut idx: Vec<usize> = (0..algebras.len()).collect();
            idx.shuffle(&mut rng);
            idx.truncate(cfg.algebras_per_step.max(1));
            idx.into_iter().map(|i| &algebras[i]).collect()
        };
        let mut sys = walk_start(&mut rng, k);
        let mut valid = validity(&pool, &sys, cfg.budget);
        for _ in 0..cfg.max_steps {
            let apps = applicable_rules(&sys);
            if apps.is_empty() || valid.iter().all(|v| v.is_none()) {
                break;
            }
            // Favour the rare rules so every kind gets exercised.
            let rare: Vec<&(Rule, Target)> =
                apps.iter().filter(|(r, _)| matches!(r, Rule::MuAR | Rule::NuAR | Rule::RA(_) | Rule::LA(_))).collect();
            let (rule, target) = if !rare.is_empty() && rng.gen_bool(0.5) {
                (*rare.choose(&mut rng).unwrap()).clone()
            } else {
                apps.choose(&mut rng).unwrap().clone()
            };
            let Ok((next, _)) = apply_rule_with(&sys, &rule, target, &cfg.options) else {
                break;
            };
            for (a, v) in pool.iter().zip(&valid) {
                if v.is_some() {
                    used.insert(a.name.clone());
                }
            }
            valid = check_step(&mut report, &pool, &sys, &valid, &next, &rule, target, cfg);
            sys = next;
        }
    }
    report.algebras_used = used.len();
    report
}

/// Checks every step of a strategy-driven run on the given algebras.
pub fn trace_soundness(r: &RunResult, algebras: &[&FiniteAlgebra], cfg: &SoundnessConfig) -> SoundnessReport {
    let mut report = SoundnessReport::default();
    let mut sys = r.initial.clone();
    let mut valid = validity(algebras, &sys, cfg.budget);
    for step in &r.trace {
        let Ok((next, _)) = apply_rule_with(&sys, &step.rule, step.target, &cfg.options) else {
            break;
        };
        valid = check_step(&mut report, algebras, &sys, &valid, &next, &step.rule, step.target, cfg);
        sys = next;
    }
    report
}

// ---------------------------------------------------------------------------
// Ackermann lemma

#[derive(Debug, Clone, Serialize)]
pub struct AckermannCase {
    pub right: bool,
    pub alphas: Vec<String>,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AckermannReport {
    pub triples: usize,
    pub right: usize,
    pub left: usize,
    pub algebra_checks: usize,
    pub failures: Vec<(AckermannCase, String)>,
}

fn sample(rng: &mut ChaCha8Rng, cfg: &FormulaConfig, ok: impl Fn(&Formula) -> bool) -> Option<Formula> {
    (0..400).map(|_| random_formula(rng, cfg)).find(|f| ok(f))
}

/// Random bounds and inequalities meeting the side conditions of (RA) when
/// `right`, of (LA) otherwise.
pub fn ackermann_case(rng: &mut ChaCha8Rng, right: bool) -> Option<(Vec<Formula>, Vec<(Formula, Formula)>)> {
    let p = Var::Prop("p".into());
    let base = FormulaConfig {
        props: vec!["p".into(), "q".into()],
        noms: vec!["j".into()],
        conoms: vec!["n".into()],
        max_depth: 3,
        binders: true,
        starred: true,
        black: true,
        residuals: true,
    };
    let free = FormulaConfig { props: vec!["q".into()], ..base.clone() };
    let n_alpha = rng.gen_range(0..=2);
    let n_pairs = rng.gen_range(1..=2);
    let closed = |f: &Formula| syntactic_shape(f).closed;
    let open = |f: &Formula| syntactic_shape(f).open;
    let mut alphas = Vec::new();
    for _ in 0..n_alpha {
        alphas.push(sample(rng, &free, |f| if right { closed(f) } else { open(f) })?);
    }
    let mut pairs = Vec::new();
    for _ in 0..n_pairs {
        let (l, r) = if right {
            (
                sample(rng, &base, |f| closed(f) && is_positive_in(f, &p))?,
                sample(rng, &base, |f| open(f) && is_negative_in(f, &p) && f.contains_prop("p"))?,
            )
        } else {
            (
                sample(rng, &base, |f| closed(f) && is_negative_in(f, &p) && f.contains_prop("p"))?,
                sample(rng, &base, |f| open(f) && is_positive_in(f, &p))?,
            )
        };
        pairs.push((l, r));
    }
    Some((alphas, pairs))
}

/// `exists a [alphas <= a & pairs(a)]` against `pairs(join alphas)` (and
/// dually), for every assignment of the remaining variables.
pub fn check_ackermann_case(
    a: &FiniteAlgebra,
    right: bool,
    alphas: &[Formula],
    pairs: &[(Formula, Formula)],
) -> Result<(), String> {
    let p = Var::Prop("p".into());
    let bound = if right {
        alphas.iter().cloned().reduce(|x, y| Formula::Or(Box::new(x), Box::new(y))).unwrap_or(Formula::Bot)
    } else {
        alphas.iter().cloned().reduce(|x, y| Formula::And(Box::new(x), Box::new(y))).unwrap_or(Formula::Top)
    };
    let mut fs: Vec<Formula> = alphas.to_vec();
    for (l, r) in pairs {
        fs.push(l.clone());
        fs.push(r.clone());
    }
    for (l, r) in pairs {
        fs.push(substitute_one(l, &p, &bound));
        fs.push(substitute_one(r, &p, &bound));
    }
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    for f in &fs {
        vars.extend(f.free_vars());
    }
    vars.insert(p.clone());
    vars.remove(&p);
    let mut order: Vec<Var> = vec![p.clone()];
    order.extend(vars.iter().cloned());
    let refs: Vec<&Formula> = fs.iter().collect();
    let c = Compiled::with_vars(&refs, order.clone());
    let doms: Vec<Vec<Elem>> = order[1..]
        .iter()
        .map(|v| match v {
            Var::Nom(_) => a.jty().to_vec(),
            Var::CoNom(_) => a.mty().to_vec(),
            _ => a.elements().collect(),
        })
        .collect();
    if doms.iter().any(|d| d.is_empty()) {
        return Ok(());
    }
    let na = alphas.len();
    let np = pairs.len();
    let mut idx = vec![0usize; doms.len()];
    let mut env = vec![0; c.slot_count()];
    loop {
        for (k, d) in doms.iter().enumerate() {
            env[k + 1] = d[idx[k]];
        }
        // The p slot is irrelevant for the alphas and the substituted pairs.
        let alpha_vals: Vec<Elem> = (0..na).map(|i| c.eval_root(a, i, &mut env)).collect();
        let mut exists = false;
        for x in a.elements() {
            let bounded = alpha_vals.iter().all(|&v| if right { a.leq(v, x) } else { a.leq(x, v) });
            if !bounded {
                continue;
            }
            env[0] = x;
            let holds = (0..np).all(|k| {
                let l = c.eval_root(a, na + 2 * k, &mut env);
                let r = c.eval_root(a, na + 2 * k + 1, &mut env);
                a.leq(l, r)
            });
            if holds {
                exists = true;
                break;
            }
        }
        let subst = (0..np).all(|k| {
            let l = c.eval_root(a, na + 2 * np + 2 * k, &mut env);
            let r = c.eval_root(a, na + 2 * np + 2 * k + 1, &mut env);
            a.leq(l, r)
        });
        if exists != subst {
            let at: Vec<String> = order[1..]
                .iter()
                .zip(&idx)
                .zip(&doms)
                .map(|((v, &i), d)| format!("{v}={}", a.element_name(d[i])))
                .collect();
            return Err(format!("on {} at {}: bounded solution {exists}, substitution {subst}", a.name, at.join(", ")));
        }
        let mut k = doms.len();
        loop {
            if k == 0 {
                return Ok(());
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

pub fn ackermann_lemma(seed: u64, triples: usize, algebras: &[FiniteAlgebra]) -> AckermannReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AckermannReport::default();
    let mut made = 0;
    let mut attempts = 0;
    while made < triples && attempts < triples * 20 {
        attempts += 1;
        let right = made % 2 == 0;
        let Some((alphas, pairs)) = ackermann_case(&mut rng, right) else {
            continue;
        };
        made += 1;
        if right {
            report.right += 1;
        } else {
            report.left += 1;
        }
        for a in algebras {
            report.algebra_checks += 1;
            if let Err(e) = check_ackermann_case(a, right, &alphas, &pairs) {
                let case = AckermannCase {
                    right,
                    alphas: alphas.iter().map(print_formula).collect(),
                    pairs: pairs.iter().map(|(l, r)| (print_formula(l), print_formula(r))).collect(),
                };
                report.failures.push((case, e));
            }
        }
    }
    report.triples = made;
    report
}

// ---------------------------------------------------------------------------
// inner formula preservation

/// Complete join preservation (meet preservation for box-inner formulas) of
/// the certificate's template in its placeholders and free fixed point
/// variables, checked on the empty join and all binary joins.
pub fn check_certificate(a: &FiniteAlgebra, cert: &InnerFormulaCertificate) -> Result<(), String> {
    let f = cert.instantiated_template();
    let mut coords: Vec<(Var, Orient)> = cert.tau.iter().map(|(x, o)| (Var::Place(x.clone()), *o)).collect();
    coords.extend(cert.fix_vars.iter().map(|x| (Var::Fix(x.clone()), Orient::One)));
    let cset: BTreeSet<Var> = coords.iter().map(|(v, _)| v.clone()).collect();
    let others: Vec<Var> = f.free_vars().into_iter().filter(|v| !cset.contains(v)).collect();
    let mut order: Vec<Var> = coords.iter().map(|(v, _)| v.clone()).collect();
    order.extend(others.iter().cloned());
    let c = Compiled::with_vars(&[&f], order);
    let join_like = cert.kind == InnerKind::DiaIF;
    let k = coords.len();
    let elems: Vec<Elem> = a.elements().collect();
    let other_doms: Vec<Vec<Elem>> = others
        .iter()
        .map(|v| match v {
            Var::Nom(_) => a.jty().to_vec(),
            Var::CoNom(_) => a.mty().to_vec(),
            _ => elems.clone(),
        })
        .collect();
    // op on coordinate i: join in C for One under DiaIF, and so on.
    let combine = |o: Orient, x: Elem, y: Elem| {
        if (o == Orient::One) == join_like {
            a.join(x, y)
        } else {
            a.meet(x, y)
        }
    };
    let unit = |o: Orient| if (o == Orient::One) == join_like { a.bot() } else { a.top() };
    let total = elems.len().pow(k as u32);
    let tuple = |mut n: usize| -> Vec<Elem> {
        (0..k)
            .map(|_| {
                let e = elems[n % elems.len()];
                n /= elems.len();
                e
            })
            .collect()
    };
    let mut oidx = vec![0usize; others.len()];
    if other_doms.iter().any(|d| d.is_empty()) {
        return Ok(());
    }
    loop {
        let ovals: Vec<Elem> = other_doms.iter().zip(&oidx).map(|(d, &i)| d[i]).collect();
        let ev = |t: &[Elem]| {
            let mut vals = t.to_vec();
            vals.extend(&ovals);
            c.eval(a, &vals)
        };
        let units: Vec<Elem> = coords.iter().map(|(_, o)| unit(*o)).collect();
        let target = if join_like { a.bot() } else { a.top() };
        if ev(&units) != target {
            return Err(format!("{} fails the empty {} on {}", print_formula(&f), if join_like { "join" } else { "meet" }, a.name));
        }
        let vals: Vec<Elem> = (0..total).map(|n| ev(&tuple(n))).collect();
        for u in 0..total {
            let tu = tuple(u);
            for v in u + 1..total {
                let tv = tuple(v);
                let w: Vec<Elem> = (0..k).map(|i| combine(coords[i].1, tu[i], tv[i])).collect();
                let expect = if join_like { a.join(vals[u], vals[v]) } else { a.meet(vals[u], vals[v]) };
                if ev(&w) != expect {
                    return Err(format!("{} fails binary preservation on {}", print_formula(&f), a.name));
                }
            }
        }
        let mut j = others.len();
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            oidx[j] += 1;
            if oidx[j] < other_doms[j].len() {
                break;
            }
            oidx[j] = 0;
        }
    }
}

pub fn golden_certificates() -> Vec<(String, InnerFormulaCertificate)> {
    let mut out = Vec::new();
    for src in [RESTRICTED_GOLDEN, TAME_GOLDEN, INDUCTIVE_EXAMPLE, PARAMETER_EXAMPLE] {
        let r = run(&parse_inequality(src).unwrap(), Mode::Proper);
        for step in &r.trace {
            if let Some(c) = &step.certificate {
                out.push((src.to_string(), c.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// end to end

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceRow {
    pub algebra: String,
    pub input_valid: bool,
    pub output_valid: bool,
}

/// Input validity against validity of the pure output, per algebra.
pub fn end_to_end(input: &Inequality, result: &RunResult, algebras: &[FiniteAlgebra]) -> Option<Vec<EquivalenceRow>> {
    let pure = result.pure_system()?;
    Some(
        algebras
            .iter()
            .map(|a| EquivalenceRow {
                algebra: a.name.clone(),
                input_valid: check_inequality(a, input).valid,
                output_valid: check_quasi_system(a, &pure.members).valid,
            })
            .collect(),
    )
}

/// Random inequalities that classify as restricted or tame inductive and on
/// which a run succeeds with a pure system cheap enough to enumerate.
pub fn random_inductive_inputs(seed: u64, count: usize, algebras: &[FiniteAlgebra], budget: u64) -> Vec<Inequality> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Inequality> = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 200_000 {
        tries += 1;
        let props: &[&str] = if rng.gen_bool(0.5) { &["p"] } else { &["p", "q"] };
        let cfg = FormulaConfig::l1(props, rng.gen_range(2..=4));
        let i = Inequality::new(random_formula(&mut rng, &cfg), random_formula(&mut rng, &cfg));
        let both = |f: &Formula| f.any(&|g: &Formula| g.is_binder()) || f.any(&|g: &Formula| matches!(g, Formula::Box(_) | Formula::Dia(_)));
        let live = |g: &Formula| g.binder().is_some_and(|(x, b)| b.free_fix_vars().contains(x) && b.has_prop_vars());
        let binder = i.lhs.any(&live) || i.rhs.any(&live);
        let shared = i.lhs.prop_vars().intersection(&i.rhs.prop_vars()).count() > 0;
        if !binder || !shared || !both(&i.lhs) || !both(&i.rhs) || i.lhs.size() + i.rhs.size() < 8 || out.contains(&i) {
            continue;
        }
        let Ok(c) = classify(&i) else { continue };
        if c.level < Level::RestrictedInductive {
            continue;
        }
        let r = run(&i, Mode::Auto);
        let Some(pure) = r.pure_system() else { continue };
        if algebras.iter().any(|a| system_cost(a, &pure.members) > budget) {
            continue;
        }
        out.push(i);
    }
    out
}

pub fn describe_inputs(is: &[Inequality]) -> Vec<String> {
    is.iter().map(print_inequality).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::battery;

    #[test]
    fn certificates_preserve_joins() {
        let certs = golden_certificates();
        assert!(certs.len() >= 3, "{}", certs.len());
        for a in battery().iter().chain(&random_algebras(3, 10, 6)) {
            for (src, c) in &certs {
                check_certificate(a, c).unwrap_or_else(|e| panic!("{src}: {e}"));
            }
        }
    }

    #[test]
    fn non_inner_template_is_caught() {
        let mut c = golden_certificates().remove(0).1;
        c.template = Formula::Box(Box::new(c.template.clone()));
        c.kind = InnerKind::DiaIF;
        assert!(battery().iter().any(|a| check_certificate(a, &c).is_err()));
    }

    #[test]
    fn small_walk_is_sound() {
        let cfg = SoundnessConfig { walks: 12, algebra_count: 10, algebras_per_step: 3, ..SoundnessConfig::default() };
        let r = rule_soundness(&cfg);
        assert!(r.applications > 20);
        assert!(r.violations.is_empty(), "{:#?}", r.violations);
    }

    #[test]
    fn injected_bug_is_found() {
        let cfg = SoundnessConfig {
            walks: 30,
            algebra_count: 10,
            algebras_per_step: 4,
            options: RuleOptions { ackermann_bug: true },
            ..SoundnessConfig::default()
        };
        let r = rule_soundness(&cfg);
        assert!(r.violations.iter().any(|v| v.rule.starts_with("(RA)")), "{:?}", r.by_rule);
    }

    #[test]
    fn ackermann_small() {
        let algs = random_algebras(5, 4, 5);
        let r = ackermann_lemma(9, 20, &algs);
        assert_eq!(r.triples, 20);
        assert!(r.failures.is_empty(), "{:#?}", r.failures);
    }
}
