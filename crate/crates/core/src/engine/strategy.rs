use std::collections::BTreeSet;

use super::preprocess::preprocess;
use super::rules::{apply_rule_with, fixed_point_certificate, first_approximation_member, RuleOptions};
use super::types::{Keep, Mode, QuasiSystem, Rule, RuleApplication, RunKind, RunResult, RunStatus, Target};
use crate::classifier::{all_order_types, classify, OrderType, Orient};
use crate::syntax::{polarity_of_occurrences, print_inequality, star_inequality, Formula, Inequality, Polarity, Var};

pub const STEP_LIMIT: usize = 10_000;

/// Order type and dependency order steering one member.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Guide {
    eps: OrderType,
    omega: Vec<(String, String)>,
}

enum Action {
    Ready,
    Apply(Rule),
    Stuck(String),
}

fn orient(eps: &OrderType, p: &str) -> Orient {
    eps.get(p).copied().unwrap_or(Orient::One)
}

/// Whether `f`, read with `sign`, has an occurrence `+p` with `p` of order
/// type 1 or `-p` with `p` of order type dual.
fn critical(f: &Formula, sign: Polarity, eps: &OrderType) -> bool {
    f.prop_vars().iter().any(|p| {
        polarity_of_occurrences(f, &Var::Prop(p.clone())).into_iter().any(|pol| {
            let s = if pol == Polarity::Positive { sign } else { sign.flip() };
            (s == Polarity::Positive) == (orient(eps, p) == Orient::One)
        })
    })
}

fn fixed_point(rule: Rule, ineq: &Inequality) -> Action {
    match fixed_point_certificate(&rule, ineq) {
        Ok(_) => Action::Apply(rule),
        Err(e) => Action::Stuck(e.to_string()),
    }
}

fn action(ineq: &Inequality, eps: &OrderType, mode: Mode) -> Action {
    use Formula as F;
    let (l, r) = (&ineq.lhs, &ineq.rhs);
    let cl = critical(l, Polarity::Negative, eps);
    let cr = critical(r, Polarity::Positive, eps);
    let tame = mode == Mode::Tame;
    let stuck = |s: &str| Action::Stuck(s.to_string());
    match (cl, cr) {
        (false, false) => {
            // Binders left over by the critical analysis still get approximated in proper runs.
            let rule = match (l, r) {
                (F::Nominal(_), F::MuStar(..)) if !tame && !r.is_pure() => Rule::MuAR,
                (F::NuStar(..), F::CoNominal(_)) if !tame && !l.is_pure() => Rule::NuAR,
                _ => return Action::Ready,
            };
            match fixed_point(rule, ineq) {
                a @ Action::Apply(_) => a,
                _ => Action::Ready,
            }
        }
        (true, true) => stuck("critical occurrences on both sides"),
        (false, true) => match r {
            F::PropVar(_) => Action::Ready,
            F::And(..) => Action::Apply(Rule::AndRA),
            F::Box(_) => Action::Apply(Rule::BoxRA),
            F::Implies(..) => Action::Apply(Rule::ImpRR),
            F::Or(a, b) => match (critical(a, Polarity::Positive, eps), critical(b, Polarity::Positive, eps)) {
                (true, true) => stuck("both disjuncts are critical"),
                (true, false) => Action::Apply(Rule::OrRR(Keep::Left)),
                _ => Action::Apply(Rule::OrRR(Keep::Right)),
            },
            F::Dia(_) if matches!(l, F::Nominal(_)) => Action::Apply(Rule::DiaAppr),
            F::CoImplies(..) if matches!(l, F::Nominal(_)) => Action::Apply(Rule::MinusAppr),
            F::MuStar(..) if tame => stuck("a fixed point binder lies on a critical branch"),
            F::MuStar(..) if matches!(l, F::Nominal(_)) => fixed_point(Rule::MuAR, ineq),
            _ => stuck("no rule isolates the critical occurrence on the right"),
        },
        (true, false) => match l {
            F::PropVar(_) => Action::Ready,
            F::Or(..) => Action::Apply(Rule::OrLA),
            F::Dia(_) => Action::Apply(Rule::DiaLA),
            F::CoImplies(..) => Action::Apply(Rule::MinusLR),
            F::And(a, b) => match (critical(a, Polarity::Negative, eps), critical(b, Polarity::Negative, eps)) {
                (true, true) => stuck("both conjuncts are critical"),
                (true, false) => Action::Apply(Rule::AndLR(Keep::Left)),
                _ => Action::Apply(Rule::AndLR(Keep::Right)),
            },
            F::Box(_) if matches!(r, F::CoNominal(_)) => Action::Apply(Rule::BoxAppr),
            F::Implies(..) if matches!(r, F::CoNominal(_)) => Action::Apply(Rule::ImpAppr),
            F::NuStar(..) if tame => stuck("a fixed point binder lies on a critical branch"),
            F::NuStar(..) if matches!(r, F::CoNominal(_)) => fixed_point(Rule::NuAR, ineq),
            _ => stuck("no rule isolates the critical occurrence on the left"),
        },
    }
}

struct Drive {
    system: QuasiSystem,
    trace: Vec<RuleApplication>,
    status: RunStatus,
}

fn ackermann_order(props: BTreeSet<String>, guide: &Guide) -> Vec<(String, bool)> {
    let below = |p: &String| guide.omega.iter().filter(|(_, b)| b == p).count();
    let mut vars: Vec<String> = props.into_iter().collect();
    vars.sort_by(|a, b| below(a).cmp(&below(b)).then(a.cmp(b)));
    let mut out = Vec::new();
    for p in vars {
        let right = orient(&guide.eps, &p) == Orient::One;
        out.push((p.clone(), right));
        out.push((p, !right));
    }
    out
}

fn drive(mut system: QuasiSystem, mut guides: Vec<Guide>, opts: &RuleOptions) -> Drive {
    let mut trace = Vec::new();
    let stuck = |member: usize, inequality: Option<&Inequality>, reason: String| RunStatus::Stuck {
        member,
        inequality: inequality.map(print_inequality),
        reason,
    };
    loop {
        let Some(mi) = system.members.iter().position(|m| !m.is_pure()) else {
            return Drive { system, trace, status: RunStatus::Success };
        };
        if trace.len() >= STEP_LIMIT {
            return Drive { system, trace, status: stuck(mi, None, format!("step limit of {STEP_LIMIT} reached")) };
        }
        let member = &system.members[mi];
        let guide = guides[mi].clone();
        let mut best: Option<(Rule, usize)> = None;
        for (ii, ineq) in member.antecedent.iter().enumerate() {
            match action(ineq, &guide.eps, system.mode) {
                Action::Ready => {}
                Action::Stuck(reason) => {
                    let st = stuck(mi, Some(ineq), reason);
                    return Drive { system, trace, status: st };
                }
                Action::Apply(rule) => {
                    if best.as_ref().is_none_or(|(b, _)| rule.class() > b.class()) {
                        best = Some((rule, ii));
                    }
                }
            }
        }
        let step = match best {
            Some((rule, ii)) => apply_rule_with(&system, &rule, Target { member: mi, inequality: Some(ii) }, opts)
                .map_err(|e| stuck(mi, Some(&member.antecedent[ii]), e.to_string())),
            None => {
                let mut props = BTreeSet::new();
                for i in &member.antecedent {
                    props.extend(i.prop_vars());
                }
                let names: Vec<String> = props.iter().cloned().collect();
                ackermann_order(props, &guide)
                    .into_iter()
                    .find_map(|(p, right)| {
                        let rule = if right { Rule::RA(p) } else { Rule::LA(p) };
                        apply_rule_with(&system, &rule, Target { member: mi, inequality: None }, opts).ok()
                    })
                    .ok_or_else(|| stuck(mi, None, format!("no Ackermann rule applies to any of {}", names.join(", "))))
            }
        };
        match step {
            Ok((next, app)) => {
                let extra = app.produced.len() - 1;
                for _ in 0..extra {
                    guides.insert(mi, guide.clone());
                }
                system = next;
                trace.push(app);
            }
            Err(status) => return Drive { system, trace, status },
        }
    }
}

fn candidate_guides(ineq: &Inequality) -> Vec<Guide> {
    let mut out: Vec<Guide> = Vec::new();
    if let Ok(c) = classify(ineq) {
        for w in c.witnesses {
            if !out.iter().any(|g| g.eps == w.epsilon) {
                out.push(Guide { eps: w.epsilon, omega: w.omega });
            }
        }
    }
    for eps in all_order_types(&ineq.prop_vars()) {
        if !out.iter().any(|g| g.eps == eps) {
            out.push(Guide { eps, omega: vec![] });
        }
    }
    out
}

fn outermost_binders(f: &Formula, out: &mut usize) {
    if f.is_binder() {
        *out += 1;
    } else {
        for c in f.children() {
            outermost_binders(c, out);
        }
    }
}

fn run_kind(final_system: &QuasiSystem, trace: &[RuleApplication]) -> RunKind {
    let fp: Vec<&RuleApplication> = trace.iter().filter(|a| matches!(a.rule, Rule::MuAR | Rule::NuAR)).collect();
    if fp.is_empty() {
        return RunKind::TameRun;
    }
    // Main inequalities created by the fixed point rules.
    let mut handled = BTreeSet::new();
    for a in &fp {
        let idx = a.target.inequality.unwrap_or(0);
        for m in &a.result_members {
            if let Some(i) = m.antecedent.get(idx) {
                handled.insert(i.clone());
            }
        }
    }
    let leftover = final_system.members.iter().flat_map(|m| m.antecedent.iter()).any(|i| {
        let mut n = 0;
        outermost_binders(&i.lhs, &mut n);
        outermost_binders(&i.rhs, &mut n);
        n > 0 && !handled.contains(i)
    });
    if leftover {
        RunKind::Mixed
    } else {
        RunKind::ProperRun
    }
}

fn attempt(input: &Inequality, preprocessed: &[Inequality], mode: Mode, opts: &RuleOptions) -> RunResult {
    let mut starred = Vec::new();
    for i in preprocessed {
        match star_inequality(i) {
            Ok(s) => starred.push(s),
            Err(e) => {
                let initial = QuasiSystem { members: vec![], fresh_counter: 0, mode };
                return RunResult {
                    input: input.clone(),
                    mode,
                    mode_used: mode,
                    preprocessed: preprocessed.to_vec(),
                    initial: initial.clone(),
                    status: RunStatus::Stuck { member: 0, inequality: Some(print_inequality(i)), reason: e.to_string() },
                    final_system: initial,
                    trace: vec![],
                    run_kind: RunKind::TameRun,
                    guides: vec![],
                };
            }
        }
    }
    let mut chosen = Vec::new();
    for (k, (orig, s)) in preprocessed.iter().zip(&starred).enumerate() {
        let cands = candidate_guides(orig);
        let single = QuasiSystem { members: vec![first_approximation_member(s, k)], fresh_counter: 0, mode };
        let pick = cands
            .iter()
            .find(|g| drive(single.clone(), vec![(*g).clone()], opts).status == RunStatus::Success)
            .unwrap_or(&cands[0]);
        chosen.push(pick.clone());
    }
    let initial = QuasiSystem {
        members: starred.iter().enumerate().map(|(k, s)| first_approximation_member(s, k)).collect(),
        fresh_counter: 0,
        mode,
    };
    let d = drive(initial.clone(), chosen.clone(), opts);
    RunResult {
        input: input.clone(),
        mode,
        mode_used: mode,
        preprocessed: preprocessed.to_vec(),
        initial,
        run_kind: run_kind(&d.system, &d.trace),
        status: d.status,
        final_system: d.system,
        trace: d.trace,
        guides: chosen.into_iter().map(|g| g.eps).collect(),
    }
}

pub fn run(ineq: &Inequality, mode: Mode) -> RunResult {
    run_with(ineq, mode, &RuleOptions::default())
}

pub fn run_with(ineq: &Inequality, mode: Mode, opts: &RuleOptions) -> RunResult {
    let pre = preprocess(ineq);
    match mode {
        Mode::Tame | Mode::Proper => attempt(ineq, &pre, mode, opts),
        Mode::Auto => {
            let tame = attempt(ineq, &pre, Mode::Tame, opts);
            let mut r = if tame.succeeded() { tame } else { attempt(ineq, &pre, Mode::Proper, opts) };
            r.mode = Mode::Auto;
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_inequality, print_inequality};

    fn ants(r: &RunResult, k: usize) -> Vec<String> {
        r.final_system.members[k].antecedent.iter().map(print_inequality).collect()
    }

    #[test]
    fn restricted_golden() {
        let i = parse_inequality("<> mu X. (<>X | []([]<>q | p)) <= nu Y. (([]((q -> F) & (p -> F)) -> F) & []Y)").unwrap();
        let r = run(&i, Mode::Proper);
        assert!(r.succeeded(), "{:?}", r.status);
        assert_eq!(r.run_kind, RunKind::ProperRun);
        let names: Vec<String> = r.trace.iter().map(|a| a.rule.name()).collect();
        assert_eq!(
            names,
            [
                "(<>Appr)", "(mu-A-R)", "(nu-A-R)", "([]RA)", "(|RR)", "([]RA)", "(&RA)", "(->RR)",
                "(&LR, right conjunct)", "(LA) on q", "(RA) on p"
            ]
        );
        assert_eq!(
            ants(&r, 0),
            [
                "$i0 <= <>$j1",
                "$j1 <= mu* X.(<>X | $j2)",
                "nu* Y.(($j3 -> F) & []Y) <= #m0",
                "<b>$j3 <= (<b>$j2 -< []<>(<b>$j3 -> F)) -> F"
            ]
        );
        assert!(!run(&i, Mode::Tame).succeeded());
    }

    #[test]
    fn tame_golden() {
        let i = parse_inequality("<>p & []q <= mu Y. (<>(p & q) & []Y)").unwrap();
        let r = run(&i, Mode::Tame);
        assert!(r.succeeded(), "{:?}", r.status);
        assert_eq!(r.run_kind, RunKind::TameRun);
        assert_eq!(ants(&r, 0), ["$i0 <= <>$j1", "mu* Y.(<>($j1 & <b>$i0) & []Y) <= #m0"]);
        let full = parse_inequality("<>([]F | p) & []q <= mu Y. (<>(p & q) & []Y)").unwrap();
        let r = run(&full, Mode::Auto);
        assert!(r.succeeded(), "{:?}", r.status);
        assert_eq!(r.mode_used, Mode::Tame);
        assert_eq!(r.final_system.members.len(), 2);
    }

    #[test]
    fn recursive_only_is_stuck_when_tame() {
        let i = parse_inequality("(mu X. (p | <>X)) & (mu X. (q | <>X)) <= mu X. ((p & mu Y. (q | <>Y)) | <>X)").unwrap();
        let r = run(&i, Mode::Tame);
        assert!(matches!(r.status, RunStatus::Stuck { .. }));
        assert!(r.trace.iter().all(|a| !matches!(a.rule, Rule::MuAR | Rule::NuAR)));
    }
}
