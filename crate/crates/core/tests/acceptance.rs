//! Acceptance suite. Prints one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{canonical_tokens, Naive};
use mustar_alba::algebra::oracle::{
    ackermann_case, ackermann_lemma, check_certificate, check_ackermann_case, golden_certificates, random_algebras,
    random_inductive_inputs, rule_soundness, system_cost, trace_soundness, SoundnessConfig,
};
use mustar_alba::algebra::{battery, check_inequality, check_quasi_system, eval, random_formula, FiniteAlgebra, FormulaConfig};
use mustar_alba::classifier::{classify, InnerFormulaCertificate, InnerKind, Level, Orient};
use mustar_alba::engine::{preprocess, replay, run, Mode, RunKind, RunResult};
use mustar_alba::syntax::{parse_inequality, print_inequality, Formula, Inequality, Var};

const EXAMPLE_ONE: &str = "<> mu X. (<>X | []([]<>q | p)) <= nu Y. (([]((q -> F) & (p -> F)) -> F) & []Y)";
const EXAMPLE_TWO: &str = "<>([]F | p) & []q <= mu Y. (<>(p & q) & []Y)";
const EXAMPLE_THREE: &str = "(mu X. (p | <>X)) & (mu X. (q | <>X)) <= mu X. ((p & mu Y. (q | <>Y)) | <>X)";

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))
}

fn ineq(s: &str) -> Inequality {
    parse_inequality(s).unwrap()
}

fn pure_lines(r: &RunResult, member: usize) -> Vec<String> {
    let m = &r.final_system.members[member];
    let mut v: Vec<String> = m.antecedent.iter().map(print_inequality).collect();
    v.push(print_inequality(&m.consequent));
    v
}

fn replays(r: &RunResult) -> Result<(), String> {
    let s = replay(&r.initial, &r.trace).map_err(|e| e.to_string())?;
    ensure(s == r.final_system, || "replay ends elsewhere".into())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let r = run(&ineq(EXAMPLE_ONE), Mode::Proper);
    within(t, Duration::from_secs(1))?;
    ensure(r.succeeded(), || format!("{:?}", r.status))?;
    ensure(r.final_system.members.len() == 1, || format!("{} members", r.final_system.members.len()))?;
    replays(&r)?;
    // {i <= <>j, j <= mu*X.(<>X | k), nu*Y.([l -> F] & []Y) <= m, <b>l <= (<b>k - []<>(<b>l -> F)) -> F} => i <= m
    let expected: Vec<String> = [
        "$i <= <>$j",
        "$j <= mu* X.(<>X | $k)",
        "nu* Y.(($l -> F) & []Y) <= #m",
        "<b>$l <= (<b>$k -< []<>(<b>$l -> F)) -> F",
        "$i <= #m",
    ]
    .iter()
    .map(|s| print_inequality(&ineq(s)))
    .collect();
    let got = canonical_tokens(&pure_lines(&r, 0));
    let want = canonical_tokens(&expected);
    ensure(got == want, || format!("got {got:?}"))?;
    ensure(r.run_kind == RunKind::ProperRun, || format!("{:?}", r.run_kind))?;
    Ok(format!("{} steps, proper run, {:.1?}", r.trace.len(), t.elapsed()))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let pre: Vec<String> = preprocess(&ineq(EXAMPLE_TWO)).iter().map(print_inequality).collect();
    let want: Vec<String> = ["<>[]F & []q <= mu Y. (<>(F & q) & []Y)", "<>p & []q <= mu Y. (<>(p & q) & []Y)"]
        .iter()
        .map(|s| print_inequality(&ineq(s)))
        .collect();
    ensure(pre == want, || format!("preprocessing gave {pre:?}"))?;
    let r = run(&ineq(&want[1]), Mode::Tame);
    within(t, Duration::from_secs(1))?;
    ensure(r.succeeded(), || format!("{:?}", r.status))?;
    replays(&r)?;
    let expected: Vec<String> = ["$i <= <>$j", "mu* Y.(<>($j & <b>$i) & []Y) <= #m", "$i <= #m"]
        .iter()
        .map(|s| print_inequality(&ineq(s)))
        .collect();
    let got = canonical_tokens(&pure_lines(&r, 0));
    ensure(got == canonical_tokens(&expected), || format!("got {got:?}"))?;
    ensure(r.run_kind == RunKind::TameRun, || format!("{:?}", r.run_kind))?;
    Ok(format!("2 preprocessed inequalities, tame run, {:.1?}", t.elapsed()))
}

type WitnessKey = (Vec<(String, Orient)>, Vec<(String, String)>);

fn witness_set(src: &str) -> (Level, BTreeSet<WitnessKey>, Duration) {
    let t = Instant::now();
    let c = classify(&ineq(src)).unwrap();
    let set = c
        .witnesses
        .iter()
        .map(|w| (w.epsilon.iter().map(|(k, v)| (k.clone(), *v)).collect(), w.omega.clone()))
        .collect();
    (c.level, set, t.elapsed())
}

fn key(eps: &[(&str, Orient)], omega: &[(&str, &str)]) -> WitnessKey {
    (
        eps.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        omega.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    )
}

fn criterion_3() -> Outcome {
    use Orient::{Dual, One};
    let cases: [(&str, Level, BTreeSet<WitnessKey>); 3] = [
        (EXAMPLE_ONE, Level::RestrictedInductive, [key(&[("p", One), ("q", Dual)], &[("q", "p")])].into()),
        (EXAMPLE_TWO, Level::TameInductive, [key(&[("p", One), ("q", One)], &[])].into()),
        // The good-branch conditions also admit the two mixed order types,
        // each with its forced dependency order.
        (
            EXAMPLE_THREE,
            Level::Inductive,
            [
                key(&[("p", One), ("q", One)], &[]),
                key(&[("p", Dual), ("q", One)], &[("q", "p")]),
                key(&[("p", One), ("q", Dual)], &[("p", "q")]),
            ]
            .into(),
        ),
    ];
    let mut slowest = Duration::ZERO;
    for (src, level, want) in cases {
        let (got_level, got, d) = witness_set(src);
        ensure(got_level == level, || format!("{src}: level {got_level:?}"))?;
        ensure(got == want, || format!("{src}: witnesses {got:?}"))?;
        ensure(d < Duration::from_secs(1), || format!("{src}: {d:?}"))?;
        slowest = slowest.max(d);
    }
    let c = classify(&ineq(EXAMPLE_THREE)).unwrap();
    ensure(!c.restricted && !c.tame, || "third example is restricted or tame".into())?;
    Ok(format!("levels and witness sets exact, slowest {slowest:.1?}"))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let cfg = SoundnessConfig { walks: 150, ..SoundnessConfig::default() };
    let mut r = rule_soundness(&cfg);
    let algs = random_algebras(cfg.seed.wrapping_add(100), 12, cfg.max_algebra_size);
    let refs: Vec<&FiniteAlgebra> = algs.iter().collect();
    let mut from_traces = 0;
    for src in [EXAMPLE_ONE, EXAMPLE_TWO, EXAMPLE_THREE] {
        for mode in [Mode::Tame, Mode::Proper] {
            let tr = trace_soundness(&run(&ineq(src), mode), &refs, &cfg);
            from_traces += tr.applications;
            r.violations.extend(tr.violations);
        }
    }
    within(t, Duration::from_secs(60))?;
    ensure(r.violations.is_empty(), || format!("{} violations, first {:?}", r.violations.len(), r.violations[0]))?;
    ensure(r.algebras_used >= 50, || format!("only {} algebras used", r.algebras_used))?;
    ensure(r.applications >= 200, || format!("only {} applications", r.applications))?;
    ensure(algs.iter().all(|a| a.size() <= 8), || "oversized algebra".into())?;
    let kinds = r.by_rule.len();
    ensure(kinds >= 14, || format!("only {kinds} rule kinds exercised: {:?}", r.by_rule))?;
    Ok(format!(
        "{} random applications of {kinds} rule kinds plus {from_traces} trace steps, {} comparisons on {} algebras, {:.1?}",
        r.applications,
        r.comparisons,
        r.algebras_used,
        t.elapsed()
    ))
}

/// The bounded existential checked directly on the reference semantics.
fn naive_ackermann(a: &FiniteAlgebra, right: bool, alphas: &[Formula], pairs: &[(Formula, Formula)]) -> bool {
    let n = Naive::new(a);
    let p = Var::Prop("p".into());
    let mut vars = BTreeSet::new();
    for f in alphas.iter().chain(pairs.iter().flat_map(|(l, r)| [l, r])) {
        vars.extend(f.free_vars());
    }
    vars.remove(&p);
    let vars: Vec<Var> = vars.into_iter().collect();
    n.forall(&vars, &mut |env| {
        let avals: Vec<_> = alphas.iter().map(|f| n.eval(f, env)).collect();
        let bound = if right {
            avals.iter().fold(n.bot(), |x, &y| n.join(x, y))
        } else {
            avals.iter().fold(n.top(), |x, &y| n.meet(x, y))
        };
        let sat = |x| {
            let mut e = env.clone();
            e.insert(p.clone(), x);
            pairs.iter().all(|(l, r)| a.leq(n.eval(l, &e), n.eval(r, &e)))
        };
        let exists = n.els.iter().any(|&x| avals.iter().all(|&v| if right { a.leq(v, x) } else { a.leq(x, v) }) && sat(x));
        exists == sat(bound)
    })
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut algs: Vec<FiniteAlgebra> = battery().into_iter().filter(|a| a.size() <= 6).collect();
    algs.extend(random_algebras(21, 6, 6));
    let r = ackermann_lemma(5, 240, &algs);
    ensure(r.failures.is_empty(), || format!("{} failures, first {:?}", r.failures.len(), r.failures[0]))?;
    ensure(r.right >= 100 && r.left >= 100, || format!("only {} right and {} left triples", r.right, r.left))?;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut cross = 0;
    for k in 0..30 {
        let right = k % 2 == 0;
        let Some((alphas, pairs)) = ackermann_case(&mut rng, right) else { continue };
        for a in algs.iter().filter(|a| a.size() <= 4) {
            let lib = check_ackermann_case(a, right, &alphas, &pairs).is_ok();
            ensure(lib && naive_ackermann(a, right, &alphas, &pairs), || format!("case {k} on {}", a.name))?;
            cross += 1;
        }
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!(
        "{} right and {} left triples on {} algebras, {cross} reference cross-checks, {:.1?}",
        r.right,
        r.left,
        algs.len(),
        t.elapsed()
    ))
}

/// Empty and binary preservation of a certificate on the reference semantics.
fn naive_certificate(a: &FiniteAlgebra, c: &InnerFormulaCertificate) -> bool {
    let n = Naive::new(a);
    let f = c.instantiated_template();
    let mut coords: Vec<(Var, Orient)> = c.tau.iter().map(|(x, o)| (Var::Place(x.clone()), *o)).collect();
    coords.extend(c.fix_vars.iter().map(|x| (Var::Fix(x.clone()), Orient::One)));
    let cvars: BTreeSet<Var> = coords.iter().map(|(v, _)| v.clone()).collect();
    let others: Vec<Var> = f.free_vars().into_iter().filter(|v| !cvars.contains(v)).collect();
    let dia = c.kind == InnerKind::DiaIF;
    let joinish = |o: Orient| (o == Orient::One) == dia;
    let cv: Vec<Var> = coords.iter().map(|(v, _)| v.clone()).collect();
    n.forall(&others, &mut |env| {
        let at = |vals: &Vec<_>| {
            let mut e = env.clone();
            e.extend(cv.iter().cloned().zip(vals.iter().copied()));
            n.eval(&f, &e)
        };
        let units: Vec<_> = coords.iter().map(|(_, o)| if joinish(*o) { n.bot() } else { n.top() }).collect();
        if at(&units) != if dia { n.bot() } else { n.top() } {
            return false;
        }
        let mut tuples: Vec<Vec<_>> = vec![vec![]];
        for _ in &coords {
            tuples = tuples.into_iter().flat_map(|t| n.els.iter().map(move |&e| [t.clone(), vec![e]].concat())).collect();
        }
        tuples.iter().all(|u| {
            tuples.iter().all(|v| {
                let w: Vec<_> =
                    coords.iter().enumerate().map(|(i, (_, o))| if joinish(*o) { n.join(u[i], v[i]) } else { n.meet(u[i], v[i]) }).collect();
                let expect = if dia { n.join(at(u), at(v)) } else { n.meet(at(u), at(v)) };
                at(&w) == expect
            })
        })
    })
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut certs = golden_certificates();
    let sec5 = ineq("$i <= mu* X.(p | ([]F -< q) | <>X)");
    if let Ok(c) = mustar_alba::engine::fixed_point_certificate(&mustar_alba::engine::Rule::MuAR, &sec5) {
        certs.push(("parameter clause".into(), c));
    }
    ensure(certs.len() >= 5, || format!("only {} certificates", certs.len()))?;
    let mut algs = battery();
    algs.extend(random_algebras(31, 20, 8));
    ensure(algs.iter().all(|a| a.size() <= 8), || "oversized algebra".into())?;
    let mut checks = 0;
    for a in &algs {
        for (src, c) in &certs {
            check_certificate(a, c).map_err(|e| format!("{src}: {e}"))?;
            checks += 1;
        }
    }
    for a in battery().iter().filter(|a| a.size() <= 6) {
        for (src, c) in &certs {
            ensure(naive_certificate(a, c), || format!("{src} fails on the reference semantics in {}", a.name))?;
        }
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("{} certificates, {checks} certificate and algebra pairs, {:.1?}", certs.len(), t.elapsed()))
}

fn verify_cli(input: &str) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mustar-alba"))
        .args(["--json", "verify", input])
        .env("MUSTAR_ALBA_COLOR", "0")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("verify exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout)))?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let algs = battery();
    ensure(algs.len() == 10, || format!("battery has {} algebras", algs.len()))?;
    for src in [EXAMPLE_ONE, EXAMPLE_TWO] {
        let v = verify_cli(src)?;
        ensure(v["equivalent"] == true, || format!("{src}: {v}"))?;
        ensure(v["algebras"].as_array().map(Vec::len) == Some(10), || format!("{src}: {v}"))?;
    }
    let mut inputs = vec![ineq(EXAMPLE_ONE), ineq(EXAMPLE_TWO)];
    let random = random_inductive_inputs(11, 24, &algs, 200_000);
    ensure(random.len() >= 20, || format!("only {} random inputs", random.len()))?;
    inputs.extend(random);
    let (mut rows, mut cross, mut proper) = (0, 0, 0);
    for i in &inputs {
        let c = classify(i).map_err(|e| e.to_string())?;
        ensure(c.level >= Level::RestrictedInductive, || format!("{}: {:?}", print_inequality(i), c.level))?;
        let r = run(i, Mode::Auto);
        let pure = r.pure_system().ok_or_else(|| format!("{} did not succeed", print_inequality(i)))?;
        proper += usize::from(r.mode_used == Mode::Proper);
        for a in &algs {
            let iv = check_inequality(a, i).valid;
            let ov = check_quasi_system(a, &pure.members).valid;
            ensure(iv == ov, || format!("{} on {}: input {iv}, output {ov}", print_inequality(i), a.name))?;
            rows += 1;
            if a.size() <= 6 && system_cost(a, &pure.members) <= 5_000 {
                let n = Naive::new(a);
                let (ni, no) = (n.valid_inequality(i), n.valid_system(&pure.members));
                ensure(ni == iv && no == ov, || format!("{} on {}: reference disagrees", print_inequality(i), a.name))?;
                cross += 1;
            }
        }
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!(
        "{} inputs ({proper} via proper runs), {rows} algebra checks, {cross} reference cross-checks, {:.1?}",
        inputs.len(),
        t.elapsed()
    ))
}

fn laws(a: &FiniteAlgebra) -> Result<usize, String> {
    let n = Naive::new(a);
    let els: Vec<_> = a.elements().collect();
    let mut checks = 0;
    let fail = |what: &str| format!("{} on {}", what, a.name);
    ensure(a.bot() == n.bot() && a.top() == n.top(), || fail("bounds"))?;
    for &x in &els {
        ensure(a.black_box(x) == n.black_box(x) && a.black_dia(x) == n.black_dia(x), || fail("black modalities"))?;
        for &y in &els {
            ensure(a.meet(x, y) == n.meet(x, y) && a.join(x, y) == n.join(x, y), || fail("lattice operations"))?;
            ensure(a.heyting_imp(x, y) == n.imp(x, y) && a.co_imp(x, y) == n.coimp(x, y), || fail("residuals"))?;
            ensure(a.leq(a.dia(x), y) == a.leq(x, a.black_box(y)), || fail("diamond and black box adjunction"))?;
            ensure(a.leq(a.black_dia(x), y) == a.leq(x, a.boxv(y)), || fail("black diamond and box adjunction"))?;
            ensure(a.boxv(a.meet(x, y)) == a.meet(a.boxv(x), a.boxv(y)), || fail("box preserves meets"))?;
            ensure(a.dia(a.join(x, y)) == a.join(a.dia(x), a.dia(y)), || fail("diamond preserves joins"))?;
            for &z in &els {
                ensure(a.leq(a.meet(x, y), z) == a.leq(y, a.heyting_imp(x, z)), || fail("Heyting residuation"))?;
                ensure(a.leq(a.co_imp(x, y), z) == a.leq(x, a.join(y, z)), || fail("co-Heyting residuation"))?;
                ensure(a.meet(x, a.join(y, z)) == a.join(a.meet(x, y), a.meet(x, z)), || fail("distributivity"))?;
                checks += 4;
            }
        }
    }
    ensure(a.boxv(a.top()) == a.top() && a.dia(a.bot()) == a.bot(), || fail("normality"))?;
    let (jn, mn) = (n.join_irreducibles(), n.meet_irreducibles());
    ensure(a.jty().to_vec() == jn && a.mty().to_vec() == mn, || fail("irreducibles"))?;
    for &j in &jn {
        let k = a.kappa(j).ok_or_else(|| fail("kappa undefined"))?;
        let expect = n.greatest_not_above(j);
        ensure(k == expect && mn.contains(&k), || fail("kappa"))?;
        ensure(a.kappa_inverse(k) == Some(j), || fail("kappa inverse"))?;
        for &x in &els {
            ensure(a.leq(j, x) != a.leq(x, k), || fail("kappa separation"))?;
        }
    }
    ensure(a.kappa_inverse(a.top()).is_none() || mn.contains(&a.top()), || fail("kappa inverse domain"))?;
    for &x in &els {
        let below = jn.iter().filter(|&&j| a.leq(j, x)).fold(a.bot(), |acc, &j| a.join(acc, j));
        let above = mn.iter().filter(|&&m| a.leq(x, m)).fold(a.top(), |acc, &m| a.meet(acc, m));
        ensure(below == x && above == x, || fail("perfectness"))?;
    }
    Ok(checks)
}

fn fixed_point_agreement(algs: &[FiniteAlgebra]) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checks = 0;
    for k in 0..60 {
        let cfg = FormulaConfig { black: true, starred: k % 2 == 1, ..FormulaConfig::l1(&["p", "q"], 4) };
        let f = random_formula(&mut rng, &cfg);
        for a in algs {
            let n = Naive::new(a);
            let vars: Vec<Var> = f.free_vars().into_iter().collect();
            let mut bad = None;
            n.forall(&vars, &mut |env| {
                let lib = eval(a, &f, env);
                let ok = lib.as_ref().is_ok_and(|&v| v == n.eval(&f, env));
                if !ok {
                    bad = Some(format!("{} on {}: {lib:?}", mustar_alba::syntax::print_formula(&f), a.name));
                }
                checks += 1;
                ok
            });
            if let Some(b) = bad {
                return Err(b);
            }
        }
    }
    Ok(checks)
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let algs = battery();
    let mut checks = 0;
    for a in &algs {
        checks += laws(a)?;
    }
    let fp = fixed_point_agreement(&algs)?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("{checks} law instances and {fp} fixed point evaluations on {} algebras, {:.1?}", algs.len(), t.elapsed()))
}

trait Kappa {
    fn greatest_not_above(&self, j: mustar_alba::algebra::Elem) -> mustar_alba::algebra::Elem;
}

impl Kappa for Naive<'_> {
    fn greatest_not_above(&self, j: mustar_alba::algebra::Elem) -> mustar_alba::algebra::Elem {
        let c: Vec<_> = self.els.iter().copied().filter(|&x| !self.a.leq(j, x)).collect();
        *c.iter().find(|&&x| c.iter().all(|&y| self.a.leq(y, x))).expect("kappa exists")
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden run, restricted inductive", criterion_1),
        ("golden run, tame inductive", criterion_2),
        ("classifier goldens", criterion_3),
        ("rule soundness", criterion_4),
        ("Ackermann lemma", criterion_5),
        ("inner formula preservation", criterion_6),
        ("end-to-end equivalence", criterion_7),
        ("algebra laws", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("PASS {} {name}: {detail}", k + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {} {name}: panicked", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
