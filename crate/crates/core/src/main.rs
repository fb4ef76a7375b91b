use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mustar_alba::algebra::oracle::{rule_soundness, SoundnessConfig, SoundnessReport};
use mustar_alba::algebra::{battery, check_inequality, check_quasi_system, FiniteAlgebra};
use mustar_alba::classifier::{classify, Classification, Level};
use mustar_alba::engine::{
    canonical_names, member_text, replay, run, run_json, run_text, Mode, QuasiInequality, QuasiSystem,
    RuleOptions, RunResult,
};
use mustar_alba::syntax::{is_l1_input, parse_inequality, parse_input_inequality, print_inequality, Inequality, Var};

const SUCCESS: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const BREACH: u8 = 3;

#[derive(Parser)]
#[command(name = "mustar-alba", version, about = "Canonicity calculus for intuitionistic modal mu-inequalities")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Tame,
    Proper,
    Auto,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Tame => Mode::Tame,
            ModeArg::Proper => Mode::Proper,
            ModeArg::Auto => Mode::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    All,
    Runs,
    Classifier,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an inequality and list every witness.
    Classify { input: String },
    /// Run the calculus on an inequality.
    Run {
        input: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Write the JSON trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print every rule application in text mode.
        #[arg(long)]
        steps: bool,
    },
    /// Compare validity of the input and of the pure output on finite algebras.
    Verify {
        input: String,
        /// Algebra description files; the built-in battery when omitted.
        #[arg(long = "algebra")]
        algebras: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },
    /// Random rule applications checked on random algebras.
    OracleTest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        algebras: usize,
        /// Number of random walks.
        #[arg(long, default_value_t = 60)]
        formulas: usize,
        #[arg(long, default_value_t = 8)]
        max_algebra_size: usize,
        #[arg(long, hide = true)]
        inject_ackermann_bug: bool,
    },
    /// Rerun the worked examples and compare with their known results.
    Goldens {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

struct Out {
    json: bool,
    color: bool,
}

impl Out {
    fn paint(&self, text: &str, good: bool) -> String {
        if self.color {
            format!("\x1b[{}m{text}\x1b[0m", if good { 32 } else { 31 })
        } else {
            text.to_string()
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn parse_input(text: &str) -> Result<Inequality, ExitCode> {
    parse_input_inequality(text).map_err(input_error)
}

fn witness_text(c: &Classification) -> Vec<String> {
    c.witnesses
        .iter()
        .map(|w| {
            let eps: Vec<String> = w.epsilon.iter().map(|(p, o)| format!("{p}={o}")).collect();
            let omega: Vec<String> = w.omega.iter().map(|(a, b)| format!("{a} < {b}")).collect();
            format!("epsilon {{{}}} omega {{{}}}", eps.join(", "), omega.join(", "))
        })
        .collect()
}

fn cmd_classify(out: &Out, input: &str) -> ExitCode {
    let ineq = match parse_input(input) {
        Ok(i) => i,
        Err(c) => return c,
    };
    if !is_l1_input(&ineq) {
        return input_error("classification needs an unstarred inequality over propositional variables");
    }
    let c = match classify(&ineq) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    if out.json {
        println!("{}", json!({ "input": print_inequality(&ineq), "classification": c }));
    } else {
        println!("level: {:?}", c.level);
        println!("recursive: {}, inductive: {}, restricted: {}, tame: {}", c.recursive, c.inductive, c.restricted, c.tame);
        for w in witness_text(&c) {
            println!("witness: {w}");
        }
    }
    ExitCode::from(if c.level == Level::None { NEGATIVE } else { SUCCESS })
}

fn check_replay(r: &RunResult) -> Result<(), String> {
    match replay(&r.initial, &r.trace) {
        Ok(sys) if sys == r.final_system => Ok(()),
        Ok(_) => Err("replayed trace ends in a different system".into()),
        Err(e) => Err(format!("trace does not replay: {e}")),
    }
}

fn cmd_run(out: &Out, input: &str, mode: Mode, trace: Option<PathBuf>, steps: bool) -> ExitCode {
    let ineq = match parse_input(input) {
        Ok(i) => i,
        Err(c) => return c,
    };
    let r = run(&ineq, mode);
    if let Err(e) = check_replay(&r) {
        eprintln!("internal error: {e}");
        return ExitCode::from(BREACH);
    }
    let doc = run_json(&r);
    if let Some(path) = trace {
        let text = serde_json::to_string_pretty(&doc).expect("trace serializes");
        if let Err(e) = std::fs::write(&path, text + "\n") {
            return input_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    if out.json {
        println!("{doc}");
    } else {
        print!("{}", run_text(&r, steps));
    }
    ExitCode::from(if r.succeeded() { SUCCESS } else { NEGATIVE })
}

fn cmd_verify(out: &Out, input: &str, paths: &[PathBuf], mode: Mode) -> ExitCode {
    let ineq = match parse_input(input) {
        Ok(i) => i,
        Err(c) => return c,
    };
    let algebras = if paths.is_empty() {
        battery()
    } else {
        let mut v = Vec::new();
        for p in paths {
            match FiniteAlgebra::load_path(p) {
                Ok(a) => v.push(a),
                Err(e) => {
                    if out.json {
                        println!("{}", json!({ "file": p.display().to_string(), "error": e }));
                    }
                    return input_error(format!("{}: {e}", p.display()));
                }
            }
        }
        v
    };
    let r = run(&ineq, mode);
    let Some(pure) = r.pure_system() else {
        if out.json {
            println!("{}", json!({ "input": print_inequality(&ineq), "run": run_json(&r) }));
        } else {
            print!("{}", run_text(&r, false));
            println!("no pure system to compare against");
        }
        return ExitCode::from(NEGATIVE);
    };
    let mut rows = Vec::new();
    let mut all = true;
    for a in &algebras {
        let iv = check_inequality(a, &ineq);
        let ov = check_quasi_system(a, &pure.members);
        let agree = iv.valid == ov.valid;
        all &= agree;
        let mut row = json!({
            "algebra": a.name,
            "input_valid": iv.valid,
            "output_valid": ov.valid,
            "agree": agree,
        });
        if let Some(cm) = iv.countermodel.as_ref().map(|_| iv.describe_countermodel(a)) {
            row["input_countermodel"] = json!(cm);
        }
        rows.push(row);
    }
    if out.json {
        println!(
            "{}",
            json!({
                "input": print_inequality(&ineq),
                "mode_used": r.mode_used,
                "run_kind": r.run_kind,
                "algebras": rows,
                "equivalent": all,
            })
        );
    } else {
        for row in &rows {
            let agree = row["agree"].as_bool().unwrap_or(false);
            println!(
                "{}: input {}, output {} {}",
                row["algebra"].as_str().unwrap_or(""),
                verdict(row["input_valid"].as_bool()),
                verdict(row["output_valid"].as_bool()),
                out.paint(if agree { "agree" } else { "DISAGREE" }, agree)
            );
        }
        println!("equivalent on {} algebras: {}", rows.len(), out.paint(&all.to_string(), all));
    }
    ExitCode::from(if all { SUCCESS } else { BREACH })
}

fn verdict(v: Option<bool>) -> &'static str {
    if v == Some(true) {
        "valid"
    } else {
        "invalid"
    }
}

fn report_json(r: &SoundnessReport) -> Value {
    json!({
        "applications": r.applications,
        "comparisons": r.comparisons,
        "algebras_used": r.algebras_used,
        "by_rule": r.by_rule,
        "violations": r.violations,
    })
}

fn cmd_oracle(out: &Out, cfg: SoundnessConfig) -> ExitCode {
    let r = rule_soundness(&cfg);
    if out.json {
        println!("{}", report_json(&r));
    } else {
        println!(
            "seed {}: {} rule applications, {} comparisons on {} algebras",
            cfg.seed, r.applications, r.comparisons, r.algebras_used
        );
        for (rule, n) in &r.by_rule {
            println!("  {rule}: {n}");
        }
        for v in &r.violations {
            println!(
                "violation: {} at member {} on {} (before {}, after {})",
                v.rule, v.target.member, v.algebra, v.pre_valid, v.post_valid
            );
            for m in &v.minimized {
                println!("  minimized: {m}");
            }
        }
        let ok = r.violations.is_empty();
        println!("{}", out.paint(&format!("{} violations", r.violations.len()), ok));
    }
    ExitCode::from(if r.violations.is_empty() { SUCCESS } else { BREACH })
}

struct GoldenRun {
    name: &'static str,
    input: &'static str,
    mode: Mode,
    /// Expected pure system, one member per entry: antecedent then consequent.
    expected: &'static [(&'static [&'static str], &'static str)],
}

const RUN_GOLDENS: &[GoldenRun] = &[
    GoldenRun {
        name: "restricted inductive",
        input: "<> mu X. (<>X | []([]<>q | p)) <= nu Y. (([]((q -> F) & (p -> F)) -> F) & []Y)",
        mode: Mode::Proper,
        expected: &[(
            &[
                "$i <= <>$j",
                "$j <= mu* X.(<>X | $k)",
                "nu* Y.(($l -> F) & []Y) <= #m",
                "<b>$l <= (<b>$k -< []<>(<b>$l -> F)) -> F",
            ],
            "$i <= #m",
        )],
    },
    GoldenRun {
        name: "tame inductive",
        input: "<>p & []q <= mu Y. (<>(p & q) & []Y)",
        mode: Mode::Tame,
        expected: &[(&["$i <= <>$j", "mu* Y.(<>($j & <b>$i) & []Y) <= #m"], "$i <= #m")],
    },
];

const CLASSIFIER_GOLDENS: &[(&str, &str, Level)] = &[
    (
        "restricted inductive",
        "<> mu X. (<>X | []([]<>q | p)) <= nu Y. (([]((q -> F) & (p -> F)) -> F) & []Y)",
        Level::RestrictedInductive,
    ),
    ("tame inductive", "<>([]F | p) & []q <= mu Y. (<>(p & q) & []Y)", Level::TameInductive),
    (
        "inductive only",
        "(mu X. (p | <>X)) & (mu X. (q | <>X)) <= mu X. ((p & mu Y. (q | <>Y)) | <>X)",
        Level::Inductive,
    ),
];

fn expected_system(g: &GoldenRun) -> QuasiSystem {
    let members = g
        .expected
        .iter()
        .map(|(ants, cons)| {
            let antecedent: Vec<Inequality> = ants.iter().map(|s| parse_inequality(s).expect("golden parses")).collect();
            let consequent = parse_inequality(cons).expect("golden parses");
            let mut exists: Vec<Var> = Vec::new();
            for i in &antecedent {
                for v in i.lhs.free_vars().into_iter().chain(i.rhs.free_vars()) {
                    let in_cons = consequent.lhs.free_vars().contains(&v) || consequent.rhs.free_vars().contains(&v);
                    if matches!(v, Var::Nom(_) | Var::CoNom(_)) && !in_cons && !exists.contains(&v) {
                        exists.push(v);
                    }
                }
            }
            QuasiInequality { exists_vars: exists, antecedent, consequent }
        })
        .collect();
    QuasiSystem { members, fresh_counter: 0, mode: g.mode }
}

fn same_modulo_names(a: &QuasiSystem, b: &QuasiSystem) -> bool {
    let (a, b) = (canonical_names(a), canonical_names(b));
    a.members.len() == b.members.len()
        && a.members.iter().zip(&b.members).all(|(x, y)| {
            let mut ex = x.exists_vars.clone();
            let mut ey = y.exists_vars.clone();
            ex.sort();
            ey.sort();
            x.antecedent == y.antecedent && x.consequent == y.consequent && ex == ey
        })
}

fn cmd_goldens(out: &Out, suite: Suite) -> ExitCode {
    let mut rows = Vec::new();
    let mut breach = false;
    if matches!(suite, Suite::All | Suite::Runs) {
        for g in RUN_GOLDENS {
            let r = run(&parse_inequality(g.input).expect("golden parses"), g.mode);
            let replays = check_replay(&r);
            breach |= replays.is_err();
            let ok = r.pure_system().is_some_and(|p| same_modulo_names(p, &expected_system(g)));
            rows.push(json!({
                "suite": "run",
                "name": g.name,
                "pass": ok && replays.is_ok(),
                "replays": replays.is_ok(),
                "got": r.final_system.members.iter().map(member_text).collect::<Vec<_>>(),
            }));
        }
    }
    if matches!(suite, Suite::All | Suite::Classifier) {
        for (name, src, level) in CLASSIFIER_GOLDENS {
            let c = classify(&parse_inequality(src).expect("golden parses"));
            let got = c.as_ref().map(|c| c.level).ok();
            rows.push(json!({
                "suite": "classifier",
                "name": name,
                "pass": got == Some(*level),
                "got": got.map(|l| format!("{l:?}")),
                "witnesses": c.as_ref().map(witness_text).unwrap_or_default(),
            }));
        }
    }
    let all = rows.iter().all(|r| r["pass"] == json!(true));
    if out.json {
        println!("{}", json!({ "goldens": rows, "pass": all }));
    } else {
        for r in &rows {
            let pass = r["pass"] == json!(true);
            println!(
                "{} {} {}",
                out.paint(if pass { "PASS" } else { "FAIL" }, pass),
                r["suite"].as_str().unwrap_or(""),
                r["name"].as_str().unwrap_or("")
            );
            if !pass {
                if let Some(got) = r["got"].as_array() {
                    for g in got {
                        println!("  got: {}", g.as_str().unwrap_or(""));
                    }
                }
            }
        }
    }
    ExitCode::from(if breach {
        BREACH
    } else if all {
        SUCCESS
    } else {
        NEGATIVE
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { SUCCESS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let color = std::env::var("MUSTAR_ALBA_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal();
    let out = Out { json: cli.json, color };
    match cli.command {
        Command::Classify { input } => cmd_classify(&out, &input),
        Command::Run { input, mode, trace, steps } => cmd_run(&out, &input, mode.into(), trace, steps),
        Command::Verify { input, algebras, mode } => cmd_verify(&out, &input, &algebras, mode.into()),
        Command::OracleTest { seed, algebras, formulas, max_algebra_size, inject_ackermann_bug } => {
            let cfg = SoundnessConfig {
                seed,
                algebra_count: algebras,
                walks: formulas,
                max_algebra_size,
                options: RuleOptions { ackermann_bug: inject_ackermann_bug },
                ..SoundnessConfig::default()
            };
            cmd_oracle(&out, cfg)
        }
        Command::Goldens { suite } => cmd_goldens(&out, suite),
    }
}

