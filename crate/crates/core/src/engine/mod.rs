//! The rewrite calculus.

mod output;
mod preprocess;
mod rules;
mod shape;
mod strategy;
mod types;

pub use output::{
    canonical_names, member_json, member_text, run_json, run_text, step_json, system_json, system_text,
};
pub use preprocess::{distribution_measure, preprocess};
pub use rules::{
    applicable_rules, apply_ackermann, apply_rule, apply_rule_with, first_approximation, first_approximation_member,
    fixed_point_certificate, initial_system, replay, RuleOptions,
};
pub use shape::{syntactic_shape, SyntacticShape};
pub use strategy::{run, run_with, STEP_LIMIT};
pub use types::{
    Keep, Mode, QuasiInequality, QuasiSystem, Rule, RuleApplication, RuleClass, RuleError, RunKind, RunResult,
    RunStatus, Target,
};
