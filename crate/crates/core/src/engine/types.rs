use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Inequality, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tame,
    Proper,
    Auto,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tame => "tame",
            Mode::Proper => "proper",
            Mode::Auto => "auto",
        })
    }
}

/// `exists_vars (antecedent) => consequent`. The existential names sit in
/// the antecedent, so over the whole implication they are read universally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuasiInequality {
    pub exists_vars: Vec<Var>,
    pub antecedent: Vec<Inequality>,
    pub consequent: Inequality,
}

impl QuasiInequality {
    pub fn is_pure(&self) -> bool {
        self.consequent.is_pure() && self.antecedent.iter().all(|i| i.is_pure())
    }

    pub fn names(&self) -> std::collections::BTreeSet<Var> {
        let mut out: std::collections::BTreeSet<Var> = self.exists_vars.iter().cloned().collect();
        for i in self.antecedent.iter().chain(std::iter::once(&self.consequent)) {
            out.extend(i.lhs.names());
            out.extend(i.rhs.names());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiSystem {
    pub members: Vec<QuasiInequality>,
    pub fresh_counter: u32,
    pub mode: Mode,
}

impl QuasiSystem {
    pub fn is_pure(&self) -> bool {
        self.members.iter().all(|m| m.is_pure())
    }
}

/// Which side of a binary connective stays in place under residuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Keep {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", content = "arg")]
pub enum Rule {
    /// `a -< b <= c` to `a <= b | c`.
    MinusLR,
    /// `a <= b -> c` to `a & b <= c`.
    ImpRR,
    /// `a & b <= c` to `a <= b -> c` (keep left) or `b <= a -> c` (keep right).
    AndLR(Keep),
    /// `a <= b | c` to `a -< b <= c` (keep right) or `a -< c <= b` (keep left).
    OrRR(Keep),
    OrLA,
    AndRA,
    DiaLA,
    BoxRA,
    BoxAppr,
    DiaAppr,
    ImpAppr,
    MinusAppr,
    MuAR,
    NuAR,
    /// Right Ackermann rule on the named variable.
    RA(String),
    /// Left Ackermann rule on the named variable.
    LA(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleClass {
    Ackermann,
    Residuation,
    FixedPoint,
    Approximation,
    Split,
}

impl Rule {
    pub fn class(&self) -> RuleClass {
        match self {
            Rule::OrLA | Rule::AndRA => RuleClass::Split,
            Rule::BoxAppr | Rule::DiaAppr | Rule::ImpAppr | Rule::MinusAppr => RuleClass::Approximation,
            Rule::MuAR | Rule::NuAR => RuleClass::FixedPoint,
            Rule::RA(_) | Rule::LA(_) => RuleClass::Ackermann,
            _ => RuleClass::Residuation,
        }
    }

    pub fn is_ackermann(&self) -> bool {
        self.class() == RuleClass::Ackermann
    }

    pub fn name(&self) -> String {
        match self {
            Rule::MinusLR => "(-LR)".into(),
            Rule::ImpRR => "(->RR)".into(),
            Rule::AndLR(Keep::Left) => "(&LR)".into(),
            Rule::AndLR(Keep::Right) => "(&LR, right conjunct)".into(),
            Rule::OrRR(Keep::Right) => "(|RR)".into(),
            Rule::OrRR(Keep::Left) => "(|RR, left disjunct)".into(),
            Rule::OrLA => "(|LA)".into(),
            Rule::AndRA => "(&RA)".into(),
            Rule::DiaLA => "(<>LA)".into(),
            Rule::BoxRA => "([]RA)".into(),
            Rule::BoxAppr => "([]Appr)".into(),
            Rule::DiaAppr => "(<>Appr)".into(),
            Rule::ImpAppr => "(->Appr)".into(),
            Rule::MinusAppr => "(-Appr)".into(),
            Rule::MuAR => "(mu-A-R)".into(),
            Rule::NuAR => "(nu-A-R)".into(),
            Rule::RA(p) => format!("(RA) on {p}"),
            Rule::LA(p) => format!("(LA) on {p}"),
        }
    }
}

/// A member of the system and, except for the Ackermann rules, one of its
/// antecedent inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub member: usize,
    pub inequality: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub target: Target,
    /// Indices of the members that replaced the target member.
    pub produced: Vec<usize>,
    pub result_members: Vec<QuasiInequality>,
    pub certificate: Option<crate::classifier::InnerFormulaCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum RuleError {
    #[error("no member {member} or inequality {inequality:?} in the system")]
    BadTarget { member: usize, inequality: Option<usize> },
    #[error("{rule} does not match {found}")]
    ShapeMismatch { rule: String, found: String },
    #[error("{rule} is not applicable: {reason}")]
    NotApplicable { rule: String, reason: String },
    #[error("{rule}: {condition} fails for {inequality}")]
    SideConditionViolated { rule: String, condition: String, inequality: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum RunStatus {
    Success,
    Stuck { member: usize, inequality: Option<String>, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunKind {
    TameRun,
    ProperRun,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub input: Inequality,
    pub mode: Mode,
    /// The mode whose attempt is reported (differs from `mode` only for Auto).
    pub mode_used: Mode,
    pub preprocessed: Vec<Inequality>,
    pub initial: QuasiSystem,
    pub status: RunStatus,
    pub final_system: QuasiSystem,
    pub trace: Vec<RuleApplication>,
    pub run_kind: RunKind,
    /// Order type that guided each preprocessed inequality.
    pub guides: Vec<crate::classifier::OrderType>,
}

impl RunResult {
    pub fn succeeded(&self) -> bool {
        self.status == RunStatus::Success
    }

    pub fn pure_system(&self) -> Option<&QuasiSystem> {
        if self.succeeded() {
            Some(&self.final_system)
        } else {
            None
        }
    }
}
