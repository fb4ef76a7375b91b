//! Formulas of the intuitionistic modal mu-calculus and its extensions.
//!
//! The five variable sorts live in disjoint namespaces, enforced by the
//! concrete grammar through sigils: `p` (propositional), `X` (fixed point),
//! `?x` (placeholder), `$j` (nominal) and `#m` (co-nominal).

mod json;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use json::{formula_from_json, formula_to_json, inequality_from_json, inequality_to_json, JsonError};
pub use parse::{parse_formula, parse_inequality, parse_input_inequality, ParseError};
pub use print::{print_formula, print_inequality};
pub use subst::{fresh_fix_name, substitute, substitute_one};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Top,
    PropVar(String),
    FixVar(String),
    PlaceVar(String),
    Nominal(String),
    CoNominal(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Co-implication `a -< b`, the left residual of join.
    CoImplies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
    BlackBox(Box<Formula>),
    BlackDia(Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
    MuStar(String, Box<Formula>),
    NuStar(String, Box<Formula>),
}

/// A variable of one of the five sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "sort", content = "name")]
pub enum Var {
    Prop(String),
    Fix(String),
    Place(String),
    Nom(String),
    CoNom(String),
}

impl Var {
    pub fn to_formula(&self) -> Formula {
        match self {
            Var::Prop(n) => Formula::PropVar(n.clone()),
            Var::Fix(n) => Formula::FixVar(n.clone()),
            Var::Place(n) => Formula::PlaceVar(n.clone()),
            Var::Nom(n) => Formula::Nominal(n.clone()),
            Var::CoNom(n) => Formula::CoNominal(n.clone()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Var::Prop(n) | Var::Fix(n) | Var::Place(n) | Var::Nom(n) | Var::CoNom(n) => n,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_formula(&self.to_formula()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LanguageTag {
    L,
    Lplus,
    L1,
    L1plus,
    L2,
    L2plus,
    Lstar,
    LstarPlus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Inequality {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Inequality { lhs, rhs }
    }

    pub fn prop_vars(&self) -> BTreeSet<String> {
        let mut out = self.lhs.prop_vars();
        out.extend(self.rhs.prop_vars());
        out
    }

    pub fn is_pure(&self) -> bool {
        self.lhs.is_pure() && self.rhs.is_pure()
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_inequality(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("formula mixes starred and unstarred binders")]
    MixedBinders,
}

macro_rules! bx {
    ($e:expr) => {
        Box::new($e)
    };
}

/// Shorthand constructors, used heavily by the engine and by tests.
impl Formula {
    pub fn prop(n: &str) -> Formula {
        Formula::PropVar(n.to_string())
    }
    pub fn fix(n: &str) -> Formula {
        Formula::FixVar(n.to_string())
    }
    pub fn place(n: &str) -> Formula {
        Formula::PlaceVar(n.to_string())
    }
    pub fn nom(n: &str) -> Formula {
        Formula::Nominal(n.to_string())
    }
    pub fn conom(n: &str) -> Formula {
        Formula::CoNominal(n.to_string())
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(bx!(a), bx!(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(bx!(a), bx!(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Implies(bx!(a), bx!(b))
    }
    pub fn coimp(a: Formula, b: Formula) -> Formula {
        Formula::CoImplies(bx!(a), bx!(b))
    }
    pub fn boxf(a: Formula) -> Formula {
        Formula::Box(bx!(a))
    }
    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(bx!(a))
    }
    pub fn bbox(a: Formula) -> Formula {
        Formula::BlackBox(bx!(a))
    }
    pub fn bdia(a: Formula) -> Formula {
        Formula::BlackDia(bx!(a))
    }
    pub fn mu(x: &str, a: Formula) -> Formula {
        Formula::Mu(x.to_string(), bx!(a))
    }
    pub fn nu(x: &str, a: Formula) -> Formula {
        Formula::Nu(x.to_string(), bx!(a))
    }
    pub fn mu_star(x: &str, a: Formula) -> Formula {
        Formula::MuStar(x.to_string(), bx!(a))
    }
    pub fn nu_star(x: &str, a: Formula) -> Formula {
        Formula::NuStar(x.to_string(), bx!(a))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula as F;
        match self {
            F::Bot | F::Top | F::PropVar(_) | F::FixVar(_) | F::PlaceVar(_) | F::Nominal(_) | F::CoNominal(_) => vec![],
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::CoImplies(a, b) => vec![a, b],
            F::Box(a) | F::Dia(a) | F::BlackBox(a) | F::BlackDia(a) => vec![a],
            F::Mu(_, a) | F::Nu(_, a) | F::MuStar(_, a) | F::NuStar(_, a) => vec![a],
        }
    }

    /// Rebuilds this node over new children (same arity as `children`).
    pub fn with_children(&self, mut kids: Vec<Formula>) -> Formula {
        use Formula as F;
        let mut next = || bx!(kids.remove(0));
        match self {
            F::Bot | F::Top | F::PropVar(_) | F::FixVar(_) | F::PlaceVar(_) | F::Nominal(_) | F::CoNominal(_) => self.clone(),
            F::And(..) => F::And(next(), next()),
            F::Or(..) => F::Or(next(), next()),
            F::Implies(..) => F::Implies(next(), next()),
            F::CoImplies(..) => F::CoImplies(next(), next()),
            F::Box(_) => F::Box(next()),
            F::Dia(_) => F::Dia(next()),
            F::BlackBox(_) => F::BlackBox(next()),
            F::BlackDia(_) => F::BlackDia(next()),
            F::Mu(x, _) => F::Mu(x.clone(), next()),
            F::Nu(x, _) => F::Nu(x.clone(), next()),
            F::MuStar(x, _) => F::MuStar(x.clone(), next()),
            F::NuStar(x, _) => F::NuStar(x.clone(), next()),
        }
    }

    /// Sign of the `i`-th child relative to this node.
    pub fn child_flips(&self, i: usize) -> bool {
        matches!((self, i), (Formula::Implies(..), 0) | (Formula::CoImplies(..), 1))
    }

    pub fn binder(&self) -> Option<(&str, &Formula)> {
        match self {
            Formula::Mu(x, b) | Formula::Nu(x, b) | Formula::MuStar(x, b) | Formula::NuStar(x, b) => Some((x, b)),
            _ => None,
        }
    }

    pub fn is_binder(&self) -> bool {
        self.binder().is_some()
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Formula::PropVar(n) => Some(Var::Prop(n.clone())),
            Formula::FixVar(n) => Some(Var::Fix(n.clone())),
            Formula::PlaceVar(n) => Some(Var::Place(n.clone())),
            Formula::Nominal(n) => Some(Var::Nom(n.clone())),
            Formula::CoNominal(n) => Some(Var::CoNom(n.clone())),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Free variables of every sort; bound fixed point variables are excluded.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_fix_vars(&self) -> BTreeSet<String> {
        self.free_vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Fix(n) => Some(n),
                _ => None,
            })
            .collect()
    }

    pub fn prop_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::PropVar(n) = f {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn contains_prop(&self, p: &str) -> bool {
        self.any(&|f| matches!(f, Formula::PropVar(n) if n == p))
    }

    pub fn has_prop_vars(&self) -> bool {
        self.any(&|f| matches!(f, Formula::PropVar(_)))
    }

    /// Pure formulas contain no propositional variables.
    pub fn is_pure(&self) -> bool {
        !self.has_prop_vars()
    }

    /// A mu-sentence has no free fixed point variables.
    pub fn is_sentence(&self) -> bool {
        self.free_fix_vars().is_empty()
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any(pred))
    }

    /// All names of every sort occurring anywhere, bound or free.
    pub fn names(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Some(v) = f.as_var() {
                out.insert(v);
            }
            if let Some((x, _)) = f.binder() {
                out.insert(Var::Fix(x.to_string()));
            }
        });
        out
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
    match f {
        Formula::FixVar(n) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(Var::Fix(n.clone()));
            }
        }
        Formula::Mu(x, b) | Formula::Nu(x, b) | Formula::MuStar(x, b) | Formula::NuStar(x, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        _ => {
            if let Some(v) = f.as_var() {
                out.insert(v);
            }
            for c in f.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

/// Polarities of the free occurrences of `v` in `+f`, left to right.
pub fn polarity_of_occurrences(f: &Formula, v: &Var) -> Vec<Polarity> {
    let mut out = Vec::new();
    occurrences(f, v, Polarity::Positive, &mut out);
    out
}

fn occurrences(f: &Formula, v: &Var, sign: Polarity, out: &mut Vec<Polarity>) {
    if let Some((x, _)) = f.binder() {
        if *v == Var::Fix(x.to_string()) {
            return;
        }
    }
    if f.as_var().as_ref() == Some(v) {
        out.push(sign);
        return;
    }
    for (i, c) in f.children().into_iter().enumerate() {
        let s = if f.child_flips(i) { sign.flip() } else { sign };
        occurrences(c, v, s, out);
    }
}

pub fn is_positive_in(f: &Formula, v: &Var) -> bool {
    polarity_of_occurrences(f, v).iter().all(|p| *p == Polarity::Positive)
}

pub fn is_negative_in(f: &Formula, v: &Var) -> bool {
    polarity_of_occurrences(f, v).iter().all(|p| *p == Polarity::Negative)
}

fn has_starred(f: &Formula) -> bool {
    f.any(&|g| matches!(g, Formula::MuStar(..) | Formula::NuStar(..)))
}

fn has_unstarred(f: &Formula) -> bool {
    f.any(&|g| matches!(g, Formula::Mu(..) | Formula::Nu(..)))
}

/// Replaces every `mu`/`nu` binder by its starred counterpart.
pub fn star(f: &Formula) -> Result<Formula, StarError> {
    if has_starred(f) && has_unstarred(f) {
        return Err(StarError::MixedBinders);
    }
    Ok(restar(f, true))
}

/// Inverse of [`star`].
pub fn unstar(f: &Formula) -> Result<Formula, StarError> {
    if has_starred(f) && has_unstarred(f) {
        return Err(StarError::MixedBinders);
    }
    Ok(restar(f, false))
}

fn restar(f: &Formula, to_star: bool) -> Formula {
    let kids: Vec<Formula> = f.children().into_iter().map(|c| restar(c, to_star)).collect();
    match (f, to_star) {
        (Formula::Mu(x, _), true) => Formula::MuStar(x.clone(), bx!(kids.into_iter().next().unwrap())),
        (Formula::Nu(x, _), true) => Formula::NuStar(x.clone(), bx!(kids.into_iter().next().unwrap())),
        (Formula::MuStar(x, _), false) => Formula::Mu(x.clone(), bx!(kids.into_iter().next().unwrap())),
        (Formula::NuStar(x, _), false) => Formula::Nu(x.clone(), bx!(kids.into_iter().next().unwrap())),
        _ => f.with_children(kids),
    }
}

pub fn star_inequality(ineq: &Inequality) -> Result<Inequality, StarError> {
    Ok(Inequality::new(star(&ineq.lhs)?, star(&ineq.rhs)?))
}

/// Least language containing `f`.
///
/// A formula mixing starred and unstarred binders belongs to no single
/// language of the lattice; it is reported under the starred tags.
pub fn language_of(f: &Formula) -> LanguageTag {
    let plus = f.any(&|g| {
        matches!(g, Formula::Nominal(_) | Formula::CoNominal(_) | Formula::BlackBox(_) | Formula::BlackDia(_))
    });
    let starred = has_starred(f);
    let one = has_unstarred(f);
    match (starred, one, plus) {
        (true, _, false) => LanguageTag::Lstar,
        (true, _, true) => LanguageTag::LstarPlus,
        (false, true, false) => LanguageTag::L1,
        (false, true, true) => LanguageTag::L1plus,
        (false, false, false) => LanguageTag::L,
        (false, false, true) => LanguageTag::Lplus,
    }
}

pub fn language_of_inequality(ineq: &Inequality) -> LanguageTag {
    join_languages(language_of(&ineq.lhs), language_of(&ineq.rhs))
}

fn join_languages(a: LanguageTag, b: LanguageTag) -> LanguageTag {
    use LanguageTag::*;
    let rank = |t: LanguageTag| match t {
        L | Lplus => 0,
        L1 | L1plus => 1,
        L2 | L2plus => 2,
        Lstar | LstarPlus => 3,
    };
    let plus = |t: LanguageTag| matches!(t, Lplus | L1plus | L2plus | LstarPlus);
    let r = rank(a).max(rank(b));
    let p = plus(a) || plus(b);
    match (r, p) {
        (0, false) => L,
        (0, true) => Lplus,
        (1, false) => L1,
        (1, true) => L1plus,
        (2, false) => L2,
        (2, true) => L2plus,
        (_, false) => Lstar,
        (_, true) => LstarPlus,
    }
}

/// True for inputs the classifier accepts: L1 formulas with no placeholders.
pub fn is_l1_input(ineq: &Inequality) -> bool {
    let ok = |f: &Formula| matches!(language_of(f), LanguageTag::L | LanguageTag::L1) && !f.any(&|g| matches!(g, Formula::PlaceVar(_)));
    ok(&ineq.lhs) && ok(&ineq.rhs)
}
