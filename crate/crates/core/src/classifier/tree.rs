use serde::Serialize;

use crate::syntax::{print_formula, Formula, Polarity};

/// Table 1 roles. Each signed connective carries every role it may play; a
/// branch decomposition picks one per node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Role {
    DeltaAdjoint,
    SlrOuter,
    SlrInner,
    Sla,
    Sra,
    Srr,
    BinderSkeleton,
    BinderPia,
    Leaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Part {
    P1,
    P2,
    P3,
}

impl Role {
    pub fn part(self) -> Option<Part> {
        match self {
            Role::DeltaAdjoint | Role::SlrOuter => Some(Part::P3),
            Role::SlrInner | Role::Sla | Role::BinderSkeleton => Some(Part::P2),
            Role::Sra | Role::Srr | Role::BinderPia => Some(Part::P1),
            Role::Leaf => None,
        }
    }
}

pub fn roles_of(f: &Formula, sign: Polarity) -> Vec<Role> {
    use Formula as F;
    use Polarity::*;
    use Role::*;
    match (f, sign) {
        (F::Or(..), Positive) | (F::And(..), Negative) => vec![DeltaAdjoint, Sla, Srr],
        (F::And(..), Positive) | (F::Or(..), Negative) => vec![DeltaAdjoint, SlrInner, Sra],
        (F::Dia(_), Positive) | (F::Box(_), Negative) => vec![SlrOuter, Sla],
        (F::CoImplies(..), Positive) | (F::Implies(..), Negative) => vec![SlrOuter, SlrInner],
        (F::Box(_), Positive) | (F::Dia(_), Negative) => vec![Sra],
        (F::Implies(..), Positive) | (F::CoImplies(..), Negative) => vec![Srr],
        (F::Mu(..) | F::MuStar(..), Positive) | (F::Nu(..) | F::NuStar(..), Negative) => vec![BinderSkeleton],
        (F::Nu(..) | F::NuStar(..), Positive) | (F::Mu(..) | F::MuStar(..), Negative) => vec![BinderPia],
        (F::BlackBox(_) | F::BlackDia(_), _) => vec![],
        _ => vec![Leaf],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTree {
    pub formula: Formula,
    pub sign: Polarity,
    pub roles: Vec<Role>,
    pub children: Vec<SignedTree>,
}

pub fn signed_tree(f: &Formula, sign: Polarity) -> SignedTree {
    let children = f
        .children()
        .into_iter()
        .enumerate()
        .map(|(i, c)| signed_tree(c, if f.child_flips(i) { sign.flip() } else { sign }))
        .collect();
    SignedTree { formula: f.clone(), sign, roles: roles_of(f, sign), children }
}

impl SignedTree {
    pub fn at(&self, path: &[usize]) -> &SignedTree {
        path.iter().fold(self, |t, &i| &t.children[i])
    }

    /// Signed label such as `+<>` or `-p`.
    pub fn label(&self) -> String {
        format!("{}{}", self.sign.symbol(), connective(&self.formula))
    }

    pub fn is_binder(&self) -> bool {
        self.formula.is_binder()
    }

    pub fn prop_leaf(&self) -> Option<&str> {
        match &self.formula {
            Formula::PropVar(p) => Some(p),
            _ => None,
        }
    }

    /// Preorder walk with paths.
    pub fn walk<'a>(&'a self, path: &mut Vec<usize>, f: &mut dyn FnMut(&[usize], &'a SignedTree)) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.walk(path, f);
            path.pop();
        }
    }

    pub fn prop_leaves(&self) -> Vec<(String, Polarity)> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |_, t| {
            if let Some(p) = t.prop_leaf() {
                out.push((p.to_string(), t.sign));
            }
        });
        out
    }
}

pub fn connective(f: &Formula) -> String {
    use Formula as F;
    match f {
        F::And(..) => "&".into(),
        F::Or(..) => "|".into(),
        F::Implies(..) => "->".into(),
        F::CoImplies(..) => "-<".into(),
        F::Box(_) => "[]".into(),
        F::Dia(_) => "<>".into(),
        F::BlackBox(_) => "[b]".into(),
        F::BlackDia(_) => "<b>".into(),
        F::Mu(..) => "mu".into(),
        F::Nu(..) => "nu".into(),
        F::MuStar(..) => "mu*".into(),
        F::NuStar(..) => "nu*".into(),
        leaf => print_formula(leaf),
    }
}
