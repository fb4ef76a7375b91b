//! Signed generation trees, good branches and the syntactic classes.

mod inner;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::syntax::{is_l1_input, Formula, Inequality, Polarity};

pub use inner::{recognize_inner, InnerError, InnerFormulaCertificate, InnerKind};
pub use tree::{connective, roles_of, signed_tree, Part, Role, SignedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orient {
    One,
    Dual,
}

impl Orient {
    pub fn flip(self) -> Orient {
        match self {
            Orient::One => Orient::Dual,
            Orient::Dual => Orient::One,
        }
    }
}

impl fmt::Display for Orient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orient::One => "1",
            Orient::Dual => "d",
        })
    }
}

impl Serialize for Orient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub type OrderType = BTreeMap<String, Orient>;

pub fn is_critical(t: &SignedTree, eps: &OrderType) -> bool {
    match t.prop_leaf() {
        Some(p) => {
            let o = eps.get(p).copied().unwrap_or(Orient::One);
            matches!((t.sign, o), (Polarity::Positive, Orient::One) | (Polarity::Negative, Orient::Dual))
        }
        None => false,
    }
}

fn has_critical_leaf(t: &SignedTree, eps: &OrderType) -> bool {
    is_critical(t, eps) || t.children.iter().any(|c| has_critical_leaf(c, eps))
}

/// Paths (child indices from the root) of every critical leaf, left to right.
pub fn critical_branches(t: &SignedTree, eps: &OrderType) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    t.walk(&mut Vec::new(), &mut |p, n| {
        if is_critical(n, eps) {
            out.push(p.to_vec());
        }
    });
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchNode {
    pub label: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchFlags {
    pub nb_pia: bool,
    pub nl: bool,
    pub omega_conf: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchDecomposition {
    pub side: Side,
    pub path: Vec<usize>,
    pub leaf: String,
    /// Root side first in every segment.
    pub p3: Vec<BranchNode>,
    pub p2: Vec<BranchNode>,
    pub p1: Vec<BranchNode>,
    pub flags: BranchFlags,
    /// Pairs `(pj, pi)` demanding `pj < pi` in the dependency order.
    pub constraints: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum BranchError {
    #[error("branch does not end in a propositional variable")]
    NotLive,
    #[error("no split of the branch into PIA, inner and outer parts is good; first obstacle at {node}")]
    NotGood { node: String },
}

#[derive(Clone, Copy, Debug, Default)]
struct Demands {
    nb_pia: bool,
    nl: bool,
}

/// A split of a branch of length `n` (leaf excluded): nodes `[0, c3)` are P3,
/// `[c3, c2)` are P2, `[c2, n)` are P1.
struct Split {
    c3: usize,
    c2: usize,
}

fn part_role(t: &SignedTree, part: Part) -> Option<Role> {
    t.roles.iter().copied().find(|r| r.part() == Some(part))
}

fn off_branch(node: &SignedTree, next: usize) -> Option<&SignedTree> {
    if node.children.len() == 2 {
        Some(&node.children[1 - next])
    } else {
        None
    }
}

struct Evaluated {
    decomposition: BranchDecomposition,
    ok: bool,
    obstacle: Option<String>,
}

fn evaluate(root: &SignedTree, side: Side, path: &[usize], split: &Split, eps: &OrderType, demands: Demands) -> Evaluated {
    let nodes: Vec<&SignedTree> = (0..path.len()).map(|k| root.at(&path[..k])).collect();
    let leaf = root.at(path);
    let leaf_var = leaf.prop_leaf().unwrap().to_string();
    let mut ok = true;
    let mut obstacle = None;
    let mut fail = |ok: &mut bool, label: String| {
        if *ok {
            obstacle = Some(label);
        }
        *ok = false;
    };
    let mut segs: [Vec<BranchNode>; 3] = Default::default();
    let mut nb_pia = true;
    let mut nl = true;
    let mut constraints = BTreeSet::new();
    for (k, node) in nodes.iter().enumerate() {
        let part = if k < split.c3 {
            Part::P3
        } else if k < split.c2 {
            Part::P2
        } else {
            Part::P1
        };
        let Some(role) = part_role(node, part) else {
            fail(&mut ok, node.label());
            segs[part as usize].push(BranchNode { label: node.label(), role: Role::Leaf });
            continue;
        };
        segs[part as usize].push(BranchNode { label: node.label(), role });
        if part == Part::P1 && k == split.c2 && !node.formula.is_sentence() {
            fail(&mut ok, node.label());
        }
        if part == Part::P1 && node.is_binder() {
            nb_pia = false;
        }
        let gamma = off_branch(node, path[k]);
        if let (Some(g), Role::Srr | Role::SlrInner) = (gamma, role) {
            if !g.formula.is_sentence() || has_critical_leaf(g, eps) {
                fail(&mut ok, node.label());
            }
            if role == Role::Srr {
                for (p, _) in g.prop_leaves() {
                    constraints.insert((p, leaf_var.clone()));
                }
            } else if !g.prop_leaves().is_empty() {
                nl = false;
            }
        }
    }
    if demands.nb_pia && !nb_pia || demands.nl && !nl {
        fail(&mut ok, "fixed point or live side formula".into());
    }
    let [p1, p2, p3] = segs;
    Evaluated {
        decomposition: BranchDecomposition {
            side,
            path: path.to_vec(),
            leaf: leaf.label(),
            p3,
            p2,
            p1,
            flags: BranchFlags { nb_pia, nl, omega_conf: true },
            constraints: constraints.into_iter().collect(),
        },
        ok,
        obstacle,
    }
}

fn decompose_with(
    root: &SignedTree,
    side: Side,
    path: &[usize],
    eps: &OrderType,
    demands: Demands,
) -> Result<BranchDecomposition, BranchError> {
    if root.at(path).prop_leaf().is_none() {
        return Err(BranchError::NotLive);
    }
    let n = path.len();
    let mut first_obstacle = None;
    // shortest P1 first, so the dependency constraints are as small as they
    // can be; then longest P3
    for c2 in (0..=n).rev() {
        for c3 in (0..=c2).rev() {
            let e = evaluate(root, side, path, &Split { c3, c2 }, eps, demands);
            if e.ok {
                return Ok(e.decomposition);
            }
            if first_obstacle.is_none() {
                first_obstacle = e.obstacle;
            }
        }
    }
    Err(BranchError::NotGood { node: first_obstacle.unwrap_or_default() })
}

/// Finds a good split of the branch at `path`, preferring P3 and then P2 as
/// long as possible.
pub fn decompose_branch(
    root: &SignedTree,
    side: Side,
    path: &[usize],
    eps: &OrderType,
) -> Result<BranchDecomposition, BranchError> {
    decompose_with(root, side, path, eps, Demands::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Level {
    None,
    Recursive,
    Inductive,
    RestrictedInductive,
    TameInductive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub epsilon: OrderType,
    /// Least dependency order that works, as pairs `(pj, pi)` meaning `pj < pi`.
    pub omega: Vec<(String, String)>,
    pub branches: Vec<BranchDecomposition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub level: Level,
    pub recursive: bool,
    pub inductive: bool,
    pub restricted: bool,
    pub tame: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("only unstarred inequalities without nominals, co-nominals or placeholders can be classified")]
    Unclassifiable,
}

fn transitive_closure(edges: &BTreeSet<(String, String)>) -> Option<BTreeSet<(String, String)>> {
    let mut closure = edges.clone();
    loop {
        let mut added = Vec::new();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c && !closure.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        closure.extend(added);
    }
    if closure.iter().any(|(a, b)| a == b) {
        None
    } else {
        Some(closure)
    }
}

struct Trees {
    lhs: SignedTree,
    rhs: SignedTree,
}

impl Trees {
    fn sides(&self) -> [(Side, &SignedTree); 2] {
        [(Side::Lhs, &self.lhs), (Side::Rhs, &self.rhs)]
    }
}

fn branch_set(trees: &Trees, eps: &OrderType, demands: Demands) -> Option<Vec<BranchDecomposition>> {
    let mut out = Vec::new();
    for (side, t) in trees.sides() {
        for path in critical_branches(t, eps) {
            out.push(decompose_with(t, side, &path, eps, demands).ok()?);
        }
    }
    Some(out)
}

fn with_omega(mut branches: Vec<BranchDecomposition>, eps: &OrderType) -> Option<Witness> {
    let edges: BTreeSet<(String, String)> = branches.iter().flat_map(|b| b.constraints.iter().cloned()).collect();
    let omega = transitive_closure(&edges)?;
    for b in &mut branches {
        b.flags.omega_conf = true;
    }
    Some(Witness { epsilon: eps.clone(), omega: omega.into_iter().collect(), branches })
}

/// Binder nodes of both trees as (side, path, signed tree).
fn binders(trees: &Trees) -> Vec<(Side, Vec<usize>, Polarity, bool)> {
    let mut out = Vec::new();
    for (side, t) in trees.sides() {
        t.walk(&mut Vec::new(), &mut |p, n| {
            if n.is_binder() {
                let least = matches!(n.formula, Formula::Mu(..) | Formula::MuStar(..));
                out.push((side, p.to_vec(), n.sign, least));
            }
        });
    }
    out
}

#[derive(Default)]
struct PerEpsilon {
    recursive: Option<Witness>,
    inductive: Option<Witness>,
    restricted: Option<Witness>,
    tame: Option<Witness>,
}

fn check_epsilon(trees: &Trees, eps: &OrderType) -> PerEpsilon {
    let mut r = PerEpsilon::default();
    let Some(plain) = branch_set(trees, eps, Demands::default()) else {
        return r;
    };
    r.recursive = Some(Witness { epsilon: eps.clone(), omega: vec![], branches: plain.clone() });
    r.inductive = with_omega(plain.clone(), eps);
    let crit: Vec<(Side, Vec<usize>)> = plain.iter().map(|b| (b.side, b.path.clone())).collect();
    let on_critical =
        |side: Side, p: &[usize]| crit.iter().any(|(s, c)| *s == side && c.len() > p.len() && c.starts_with(p));
    let bs = binders(trees);
    if bs.iter().all(|(s, p, _, _)| on_critical(*s, p)) {
        if let Some(strict) = branch_set(trees, eps, Demands { nb_pia: true, nl: true }) {
            r.restricted = with_omega(strict, eps);
        }
    }
    let tame_binders = bs.iter().all(|(s, p, sign, least)| {
        !on_critical(*s, p) && matches!((sign, least), (Polarity::Positive, false) | (Polarity::Negative, true))
    });
    if tame_binders && plain.iter().all(|b| b.constraints.is_empty()) {
        r.tame = Some(Witness { epsilon: eps.clone(), omega: vec![], branches: plain });
    }
    r
}

pub fn all_order_types(vars: &BTreeSet<String>) -> Vec<OrderType> {
    let vars: Vec<&String> = vars.iter().collect();
    (0u64..1 << vars.len())
        .map(|bits| {
            vars.iter()
                .enumerate()
                .map(|(i, v)| ((*v).clone(), if bits >> i & 1 == 0 { Orient::One } else { Orient::Dual }))
                .collect()
        })
        .collect()
}

/// Classifies an unstarred inequality, reporting every order type that
/// witnesses the highest class reached.
pub fn classify(ineq: &Inequality) -> Result<Classification, ClassifyError> {
    if !is_l1_input(ineq) {
        return Err(ClassifyError::Unclassifiable);
    }
    let trees = Trees { lhs: signed_tree(&ineq.lhs, Polarity::Positive), rhs: signed_tree(&ineq.rhs, Polarity::Negative) };
    let mut results = Vec::new();
    for eps in all_order_types(&ineq.prop_vars()) {
        results.push(check_epsilon(&trees, &eps));
    }
    let collect = |pick: fn(&PerEpsilon) -> &Option<Witness>| -> Vec<Witness> {
        results.iter().filter_map(|r| pick(r).clone()).collect()
    };
    let tame = collect(|r| &r.tame);
    let restricted = collect(|r| &r.restricted);
    let inductive = collect(|r| &r.inductive);
    let recursive = collect(|r| &r.recursive);
    let (level, witnesses) = if !tame.is_empty() {
        (Level::TameInductive, tame.clone())
    } else if !restricted.is_empty() {
        (Level::RestrictedInductive, restricted.clone())
    } else if !inductive.is_empty() {
        (Level::Inductive, inductive.clone())
    } else if !recursive.is_empty() {
        (Level::Recursive, recursive.clone())
    } else {
        (Level::None, vec![])
    };
    Ok(Classification {
        level,
        recursive: !recursive.is_empty(),
        inductive: !inductive.is_empty(),
        restricted: !restricted.is_empty(),
        tame: !tame.is_empty(),
        witnesses,
    })
}
