//! Finite perfect modal bi-Heyting algebras.
//!
//! Every finite distributive lattice is perfect and is its own canonical
//! extension, so on these algebras validity and admissible validity agree and
//! the starred and unstarred binders have the same meaning.

mod battery;
mod check;
mod eval;
mod formula_gen;
mod gen;
pub mod oracle;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use battery::{battery, battery_files};
pub use check::{check_inequality, check_quasi, check_quasi_system, ValidityReport};
pub use eval::{eval, Assignment, Compiled, EvalError};
pub use formula_gen::{random_formula, FormulaConfig};
pub use gen::{random_algebra, RandomAlgebraConfig};

pub type Elem = u8;

pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub leq: Vec<(String, String)>,
    #[serde(rename = "box")]
    pub box_table: BTreeMap<String, String>,
    #[serde(rename = "dia")]
    pub dia_table: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error")]
pub enum AlgebraError {
    #[error("cannot read algebra description: {message}")]
    Format { message: String },
    #[error("unknown element {element}")]
    UnknownElement { element: String },
    #[error("algebra needs between 1 and {MAX_ELEMENTS} distinct elements")]
    BadSize { size: usize },
    #[error("duplicate element {element}")]
    DuplicateElement { element: String },
    #[error("order is not antisymmetric: {a} and {b}")]
    NotAntisymmetric { a: String, b: String },
    #[error("not a lattice: {a} and {b} have no {missing}")]
    NotALattice { a: String, b: String, missing: String },
    #[error("not distributive: {a} & ({b} | {c}) differs from ({a} & {b}) | ({a} & {c})")]
    NotDistributive { a: String, b: String, c: String },
    #[error("table for {op} has no entry for {element}")]
    MissingEntry { op: String, element: String },
    #[error("box does not preserve {}", describe_pair(a, b, "the empty meet"))]
    BoxNotMeetPreserving { a: Option<String>, b: Option<String> },
    #[error("diamond does not preserve {}", describe_pair(a, b, "the empty join"))]
    DiaNotJoinPreserving { a: Option<String>, b: Option<String> },
    #[error("internal lattice invariant failed: {message}")]
    Invariant { message: String },
}

fn describe_pair(a: &Option<String>, b: &Option<String>, empty: &str) -> String {
    match (a, b) {
        (Some(a), Some(b)) => format!("the pair {a}, {b}"),
        _ => empty.to_string(),
    }
}

/// A validated finite algebra with every derived operation tabulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    names: Vec<String>,
    /// `up[a]` has bit `b` set iff `a <= b`.
    up: Vec<u64>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    imp: Vec<Elem>,
    coimp: Vec<Elem>,
    box_t: Vec<Elem>,
    dia_t: Vec<Elem>,
    bbox_t: Vec<Elem>,
    bdia_t: Vec<Elem>,
    bot: Elem,
    top: Elem,
    jty: Vec<Elem>,
    mty: Vec<Elem>,
    kappa: BTreeMap<Elem, Elem>,
}

impl FiniteAlgebra {
    pub fn load_json(text: &str) -> Result<Self, AlgebraError> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| AlgebraError::Format { message: e.to_string() })?;
        Self::from_file(&file)
    }

    pub fn load_path(path: &std::path::Path) -> Result<Self, AlgebraError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AlgebraError::Format { message: format!("{}: {e}", path.display()) })?;
        let mut a = Self::load_json(&text)?;
        if a.name.is_empty() {
            a.name = path.display().to_string();
        }
        Ok(a)
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self, AlgebraError> {
        let n = file.elements.len();
        if n == 0 || n > MAX_ELEMENTS {
            return Err(AlgebraError::BadSize { size: n });
        }
        let mut index = BTreeMap::new();
        for (i, e) in file.elements.iter().enumerate() {
            if index.insert(e.clone(), i as Elem).is_some() {
                return Err(AlgebraError::DuplicateElement { element: e.clone() });
            }
        }
        let look = |e: &str| index.get(e).copied().ok_or_else(|| AlgebraError::UnknownElement { element: e.to_string() });
        let mut pairs = Vec::new();
        for (a, b) in &file.leq {
            pairs.push((look(a)?, look(b)?));
        }
        let table = |op: &str, t: &BTreeMap<String, String>| -> Result<Vec<Elem>, AlgebraError> {
            for k in t.keys() {
                look(k)?;
            }
            file.elements
                .iter()
                .map(|e| match t.get(e) {
                    Some(v) => look(v),
                    None => Err(AlgebraError::MissingEntry { op: op.to_string(), element: e.clone() }),
                })
                .collect()
        };
        let box_t = table("box", &file.box_table)?;
        let dia_t = table("dia", &file.dia_table)?;
        Self::from_parts(file.name.clone().unwrap_or_default(), file.elements.clone(), &pairs, box_t, dia_t)
    }

    /// Builds an algebra from generating order pairs (closed reflexively and
    /// transitively) and operator tables, checking every invariant.
    pub fn from_parts(
        name: String,
        names: Vec<String>,
        pairs: &[(Elem, Elem)],
        box_t: Vec<Elem>,
        dia_t: Vec<Elem>,
    ) -> Result<Self, AlgebraError> {
        let n = names.len();
        let nm = |e: Elem| names[e as usize].clone();
        let mut up: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(a, b) in pairs {
            up[a as usize] |= 1 << b;
        }
        loop {
            let mut changed = false;
            for a in 0..n {
                let mut acc = up[a];
                for b in 0..n {
                    if up[a] >> b & 1 == 1 {
                        acc |= up[b];
                    }
                }
                if acc != up[a] {
                    up[a] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if up[a] >> b & 1 == 1 && up[b] >> a & 1 == 1 {
                    return Err(AlgebraError::NotAntisymmetric { a: nm(a as Elem), b: nm(b as Elem) });
                }
            }
        }
        let leq = |a: usize, b: usize| up[a] >> b & 1 == 1;
        let down: Vec<u64> = (0..n).map(|b| (0..n).filter(|&a| leq(a, b)).fold(0u64, |m, a| m | 1 << a)).collect();
        let least_in = |set: u64| (0..n).find(|&u| set >> u & 1 == 1 && set & !up[u] == 0);
        let greatest_in = |set: u64| (0..n).find(|&u| set >> u & 1 == 1 && set & !down[u] == 0);
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let j = least_in(up[a] & up[b]).ok_or_else(|| AlgebraError::NotALattice {
                    a: nm(a as Elem),
                    b: nm(b as Elem),
                    missing: "join".into(),
                })?;
                let m = greatest_in(down[a] & down[b]).ok_or_else(|| AlgebraError::NotALattice {
                    a: nm(a as Elem),
                    b: nm(b as Elem),
                    missing: "meet".into(),
                })?;
                join[a * n + b] = j as Elem;
                meet[a * n + b] = m as Elem;
            }
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let bot = least_in(all).unwrap() as Elem;
        let top = greatest_in(all).unwrap() as Elem;
        let jn = |a: usize, b: usize| join[a * n + b] as usize;
        let mt = |a: usize, b: usize| meet[a * n + b] as usize;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mt(a, jn(b, c)) != jn(mt(a, b), mt(a, c)) {
                        return Err(AlgebraError::NotDistributive {
                            a: nm(a as Elem),
                            b: nm(b as Elem),
                            c: nm(c as Elem),
                        });
                    }
                }
            }
        }
        if box_t[top as usize] != top {
            return Err(AlgebraError::BoxNotMeetPreserving { a: None, b: None });
        }
        if dia_t[bot as usize] != bot {
            return Err(AlgebraError::DiaNotJoinPreserving { a: None, b: None });
        }
        for a in 0..n {
            for b in 0..n {
                if box_t[mt(a, b)] as usize != mt(box_t[a] as usize, box_t[b] as usize) {
                    return Err(AlgebraError::BoxNotMeetPreserving { a: Some(nm(a as Elem)), b: Some(nm(b as Elem)) });
                }
                if dia_t[jn(a, b)] as usize != jn(dia_t[a] as usize, dia_t[b] as usize) {
                    return Err(AlgebraError::DiaNotJoinPreserving { a: Some(nm(a as Elem)), b: Some(nm(b as Elem)) });
                }
            }
        }
        let big_join = |set: &mut dyn Iterator<Item = usize>| set.fold(bot as usize, jn);
        let big_meet = |set: &mut dyn Iterator<Item = usize>| set.fold(top as usize, mt);
        let mut imp = vec![0; n * n];
        let mut coimp = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                imp[a * n + b] = big_join(&mut (0..n).filter(|&c| leq(mt(a, c), b))) as Elem;
                coimp[a * n + b] = big_meet(&mut (0..n).filter(|&c| leq(a, jn(b, c)))) as Elem;
            }
        }
        let bdia_t: Vec<Elem> = (0..n).map(|a| big_meet(&mut (0..n).filter(|&b| leq(a, box_t[b] as usize))) as Elem).collect();
        let bbox_t: Vec<Elem> = (0..n).map(|b| big_join(&mut (0..n).filter(|&a| leq(dia_t[a] as usize, b))) as Elem).collect();
        let lower_covers = |a: usize| {
            (0..n)
                .filter(|&b| b != a && leq(b, a) && !(0..n).any(|c| c != a && c != b && leq(b, c) && leq(c, a)))
                .count()
        };
        let upper_covers = |a: usize| {
            (0..n)
                .filter(|&b| b != a && leq(a, b) && !(0..n).any(|c| c != a && c != b && leq(a, c) && leq(c, b)))
                .count()
        };
        let jty: Vec<Elem> = (0..n).filter(|&a| lower_covers(a) == 1).map(|a| a as Elem).collect();
        let mty: Vec<Elem> = (0..n).filter(|&a| upper_covers(a) == 1).map(|a| a as Elem).collect();
        let invariant = |m: String| AlgebraError::Invariant { message: m };
        for &j in &jty {
            for x in 0..n {
                for y in 0..n {
                    if leq(j as usize, jn(x, y)) && !leq(j as usize, x) && !leq(j as usize, y) {
                        return Err(invariant(format!("{} is join-irreducible but not join-prime", nm(j))));
                    }
                }
            }
        }
        for &m in &mty {
            for x in 0..n {
                for y in 0..n {
                    if leq(mt(x, y), m as usize) && !leq(x, m as usize) && !leq(y, m as usize) {
                        return Err(invariant(format!("{} is meet-irreducible but not meet-prime", nm(m))));
                    }
                }
            }
        }
        let mut kappa = BTreeMap::new();
        for &j in &jty {
            let k = big_join(&mut (0..n).filter(|&c| !leq(j as usize, c))) as Elem;
            if !mty.contains(&k) {
                return Err(invariant(format!("kappa({}) is not meet-irreducible", nm(j))));
            }
            kappa.insert(j, k);
        }
        let mut image: Vec<Elem> = kappa.values().copied().collect();
        image.sort();
        image.dedup();
        if image.len() != mty.len() {
            return Err(invariant("kappa is not a bijection".into()));
        }
        for (&j1, &k1) in &kappa {
            for (&j2, &k2) in &kappa {
                if leq(j1 as usize, j2 as usize) != leq(k1 as usize, k2 as usize) {
                    return Err(invariant("kappa is not an order isomorphism".into()));
                }
            }
        }
        Ok(FiniteAlgebra {
            name,
            names,
            up,
            meet,
            join,
            imp,
            coimp,
            box_t,
            dia_t,
            bbox_t,
            bdia_t,
            bot,
            top,
            jty,
            mty,
            kappa,
        })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.names.len() as Elem
    }

    pub fn element_name(&self, e: Elem) -> &str {
        &self.names[e as usize]
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as Elem)
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.up[a as usize] >> b & 1 == 1
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    fn at(&self, t: &[Elem], a: Elem, b: Elem) -> Elem {
        t[a as usize * self.names.len() + b as usize]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.at(&self.meet, a, b)
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.at(&self.join, a, b)
    }

    pub fn heyting_imp(&self, a: Elem, b: Elem) -> Elem {
        self.at(&self.imp, a, b)
    }

    pub fn co_imp(&self, a: Elem, b: Elem) -> Elem {
        self.at(&self.coimp, a, b)
    }

    pub fn boxv(&self, a: Elem) -> Elem {
        self.box_t[a as usize]
    }

    pub fn dia(&self, a: Elem) -> Elem {
        self.dia_t[a as usize]
    }

    pub fn black_box(&self, a: Elem) -> Elem {
        self.bbox_t[a as usize]
    }

    pub fn black_dia(&self, a: Elem) -> Elem {
        self.bdia_t[a as usize]
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.bot, |a, b| self.join(a, b))
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.top, |a, b| self.meet(a, b))
    }

    /// Completely join-irreducible elements.
    pub fn jty(&self) -> &[Elem] {
        &self.jty
    }

    /// Completely meet-irreducible elements.
    pub fn mty(&self) -> &[Elem] {
        &self.mty
    }

    pub fn kappa(&self, j: Elem) -> Option<Elem> {
        self.kappa.get(&j).copied()
    }

    pub fn kappa_inverse(&self, m: Elem) -> Option<Elem> {
        self.kappa.iter().find(|(_, &k)| k == m).map(|(&j, _)| j)
    }

    pub fn to_file(&self) -> AlgebraFile {
        let n = self.size();
        let mut leq = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a as Elem, b as Elem) {
                    leq.push((self.names[a].clone(), self.names[b].clone()));
                }
            }
        }
        let table = |t: &[Elem]| (0..n).map(|a| (self.names[a].clone(), self.names[t[a] as usize].clone())).collect();
        AlgebraFile {
            name: if self.name.is_empty() { None } else { Some(self.name.clone()) },
            elements: self.names.clone(),
            leq,
            box_table: table(&self.box_t),
            dia_table: table(&self.dia_t),
        }
    }
}
