use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Formula, Polarity};

#[derive(Debug, Clone)]
pub struct FormulaConfig {
    pub props: Vec<String>,
    pub noms: Vec<String>,
    pub conoms: Vec<String>,
    pub max_depth: usize,
    /// Allow fixed point binders.
    pub binders: bool,
    /// Emit `mu*`/`nu*` instead of `mu`/`nu`.
    pub starred: bool,
    /// Allow the black modalities.
    pub black: bool,
    /// Allow implication and co-implication.
    pub residuals: bool,
}

impl FormulaConfig {
    pub fn l1(props: &[&str], max_depth: usize) -> Self {
        FormulaConfig {
            props: props.iter().map(|s| s.to_string()).collect(),
            noms: vec![],
            conoms: vec![],
            max_depth,
            binders: true,
            starred: false,
            black: false,
            residuals: true,
        }
    }
}

const FIX_NAMES: [&str; 4] = ["X", "Y", "Z", "W"];

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a FormulaConfig,
    /// Bound fixed point variables with the sign they were bound under.
    bound: Vec<(String, Polarity)>,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, sign: Polarity) -> Formula {
        let mut opts: Vec<Formula> = vec![Formula::Bot, Formula::Top];
        for p in &self.cfg.props {
            for _ in 0..3 {
                opts.push(Formula::PropVar(p.clone()));
            }
        }
        for j in &self.cfg.noms {
            opts.push(Formula::Nominal(j.clone()));
        }
        for m in &self.cfg.conoms {
            opts.push(Formula::CoNominal(m.clone()));
        }
        for (x, s) in &self.bound {
            if *s == sign {
                for _ in 0..3 {
                    opts.push(Formula::FixVar(x.clone()));
                }
            }
        }
        opts.choose(self.rng).unwrap().clone()
    }

    fn go(&mut self, depth: usize, sign: Polarity) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(sign);
        }
        let d = depth - 1;
        let mut ops = vec![0, 0, 1, 1, 2, 3];
        if self.cfg.residuals {
            ops.extend([4, 5]);
        }
        if self.cfg.black {
            ops.extend([6, 7]);
        }
        if self.cfg.binders && self.bound.len() < FIX_NAMES.len() {
            ops.extend([8, 9]);
        }
        let b = Box::new;
        match *ops.choose(self.rng).unwrap() {
            0 => Formula::And(b(self.go(d, sign)), b(self.go(d, sign))),
            1 => Formula::Or(b(self.go(d, sign)), b(self.go(d, sign))),
            2 => Formula::Box(b(self.go(d, sign))),
            3 => Formula::Dia(b(self.go(d, sign))),
            4 => Formula::Implies(b(self.go(d, sign.flip())), b(self.go(d, sign))),
            5 => Formula::CoImplies(b(self.go(d, sign)), b(self.go(d, sign.flip()))),
            6 => Formula::BlackBox(b(self.go(d, sign))),
            7 => Formula::BlackDia(b(self.go(d, sign))),
            op => {
                let x = FIX_NAMES[self.bound.len()].to_string();
                self.bound.push((x.clone(), sign));
                let body = b(self.go(d, sign));
                self.bound.pop();
                match (op == 8, self.cfg.starred) {
                    (true, false) => Formula::Mu(x, body),
                    (false, false) => Formula::Nu(x, body),
                    (true, true) => Formula::MuStar(x, body),
                    (false, true) => Formula::NuStar(x, body),
                }
            }
        }
    }
}

/// A random formula whose fixed point variables occur only positively in
/// their binders.
pub fn random_formula(rng: &mut impl Rng, cfg: &FormulaConfig) -> Formula {
    Gen { rng, cfg, bound: vec![] }.go(cfg.max_depth, Polarity::Positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{is_positive_in, parse_formula, print_formula, Var};
    use rand::SeedableRng;

    #[test]
    fn binders_are_positive_and_reparse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cfg = FormulaConfig::l1(&["p", "q"], 5);
        for _ in 0..500 {
            let f = random_formula(&mut rng, &cfg);
            assert!(f.free_fix_vars().is_empty());
            f.visit(&mut |g| {
                if let Some((x, body)) = g.binder() {
                    assert!(is_positive_in(body, &Var::Fix(x.to_string())));
                }
            });
            assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        }
    }
}
