use num_bigint::BigUint;

use crate::syntax::{is_negative_in, is_positive_in, substitute_one, Formula, Inequality, Polarity, Var};

/// One distribution step anywhere in the tree signed `sign`, leftmost
/// outermost first.
fn distribute(f: &Formula, sign: Polarity) -> Option<Formula> {
    use Formula as F;
    let b = |x: Formula| Box::new(x);
    let here = match (f, sign) {
        (F::Dia(a), Polarity::Positive) => match &**a {
            F::Or(x, y) => Some(F::Or(b(F::Dia(x.clone())), b(F::Dia(y.clone())))),
            _ => None,
        },
        (F::And(l, r), Polarity::Positive) => match (&**l, &**r) {
            (F::Or(x, y), _) => Some(F::Or(b(F::And(x.clone(), r.clone())), b(F::And(y.clone(), r.clone())))),
            (_, F::Or(x, y)) => Some(F::Or(b(F::And(l.clone(), x.clone())), b(F::And(l.clone(), y.clone())))),
            _ => None,
        },
        (F::Box(a), Polarity::Negative) => match &**a {
            F::And(x, y) => Some(F::And(b(F::Box(x.clone())), b(F::Box(y.clone())))),
            _ => None,
        },
        (F::Or(l, r), Polarity::Negative) => match (&**l, &**r) {
            (F::And(x, y), _) => Some(F::And(b(F::Or(x.clone(), r.clone())), b(F::Or(y.clone(), r.clone())))),
            (_, F::And(x, y)) => Some(F::And(b(F::Or(l.clone(), x.clone())), b(F::Or(l.clone(), y.clone())))),
            _ => None,
        },
        _ => None,
    };
    if here.is_some() {
        return here;
    }
    let kids = f.children();
    for (i, c) in kids.iter().enumerate() {
        let s = if f.child_flips(i) { sign.flip() } else { sign };
        if let Some(new) = distribute(c, s) {
            let mut v: Vec<Formula> = kids.iter().map(|k| (*k).clone()).collect();
            v[i] = new;
            return Some(f.with_children(v));
        }
    }
    None
}

/// Strictly decreases under every distribution step: joins below a
/// distributing operator are counted multiplicatively.
pub fn distribution_measure(f: &Formula, sign: Polarity) -> BigUint {
    use Formula as F;
    let two = || BigUint::from(2u32);
    let m = |g: &Formula, s: Polarity| distribution_measure(g, s);
    match (f, sign) {
        (F::Or(a, b), Polarity::Positive) | (F::And(a, b), Polarity::Negative) => m(a, sign) + m(b, sign) + 1u32,
        (F::And(a, b), Polarity::Positive) | (F::Or(a, b), Polarity::Negative) => m(a, sign) * m(b, sign),
        (F::Dia(a), Polarity::Positive) | (F::Box(a), Polarity::Negative) => {
            let x = m(a, sign);
            &x * &x
        }
        _ => {
            let kids = f.children();
            if kids.is_empty() {
                return two();
            }
            let mut total = BigUint::from(1u32);
            for (i, c) in kids.iter().enumerate() {
                total += m(c, if f.child_flips(i) { sign.flip() } else { sign });
            }
            total
        }
    }
}

fn ineq_measure(i: &Inequality) -> BigUint {
    distribution_measure(&i.lhs, Polarity::Positive) + distribution_measure(&i.rhs, Polarity::Negative)
}

fn distribute_ineq(i: &Inequality) -> Option<Inequality> {
    if let Some(l) = distribute(&i.lhs, Polarity::Positive) {
        return Some(Inequality::new(l, i.rhs.clone()));
    }
    distribute(&i.rhs, Polarity::Negative).map(|r| Inequality::new(i.lhs.clone(), r))
}

fn split(i: &Inequality) -> Option<[Inequality; 2]> {
    if let Formula::Or(a, b) = &i.lhs {
        return Some([Inequality::new((**a).clone(), i.rhs.clone()), Inequality::new((**b).clone(), i.rhs.clone())]);
    }
    if let Formula::And(a, b) = &i.rhs {
        return Some([Inequality::new(i.lhs.clone(), (**a).clone()), Inequality::new(i.lhs.clone(), (**b).clone())]);
    }
    None
}

/// (bot) when the inequality is positive in p, (top) when it is negative in p.
fn eliminate(i: &Inequality) -> Option<Inequality> {
    for p in i.prop_vars() {
        let v = Var::Prop(p);
        let c = if is_negative_in(&i.lhs, &v) && is_positive_in(&i.rhs, &v) {
            Formula::Bot
        } else if is_positive_in(&i.lhs, &v) && is_negative_in(&i.rhs, &v) {
            Formula::Top
        } else {
            continue;
        };
        return Some(Inequality::new(substitute_one(&i.lhs, &v, &c), substitute_one(&i.rhs, &v, &c)));
    }
    None
}

/// Distribution, splitting and monotone elimination, applied exhaustively.
pub fn preprocess(ineq: &Inequality) -> Vec<Inequality> {
    let mut work = vec![ineq.clone()];
    let mut done = Vec::new();
    while let Some(mut cur) = work.pop() {
        loop {
            if let Some(next) = distribute_ineq(&cur) {
                debug_assert!(ineq_measure(&next) < ineq_measure(&cur), "distribution measure must drop");
                cur = next;
                continue;
            }
            if let Some([a, b]) = split(&cur) {
                work.push(b);
                cur = a;
                continue;
            }
            if let Some(next) = eliminate(&cur) {
                cur = next;
                continue;
            }
            break;
        }
        if !done.contains(&cur) {
            done.push(cur);
        }
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_inequality;

    fn pre(s: &str) -> Vec<Inequality> {
        preprocess(&parse_inequality(s).unwrap())
    }

    #[test]
    fn tame_example_splits() {
        let out = pre("<>([]F | p) & []q <= mu Y. (<>(p & q) & []Y)");
        assert_eq!(
            out,
            vec![
                parse_inequality("<>[]F & []q <= mu Y. (<>(F & q) & []Y)").unwrap(),
                parse_inequality("<>p & []q <= mu Y. (<>(p & q) & []Y)").unwrap(),
            ]
        );
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(pre("p <= p"), vec![parse_inequality("p <= p").unwrap()]);
        let [a, b] = split(&parse_inequality("p | q <= r").unwrap()).unwrap();
        assert_eq!([a, b], [parse_inequality("p <= r").unwrap(), parse_inequality("q <= r").unwrap()]);
        // Both halves are then monotone in every variable.
        assert_eq!(pre("p | q <= r"), vec![parse_inequality("T <= F").unwrap()]);
    }
}
