use serde::Serialize;

use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SyntacticShape {
    pub closed: bool,
    pub open: bool,
    pub almost_closed: bool,
    pub almost_open: bool,
}

#[derive(Clone, Copy)]
struct Flags {
    closed: bool,
    open: bool,
    a_closed: bool,
    a_open: bool,
}

fn go(f: &Formula) -> Flags {
    use Formula as F;
    let all = Flags { closed: true, open: true, a_closed: true, a_open: true };
    let none = Flags { closed: false, open: false, a_closed: false, a_open: false };
    match f {
        F::Bot | F::Top | F::PropVar(_) | F::FixVar(_) | F::PlaceVar(_) => all,
        F::Nominal(_) => Flags { closed: true, open: false, a_closed: true, a_open: false },
        F::CoNominal(_) => Flags { closed: false, open: true, a_closed: false, a_open: true },
        F::And(a, b) | F::Or(a, b) => {
            let (x, y) = (go(a), go(b));
            Flags {
                closed: x.closed && y.closed,
                open: x.open && y.open,
                a_closed: x.a_closed && y.a_closed,
                a_open: x.a_open && y.a_open,
            }
        }
        F::Implies(a, b) => {
            let (x, y) = (go(a), go(b));
            Flags {
                open: x.closed && y.open,
                closed: x.open && y.closed,
                a_open: x.a_closed && y.a_open,
                a_closed: x.a_open && y.a_closed,
            }
        }
        F::CoImplies(a, b) => {
            let (x, y) = (go(a), go(b));
            Flags {
                open: x.open && y.closed,
                closed: x.closed && y.open,
                a_open: x.a_open && y.a_closed,
                a_closed: x.a_closed && y.a_open,
            }
        }
        F::Box(a) | F::Dia(a) => go(a),
        F::BlackBox(a) => {
            let x = go(a);
            Flags { open: x.open, a_open: x.a_open, ..none }
        }
        F::BlackDia(a) => {
            let x = go(a);
            Flags { closed: x.closed, a_closed: x.a_closed, ..none }
        }
        F::Mu(_, a) | F::MuStar(_, a) => {
            let x = go(a);
            Flags { closed: x.closed, a_closed: x.a_closed, a_open: x.a_open, open: false }
        }
        F::Nu(_, a) | F::NuStar(_, a) => {
            let x = go(a);
            Flags { open: x.open, a_open: x.a_open, a_closed: x.a_closed, closed: false }
        }
    }
}

/// Syntactic openness and closedness by the mutual recursion over the
/// grammar. Fixed point and placeholder variables count as both open and
/// closed; unstarred binders are read as their starred versions.
pub fn syntactic_shape(f: &Formula) -> SyntacticShape {
    let x = go(f);
    SyntacticShape { closed: x.closed, open: x.open, almost_closed: x.a_closed, almost_open: x.a_open }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn shape(s: &str) -> SyntacticShape {
        syntactic_shape(&parse_formula(s).unwrap())
    }

    #[test]
    fn examples() {
        let j = shape("$j");
        assert!(j.closed && !j.open);
        assert!(shape("<b>$j").closed);
        let s = shape("mu* X. (nu* Y. Y | X)");
        assert!(!s.closed && !s.open && s.almost_closed && s.almost_open);
        let s = shape("$j -> #m");
        assert!(s.open && !s.closed);
        assert!(!shape("<b>$j -> F").closed);
        assert!(shape("<b>$j -> F").open);
    }
}
