use super::{Formula, Inequality};

fn binary_level(f: &Formula) -> Option<u8> {
    match f {
        Formula::Implies(..) | Formula::CoImplies(..) => Some(1),
        Formula::Or(..) => Some(2),
        Formula::And(..) => Some(3),
        _ => None,
    }
}

fn atom(f: &Formula) -> Option<String> {
    Some(match f {
        Formula::Bot => "F".into(),
        Formula::Top => "T".into(),
        Formula::PropVar(n) | Formula::FixVar(n) => n.clone(),
        Formula::PlaceVar(n) => format!("?{n}"),
        Formula::Nominal(n) => format!("${n}"),
        Formula::CoNominal(n) => format!("#{n}"),
        _ => return None,
    })
}

fn write(f: &Formula, out: &mut String) {
    if let Some(a) = atom(f) {
        out.push_str(&a);
        return;
    }
    if let Some((x, body)) = f.binder() {
        let kw = match f {
            Formula::Mu(..) => "mu",
            Formula::Nu(..) => "nu",
            Formula::MuStar(..) => "mu*",
            _ => "nu*",
        };
        out.push_str(kw);
        out.push(' ');
        out.push_str(x);
        out.push_str(".(");
        write(body, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Box(a) | Formula::Dia(a) | Formula::BlackBox(a) | Formula::BlackDia(a) => {
            out.push_str(match f {
                Formula::Box(_) => "[]",
                Formula::Dia(_) => "<>",
                Formula::BlackBox(_) => "[b]",
                _ => "<b>",
            });
            operand(a, a.is_binder() || binary_level(a).is_some(), out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::CoImplies(a, b) => {
            let me = binary_level(f).unwrap();
            let op = match f {
                Formula::And(..) => " & ",
                Formula::Or(..) => " | ",
                Formula::Implies(..) => " -> ",
                _ => " -< ",
            };
            let wrap = |c: &Formula, right: bool| {
                if c.is_binder() {
                    return true;
                }
                match binary_level(c) {
                    None => false,
                    Some(1) => true,
                    Some(l) => l < me || (l == me && right),
                }
            };
            operand(a, wrap(a, false), out);
            out.push_str(op);
            operand(b, wrap(b, true), out);
        }
        _ => unreachable!(),
    }
}

fn operand(f: &Formula, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write(f, &mut s);
    s
}

pub fn print_inequality(ineq: &Inequality) -> String {
    format!("{} <= {}", print_formula(&ineq.lhs), print_formula(&ineq.rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn examples() {
        assert_eq!(print_formula(&Formula::Bot), "F");
        let f = Formula::mu("X", Formula::or(Formula::prop("p"), Formula::dia(Formula::fix("X"))));
        assert_eq!(print_formula(&f), "mu X.(p | <>X)");
        assert_eq!(print_formula(&Formula::mu_star("X", Formula::fix("X"))), "mu* X.(X)");
        let g = parse_formula("(p -> q) -> r & (s | t)").unwrap();
        assert_eq!(print_formula(&g), "(p -> q) -> r & (s | t)");
        let h = parse_formula("<>(mu X. X) & p").unwrap();
        assert_eq!(print_formula(&h), "<>(mu X.(X)) & p");
    }
}
