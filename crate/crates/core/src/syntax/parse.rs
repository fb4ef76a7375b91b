use super::{is_positive_in, Formula, Inequality, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax { pos: usize, expected: Vec<String>, found: String },
    #[error("fixed point variable {var} occurs negatively in the body of its binder at {pos}")]
    Polarity { pos: usize, var: String },
    #[error("placeholder ?{name} is not allowed in an input inequality")]
    PlaceholderInInput { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Top,
    Bot,
    And,
    Or,
    Imp,
    CoImp,
    Box,
    Dia,
    BBox,
    BDia,
    Mu(bool),
    Nu(bool),
    Dot,
    LParen,
    RParen,
    Leq,
    Prop(String),
    Fix(String),
    Nom(String),
    CoNom(String),
    Place(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Top => "`T`".into(),
            Tok::Bot => "`F`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::CoImp => "`-<`".into(),
            Tok::Box => "`[]`".into(),
            Tok::Dia => "`<>`".into(),
            Tok::BBox => "`[b]`".into(),
            Tok::BDia => "`<b>`".into(),
            Tok::Mu(s) => if *s { "`mu*`".into() } else { "`mu`".into() },
            Tok::Nu(s) => if *s { "`nu*`".into() } else { "`nu`".into() },
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Leq => "`<=`".into(),
            Tok::Prop(n) => format!("variable `{n}`"),
            Tok::Fix(n) => format!("fixed point variable `{n}`"),
            Tok::Nom(n) => format!("nominal `${n}`"),
            Tok::CoNom(n) => format!("co-nominal `#{n}`"),
            Tok::Place(n) => format!("placeholder `?{n}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, found: &str| ParseError::Syntax {
        pos,
        expected: vec!["a token".into()],
        found: found.to_string(),
    };
    let skip_ws = |mut k: usize| {
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        k
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let peek = |k: usize| chars.get(k).map(|x| x.1);
        let ident = |start: usize| {
            let mut k = start;
            while k < chars.len() && is_ident_char(chars[k].1) {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|x| x.1).collect();
            (s, k)
        };
        match c {
            '&' => { out.push((pos, Tok::And)); i += 1; }
            '|' => { out.push((pos, Tok::Or)); i += 1; }
            '.' => { out.push((pos, Tok::Dot)); i += 1; }
            '(' => { out.push((pos, Tok::LParen)); i += 1; }
            ')' => { out.push((pos, Tok::RParen)); i += 1; }
            '-' => match peek(i + 1) {
                Some('>') => { out.push((pos, Tok::Imp)); i += 2; }
                Some('<') => { out.push((pos, Tok::CoImp)); i += 2; }
                _ => return Err(err(pos, "-")),
            },
            '[' => {
                let k = skip_ws(i + 1);
                match peek(k) {
                    Some(']') => { out.push((pos, Tok::Box)); i = k + 1; }
                    Some('b') => {
                        let k2 = skip_ws(k + 1);
                        if peek(k2) == Some(']') {
                            out.push((pos, Tok::BBox));
                            i = k2 + 1;
                        } else {
                            return Err(err(pos, "["));
                        }
                    }
                    _ => return Err(err(pos, "[")),
                }
            }
            '<' => {
                if peek(i + 1) == Some('=') {
                    out.push((pos, Tok::Leq));
                    i += 2;
                    continue;
                }
                let k = skip_ws(i + 1);
                match peek(k) {
                    Some('>') => { out.push((pos, Tok::Dia)); i = k + 1; }
                    Some('b') => {
                        let k2 = skip_ws(k + 1);
                        if peek(k2) == Some('>') {
                            out.push((pos, Tok::BDia));
                            i = k2 + 1;
                        } else {
                            return Err(err(pos, "<"));
                        }
                    }
                    _ => return Err(err(pos, "<")),
                }
            }
            '$' | '#' | '?' => {
                let (name, k) = ident(i + 1);
                if name.is_empty() {
                    return Err(err(pos, &c.to_string()));
                }
                let t = match c {
                    '$' => Tok::Nom(name),
                    '#' => Tok::CoNom(name),
                    _ => Tok::Place(name),
                };
                out.push((pos, t));
                i = k;
            }
            c if c.is_ascii_alphabetic() => {
                let (name, k) = ident(i);
                i = k;
                let starred = peek(i) == Some('*');
                let t = match name.as_str() {
                    "T" => Tok::Top,
                    "F" => Tok::Bot,
                    "mu" | "nu" => {
                        if starred {
                            i += 1;
                        }
                        if name == "mu" { Tok::Mu(starred) } else { Tok::Nu(starred) }
                    }
                    _ if c.is_ascii_uppercase() => Tok::Fix(name),
                    _ => Tok::Prop(name),
                };
                out.push((pos, t));
            }
            _ => return Err(err(pos, &c.to_string())),
        }
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&[what])
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Mu(_) | Tok::Nu(_) => self.binder(),
            _ => self.implication(),
        }
    }

    fn binder(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let kind = self.bump();
        let var = match self.peek().clone() {
            Tok::Fix(n) => {
                self.bump();
                n
            }
            _ => return self.fail(&["an uppercase fixed point variable"]),
        };
        self.expect(Tok::Dot, "`.`")?;
        let body = self.formula()?;
        if !is_positive_in(&body, &Var::Fix(var.clone())) {
            return Err(ParseError::Polarity { pos, var });
        }
        Ok(match kind {
            Tok::Mu(false) => Formula::mu(&var, body),
            Tok::Mu(true) => Formula::mu_star(&var, body),
            Tok::Nu(false) => Formula::nu(&var, body),
            _ => Formula::nu_star(&var, body),
        })
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.disjunction()?;
        loop {
            match self.peek() {
                Tok::Imp => {
                    self.bump();
                    let rhs = self.formula()?;
                    return Ok(Formula::imp(lhs, rhs));
                }
                Tok::CoImp => {
                    self.bump();
                    let binder_next = matches!(self.peek(), Tok::Mu(_) | Tok::Nu(_));
                    let rhs = if binder_next { self.binder()? } else { self.disjunction()? };
                    lhs = Formula::coimp(lhs, rhs);
                    if binder_next {
                        return Ok(lhs);
                    }
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match t {
            Tok::Box | Tok::Dia | Tok::BBox | Tok::BDia => {
                self.bump();
                let a = self.unary()?;
                Ok(match t {
                    Tok::Box => Formula::boxf(a),
                    Tok::Dia => Formula::dia(a),
                    Tok::BBox => Formula::bbox(a),
                    _ => Formula::bdia(a),
                })
            }
            Tok::Mu(_) | Tok::Nu(_) => self.binder(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Top => { self.bump(); Ok(Formula::Top) }
            Tok::Bot => { self.bump(); Ok(Formula::Bot) }
            Tok::Prop(n) => { self.bump(); Ok(Formula::PropVar(n)) }
            Tok::Fix(n) => { self.bump(); Ok(Formula::FixVar(n)) }
            Tok::Nom(n) => { self.bump(); Ok(Formula::Nominal(n)) }
            Tok::CoNom(n) => { self.bump(); Ok(Formula::CoNominal(n)) }
            Tok::Place(n) => { self.bump(); Ok(Formula::PlaceVar(n)) }
            _ => self.fail(&["a formula"]),
        }
    }
}

/// Parses a single formula. Placeholders are accepted here so that inner
/// formula templates can be written down.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    Ok(f)
}

/// Parses `lhs <= rhs`.
pub fn parse_inequality(text: &str) -> Result<Inequality, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let lhs = p.formula()?;
    p.expect(Tok::Leq, "`<=`")?;
    let rhs = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    Ok(Inequality::new(lhs, rhs))
}

/// Parses an inequality given as user input, where placeholders are rejected.
pub fn parse_input_inequality(text: &str) -> Result<Inequality, ParseError> {
    let ineq = parse_inequality(text)?;
    for f in [&ineq.lhs, &ineq.rhs] {
        let mut found = None;
        f.visit(&mut |g| {
            if let (None, Formula::PlaceVar(n)) = (&found, g) {
                found = Some(n.clone());
            }
        });
        if let Some(name) = found {
            return Err(ParseError::PlaceholderInInput { name });
        }
    }
    Ok(ineq)
}
