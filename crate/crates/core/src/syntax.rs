//! Concrete syntax for formulas.
//!
//! ```text
//! formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" imp)? ;
//! or := and ("|" and)* ; and := unary ("&" unary)* ;
//! unary := "~" unary | "boxI" unary | "boxF" unary | "diaI" unary | "diaF" unary
//!        | "[" ident ("," ident)* "]" unary | "[!" formula "]" unary | primary ;
//! primary := ident | "=" ident | "true" | "false" | "(" formula ")" ;
//! ```
//!
//! `[]` with no atoms is accepted for the empty ceteris-paribus index so that
//! every AST has a printed form.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::signature::Signature;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Bang,
    Comma,
    Eq,
    Word(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '!' => Tok::Bang,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '-' if text[i..].starts_with("->") => {
                i += 1;
                Tok::Arrow
            }
            '<' if text[i..].starts_with("<->") => {
                i += 2;
                Tok::DArrow
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Word(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.imp()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Word(w)) if matches!(w.as_str(), "boxI" | "boxF" | "diaI" | "diaF") => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(match w.as_str() {
                    "boxI" => Formula::box_i(inner),
                    "boxF" => Formula::box_f(inner),
                    "diaI" => Formula::dia_i(inner),
                    _ => Formula::dia_f(inner),
                })
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                if self.eat(&Tok::Bang) {
                    let announcement = self.formula()?;
                    self.expect(Tok::RBrack, "`]` closing the announcement")?;
                    let scope = self.unary()?;
                    return Ok(Formula::dynamic(announcement, scope));
                }
                let mut atoms = BTreeSet::new();
                if !self.eat(&Tok::RBrack) {
                    loop {
                        atoms.insert(self.atom_name()?);
                        if self.eat(&Tok::RBrack) {
                            break;
                        }
                        self.expect(Tok::Comma, "`,` or `]`")?;
                    }
                }
                let scope = self.unary()?;
                Ok(Formula::Cp(atoms, Box::new(scope)))
            }
            _ => self.primary(),
        }
    }

    fn atom_name(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) if is_user_atom(&w) => {
                self.pos += 1;
                Ok(w)
            }
            Some(Tok::Word(w)) => self.err(format!("`{w}` is not a valid atom name")),
            _ => self.err("expected an atom name"),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) if w == "true" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Word(w)) if w == "false" => {
                self.pos += 1;
                Ok(Formula::bottom())
            }
            Some(Tok::Word(_)) => Ok(Formula::Atom(self.atom_name()?)),
            Some(Tok::Eq) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Word(w)) => {
                        self.pos += 1;
                        Ok(Formula::Dec(w))
                    }
                    _ => self.err("expected a value name after `=`"),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn is_user_atom(w: &str) -> bool {
    w.starts_with(|c: char| c.is_ascii_lowercase())
        && crate::signature::is_atom_name(w)
}

/// Parses a formula without resolving names against a signature.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// Parses a formula and checks that every atom and value is declared.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let f = parse_formula_unchecked(text)?;
    f.check_signature(sig)?;
    Ok(f)
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse_formula_unchecked(s)
    }
}

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

/// Sugared view of a node, used only for printing.
enum View<'a> {
    False,
    Iff(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    DiaI(&'a Formula),
    DiaF(&'a Formula),
    Plain,
}

fn view(f: &Formula) -> View<'_> {
    use Formula::*;
    match f {
        Not(inner) => match inner.as_ref() {
            Top => View::False,
            And(a, b) => match (a.as_ref(), b.as_ref()) {
                // Both readings fit; `->` wins when its antecedent is itself
                // sugar, so `(p -> q) -> r` does not print as `p & ~q | r`.
                (Not(a2), Not(b)) => match view(a) {
                    View::Plain => View::Or(a2, b),
                    _ => View::Imp(a, b),
                },
                (a, Not(b)) => View::Imp(a, b),
                _ => View::Plain,
            },
            BoxI(a) => match a.as_ref() {
                Not(a) => View::DiaI(a),
                _ => View::Plain,
            },
            BoxF(a) => match a.as_ref() {
                Not(a) => View::DiaF(a),
                _ => View::Plain,
            },
            _ => View::Plain,
        },
        And(l, r) => match (view(l), view(r)) {
            (View::Imp(a, b), View::Imp(b2, a2)) if a == a2 && b == b2 => View::Iff(a, b),
            _ => View::Plain,
        },
        _ => View::Plain,
    }
}

fn level(f: &Formula) -> u8 {
    match view(f) {
        View::Iff(..) => IFF,
        View::Imp(..) => IMP,
        View::Or(..) => OR,
        View::False | View::DiaI(_) | View::DiaF(_) => UNARY,
        View::Plain => match f {
            Formula::And(..) => AND,
            _ => UNARY,
        },
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn write_binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write_at(a, left, out);
    out.push_str(op);
    write_at(b, right, out);
}

fn write(f: &Formula, out: &mut String) {
    match view(f) {
        View::False => out.push_str("false"),
        View::Iff(a, b) => write_binary(a, " <-> ", b, IFF, IMP, out),
        View::Imp(a, b) => write_binary(a, " -> ", b, OR, IMP, out),
        View::Or(a, b) => write_binary(a, " | ", b, OR, AND, out),
        View::DiaI(a) => {
            out.push_str("diaI ");
            write_at(a, UNARY, out);
        }
        View::DiaF(a) => {
            out.push_str("diaF ");
            write_at(a, UNARY, out);
        }
        View::Plain => match f {
            Formula::Top => out.push_str("true"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Dec(x) => {
                out.push('=');
                out.push_str(x);
            }
            Formula::Not(a) => {
                out.push('~');
                write_at(a, UNARY, out);
            }
            Formula::And(a, b) => write_binary(a, " & ", b, AND, UNARY, out),
            Formula::BoxI(a) => {
                out.push_str("boxI ");
                write_at(a, UNARY, out);
            }
            Formula::BoxF(a) => {
                out.push_str("boxF ");
                write_at(a, UNARY, out);
            }
            Formula::Cp(x, a) => {
                out.push('[');
                out.push_str(&x.iter().cloned().collect::<Vec<_>>().join(","));
                out.push_str("] ");
                write_at(a, UNARY, out);
            }
            Formula::Dyn(a, b) => {
                out.push_str("[! ");
                write(a, out);
                out.push_str("] ");
                write_at(b, UNARY, out);
            }
        },
    }
}

/// Prints a formula with minimal parentheses; the output re-parses to the
/// same AST.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn parses_box_i_implication() {
        let f = parse_formula_unchecked("boxI ((or & an) -> =1)").unwrap();
        assert_eq!(
            f,
            Formula::box_i(Formula::implies(
                Formula::and(a("or"), a("an")),
                Formula::dec("1")
            ))
        );
    }

    #[test]
    fn parses_dynamic_operator() {
        let f = parse_formula_unchecked("[! (or & an) -> =1] boxF =1").unwrap();
        assert_eq!(
            f,
            Formula::dynamic(
                Formula::implies(Formula::and(a("or"), a("an")), Formula::dec("1")),
                Formula::box_f(Formula::dec("1"))
            )
        );
    }

    #[test]
    fn contradictory_decisions_still_parse() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        assert_eq!(
            parse_formula("=1 & =0", &sig).unwrap(),
            Formula::and(Formula::dec("1"), Formula::dec("0"))
        );
    }

    #[test]
    fn renders_minimal_forms() {
        assert_eq!(render_formula(&Formula::not(a("p"))), "~p");
        assert_eq!(
            render_formula(&Formula::box_i(Formula::box_f(a("p")))),
            "boxI boxF p"
        );
        assert_eq!(
            render_formula(&Formula::cp(["q", "p"], Formula::dec("1"))),
            "[p,q] =1"
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula_unchecked("p | q & r -> s <-> t").unwrap();
        let expected = Formula::iff(
            Formula::implies(Formula::or(a("p"), Formula::and(a("q"), a("r"))), a("s")),
            a("t"),
        );
        assert_eq!(f, expected);
        let g = parse_formula_unchecked("p -> q -> r").unwrap();
        assert_eq!(g, Formula::implies(a("p"), Formula::implies(a("q"), a("r"))));
        assert_eq!(render_formula(&g), "p -> q -> r");
        let h = Formula::implies(Formula::implies(a("p"), a("q")), a("r"));
        assert_eq!(render_formula(&h), "(p -> q) -> r");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula_unchecked("p & & q") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula_unchecked("(p").is_err());
        assert!(parse_formula_unchecked("p q").is_err());
        assert!(parse_formula_unchecked("_w0 & p").is_err());
        assert!(parse_formula_unchecked("p $ q").is_err());
    }

    #[test]
    fn unknown_names_are_rejected() {
        let sig = Signature::new(["p"], ["0", "1"]).unwrap();
        assert_eq!(
            parse_formula("q", &sig),
            Err(Error::UnknownAtom("q".into()))
        );
        assert_eq!(
            parse_formula("=2", &sig),
            Err(Error::UnknownValue("2".into()))
        );
        assert_eq!(
            parse_formula("[q] p", &sig),
            Err(Error::UnknownAtom("q".into()))
        );
    }

    #[test]
    fn sugar_round_trips() {
        for text in [
            "diaI p",
            "diaF ~p",
            "false",
            "true",
            "~false",
            "p <-> q",
            "[] p",
            "[! p] [! q] =1",
            "~(p & q)",
            "~~p",
            "boxI (p | q) & diaF =0",
        ] {
            let f = parse_formula_unchecked(text).unwrap();
            assert_eq!(render_formula(&f), text, "rendering {text}");
        }
    }
}
