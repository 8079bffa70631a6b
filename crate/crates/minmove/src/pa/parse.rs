//! Hand-rolled lexer and recursive-descent parser for the formula grammar:
//!
//! ```text
//! formula := ('exists'|'forall') ident+ ':' formula | disj
//! disj    := conj ('or' conj)*
//! conj    := unit ('and' unit)*
//! unit    := atom | 'not' unit | '(' formula ')'
//! atom    := linexpr ('<='|'>='|'='|'<'|'>') linexpr
//! linexpr := ['-'] term (('+'|'-') term)* ; term := int '*' ident | ident | int
//! ```
//!
//! `#` starts a comment running to end of line. Surface relations are
//! normalized to `≤` atoms (`=` expands to a two-atom conjunction).

use super::{Int, LinearAtom, PaFormula};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(Int),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Colon,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            out.push(Spanned { tok: $tok, line: $l, col: $c })
        };
    }

    while let Some(&ch) = chars.peek() {
        let (tl, tc) = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, tl, tc);
            }
            '-' => {
                chars.next();
                col += 1;
                push!(Tok::Minus, tl, tc);
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, tl, tc);
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, tl, tc);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, tl, tc);
            }
            ':' => {
                chars.next();
                col += 1;
                push!(Tok::Colon, tl, tc);
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Le, tl, tc);
                } else {
                    push!(Tok::Lt, tl, tc);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ge, tl, tc);
                } else {
                    push!(Tok::Gt, tl, tc);
                }
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, tl, tc);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let n: Int = s.parse().map_err(|_| Error::Parse {
                    line: tl,
                    col: tc,
                    msg: format!("integer literal `{s}` out of range"),
                })?;
                push!(Tok::Int(n), tl, tc);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(s), tl, tc);
            }
            c => {
                return Err(Error::Parse {
                    line: tl,
                    col: tc,
                    msg: format!("unknown token `{c}`"),
                });
            }
        }
    }
    push!(Tok::Eof, line, col);
    Ok(out)
}

enum Rel {
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<PaFormula> {
        if self.at_keyword("exists") || self.at_keyword("forall") {
            let is_exists = self.at_keyword("exists");
            self.next();
            let mut vars = Vec::new();
            loop {
                match &self.peek().tok {
                    Tok::Ident(s) if !is_reserved(s) => {
                        vars.push(s.clone());
                        self.next();
                    }
                    Tok::Colon if !vars.is_empty() => break,
                    _ => {
                        if vars.is_empty() {
                            return self.err("expected variable name after quantifier");
                        }
                        return self.err("expected variable name or `:`");
                    }
                }
            }
            self.expect(Tok::Colon, "`:`")?;
            let body = self.formula()?;
            Ok(if is_exists {
                PaFormula::exists(vars, body)
            } else {
                PaFormula::forall(vars, body)
            })
        } else {
            self.disj()
        }
    }

    fn disj(&mut self) -> Result<PaFormula> {
        let first = self.conj()?;
        let mut parts = vec![first];
        while self.at_keyword("or") {
            self.next();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PaFormula::Or(parts) })
    }

    fn conj(&mut self) -> Result<PaFormula> {
        let first = self.unit()?;
        let mut parts = vec![first];
        while self.at_keyword("and") {
            self.next();
            parts.push(self.unit()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PaFormula::And(parts) })
    }

    fn unit(&mut self) -> Result<PaFormula> {
        if self.at_keyword("not") {
            self.next();
            return Ok(PaFormula::not(self.unit()?));
        }
        if self.peek().tok == Tok::LParen {
            self.next();
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<PaFormula> {
        let (lhs_terms, lhs_const) = self.linexpr()?;
        let rel = match self.next().tok {
            Tok::Le => Rel::Le,
            Tok::Ge => Rel::Ge,
            Tok::Lt => Rel::Lt,
            Tok::Gt => Rel::Gt,
            Tok::Eq => Rel::Eq,
            _ => {
                self.pos -= 1;
                return self.err("expected a relation (`<=`, `>=`, `=`, `<`, `>`)");
            }
        };
        let (rhs_terms, rhs_const) = self.linexpr()?;

        // Normal form: (lhs − rhs) REL 0, i.e. terms·x ≤ −const under ≤.
        let mut terms = lhs_terms;
        for (v, c) in rhs_terms {
            terms.push((v, -c));
        }
        let constant = lhs_const - rhs_const;
        let le = |ts: &[(String, Int)], b: Int| LinearAtom::new(ts.iter().cloned(), b);
        let neg: Vec<(String, Int)> = terms.iter().map(|(v, c)| (v.clone(), -c)).collect();
        Ok(match rel {
            Rel::Le => PaFormula::Atom(le(&terms, -constant)),
            Rel::Lt => PaFormula::Atom(le(&terms, -constant - 1)),
            Rel::Ge => PaFormula::Atom(le(&neg, constant)),
            Rel::Gt => PaFormula::Atom(le(&neg, constant - 1)),
            Rel::Eq => PaFormula::And(vec![
                PaFormula::Atom(le(&terms, -constant)),
                PaFormula::Atom(le(&neg, constant)),
            ]),
        })
    }

    /// Returns the variable terms and the constant part of a linear expression.
    fn linexpr(&mut self) -> Result<(Vec<(String, Int)>, Int)> {
        let mut terms: Vec<(String, Int)> = Vec::new();
        let mut constant: Int = 0;
        let mut sign: Int = 1;
        if self.peek().tok == Tok::Minus {
            self.next();
            sign = -1;
        }
        loop {
            match self.next().tok {
                Tok::Int(n) => {
                    if self.peek().tok == Tok::Star {
                        self.next();
                        match self.next().tok {
                            Tok::Ident(v) if !is_reserved(&v) => terms.push((v, sign * n)),
                            _ => {
                                self.pos -= 1;
                                return self.err("expected variable after `*`");
                            }
                        }
                    } else {
                        constant += sign * n;
                    }
                }
                Tok::Ident(v) if !is_reserved(&v) => terms.push((v, sign)),
                _ => {
                    self.pos -= 1;
                    return self.err("expected a term");
                }
            }
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    sign = 1;
                }
                Tok::Minus => {
                    self.next();
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok((terms, constant))
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "exists" | "forall" | "and" | "or" | "not")
}

/// Parses a formula in the grammar above, normalizing relations to `≤` atoms
/// and validating that no variable is bound twice.
pub fn parse_formula(text: &str) -> Result<PaFormula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if p.peek().tok != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    f.validate_bindings()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa::print_formula;

    #[test]
    fn direct_ast_transcription() {
        let f = parse_formula("exists x : x <= 0 and -1*x <= 0").unwrap();
        let expected = PaFormula::exists(
            vec!["x".into()],
            PaFormula::And(vec![
                PaFormula::Atom(LinearAtom::single("x", 1, 0)),
                PaFormula::Atom(LinearAtom::single("x", -1, 0)),
            ]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn strict_relation_shifts_bound() {
        let f = parse_formula("x < 3").unwrap();
        assert_eq!(f, PaFormula::Atom(LinearAtom::single("x", 1, 2)));
        let g = parse_formula("x > 3").unwrap();
        assert_eq!(g, PaFormula::Atom(LinearAtom::single("x", -1, -4)));
    }

    #[test]
    fn equality_expands_to_two_atoms() {
        // x + y = 2  →  (x + y ≤ 2) ∧ (−x − y ≤ −2)
        let f = parse_formula("x + y = 2").unwrap();
        let expected = PaFormula::And(vec![
            PaFormula::Atom(LinearAtom::new([("x", 1), ("y", 1)], 2)),
            PaFormula::Atom(LinearAtom::new([("x", -1), ("y", -1)], -2)),
        ]);
        assert_eq!(f, expected);
    }

    #[test]
    fn rejects_duplicate_bound_variable() {
        let err = parse_formula("exists x : exists x : x <= 0").unwrap_err();
        assert!(matches!(err, Error::DuplicateBinding(v) if v == "x"));
        let err = parse_formula("exists x x : x <= 0").unwrap_err();
        assert!(matches!(err, Error::DuplicateBinding(_)));
    }

    #[test]
    fn reports_position_for_unknown_token() {
        let err = parse_formula("x <= 0 and\n y @ 3").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn comments_and_precedence() {
        let f = parse_formula("# leading comment\nx <= 0 or y <= 1 and z <= 2 # tail").unwrap();
        match f {
            PaFormula::Or(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(parts[1], PaFormula::And(_)));
            }
            other => panic!("expected or at top, got {other:?}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let texts = [
            "exists x y : (x - 2*y <= 4 or not (x <= 0)) and y >= 1",
            "forall a : exists b : a + b <= 0 and -a - b <= 0",
            "0 <= 3",
            "not (x < 0)",
        ];
        for t in texts {
            let f = parse_formula(t).unwrap();
            let printed = print_formula(&f);
            let g = parse_formula(&printed).unwrap();
            assert_eq!(f, g, "round-trip failed for `{t}` printed as `{printed}`");
        }
    }
}
