//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula    := "forall" VAR "." formula
//!             | "exists" VAR "." formula
//!             | implication
//! implication:= disjunction [ "->" formula ]
//! disjunction:= conjunction { "|" conjunction }
//! conjunction:= negation { "&" negation }
//! negation   := "!" negation | atom
//! atom       := "(" formula ")" | term "=" term
//! term       := factor { "+" factor }
//! factor     := power { "*" power }
//! power      := primary [ "^" NAT ]
//! primary    := "0" | "1" | NAT | VAR | "(" term ")"
//! ```
//!
//! Integer literals `>= 2` desugar to `1 + ... + 1` and `^k` to repeated
//! multiplication, so the parsed tree stays inside the bare ring signature.

use thiserror::Error;

use super::{Formula, Sym, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Forall,
    Exists,
    Ident(String),
    Nat(u64),
    Dot,
    LParen,
    RParen,
    Eq,
    Plus,
    Star,
    Caret,
    Arrow,
    Amp,
    Bar,
    Bang,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>, line: &mut usize, col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars, &mut line, &mut col);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars, &mut line, &mut col);
                }
            }
            '.' | '(' | ')' | '=' | '+' | '*' | '^' | '&' | '|' | '!' => {
                bump(&mut chars, &mut line, &mut col);
                let tok = match c {
                    '.' => Tok::Dot,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    _ => Tok::Bang,
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars, &mut line, &mut col);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars, &mut line, &mut col);
                        out.push(Spanned { tok: Tok::Arrow, line: tline, col: tcol });
                    }
                    _ => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            message: "expected '->' (the language has no subtraction)".into(),
                        })
                    }
                }
            }
            '0'..='9' => {
                let mut value: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        bump(&mut chars, &mut line, &mut col);
                        value = value
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(digit as u64))
                            .ok_or_else(|| ParseError {
                                line: tline,
                                col: tcol,
                                message: "integer literal too large".into(),
                            })?;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Nat(value), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(name),
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let is_forall = self.peek() == Some(&Tok::Forall);
                self.pos += 1;
                let err = self.error("expected a variable after the quantifier");
                let name = match self.advance() {
                    Some(Tok::Ident(name)) => name,
                    _ => return Err(err),
                };
                self.expect(Tok::Dot, "'.' after the quantified variable")?;
                let body = self.formula()?;
                let sym = Sym::intern(&name);
                Ok(if is_forall {
                    Formula::forall(sym, body)
                } else {
                    Formula::exists(sym, body)
                })
            }
            _ => self.implication(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.negation()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            f = Formula::and(f, self.negation()?);
        }
        Ok(f)
    }

    fn negation(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            Ok(Formula::not(self.negation()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        // "(" may open either a parenthesized formula or a parenthesized
        // term; try the formula reading first and fall back.
        if self.peek() == Some(&Tok::LParen) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    // Guard against "(t) = s": if an equality continues, the
                    // parenthesis belonged to a term after all.
                    if !matches!(self.peek(), Some(Tok::Eq) | Some(Tok::Plus) | Some(Tok::Star) | Some(Tok::Caret)) {
                        return Ok(f);
                    }
                }
            }
            self.pos = save;
        }
        let lhs = self.term()?;
        self.expect(Tok::Eq, "'=' between terms")?;
        let rhs = self.term()?;
        Ok(Formula::eq(lhs, rhs))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.factor()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            t = Term::add(t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut t = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            t = Term::mul(t, self.power()?);
        }
        Ok(t)
    }

    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let err = self.error("expected a natural number after '^'");
            match self.advance() {
                Some(Tok::Nat(k)) => Ok(Term::power(base, k)),
                _ => Err(err),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Nat(k)) => {
                self.pos += 1;
                Ok(Term::literal(k))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Term::var(&name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// Parses a single formula. Free variables are allowed; use
/// [`super::Formula::free_vars`] to warn about them.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let end_line = src.lines().count().max(1);
    let end_col = src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// One formula per line; `#` starts a comment; blank lines are skipped.
/// Returns each parsed formula with its 1-based line number.
pub fn parse_file(src: &str) -> Result<Vec<(usize, Formula)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let f = parse(line).map_err(|e| ParseError {
            line: i + 1,
            col: e.col,
            message: e.message,
        })?;
        out.push((i + 1, f));
    }
    Ok(out)
}

/// Warnings for parsed lines that are not sentences, listing their free
/// variables. Loaders print these; free variables are legal (the formula can
/// still be evaluated under an assignment) but usually unintended in files.
pub fn unbound_warnings(parsed: &[(usize, Formula)]) -> Vec<String> {
    parsed
        .iter()
        .filter_map(|(line, f)| {
            let free = f.free_vars();
            if free.is_empty() {
                None
            } else {
                let names: Vec<&str> = free.iter().map(|s| s.name()).collect();
                Some(format!(
                    "line {line}: free variable{} {}",
                    if names.len() == 1 { "" } else { "s" },
                    names.join(", ")
                ))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::print::print;

    #[test]
    fn parses_quantified_square() {
        let f = parse("forall X. exists Y. Y*Y = X").unwrap();
        let by_hand = Formula::forall(
            Sym::intern("X"),
            Formula::exists(
                Sym::intern("Y"),
                Formula::eq(Term::mul(Term::var("Y"), Term::var("Y")), Term::var("X")),
            ),
        );
        assert_eq!(f, by_hand);
    }

    #[test]
    fn sugar_desugars() {
        assert_eq!(parse("X = 2").unwrap(), parse("X = 1 + 1").unwrap());
        assert_eq!(parse("X^3 = 0").unwrap(), parse("X*X*X = 0").unwrap());
        assert_eq!(parse("X = Y^2 + 2").unwrap(), parse("X = Y*Y + (1+1)").unwrap());
    }

    #[test]
    fn incomplete_term_is_an_error() {
        let err = parse("X = ").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn error_positions() {
        let err = parse("forall . X = 0").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 8);
        let err = parse("X ? 0").unwrap_err();
        assert_eq!(err.col, 3);
    }

    #[test]
    fn parenthesized_formula_vs_term() {
        let f = parse("(X = 0) & (Y = 1)").unwrap();
        assert!(matches!(f, Formula::And(..)));
        let f = parse("(X + 1) = Y").unwrap();
        assert!(matches!(f, Formula::Eq(..)));
        let f = parse("(X) = (Y)").unwrap();
        assert!(matches!(f, Formula::Eq(..)));
    }

    #[test]
    fn associativity_and_precedence() {
        // Left-assoc chains.
        assert_eq!(parse("X + Y + Z = 0").unwrap(), parse("(X + Y) + Z = 0").unwrap());
        assert_eq!(parse("X * Y * Z = 0").unwrap(), parse("(X * Y) * Z = 0").unwrap());
        // * binds tighter than +.
        assert_eq!(parse("X + Y * Z = 0").unwrap(), parse("X + (Y * Z) = 0").unwrap());
        // -> is right-associative and loosest.
        let f = parse("X = 0 -> Y = 0 -> Z = 0").unwrap();
        assert_eq!(print(&f), "X = 0 -> Y = 0 -> Z = 0");
        // & binds tighter than |.
        assert_eq!(
            parse("X = 0 | Y = 0 & Z = 0").unwrap(),
            parse("X = 0 | (Y = 0 & Z = 0)").unwrap()
        );
    }

    #[test]
    fn file_parsing_reports_line() {
        let src = "forall X. X = X\n# comment only\nX = \n";
        let err = parse_file(src).unwrap_err();
        assert_eq!(err.line, 3);
        let src = "forall X. X = X\nexists Y. Y = 0 # trailing comment\n";
        let fs = parse_file(src).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].0, 1);
        assert_eq!(fs[1].0, 2);
    }

    #[test]
    fn free_variables_produce_warnings() {
        let fs = parse_file("forall X. X = X\nX + Y = 0\nexists Y. Y = W\n").unwrap();
        let warnings = unbound_warnings(&fs);
        assert_eq!(warnings.len(), 2);
        assert!(warnings[0].contains("line 2"));
        assert!(warnings[0].contains("X, Y") || warnings[0].contains("Y, X"));
        assert!(warnings[1].contains("line 3"));
        assert!(warnings[1].contains('W'));
    }
}
