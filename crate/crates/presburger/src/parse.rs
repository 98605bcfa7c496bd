//! Textual syntax for formulas.
//!
//! ```text
//! formula := imp ('<->' imp)*
//! imp     := or ('->' imp)?
//! or      := and ('\/' and)*
//! and     := unary ('/\' unary)*
//! unary   := '~' unary | ('E' | 'A') var+ '.' formula | 'true' | 'false'
//!          | INT '|' term | term relop term | '(' formula ')'
//! relop   := '<=' | '<' | '>=' | '>' | '=' | '!='
//! term    := ['-'] product (('+' | '-') product)*
//! product := factor ('*' factor)*      (at most one non-constant factor)
//! ```
//!
//! Variables match `[a-z][a-z0-9]*` optionally followed by primes (`x1'`).

use crate::error::{PresburgerError, Result};
use crate::formula::Formula;
use crate::term::{Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i128),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Bar,
    Dot,
    Comma,
    Exists,
    Forall,
    True,
    False,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| PresburgerError::Parse { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let tok = if two.starts_with("<->") {
            advance(3, &mut i, &mut col);
            Tok::Iff
        } else if two.starts_with("<=") {
            advance(2, &mut i, &mut col);
            Tok::Le
        } else if two.starts_with(">=") {
            advance(2, &mut i, &mut col);
            Tok::Ge
        } else if two.starts_with("!=") {
            advance(2, &mut i, &mut col);
            Tok::Ne
        } else if two.starts_with("/\\") {
            advance(2, &mut i, &mut col);
            Tok::And
        } else if two.starts_with("\\/") {
            advance(2, &mut i, &mut col);
            Tok::Or
        } else if two.starts_with("->") {
            advance(2, &mut i, &mut col);
            Tok::Implies
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let value = text
                .parse::<i128>()
                .map_err(|_| err(start.0, start.1, format!("integer literal `{text}` too large")))?;
            advance(j - i, &mut i, &mut col);
            Tok::Int(value)
        } else if c.is_ascii_lowercase() {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_lowercase() || chars[j].is_ascii_digit()) {
                j += 1;
            }
            while j < chars.len() && chars[j] == '\'' {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            match text.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(text),
            }
        } else {
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '=' => Tok::Eq,
                '~' => Tok::Not,
                '|' => Tok::Bar,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                'E' => Tok::Exists,
                'A' => Tok::Forall,
                other => return Err(err(line, col, format!("unexpected character `{other}`"))),
            };
            advance(1, &mut i, &mut col);
            tok
        };
        out.push(Spanned { tok, line: start.0, column: start.1 });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn error(&self, message: impl Into<String>) -> PresburgerError {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end);
        PresburgerError::Parse { line, column, message: message.into() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&Tok::Or) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::and(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let universal = self.peek() == Some(&Tok::Forall);
                self.pos += 1;
                let mut vars: Vec<Var> = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Tok::Ident(v)) => {
                            self.pos += 1;
                            vars.push(v);
                            self.eat(&Tok::Comma);
                        }
                        _ => break,
                    }
                }
                if vars.is_empty() {
                    return Err(self.error("expected a bound variable"));
                }
                self.expect(&Tok::Dot, "`.` after quantified variables")?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::forall_all(vars, body)
                } else {
                    Formula::exists_all(vars, body)
                })
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Int(k)) if self.peek_at(1) == Some(&Tok::Bar) => {
                let k = *k;
                if k == 0 {
                    return Err(self.error("divisibility modulus must be positive"));
                }
                self.pos += 2;
                let t = self.term()?;
                Ok(Formula::divides(k, t))
            }
            Some(Tok::LParen) => {
                // Either a parenthesized formula or a comparison whose left term starts with `(`.
                let save = self.pos;
                match self.comparison() {
                    Ok(f) => Ok(f),
                    Err(first_err) => {
                        self.pos = save + 1;
                        match self.formula() {
                            Ok(f) if self.eat(&Tok::RParen) => Ok(f),
                            Ok(_) => Err(self.error("expected `)`")),
                            Err(e) => {
                                // Report whichever attempt got further.
                                Err(pick_further(first_err, e))
                            }
                        }
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Some(t @ (Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt | Tok::Eq | Tok::Ne)) => t.clone(),
            _ => return Err(self.error("expected a comparison operator")),
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(match op {
            Tok::Le => Formula::le(lhs, rhs),
            Tok::Lt => Formula::lt(lhs, rhs),
            Tok::Ge => Formula::ge(lhs, rhs),
            Tok::Gt => Formula::gt(lhs, rhs),
            Tok::Eq => Formula::eq(lhs, rhs),
            Tok::Ne => Formula::ne(lhs, rhs),
            _ => unreachable!(),
        })
    }

    fn term(&mut self) -> Result<Term> {
        let negate = self.eat(&Tok::Minus);
        let first = self.product()?;
        let mut acc = if negate { neg(first, self)? } else { first };
        loop {
            if self.eat(&Tok::Plus) {
                let p = self.product()?;
                acc = acc.checked_add(&p).ok_or_else(|| self.error("coefficient overflow"))?;
            } else if self.eat(&Tok::Minus) {
                let p = self.product()?;
                let p = neg(p, self)?;
                acc = acc.checked_add(&p).ok_or_else(|| self.error("coefficient overflow"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            acc = if acc.is_constant() {
                rhs.checked_scale(acc.constant_part())
            } else if rhs.is_constant() {
                acc.checked_scale(rhs.constant_part())
            } else {
                return Err(self.error("multiplication of two variables is not Presburger"));
            }
            .ok_or_else(|| self.error("coefficient overflow"))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Term::constant(k))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Term::var(v))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let f = self.factor()?;
                neg(f, self)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

fn neg(t: Term, p: &Parser) -> Result<Term> {
    t.checked_scale(-1).ok_or_else(|| p.error("coefficient overflow"))
}

fn pick_further(a: PresburgerError, b: PresburgerError) -> PresburgerError {
    match (&a, &b) {
        (
            PresburgerError::Parse { line: l1, column: c1, .. },
            PresburgerError::Parse { line: l2, column: c2, .. },
        ) if (l1, c1) > (l2, c2) => a,
        _ => b,
    }
}

/// Parses a formula in the textual syntax described in the module docs.
pub fn parse_formula(src: &str) -> Result<Formula> {
    let toks = lex(src)?;
    let end = src.lines().enumerate().last().map(|(i, l)| (i + 1, l.chars().count() + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a linear term.
pub fn parse_term(src: &str) -> Result<Term> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: (1, src.len() + 1) };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}
