//! Concrete syntax.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | var | fnvar '(' [expr (',' expr)*] ')'
//!         | 'D' '[' var ']' '(' expr [';' expr] ')' | '(' expr ')' | '-' factor
//! ```
//!
//! `a - b` is `a + (-1)*b`, `-e` is `(-1)*e`, and `D[x](e)` is `D[x](e; x)`.
//! A `-` directly followed by digits is part of a rational literal.

use num::{BigInt, One, Zero};

use super::{ArityConflict, ArityTable, Expr, FnVar, Rat, VarName};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Arity(#[from] ArityConflict),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `factor ^ n` for natural `n`, expanded into repeated products.
    /// Used for polynomial bodies in environment files.
    pub allow_power: bool,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        options,
        arities: ArityTable::new(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    options: ParseOptions,
    arities: ArityTable,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::sum(acc, self.term()?);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::sum(acc, Expr::prod(Expr::int(-1), rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            acc = Expr::prod(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.factor()?;
        if !self.options.allow_power || !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let digits = self.digits().ok_or_else(|| self.err("expected exponent"))?;
        let n: u32 = digits.parse().map_err(|_| self.err("exponent too large"))?;
        if n == 0 {
            return Ok(Expr::one());
        }
        Ok((1..n).fold(base.clone(), |acc, _| Expr::prod(acc, base.clone())))
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn rational(&mut self, negative: bool) -> Result<Expr, ParseError> {
        let num = self.digits().ok_or_else(|| self.err("expected digits"))?;
        if self.src.get(self.pos) == Some(&b'.') {
            return Err(self.err("decimal literals are not supported; write a fraction"));
        }
        let mut den = BigInt::one();
        if self.eat(b'/') {
            self.skip_ws();
            let d = self
                .digits()
                .ok_or_else(|| self.err("expected denominator"))?;
            den = d.parse().expect("digits");
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
        }
        let mut n: BigInt = num.parse().expect("digits");
        if negative {
            n = -n;
        }
        Ok(Expr::constant(Rat::new(n, den)))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err(self.err("expected identifier")),
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.rational(true)
                } else {
                    Ok(Expr::prod(Expr::int(-1), self.factor()?))
                }
            }
            Some(c) if c.is_ascii_digit() => self.rational(false),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident()?;
                if name == "D" && self.peek() == Some(b'[') {
                    return self.pdiff();
                }
                if self.eat(b'(') {
                    let mut args = Vec::new();
                    if !self.eat(b')') {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(b')') {
                                break;
                            }
                            self.expect(b',')?;
                        }
                    }
                    let f = FnVar::new(&name, args.len());
                    self.arities.record(&f).map_err(|e| {
                        self.pos = start;
                        ParseError::Arity(e)
                    })?;
                    Ok(Expr::app(f, args).expect("arity from argument count"))
                } else {
                    Ok(Expr::var(VarName::new(name)))
                }
            }
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
        }
    }

    fn pdiff(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'[')?;
        let x = VarName::new(self.ident()?);
        self.expect(b']')?;
        self.expect(b'(')?;
        let body = self.expr()?;
        let at = if self.eat(b';') {
            self.expr()?
        } else {
            Expr::var(x.clone())
        };
        self.expect(b')')?;
        Ok(Expr::pdiff(&x, body, at))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Node;

    #[test]
    fn sugar_and_precedence() {
        let x = VarName::new("x");
        let xx = Expr::prod(Expr::var("x"), Expr::var("x"));
        assert_eq!(
            parse("D[x](x*x)").unwrap(),
            Expr::pdiff(&x, xx, Expr::var("x"))
        );

        let half = Expr::constant(Rat::new(1.into(), 2.into()));
        assert_eq!(
            parse("1/2 + x*y").unwrap(),
            Expr::sum(half, Expr::prod(Expr::var("x"), Expr::var("y")))
        );
    }

    #[test]
    fn minus_forms() {
        assert_eq!(
            parse("-3/4").unwrap(),
            Expr::constant(Rat::new((-3).into(), 4.into()))
        );
        assert_eq!(
            parse("a - b").unwrap(),
            Expr::sum(Expr::var("a"), Expr::prod(Expr::int(-1), Expr::var("b")))
        );
        assert_eq!(
            parse("-x").unwrap(),
            Expr::prod(Expr::int(-1), Expr::var("x"))
        );
    }

    #[test]
    fn arity_conflict_is_reported() {
        match parse("f(x) + f(x, g())") {
            Err(ParseError::Arity(c)) => assert_eq!(c.name, "f"),
            other => panic!("expected arity conflict, got {other:?}"),
        }
    }

    #[test]
    fn rejects_decimals_and_garbage() {
        assert!(parse("1.5").is_err());
        assert!(parse("x +").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("D[1](x)").is_err());
    }

    #[test]
    fn nullary_application() {
        let e = parse("g()").unwrap();
        assert!(matches!(e.node(), Node::App(f, args) if f.arity() == 0 && args.is_empty()));
    }

    #[test]
    fn powers_only_when_enabled() {
        assert!(parse("x^2").is_err());
        let opts = ParseOptions { allow_power: true };
        assert_eq!(parse_with("x^3", opts).unwrap(), parse("x*x*x").unwrap());
        assert_eq!(
            parse_with("3*x0^2*x1 + -1/2", opts).unwrap(),
            parse("3*(x0*x0)*x1 + -1/2").unwrap()
        );
    }
}
