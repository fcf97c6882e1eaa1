//! Prefix s-expression serialization for [`Expr`].
//!
//! Grammar: an expression is either a numeric literal or a parenthesized
//! form `(head arg ...)` where head is `var`, `add`, `neg`, `mul`, `div`,
//! `pow`, or an elementary function name, e.g.
//! `(add (pow (var x) 2) (neg (pow (var y) 2)))` for x² − y².
//! Printing (via `Display`) and parsing round-trip exactly.

use crate::analytic::expr::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    let flush = |atom: &mut String, tokens: &mut Vec<Token>| {
        if !atom.is_empty() {
            tokens.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for c in input.chars() {
        match c {
            '(' => {
                flush(&mut atom, &mut tokens);
                tokens.push(Token::Open);
            }
            ')' => {
                flush(&mut atom, &mut tokens);
                tokens.push(Token::Close);
            }
            c if c.is_whitespace() => flush(&mut atom, &mut tokens),
            c if c.is_ascii_alphanumeric() || "+-._".contains(c) => atom.push(c),
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    flush(&mut atom, &mut tokens);
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.next()? {
            Token::Atom(atom) => atom
                .parse::<f64>()
                .map(Expr::constant)
                .map_err(|_| Error::Parse(format!("expected a number, found `{atom}`"))),
            Token::Open => self.form(),
            Token::Close => Err(Error::Parse("unexpected `)`".into())),
        }
    }

    fn form(&mut self) -> Result<Expr> {
        let head = match self.next()? {
            Token::Atom(h) => h,
            other => return Err(Error::Parse(format!("expected a head symbol, found {other:?}"))),
        };
        let expr = match head.as_str() {
            "var" => {
                let name = match self.next()? {
                    Token::Atom(n) => n,
                    _ => return Err(Error::Parse("var expects a name".into())),
                };
                if !name
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                {
                    return Err(Error::Parse(format!("invalid variable name `{name}`")));
                }
                Expr::var(name)
            }
            "add" => Expr::add(self.args(&head, 1)?),
            "mul" => Expr::mul(self.args(&head, 1)?),
            "neg" => {
                let mut args = self.args(&head, 1)?;
                self.arity(&head, &args, 1)?;
                Expr::neg(args.pop().unwrap())
            }
            "div" => {
                let mut args = self.args(&head, 2)?;
                self.arity(&head, &args, 2)?;
                let den = args.pop().unwrap();
                Expr::div(args.pop().unwrap(), den)
            }
            "pow" => {
                let mut args = self.args(&head, 2)?;
                self.arity(&head, &args, 2)?;
                let exponent = args.pop().unwrap();
                Expr::pow(args.pop().unwrap(), exponent)
            }
            name => match Func::from_name(name) {
                Some(f) => {
                    let mut args = self.args(name, 1)?;
                    self.arity(name, &args, 1)?;
                    Expr::fun(f, args.pop().unwrap())
                }
                None => return Err(Error::Parse(format!("unknown operator `{name}`"))),
            },
        };
        match self.next()? {
            Token::Close => Ok(expr),
            other => Err(Error::Parse(format!(
                "expected `)` closing `{head}`, found {other:?}"
            ))),
        }
    }

    /// Parses argument expressions up to the closing paren (not consumed).
    fn args(&mut self, head: &str, min: usize) -> Result<Vec<Expr>> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Some(Token::Close) | None) {
            out.push(self.expr()?);
        }
        if out.len() < min {
            return Err(Error::Parse(format!(
                "`{head}` expects at least {min} argument(s), found {}",
                out.len()
            )));
        }
        Ok(out)
    }

    fn arity(&self, head: &str, args: &[Expr], exact: usize) -> Result<()> {
        if args.len() != exact {
            return Err(Error::Parse(format!(
                "`{head}` expects exactly {exact} argument(s), found {}",
                args.len()
            )));
        }
        Ok(())
    }
}

pub fn parse(input: &str) -> Result<Expr> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input after expression (token {})",
            parser.pos
        )));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::expr::Point;

    #[test]
    fn parses_documented_form() {
        let e = parse("(add (pow (var x) 2) (neg (pow (var y) 2)))").unwrap();
        let v = e.eval(&Point::of(&[("x", 3.0), ("y", 2.0)])).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn print_parse_round_trip() {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let cases = vec![
            (&x * &y).tanh() + Expr::constant(-1.5) * (&x + &y).sec(),
            Expr::div(x.clone().coth(), (y.clone() * Expr::constant(3.0)).sqrt()),
            Expr::pow(x.clone() + Expr::constant(2.0), y.clone()),
            (x.clone().exp() - y.clone().sinh()).abs().ln(),
        ];
        for e in cases {
            let text = e.to_string();
            let back = parse(&text).unwrap();
            assert_eq!(back.to_string(), text);
            let p = Point::of(&[("x", 0.7), ("y", 1.3)]);
            assert_eq!(e.eval(&p).unwrap(), back.eval(&p).unwrap());
        }
    }

    #[test]
    fn negative_literals_round_trip() {
        let e = parse("(mul -2.5 (var x))").unwrap();
        assert_eq!(e.eval(&Point::of(&[("x", 2.0)])).unwrap(), -5.0);
        assert_eq!(parse(&e.to_string()).unwrap().to_string(), e.to_string());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "(",
            ")",
            "(add)",
            "(neg 1 2)",
            "(div 1)",
            "(pow 1 2 3)",
            "(frobnicate (var x))",
            "(var 2x)",
            "(add (var x) (var y)) trailing",
            "(add [var x])",
            "(add nonnumber)",
        ] {
            assert!(parse(bad).is_err(), "expected parse failure for {bad:?}");
        }
    }
}
