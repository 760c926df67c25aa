use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::{BinaryOp, Builtin, Expr, UnaryOp};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: expected one of {expected:?}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("{line}:{column}: variable x{index} exceeds arity {arity}")]
    Arity {
        line: usize,
        column: usize,
        index: usize,
        arity: usize,
    },
    #[error("{line}:{column}: {message}")]
    BadCall {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Number(&'a str),
    Var(&'a str),
    Ident(&'a str),
    Sym(char),
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Number(t) | Tok::Var(t) | Tok::Ident(t) => format!("`{t}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok<'a>, Pos)>, ParseError> {
        let mut lx = Lexer {
            src,
            offset: 0,
            line: 1,
            column: 1,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let pos = Pos {
                line: lx.line,
                column: lx.column,
            };
            let Some(c) = lx.peek() else {
                out.push((Tok::End, pos));
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() {
                Tok::Number(lx.number())
            } else if c.is_ascii_alphabetic() || c == '_' {
                let word = lx.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                let is_var = word.len() > 1 && word.starts_with('x') && word[1..].bytes().all(|b| b.is_ascii_digit());
                if is_var {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                }
            } else if "+-*/^(),".contains(c) {
                lx.bump(c);
                Tok::Sym(c)
            } else {
                return Err(ParseError::Syntax {
                    line: pos.line,
                    column: pos.column,
                    expected: vec!["number", "variable", "function", "operator"],
                    found: format!("`{c}`"),
                });
            };
            out.push((tok, pos));
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn bump(&mut self, c: char) {
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.bump(c);
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.offset;
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            self.bump(c);
        }
        &self.src[start..self.offset]
    }

    fn number(&mut self) -> &'a str {
        let start = self.offset;
        self.take_while(|c| c.is_ascii_digit());
        if self.peek() == Some('.') {
            self.bump('.');
            self.take_while(|c| c.is_ascii_digit());
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let rest = &self.src[self.offset + 1..];
            let digits = rest.trim_start_matches(['+', '-']);
            if digits.starts_with(|c: char| c.is_ascii_digit()) {
                self.bump('e');
                if let Some(s) = self.peek().filter(|c| *c == '+' || *c == '-') {
                    self.bump(s);
                }
                self.take_while(|c| c.is_ascii_digit());
            }
        }
        &self.src[start..self.offset]
    }
}

/// Parse `source` as a function of `arity` positional variables.
pub fn parse(source: &str, arity: usize) -> Result<Expr, ParseError> {
    let tokens = Lexer::tokenize(source)?;
    let mut p = Parser { tokens, at: 0, arity };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

struct Parser<'a> {
    tokens: Vec<(Tok<'a>, Pos)>,
    at: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok<'a> {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn advance(&mut self) {
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, c: char, label: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(vec![label]))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.unexpected(vec!["operator", "end of input"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinaryOp::Add
            } else if self.eat('-') {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinaryOp::Mul
            } else if self.eat('/') {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.eat('^') {
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if !self.eat('-') {
            return self.atom();
        }
        // a minus directly on a literal is part of the literal
        if let Tok::Number(text) = *self.peek() {
            let pos = self.pos();
            self.advance();
            return Ok(Expr::Const(number(text, true, pos)?));
        }
        Ok(Expr::unary(UnaryOp::Neg, self.atom()?))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match *self.peek() {
            Tok::Number(text) => {
                self.advance();
                Ok(Expr::Const(number(text, false, pos)?))
            }
            Tok::Var(text) => {
                let index = text[1..].parse::<usize>().unwrap_or(usize::MAX);
                if index == 0 || index > self.arity {
                    return Err(ParseError::Arity {
                        line: pos.line,
                        column: pos.column,
                        index,
                        arity: self.arity,
                    });
                }
                self.advance();
                Ok(Expr::Var(index))
            }
            Tok::Ident(name) => {
                self.advance();
                self.call(name, pos)
            }
            Tok::Sym('(') => {
                self.advance();
                let e = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected(vec!["number", "variable", "function call", "`(`"])),
        }
    }

    fn call(&mut self, name: &str, pos: Pos) -> Result<Expr, ParseError> {
        self.expect('(', "`(`")?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')', "`,` or `)`")?;
        let bad = |message: String| ParseError::BadCall {
            line: pos.line,
            column: pos.column,
            message,
        };
        let want = |n: usize, args: &Vec<Expr>| {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{name} takes {n} argument(s), got {}", args.len())))
            }
        };
        let unary = |op| -> Result<Expr, ParseError> {
            want(1, &args)?;
            Ok(Expr::Unary(op, Box::new(args[0].clone())))
        };
        match name {
            "abs" => unary(UnaryOp::Abs),
            "floor" => unary(UnaryOp::Floor),
            "ceil" => unary(UnaryOp::Ceil),
            "round" => unary(UnaryOp::Round),
            "min" | "max" | "pow" => {
                want(2, &args)?;
                let op = match name {
                    "min" => BinaryOp::Min,
                    "max" => BinaryOp::Max,
                    _ => BinaryOp::Pow,
                };
                let mut it = args.into_iter();
                let (l, r) = (it.next().unwrap(), it.next().unwrap());
                Ok(Expr::binary(op, l, r))
            }
            "clamp" => {
                want(3, &args)?;
                Ok(Expr::Call(Builtin::Clamp, args))
            }
            "mean" => Ok(Expr::Call(Builtin::Mean, args)),
            "median" => Ok(Expr::Call(Builtin::Median, args)),
            _ => Err(bad(format!("unknown function `{name}`"))),
        }
    }
}

fn number(text: &str, negate: bool, pos: Pos) -> Result<Scalar, ParseError> {
    let invalid = || ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        expected: vec!["number"],
        found: format!("`{text}`"),
    };
    if text.contains(['.', 'e', 'E']) {
        let v: f64 = text.parse().map_err(|_| invalid())?;
        let v = if negate { -v } else { v };
        return Scalar::real(v).map_err(|_| invalid());
    }
    let magnitude: i128 = text.parse().unwrap_or(i128::MAX);
    let signed = if negate { -magnitude } else { magnitude };
    match i64::try_from(signed) {
        Ok(i) => Ok(Scalar::Int(i)),
        // too large for an exact integer
        Err(_) => {
            let v: f64 = text.parse().map_err(|_| invalid())?;
            Scalar::real(if negate { -v } else { v }).map_err(|_| invalid())
        }
    }
}
