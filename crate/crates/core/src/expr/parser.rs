use super::{BinOp, Expr, Func, Node};
use crate::error::{ParseError, ParseErrorKind};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.number(start)?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            other => {
                return Err(syntax(start, format!("unexpected character `{}`", other as char)));
            }
        };
        Ok((start, tok))
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.pos < s.src.len() && s.src[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos - b
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(syntax(start, "malformed number".into()));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| syntax(start, format!("malformed number `{text}`")))
    }
}

fn syntax(offset: usize, msg: String) -> ParseError {
    ParseError {
        offset,
        kind: ParseErrorKind::Syntax(msg),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: (usize, Tok),
    dimension: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(usize, Tok), ParseError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let (off, tok) = self.bump()?;
        if tok == want {
            Ok(())
        } else {
            Err(syntax(off, format!("expected {what}, found {}", describe(&tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peeked.1 {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr(Arc::new(Node::Bin(op, lhs, rhs)));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peeked.1 {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr(Arc::new(Node::Bin(op, lhs, rhs)));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peeked.1 == Tok::Op('-') {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(Expr(Arc::new(Node::Neg(inner))));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peeked.1 == Tok::Op('^') {
            self.bump()?;
            let n = self.exponent()?;
            return Ok(Expr(Arc::new(Node::Pow(base, n))));
        }
        Ok(base)
    }

    /// Signed integer exponent; a further `^` makes it right-associative.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = self.peeked.1 == Tok::LParen;
        if parenthesized {
            self.bump()?;
        }
        let negative = self.peeked.1 == Tok::Op('-');
        if negative {
            self.bump()?;
        }
        let (off, tok) = self.bump()?;
        let value = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= 64.0 => v as i32,
            Tok::Num(_) => return Err(syntax(off, "exponent must be a small integer".into())),
            other => {
                return Err(syntax(
                    off,
                    format!("expected integer exponent, found {}", describe(&other)),
                ));
            }
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        let mut n = if negative { -value } else { value };
        if self.peeked.1 == Tok::Op('^') {
            let off = self.peeked.0;
            self.bump()?;
            let upper = self.exponent()?;
            if upper < 0 {
                return Err(syntax(off, "exponent tower must be a nonnegative integer".into()));
            }
            n = n
                .checked_pow(upper as u32)
                .filter(|v| v.abs() <= 64)
                .ok_or_else(|| syntax(off, "exponent too large".into()))?;
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (off, tok) = self.bump()?;
        match tok {
            Tok::Num(v) => Ok(Expr::constant(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(off, name),
            other => Err(syntax(off, format!("unexpected {}", describe(&other)))),
        }
    }

    fn ident(&mut self, off: usize, name: String) -> Result<Expr, ParseError> {
        if name == "pi" {
            return Ok(Expr::constant(std::f64::consts::PI));
        }
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::call(func, &arg));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().unwrap_or(usize::MAX);
                if index == 0 || index > self.dimension {
                    return Err(ParseError {
                        offset: off,
                        kind: ParseErrorKind::VariableOutOfRange {
                            index,
                            dimension: self.dimension,
                        },
                    });
                }
                return Ok(Expr::var(index - 1));
            }
        }
        Err(ParseError {
            offset: off,
            kind: ParseErrorKind::UnknownIdentifier(name),
        })
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses `text` into an expression over `x1..x{dimension}`.
pub fn parse_expr(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    if dimension == 0 {
        return Err(syntax(0, "dimension must be at least 1".into()));
    }
    if text.trim().is_empty() {
        return Err(syntax(0, "empty expression".into()));
    }
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let first = lexer.next()?;
    let mut p = Parser {
        lexer,
        peeked: first,
        dimension,
    };
    let e = p.expr()?;
    let (off, tok) = p.bump()?;
    if tok != Tok::End {
        return Err(syntax(off, format!("unexpected {}", describe(&tok))));
    }
    Ok(e)
}
