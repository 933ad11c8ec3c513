use std::fmt;

use num_bigint::BigInt;

use super::{Coeff, Exponent, Expr, ExprError, SymbolFn};

/// Parameter names accepted by the expression grammar.
pub const PARAMETERS: &[&str] = &["k1", "k2", "k3", "lam", "alpha", "theta", "a0", "a1", "a2", "a3"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Coeff),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for c in src.chars().take(offset) {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            chars: src.chars().collect(),
            pos: 0,
            src,
        };
        let mut out = Vec::new();
        loop {
            while lx.pos < lx.chars.len() && lx.chars[lx.pos].is_whitespace() {
                lx.pos += 1;
            }
            let start = lx.pos;
            let Some(&c) = lx.chars.get(lx.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            if c.is_ascii_digit() || c == '.' {
                let mut s = String::new();
                while let Some(&d) = lx.chars.get(lx.pos) {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(d);
                        lx.pos += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Num(lx.number(&s, start)?), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(&d) = lx.chars.get(lx.pos) {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        lx.pos += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), start));
            } else if "+-*/^()".contains(c) {
                lx.pos += 1;
                out.push((Tok::Op(c), start));
            } else {
                return Err(lx.error(start, format!("unexpected character '{c}'")));
            }
        }
    }

    fn number(&self, s: &str, at: usize) -> Result<Coeff, ParseError> {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
            return Err(self.error(at, format!("malformed number '{s}'")));
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits
            .parse()
            .map_err(|_| self.error(at, format!("malformed number '{s}'")))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Coeff::new(n, d))
    }

    fn error(&self, offset: usize, message: String) -> ParseError {
        let (line, column) = position(self.src, offset);
        ParseError { line, column, message }
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    src: &'a str,
}

fn suffix_order(name: &str, prefix: &str) -> Option<u32> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() {
        Some(0)
    } else if rest.chars().all(|c| c.is_ascii_digit()) {
        rest.parse().ok()
    } else {
        None
    }
}

fn identifier(name: &str) -> Option<Expr> {
    if name == "x" || name == "z" {
        return Some(Expr::x());
    }
    if PARAMETERS.contains(&name) {
        return Some(Expr::param(name));
    }
    for p in ["y", "w"] {
        if let Some(k) = suffix_order(name, p) {
            return Some(Expr::jet(k));
        }
    }
    for s in [SymbolFn::U, SymbolFn::V, SymbolFn::Q] {
        if let Some(k) = suffix_order(name, s.name()) {
            return Some(Expr::sym(s, k));
        }
    }
    None
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = position(self.src, offset);
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn semantic(&self, offset: usize, e: ExprError) -> ParseError {
        self.error_at(offset, e.to_string())
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_at(self.offset(), format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    acc = acc.div(&d).map_err(|e| self.semantic(at, e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let e = self.unary()?;
        let c = e
            .constant_value()
            .ok_or_else(|| self.error_at(at, "exponent must be a rational constant"))?;
        let r = to_exponent(&c).ok_or_else(|| self.error_at(at, "exponent out of range"))?;
        base.pow(r).map_err(|err| self.semantic(at, err))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(c) => Ok(Expr::constant(c)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if matches!(name.as_str(), "ln" | "exp" | "sqrt") {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "ln" => arg.ln().map_err(|e| self.semantic(at, e)),
                        "exp" => Ok(arg.exp()),
                        _ => arg.sqrt().map_err(|e| self.semantic(at, e)),
                    };
                }
                identifier(&name).ok_or_else(|| self.error_at(at, format!("unknown identifier '{name}'")))
            }
            Tok::End => Err(self.error_at(at, "unexpected end of input")),
            Tok::Op(c) => Err(self.error_at(at, format!("unexpected '{c}'"))),
        }
    }
}

fn to_exponent(c: &Coeff) -> Option<Exponent> {
    use num_traits::ToPrimitive;
    let n = c.numer().to_i64()?;
    let d = c.denom().to_i64()?;
    Some(Exponent::new(n, d))
}

/// Parses an expression of the text grammar.
///
/// Identifiers: `x` (alias `z`), `y, y1, y2, ...` (aliases `w, w1, ...`),
/// `u, u1, ...`, `v, ...`, `q, ...`, and the parameters in [`PARAMETERS`].
/// Operators `+ - * / ^` and the functions `ln`, `exp`, `sqrt`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, pos: 0, src };
    if *p.peek() == Tok::End {
        return Err(p.error_at(0, "empty expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error_at(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}
