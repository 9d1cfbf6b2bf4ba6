//! Scalar-expression parser for the calculus-rule DSL: rationals, `q`,
//! declared parameters, q-brackets `[n]_q`, sums, products and powers.

use crate::NcError;
use qcore::{ParamContext, QRat};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Int(i64),
    Ident(String),
    QBracket(i64),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Arrow,
    Colon,
    Comma,
}

pub struct Lexer<'a> {
    src: &'a str,
    pub line: usize,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, line: usize) -> Self {
        Lexer { src, line, chars: src.char_indices().collect(), pos: 0 }
    }

    pub fn col(&self) -> usize {
        self.chars.get(self.pos).map(|(i, _)| i + 1).unwrap_or(self.src.len() + 1)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub fn err(&self, msg: &str) -> NcError {
        NcError::Parse { line: self.line, col: self.col(), msg: msg.to_string() }
    }

    pub fn next_tok(&mut self) -> Result<Option<Tok>, NcError> {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let Some(c) = self.peek() else { return Ok(None) };
        let tok = match c {
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            '+' => {
                self.bump();
                Tok::Plus
            }
            '*' => {
                self.bump();
                Tok::Star
            }
            '/' => {
                self.bump();
                Tok::Slash
            }
            '^' => {
                self.bump();
                Tok::Caret
            }
            ':' => {
                self.bump();
                Tok::Colon
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '-' => {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '[' => {
                // [n]_q
                self.bump();
                let mut digits = String::new();
                if self.peek() == Some('-') {
                    digits.push('-');
                    self.bump();
                }
                while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    digits.push(self.bump().unwrap());
                }
                if self.bump() != Some(']') {
                    return Err(self.err("expected `]` in q-bracket"));
                }
                if self.bump() != Some('_') || self.bump() != Some('q') {
                    return Err(self.err("expected `_q` after q-bracket"));
                }
                let n: i64 = digits
                    .parse()
                    .map_err(|_| self.err("bad integer in q-bracket"))?;
                Tok::QBracket(n)
            }
            d if d.is_ascii_digit() => {
                let mut digits = String::new();
                while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    digits.push(self.bump().unwrap());
                }
                Tok::Int(digits.parse().map_err(|_| self.err("bad integer"))?)
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut name = String::new();
                while matches!(self.peek(), Some(ch) if ch.is_ascii_alphanumeric() || ch == '_')
                {
                    name.push(self.bump().unwrap());
                }
                Tok::Ident(name)
            }
            other => return Err(self.err(&format!("unexpected character `{}`", other))),
        };
        Ok(Some(tok))
    }
}

/// Tokenize a whole line.
pub fn lex_line(src: &str, line: usize) -> Result<Vec<Tok>, NcError> {
    let mut lx = Lexer::new(src, line);
    let mut out = Vec::new();
    while let Some(t) = lx.next_tok()? {
        out.push(t);
    }
    Ok(out)
}

/// Stream over tokens with position-bearing errors.
pub struct TokStream {
    pub toks: Vec<Tok>,
    pub pos: usize,
    pub line: usize,
}

impl TokStream {
    pub fn new(toks: Vec<Tok>, line: usize) -> Self {
        TokStream { toks, pos: 0, line }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn err(&self, msg: &str) -> NcError {
        NcError::Parse { line: self.line, col: self.pos + 1, msg: msg.to_string() }
    }

    pub fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

/// Parse a scalar expression (sum of products of powers) against the
/// declared parameter context. Identifiers must be `q` or declared params.
pub fn parse_scalar(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    parse_sum(ts, ctx)
}

/// A single scalar primary with an optional power (no juxtaposition), for
/// positions followed by further line content.
pub fn parse_scalar_atom(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    parse_power(ts, ctx)
}

fn parse_sum(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    let mut acc = parse_product(ts, ctx)?;
    loop {
        match ts.peek() {
            Some(Tok::Plus) => {
                ts.bump();
                let rhs = parse_product(ts, ctx)?;
                acc = &acc + &rhs;
            }
            Some(Tok::Minus) => {
                ts.bump();
                let rhs = parse_product(ts, ctx)?;
                acc = &acc - &rhs;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_product(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    let mut acc = parse_power(ts, ctx)?;
    loop {
        match ts.peek() {
            Some(Tok::Star) => {
                ts.bump();
                let rhs = parse_power(ts, ctx)?;
                acc = &acc * &rhs;
            }
            Some(Tok::Slash) => {
                ts.bump();
                let rhs = parse_power(ts, ctx)?;
                if rhs.is_zero() {
                    return Err(ts.err("division by zero scalar"));
                }
                acc = &acc / &rhs;
            }
            // juxtaposition of scalar primaries also multiplies
            Some(Tok::Int(_)) | Some(Tok::QBracket(_)) => {
                let rhs = parse_power(ts, ctx)?;
                acc = &acc * &rhs;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_power(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    let base = parse_primary(ts, ctx)?;
    if matches!(ts.peek(), Some(Tok::Caret)) {
        ts.bump();
        let neg = if matches!(ts.peek(), Some(Tok::Minus)) {
            ts.bump();
            true
        } else {
            false
        };
        match ts.bump() {
            Some(Tok::Int(n)) => Ok(base.pow(if neg { -n } else { n })),
            _ => Err(ts.err("expected integer exponent")),
        }
    } else {
        Ok(base)
    }
}

fn parse_primary(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    match ts.bump() {
        Some(Tok::Int(n)) => Ok(QRat::from_int(n)),
        Some(Tok::Minus) => {
            let v = parse_power(ts, ctx)?;
            Ok(-&v)
        }
        Some(Tok::QBracket(n)) => Ok(qcore::q_int(n)),
        Some(Tok::Ident(name)) if name == "q" => Ok(QRat::q()),
        Some(Tok::Ident(name)) => ctx
            .param(&name)
            .map_err(|_| ts.err(&format!("undeclared parameter `{}`", name))),
        Some(Tok::LParen) => {
            let v = parse_sum(ts, ctx)?;
            match ts.bump() {
                Some(Tok::RParen) => Ok(v),
                _ => Err(ts.err("expected `)`")),
            }
        }
        _ => Err(ts.err("expected scalar primary")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str, ctx: &ParamContext) -> Result<QRat, NcError> {
        let toks = lex_line(src, 1)?;
        let mut ts = TokStream::new(toks, 1);
        let v = parse_scalar(&mut ts, ctx)?;
        if !ts.done() {
            return Err(ts.err("trailing tokens"));
        }
        Ok(v)
    }

    #[test]
    fn parses_q_brackets_and_powers() {
        let ctx = ParamContext::new(vec!["a", "b"]);
        let v = parse("b [2]_q", &ctx).unwrap();
        let expect = &ctx.param("b").unwrap() * &qcore::q_int(2);
        assert_eq!(v, expect);

        let v2 = parse("q^-2 - 1", &ctx).unwrap();
        assert_eq!(v2, &QRat::q_pow(-2) - &QRat::one());
    }

    #[test]
    fn rejects_undeclared_parameter() {
        let ctx = ParamContext::new(vec!["a"]);
        assert!(parse("c", &ctx).is_err());
    }
}
