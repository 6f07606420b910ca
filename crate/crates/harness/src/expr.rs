//! Branch formulas: complex literals, `z`, `+ − * /`, integer powers and
//! `exp`, parsed by precedence climbing.

use std::fmt;

use nearbest::Complex;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex),
    Z,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
}

/// Parse failure with the 1-based column where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Z,
    Pi,
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| ExprError { column: col, message: format!("malformed number '{text}'") })?;
            let imag = i < chars.len()
                && chars[i] == 'i'
                && !(i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_'));
            if imag {
                i += 1;
                out.push((Tok::Imag(v), col));
            } else {
                out.push((Tok::Num(v), col));
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push((
                match word.as_str() {
                    "z" => Tok::Z,
                    "i" => Tok::Imag(1.0),
                    "pi" => Tok::Pi,
                    _ => Tok::Ident(word),
                },
                col,
            ));
        } else if "+-*/^".contains(ch) {
            out.push((Tok::Op(ch), col));
            i += 1;
        } else if ch == '(' {
            out.push((Tok::LParen, col));
            i += 1;
        } else if ch == ')' {
            out.push((Tok::RParen, col));
            i += 1;
        } else {
            return Err(ExprError { column: col, message: format!("unexpected character '{ch}'") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const PREFIX_BP: u8 = 5;

fn infix_bp(op: char) -> (u8, u8) {
    match op {
        '+' | '-' => (1, 2),
        '*' | '/' => (3, 4),
        // the exponent is read by `integer_exponent`
        '^' => (8, 8),
        _ => unreachable!(),
    }
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column, message: message.into() })
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let (tok, col) = self.next();
        let mut lhs = match tok {
            Tok::Num(v) => Expr::Const(Complex::new(v, 0.0)),
            Tok::Imag(v) => Expr::Const(Complex::new(0.0, v)),
            Tok::Pi => Expr::Const(Complex::new(std::f64::consts::PI, 0.0)),
            Tok::Z => Expr::Z,
            Tok::Op('-') => Expr::Neg(Box::new(self.expr(PREFIX_BP)?)),
            Tok::Op('+') => self.expr(PREFIX_BP)?,
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect_rparen(col)?;
                e
            }
            Tok::Ident(name) => {
                if name != "exp" {
                    return self.err(col, format!("unknown function '{name}' (only exp is supported)"));
                }
                let (open, c2) = self.next();
                if open != Tok::LParen {
                    return self.err(c2, "expected '(' after exp");
                }
                let arg = self.expr(0)?;
                self.expect_rparen(c2)?;
                Expr::Exp(Box::new(arg))
            }
            Tok::End => return self.err(col, "unexpected end of expression"),
            other => return self.err(col, format!("unexpected token {other:?}")),
        };
        let mut chained = false;
        loop {
            let (tok, col) = self.peek().clone();
            let op = match tok {
                Tok::Op(op) => op,
                Tok::End | Tok::RParen => break,
                _ => return self.err(col, "expected an operator"),
            };
            let (l_bp, r_bp) = infix_bp(op);
            if l_bp < min_bp {
                break;
            }
            self.next();
            if op == '^' {
                if chained {
                    return self.err(col, "chained powers are ambiguous; add parentheses");
                }
                lhs = Expr::Pow(Box::new(lhs), self.integer_exponent()?);
                chained = true;
                continue;
            }
            chained = false;
            let rhs = self.expr(r_bp)?;
            lhs = match op {
                '+' => Expr::Add(Box::new(lhs), Box::new(rhs)),
                '-' => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                '*' => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                '/' => Expr::Div(Box::new(lhs), Box::new(rhs)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn expect_rparen(&mut self, open_col: usize) -> Result<(), ExprError> {
        let (tok, col) = self.next();
        if tok != Tok::RParen {
            return self.err(col, format!("missing ')' for '(' at column {open_col}"));
        }
        Ok(())
    }

    /// `^k`, `^-k`, `^(k)` or `^(-k)` with an integer `k`.
    fn integer_exponent(&mut self) -> Result<i32, ExprError> {
        let (tok, col) = self.next();
        let (neg, tok, col, paren) = match tok {
            Tok::LParen => {
                let (t, c) = self.next();
                match t {
                    Tok::Op('-') => {
                        let (t2, c2) = self.next();
                        (true, t2, c2, true)
                    }
                    other => (false, other, c, true)
                }
            }
            Tok::Op('-') => {
                let (t2, c2) = self.next();
                (true, t2, c2, false)
            }
            other => (false, other, col, false),
        };
        let Tok::Num(v) = tok else { return self.err(col, "exponent must be an integer literal") };
        if v.fract() != 0.0 || v > i32::MAX as f64 {
            return self.err(col, format!("exponent {v} is not an integer"));
        }
        if paren {
            self.expect_rparen(col)?;
        }
        Ok(if neg { -(v as i32) } else { v as i32 })
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser { toks: lex(src)?, pos: 0 };
        let e = p.expr(0)?;
        let (tok, col) = p.peek().clone();
        if tok != Tok::End {
            return p.err(col, "unexpected trailing input");
        }
        Ok(e)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::Neg(a) => -a.eval(z),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(a, k) => a.eval(z).powi(*k),
            Expr::Exp(a) => a.eval(z).exp(),
        }
    }

    pub fn depends_on_z(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Z => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) => a.depends_on_z(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.depends_on_z() || b.depends_on_z(),
        }
    }
}

/// Parses a constant (no `z`) expression.
pub fn parse_constant(src: &str) -> Result<Complex, ExprError> {
    let e = Expr::parse(src)?;
    if e.depends_on_z() {
        return Err(ExprError { column: 1, message: "a constant is required here; found z".into() });
    }
    let v = e.eval(Complex::new(0.0, 0.0));
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(ExprError { column: 1, message: "constant is not finite".into() });
    }
    Ok(v)
}

/// Parses a real constant.
pub fn parse_real(src: &str) -> Result<f64, ExprError> {
    let v = parse_constant(src)?;
    if v.im != 0.0 {
        return Err(ExprError { column: 1, message: format!("a real number is required; found {v}") });
    }
    Ok(v.re)
}
