//! Coefficient expressions in `x` with parameters bound at parse time.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    = term (("+" | "-") term)*
//! term    = unary (("*" | "/") unary)*
//! unary   = "-" unary | power
//! power   = primary ("^" unary)?          right-associative, integer-valued
//! primary = number | "x" | parameter | function "(" expr ")" | "(" expr ")"
//! ```

use abelkit_core::{Dual, Error as CoreError, ScalarFunction};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Arctan,
}

impl Func {
    const ALL: [(&'static str, Func); 6] = [
        ("exp", Func::Exp),
        ("ln", Func::Ln),
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("sqrt", Func::Sqrt),
        ("arctan", Func::Arctan),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap_or("?")
    }

    fn lookup(name: &str) -> Option<Func> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
    }

    fn apply(self, d: Dual) -> Dual {
        match self {
            Func::Exp => d.exp(),
            Func::Ln => d.ln(),
            Func::Sin => d.sin(),
            Func::Cos => d.cos(),
            Func::Sqrt => d.sqrt(),
            Func::Arctan => d.atan(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    X,
    /// A named parameter with the value it was bound to.
    Param(String, f64),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Call(Func, Box<Ast>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<&'static str>, found: String },
    UnknownIdentifier(String),
    NonIntegerExponent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "at byte {}: expected one of [{}], found {found}", self.offset, expected.join(", "))
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "at byte {}: unknown identifier `{name}`", self.offset),
            ParseErrorKind::NonIntegerExponent => write!(f, "at byte {}: exponent of ^ must be an integer", self.offset),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v:?}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                kind: ParseErrorKind::Syntax { expected: vec!["number"], found: format!("`{text}`") },
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if b"+-*/^()".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                kind: ParseErrorKind::Syntax {
                    expected: vec!["number", "identifier", "operator", "parenthesis"],
                    found: format!("`{ch}`"),
                },
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser<'p> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    params: &'p BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Syntax { expected: expected.to_vec(), found: self.peek().describe() },
        })
    }

    fn expect(&mut self, c: char, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        match constant_value(&exponent) {
            Some(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => Ok(Ast::Pow(Box::new(base), v as i32)),
            _ => Err(ParseError { offset: at, kind: ParseErrorKind::NonIntegerExponent }),
        }
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "x" {
                    return Ok(Ast::X);
                }
                if let Some(f) = Func::lookup(&name) {
                    self.expect('(', "`(`")?;
                    let arg = self.expr()?;
                    self.expect(')', "`)`")?;
                    return Ok(Ast::Call(f, Box::new(arg)));
                }
                match self.params.get(&name) {
                    Some(&v) => Ok(Ast::Param(name, v)),
                    None => Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(name) }),
                }
            }
            _ => self.fail(&["number", "`x`", "parameter", "function", "`(`", "`-`"]),
        }
    }
}

/// Value of an expression free of `x`.
fn constant_value(ast: &Ast) -> Option<f64> {
    match ast {
        Ast::X => None,
        _ => {
            let mut has_x = false;
            ast.visit(&mut |n| has_x |= *n == Ast::X);
            (!has_x).then(|| ast.eval(0.0))
        }
    }
}

/// Parse `src`; identifiers other than `x` and the built-in functions must
/// be keys of `params`.
pub fn parse_expression(src: &str, params: &BTreeMap<String, f64>) -> Result<Ast, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, params };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(ast)
}

impl Ast {
    fn visit(&self, f: &mut impl FnMut(&Ast)) {
        f(self);
        match self {
            Ast::Neg(a) | Ast::Pow(a, _) | Ast::Call(_, a) => a.visit(f),
            Ast::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn eval_dual(&self, x: Dual) -> Dual {
        match self {
            Ast::Num(v) | Ast::Param(_, v) => Dual::cst(*v),
            Ast::X => x,
            Ast::Neg(a) => -a.eval_dual(x),
            Ast::Bin(op, a, b) => {
                let (a, b) = (a.eval_dual(x), b.eval_dual(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Ast::Pow(a, n) => a.eval_dual(x).powi(*n),
            Ast::Call(f, a) => f.apply(a.eval_dual(x)),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_dual(Dual::cst(x)).re
    }

    /// A coefficient function; non-finite values are reported as poles.
    pub fn to_function(&self) -> ScalarFunction {
        let ast = Arc::new(self.clone());
        ScalarFunction::from_repr(move |x| {
            let d = ast.eval_dual(Dual::var(x));
            if d.re.is_finite() && d.du.is_finite() {
                Ok(d)
            } else {
                Err(CoreError::Pole { at: x })
            }
        })
    }

    /// Fully parenthesised source text that parses back to the same tree.
    pub fn unparse(&self) -> String {
        match self {
            Ast::Num(v) => format!("{v:?}"),
            Ast::X => "x".into(),
            Ast::Param(name, _) => name.clone(),
            Ast::Neg(a) => format!("(-{})", a.unparse()),
            Ast::Bin(op, a, b) => format!("({} {} {})", a.unparse(), op.symbol(), b.unparse()),
            Ast::Pow(a, n) => format!("({}^({n}))", a.unparse()),
            Ast::Call(f, a) => format!("{}({})", f.name(), a.unparse()),
        }
    }
}
