//! Arithmetic expressions in the degree variables `x` and `y`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | power
//! power   := primary ('^' factor)?        // right-associative
//! primary := number | 'x' | 'y' | func '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus applied to its base, so `-x^2`
//! means `-(x^2)`; write `(-x)^2` for the other reading. Exponents may be
//! signed (`x^-2`). Numbers are decimal literals with optional fraction
//! and exponent. `log` is the natural logarithm.

use std::fmt;

use crate::scalar::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken,
    UnexpectedEnd,
    UnknownIdentifier,
    WrongArity { expected: usize, got: usize },
    InvalidNumber,
}

/// Syntax error with the byte position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
    context: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character '{c}' at position {}", self.position)
            }
            ParseErrorKind::UnexpectedToken => {
                write!(f, "unexpected '{}' at position {}", self.context, self.position)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of expression at position {}", self.position)
            }
            ParseErrorKind::UnknownIdentifier => {
                write!(f, "unknown identifier '{}' at position {}", self.context, self.position)
            }
            ParseErrorKind::WrongArity { expected, got } => write!(
                f,
                "function '{}' at position {} takes {expected} argument(s), got {got}",
                self.context, self.position
            ),
            ParseErrorKind::InvalidNumber => {
                write!(f, "invalid number literal '{}' at position {}", self.context, self.position)
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Func1 {
    Sqrt,
    Abs,
    Exp,
    Log,
}

impl Func1 {
    fn name(self) -> &'static str {
        match self {
            Func1::Sqrt => "sqrt",
            Func1::Abs => "abs",
            Func1::Exp => "exp",
            Func1::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Func2 {
    Min,
    Max,
}

impl Func2 {
    fn name(self) -> &'static str {
        match self {
            Func2::Min => "min",
            Func2::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Ast {
    Num(f64),
    X,
    Y,
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Call1(Func1, Box<Ast>),
    Call2(Func2, Box<Ast>, Box<Ast>),
}

/// A parsed expression over the degree variables `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HExpression {
    source: String,
    ast: Ast,
}

impl HExpression {
    /// Parses `source` according to the module grammar.
    pub fn parse(source: &str) -> Result<HExpression, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0, end: source.len() };
        let ast = parser.expr()?;
        if parser.pos < parser.tokens.len() {
            return Err(parser.error_here(ParseErrorKind::UnexpectedToken));
        }
        Ok(HExpression { source: source.to_owned(), ast })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates the expression at `(x, y)`.
    pub fn eval<F: Real>(&self, x: F, y: F) -> F {
        eval_ast(&self.ast, x, y)
    }
}

/// Pretty-prints the AST; re-parsing the output evaluates identically.
impl fmt::Display for HExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ast(f, &self.ast)
    }
}

fn eval_ast<F: Real>(ast: &Ast, x: F, y: F) -> F {
    match ast {
        Ast::Num(v) => real(*v),
        Ast::X => x,
        Ast::Y => y,
        Ast::Neg(a) => -eval_ast(a, x, y),
        Ast::Bin(op, a, b) => {
            let a = eval_ast(a, x, y);
            let b = eval_ast(b, x, y);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Ast::Call1(func, a) => {
            let a = eval_ast(a, x, y);
            match func {
                Func1::Sqrt => a.sqrt(),
                Func1::Abs => a.abs(),
                Func1::Exp => a.exp(),
                Func1::Log => a.ln(),
            }
        }
        Ast::Call2(func, a, b) => {
            let a = eval_ast(a, x, y);
            let b = eval_ast(b, x, y);
            match func {
                Func2::Min => a.min(b),
                Func2::Max => a.max(b),
            }
        }
    }
}

// Precedence used for printing: atoms 5, pow 4, neg 3, mul/div 2, add/sub 1.
fn precedence(ast: &Ast) -> u8 {
    match ast {
        Ast::Num(_) | Ast::X | Ast::Y | Ast::Call1(..) | Ast::Call2(..) => 5,
        Ast::Bin(BinOp::Pow, ..) => 4,
        Ast::Neg(_) => 3,
        Ast::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Ast::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Ast, min_prec: u8) -> fmt::Result {
    if precedence(child) < min_prec {
        write!(f, "(")?;
        write_ast(f, child)?;
        write!(f, ")")
    } else {
        write_ast(f, child)
    }
}

fn write_ast(f: &mut fmt::Formatter<'_>, ast: &Ast) -> fmt::Result {
    match ast {
        Ast::Num(v) => write!(f, "{v}"),
        Ast::X => write!(f, "x"),
        Ast::Y => write!(f, "y"),
        Ast::Neg(a) => {
            write!(f, "-")?;
            // -x^2 prints without parens and still reads back as -(x^2)
            write_child(f, a, 3)
        }
        Ast::Bin(op, a, b) => match op {
            BinOp::Add => {
                write_child(f, a, 1)?;
                write!(f, "+")?;
                // keep right grouping exact: a+(b+c) stays parenthesized
                write_child(f, b, 2)
            }
            BinOp::Sub => {
                write_child(f, a, 1)?;
                write!(f, "-")?;
                write_child(f, b, 2)
            }
            BinOp::Mul => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            BinOp::Div => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            BinOp::Pow => {
                write_child(f, a, 5)?;
                write!(f, "^")?;
                // exponent position accepts unary minus and nested powers
                write_child(f, b, 3)
            }
        },
        Ast::Call1(func, a) => {
            write!(f, "{}(", func.name())?;
            write_ast(f, a)?;
            write!(f, ")")
        }
        Ast::Call2(func, a, b) => {
            write!(f, "{}(", func.name())?;
            write_ast(f, a)?;
            write!(f, ",")?;
            write_ast(f, b)?;
            write!(f, ")")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => v.to_string(),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { tokens.push((Token::Plus, i)); i += 1; }
            '-' => { tokens.push((Token::Minus, i)); i += 1; }
            '*' => { tokens.push((Token::Star, i)); i += 1; }
            '/' => { tokens.push((Token::Slash, i)); i += 1; }
            '^' => { tokens.push((Token::Caret, i)); i += 1; }
            '(' => { tokens.push((Token::LParen, i)); i += 1; }
            ')' => { tokens.push((Token::RParen, i)); i += 1; }
            ',' => { tokens.push((Token::Comma, i)); i += 1; }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    kind: ParseErrorKind::InvalidNumber,
                    context: text.to_owned(),
                })?;
                tokens.push((Token::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((Token::Ident(source[start..i].to_owned()), start));
            }
            other => {
                return Err(ParseError {
                    position: i,
                    kind: ParseErrorKind::UnexpectedChar(other),
                    context: other.to_string(),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let (kind, context) = match self.tokens.get(self.pos) {
            Some((t, _)) => (kind, t.describe()),
            None => (ParseErrorKind::UnexpectedEnd, String::new()),
        };
        ParseError { position: self.here(), kind, context }
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(ParseErrorKind::UnexpectedToken)),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Ast::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Ast::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Ast::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Ast::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Ast::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let position = self.here();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Ast::Num(v)),
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => Ok(Ast::X),
                "y" => Ok(Ast::Y),
                _ => self.call(&name, position),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.error_here(ParseErrorKind::UnexpectedToken))
            }
            None => Err(ParseError {
                position,
                kind: ParseErrorKind::UnexpectedEnd,
                context: String::new(),
            }),
        }
    }

    fn call(&mut self, name: &str, position: usize) -> Result<Ast, ParseError> {
        let func1 = match name {
            "sqrt" => Some(Func1::Sqrt),
            "abs" => Some(Func1::Abs),
            "exp" => Some(Func1::Exp),
            "log" => Some(Func1::Log),
            _ => None,
        };
        let func2 = match name {
            "min" => Some(Func2::Min),
            "max" => Some(Func2::Max),
            _ => None,
        };
        if func1.is_none() && func2.is_none() {
            return Err(ParseError {
                position,
                kind: ParseErrorKind::UnknownIdentifier,
                context: name.to_owned(),
            });
        }
        self.expect(Token::LParen)?;
        let first = self.expr()?;
        let mut args = vec![first];
        while matches!(self.peek(), Some(Token::Comma)) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(Token::RParen)?;
        let expected = if func1.is_some() { 1 } else { 2 };
        if args.len() != expected {
            return Err(ParseError {
                position,
                kind: ParseErrorKind::WrongArity { expected, got: args.len() },
                context: name.to_owned(),
            });
        }
        let mut args = args.into_iter();
        Ok(match (func1, func2) {
            (Some(f1), _) => Ast::Call1(f1, Box::new(args.next().unwrap())),
            (_, Some(f2)) => {
                let a = args.next().unwrap();
                let b = args.next().unwrap();
                Ast::Call2(f2, Box::new(a), Box::new(b))
            }
            _ => unreachable!(),
        })
    }
}
