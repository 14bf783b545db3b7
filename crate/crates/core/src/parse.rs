//! Text format for polynomials and polynomial systems.
//!
//! Polynomials are sums of products of numbers, variables and the imaginary
//! unit `i` (or `I`), with `**` or `^` for positive integer powers and a
//! terminating `;`. Multiplication must be written out: `2*x`, never `2x`.
//! A system file starts with a line `N` or `N M` (equations, variables)
//! followed by `N` polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{PolyError, PolySystem, Polynomial, Variables};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("missing ';' at end of polynomial")]
    MissingTerminator,
    #[error("unexpected character '{0}'")]
    UnknownCharacter(char),
    #[error("exponent must be a positive integer")]
    BadExponent,
    #[error("variable `{0}` is not in the variable list")]
    UnknownVariable(String),
    #[error("{0}")]
    Syntax(String),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("header must be `N` or `N M`")]
    BadHeader,
    #[error("expected {expected} polynomials, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("expected {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("{0}")]
    Poly(#[from] PolyError),
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number { text: String, value: f64 },
    Imaginary,
    Plus,
    Minus,
    Star,
    Power,
    LParen,
    RParen,
    Semicolon,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Number { text, .. } => write!(f, "number `{text}`"),
            Token::Imaginary => f.write_str("`i`"),
            Token::Plus => f.write_str("'+'"),
            Token::Minus => f.write_str("'-'"),
            Token::Star => f.write_str("'*'"),
            Token::Power => f.write_str("'**'"),
            Token::LParen => f.write_str("'('"),
            Token::RParen => f.write_str("')'"),
            Token::Semicolon => f.write_str("';'"),
            Token::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, line: usize, column: usize) -> Self {
        Lexer { chars: text.chars().peekable(), line, column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, column, kind }
    }

    /// Next token with its starting position.
    fn next_token(&mut self) -> Result<(Token, usize, usize), ParseError> {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        let (line, column) = (self.line, self.column);
        let Some(&c) = self.chars.peek() else {
            return Ok((Token::End, line, column));
        };
        let token = match c {
            '+' => {
                self.bump();
                Token::Plus
            }
            '-' => {
                self.bump();
                Token::Minus
            }
            '^' => {
                self.bump();
                Token::Power
            }
            '*' => {
                self.bump();
                if self.chars.peek() == Some(&'*') {
                    self.bump();
                    Token::Power
                } else {
                    Token::Star
                }
            }
            '(' => {
                self.bump();
                Token::LParen
            }
            ')' => {
                self.bump();
                Token::RParen
            }
            ';' => {
                self.bump();
                Token::Semicolon
            }
            c if c.is_ascii_digit() || c == '.' => self.number(line, column)?,
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name == "i" || name == "I" {
                    Token::Imaginary
                } else {
                    Token::Ident(name)
                }
            }
            other => return Err(self.error(line, column, ParseErrorKind::UnknownCharacter(other))),
        };
        Ok((token, line, column))
    }

    fn number(&mut self, line: usize, column: usize) -> Result<Token, ParseError> {
        let mut text = String::new();
        let digits = |lexer: &mut Self, text: &mut String| {
            while let Some(&c) = lexer.chars.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    lexer.bump();
                } else {
                    break;
                }
            }
        };
        digits(self, &mut text);
        if self.chars.peek() == Some(&'.') {
            text.push('.');
            self.bump();
            digits(self, &mut text);
        }
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            // Only an exponent if digits follow, possibly after a sign.
            let mut look = self.chars.clone();
            let e = look.next().unwrap();
            let mut sign = None;
            if let Some(&s @ ('+' | '-')) = look.peek() {
                sign = Some(s);
                look.next();
            }
            if matches!(look.peek(), Some(c) if c.is_ascii_digit()) {
                text.push(e);
                self.bump();
                if let Some(s) = sign {
                    text.push(s);
                    self.bump();
                }
                digits(self, &mut text);
            }
        }
        match text.parse::<f64>() {
            Ok(value) if value.is_finite() && text != "." => Ok(Token::Number { text, value }),
            _ => Err(self.error(line, column, ParseErrorKind::BadNumber(text))),
        }
    }
}

/// Monomial as sparse `variable index -> exponent`.
type Monomial = BTreeMap<usize, u32>;

/// Sum of terms over a variable list that may still grow while parsing.
#[derive(Debug, Clone, Default)]
struct Expr {
    terms: Vec<(Complex64, Monomial)>,
}

impl Expr {
    fn constant(c: Complex64) -> Self {
        Expr { terms: vec![(c, Monomial::new())] }
    }

    fn negate(mut self) -> Self {
        for t in &mut self.terms {
            t.0 = -t.0;
        }
        self
    }

    fn add(mut self, other: Expr) -> Self {
        self.terms.extend(other.terms);
        self
    }

    fn mul(&self, other: &Expr) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                let mut m = ma.clone();
                for (&k, &e) in mb {
                    *m.entry(k).or_insert(0) += e;
                }
                terms.push((a * b, m));
            }
        }
        Expr { terms }
    }
}

enum VarScope {
    Fixed(Variables),
    Growing(Vec<String>),
}

impl VarScope {
    fn index_of(&mut self, name: &str) -> Option<usize> {
        match self {
            VarScope::Fixed(vars) => vars.iter().position(|v| v == name),
            VarScope::Growing(vars) => Some(vars.iter().position(|v| v == name).unwrap_or_else(|| {
                vars.push(name.to_string());
                vars.len() - 1
            })),
        }
    }

    fn finish(self) -> Variables {
        match self {
            VarScope::Fixed(v) => v,
            VarScope::Growing(v) => v.into(),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Token,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, line: usize, column: usize) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(text, line, column);
        let (current, line, column) = lexer.next_token()?;
        Ok(Parser { lexer, current, line, column })
    }

    fn advance(&mut self) -> Result<Token, ParseError> {
        let (next, line, column) = self.lexer.next_token()?;
        self.line = line;
        self.column = column;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.column, kind }
    }

    fn at_end(&self) -> bool {
        self.current == Token::End
    }

    /// One `;`-terminated polynomial.
    fn polynomial(&mut self, scope: &mut VarScope) -> Result<Expr, ParseError> {
        let expr = self.expr(scope)?;
        match self.current {
            Token::Semicolon => {
                self.advance()?;
                Ok(expr)
            }
            Token::End => Err(self.error(ParseErrorKind::MissingTerminator)),
            ref other => Err(self.error(ParseErrorKind::Syntax(format!(
                "expected an operator or ';', found {other}{}",
                if matches!(other, Token::Ident(_) | Token::Imaginary | Token::LParen | Token::Number { .. }) {
                    " (multiplication must be written with '*')"
                } else {
                    ""
                }
            )))),
        }
    }

    fn expr(&mut self, scope: &mut VarScope) -> Result<Expr, ParseError> {
        let mut acc = self.term(scope)?;
        loop {
            match self.current {
                Token::Plus => {
                    self.advance()?;
                    acc = acc.add(self.term(scope)?);
                }
                Token::Minus => {
                    self.advance()?;
                    acc = acc.add(self.term(scope)?.negate());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, scope: &mut VarScope) -> Result<Expr, ParseError> {
        let mut acc = self.factor(scope)?;
        while self.current == Token::Star {
            self.advance()?;
            acc = acc.mul(&self.factor(scope)?);
        }
        Ok(acc)
    }

    fn factor(&mut self, scope: &mut VarScope) -> Result<Expr, ParseError> {
        match self.current {
            Token::Minus => {
                self.advance()?;
                return Ok(self.factor(scope)?.negate());
            }
            Token::Plus => {
                self.advance()?;
                return self.factor(scope);
            }
            _ => {}
        }
        let base = self.primary(scope)?;
        if self.current != Token::Power {
            return Ok(base);
        }
        self.advance()?;
        let power = match &self.current {
            Token::Number { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => {
                text.parse::<u32>().ok().filter(|&p| p > 0)
            }
            _ => None,
        };
        let power = power.ok_or_else(|| self.error(ParseErrorKind::BadExponent))?;
        self.advance()?;
        let mut acc = base.clone();
        for _ in 1..power {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn primary(&mut self, scope: &mut VarScope) -> Result<Expr, ParseError> {
        match self.current.clone() {
            Token::Number { value, .. } => {
                self.advance()?;
                Ok(Expr::constant(Complex64::new(value, 0.0)))
            }
            Token::Imaginary => {
                self.advance()?;
                Ok(Expr::constant(Complex64::new(0.0, 1.0)))
            }
            Token::Ident(name) => {
                let index = scope
                    .index_of(&name)
                    .ok_or_else(|| self.error(ParseErrorKind::UnknownVariable(name.clone())))?;
                self.advance()?;
                Ok(Expr { terms: vec![(Complex64::new(1.0, 0.0), Monomial::from([(index, 1)]))] })
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.expr(scope)?;
                if self.current != Token::RParen {
                    return Err(self.error(ParseErrorKind::Syntax(format!("expected ')', found {}", self.current))));
                }
                self.advance()?;
                Ok(inner)
            }
            Token::End => Err(self.error(ParseErrorKind::MissingTerminator)),
            other => Err(self.error(ParseErrorKind::Syntax(format!("unexpected {other}")))),
        }
    }
}

fn to_polynomial(expr: Expr, variables: &Variables) -> Result<Polynomial, PolyError> {
    let n = variables.len();
    Polynomial::new(
        variables.clone(),
        expr.terms.into_iter().map(|(c, m)| {
            let mut e = vec![0; n];
            for (k, a) in m {
                e[k] = a;
            }
            (c, e)
        }),
    )
}

/// Parses one `;`-terminated polynomial. Without a variable list the
/// variables are collected in order of first appearance.
pub fn parse_polynomial(text: &str, variables: Option<&Variables>) -> Result<Polynomial, ParseError> {
    let mut scope = match variables {
        Some(v) => VarScope::Fixed(v.clone()),
        None => VarScope::Growing(Vec::new()),
    };
    let mut parser = Parser::new(text, 1, 1)?;
    let expr = parser.polynomial(&mut scope)?;
    if !parser.at_end() {
        return Err(parser.error(ParseErrorKind::Syntax(format!("unexpected {} after ';'", parser.current))));
    }
    let vars = scope.finish();
    to_polynomial(expr, &vars).map_err(|e| ParseError { line: 1, column: 1, kind: e.into() })
}

/// Parses a list of polynomial strings into one system; variables are
/// collected across all strings in order of first appearance.
pub fn parse_system<S: AsRef<str>>(texts: &[S]) -> Result<PolySystem, ParseError> {
    let mut scope = VarScope::Growing(Vec::new());
    let mut exprs = Vec::with_capacity(texts.len());
    for (k, text) in texts.iter().enumerate() {
        let mut parser = Parser::new(text.as_ref(), k + 1, 1)?;
        exprs.push(parser.polynomial(&mut scope)?);
        if !parser.at_end() {
            return Err(parser.error(ParseErrorKind::Syntax(format!("unexpected {} after ';'", parser.current))));
        }
    }
    finish_system(exprs, scope.finish(), (1, 1))
}

fn finish_system(exprs: Vec<Expr>, vars: Variables, at: (usize, usize)) -> Result<PolySystem, ParseError> {
    let wrap = |e: PolyError| ParseError { line: at.0, column: at.1, kind: e.into() };
    let polys = exprs.into_iter().map(|e| to_polynomial(e, &vars)).collect::<Result<Vec<_>, _>>().map_err(wrap)?;
    PolySystem::new(vars, polys).map_err(wrap)
}

/// Parses the contents of a system file.
pub fn parse_system_file(text: &str) -> Result<PolySystem, ParseError> {
    let mut offset = 0;
    let mut line_no = 1;
    let mut header = None;
    for line in text.split_inclusive('\n') {
        offset += line.len();
        if !line.trim().is_empty() {
            header = Some(line.trim());
            break;
        }
        line_no += 1;
    }
    let header = header.ok_or(ParseError { line: line_no, column: 1, kind: ParseErrorKind::BadHeader })?;
    let bad_header = || ParseError { line: line_no, column: 1, kind: ParseErrorKind::BadHeader };
    let numbers = header.split_whitespace().map(|w| w.parse::<usize>()).collect::<Result<Vec<_>, _>>();
    let (neq, nvar) = match numbers.as_deref() {
        Ok([n]) => (*n, None),
        Ok([n, m]) => (*n, Some(*m)),
        _ => return Err(bad_header()),
    };
    if neq == 0 {
        return Err(bad_header());
    }

    let mut scope = VarScope::Growing(Vec::new());
    let mut parser = Parser::new(&text[offset..], line_no + 1, 1)?;
    let mut exprs = Vec::with_capacity(neq);
    while exprs.len() < neq {
        if parser.at_end() {
            return Err(parser.error(ParseErrorKind::CountMismatch { expected: neq, found: exprs.len() }));
        }
        exprs.push(parser.polynomial(&mut scope)?);
    }
    if !parser.at_end() {
        let mut found = neq;
        // Count the surplus for a clearer message, ignoring later errors.
        while !parser.at_end() && parser.polynomial(&mut scope).is_ok() {
            found += 1;
        }
        return Err(parser.error(ParseErrorKind::CountMismatch { expected: neq, found }));
    }
    let vars = scope.finish();
    let expected = nvar.unwrap_or(neq);
    if vars.len() != expected {
        return Err(ParseError {
            line: line_no,
            column: 1,
            kind: ParseErrorKind::VariableCount { expected, found: vars.len() },
        });
    }
    finish_system(exprs, vars, (line_no, 1))
}

pub fn read_system_file(path: impl AsRef<Path>) -> Result<PolySystem, FileError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| FileError::Io { path: display.clone(), source })?;
    parse_system_file(&text).map_err(|source| FileError::Parse { path: display, source })
}

pub fn write_system_file(system: &PolySystem, path: impl AsRef<Path>) -> Result<(), FileError> {
    let path = path.as_ref();
    fs::write(path, format_system(system))
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

/// System file text: header line, then one polynomial per line.
pub fn format_system(system: &PolySystem) -> String {
    let mut out = if system.len() == system.nvars() {
        format!("{}\n", system.len())
    } else {
        format!("{} {}\n", system.len(), system.nvars())
    };
    for p in system.polys() {
        out.push_str(&format_polynomial(p));
        out.push('\n');
    }
    out
}

/// Shortest text that parses back to exactly `v`.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn format_monomial(exponents: &[u32], variables: &Variables) -> String {
    let mut parts = Vec::new();
    for (name, &e) in variables.iter().zip(exponents) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}**{e}")),
        }
    }
    parts.join("*")
}

/// Canonical text form: graded-lex descending terms, `**` powers, `;`.
pub fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0;".to_string();
    }
    let mut out = String::new();
    for (k, t) in p.terms().iter().enumerate() {
        let c = t.coefficient;
        let mono = format_monomial(&t.exponents, p.variables());
        let with_mono = |body: String| if mono.is_empty() { body } else { format!("{body}*{mono}") };
        let (negative, body) = if c.im == 0.0 {
            let mag = c.re.abs();
            let body = if mag == 1.0 && !mono.is_empty() { mono.clone() } else { with_mono(format_real(mag)) };
            (c.re < 0.0, body)
        } else if c.re == 0.0 {
            let mag = c.im.abs();
            let unit = if mag == 1.0 { "i".to_string() } else { format!("{}*i", format_real(mag)) };
            (c.im < 0.0, with_mono(unit))
        } else {
            let (re, im) = if c.re < 0.0 { (-c.re, -c.im) } else { (c.re, c.im) };
            let op = if im < 0.0 { '-' } else { '+' };
            (c.re < 0.0, with_mono(format!("({} {op} {}*i)", format_real(re), format_real(im.abs()))))
        };
        match (k, negative) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out.push(';');
    out
}
