//! Model-file and expression parser.
//!
//! ```text
//! # Brusselator
//! x1' = 1 + x1^2*x2 - 2.5*x1
//! x2' = 1.5*x1 - x1^2*x2
//! time x3            # optional: marks x3 as the clock (x3' must be 1)
//! ```
//! Statements are separated by newlines or `;`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::expr::{self as e, Constant, ExprRef, UnaryOp};
use super::ModelError;
use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Prime,
    Eq,
    Sep,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ModelError> {
    let mut out = Vec::new();
    for (li, raw_line) in src.lines().enumerate() {
        let line = li + 1;
        let text = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let simple = match c {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '\'' => Some(Tok::Prime),
                '=' => Some(Tok::Eq),
                ';' => Some(Tok::Sep),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, col });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
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
                let s: String = chars[start..i].iter().collect();
                if s.matches('.').count() > 1 || s == "." {
                    return Err(syntax(line, col, format!("malformed number `{s}`")));
                }
                out.push(Token { tok: Tok::Num(s), line, col });
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            } else {
                return Err(syntax(line, col, format!("unexpected character `{c}`")));
            }
        }
        out.push(Token {
            tok: Tok::Sep,
            line,
            col: chars.len() + 1,
        });
    }
    let line = out.last().map_or(1, |t| t.line);
    out.push(Token { tok: Tok::Eof, line, col: 1 });
    Ok(out)
}

fn syntax(line: usize, col: usize, msg: String) -> ModelError {
    ModelError::Syntax { line, col, msg }
}

/// Parses `x<k>` into the 0-based index `k - 1`.
fn var_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1)
}

/// Enclosure of the real number a decimal literal denotes.
pub(crate) fn decimal_constant(text: &str) -> Option<Constant> {
    let value: f64 = text.parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    let exact = decimal_to_rational(text)?;
    let approx = BigRational::from_float(value)?;
    if exact == approx {
        return Some(Constant::exact(value));
    }
    let lo = if value == 0.0 { -f64::MIN_POSITIVE } else { value.next_down() };
    let hi = if value == 0.0 { f64::MIN_POSITIVE } else { value.next_up() };
    Some(Constant {
        value,
        enclosure: Interval::new(lo, hi),
    })
}

fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(p) => (&text[..p], text[p + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(p) => (&mant[..p], &mant[p + 1..]),
        None => (mant, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let num: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 400 {
        return None;
    }
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::new(num * pow, BigInt::one())
    } else {
        BigRational::new(num, pow)
    })
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// variables referenced, with first location
    refs: Vec<(usize, usize, usize)>,
    max_vars: Option<usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ModelError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(syntax(t.line, t.col, format!("expected {what}, found {}", describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<ExprRef, ModelError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    lhs = e::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    lhs = e::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprRef, ModelError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    lhs = e::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.next();
                    lhs = e::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprRef, ModelError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(e::neg(self.unary()?));
        }
        if self.peek().tok == Tok::Plus {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprRef, ModelError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let negative = if self.peek().tok == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match &t.tok {
            Tok::Num(s) if s.bytes().all(|b| b.is_ascii_digit()) => {
                let n: i32 = s
                    .parse()
                    .map_err(|_| syntax(t.line, t.col, format!("exponent `{s}` out of range")))?;
                Ok(e::powi(base, if negative { -n } else { n }))
            }
            Tok::Num(_) | Tok::LParen | Tok::Ident(_) => Err(ModelError::NonIntegerExponent {
                line: t.line,
                col: t.col,
            }),
            other => Err(syntax(t.line, t.col, format!("expected exponent, found {}", describe(other)))),
        }
    }

    fn primary(&mut self) -> Result<ExprRef, ModelError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(s) => decimal_constant(s)
                .map(e::literal)
                .ok_or_else(|| syntax(t.line, t.col, format!("invalid number `{s}`"))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(op) = UnaryOp::from_name(name) {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(e::unary(op, arg));
                }
                match var_index(name) {
                    Some(k) => {
                        if let Some(n) = self.max_vars {
                            if k >= n {
                                return Err(ModelError::Undeclared {
                                    line: t.line,
                                    col: t.col,
                                    var: k + 1,
                                });
                            }
                        }
                        self.refs.push((k, t.line, t.col));
                        Ok(e::var(k))
                    }
                    None => Err(syntax(t.line, t.col, format!("unknown identifier `{name}`"))),
                }
            }
            other => Err(syntax(t.line, t.col, format!("expected an operand, found {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(s) => format!("number `{s}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Prime => "`'`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Sep => "end of statement".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parsed model text before it is turned into an [`super::OdeSystem`].
pub(crate) struct ParsedModel {
    pub rhs: Vec<ExprRef>,
    pub time_index: Option<usize>,
}

pub(crate) fn parse_model_text(src: &str) -> Result<ParsedModel, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        refs: Vec::new(),
        max_vars: None,
    };
    let mut eqs: Vec<(usize, usize, ExprRef)> = Vec::new();
    let mut time: Option<(usize, usize)> = None;
    loop {
        let t = p.next();
        match &t.tok {
            Tok::Eof => break,
            Tok::Sep => continue,
            Tok::Ident(name) if name == "time" => {
                let v = p.next();
                let k = match &v.tok {
                    Tok::Ident(n) => var_index(n),
                    _ => None,
                }
                .ok_or_else(|| syntax(v.line, v.col, "expected a variable after `time`".into()))?;
                if time.is_some() {
                    return Err(syntax(t.line, t.col, "duplicate `time` directive".into()));
                }
                time = Some((k, t.line));
                end_of_statement(&mut p)?;
            }
            Tok::Ident(name) => {
                let k = var_index(name).ok_or_else(|| {
                    syntax(t.line, t.col, format!("expected an equation `x<k>' = ...`, found `{name}`"))
                })?;
                p.expect(Tok::Prime, "`'` after the variable")?;
                p.expect(Tok::Eq, "`=`")?;
                if eqs.iter().any(|(j, _, _)| *j == k) {
                    return Err(ModelError::Duplicate { line: t.line, var: k + 1 });
                }
                let rhs = p.expr()?;
                eqs.push((k, t.line, rhs));
                end_of_statement(&mut p)?;
            }
            other => {
                return Err(syntax(t.line, t.col, format!("expected an equation, found {}", describe(other))));
            }
        }
    }
    if eqs.is_empty() {
        return Err(ModelError::Empty);
    }
    let n = eqs.len();
    let mut rhs: Vec<Option<ExprRef>> = vec![None; n];
    for (k, line, expr) in eqs {
        if k >= n {
            // some lower index must be missing
            let missing = rhs.iter().position(Option::is_none).unwrap_or(0);
            return Err(ModelError::MissingEquation { var: missing + 1, line });
        }
        rhs[k] = Some(expr);
    }
    if let Some(&(k, line, col)) = p.refs.iter().find(|(k, _, _)| *k >= n) {
        return Err(ModelError::Undeclared { line, col, var: k + 1 });
    }
    let rhs: Vec<ExprRef> = rhs.into_iter().map(|e| e.expect("all slots filled")).collect();
    let time_index = match time {
        Some((k, line)) => {
            if k >= n {
                return Err(ModelError::TimeVariable {
                    line,
                    msg: format!("x{} has no equation", k + 1),
                });
            }
            if !e::is_const(&rhs[k], 1.0) {
                return Err(ModelError::TimeVariable {
                    line,
                    msg: format!("x{}' must be the constant 1", k + 1),
                });
            }
            Some(k)
        }
        None => None,
    };
    Ok(ParsedModel { rhs, time_index })
}

fn end_of_statement(p: &mut Parser<'_>) -> Result<(), ModelError> {
    let t = p.next();
    match t.tok {
        Tok::Sep | Tok::Eof => Ok(()),
        other => Err(syntax(t.line, t.col, format!("unexpected {} after expression", describe(&other)))),
    }
}

/// Parses a single expression over `n` variables.
pub fn parse_expr(src: &str, n: usize) -> Result<ExprRef, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        refs: Vec::new(),
        max_vars: Some(n),
    };
    let ex = p.expr()?;
    while p.peek().tok == Tok::Sep {
        p.next();
    }
    let t = p.next();
    if t.tok != Tok::Eof {
        return Err(syntax(t.line, t.col, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(ex)
}

#[cfg(test)]
fn is_exact_literal(text: &str) -> bool {
    decimal_constant(text).is_some_and(|c| c.enclosure.is_point())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_enclosures() {
        assert!(is_exact_literal("2.5"));
        assert!(is_exact_literal("1e3"));
        assert!(!is_exact_literal("0.3"));
        let c = decimal_constant("0.1").unwrap();
        assert!(c.enclosure.lo() < 0.1 && 0.1 < c.enclosure.hi());
    }

    #[test]
    fn precedence() {
        let ex = parse_expr("-x1^2 + 2*x2/4", 2).unwrap();
        assert_eq!(ex.eval_real(&[3.0, 2.0]), -9.0 + 1.0);
        let ex = parse_expr("2^-1 * x1", 1).unwrap();
        assert_eq!(ex.eval_real(&[4.0]), 2.0);
    }

    #[test]
    fn non_integer_exponent() {
        assert!(matches!(parse_expr("x1^2.5", 1), Err(ModelError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expr("x1^(2)", 1), Err(ModelError::NonIntegerExponent { .. })));
    }

    #[test]
    fn syntax_error_location() {
        match parse_model_text("x1' = 1 +\nx2' = x1 * * 2") {
            Err(ModelError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {:?}", other.err()),
        }
        match parse_model_text("x1' = x1 $ 2") {
            Err(ModelError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 10)),
            other => panic!("unexpected {:?}", other.err()),
        }
    }
}
