//! Expression language for elements of F_{q^k}(t) and affine maps on K^d.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := primary ('/' primary)*
//! primary:= uint | 't' | 'w' | var | '(' expr ')'
//! ```
//!
//! `/` binds tighter than `^`, so `t/t^2` is `(t/t)^2`. Integers reduce mod p.
//! `w` is the class of the modulus variable of a proper constant-field
//! extension. Variables (`x` in dimension 1, `x1 … xd` otherwise) are only
//! legal when parsing map coordinates.

use std::fmt;
use std::sync::Arc;

use charp_core::funcfield::{FieldError, GaloisField, RatFunc};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression is not affine in the variables")]
    NonAffine,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`w` needs a proper constant-field extension")]
    NoExtension,
    #[error(transparent)]
    Field(FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn err(self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            line: self.line,
            col: self.col,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    T,
    W,
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "integer {v}"),
            Tok::T => write!(f, "`t`"),
            Tok::W => write!(f, "`w`"),
            Tok::Var(v) => write!(f, "`{v}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Int(text.parse().expect("ascii digits"))
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "t" => Tok::T,
                "w" => Tok::W,
                _ => Tok::Var(word),
            }
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(pos.err(ParseErrorKind::Syntax(format!(
                        "unexpected character `{c}`"
                    ))))
                }
            }
        };
        col += i - start;
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, col }));
    Ok(out)
}

/// Parsed syntax tree; every node keeps the position of its operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    T,
    W(Pos),
    Var(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>, Pos),
    Sub(Box<Expr>, Box<Expr>, Pos),
    Mul(Box<Expr>, Box<Expr>, Pos),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u64, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.pos().err(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek()
        )))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    let (_, pos) = self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?), pos);
                }
                Tok::Minus => {
                    let (_, pos) = self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            let (_, pos) = self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?), pos);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, pos) = self.bump();
        match self.bump() {
            (Tok::Int(n), npos) => {
                let n = n
                    .to_u64()
                    .ok_or_else(|| npos.err(ParseErrorKind::Syntax("exponent too large".into())))?;
                Ok(Expr::Pow(Box::new(base), n, pos))
            }
            (t, npos) => Err(npos.err(ParseErrorKind::Syntax(format!(
                "expected an unsigned exponent, found {t}"
            )))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.primary()?;
        while *self.peek() == Tok::Slash {
            let (_, pos) = self.bump();
            lhs = Expr::Div(Box::new(lhs), Box::new(self.primary()?), pos);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::T => {
                self.bump();
                Ok(Expr::T)
            }
            Tok::W => {
                let (_, pos) = self.bump();
                Ok(Expr::W(pos))
            }
            Tok::Var(v) => {
                let (_, pos) = self.bump();
                Ok(Expr::Var(v, pos))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("an integer, `t`, a variable or `(`")),
        }
    }
}

pub fn parse_ast(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Values an expression can evaluate to.
trait Value: Sized + Clone {
    fn constant(c: RatFunc, ctx: &Ctx) -> Self;
    fn var(name: &str, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError>;
    fn add(&self, o: &Self, ctx: &Ctx) -> Result<Self, FieldError>;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError>;
    fn div(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError>;
    fn pow(&self, n: u64, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError>;
}

struct Ctx {
    field: Arc<GaloisField>,
    cap: usize,
    dim: usize,
}

fn field_err(pos: Pos, e: FieldError) -> ParseError {
    match e {
        FieldError::DivisionByZero => pos.err(ParseErrorKind::DivisionByZero),
        e => pos.err(ParseErrorKind::Field(e)),
    }
}

impl Value for RatFunc {
    fn constant(c: RatFunc, _: &Ctx) -> Self {
        c
    }

    fn var(name: &str, pos: Pos, _: &Ctx) -> Result<Self, ParseError> {
        Err(pos.err(ParseErrorKind::UnknownVariable(name.into())))
    }

    fn add(&self, o: &Self, ctx: &Ctx) -> Result<Self, FieldError> {
        self.checked_add(o, ctx.cap)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        self.checked_mul(o, ctx.cap).map_err(|e| field_err(pos, e))
    }

    fn div(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        let r = self.div(o).map_err(|e| field_err(pos, e))?;
        r.check_degree(ctx.cap).map_err(|e| field_err(pos, e))?;
        Ok(r)
    }

    fn pow(&self, n: u64, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        let n = i64::try_from(n)
            .map_err(|_| pos.err(ParseErrorKind::Syntax("exponent too large".into())))?;
        self.checked_pow(n, ctx.cap).map_err(|e| field_err(pos, e))
    }
}

/// Σ lin[i]·x_i + cst.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub lin: Vec<RatFunc>,
    pub cst: RatFunc,
}

impl AffineForm {
    fn is_constant(&self) -> bool {
        self.lin.iter().all(|c| c.is_zero())
    }

    fn scale(&self, c: &RatFunc, cap: usize) -> Result<Self, FieldError> {
        Ok(AffineForm {
            lin: self
                .lin
                .iter()
                .map(|x| x.checked_mul(c, cap))
                .collect::<Result<_, _>>()?,
            cst: self.cst.checked_mul(c, cap)?,
        })
    }
}

impl Value for AffineForm {
    fn constant(c: RatFunc, ctx: &Ctx) -> Self {
        AffineForm {
            lin: vec![RatFunc::zero(ctx.field.clone()); ctx.dim],
            cst: c,
        }
    }

    fn var(name: &str, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        let index = if ctx.dim == 1 && name == "x" {
            Some(0)
        } else {
            name.strip_prefix('x')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= ctx.dim)
                .map(|i| i - 1)
        };
        let i = index.ok_or_else(|| pos.err(ParseErrorKind::UnknownVariable(name.into())))?;
        let zero = RatFunc::zero(ctx.field.clone());
        let mut lin = vec![zero.clone(); ctx.dim];
        lin[i] = RatFunc::one(ctx.field.clone());
        Ok(AffineForm { lin, cst: zero })
    }

    fn add(&self, o: &Self, ctx: &Ctx) -> Result<Self, FieldError> {
        Ok(AffineForm {
            lin: self
                .lin
                .iter()
                .zip(&o.lin)
                .map(|(a, b)| a.checked_add(b, ctx.cap))
                .collect::<Result<_, _>>()?,
            cst: self.cst.checked_add(&o.cst, ctx.cap)?,
        })
    }

    fn neg(&self) -> Self {
        AffineForm {
            lin: self.lin.iter().map(|x| -x).collect(),
            cst: -&self.cst,
        }
    }

    fn mul(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        let r = if o.is_constant() {
            self.scale(&o.cst, ctx.cap)
        } else if self.is_constant() {
            o.scale(&self.cst, ctx.cap)
        } else {
            return Err(pos.err(ParseErrorKind::NonAffine));
        };
        r.map_err(|e| field_err(pos, e))
    }

    fn div(&self, o: &Self, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        if !o.is_constant() {
            return Err(pos.err(ParseErrorKind::NonAffine));
        }
        let inv = o.cst.inv().map_err(|e| field_err(pos, e))?;
        self.scale(&inv, ctx.cap).map_err(|e| field_err(pos, e))
    }

    fn pow(&self, n: u64, pos: Pos, ctx: &Ctx) -> Result<Self, ParseError> {
        if self.is_constant() {
            let c = Value::pow(&self.cst, n, pos, ctx)?;
            return Ok(Self::constant(c, ctx));
        }
        match n {
            0 => Ok(Self::constant(RatFunc::one(ctx.field.clone()), ctx)),
            1 => Ok(self.clone()),
            _ => Err(pos.err(ParseErrorKind::NonAffine)),
        }
    }
}

fn eval<V: Value>(e: &Expr, ctx: &Ctx) -> Result<V, ParseError> {
    Ok(match e {
        Expr::Int(v) => {
            let p = BigUint::from(ctx.field.characteristic());
            let r = (v % p).to_u64().expect("residue below p");
            V::constant(RatFunc::constant(ctx.field.clone(), r), ctx)
        }
        Expr::T => V::constant(RatFunc::t(ctx.field.clone()), ctx),
        Expr::W(pos) => {
            let w = ctx
                .field
                .w()
                .ok_or_else(|| pos.err(ParseErrorKind::NoExtension))?;
            V::constant(RatFunc::constant(ctx.field.clone(), w), ctx)
        }
        Expr::Var(name, pos) => V::var(name, *pos, ctx)?,
        Expr::Neg(a) => eval::<V>(a, ctx)?.neg(),
        Expr::Add(a, b, pos) => eval::<V>(a, ctx)?
            .add(&eval(b, ctx)?, ctx)
            .map_err(|e| field_err(*pos, e))?,
        Expr::Sub(a, b, pos) => eval::<V>(a, ctx)?
            .add(&eval::<V>(b, ctx)?.neg(), ctx)
            .map_err(|e| field_err(*pos, e))?,
        Expr::Mul(a, b, pos) => eval::<V>(a, ctx)?.mul(&eval(b, ctx)?, *pos, ctx)?,
        Expr::Div(a, b, pos) => eval::<V>(a, ctx)?.div(&eval(b, ctx)?, *pos, ctx)?,
        Expr::Pow(a, n, pos) => eval::<V>(a, ctx)?.pow(*n, *pos, ctx)?,
    })
}

/// Parse a field element in canonical form, checking the degree cap.
pub fn parse_expr_capped(
    src: &str,
    field: &Arc<GaloisField>,
    cap: usize,
) -> Result<RatFunc, ParseError> {
    let ast = parse_ast(src)?;
    eval::<RatFunc>(
        &ast,
        &Ctx {
            field: field.clone(),
            cap,
            dim: 0,
        },
    )
}

pub fn parse_expr(src: &str, field: &Arc<GaloisField>) -> Result<RatFunc, ParseError> {
    parse_expr_capped(src, field, charp_core::funcfield::DEFAULT_DEGREE_CAP)
}

/// Parse one coordinate of an affine map in the variables of K^dim.
pub fn parse_affine(
    src: &str,
    field: &Arc<GaloisField>,
    dim: usize,
    cap: usize,
) -> Result<AffineForm, ParseError> {
    let ast = parse_ast(src)?;
    eval::<AffineForm>(
        &ast,
        &Ctx {
            field: field.clone(),
            cap,
            dim,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Arc<GaloisField> {
        Arc::new(GaloisField::prime(p).unwrap())
    }

    fn show(src: &str, p: u64) -> String {
        parse_expr(src, &f(p)).unwrap().to_string()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(show("t^2 + 1", 2), "t^2 + 1");
        assert_eq!(show("(t+1)/(t)", 2), "(t + 1) / t");
        assert_eq!(show("3*t", 3), "0");
        assert_eq!(show("(t^2-1)/(t-1)", 3), "t + 1");
        assert_eq!(show("-1", 5), "4");
        assert_eq!(
            show("12345678901234567890123 * t", 7),
            format!("{}*t", 12345678901234567890123u128 % 7)
        );
    }

    #[test]
    fn division_binds_tighter_than_powers() {
        assert_eq!(show("t/t^2", 3), "1");
        assert_eq!(show("t/(t^2)", 3), "1 / t");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("t +\n  * 2", &f(2)).unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_expr("1/(t-t)", &f(3)).unwrap_err();
        assert_eq!(
            (e.kind, e.line, e.col),
            (ParseErrorKind::DivisionByZero, 1, 2)
        );
        let e = parse_expr("t/3", &f(3)).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);
        assert!(matches!(
            parse_expr("x + 1", &f(2)).unwrap_err().kind,
            ParseErrorKind::UnknownVariable(_)
        ));
        assert!(matches!(
            parse_expr("w", &f(2)).unwrap_err().kind,
            ParseErrorKind::NoExtension
        ));
        assert!(matches!(
            parse_expr("(t", &f(2)).unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
        assert!(matches!(
            parse_expr("t $ 1", &f(2)).unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
    }

    #[test]
    fn extension_constants() {
        let f4 = Arc::new(GaloisField::new(2, 2, 1).unwrap());
        let x = parse_expr("w*t + w^2", &f4).unwrap();
        assert_eq!(parse_expr(&x.to_string(), &f4).unwrap(), x);
        // w is a root of the modulus, so w² = w + 1 over F_2
        assert_eq!(
            parse_expr("w^2 + w + 1", &f4).unwrap(),
            RatFunc::zero(f4.clone())
        );
    }

    #[test]
    fn affine_coordinates() {
        let f2 = f(2);
        let a = parse_affine("t*(x-1)+1", &f2, 1, 4096).unwrap();
        assert_eq!(a.lin, vec![RatFunc::t(f2.clone())]);
        assert_eq!(a.cst.to_string(), "t + 1");
        let b = parse_affine("(x1 + t*x2)/(t+1) + 1", &f2, 2, 4096).unwrap();
        assert_eq!(b.lin[1].to_string(), "t / (t + 1)");
        assert_eq!(
            parse_affine("x*x", &f2, 1, 4096).unwrap_err().kind,
            ParseErrorKind::NonAffine
        );
        assert_eq!(
            parse_affine("1/x", &f2, 1, 4096).unwrap_err().kind,
            ParseErrorKind::NonAffine
        );
        assert!(matches!(
            parse_affine("x3", &f2, 2, 4096).unwrap_err().kind,
            ParseErrorKind::UnknownVariable(_)
        ));
    }
}
