use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::seqspace::conjugate_exponent;

/// Operator-space structure a matrix norm is taken in.
///
/// `Min(p)`/`Max(p)` live on ℓ_p; `Row`, `Col` and `Oh` live on ℓ_2;
/// `Interp` is the complex interpolation space `(S0, S1)_θ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Min(f64),
    Max(f64),
    Row,
    Col,
    Oh,
    Interp { s0: Box<Structure>, s1: Box<Structure>, theta: f64 },
}

impl Structure {
    pub fn interp(s0: Structure, s1: Structure, theta: f64) -> Self {
        Structure::Interp { s0: Box::new(s0), s1: Box::new(s1), theta }
    }

    /// `(min(ℓ_p), max(ℓ_p))_θ`.
    pub fn o_lp(p: f64, theta: f64) -> Self {
        Self::interp(Structure::Min(p), Structure::Max(p), theta)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Structure::Min(p) | Structure::Max(p) => {
                if p.is_nan() || *p < 1.0 {
                    Err(Error::Parameter(format!("exponent p = {p} must satisfy p >= 1")))
                } else {
                    Ok(())
                }
            }
            Structure::Row | Structure::Col | Structure::Oh => Ok(()),
            Structure::Interp { s0, s1, theta } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(Error::Parameter(format!("theta = {theta} must lie in (0, 1)")));
                }
                s0.validate()?;
                s1.validate()
            }
        }
    }

    /// Structures with a closed-form matrix norm.
    pub fn is_exact(&self) -> bool {
        matches!(self, Structure::Row | Structure::Col | Structure::Oh)
    }

    /// Operator-space dual under the bilinear pairing `⟨e_j, e_k⟩ = δ_jk`.
    pub fn dual(&self) -> Structure {
        match self {
            Structure::Min(p) => Structure::Max(conjugate_exponent(*p)),
            Structure::Max(p) => Structure::Min(conjugate_exponent(*p)),
            Structure::Row => Structure::Col,
            Structure::Col => Structure::Row,
            Structure::Oh => Structure::Oh,
            Structure::Interp { s0, s1, theta } => Structure::interp(s0.dual(), s1.dual(), *theta),
        }
    }

    /// Equality with exponents and θ compared to relative precision `tol`.
    pub fn approx_eq(&self, other: &Structure, tol: f64) -> bool {
        let close = |a: f64, b: f64| {
            (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
        };
        match (self, other) {
            (Structure::Min(a), Structure::Min(b)) | (Structure::Max(a), Structure::Max(b)) => close(*a, *b),
            (Structure::Row, Structure::Row) | (Structure::Col, Structure::Col) | (Structure::Oh, Structure::Oh) => true,
            (
                Structure::Interp { s0: a0, s1: a1, theta: ta },
                Structure::Interp { s0: b0, s1: b1, theta: tb },
            ) => close(*ta, *tb) && a0.approx_eq(b0, tol) && a1.approx_eq(b1, tol),
            _ => false,
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Min(p) => write!(f, "min:p={}", fmt_num(*p)),
            Structure::Max(p) => write!(f, "max:p={}", fmt_num(*p)),
            Structure::Row => write!(f, "row"),
            Structure::Col => write!(f, "col"),
            Structure::Oh => write!(f, "oh"),
            Structure::Interp { s0, s1, theta } => {
                write!(f, "interp:({s0},{s1},theta={})", fmt_num(*theta))
            }
        }
    }
}

/// Parses numbers of the form `2`, `0.5`, `4/3`, `inf`.
pub fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let bad = || Error::Usage(format!("cannot parse number '{t}'"));
    if let Some((num, den)) = t.split_once('/') {
        let a: f64 = num.trim().parse().map_err(|_| bad())?;
        let b: f64 = den.trim().parse().map_err(|_| bad())?;
        if b == 0.0 {
            return Err(bad());
        }
        return Ok(a / b);
    }
    t.parse().map_err(|_| bad())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn err(&self, what: &str) -> Error {
        Error::Usage(format!("structure spec '{}': {what} at offset {}", self.src, self.pos))
    }

    fn eat(&mut self, token: &str) -> bool {
        let rest = self.rest().trim_start();
        let skipped = self.rest().len() - rest.len();
        if rest.len() >= token.len() && rest[..token.len()].eq_ignore_ascii_case(token) {
            self.pos += skipped + token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{token}'")))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let rest = self.rest();
        let end = rest.find([',', ')']).unwrap_or(rest.len());
        let v = parse_number(&rest[..end])?;
        self.pos += end;
        Ok(v)
    }

    fn structure(&mut self) -> Result<Structure> {
        if self.eat("interp:") {
            self.expect("(")?;
            let s0 = self.structure()?;
            self.expect(",")?;
            let s1 = self.structure()?;
            self.expect(",")?;
            self.expect("theta=")?;
            let theta = self.number()?;
            self.expect(")")?;
            Ok(Structure::interp(s0, s1, theta))
        } else if self.eat("min:") {
            self.expect("p=")?;
            Ok(Structure::Min(self.number()?))
        } else if self.eat("max:") {
            self.expect("p=")?;
            Ok(Structure::Max(self.number()?))
        } else if self.eat("row") {
            Ok(Structure::Row)
        } else if self.eat("col") {
            Ok(Structure::Col)
        } else if self.eat("oh") {
            Ok(Structure::Oh)
        } else {
            Err(self.err("unknown structure"))
        }
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { src: s, pos: 0 };
        let out = parser.structure()?;
        if !parser.rest().trim().is_empty() {
            return Err(parser.err("trailing input"));
        }
        out.validate()?;
        Ok(out)
    }
}
