//! Text syntax for [`DistributionSpec`], used by config files and the CLI.
//!
//! ```text
//! normal(0, 1)            uniform(-sqrt(3), sqrt(3))    exponential(1, -1)
//! cauchy(0, 2/pi)         t(3, 1)                       clognormal(0.94062)
//! ar([0.5, 0.25], normal(0, 2))                         ma([0.5, 0.25], normal(0, 2))
//! ```
//!
//! Numeric arguments accept `+ - * /`, parentheses, `pi`, `e`, `sqrt`, `exp`, `ln`.

use std::str::FromStr;

use super::DistributionSpec;
use crate::error::{Error, Result};

const SPEC_NAMES: [&str; 9] = [
    "normal",
    "uniform",
    "exponential",
    "cauchy",
    "t",
    "student_t",
    "clognormal",
    "ar",
    "ma",
];

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        spec.validate()?;
        Ok(spec)
    }
}

enum Arg {
    Num(f64),
    List(Vec<f64>),
    Spec(DistributionSpec),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::InvalidDistribution(format!(
            "{msg} at column {} in `{}`",
            self.pos + 1,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            if self.pos == start && self.src[self.pos].is_ascii_digit() {
                return None;
            }
            self.pos += 1;
        }
        (self.pos > start)
            .then(|| String::from_utf8_lossy(&self.src[start..self.pos]).to_ascii_lowercase())
    }

    fn spec(&mut self) -> Result<DistributionSpec> {
        let name = self.ident().ok_or_else(|| self.error("expected distribution name"))?;
        if !SPEC_NAMES.contains(&name.as_str()) {
            return Err(self.error(&format!("unknown distribution `{name}`")));
        }
        self.expect(b'(')?;
        let mut args = vec![self.arg()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            args.push(self.arg()?);
        }
        self.expect(b')')?;
        self.build(&name, args)
    }

    fn arg(&mut self) -> Result<Arg> {
        if self.peek() == Some(b'[') {
            self.pos += 1;
            let mut items = vec![self.expr()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                items.push(self.expr()?);
            }
            self.expect(b']')?;
            return Ok(Arg::List(items));
        }
        let save = self.pos;
        if let Some(name) = self.ident() {
            if SPEC_NAMES.contains(&name.as_str()) {
                self.pos = save;
                return Ok(Arg::Spec(self.spec()?));
            }
        }
        self.pos = save;
        Ok(Arg::Num(self.expr()?))
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    v += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => {
                let name = self.ident().ok_or_else(|| self.error("expected a number"))?;
                match name.as_str() {
                    "pi" => Ok(std::f64::consts::PI),
                    "e" => Ok(std::f64::consts::E),
                    "sqrt" | "exp" | "ln" => {
                        self.expect(b'(')?;
                        let v = self.expr()?;
                        self.expect(b')')?;
                        Ok(match name.as_str() {
                            "sqrt" => v.sqrt(),
                            "exp" => v.exp(),
                            _ => v.ln(),
                        })
                    }
                    _ => Err(self.error(&format!("unknown symbol `{name}`"))),
                }
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let bytes = self.src;
        while self.pos < bytes.len() {
            let c = bytes[self.pos];
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(bytes[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("malformed number"))
    }

    fn build(&self, name: &str, args: Vec<Arg>) -> Result<DistributionSpec> {
        let arity = |want: usize| -> Result<()> {
            if args.len() == want {
                Ok(())
            } else {
                Err(self.error(&format!("`{name}` takes {want} arguments, got {}", args.len())))
            }
        };
        let num = |a: &Arg| match a {
            Arg::Num(v) => Ok(*v),
            _ => Err(self.error(&format!("`{name}` expects numeric arguments"))),
        };
        Ok(match name {
            "normal" => {
                arity(2)?;
                DistributionSpec::Normal {
                    mean: num(&args[0])?,
                    sd: num(&args[1])?,
                }
            }
            "uniform" => {
                arity(2)?;
                DistributionSpec::Uniform {
                    low: num(&args[0])?,
                    high: num(&args[1])?,
                }
            }
            "exponential" => {
                arity(2)?;
                DistributionSpec::Exponential {
                    rate: num(&args[0])?,
                    shift: num(&args[1])?,
                }
            }
            "cauchy" => {
                arity(2)?;
                DistributionSpec::Cauchy {
                    loc: num(&args[0])?,
                    scale: num(&args[1])?,
                }
            }
            "t" | "student_t" => {
                arity(2)?;
                let dof = num(&args[0])?;
                if dof.fract() != 0.0 || !(2.0..=1e6).contains(&dof) {
                    return Err(self.error("t degrees of freedom must be an integer ≥ 2"));
                }
                DistributionSpec::StudentT {
                    dof: dof as u32,
                    scale: num(&args[1])?,
                }
            }
            "clognormal" => {
                arity(1)?;
                DistributionSpec::CenteredLogNormal {
                    log_variance: num(&args[0])?,
                }
            }
            _ => {
                arity(2)?;
                let mut it = args.into_iter();
                let coefficients = match it.next() {
                    Some(Arg::List(v)) => v,
                    Some(Arg::Num(v)) => vec![v],
                    _ => return Err(self.error("expected coefficient list")),
                };
                let innovation = match it.next() {
                    Some(Arg::Spec(s)) => Box::new(s),
                    _ => return Err(self.error("expected innovation distribution")),
                };
                if name == "ar" {
                    DistributionSpec::Ar {
                        coefficients,
                        innovation,
                    }
                } else {
                    DistributionSpec::Ma {
                        coefficients,
                        innovation,
                    }
                }
            }
        })
    }
}
