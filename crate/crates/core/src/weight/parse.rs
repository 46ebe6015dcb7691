//! Text format for weights.
//!
//! ```text
//! poly:1 - 2*x + x^2        polynomial in x with + - * / ^ and parentheses
//! pw:[0,1/2]=1;[1/2,1]=2*x  piecewise polynomial, pieces covering [0,1] in order
//! chi:1/4,3/4               normalized indicator χ_[a,b]/(b-a)
//! dirac:0.3                 point mass at a
//! pow:1/2                   x^(-alpha)
//! hardy:1                   1/x
//! ```
//!
//! Decimal literals are exact: `0.3` is `3/10`.

use num_rational::BigRational;
use num_traits::Zero;

use super::{Weight, WeightError};
use crate::numcore::{parse_rational, PiecewisePolynomial, Polynomial};

type QPoly = Polynomial<BigRational>;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, pos: usize) -> Self {
        Cursor { src, pos }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, WeightError> {
        Err(WeightError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), WeightError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn expect_end(&mut self) -> Result<(), WeightError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected `{}`", self.peek().unwrap()))
        }
    }

    /// Unsigned decimal literal `123`, `1.5`, `.25`.
    fn decimal(&mut self) -> Result<BigRational, WeightError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = &self.src[start..self.pos];
        parse_rational(text).map_err(|e| WeightError::Syntax {
            position: start,
            message: e.to_string(),
        })
    }

    /// Signed rational `-3/4`, `0.3`, `7`.
    fn number(&mut self) -> Result<BigRational, WeightError> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut value = self.decimal()?;
        if self.eat('/') {
            let at = self.pos;
            let den = self.decimal()?;
            if den.is_zero() {
                return Err(WeightError::Syntax {
                    position: at,
                    message: "division by zero".into(),
                });
            }
            value /= den;
        }
        Ok(if neg { -value } else { value })
    }

    fn integer(&mut self) -> Result<u32, WeightError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("expected a non-negative integer")
        })
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<QPoly, WeightError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<QPoly, WeightError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.unary()?;
                match rhs.degree() {
                    Some(0) => {
                        let inv = BigRational::from_integer(1.into()) / rhs.coeff(0);
                        acc = acc.scale(&inv);
                    }
                    None => {
                        return Err(WeightError::Syntax {
                            position: at,
                            message: "division by zero".into(),
                        })
                    }
                    Some(_) => {
                        return Err(WeightError::Syntax {
                            position: at,
                            message: "division by a non-constant polynomial".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    // unary := ('-' | '+') unary | power
    fn unary(&mut self) -> Result<QPoly, WeightError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    // power := atom ('^' integer)?
    fn power(&mut self) -> Result<QPoly, WeightError> {
        let base = self.atom()?;
        if self.eat('^') {
            let n = self.integer()?;
            if n > 200 {
                return self.err("exponent too large");
            }
            Ok(base.pow(n as usize))
        } else {
            Ok(base)
        }
    }

    // atom := number | 'x' | '(' expr ')'
    fn atom(&mut self) -> Result<QPoly, WeightError> {
        self.skip_ws();
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(Polynomial::x())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Polynomial::constant(self.decimal()?)),
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn polynomial(&mut self) -> Result<QPoly, WeightError> {
        if self.at_end() {
            return self.err("empty polynomial");
        }
        self.expr()
    }
}

/// Parses a weight from its text form.
pub fn parse_weight(spec: &str) -> Result<Weight, WeightError> {
    let Some(colon) = spec.find(':') else {
        return Err(WeightError::Syntax {
            position: spec.len(),
            message: "expected `kind:payload`".into(),
        });
    };
    let kind = spec[..colon].trim();
    let mut cur = Cursor::new(spec, colon + 1);
    let weight = match kind {
        "poly" => {
            let p = cur.polynomial()?;
            cur.expect_end()?;
            Weight::poly(p)?
        }
        "pw" => {
            let mut bps: Vec<BigRational> = Vec::new();
            let mut pieces = Vec::new();
            loop {
                cur.expect('[')?;
                let at = cur.pos;
                let l = cur.number()?;
                cur.expect(',')?;
                let r = cur.number()?;
                cur.expect(']')?;
                cur.expect('=')?;
                match bps.last() {
                    None => bps.push(l),
                    Some(prev) if *prev == l => {}
                    Some(_) => {
                        return Err(WeightError::Syntax {
                            position: at,
                            message: "pieces must be contiguous".into(),
                        })
                    }
                }
                bps.push(r);
                pieces.push(cur.polynomial()?);
                if !cur.eat(';') {
                    break;
                }
            }
            cur.expect_end()?;
            let pw = PiecewisePolynomial::new(bps, pieces)
                .map_err(|e| WeightError::Domain(e.to_string()))?;
            Weight::piecewise(pw)?
        }
        "chi" => {
            let a = cur.number()?;
            cur.expect(',')?;
            let b = cur.number()?;
            cur.expect_end()?;
            Weight::indicator(a, b)?
        }
        "dirac" => {
            let a = cur.number()?;
            cur.expect_end()?;
            Weight::dirac(a)?
        }
        "pow" => {
            let alpha = cur.number()?;
            cur.expect_end()?;
            Weight::power(alpha)?
        }
        "hardy" => {
            let order = cur.integer()?;
            cur.expect_end()?;
            Weight::hardy(order)?
        }
        other => {
            return Err(WeightError::Syntax {
                position: 0,
                message: format!("unknown weight kind `{other}`"),
            })
        }
    };
    Ok(weight)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn examples() {
        assert_eq!(parse_weight("poly:1").unwrap(), Weight::Poly(Polynomial::one()));
        assert_eq!(
            parse_weight("chi:1/4,3/4").unwrap(),
            Weight::Indicator { a: q(1, 4), b: q(3, 4) }
        );
        assert_eq!(parse_weight("dirac:0.3").unwrap(), Weight::Dirac { a: q(3, 10) });
        assert_eq!(parse_weight("pow: 1/2").unwrap(), Weight::Power { alpha: q(1, 2) });
        assert_eq!(parse_weight("hardy:1").unwrap(), Weight::Hardy { order: 1 });
    }

    #[test]
    fn polynomial_expressions() {
        let w = parse_weight("poly:1 - 2*x + x^2").unwrap();
        assert_eq!(w, Weight::Poly(Polynomial::new(vec![q(1, 1), q(-2, 1), q(1, 1)])));
        let w = parse_weight("poly:(1-x)^2/4 + 0.5*x").unwrap();
        assert_eq!(w, Weight::Poly(Polynomial::new(vec![q(1, 4), q(0, 1), q(1, 4)])));
        let w = parse_weight("poly:-1/3*x + 1").unwrap();
        assert_eq!(w, Weight::Poly(Polynomial::new(vec![q(1, 1), q(-1, 3)])));
    }

    #[test]
    fn piecewise() {
        let w = parse_weight("pw:[0,1/2]=1;[1/2,1]=2*x").unwrap();
        let Weight::PiecewisePoly(pw) = w else { panic!() };
        assert_eq!(pw.breakpoints(), &[q(0, 1), q(1, 2), q(1, 1)]);
        assert!(parse_weight("pw:[0,1/2]=1;[3/4,1]=1").is_err());
        assert!(parse_weight("pw:[0,1/2]=1").is_err());
        assert!(matches!(
            parse_weight("pw:[0,1/2]=1;[1/2,1]=1-2*x"),
            Err(WeightError::Domain(_))
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_weight("poly:1 + * x") {
            Err(WeightError::Syntax { position, .. }) => assert_eq!(position, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_weight("poly"), Err(WeightError::Syntax { .. })));
        assert!(matches!(parse_weight("foo:1"), Err(WeightError::Syntax { .. })));
        assert!(matches!(parse_weight("poly:x/x"), Err(WeightError::Syntax { .. })));
        assert!(matches!(parse_weight("chi:1/2"), Err(WeightError::Syntax { .. })));
        assert!(matches!(parse_weight("dirac:0.5 x"), Err(WeightError::Syntax { .. })));
        assert!(matches!(parse_weight("poly:"), Err(WeightError::Syntax { .. })));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(parse_weight("chi:3/4,1/4"), Err(WeightError::Domain(_))));
        assert!(matches!(parse_weight("dirac:1"), Err(WeightError::Domain(_))));
        assert!(matches!(parse_weight("pow:1"), Err(WeightError::Domain(_))));
        assert!(matches!(parse_weight("hardy:2"), Err(WeightError::Domain(_))));
        assert!(matches!(parse_weight("poly:x - 1/2"), Err(WeightError::Domain(_))));
    }

    #[test]
    fn display_round_trip() {
        for s in [
            "poly:1",
            "poly:1/3 - x + 7/2*x^3",
            "pw:[0,1/3]=x;[1/3,1]=1/3",
            "chi:0,1/2",
            "dirac:3/10",
            "pow:1/2",
            "hardy:1",
        ] {
            let w = parse_weight(s).unwrap();
            assert_eq!(w.to_string(), s);
            assert_eq!(parse_weight(&w.to_string()).unwrap(), w);
        }
    }
}
