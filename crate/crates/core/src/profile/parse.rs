//! Text grammar for profile expressions.
//!
//! ```text
//! expr  := ['+'|'-'] term (('+'|'-') term)*
//! term  := [rational '*'] atom
//! atom  := 'N(' r ',' r ')' | 'Exp(' r ')' | 'Mono(' nat ',' r ',' r ')'
//!        | 'U(' r ',' r ')' | 'Dirac(' ident ')'
//! r     := ['-'|'+'] int ['/' int]
//! ```
//!
//! `U(a,b)` is sugar for `(1/(b-a))*Mono(0,a,b)`. Whitespace is ignored
//! between tokens. Columns in errors are 1-based character positions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Atom, ProfileExpr};
use crate::error::{Error, Result};
use crate::linalg::Rational;

pub fn parse_profile(text: &str) -> Result<ProfileExpr> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(self.error(format!("expected `{c}`, found `{found}`"))),
                None => Err(self.error(format!("expected `{c}`, found end of input"))),
            }
        }
    }

    fn expr(&mut self) -> Result<ProfileExpr> {
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        if self.eat('-') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        loop {
            let (c, atom) = self.term()?;
            terms.push((sign * c, atom));
            sign = if self.eat('+') {
                Rational::one()
            } else if self.eat('-') {
                -Rational::one()
            } else {
                break;
            };
        }
        Ok(ProfileExpr::new(terms))
    }

    fn term(&mut self) -> Result<(Rational, Atom)> {
        let starts_number = matches!(self.peek(), Some(c) if c.is_ascii_digit());
        let coefficient = if starts_number {
            let c = self.rational()?;
            self.expect('*')?;
            c
        } else {
            Rational::one()
        };
        let (scale, atom) = self.atom()?;
        Ok((coefficient * scale, atom))
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// An atom together with the scale that its sugar implies (`U`).
    fn atom(&mut self) -> Result<(Rational, Atom)> {
        self.skip_ws();
        let start = self.pos;
        let name = self.identifier();
        let at = |e: Error| match e {
            Error::InvalidAtom(message) => Error::Parse {
                column: start + 1,
                message,
            },
            other => other,
        };
        match name.as_str() {
            "N" => {
                self.expect('(')?;
                let mu = self.rational()?;
                self.expect(',')?;
                let sigma = self.rational()?;
                self.expect(')')?;
                Ok((Rational::one(), Atom::gaussian(mu, sigma).map_err(at)?))
            }
            "Exp" => {
                self.expect('(')?;
                let lambda = self.rational()?;
                self.expect(')')?;
                Ok((Rational::one(), Atom::exponential(lambda).map_err(at)?))
            }
            "Mono" => {
                self.expect('(')?;
                let degree = self.natural()?;
                self.expect(',')?;
                let lo = self.rational()?;
                self.expect(',')?;
                let hi = self.rational()?;
                self.expect(')')?;
                Ok((Rational::one(), Atom::monomial(degree, lo, hi).map_err(at)?))
            }
            "U" => {
                self.expect('(')?;
                let lo = self.rational()?;
                self.expect(',')?;
                let hi = self.rational()?;
                self.expect(')')?;
                let width = &hi - &lo;
                let atom = Atom::monomial(0, lo, hi).map_err(at)?;
                Ok((width.recip(), atom))
            }
            "Dirac" => {
                self.expect('(')?;
                let symbol = self.identifier();
                if symbol.is_empty() {
                    return Err(self.error("expected a symbol name"));
                }
                self.expect(')')?;
                Ok((Rational::one(), Atom::discrete(symbol).map_err(at)?))
            }
            "" => {
                self.pos = start;
                match self.peek() {
                    Some(c) => Err(self.error(format!("expected an atom, found `{c}`"))),
                    None => Err(self.error("expected an atom, found end of input")),
                }
            }
            other => {
                self.pos = start;
                Err(self.error(format!("unknown atom `{other}`")))
            }
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn natural(&mut self) -> Result<u32> {
        let n = self.digits()?;
        u32::try_from(n).map_err(|_| self.error("degree too large"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let num = self.digits()?;
        let den = if self.eat('/') {
            let d = self.digits()?;
            if d.is_zero() {
                return Err(self.error("zero denominator"));
            }
            d
        } else {
            BigInt::one()
        };
        if self.chars.get(self.pos) == Some(&'.') {
            return Err(self.error("decimal literals are not allowed; use int/int"));
        }
        let r = Rational::new(num, den);
        Ok(if negative { -r } else { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    #[test]
    fn parses_every_atom_form() {
        let p = parse_profile("1/3*N(0,1) + 2/3*Exp(2) - Mono(2,-1,1/2) + U(0,4) + 1/2*Dirac(a)")
            .unwrap();
        assert_eq!(p.terms().len(), 5);
        assert!(p.terms().contains(&(rat(1, 4), Atom::monomial(0, int(0), int(4)).unwrap())));
        assert!(p.terms().contains(&(int(-1), Atom::monomial(2, int(-1), rat(1, 2)).unwrap())));
    }

    #[test]
    fn uniform_sugar() {
        assert_eq!(
            parse_profile("U(-1, 0)").unwrap(),
            ProfileExpr::new(vec![(int(1), Atom::monomial(0, int(-1), int(0)).unwrap())])
        );
    }

    #[test]
    fn leading_minus_and_whitespace() {
        let p = parse_profile("  - 2 * Exp( 1 ) + 2*Exp(2)").unwrap();
        assert_eq!(p.total_mass(), int(0));
    }

    #[test]
    fn reports_column() {
        match parse_profile("N(0,1) + Foo(1)").unwrap_err() {
            Error::Parse { column, .. } => assert_eq!(column, 10),
            e => panic!("unexpected {e}"),
        }
        match parse_profile("N(0.5,1)").unwrap_err() {
            Error::Parse { column, message } => {
                assert_eq!(column, 4);
                assert!(message.contains("decimal"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(parse_profile("N(0,0)").is_err());
        assert!(parse_profile("U(1,1)").is_err());
        assert!(parse_profile("Exp(1/0)").is_err());
        assert!(parse_profile("2*").is_err());
        assert!(parse_profile("").is_err());
        assert!(parse_profile("N(0,1) N(0,2)").is_err());
    }
}
