//! Expression parser producing canonical [`PuiseuxPoly`] values.
//!
//! Grammar:
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' exponent)?
//! base     := 'x' | 'y' | rational | '(' expr ')' | 'series(' expr [',' integer] ')'
//! exponent := integer | '(' integer '/' integer ')'
//! rational := integer ('/' integer)?
//! ```
//! `series(g, N)` expands to the partial geometric sum `g + g^2 + ... + g^N`;
//! when the order argument is omitted it falls back to the configured default
//! (the CLI `--series-order` flag).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::puiseux::PuiseuxPoly;

/// Options controlling parsing.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Default truncation order for `series(g)` without an explicit order.
    pub series_order: Option<u64>,
}

/// Parses with no implicit series order; `series(g)` then requires the
/// two-argument form.
pub fn parse_poly(text: &str) -> Result<PuiseuxPoly, ParseError> {
    parse_poly_with(text, &ParseOptions::default())
}

pub fn parse_poly_with(text: &str, opts: &ParseOptions) -> Result<PuiseuxPoly, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        opts,
    };
    let poly = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(ParseError::Syntax {
            pos: p.peek_pos(),
            msg: format!("unexpected trailing input `{}`", p.peek_desc()),
        });
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    X,
    Y,
    Series,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n: BigInt = digits.parse().expect("digits parse");
                out.push((start, Tok::Int(n)));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                match &text[start..i] {
                    "x" => out.push((start, Tok::X)),
                    "y" => out.push((start, Tok::Y)),
                    "series" => out.push((start, Tok::Series)),
                    other => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: format!("unknown identifier `{other}`"),
                        })
                    }
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{}`", &text[i..i + 1]),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    opts: &'a ParseOptions,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn peek_pos(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn peek_desc(&self) -> String {
        match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.peek_pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::Syntax {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negate = true;
        } else if self.peek() == Some(&Tok::Plus) {
            self.bump();
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let base_pos = self.peek_pos();
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base.poly());
        }
        self.bump();
        let exp_pos = self.peek_pos();
        let (num, den) = self.exponent()?;
        if num.is_negative() {
            return Err(ParseError::NegativeExponent { pos: exp_pos });
        }
        if den == 1 {
            let e = num.to_u64().ok_or(ParseError::ExponentOverflow { pos: exp_pos })?;
            return Ok(base.poly().pow(e));
        }
        // Fractional exponents are Puiseux data and only make sense on x.
        match base {
            Base::X => {
                let n = num.to_u64().ok_or(ParseError::ExponentOverflow { pos: exp_pos })?;
                Ok(PuiseuxPoly::monomial(n, den, 0, BigRational::from_integer(1.into())))
            }
            _ => Err(ParseError::FractionalExponent { pos: base_pos }),
        }
    }

    /// integer | '(' integer '/' integer ')'
    fn exponent(&mut self) -> Result<(BigInt, u64), ParseError> {
        let pos = self.peek_pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok((n, 1)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Int(n)) => Ok((-n, 1)),
                _ => Err(ParseError::Syntax {
                    pos,
                    msg: "expected integer exponent".into(),
                }),
            },
            Some(Tok::LParen) => {
                let npos = self.peek_pos();
                let mut neg = false;
                if self.peek() == Some(&Tok::Minus) {
                    self.bump();
                    neg = true;
                }
                let num = match self.bump() {
                    Some(Tok::Int(n)) => {
                        if neg {
                            -n
                        } else {
                            n
                        }
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: npos,
                            msg: "expected integer numerator".into(),
                        })
                    }
                };
                self.expect(Tok::Slash, "`/` in fractional exponent")?;
                let dpos = self.peek_pos();
                let den = match self.bump() {
                    Some(Tok::Int(d)) => d
                        .to_u64()
                        .filter(|&d| d > 0)
                        .ok_or(ParseError::ExponentOverflow { pos: dpos })?,
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: dpos,
                            msg: "expected integer denominator".into(),
                        })
                    }
                };
                self.expect(Tok::RParen, "`)` closing exponent")?;
                Ok((num, den))
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected exponent".into(),
            }),
        }
    }

    fn base(&mut self) -> Result<Base, ParseError> {
        let pos = self.peek_pos();
        match self.bump() {
            Some(Tok::X) => Ok(Base::X),
            Some(Tok::Y) => Ok(Base::Poly(PuiseuxPoly::y())),
            Some(Tok::Int(n)) => {
                // Lookahead for `p/q` rational literals: the grammar has no
                // division, so a slash after an integer is part of a rational.
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dpos = self.peek_pos();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => Ok(Base::Poly(PuiseuxPoly::constant(
                            BigRational::new(n, d),
                        ))),
                        _ => Err(ParseError::Syntax {
                            pos: dpos,
                            msg: "expected nonzero integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(Base::Poly(PuiseuxPoly::constant(BigRational::from_integer(n))))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Base::Poly(inner))
            }
            Some(Tok::Series) => {
                self.expect(Tok::LParen, "`(` after series")?;
                let gen = self.expr()?;
                let order = if self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    let opos = self.peek_pos();
                    match self.bump() {
                        Some(Tok::Int(n)) => n
                            .to_u64()
                            .filter(|&n| n >= 1)
                            .ok_or(ParseError::ExponentOverflow { pos: opos })?,
                        _ => {
                            return Err(ParseError::Syntax {
                                pos: opos,
                                msg: "expected integer series order".into(),
                            })
                        }
                    }
                } else {
                    self.opts
                        .series_order
                        .ok_or(ParseError::MissingSeriesOrder { pos })?
                };
                self.expect(Tok::RParen, "`)` closing series")?;
                // Partial geometric sum g + g^2 + ... + g^order.
                let mut acc = PuiseuxPoly::zero();
                let mut pw = PuiseuxPoly::one();
                for _ in 0..order {
                    pw = pw.mul(&gen);
                    acc = acc.add(&pw);
                }
                Ok(Base::Poly(acc))
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected x, y, a rational, `(` or series(".into(),
            }),
        }
    }
}

enum Base {
    X,
    Poly(PuiseuxPoly),
}

impl Base {
    fn poly(self) -> PuiseuxPoly {
        match self {
            Base::X => PuiseuxPoly::x(),
            Base::Poly(p) => p,
        }
    }
}

/// The running example polynomial
/// `x*y*(y^2-x)*(y-x^2)*(y-series(x,N))^2` with the series truncated at `N`.
pub fn example_polynomial(order: u64) -> PuiseuxPoly {
    let text = format!("x*y*(y^2-x)*(y-x^2)*(y-series(x,{order}))^2");
    parse_poly(&text).expect("example polynomial parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case2_polynomial() {
        let p = parse_poly("x^5*y - x^3*y^2 + x^2*y^4").unwrap();
        assert_eq!(p.term_count(), 3);
        assert_eq!(p.scale(), 1);
    }

    #[test]
    fn parses_zero() {
        let p = parse_poly("0").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn expands_products() {
        let p = parse_poly("x*(y-x)^2").unwrap();
        let q = parse_poly("x*y^2 - 2*x^2*y + x^3").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn fractional_power_of_x() {
        let p = parse_poly("x^(1/2)*y + x").unwrap();
        assert_eq!(p.scale(), 2);
    }

    #[test]
    fn fractional_power_of_y_rejected() {
        assert!(matches!(
            parse_poly("y^(1/2)"),
            Err(ParseError::FractionalExponent { .. })
        ));
    }

    #[test]
    fn negative_exponent_rejected() {
        assert!(matches!(
            parse_poly("x^-2"),
            Err(ParseError::NegativeExponent { .. })
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_poly("x + ") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn series_expands_partial_geometric_sum() {
        let p = parse_poly("series(x, 3)").unwrap();
        assert_eq!(p, parse_poly("x + x^2 + x^3").unwrap());
    }

    #[test]
    fn series_order_from_options() {
        let opts = ParseOptions {
            series_order: Some(2),
        };
        let p = parse_poly_with("series(x)", &opts).unwrap();
        assert_eq!(p, parse_poly("x + x^2").unwrap());
        assert!(matches!(
            parse_poly("series(x)"),
            Err(ParseError::MissingSeriesOrder { .. })
        ));
    }

    #[test]
    fn rational_coefficients() {
        let p = parse_poly("1/2*x + 3/4").unwrap();
        assert_eq!(p.term_count(), 2);
    }

    #[test]
    fn leading_minus() {
        let p = parse_poly("-x + y").unwrap();
        assert_eq!(p, parse_poly("y - x").unwrap());
    }
}
