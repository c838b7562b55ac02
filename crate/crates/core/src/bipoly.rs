//! Square-free decomposition in y for polynomials over rationals in
//! `t = x^(1/M)`, used by the stabilization certificate of the resolution
//! engine. All arithmetic stays in Q[t][y]: gcds use primitive
//! pseudo-remainder sequences and divisions are exact by Gauss's lemma.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::puiseux::PuiseuxPoly;
use crate::unipoly::UniPoly;

/// Polynomial in y with coefficients in Q[t]; index = y-degree.
#[derive(Debug, Clone, PartialEq)]
pub struct YPoly {
    coeffs: Vec<UniPoly>,
}

impl YPoly {
    fn from_coeffs(coeffs: Vec<UniPoly>) -> Self {
        let mut p = YPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn y_degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> UniPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(UniPoly::zero)
    }

    /// Converts a Puiseux polynomial, reading x-units as powers of t.
    pub fn from_puiseux(p: &PuiseuxPoly) -> Self {
        let ydeg = p.y_degree() as usize;
        let mut per_y: Vec<Vec<BigRational>> = vec![Vec::new(); ydeg + 1];
        for (&(xu, ye), c) in p.terms() {
            let v = &mut per_y[ye as usize];
            if v.len() <= xu as usize {
                v.resize(xu as usize + 1, BigRational::zero());
            }
            v[xu as usize] = c.clone();
        }
        YPoly::from_coeffs(per_y.into_iter().map(UniPoly::from_coeffs).collect())
    }

    fn derivative_y(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return YPoly { coeffs: Vec::new() };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&BigRational::from_integer((i as i64).into())))
            .collect();
        YPoly::from_coeffs(coeffs)
    }


    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![UniPoly::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].add(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].sub(c);
        }
        YPoly::from_coeffs(coeffs)
    }

    fn scale_coeff(&self, c: &UniPoly) -> Self {
        YPoly::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Content: monic gcd of the t-coefficients.
    pub fn content(&self) -> UniPoly {
        let mut g = UniPoly::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.degree() == Some(0) {
                break;
            }
        }
        g
    }

    /// Divides out the content; the result's coefficients are coprime.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        if c.degree() == Some(0) {
            // Normalize the constant away entirely.
            let inv = BigRational::one() / c.coeffs()[0].clone();
            return YPoly::from_coeffs(self.coeffs.iter().map(|a| a.scale(&inv)).collect());
        }
        YPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|a| a.div_exact(&c).expect("content divides"))
                .collect(),
        )
    }

    /// Pseudo-remainder in y: `lead(b)^(da-db+1) a mod b`.
    fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.coeffs.len();
        assert!(db > 0);
        let lead = b.coeffs.last().unwrap().clone();
        let mut rem = self.clone();
        while rem.coeffs.len() >= db {
            let top = rem.coeffs.last().unwrap().clone();
            if top.is_zero() {
                rem.coeffs.pop();
                continue;
            }
            let shift = rem.coeffs.len() - db;
            rem = rem.scale_coeff(&lead);
            let mut sub = vec![UniPoly::zero(); shift];
            sub.extend(b.coeffs.iter().map(|c| c.mul(&top)));
            rem = rem.sub(&YPoly::from_coeffs(sub));
        }
        rem
    }

    /// Exact division in y; the divisor's leading coefficient divides every
    /// partial leading coefficient exactly when the division is exact.
    fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.coeffs.len();
        assert!(dd > 0);
        if self.is_zero() {
            return Some(YPoly { coeffs: Vec::new() });
        }
        if self.coeffs.len() < dd {
            return None;
        }
        let lead = divisor.coeffs.last().unwrap();
        let mut rem = self.clone();
        let mut quot = vec![UniPoly::zero(); self.coeffs.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let Some(top) = rem.coeffs.get(k + dd - 1).cloned() else {
                continue;
            };
            if top.is_zero() {
                continue;
            }
            let q = top.div_exact(lead)?;
            let mut sub = vec![UniPoly::zero(); k];
            sub.extend(divisor.coeffs.iter().map(|c| c.mul(&q)));
            rem = rem.sub(&YPoly::from_coeffs(sub));
            quot[k] = q;
        }
        if rem.is_zero() {
            Some(YPoly::from_coeffs(quot))
        } else {
            None
        }
    }

    /// Primitive gcd in y via a primitive pseudo-remainder sequence.
    fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.is_zero() {
            return b;
        }
        while !b.is_zero() {
            if b.y_degree() == Some(0) {
                // Coprime up to content.
                return YPoly::from_coeffs(vec![UniPoly::from_i64(&[1])]);
            }
            let r = if a.coeffs.len() >= b.coeffs.len() {
                a.pseudo_rem(&b)
            } else {
                std::mem::swap(&mut a, &mut b);
                continue;
            };
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Yun square-free decomposition with respect to y of the primitive
    /// part: pairwise-coprime primitive square-free factors with exponents.
    /// The pure-t content is not part of the output.
    pub fn square_free_y(&self) -> Vec<(YPoly, u64)> {
        if self.y_degree().map(|d| d == 0).unwrap_or(true) {
            return Vec::new();
        }
        let f = self.primitive_part();
        let df = f.derivative_y();
        let mut a = f.gcd(&df);
        let mut b = f.div_exact(&a).expect("gcd divides f");
        let mut c = df.div_exact(&a).expect("gcd divides f'");
        let mut out = Vec::new();
        let mut i = 1u64;
        loop {
            let d = c.sub(&b.derivative_y());
            if d.is_zero() {
                if b.y_degree().map(|d| d > 0).unwrap_or(false) {
                    out.push((b.primitive_part(), i));
                }
                break;
            }
            a = b.gcd(&d);
            if a.y_degree().map(|d| d > 0).unwrap_or(false) {
                out.push((a.primitive_part(), i));
            }
            b = b.div_exact(&a).expect("a divides b");
            c = d.div_exact(&a).expect("a divides d");
            i += 1;
        }
        out
    }

    /// When the factor is linear in y with a constant leading coefficient,
    /// returns the branch series g with `factor ~ y - g(t)`.
    pub fn linear_branch(&self) -> Option<UniPoly> {
        if self.y_degree() != Some(1) {
            return None;
        }
        let lead = self.coeff(1);
        if lead.degree() != Some(0) {
            return None;
        }
        let inv = BigRational::one() / lead.coeffs()[0].clone();
        Some(self.coeff(0).scale(&inv).neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn sqfree(text: &str) -> Vec<(Option<usize>, u64)> {
        let p = parse_poly(text).unwrap();
        let yp = YPoly::from_puiseux(&p);
        yp.square_free_y()
            .into_iter()
            .map(|(f, e)| (f.y_degree(), e))
            .collect()
    }

    #[test]
    fn repeated_linear_branch() {
        // (y - x - x^2)^2 (1 + x): one square-free factor of y-degree 1,
        // exponent 2 (the unit 1+x is content).
        let d = sqfree("(y - x - x^2)^2*(1+x)");
        assert_eq!(d, vec![(Some(1), 2)]);
    }

    #[test]
    fn two_simple_branches() {
        // (y - x)(y - 2x): a single square-free factor of degree 2, exp 1.
        let d = sqfree("(y-x)*(y-2*x)");
        assert_eq!(d, vec![(Some(2), 1)]);
    }

    #[test]
    fn irreducible_quadratic_branch() {
        // y^2 - x^2 (x+1): irreducible over Q(t), square-free.
        let d = sqfree("y^2 - x^3 - x^2");
        assert_eq!(d, vec![(Some(2), 1)]);
    }

    #[test]
    fn mixed_multiplicities() {
        let d = sqfree("(y - x)^3*(y + x)");
        assert_eq!(d, vec![(Some(1), 1), (Some(1), 3)]);
    }

    #[test]
    fn extracts_branch_series() {
        let p = parse_poly("(y - x - x^2)^2*(1+x)").unwrap();
        let yp = YPoly::from_puiseux(&p);
        let d = yp.square_free_y();
        let (factor, e) = &d[0];
        assert_eq!(*e, 2);
        let g = factor.linear_branch().expect("polynomial branch");
        assert_eq!(g, UniPoly::from_i64(&[0, 1, 1]));
    }

    #[test]
    fn figure_c_pair_decomposition_is_fast() {
        // The stage-1 polynomial of the running example: y-degree 6 with
        // x-degrees up to 22; the decomposition must stay desk-scale.
        let p = parse_poly("x*y*(y^2-x)*(y-x^2)*(y-series(x,8))^2").unwrap();
        let p1 = p
            .substitute_branch(&BigRational::one(), &BigRational::one())
            .unwrap();
        let yp = YPoly::from_puiseux(&p1);
        let d = yp.square_free_y();
        let twos: Vec<&(YPoly, u64)> = d.iter().filter(|(_, e)| *e == 2).collect();
        assert_eq!(twos.len(), 1);
        let g = twos[0].0.linear_branch().expect("series branch");
        // y_1 = x + x^2 + ... + x^7
        assert_eq!(
            g,
            UniPoly::from_coeffs(
                (0..8)
                    .map(|i| if i == 0 {
                        BigRational::zero()
                    } else {
                        BigRational::one()
                    })
                    .collect()
            )
        );
    }
}
