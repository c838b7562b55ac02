//! Exact sparse arithmetic for polynomials in `x^(1/M)` and `y`.
//!
//! A [`PuiseuxPoly`] stores finitely many terms `c * x^(a/M) * y^b` with
//! exact rational coefficients. The scale `M` is a positive integer shared by
//! the whole polynomial; canonical form reduces it by the gcd of all stored
//! x-exponents so that equal functions compare equal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;
use crate::rat::{gcd_u64, lcm_u64, rat_i64, rat_pow, rat_string, rat_to_f64};

/// Exponent key: x-exponent in units of `1/scale`, then the integer y-exponent.
pub type ExpKey = (u64, u64);

/// A finite sum of terms `c * x^(a/M) * y^b` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxPoly {
    scale: u64,
    terms: BTreeMap<ExpKey, BigRational>,
}

/// One step `y_k = (r_k + y_{k+1}) x_{k+1}^{m_k}` of a branch chain.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchStep {
    /// Root value substituted for the step. In numeric mode this is the
    /// midpoint of a refined enclosure rather than the exact algebraic root.
    pub r: BigRational,
    /// Slope parameter of the defining edge, `m >= 1/M`.
    pub m: BigRational,
    /// Multiplicity of the root on its edge polynomial.
    pub s: u64,
    /// False when `r` approximates an irrational root; the enclosure width is
    /// then recorded in `enclosure_width`.
    pub exact: bool,
    /// Width of the isolating interval used to pick `r` (zero when exact).
    pub enclosure_width: BigRational,
}

impl BranchStep {
    pub fn exact(r: BigRational, m: BigRational, s: u64) -> Self {
        BranchStep {
            r,
            m,
            s,
            exact: true,
            enclosure_width: BigRational::zero(),
        }
    }
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly {
            scale: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        PuiseuxPoly { scale: 1, terms }
    }

    /// The variable x.
    pub fn x() -> Self {
        Self::monomial(1, 1, 0, BigRational::one())
    }

    /// The variable y.
    pub fn y() -> Self {
        Self::monomial(0, 1, 1, BigRational::one())
    }

    /// `c * x^(xunits/scale) * y^yexp`.
    pub fn monomial(xunits: u64, scale: u64, yexp: u64, c: BigRational) -> Self {
        assert!(scale >= 1, "scale must be positive");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((xunits, yexp), c);
        }
        let mut p = PuiseuxPoly { scale, terms };
        p.canonicalize();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common denominator M of the x-exponents.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in lexicographic (x-exponent, y-exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, &BigRational)> {
        self.terms.iter()
    }

    /// Support as exact exponent pairs `(a/M, b)`.
    pub fn support(&self) -> Vec<(BigRational, u64)> {
        self.terms
            .keys()
            .map(|&(xu, ye)| (BigRational::new(BigInt::from(xu), BigInt::from(self.scale)), ye))
            .collect()
    }

    pub fn coeff(&self, xunits: u64, yexp: u64) -> BigRational {
        self.terms
            .get(&(xunits, yexp))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            self.scale = 1;
            return;
        }
        let mut g = self.scale;
        for &(xu, _) in self.terms.keys() {
            g = gcd_u64(g, xu);
            if g == 1 {
                return;
            }
        }
        if g > 1 {
            let old = std::mem::take(&mut self.terms);
            for ((xu, ye), c) in old {
                self.terms.insert((xu / g, ye), c);
            }
            self.scale /= g;
        }
    }

    /// Rewrites exponents in units of `1/new_scale`; `new_scale` must be a
    /// multiple of the current scale.
    pub fn with_scale(&self, new_scale: u64) -> Result<Self, AlgebraError> {
        assert!(new_scale % self.scale == 0);
        let f = new_scale / self.scale;
        let mut terms = BTreeMap::new();
        for (&(xu, ye), c) in &self.terms {
            let nu = xu.checked_mul(f).ok_or(AlgebraError::ExponentOverflow)?;
            terms.insert((nu, ye), c.clone());
        }
        Ok(PuiseuxPoly {
            scale: new_scale,
            terms,
        })
    }

    fn add_term(&mut self, key: ExpKey, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect();
        PuiseuxPoly {
            scale: self.scale,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let m = lcm_u64(self.scale, other.scale);
        let mut a = self.with_scale(m).expect("scale lcm overflow");
        let b = other.with_scale(m).expect("scale lcm overflow");
        for (k, c) in &b.terms {
            if negate {
                a.add_term(*k, &-c.clone());
            } else {
                a.add_term(*k, c);
            }
        }
        a.canonicalize();
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = lcm_u64(self.scale, other.scale);
        let a = self.with_scale(m).expect("scale lcm overflow");
        let b = other.with_scale(m).expect("scale lcm overflow");
        let mut out = PuiseuxPoly {
            scale: m,
            terms: BTreeMap::new(),
        };
        for (&(xa, ya), ca) in &a.terms {
            for (&(xb, yb), cb) in &b.terms {
                let xu = xa.checked_add(xb).expect("x exponent overflow");
                let ye = ya.checked_add(yb).expect("y exponent overflow");
                out.add_term((xu, ye), &(ca * cb));
            }
        }
        out.canonicalize();
        out
    }

    pub fn scale_coeffs(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(k, v)| (*k, v * c)).collect();
        PuiseuxPoly {
            scale: self.scale,
            terms,
        }
    }

    pub fn pow(&self, exp: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by `x^(units/scale_of_units)`.
    pub fn mul_x_power(&self, units: u64, unit_scale: u64) -> Self {
        let m = lcm_u64(self.scale, unit_scale);
        let shifted_units = units * (m / unit_scale);
        let a = self.with_scale(m).expect("scale overflow");
        let terms = a
            .terms
            .iter()
            .map(|(&(xu, ye), c)| {
                (
                    (xu.checked_add(shifted_units).expect("x exponent overflow"), ye),
                    c.clone(),
                )
            })
            .collect();
        let mut out = PuiseuxPoly { scale: m, terms };
        out.canonicalize();
        out
    }

    /// Minimum of `xExp/M + yExp` over stored terms; `None` encodes the
    /// multiplicity of the zero polynomial (conventionally minus infinity).
    pub fn mult(&self) -> Option<BigRational> {
        self.terms
            .keys()
            .map(|&(xu, ye)| {
                BigRational::new(BigInt::from(xu), BigInt::from(self.scale)) + rat_i64(ye as i64)
            })
            .min()
    }

    /// True when no term involves y.
    pub fn is_univariate_in_x(&self) -> bool {
        self.terms.keys().all(|&(_, ye)| ye == 0)
    }

    /// Largest y-exponent; zero polynomial reports 0.
    pub fn y_degree(&self) -> u64 {
        self.terms.keys().map(|&(_, ye)| ye).max().unwrap_or(0)
    }

    /// Returns `P(x, (r + y) * x^m)` expanded and canonicalized.
    ///
    /// The output scale is `lcm(M, denominator(m))`.
    pub fn substitute_branch(&self, r: &BigRational, m: &BigRational) -> Result<Self, AlgebraError> {
        if m.is_negative() {
            return Err(AlgebraError::NegativeExponent);
        }
        let m_den = m.denom().to_u64().ok_or(AlgebraError::ExponentOverflow)?;
        let m_num = m.numer().to_u64().ok_or(AlgebraError::ExponentOverflow)?;
        let new_scale = lcm_u64(self.scale, m_den);
        let src = self.with_scale(new_scale)?;
        // m in units of 1/new_scale
        let m_units = m_num
            .checked_mul(new_scale / m_den)
            .ok_or(AlgebraError::ExponentOverflow)?;

        let mut out = PuiseuxPoly {
            scale: new_scale,
            terms: BTreeMap::new(),
        };
        for (&(xu, ye), c) in &src.terms {
            // y^b -> sum_k C(b,k) r^(b-k) y^k x^(m b)
            let shift = m_units
                .checked_mul(ye)
                .and_then(|v| v.checked_add(xu))
                .ok_or(AlgebraError::ExponentOverflow)?;
            let mut binom = BigRational::one();
            // k descending from b keeps the binomial update integral.
            for k in (0..=ye).rev() {
                let coeff = c * &binom * rat_pow(r, ye - k);
                out.add_term((shift, k), &coeff);
                if k > 0 {
                    binom = binom * rat_i64(k as i64) / rat_i64((ye - k + 1) as i64);
                }
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// Returns `P(x, f(x) + y * x^m)` expanded; `f` must be free of y.
    pub fn refined_substitute(
        &self,
        f: &PuiseuxPoly,
        m: &BigRational,
    ) -> Result<Self, AlgebraError> {
        if !f.is_univariate_in_x() {
            return Err(AlgebraError::NotUnivariateInX);
        }
        if m.is_negative() {
            return Err(AlgebraError::NegativeExponent);
        }
        let m_den = m.denom().to_u64().ok_or(AlgebraError::ExponentOverflow)?;
        let m_num = m.numer().to_u64().ok_or(AlgebraError::ExponentOverflow)?;
        let ydeg = self.y_degree();
        // Replacement g = f(x) + y x^m, plus its powers up to the y-degree.
        let y_shift = PuiseuxPoly::monomial(m_num, m_den, 1, BigRational::one());
        let g = f.add(&y_shift);
        let mut g_pows: Vec<PuiseuxPoly> = Vec::with_capacity(ydeg as usize + 1);
        g_pows.push(PuiseuxPoly::one());
        for _ in 0..ydeg {
            let next = g_pows.last().unwrap().mul(&g);
            g_pows.push(next);
        }
        let mut out = PuiseuxPoly::zero();
        for (&(xu, ye), c) in &self.terms {
            let part = g_pows[ye as usize]
                .mul_x_power(xu, self.scale)
                .scale_coeffs(c);
            out = out.add(&part);
        }
        Ok(out)
    }

    fn require_integer_exponents(&self) -> Result<(), AlgebraError> {
        if self.scale != 1 {
            return Err(AlgebraError::FractionalInput { scale: self.scale });
        }
        Ok(())
    }

    /// Exact partial derivative in x (integer exponents only).
    pub fn partial_x(&self) -> Result<Self, AlgebraError> {
        self.require_integer_exponents()?;
        let mut out = PuiseuxPoly::zero();
        for (&(xu, ye), c) in &self.terms {
            if xu > 0 {
                out.add_term((xu - 1, ye), &(c * rat_i64(xu as i64)));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// Exact partial derivative in y (integer exponents only).
    pub fn partial_y(&self) -> Result<Self, AlgebraError> {
        self.require_integer_exponents()?;
        let mut out = PuiseuxPoly::zero();
        for (&(xu, ye), c) in &self.terms {
            if ye > 0 {
                out.add_term((xu, ye - 1), &(c * rat_i64(ye as i64)));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// `d_x d_y (d_x - d_y) S`, the operator whose kernel is exactly the
    /// phases `g1(x) + g2(y) + g3(x+y)`.
    pub fn trilinear_derivative(&self) -> Result<Self, AlgebraError> {
        let dx = self.partial_x()?;
        let dy = self.partial_y()?;
        dx.sub(&dy).partial_x()?.partial_y()
    }

    /// `d_x d_y S`.
    pub fn mixed_derivative(&self) -> Result<Self, AlgebraError> {
        self.partial_x()?.partial_y()
    }

    /// Swaps the roles of x and y. Only defined for integer exponents.
    pub fn swap_xy(&self) -> Result<Self, AlgebraError> {
        self.require_integer_exponents()?;
        let terms = self
            .terms
            .iter()
            .map(|(&(xu, ye), c)| ((ye, xu), c.clone()))
            .collect();
        let mut out = PuiseuxPoly { scale: 1, terms };
        out.canonicalize();
        Ok(out)
    }

    /// Applies the linear change of variables `x -> a*u + b*v, y -> c*u + d*v`
    /// (integer exponents only).
    pub fn linear_substitute(
        &self,
        a: &BigRational,
        b: &BigRational,
        c: &BigRational,
        d: &BigRational,
    ) -> Result<Self, AlgebraError> {
        self.require_integer_exponents()?;
        let xs = PuiseuxPoly::x().scale_coeffs(a).add(&PuiseuxPoly::y().scale_coeffs(b));
        let ys = PuiseuxPoly::x().scale_coeffs(c).add(&PuiseuxPoly::y().scale_coeffs(d));
        let mut out = PuiseuxPoly::zero();
        for (&(xu, ye), coeff) in &self.terms {
            let t = xs.pow(xu).mul(&ys.pow(ye)).scale_coeffs(coeff);
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Substitutes `x -> sx * x, y -> sy * y` exactly (any scale).
    pub fn axis_scale(&self, sx: &BigRational, sy: &BigRational) -> Self {
        // x^(a/M) -> sx^(a/M) x^(a/M) needs sx to be raised to fractional
        // powers in general; restricted to integer exponents of the stored
        // units, so compute sx^(a/M) only when a is divisible by M.
        // Callers in this crate use it for M = 1 polynomials.
        debug_assert_eq!(self.scale, 1);
        let mut out = PuiseuxPoly {
            scale: self.scale,
            terms: BTreeMap::new(),
        };
        for (&(xu, ye), c) in &self.terms {
            let factor = rat_pow(sx, xu) * rat_pow(sy, ye);
            out.add_term((xu, ye), &(c * factor));
        }
        out.canonicalize();
        out
    }

    /// Substitutes `x -> -x` (any scale with odd/even unit bookkeeping in
    /// integer exponents; fractional scale is rejected).
    pub fn reflect_x(&self) -> Result<Self, AlgebraError> {
        self.require_integer_exponents()?;
        let mut out = PuiseuxPoly {
            scale: 1,
            terms: BTreeMap::new(),
        };
        for (&(xu, ye), c) in &self.terms {
            let coeff = if xu % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term((xu, ye), &coeff);
        }
        out.canonicalize();
        Ok(out)
    }

    /// Drops every term with x-degree strictly above `bound` (in x units, not
    /// 1/M units). Returns the number of dropped terms.
    pub fn truncate_x_degree(&mut self, bound: &BigRational) -> usize {
        let scale = BigInt::from(self.scale);
        let before = self.terms.len();
        self.terms.retain(|&(xu, _), _| {
            let deg = BigRational::new(BigInt::from(xu), scale.clone());
            deg <= *bound
        });
        let dropped = before - self.terms.len();
        self.canonicalize();
        dropped
    }

    /// Floating evaluation with compensated (Neumaier) summation. Requires
    /// `x > 0` so that fractional powers are real.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        debug_assert!(x > 0.0 || self.scale == 1);
        let xr = if self.scale == 1 {
            x
        } else {
            x.powf(1.0 / self.scale as f64)
        };
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (&(xu, ye), c) in &self.terms {
            let term = rat_to_f64(c) * pow_f64(xr, xu) * pow_f64(y, ye);
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    /// Exact evaluation at `x = t^M`, `y` rational.
    pub fn eval_exact(&self, t: &BigRational, y: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        for (&(xu, ye), c) in &self.terms {
            sum += c * rat_pow(t, xu) * rat_pow(y, ye);
        }
        sum
    }

    /// Deterministic plain-text rendering, terms in (x, y)-exponent order.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (&(xu, ye), c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (xu == 0 && ye == 0) {
                parts.push(rat_string(&mag));
            }
            if xu > 0 {
                if xu == self.scale {
                    parts.push("x".into());
                } else if xu % self.scale == 0 {
                    parts.push(format!("x^{}", xu / self.scale));
                } else {
                    let g = gcd_u64(xu, self.scale);
                    parts.push(format!("x^({}/{})", xu / g, self.scale / g));
                }
            }
            if ye == 1 {
                parts.push("y".into());
            } else if ye > 1 {
                parts.push(format!("y^{ye}"));
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

fn pow_f64(base: f64, exp: u64) -> f64 {
    if exp <= i32::MAX as u64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp as f64)
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn p(text: &str) -> PuiseuxPoly {
        crate::parse::parse_poly(text).unwrap()
    }

    #[test]
    fn mult_of_expanded_product() {
        // 18xy(y-x) expanded
        let q = p("18*x*y^2 - 18*x^2*y");
        assert_eq!(q.mult(), Some(rat_i64(3)));
    }

    #[test]
    fn mult_of_zero_is_minus_infinity_marker() {
        assert_eq!(PuiseuxPoly::zero().mult(), None);
    }

    #[test]
    fn mult_of_case2_polynomial() {
        let q = p("x^5*y - x^3*y^2 + x^2*y^4");
        assert_eq!(q.mult(), Some(rat_i64(5)));
    }

    #[test]
    fn substitute_branch_sqrt_example() {
        // P = y^2 - x, r = 1, m = 1/2  ->  x*y^2 + 2*x*y  (M' = 2)
        let q = p("y^2 - x");
        let out = q.substitute_branch(&rat_i64(1), &rat(1, 2)).unwrap();
        assert_eq!(out, p("x*y^2 + 2*x*y"));
        assert_eq!(out.scale(), 1); // canonical form reduces 2/2 units back to 1
    }

    #[test]
    fn substitute_branch_translation() {
        // r = 1, m = 0 is the pure translation P(x, 1 + y).
        let q = p("y^2 - x");
        let out = q.substitute_branch(&rat_i64(1), &rat_i64(0)).unwrap();
        assert_eq!(out, p("y^2 + 2*y + 1 - x"));
    }

    #[test]
    fn refined_substitute_single_vertex_outcome() {
        // P = (y - x - x^2)^2, f = x + x^2, m = 1 -> x^2 y^2
        let q = p("(y - x - x^2)^2");
        let f = p("x + x^2");
        let out = q.refined_substitute(&f, &rat_i64(1)).unwrap();
        assert_eq!(out, p("x^2*y^2"));
    }

    #[test]
    fn refined_substitute_identity() {
        let q = p("x^3*y - y^2 + 7");
        let out = q.refined_substitute(&PuiseuxPoly::zero(), &rat_i64(0)).unwrap();
        assert_eq!(out, q);
    }

    #[test]
    fn refined_substitute_hand_expansion() {
        // P = (y - x)^2 + x^5 y, f = x, m = 2:
        // (y x^2)^2 + x^5 (x + y x^2) = x^4 y^2 + x^6 + x^7 y
        let q = p("(y-x)^2 + x^5*y");
        let out = q.refined_substitute(&p("x"), &rat_i64(2)).unwrap();
        assert_eq!(out, p("x^4*y^2 + x^7*y + x^6"));
    }

    #[test]
    fn trilinear_derivative_examples() {
        assert_eq!(p("x^2*y").trilinear_derivative().unwrap(), p("2"));
        assert!(p("x^2 + y^2 + (x+y)^2")
            .trilinear_derivative()
            .unwrap()
            .is_zero());
        assert_eq!(
            p("x^3*y^3").trilinear_derivative().unwrap(),
            p("18*x*y^2 - 18*x^2*y")
        );
    }

    #[test]
    fn mixed_derivative_examples() {
        assert_eq!(p("x^2*y^2").mixed_derivative().unwrap(), p("4*x*y"));
        assert!(p("x + y").mixed_derivative().unwrap().is_zero());
        assert_eq!(p("x^2*y").mixed_derivative().unwrap(), p("2*x"));
    }

    #[test]
    fn fractional_input_rejected_for_derivatives() {
        let q = p("y^2 - x").substitute_branch(&rat_i64(1), &rat(1, 2)).unwrap();
        let frac = q.mul_x_power(1, 2); // force scale 2
        assert!(matches!(
            frac.partial_x(),
            Err(AlgebraError::FractionalInput { scale: 2 })
        ));
    }

    #[test]
    fn eval_simple() {
        assert_eq!(p("x*y").eval_f64(2.0, 3.0), 6.0);
        assert!(p("y^2 - x").eval_f64(0.25, 0.5).abs() < 1e-15);
    }

    #[test]
    fn canonical_scale_reduction() {
        // x built as x^(2/2) must equal x^(1/1).
        let a = PuiseuxPoly::monomial(2, 2, 0, BigRational::one());
        assert_eq!(a, PuiseuxPoly::x());
        assert_eq!(a.scale(), 1);
    }

    #[test]
    fn truncate_drops_high_degrees() {
        let mut q = p("1 + x^3 + x^9*y");
        let dropped = q.truncate_x_degree(&rat_i64(5));
        assert_eq!(dropped, 1);
        assert_eq!(q, p("1 + x^3"));
    }
}
