//! Exact univariate polynomials over the rationals, with real-root isolation.
//!
//! Root isolation uses Sturm sequences over exact arithmetic; square-free
//! decomposition uses Yun's algorithm. Rational roots are recognized exactly
//! when coefficient factorization is cheap; all other real roots are returned
//! as isolating intervals refinable to any width.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::{rat_i64, rat_mid};

/// Dense univariate polynomial; index = degree of the coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

/// Sign of root values the caller wants counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSign {
    Positive,
    Negative,
    Both,
}

impl RootSign {
    pub fn accepts_positive(self) -> bool {
        matches!(self, RootSign::Positive | RootSign::Both)
    }
    pub fn accepts_negative(self) -> bool {
        matches!(self, RootSign::Negative | RootSign::Both)
    }
}

/// How an isolated root is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum RootEnc {
    /// The root is exactly this rational.
    Exact(BigRational),
    /// Open isolating interval containing exactly one root of `poly`.
    Interval { lo: BigRational, hi: BigRational },
}

/// A nonzero real root with its multiplicity in the original polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolatedRoot {
    /// Square-free factor the root belongs to (monic, exact).
    pub factor: UniPoly,
    pub enc: RootEnc,
    pub multiplicity: u64,
}

impl IsolatedRoot {
    pub fn is_exact(&self) -> bool {
        matches!(self.enc, RootEnc::Exact(_))
    }

    /// Sign of the root; isolation guarantees zero is excluded.
    pub fn sign_positive(&self) -> bool {
        match &self.enc {
            RootEnc::Exact(r) => r.is_positive(),
            RootEnc::Interval { lo, .. } => lo.is_positive() || lo.is_zero(),
        }
    }

    /// Midpoint of the current enclosure (the value itself when exact).
    pub fn midpoint(&self) -> BigRational {
        match &self.enc {
            RootEnc::Exact(r) => r.clone(),
            RootEnc::Interval { lo, hi } => rat_mid(lo, hi),
        }
    }

    pub fn enclosure_width(&self) -> BigRational {
        match &self.enc {
            RootEnc::Exact(_) => BigRational::zero(),
            RootEnc::Interval { lo, hi } => hi - lo,
        }
    }

    /// Shrinks the isolating interval below `width` by bisection.
    pub fn refine_below(&mut self, width: &BigRational) {
        let (mut lo, mut hi) = match &self.enc {
            RootEnc::Exact(_) => return,
            RootEnc::Interval { lo, hi } => (lo.clone(), hi.clone()),
        };
        let sign_hi = self.factor.eval(&hi).signum();
        while &hi - &lo >= *width {
            let mid = rat_mid(&lo, &hi);
            let v = self.factor.eval(&mid);
            if v.is_zero() {
                self.enc = RootEnc::Exact(mid);
                return;
            }
            if v.signum() == sign_hi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.enc = RootEnc::Interval { lo, hi };
    }

    /// f64 approximation of the root, refined enough for 1e-15 relative use.
    pub fn to_f64(&mut self) -> f64 {
        self.refine_below(&BigRational::new(BigInt::one(), BigInt::from(10u64).pow(20)));
        crate::rat::rat_to_f64(&self.midpoint())
    }
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat_i64(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rat::rat_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_i64(i as i64))
            .collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        UniPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics only on division by zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.coeffs.len();
        if self.coeffs.len() < dd {
            return (UniPoly::zero(), self.clone());
        }
        let lead = divisor.coeffs.last().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dd - 1].clone();
            if top.is_zero() {
                continue;
            }
            let q = top / lead;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let v = &q * b;
                rem[k + j] -= v;
            }
            quot[k] = q;
        }
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem))
    }

    /// Exact quotient; None when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd by the Euclidean algorithm with content normalization.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_int();
        let mut b = other.primitive_int();
        if a.is_empty() {
            return UniPoly::from_int(&b).monic();
        }
        while !b.is_empty() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = primitive(r);
        }
        UniPoly::from_int(&a).monic()
    }

    fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => UniPoly::zero(),
            Some(l) => {
                let inv = BigRational::one() / l;
                self.scale(&inv)
            }
        }
    }

    /// Coefficients cleared to a primitive integer vector (content removed,
    /// positive leading coefficient).
    fn primitive_int(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * &den_lcm / c.denom())
            .collect();
        primitive(ints)
    }

    fn from_int(v: &[BigInt]) -> Self {
        UniPoly::from_coeffs(v.iter().map(|n| BigRational::from_integer(n.clone())).collect())
    }

    /// Square-free part `self / gcd(self, self')`, monic.
    pub fn square_free_part(&self) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.monic();
        }
        self.div_exact(&g).expect("gcd divides").monic()
    }

    /// Yun's square-free decomposition: pairwise-coprime square-free factors
    /// with exponents, `self = unit * prod f_i^(e_i)`.
    pub fn square_free_decompose(&self) -> Vec<(UniPoly, u64)> {
        if self.is_zero() || self.degree() == Some(0) {
            return Vec::new();
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_exact(&a).expect("gcd divides f");
        let mut c = df.div_exact(&a).expect("gcd divides f'");
        let mut out = Vec::new();
        let mut i = 1u64;
        loop {
            let d = c.sub(&b.derivative());
            if d.is_zero() {
                if b.degree().map(|d| d > 0).unwrap_or(false) {
                    out.push((b.monic(), i));
                }
                break;
            }
            a = b.gcd(&d);
            if a.degree().map(|d| d > 0).unwrap_or(false) {
                out.push((a.monic(), i));
            }
            b = b.div_exact(&a).expect("a divides b");
            c = d.div_exact(&a).expect("a divides d");
            i += 1;
        }
        out
    }

    /// Strips the factor `r^k`, returning (k, reduced polynomial).
    pub fn strip_root_at_zero(&self) -> (u64, UniPoly) {
        let k = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0);
        (
            k as u64,
            UniPoly::from_coeffs(self.coeffs[k..].to_vec()),
        )
    }

    /// Cauchy bound: all real roots lie in (-B, B).
    pub fn root_bound(&self) -> BigRational {
        let lead = match self.coeffs.last() {
            None => return BigRational::one(),
            Some(l) => l.abs(),
        };
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        BigRational::one() + max / lead
    }

    /// All nonzero real roots matching `sign`, with exact multiplicities.
    pub fn real_roots(&self, sign: RootSign) -> Vec<IsolatedRoot> {
        assert!(!self.is_zero(), "real_roots of the zero polynomial");
        let mut out = Vec::new();
        for (factor, exp) in self.square_free_decompose() {
            let (_, non_zero) = factor.strip_root_at_zero();
            if non_zero.degree().map(|d| d == 0).unwrap_or(true) {
                continue;
            }
            for enc in non_zero.isolate_square_free(sign) {
                out.push(IsolatedRoot {
                    factor: non_zero.clone(),
                    enc,
                    multiplicity: exp,
                });
            }
        }
        // Increasing order of root value across factors.
        out.sort_by(|a, b| {
            let ka = root_sort_key(a);
            let kb = root_sort_key(b);
            ka.partial_cmp(&kb).unwrap()
        });
        out
    }

    /// Isolates the nonzero real roots of a square-free polynomial with no
    /// root at zero. Rational roots come back exact, the rest as intervals.
    fn isolate_square_free(&self, sign: RootSign) -> Vec<RootEnc> {
        let mut poly = self.clone();
        let mut exact: Vec<BigRational> = Vec::new();
        for r in poly.cheap_rational_roots() {
            if r.is_zero() {
                continue;
            }
            let lin = UniPoly::from_coeffs(vec![-r.clone(), BigRational::one()]);
            poly = poly.div_exact(&lin).expect("rational root divides");
            exact.push(r);
        }
        let mut encs: Vec<RootEnc> = exact
            .into_iter()
            .filter(|r| match sign {
                RootSign::Positive => r.is_positive(),
                RootSign::Negative => r.is_negative(),
                RootSign::Both => true,
            })
            .map(RootEnc::Exact)
            .collect();
        if poly.degree().map(|d| d > 0).unwrap_or(false) {
            let chain = SturmChain::new(&poly);
            let bound = poly.root_bound();
            // No nonzero root is smaller than the inverse bound of the
            // reversed polynomial; bisect strictly away from zero.
            let tiny = BigRational::one() / poly.reversed().root_bound() / rat_i64(2);
            if sign.accepts_positive() {
                encs.extend(chain.isolate_in(&poly, &tiny, &bound));
            }
            if sign.accepts_negative() {
                encs.extend(chain.isolate_in(&poly, &(-&bound), &(-tiny)));
            }
        }
        encs
    }

    /// Coefficient-reversed polynomial `x^deg * p(1/x)` (no zero root assumed).
    fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        UniPoly::from_coeffs(coeffs)
    }

    /// Rational root search, attempted only when the leading/trailing
    /// coefficients admit a small divisor enumeration.
    fn cheap_rational_roots(&self) -> Vec<BigRational> {
        let (_, p) = self.strip_root_at_zero();
        let ints = p.primitive_int();
        if ints.len() < 2 {
            return Vec::new();
        }
        let a0 = ints.first().unwrap().abs();
        let an = ints.last().unwrap().abs();
        let (Some(num_divs), Some(den_divs)) = (divisors_bounded(&a0), divisors_bounded(&an))
        else {
            return Vec::new();
        };
        let mut roots = Vec::new();
        let mut reduced = p.clone();
        for n in &num_divs {
            for d in &den_divs {
                for sgn in [1i64, -1] {
                    let cand = BigRational::new(n * BigInt::from(sgn), d.clone());
                    while reduced.degree().map(|dg| dg > 0).unwrap_or(false)
                        && reduced.eval(&cand).is_zero()
                    {
                        let lin =
                            UniPoly::from_coeffs(vec![-cand.clone(), BigRational::one()]);
                        reduced = reduced.div_exact(&lin).expect("root divides");
                        roots.push(cand.clone());
                    }
                }
            }
        }
        // Square-free input: report each root once.
        roots.dedup();
        roots
    }
}

fn root_sort_key(r: &IsolatedRoot) -> f64 {
    match &r.enc {
        RootEnc::Exact(v) => crate::rat::rat_to_f64(v),
        RootEnc::Interval { lo, hi } => {
            (crate::rat::rat_to_f64(lo) + crate::rat::rat_to_f64(hi)) / 2.0
        }
    }
}

/// Divisor list of |n|, bailing out when n is large or has many divisors.
fn divisors_bounded(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut divs = vec![1u64];
    let mut m = n;
    let mut p = 2u64;
    let mut prime_powers: Vec<(u64, u32)> = Vec::new();
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            prime_powers.push((p, e));
        }
        p += 1;
        if p > 100_000 {
            // Factorization too expensive; give up on the rational-root path.
            return None;
        }
    }
    if m > 1 {
        prime_powers.push((m, 1));
    }
    for (p, e) in prime_powers {
        let base = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk = pk.checked_mul(p)?;
            for d in &base {
                divs.push(d.checked_mul(pk)?);
            }
        }
        if divs.len() > 4096 {
            return None;
        }
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// Divides out the positive content; the sign of the polynomial is kept so
/// the result is safe inside Sturm chains.
fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    for c in &mut v {
        *c = &*c / &g;
    }
    v
}

/// Pseudo-remainder of integer polynomials, scaled only by positive factors
/// so the sign agrees with the true Euclidean remainder.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len();
    let lead = b.last().unwrap().clone();
    let lead_abs = lead.abs();
    let lead_sign = if lead.is_negative() {
        BigInt::from(-1)
    } else {
        BigInt::one()
    };
    while rem.len() >= db {
        let top = rem.last().unwrap().clone();
        if top.is_zero() {
            rem.pop();
            continue;
        }
        let shift = rem.len() - db;
        for c in rem.iter_mut() {
            *c = &*c * &lead_abs;
        }
        let factor = &top * &lead_sign;
        for (j, bc) in b.iter().enumerate() {
            let v = &factor * bc;
            rem[shift + j] -= v;
        }
        while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
            rem.pop();
        }
    }
    rem
}

/// Sturm chain over primitive integer polynomials.
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &UniPoly) -> Self {
        let mut chain = Vec::new();
        let p0 = p.primitive_int();
        if p0.is_empty() {
            return SturmChain { chain };
        }
        let p1 = primitive(
            p.derivative()
                .primitive_int(),
        );
        chain.push(p0);
        if p1.is_empty() {
            return SturmChain { chain };
        }
        chain.push(p1);
        loop {
            let n = chain.len();
            let r = pseudo_rem(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            let mut r = primitive(r);
            for c in &mut r {
                *c = -&*c;
            }
            chain.push(r);
        }
        SturmChain { chain }
    }

    fn sign_at(poly: &[BigInt], x: &BigRational) -> i8 {
        // Evaluate p(x) * denom^deg, staying in integers.
        let num = x.numer();
        let den = x.denom();
        let deg = poly.len() - 1;
        let mut total = BigInt::zero();
        let mut num_pow = BigInt::one();
        for (i, c) in poly.iter().enumerate() {
            let den_pow = den.pow((deg - i) as u32);
            total += c * &num_pow * den_pow;
            if i < deg {
                num_pow *= num;
            }
        }
        match total.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Number of sign variations of the chain at x.
    pub fn variations(&self, x: &BigRational) -> usize {
        let mut last: i8 = 0;
        let mut count = 0;
        for p in &self.chain {
            let s = Self::sign_at(p, x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Count of distinct real roots in the half-open interval (a, b].
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    /// Isolating intervals for all roots of the square-free `poly` in (a, b].
    fn isolate_in(&self, poly: &UniPoly, a: &BigRational, b: &BigRational) -> Vec<RootEnc> {
        let mut out = Vec::new();
        let total = self.count_roots(a, b);
        if total == 0 {
            return out;
        }
        if total == 1 {
            // Shrink until the endpoint values are nonzero and the interval
            // is strictly signed (excludes zero by construction of caller).
            out.push(self.refine_isolated(poly, a.clone(), b.clone()));
            return out;
        }
        let mid = rat_mid(a, b);
        if poly.eval(&mid).is_zero() {
            // Exact root at the midpoint: record it, then carve out a gap
            // certified to contain no other root before recursing.
            out.push(RootEnc::Exact(mid.clone()));
            let mut delta = (&mid - a) / rat_i64(4);
            loop {
                let lo = &mid - &delta;
                let hi = &mid + &delta;
                if self.count_roots(&lo, &hi) == 1 {
                    out.extend(self.isolate_in(poly, a, &lo));
                    out.extend(self.isolate_in(poly, &hi, b));
                    return out;
                }
                delta /= rat_i64(2);
            }
        }
        out.extend(self.isolate_in(poly, a, &mid));
        out.extend(self.isolate_in(poly, &mid, b));
        out
    }

    fn refine_isolated(&self, poly: &UniPoly, mut lo: BigRational, mut hi: BigRational) -> RootEnc {
        // Bisect a few times so the enclosure is signed and snug.
        for _ in 0..4 {
            let mid = rat_mid(&lo, &hi);
            let v = poly.eval(&mid);
            if v.is_zero() {
                return RootEnc::Exact(mid);
            }
            if self.count_roots(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        RootEnc::Interval { lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn square_free_decompose_examples() {
        // -r^4 + 2r^3 - r^2 = -(r^2)(r-1)^2
        let u = UniPoly::from_i64(&[0, 0, -1, 2, -1]);
        let d = u.square_free_decompose();
        assert_eq!(d.len(), 1);
        let (f, e) = &d[0];
        assert_eq!(*e, 2);
        // monic square-free factor of exponent 2 is r(r-1) = r^2 - r
        assert_eq!(f, &UniPoly::from_i64(&[0, -1, 1]));

        // r^3 - 2r = r (r^2 - 2): both square-free exponent 1
        let u = UniPoly::from_i64(&[0, -2, 0, 1]);
        let d = u.square_free_decompose();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].1, 1);
        assert_eq!(d[0].0, UniPoly::from_i64(&[0, -2, 0, 1]).monic());

        // constant
        assert!(UniPoly::from_i64(&[5]).square_free_decompose().is_empty());
    }

    #[test]
    fn square_free_reexpansion_is_exact() {
        // (r-1)^2 (r+2)^3 r
        let a = UniPoly::from_i64(&[-1, 1]);
        let b = UniPoly::from_i64(&[2, 1]);
        let u = a.mul(&a).mul(&b).mul(&b).mul(&b).mul(&UniPoly::from_i64(&[0, 1]));
        let d = u.square_free_decompose();
        let mut re = UniPoly::from_i64(&[1]);
        for (f, e) in &d {
            for _ in 0..*e {
                re = re.mul(f);
            }
        }
        // Equal up to the leading unit.
        assert_eq!(re.monic(), u.monic());
    }

    #[test]
    fn real_roots_double_root() {
        // -r^4 + 2r^3 - r^2: nonzero roots with sign +: r = 1 double
        let u = UniPoly::from_i64(&[0, 0, -1, 2, -1]);
        let roots = u.real_roots(RootSign::Positive);
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert_eq!(roots[0].enc, RootEnc::Exact(rat_i64(1)));
    }

    #[test]
    fn real_roots_none_for_positive_definite() {
        let u = UniPoly::from_i64(&[1, 0, 1]); // r^2 + 1
        assert!(u.real_roots(RootSign::Both).is_empty());
    }

    #[test]
    fn real_roots_irrational_isolated() {
        // r^3 - 2r: positive nonzero root sqrt(2) simple
        let u = UniPoly::from_i64(&[0, -2, 0, 1]);
        let mut roots = u.real_roots(RootSign::Positive);
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 1);
        assert!(!roots[0].is_exact());
        let width = BigRational::new(BigInt::one(), BigInt::from(10u128).pow(30));
        roots[0].refine_below(&width);
        let enc_width = roots[0].enclosure_width();
        assert!(enc_width < width);
        let mid = roots[0].midpoint();
        let two = rat_i64(2);
        let err = (&mid * &mid - two).abs();
        assert!(err < BigRational::new(BigInt::one(), BigInt::from(10u128).pow(28)));
    }

    #[test]
    fn sturm_counts_roots() {
        // (r-1)(r-2)(r+3)
        let u = UniPoly::from_i64(&[6, -7, 0, 1]);
        let chain = SturmChain::new(&u);
        assert_eq!(chain.count_roots(&rat_i64(0), &rat_i64(3)), 2);
        assert_eq!(chain.count_roots(&rat_i64(-4), &rat_i64(0)), 1);
    }

    #[test]
    fn exact_rational_roots_found() {
        // (2r-3)(r+5)(r^2+1) = 2r^4 + 7r^3 - 13r^2 + 7r - 15
        let u = UniPoly::from_i64(&[-15, 7, -13, 7, 2]);
        let roots = u.real_roots(RootSign::Both);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].enc, RootEnc::Exact(rat_i64(-5)));
        assert_eq!(roots[1].enc, RootEnc::Exact(rat(3, 2)));
    }
}
