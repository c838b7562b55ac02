//! Small helpers for exact rational values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p` or `p/q` with a reduced positive denominator.
pub fn rat_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range ratio of big integers: fall back to a log-scaled quotient.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY * sign_f(r));
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn sign_f(r: &BigRational) -> f64 {
    if r.is_negative() {
        -1.0
    } else {
        1.0
    }
}

/// lcm of two positive integers, u64 domain.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Exact integer power of a rational with u64 exponent.
pub fn rat_pow(base: &BigRational, exp: u64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Midpoint of two rationals.
pub fn rat_mid(a: &BigRational, b: &BigRational) -> BigRational {
    (a + b) / rat_i64(2)
}

pub fn rat_is_zero(r: &BigRational) -> bool {
    r.is_zero()
}
