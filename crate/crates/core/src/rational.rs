use crate::error::{Error, Result};
use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rational = BigRational;

/// Lowest-terms fraction with positive denominator.
pub fn rational_reduce(num: Int, den: Int) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

/// True iff the reduced denominator is 1.
pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(int(n))
}

pub fn rat2(n: i64, d: i64) -> Rational {
    Rational::new(int(n), int(d))
}

/// Parses "p/q", integers, plain decimals, and scientific notation ("1e-4").
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: Int = n.trim().parse().map_err(|_| bad())?;
        let den: Int = d.trim().parse().map_err(|_| bad())?;
        return rational_reduce(num, den);
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(bad());
    }
    let digits = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part);
    let num: Int = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = int(10);
    Ok(if shift >= 0 {
        Rational::from_integer(num * ten.pow(shift as u32))
    } else {
        Rational::new(num, ten.pow((-shift) as u32))
    })
}

/// "num/den", or "num" when integral.
pub fn format_rational(q: &Rational) -> String {
    if is_integral(q) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact nonnegative square root of a perfect-square rational.
pub fn sqrt_exact(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let rn = q.numer().sqrt();
    let rd = q.denom().sqrt();
    if &(&rn * &rn) == q.numer() && &(&rd * &rd) == q.denom() {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Exact signed cube root of a perfect-cube rational.
pub fn cbrt_exact(q: &Rational) -> Option<Rational> {
    let rn = q.numer().cbrt();
    let rd = q.denom().cbrt();
    if &(&rn * &rn * &rn) == q.numer() && &(&rd * &rd * &rd) == q.denom() {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Exact conversion of a finite f64 (dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational::zero());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = Int::from(mant) * int(sign);
    Some(if e >= 0 {
        Rational::from_integer(m * Int::from(2u8).pow(e as u32))
    } else {
        Rational::new(m, Int::from(2u8).pow((-e) as u32))
    })
}

/// Natural log of a positive big integer, approximated in f64 (safe for any size).
pub fn approx_ln(n: &Int) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        let v = n.to_string().parse::<f64>().unwrap_or(f64::MAX);
        return v.ln();
    }
    let shift = bits - 64;
    let top: Int = n >> shift;
    let top = top.to_string().parse::<f64>().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
