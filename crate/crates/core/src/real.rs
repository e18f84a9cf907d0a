use crate::error::{Error, Result};
use crate::rational::{Int, Rational};
use num::integer::Integer as _;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Fixed-point decimal: value = mant · 10^(−scale), with a tracked absolute
/// error bound. Exactly representable inputs carry err = 0; every rounding
/// step adds at most one unit in the last place to the bound.
#[derive(Clone, Debug)]
pub struct Real {
    mant: Int,
    scale: u32,
    err: f64,
}

fn pow10(k: u32) -> Int {
    Int::from(10u8).pow(k)
}

fn pow10_f64(e: i64) -> f64 {
    if e > 308 {
        f64::INFINITY
    } else if e < -320 {
        1e-320
    } else {
        10f64.powi(e as i32)
    }
}

/// `x * 10^e` with the exponent applied in chunks small enough that every
/// intermediate stays inside the normal f64 range (a single `powi` would
/// saturate or land in the subnormal range and destroy the mantissa).
fn mul_pow10(x: f64, e: i64) -> f64 {
    if e.unsigned_abs() <= 280 {
        return x * 10f64.powi(e as i32);
    }
    let mut v = x;
    let mut rem = e;
    while rem != 0 && v != 0.0 && v.is_finite() {
        let step = rem.clamp(-280, 280);
        v *= 10f64.powi(step as i32);
        rem -= step;
    }
    v
}

fn ulp(scale: u32) -> f64 {
    pow10_f64(-(scale as i64))
}

/// Nearest integer quotient, ties away from zero.
fn round_div(n: &Int, d: &Int) -> Int {
    let (q, r) = n.div_rem(d);
    if (&r * 2u8).magnitude() >= d.magnitude() {
        if (n.is_negative()) ^ (d.is_negative()) {
            q - 1u8
        } else {
            q + 1u8
        }
    } else {
        q
    }
}

fn rescale_mant(mant: &Int, from: u32, to: u32) -> Int {
    if to >= from {
        mant * pow10(to - from)
    } else {
        round_div(mant, &pow10(from - to))
    }
}

/// log2 of a positive integer, accurate to well under 1e-9.
fn log2_int(n: &Int) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap().log2();
    }
    let top: Int = n >> (bits - 53);
    top.to_f64().unwrap().log2() + (bits - 53) as f64
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Int>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Int>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Mantissa of ln 2 at the given scale via 2·atanh(1/3); error ≤ 3 ulp.
fn ln2_mant(scale: u32) -> Int {
    if let Some(m) = ln2_cache().lock().unwrap().get(&scale) {
        return m.clone();
    }
    let mut t = round_div(&pow10(scale), &Int::from(3u8));
    let mut acc = t.clone();
    let nine = Int::from(9u8);
    let mut j = 3u32;
    while !t.is_zero() {
        t = round_div(&t, &nine);
        acc += round_div(&t, &Int::from(j));
        j += 2;
    }
    let m = acc * 2u8;
    ln2_cache().lock().unwrap().insert(scale, m.clone());
    m
}

impl Real {
    pub fn zero(scale: u32) -> Self {
        Real { mant: Int::zero(), scale, err: 0.0 }
    }

    pub fn from_int(n: &Int, scale: u32) -> Self {
        Real { mant: n * pow10(scale), scale, err: 0.0 }
    }

    pub fn from_i64(n: i64, scale: u32) -> Self {
        Self::from_int(&Int::from(n), scale)
    }

    pub fn from_rational(q: &Rational, scale: u32) -> Self {
        let n = q.numer() * pow10(scale);
        let (quot, rem) = n.div_rem(q.denom());
        if rem.is_zero() {
            Real { mant: quot, scale, err: 0.0 }
        } else {
            Real { mant: round_div(&n, q.denom()), scale, err: ulp(scale) }
        }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn is_zero_mant(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        match self.mant.to_f64() {
            Some(m) if m.is_finite() => mul_pow10(m, -(self.scale as i64)),
            _ => {
                let s = self.mant.magnitude().to_string();
                let take = 17.min(s.len());
                let d: f64 = s[..take].parse().unwrap();
                let exp = s.len() as i64 - take as i64 - self.scale as i64;
                let v = mul_pow10(d, exp);
                if self.mant.is_negative() {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// The stored value as an exact rational (ignores the error bound).
    pub fn value_as_rational(&self) -> Rational {
        Rational::new(self.mant.clone(), pow10(self.scale))
    }

    pub fn with_err(mut self, err: f64) -> Self {
        self.err = err;
        self
    }

    pub fn add_err(&mut self, extra: f64) {
        self.err += extra;
    }

    fn aligned(a: &Real, b: &Real) -> (Int, Int, u32) {
        let scale = a.scale.max(b.scale);
        (
            rescale_mant(&a.mant, a.scale, scale),
            rescale_mant(&b.mant, b.scale, scale),
            scale,
        )
    }

    pub fn add(&self, b: &Real) -> Real {
        let (ma, mb, scale) = Self::aligned(self, b);
        Real { mant: ma + mb, scale, err: self.err + b.err }
    }

    pub fn sub(&self, b: &Real) -> Real {
        let (ma, mb, scale) = Self::aligned(self, b);
        Real { mant: ma - mb, scale, err: self.err + b.err }
    }

    pub fn neg(&self) -> Real {
        Real { mant: -&self.mant, scale: self.scale, err: self.err }
    }

    pub fn abs(&self) -> Real {
        Real { mant: self.mant.abs(), scale: self.scale, err: self.err }
    }

    pub fn mul(&self, b: &Real) -> Real {
        let scale = self.scale.max(b.scale);
        let mant = rescale_mant(&(&self.mant * &b.mant), self.scale + b.scale, scale);
        let (va, vb) = (self.to_f64().abs(), b.to_f64().abs());
        let err = (va + self.err) * b.err + (vb + b.err) * self.err + ulp(scale);
        Real { mant, scale, err }
    }

    pub fn div(&self, b: &Real) -> Result<Real> {
        let vb = b.to_f64().abs();
        if vb <= 2.0 * b.err || b.mant.is_zero() {
            return Err(Error::Precision { got: b.err, want: vb });
        }
        let scale = self.scale.max(b.scale);
        let num = &self.mant * pow10(b.scale + scale - self.scale);
        let mant = round_div(&num, &b.mant);
        let va = self.to_f64().abs();
        let err = (self.err + (va / vb) * b.err) / (vb - b.err) + ulp(scale);
        Ok(Real { mant, scale, err })
    }

    /// Exact multiply by a rational followed by one rounding.
    pub fn mul_rat(&self, q: &Rational) -> Real {
        let mant = round_div(&(&self.mant * q.numer()), q.denom());
        let qv = q.numer().to_f64().unwrap_or(f64::MAX) / q.denom().to_f64().unwrap_or(1.0);
        Real { mant, scale: self.scale, err: qv.abs() * self.err + ulp(self.scale) }
    }

    pub fn mul_i64(&self, k: i64) -> Real {
        Real {
            mant: &self.mant * Int::from(k),
            scale: self.scale,
            err: self.err * k.abs() as f64,
        }
    }

    /// |self| compared against |other|; both must have the same scale.
    pub fn abs_cmp(&self, other: &Real) -> std::cmp::Ordering {
        debug_assert_eq!(self.scale, other.scale);
        self.mant.magnitude().cmp(other.mant.magnitude())
    }

    pub fn rescale(&self, scale: u32) -> Real {
        let mant = rescale_mant(&self.mant, self.scale, scale);
        let extra = if scale < self.scale { ulp(scale) } else { 0.0 };
        Real { mant, scale, err: self.err + extra }
    }

    /// Natural logarithm. Requires the value (minus its error bound) to be
    /// strictly positive.
    pub fn ln(&self) -> Result<Real> {
        if self.mant.is_negative() || self.mant.is_zero() {
            return Err(Error::NonPositiveLog);
        }
        let v = self.to_f64();
        if v - self.err <= 0.0 {
            return Err(Error::NonPositiveLog);
        }
        let s = self.scale;
        let one = pow10(s);

        let log2v = log2_int(&self.mant) - s as f64 * std::f64::consts::LOG2_10;
        let k = log2v.round() as i64;
        let mant_y = if k >= 0 {
            round_div(&self.mant, &(Int::one() << k as u32))
        } else {
            &self.mant << (-k) as u32
        };

        let ny = &mant_y - &one;
        let dy = &mant_y + &one;
        let z = round_div(&(&ny * &one), &dy);
        let zz = round_div(&(&z * &z), &one);

        let mut acc = z.clone();
        let mut term = z;
        let mut j = 3u32;
        let cap = 2 * s + 40;
        while !term.is_zero() && j < cap {
            term = round_div(&(&term * &zz), &one);
            acc += round_div(&term, &Int::from(j));
            j += 2;
        }
        let nterms = (j / 2) as f64;

        let mant_ln = acc * 2u8 + Int::from(k) * ln2_mant(s);
        let err = self.err / (v - self.err)
            + (4.0 * nterms + 3.0 * k.unsigned_abs() as f64 + 12.0) * ulp(s);
        Ok(Real { mant: mant_ln, scale: s, err })
    }

    /// ln of a positive integer at the given scale.
    pub fn ln_int(n: &Int, scale: u32) -> Result<Real> {
        if !n.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        Real::from_int(n, scale).ln()
    }

    /// ln of a positive rational at the given scale.
    pub fn ln_rational(q: &Rational, scale: u32) -> Result<Real> {
        if !q.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        Ok(Real::ln_int(q.numer(), scale)?.sub(&Real::ln_int(q.denom(), scale)?))
    }

    /// Fixed-point decimal string with the given number of fraction digits.
    pub fn to_decimal_string(&self, frac_digits: u32) -> String {
        let m = rescale_mant(&self.mant, self.scale, frac_digits);
        let neg = m.is_negative();
        let mut digits = m.magnitude().to_string();
        if digits.len() <= frac_digits as usize {
            digits = format!("{}{}", "0".repeat(frac_digits as usize + 1 - digits.len()), digits);
        }
        let split = digits.len() - frac_digits as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let sign = if neg { "-" } else { "" };
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Round-trip-stable significant-digit string ("73.3583597733868",
    /// "1.2e-52"); used for reports.
    pub fn to_sig_string(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let neg = self.mant.is_negative();
        let digits = self.mant.magnitude().to_string();
        let mut e10 = digits.len() as i64 - 1 - self.scale as i64;
        let mut ds: String = if digits.len() <= sig {
            digits
        } else {
            let keep: Int = digits[..sig].parse::<Int>().unwrap()
                + u8::from(digits.as_bytes()[sig] >= b'5');
            let rounded = keep.to_string();
            if rounded.len() > sig {
                e10 += 1;
                rounded[..sig].to_string()
            } else {
                rounded
            }
        };
        while ds.len() > 1 && ds.ends_with('0') {
            ds.pop();
        }
        let sign = if neg { "-" } else { "" };
        if (-4..=20).contains(&e10) {
            if e10 >= 0 {
                let ip = e10 as usize + 1;
                if ds.len() <= ip {
                    format!("{sign}{ds}{}", "0".repeat(ip - ds.len()))
                } else {
                    format!("{sign}{}.{}", &ds[..ip], &ds[ip..])
                }
            } else {
                format!("{sign}0.{}{}", "0".repeat((-e10 - 1) as usize), ds)
            }
        } else if ds.len() == 1 {
            format!("{sign}{ds}e{e10}")
        } else {
            format!("{sign}{}.{}e{e10}", &ds[..1], &ds[1..])
        }
    }
}
