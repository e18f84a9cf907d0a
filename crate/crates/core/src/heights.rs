use crate::curve::{Curve, Point};
use crate::error::{Error, Result};
use crate::factor::{factorize, valuation, Budget};
use crate::rational::{format_rational, Int, Rational};
use crate::real::Real;
use num::integer::Integer as _;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// log max(|numerator|, denominator) of the x-coordinate.
pub fn naive_height(p: &Point, precision: u32) -> Result<Real> {
    let (x, _) = p.xy().ok_or(Error::InfinitePoint)?;
    let m = x.numer().abs().max(x.denom().clone());
    Real::ln_int(&m, precision + 10)
}

#[derive(Clone, Debug)]
pub struct HeightValue {
    pub value: Real,
    pub precision: u32,
    pub curve: Curve,
}

/// Canonical-height engine for one curve at one precision.
///
/// Pipeline: rescale to an integral model, absorb the x² term into a short
/// model Y² = X³ + AX + B, then evaluate the quartically telescoping series
/// on the duplication polynomials over the reals, minus exact p-adic
/// corrections at the primes dividing 2⁸·(4A³+27B²). All error sources —
/// per-operation rounding, series truncation — are tracked as a single
/// absolute bound, and the evaluation retries at a higher working scale
/// until the bound meets the requested precision.
pub struct HeightMachine {
    source: Curve,
    u: Int,
    shift: Option<Int>,
    big_a: Int,
    big_b: Int,
    big_a_sq: Int,
    primes: Vec<(Int, u32)>,
    n_steps: u32,
    mtot: f64,
    precision: u32,
}

fn ln_f64(x: f64) -> f64 {
    x.max(1e-300).ln()
}

impl HeightMachine {
    pub fn new(e: &Curve, precision: u32) -> Result<HeightMachine> {
        let model = e.integralize()?;
        let i2 = model.curve.a2.to_integer();
        let i4 = model.curve.a4.to_integer();
        let i6 = model.curve.a6.to_integer();
        let (big_a, big_b, shift) = if i2.is_zero() {
            (i4, i6, None)
        } else {
            let a = Int::from(27u8) * (Int::from(3u8) * &i4 - &i2 * &i2);
            let b = Int::from(27u8)
                * (Int::from(2u8) * &i2 * &i2 * &i2 - Int::from(9u8) * &i2 * &i4
                    + Int::from(27u8) * &i6);
            (a, b, Some(Int::from(3u8) * &i2))
        };
        let disc = Int::from(4u8) * &big_a * &big_a * &big_a
            + Int::from(27u8) * &big_b * &big_b;
        debug_assert!(!disc.is_zero());
        let mut rps: BTreeMap<Int, u32> = factorize(&disc, &Budget::default())?
            .into_iter()
            .map(|(p, e)| {
                let base = if p == Int::from(2u8) { 8 } else { 0 };
                (p, base + 2 * e)
            })
            .collect();
        rps.entry(Int::from(2u8)).or_insert(8);

        let af = big_a.to_f64().unwrap_or(f64::MAX).abs();
        let bf = big_b.to_f64().unwrap_or(f64::MAX).abs();
        let mp = ln_f64(
            (1.0 + 2.0 * af + 8.0 * bf + af * af).max(4.0 + 4.0 * af + 4.0 * bf) + 1.0,
        );
        let lh = 3.5
            * ln_f64(
                (1.0 + 4.0 * af * af + 64.0 * bf * bf + af * af * af * af)
                    .max(16.0 + 16.0 * af * af + 16.0 * bf * bf),
            );
        let lr = 256f64.ln() + 2.0 * ln_f64(disc.to_f64().unwrap_or(f64::MAX).abs());
        let mm = (8f64.ln() + lh - lr).max(0.0);
        let fm: f64 = rps
            .iter()
            .map(|(p, rp)| *rp as f64 * ln_f64(p.to_f64().unwrap_or(f64::MAX)))
            .sum();
        let mtot = mp.max(mm).max(1.0) + fm + 1.0;
        let target = (precision + 10) as f64;
        let n_steps =
            ((target * 10f64.ln() + mtot.ln()) / 4f64.ln()).ceil() as u32 + 2;

        Ok(HeightMachine {
            source: e.clone(),
            u: model.u,
            shift,
            big_a_sq: &big_a * &big_a,
            big_a,
            big_b,
            primes: rps.into_iter().collect(),
            n_steps,
            mtot,
            precision,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.source
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// x-coordinate on the short model for a point given on the source
    /// curve.
    fn short_x(&self, x: &Rational) -> Rational {
        let xi = x * Rational::from_integer(&self.u * &self.u);
        match &self.shift {
            None => xi,
            Some(s) => {
                Rational::from_integer(Int::from(9u8)) * xi
                    + Rational::from_integer(s.clone())
            }
        }
    }

    pub fn height(&self, p: &Point) -> Result<HeightValue> {
        let (x, y) = p.xy().ok_or(Error::InfinitePoint)?;
        if !self.source.contains(p) {
            return Err(Error::NotOnCurve {
                x: format_rational(x),
                y: format_rational(y),
            });
        }
        let xs = self.short_x(x);
        let target = 10f64.powi(-(self.precision as i32) - 3).max(1e-300);
        let mut scale = self.precision + 25;
        let mut last_err = f64::INFINITY;
        for _ in 0..6 {
            match self.archimedean_plus_finite(&xs, scale) {
                Ok(r) => {
                    if r.err() <= target {
                        return Ok(HeightValue {
                            value: r,
                            precision: self.precision,
                            curve: self.source.clone(),
                        });
                    }
                    last_err = r.err();
                    let deficit = if r.err().is_finite() {
                        ((r.err() / target).log10().ceil() as u32 + 20).min(4000)
                    } else {
                        scale
                    };
                    scale += deficit.max(40);
                }
                Err(Error::NonPositiveLog) | Err(Error::Precision { .. }) => {
                    scale += 2 * scale / 3 + 60;
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::Precision { got: last_err, want: target })
    }

    fn archimedean_plus_finite(&self, xs: &Rational, scale: u32) -> Result<Real> {
        let a = xs.numer();
        let d = xs.denom();
        let mut h = Real::ln_int(&a.abs().max(d.clone()).max(Int::one()), scale)?;

        // Archimedean telescoping over the max-normalized projective orbit.
        let ra = Real::from_int(&self.big_a, scale);
        let rb = Real::from_int(&self.big_b, scale);
        let ra2 = Real::from_int(&self.big_a_sq, scale);
        let z0 = Real::from_int(&a.abs().max(d.clone()), scale);
        let mut pu = Real::from_int(a, scale).div(&z0)?;
        let mut pv = Real::from_int(d, scale).div(&z0)?;
        let mut acc = Real::zero(scale);
        let mut pow4 = Int::from(4u8);
        for _ in 0..self.n_steps {
            let u2 = pu.mul(&pu);
            let v2 = pv.mul(&pv);
            let u3 = u2.mul(&pu);
            let v3 = v2.mul(&pv);
            let f = u2
                .mul(&u2)
                .sub(&u2.mul(&v2).mul(&ra).mul_i64(2))
                .sub(&pu.mul(&v3).mul(&rb).mul_i64(8))
                .add(&v2.mul(&v2).mul(&ra2));
            let g = pv
                .mul(&u3.add(&pu.mul(&v2).mul(&ra)).add(&v3.mul(&rb)))
                .mul_i64(4);
            let z = if f.abs_cmp(&g) == std::cmp::Ordering::Greater {
                f.abs()
            } else {
                g.abs()
            };
            let eps = z.ln()?;
            acc = acc.add(&eps.mul_rat(&Rational::new(Int::one(), pow4.clone())));
            pow4 *= 4u8;
            pu = f.div(&z)?;
            pv = g.div(&z)?;
        }
        h = h.add(&acc);

        // Exact p-adic corrections.
        for (p, rp) in &self.primes {
            let lam = padic_lambda(a, d, &self.big_a, &self.big_b, p, *rp, self.n_steps);
            if !lam.is_zero() {
                h = h.sub(&Real::ln_int(p, scale)?.mul_rat(&lam));
            }
        }

        // Truncation tail of both the real series and the p-adic sums.
        h.add_err(self.mtot * 4f64.powi(-(self.n_steps as i32)) * 4.0 / 3.0);
        Ok(h)
    }
}

/// Σ γₙ/4ⁿ⁺¹ where γₙ is the p-adic valuation drop of the duplication pair
/// along the orbit; computed with a shrinking working modulus whose initial
/// exponent dominates every possible drop.
fn padic_lambda(
    a: &Int,
    d: &Int,
    big_a: &Int,
    big_b: &Int,
    p: &Int,
    rp: u32,
    n_steps: u32,
) -> Rational {
    let mut cap = (n_steps + 2) * rp + 64;
    let mut pm = p.pow(cap);
    let mut al = a.mod_floor(&pm);
    let mut de = d.mod_floor(&pm);
    let a2 = big_a * big_a;
    let mut s = Int::zero();
    for _ in 0..n_steps {
        let al2 = (&al * &al).mod_floor(&pm);
        let de2 = (&de * &de).mod_floor(&pm);
        let al3 = (&al2 * &al).mod_floor(&pm);
        let de3 = (&de2 * &de).mod_floor(&pm);
        let fu = (&al2 * &al2 - Int::from(2u8) * big_a * &al2 * &de2
            - Int::from(8u8) * big_b * &al * &de3
            + &a2 * &de2 * &de2)
            .mod_floor(&pm);
        let gv = (Int::from(4u8) * &de * (&al3 + big_a * &al * &de2 + big_b * &de3))
            .mod_floor(&pm);
        let vf = if fu.is_zero() { cap } else { valuation(&fu, p) };
        let vg = if gv.is_zero() { cap } else { valuation(&gv, p) };
        let gamma = vf.min(vg).min(rp);
        s = s * 4u8 + Int::from(gamma);
        cap -= gamma;
        let pg = p.pow(gamma);
        pm = &pm / &pg;
        al = (&fu / &pg).mod_floor(&pm);
        de = (&gv / &pg).mod_floor(&pm);
    }
    Rational::new(s, Int::from(4u8).pow(n_steps))
}

/// ĥ(P) with a propagated error bound at most 10^(−precision−3).
pub fn canonical_height(e: &Curve, p: &Point, precision: u32) -> Result<HeightValue> {
    HeightMachine::new(e, precision)?.height(p)
}
