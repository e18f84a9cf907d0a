use crate::error::{Error, Result};
use crate::factor::{factorize, Budget};
use crate::rational::{format_rational, int, Int, Rational};
use num::{One, Signed, Zero};
use serde_json::{json, Value};

/// y² = x³ + a2·x² + a4·x + a6 over the rationals, nonsingular by
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub a2: Rational,
    pub a4: Rational,
    pub a6: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl Point {
    pub fn affine(x: Rational, y: Rational) -> Point {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn xy(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, y } => Some((x, y)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Point::Infinity => json!("infinity"),
            Point::Affine { x, y } => {
                json!({"x": format_rational(x), "y": format_rational(y)})
            }
        }
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Infinity => write!(f, "infinity"),
            Point::Affine { x, y } => {
                write!(f, "({}, {})", format_rational(x), format_rational(y))
            }
        }
    }
}

/// Discriminant of x³ + a·x² + b·x + c (times the y² normalization constant),
/// nonzero exactly when the curve is smooth.
pub fn discriminant_of(a2: &Rational, a4: &Rational, a6: &Rational) -> Rational {
    let (a, b, c) = (a2, a4, a6);
    let a2_ = a * a;
    let b2 = b * b;
    -rat_i(4) * &a2_ * a * c + &a2_ * &b2 + rat_i(18) * a * b * c
        - rat_i(4) * &b2 * b
        - rat_i(27) * c * c
}

fn rat_i(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

impl Curve {
    pub fn new(a2: Rational, a4: Rational, a6: Rational) -> Result<Curve> {
        if discriminant_of(&a2, &a4, &a6).is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(Curve { a2, a4, a6 })
    }

    pub fn discriminant(&self) -> Rational {
        discriminant_of(&self.a2, &self.a4, &self.a6)
    }

    /// Right-hand side x³ + a2·x² + a4·x + a6.
    pub fn rhs(&self, x: &Rational) -> Rational {
        ((x + &self.a2) * x + &self.a4) * x + &self.a6
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    /// Constructs an affine point, verifying the curve equation exactly.
    pub fn point(&self, x: Rational, y: Rational) -> Result<Point> {
        let p = Point::affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else if let Point::Affine { x, y } = p {
            Err(Error::NotOnCurve {
                x: format_rational(&x),
                y: format_rational(&y),
            })
        } else {
            unreachable!()
        }
    }

    pub fn negate(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine { x: x.clone(), y: -y },
        }
    }

    /// Chord-tangent addition; a1 = a3 = 0 keeps the slope formulas short.
    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let ((x1, y1), (x2, y2)) = match (p.xy(), q.xy()) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let lambda = if x1 == x2 {
            if *y1 == -y2 {
                return Point::Infinity;
            }
            (rat_i(3) * x1 * x1 + rat_i(2) * &self.a2 * x1 + &self.a4) / (rat_i(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - &self.a2 - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        Point::Affine { x: x3, y: y3 }
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.negate(q))
    }

    pub fn double(&self, p: &Point) -> Point {
        self.add(p, p)
    }

    /// n·P by double-and-add; negative n negates the result.
    pub fn scalar_mul(&self, n: &Int, p: &Point) -> Point {
        if n.is_negative() {
            return self.negate(&self.scalar_mul(&-n, p));
        }
        let mut acc = Point::Infinity;
        let bits = n.bits();
        for i in (0..bits).rev() {
            acc = self.double(&acc);
            if n.magnitude().bit(i) {
                acc = self.add(&acc, p);
            }
        }
        acc
    }

    pub fn is_integral(&self) -> bool {
        self.a2.is_integer() && self.a4.is_integer() && self.a6.is_integer()
    }

    /// Minimal u with (x,y) ↦ (u²x, u³y) clearing all denominators.
    pub fn integralize(&self) -> Result<IntegralModel> {
        let budget = Budget::default();
        let mut u = Int::one();
        let mut primes = std::collections::BTreeMap::<Int, u32>::new();
        for (den, weight) in [
            (self.a2.denom(), 2u32),
            (self.a4.denom(), 4),
            (self.a6.denom(), 6),
        ] {
            if den.is_one() {
                continue;
            }
            for (p, e) in factorize(den, &budget)? {
                let need = e.div_ceil(weight);
                let slot = primes.entry(p).or_insert(0);
                *slot = (*slot).max(need);
            }
        }
        for (p, e) in primes {
            u *= p.pow(e);
        }
        let u2 = Rational::from_integer(&u * &u);
        let u4 = &u2 * &u2;
        let u6 = &u4 * &u2;
        let curve = Curve {
            a2: &self.a2 * &u2,
            a4: &self.a4 * u4,
            a6: &self.a6 * u6,
        };
        debug_assert!(curve.is_integral());
        Ok(IntegralModel {
            source: self.clone(),
            curve,
            u,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a2": format_rational(&self.a2),
            "a4": format_rational(&self.a4),
            "a6": format_rational(&self.a6),
        })
    }
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "y^2 = x^3 + {}*x^2 + {}*x + {}",
            format_rational(&self.a2),
            format_rational(&self.a4),
            format_rational(&self.a6)
        )
    }
}

/// A curve together with the rescaling (x,y) ↦ (u²x, u³y) onto an
/// integer-coefficient model.
#[derive(Clone, Debug)]
pub struct IntegralModel {
    pub source: Curve,
    pub curve: Curve,
    pub u: Int,
}

impl IntegralModel {
    pub fn map_point(&self, p: &Point) -> Result<Point> {
        if !self.source.contains(p) {
            if let Point::Affine { x, y } = p {
                return Err(Error::NotOnCurve {
                    x: format_rational(x),
                    y: format_rational(y),
                });
            }
        }
        Ok(match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let u2 = Rational::from_integer(&self.u * &self.u);
                let u3 = &u2 * Rational::from_integer(self.u.clone());
                Point::Affine { x: x * u2, y: y * u3 }
            }
        })
    }

    pub fn unmap_point(&self, p: &Point) -> Result<Point> {
        if !self.curve.contains(p) {
            if let Point::Affine { x, y } = p {
                return Err(Error::NotOnCurve {
                    x: format_rational(x),
                    y: format_rational(y),
                });
            }
        }
        Ok(match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let u2 = Rational::from_integer(&self.u * &self.u);
                let u3 = &u2 * Rational::from_integer(self.u.clone());
                Point::Affine { x: x / u2, y: y / u3 }
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one()
    }
}

/// Convenience constructor from integer coefficients.
pub fn curve_i(a2: i64, a4: i64, a6: i64) -> Result<Curve> {
    Curve::new(
        Rational::from_integer(int(a2)),
        Rational::from_integer(int(a4)),
        Rational::from_integer(int(a6)),
    )
}
