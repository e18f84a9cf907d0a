use crate::curve::{Curve, IntegralModel, Point};
use crate::error::{Error, Result};
use crate::factor::{divisors, Budget};
use crate::families::{construct, FamilyId, Param};
use crate::rational::{format_rational, is_integral, sqrt_exact, Int, Rational};
use crate::triples::PythTriple;
use num::integer::Integer as _;
use num::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// Why a point is known to have infinite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    /// Non-integer coordinates on an integer-coefficient model.
    NonIntegralCoordinates,
    /// y-coordinate fails the discriminant divisibility a torsion point
    /// would satisfy.
    YNotDividingD,
    /// All multiples up to the rational torsion bound are affine.
    MazurExhaustion,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::NonIntegralCoordinates => "non_integral_coordinates",
            CertificateKind::YNotDividingD => "y_not_dividing_d",
            CertificateKind::MazurExhaustion => "mazur_exhaustion",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderVerdict {
    Finite(u32),
    Infinite(CertificateKind),
}

impl OrderVerdict {
    pub fn is_infinite(&self) -> bool {
        matches!(self, OrderVerdict::Infinite(_))
    }
}

fn require_on_curve(e: &Curve, p: &Point) -> Result<()> {
    if e.contains(p) {
        return Ok(());
    }
    match p {
        Point::Affine { x, y } => Err(Error::NotOnCurve {
            x: format_rational(x),
            y: format_rational(y),
        }),
        Point::Infinity => unreachable!(),
    }
}

/// Exact order test: a rational torsion point has order at most 12, so
/// twelve additions settle finiteness.
pub fn point_order(e: &Curve, p: &Point) -> Result<OrderVerdict> {
    require_on_curve(e, p)?;
    if p.is_infinity() {
        return Ok(OrderVerdict::Finite(1));
    }
    let mut acc = p.clone();
    for n in 1..=12u32 {
        // acc == n·P here.
        if acc.is_infinity() {
            return Ok(OrderVerdict::Finite(n));
        }
        if n < 12 {
            acc = e.add(&acc, p);
        }
    }
    Ok(OrderVerdict::Infinite(CertificateKind::MazurExhaustion))
}

/// Integer-coefficient models force torsion points to have integer
/// coordinates, so a non-integral coordinate certifies infinite order.
/// Only valid when the model's source curve was already integral (u = 1).
pub fn lemma2_nonintegrality_certificate(
    m: &IntegralModel,
    p: &Point,
) -> Result<Option<OrderVerdict>> {
    if !m.is_identity() || !m.curve.is_integral() {
        return Err(Error::NotIntegral);
    }
    require_on_curve(&m.curve, p)?;
    match p {
        Point::Infinity => Ok(None),
        Point::Affine { x, y } => {
            if !is_integral(x) || !is_integral(y) {
                Ok(Some(OrderVerdict::Infinite(
                    CertificateKind::NonIntegralCoordinates,
                )))
            } else {
                Ok(None)
            }
        }
    }
}

fn eval_cubic(a: &Int, b: &Int, c: &Int, x: &Int) -> Int {
    ((x + a) * x + b) * x + c
}

/// All integer roots of x³ + a·x² + b·x + c, by bisection on each monotone
/// piece plus exhaustive scan of small windows around the turning points.
pub fn integer_cubic_roots(a: &Int, b: &Int, c: &Int) -> Vec<Int> {
    let mut roots = BTreeSet::new();
    let bound: Int =
        Int::one() + [a, b, c].iter().map(|v| v.abs()).max().unwrap();
    let three = Int::from(3u8);
    let window = Int::from(5u8);
    let mut pieces: Vec<(Int, Int, bool)> = Vec::new();
    let disc = a * a - &three * b;
    if disc.is_positive() {
        let s = disc.sqrt();
        let t1 = (-a - &s).div_floor(&three);
        let t2 = (-a + &s).div_floor(&three);
        for base in [&t1, &t2] {
            let mut x = base - &window;
            let stop = base + &window;
            while x <= stop {
                if eval_cubic(a, b, c, &x).is_zero() {
                    roots.insert(x.clone());
                }
                x += Int::one();
            }
        }
        pieces.push((-&bound, &t1 - &window, true));
        pieces.push((&t1 + &window, &t2 - &window, false));
        pieces.push((&t2 + &window, bound.clone(), true));
    } else {
        pieces.push((-&bound, bound.clone(), true));
    }
    let two = Int::from(2u8);
    for (mut lo, mut hi, increasing) in pieces {
        if lo > hi {
            continue;
        }
        while lo < hi {
            let mid = (&lo + &hi).div_floor(&two);
            let v = eval_cubic(a, b, c, &mid);
            let go_right = if increasing {
                v.is_negative()
            } else {
                v.is_positive()
            };
            if go_right {
                lo = mid + Int::one();
            } else {
                hi = mid;
            }
        }
        if eval_cubic(a, b, c, &lo).is_zero() {
            roots.insert(lo);
        }
    }
    roots.into_iter().collect()
}

fn int_coeffs(e: &Curve) -> (Int, Int, Int) {
    (
        e.a2.to_integer(),
        e.a4.to_integer(),
        e.a6.to_integer(),
    )
}

/// Full torsion subgroup of an integral model: candidates have y = 0 or
/// y² dividing... y | D, then the order test filters. Infinity included,
/// affine points sorted by (x, y).
pub fn nagell_lutz_torsion(m: &IntegralModel, budget: &Budget) -> Result<Vec<Point>> {
    let e = &m.curve;
    debug_assert!(e.is_integral());
    let (a2, a4, a6) = int_coeffs(e);
    let d = e.discriminant().to_integer();
    let mut candidates: BTreeSet<Point> = BTreeSet::new();
    candidates.insert(Point::Infinity);
    for x in integer_cubic_roots(&a2, &a4, &a6) {
        candidates.insert(Point::affine(
            Rational::from_integer(x),
            Rational::zero(),
        ));
    }
    for y in divisors(&d, budget)? {
        let c_shift = &a6 - &y * &y;
        for x in integer_cubic_roots(&a2, &a4, &c_shift) {
            let xq = Rational::from_integer(x);
            let yq = Rational::from_integer(y.clone());
            candidates.insert(Point::affine(xq.clone(), yq.clone()));
            candidates.insert(Point::affine(xq, -yq));
        }
    }
    let mut out = Vec::new();
    for p in candidates {
        if matches!(point_order(e, &p)?, OrderVerdict::Finite(_)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Reference torsion enumeration by brute force over integer x in
/// [−x_bound, x_bound]; used as an independent oracle for the candidate
/// method.
pub fn torsion_by_search(e: &Curve, x_bound: i64) -> Result<Vec<Point>> {
    let mut out = vec![Point::Infinity];
    for xi in -x_bound..=x_bound {
        let x = Rational::from_integer(Int::from(xi));
        let rhs = e.rhs(&x);
        if rhs.is_negative() {
            continue;
        }
        if let Some(y) = sqrt_exact(&rhs) {
            let mut pts = vec![Point::affine(x.clone(), y.clone())];
            if !y.is_zero() {
                pts.push(Point::affine(x.clone(), -y));
            }
            for p in pts {
                if matches!(point_order(e, &p)?, OrderVerdict::Finite(_)) {
                    out.push(p);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Divisibility shortcut for the Frey-shaped families: when the designated
/// odd leg makes abc fail to divide the discriminant, the catalogued point
/// with y = abc cannot be torsion.
pub fn remark_divisibility_certificate(
    family: FamilyId,
    triple: &PythTriple,
) -> Result<Option<OrderVerdict>> {
    if !family.is_frey() {
        return Err(Error::ParameterKind {
            family: family.name().to_string(),
            kind: "divisibility certificate".to_string(),
        });
    }
    if !triple.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let gate_odd = match family {
        FamilyId::F6FreyAc => &triple.b,
        FamilyId::F7FreyBc => &triple.a,
        _ => unreachable!(),
    };
    if gate_odd.is_even() {
        return Ok(None);
    }
    let inst = construct(family, Param::Triple(triple.clone()))?;
    let d = inst.curve.discriminant().to_integer();
    let abc = triple.abc();
    if (&d % &abc).is_zero() {
        Ok(None)
    } else {
        Ok(Some(OrderVerdict::Infinite(CertificateKind::YNotDividingD)))
    }
}

/// A family member, its designated witness point, and the infinite-order
/// verdict for it.
#[derive(Clone, Debug)]
pub struct PositiveRankCertificate {
    pub family: FamilyId,
    pub triple: PythTriple,
    pub witness: Point,
    pub verdict: OrderVerdict,
}

impl PositiveRankCertificate {
    pub fn to_json(&self) -> Value {
        let (verdict, certificate) = match self.verdict {
            OrderVerdict::Infinite(kind) => ("infinite", Some(kind.as_str())),
            OrderVerdict::Finite(_) => ("finite", None),
        };
        let t = &self.triple;
        let triple_json: Vec<Value> = [&t.a, &t.b, &t.c]
            .iter()
            .map(|v| v.to_i64().map_or_else(|| json!(v.to_string()), Value::from))
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("family".into(), json!(self.family.name()));
        obj.insert("triple".into(), json!(triple_json));
        obj.insert("witness".into(), self.witness.to_json());
        obj.insert("verdict".into(), json!(verdict));
        if let Some(c) = certificate {
            obj.insert("certificate".into(), json!(c));
        }
        Value::Object(obj)
    }
}

/// Certifies that the family member for a primitive triple has positive
/// rank, via the designated witness point: coordinate non-integrality on
/// the integer model when available, otherwise the order bound.
pub fn certify_positive_rank(
    family: FamilyId,
    triple: &PythTriple,
) -> Result<PositiveRankCertificate> {
    if !triple.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let inst = construct(family, Param::Triple(triple.clone()))?;
    let witness_name = if family.is_frey() { "P1" } else { "P3" };
    let witness = inst
        .point(witness_name)
        .expect("catalog always contains the witness")
        .clone();
    let model = inst.curve.integralize()?;
    let verdict = match lemma2_nonintegrality_certificate(&model, &witness) {
        Ok(Some(v)) => v,
        Ok(None) | Err(Error::NotIntegral) => point_order(&inst.curve, &witness)?,
        Err(e) => return Err(e),
    };
    if !verdict.is_infinite() {
        return Err(Error::DegenerateParameter(format!(
            "witness {witness} for {family} at {triple} is torsion"
        )));
    }
    Ok(PositiveRankCertificate {
        family,
        triple: triple.clone(),
        witness,
        verdict,
    })
}
