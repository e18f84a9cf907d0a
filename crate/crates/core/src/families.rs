use crate::curve::{Curve, Point};
use crate::error::{Error, Result};
use crate::rational::{cbrt_exact, format_rational, rat, sqrt_exact, Rational};
use crate::triples::{triple_from_t, PythTriple};
use num::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

/// The seven curve constructions, keyed by which two triangle sides square
/// into the linear and constant coefficients (F1–F5: y² = x³ − A²x + B²) or
/// by the Frey-style quadratic shape (F6/F7).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    F1A2C2,
    F2A2B2,
    F3B2A2,
    F4C2B2,
    F5B2C2,
    F6FreyAc,
    F7FreyBc,
}

pub const ALL_FAMILIES: [FamilyId; 7] = [
    FamilyId::F1A2C2,
    FamilyId::F2A2B2,
    FamilyId::F3B2A2,
    FamilyId::F4C2B2,
    FamilyId::F5B2C2,
    FamilyId::F6FreyAc,
    FamilyId::F7FreyBc,
];

impl FamilyId {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::F1A2C2 => "F1_a2c2",
            FamilyId::F2A2B2 => "F2_a2b2",
            FamilyId::F3B2A2 => "F3_b2a2",
            FamilyId::F4C2B2 => "F4_c2b2",
            FamilyId::F5B2C2 => "F5_b2c2",
            FamilyId::F6FreyAc => "F6_frey_ac",
            FamilyId::F7FreyBc => "F7_frey_bc",
        }
    }

    pub fn parse(s: &str) -> Result<FamilyId> {
        let key = s.trim();
        for f in ALL_FAMILIES {
            if key.eq_ignore_ascii_case(f.name())
                || key.eq_ignore_ascii_case(&f.name()[..2])
            {
                return Ok(f);
            }
        }
        Err(Error::DegenerateParameter(format!("unknown family '{s}'")))
    }

    pub fn is_frey(&self) -> bool {
        matches!(self, FamilyId::F6FreyAc | FamilyId::F7FreyBc)
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter binding for a family instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    T(Rational),
    Alpha(Rational),
    BigT(Rational),
    M(Rational),
    U(Rational),
    Triple(PythTriple),
}

impl Param {
    pub fn kind(&self) -> &'static str {
        match self {
            Param::T(_) => "t",
            Param::Alpha(_) => "alpha",
            Param::BigT(_) => "T",
            Param::M(_) => "m",
            Param::U(_) => "u",
            Param::Triple(_) => "triple",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Param::T(v) => json!({"t": format_rational(v)}),
            Param::Alpha(v) => json!({"alpha": format_rational(v)}),
            Param::BigT(v) => json!({"T": format_rational(v)}),
            Param::M(v) => json!({"m": format_rational(v)}),
            Param::U(v) => json!({"u": format_rational(v)}),
            Param::Triple(t) => json!({
                "triple": [
                    t.a.to_i64().map_or_else(|| json!(t.a.to_string()), Value::from),
                    t.b.to_i64().map_or_else(|| json!(t.b.to_string()), Value::from),
                    t.c.to_i64().map_or_else(|| json!(t.c.to_string()), Value::from),
                ]
            }),
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Param::T(v) => write!(f, "t={}", format_rational(v)),
            Param::Alpha(v) => write!(f, "alpha={}", format_rational(v)),
            Param::BigT(v) => write!(f, "T={}", format_rational(v)),
            Param::M(v) => write!(f, "m={}", format_rational(v)),
            Param::U(v) => write!(f, "u={}", format_rational(v)),
            Param::Triple(t) => write!(f, "triple={t}"),
        }
    }
}

/// A constructed curve with its catalogued points, in catalog order.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub family: FamilyId,
    pub param: Param,
    pub curve: Curve,
    pub points: Vec<(String, Point)>,
}

impl FamilyInstance {
    pub fn point(&self, name: &str) -> Option<&Point> {
        self.points
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }

    pub fn point_names(&self) -> Vec<&str> {
        self.points.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut pts = serde_json::Map::new();
        for (name, p) in &self.points {
            pts.insert(name.clone(), p.to_json());
        }
        json!({
            "family": self.family.name(),
            "param": self.param.to_json(),
            "curve": self.curve.to_json(),
            "points": Value::Object(pts),
        })
    }
}

/// t = (α²−1)/(4α) and v = (α²+1)/(2α), making 1 + 4t² = v² a square;
/// the instance then carries R = (1, v).
pub fn substitute_alpha(alpha: &Rational) -> Result<(Rational, Rational)> {
    let one = Rational::one();
    if alpha.is_zero() || *alpha == one || *alpha == -&one {
        return Err(Error::DegenerateParameter(format!(
            "alpha = {} gives t = 0",
            format_rational(alpha)
        )));
    }
    let a2 = alpha * alpha;
    let t = (&a2 - &one) / (rat(4) * alpha);
    let v = (&a2 + &one) / (rat(2) * alpha);
    Ok((t, v))
}

/// t = 4T³; the instance then carries the extra point
/// (−4T², 2T(16T⁶−1)).
pub fn substitute_big_t(big_t: &Rational) -> Result<(Rational, Point)> {
    if big_t.is_zero() {
        return Err(Error::DegenerateParameter("T = 0 gives t = 0".into()));
    }
    let t = rat(4) * big_t * big_t * big_t;
    if t.abs() == Rational::one() {
        return Err(Error::DegenerateParameter(format!(
            "T = {} gives degenerate t",
            format_rational(big_t)
        )));
    }
    let t2 = big_t * big_t;
    let t6 = &t2 * &t2 * &t2;
    let extra = Point::affine(
        rat(-4) * &t2,
        rat(2) * big_t * (rat(16) * t6 - Rational::one()),
    );
    Ok((t, extra))
}

/// t = 1/m − m/2, making t² + 2 a square; the instance then carries the
/// extra point (−1, 1/m² − m²/4).
pub fn substitute_m(m: &Rational) -> Result<(Rational, Point)> {
    if m.is_zero() {
        return Err(Error::DegenerateParameter("m = 0".into()));
    }
    let t = m.recip() - m / rat(2);
    if t.is_zero() || t.abs() == Rational::one() {
        return Err(Error::DegenerateParameter(format!(
            "m = {} gives degenerate t = {}",
            format_rational(m),
            format_rational(&t)
        )));
    }
    let m2 = m * m;
    let extra = Point::affine(rat(-1), m2.recip() - m2 / rat(4));
    Ok((t, extra))
}

/// t = (u²−2u−1)/(u²+1), making 2 − t² a square; the instance then carries
/// the extra point (1, t·w) with w = (−u²−2u+1)/(u²+1).
pub fn substitute_u(u: &Rational) -> Result<(Rational, Point)> {
    let one = Rational::one();
    if u.is_zero() || *u == one || *u == -&one {
        return Err(Error::DegenerateParameter(format!(
            "u = {} gives degenerate t",
            format_rational(u)
        )));
    }
    let u2 = u * u;
    let den = &u2 + &one;
    let two_u = rat(2) * u;
    let t = (&u2 - &two_u - &one) / &den;
    let w = (-&u2 - &two_u + &one) / &den;
    let extra = Point::affine(Rational::one(), &t * &w);
    Ok((t, extra))
}

/// (A, B) coefficient pair for y² = x³ − A²x + B², per family.
fn side_pair(family: FamilyId, a: &Rational, b: &Rational, c: &Rational) -> (Rational, Rational) {
    match family {
        FamilyId::F1A2C2 => (a.clone(), c.clone()),
        FamilyId::F2A2B2 => (a.clone(), b.clone()),
        FamilyId::F3B2A2 => (b.clone(), a.clone()),
        FamilyId::F4C2B2 => (c.clone(), b.clone()),
        FamilyId::F5B2C2 => (b.clone(), c.clone()),
        _ => unreachable!("Frey families build their own coefficients"),
    }
}

fn short_family_curve(big_a: &Rational, big_b: &Rational) -> Result<Curve> {
    Curve::new(
        Rational::zero(),
        -(big_a * big_a),
        big_b * big_b,
    )
}

/// Points present on y² = x³ − A²x + B² for every parameter value:
/// (0, B), (A, B), and ((B/A)², (B/A)³).
fn base_points(big_a: &Rational, big_b: &Rational) -> Result<[Point; 3]> {
    if big_a.is_zero() {
        return Err(Error::DegenerateParameter(
            "zero linear coefficient root".into(),
        ));
    }
    let r = big_b / big_a;
    Ok([
        Point::affine(Rational::zero(), big_b.clone()),
        Point::affine(big_a.clone(), big_b.clone()),
        Point::affine(&r * &r, &r * &r * &r),
    ])
}

fn verified(curve: &Curve, pts: Vec<(String, Point)>) -> Result<Vec<(String, Point)>> {
    for (_, p) in &pts {
        if let Point::Affine { x, y } = p {
            if !curve.contains(p) {
                return Err(Error::NotOnCurve {
                    x: format_rational(x),
                    y: format_rational(y),
                });
            }
        }
    }
    Ok(pts)
}

fn named(points: Vec<(&str, Point)>) -> Vec<(String, Point)> {
    points.into_iter().map(|(n, p)| (n.to_string(), p)).collect()
}

/// Extra catalogued point detectable from t alone, when the relevant
/// square/cube condition happens to hold.
fn detected_extra(family: FamilyId, t: &Rational) -> Option<Point> {
    match family {
        FamilyId::F1A2C2 => {
            let v = sqrt_exact(&(Rational::one() + rat(4) * t * t))?;
            Some(Point::affine(Rational::one(), v))
        }
        FamilyId::F2A2B2 => {
            let big_t = cbrt_exact(&(t / rat(4)))?;
            substitute_big_t(&big_t).ok().map(|(_, p)| p)
        }
        FamilyId::F3B2A2 => {
            let s = sqrt_exact(&(t * t + rat(2)))?;
            let m = &s - t;
            substitute_m(&m).ok().map(|(_, p)| p)
        }
        FamilyId::F4C2B2 => {
            let s = sqrt_exact(&(rat(2) - t * t))?;
            Some(Point::affine(Rational::one(), t * s))
        }
        FamilyId::F5B2C2 => Some(Point::affine(rat(2), t * t - rat(3))),
        _ => None,
    }
}

fn construct_short(family: FamilyId, t: &Rational, param: Param) -> Result<FamilyInstance> {
    let rt = triple_from_t(t)?;
    let (big_a, big_b) = side_pair(family, &rt.a, &rt.b, &rt.c);
    let curve = short_family_curve(&big_a, &big_b)?;
    let [p1, p2, p3] = base_points(&big_a, &big_b)?;
    let mut pts = vec![
        ("P1".to_string(), p1),
        ("P2".to_string(), p2),
        ("P3".to_string(), p3),
    ];
    match &param {
        Param::Alpha(alpha) => {
            let (_, v) = substitute_alpha(alpha)?;
            pts = named(vec![
                ("P", pts[0].1.clone()),
                ("Q", pts[1].1.clone()),
                ("R", Point::affine(Rational::one(), v)),
            ]);
        }
        Param::BigT(big_t) => {
            let (_, extra) = substitute_big_t(big_t)?;
            pts.push(("P4".to_string(), extra));
        }
        Param::M(m) => {
            let (_, extra) = substitute_m(m)?;
            pts.push(("P4".to_string(), extra));
        }
        Param::U(u) => {
            let (_, extra) = substitute_u(u)?;
            pts.push(("P4".to_string(), extra));
        }
        Param::T(_) => {
            if let Some(extra) = detected_extra(family, t) {
                pts.push(("P4".to_string(), extra));
            }
        }
        Param::Triple(_) => {}
    }
    Ok(FamilyInstance {
        family,
        curve: curve.clone(),
        points: verified(&curve, pts)?,
        param,
    })
}

fn construct_short_from_triple(family: FamilyId, triple: PythTriple) -> Result<FamilyInstance> {
    let (a, b, c) = (
        Rational::from_integer(triple.a.clone()),
        Rational::from_integer(triple.b.clone()),
        Rational::from_integer(triple.c.clone()),
    );
    let (big_a, big_b) = side_pair(family, &a, &b, &c);
    let curve = short_family_curve(&big_a, &big_b)?;
    let [p1, p2, p3] = base_points(&big_a, &big_b)?;
    let pts = named(vec![("P1", p1), ("P2", p2), ("P3", p3)]);
    Ok(FamilyInstance {
        family,
        curve: curve.clone(),
        points: verified(&curve, pts)?,
        param: Param::Triple(triple),
    })
}

fn construct_frey(family: FamilyId, triple: PythTriple) -> Result<FamilyInstance> {
    let (a, b, c) = (&triple.a, &triple.b, &triple.c);
    // F6 squares (b, ac) into the coefficients; F7 swaps the legs.
    let (s, prod) = match family {
        FamilyId::F6FreyAc => (b.clone(), a * c),
        FamilyId::F7FreyBc => (a.clone(), b * c),
        _ => unreachable!(),
    };
    let s2 = Rational::from_integer(&s * &s);
    let prod2 = Rational::from_integer(&prod * &prod);
    let curve = Curve::new(s2.clone(), -&prod2, Rational::zero())?;
    let abc = Rational::from_integer(triple.abc());
    let x1 = &prod2 / &s2;
    let y1 = Rational::new(&prod * &prod * &prod, &s * &s * &s);
    let prod_r = Rational::from_integer(prod);
    let pts = named(vec![
        ("P1", Point::affine(x1, y1)),
        ("P2", Point::affine(-s2, abc.clone())),
        ("P3", Point::affine(prod_r.clone(), abc.clone())),
        ("P4", Point::affine(-prod_r, abc)),
    ]);
    Ok(FamilyInstance {
        family,
        curve: curve.clone(),
        points: verified(&curve, pts)?,
        param: Param::Triple(triple),
    })
}

fn kind_mismatch(family: FamilyId, param: &Param) -> Error {
    Error::ParameterKind {
        family: family.name().to_string(),
        kind: param.kind().to_string(),
    }
}

/// Builds the curve and its full catalogued point set for the given family
/// and parameter binding.
pub fn construct(family: FamilyId, param: Param) -> Result<FamilyInstance> {
    match (family, param) {
        (f @ (FamilyId::F6FreyAc | FamilyId::F7FreyBc), Param::Triple(t)) => {
            construct_frey(f, t)
        }
        (f @ (FamilyId::F6FreyAc | FamilyId::F7FreyBc), p) => Err(kind_mismatch(f, &p)),
        (f, Param::Triple(t)) => construct_short_from_triple(f, t),
        (f, Param::T(t)) => {
            let tv = t.clone();
            construct_short(f, &tv, Param::T(t))
        }
        (FamilyId::F1A2C2, Param::Alpha(alpha)) => {
            let (t, _) = substitute_alpha(&alpha)?;
            construct_short(FamilyId::F1A2C2, &t, Param::Alpha(alpha))
        }
        (FamilyId::F2A2B2, Param::BigT(big_t)) => {
            let (t, _) = substitute_big_t(&big_t)?;
            construct_short(FamilyId::F2A2B2, &t, Param::BigT(big_t))
        }
        (FamilyId::F3B2A2, Param::M(m)) => {
            let (t, _) = substitute_m(&m)?;
            construct_short(FamilyId::F3B2A2, &t, Param::M(m))
        }
        (FamilyId::F4C2B2, Param::U(u)) => {
            let (t, _) = substitute_u(&u)?;
            construct_short(FamilyId::F4C2B2, &t, Param::U(u))
        }
        (f, p) => Err(kind_mismatch(f, &p)),
    }
}

/// The designated infinite-order witness coordinates for a triple in each
/// family: the "linear-part-zero" point for F1–F5, P1 for F6/F7.
pub fn witness_for(family: FamilyId, triple: &PythTriple) -> (Rational, Rational) {
    let (a, b, c) = (&triple.a, &triple.b, &triple.c);
    let (num, den) = match family {
        FamilyId::F1A2C2 => (c.clone(), a.clone()),
        FamilyId::F2A2B2 => (b.clone(), a.clone()),
        FamilyId::F3B2A2 => (a.clone(), b.clone()),
        FamilyId::F4C2B2 => (b.clone(), c.clone()),
        FamilyId::F5B2C2 => (c.clone(), b.clone()),
        FamilyId::F6FreyAc => (a * c, b.clone()),
        FamilyId::F7FreyBc => (b * c, a.clone()),
    };
    let r = Rational::new(num, den);
    (&r * &r, &r * &r * &r)
}
