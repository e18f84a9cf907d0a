use crate::error::{Error, Result};
use crate::rational::{int, Int, Rational};
use num::integer::Integer as _;
use num::{One, Signed, Zero};

/// Integer right-triangle sides a² + b² = c², all positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PythTriple {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl PythTriple {
    pub fn new(a: Int, b: Int, c: Int) -> Result<PythTriple> {
        if !a.is_positive() || !b.is_positive() || !c.is_positive() || &a * &a + &b * &b != &c * &c
        {
            return Err(Error::NotPythagorean(format!("({a}, {b}, {c})")));
        }
        Ok(PythTriple { a, b, c })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<PythTriple> {
        PythTriple::new(int(a), int(b), int(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    pub fn abc(&self) -> Int {
        &self.a * &self.b * &self.c
    }
}

impl std::fmt::Display for PythTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// (m² − n², 2mn, m² + n²) for m > n > 0 coprime, opposite parity — hits
/// every primitive triple exactly once.
pub fn ppt_from_mn(m: &Int, n: &Int) -> Result<PythTriple> {
    if !(n.is_positive() && m > n) {
        return Err(Error::GeneratorOrder);
    }
    if !m.gcd(n).is_one() {
        return Err(Error::GeneratorsNotCoprime);
    }
    if m.is_odd() && n.is_odd() {
        return Err(Error::GeneratorsBothOdd);
    }
    let (m2, n2) = (m * m, n * n);
    PythTriple::new(&m2 - &n2, Int::from(2u8) * m * n, m2 + n2)
}

/// All primitive triples with hypotenuse ≤ limit, legs in increasing order,
/// sorted by (c, a).
pub fn enumerate_ppts(limit: &Int) -> Result<Vec<PythTriple>> {
    if *limit < int(5) {
        return Err(Error::DegenerateParameter(format!(
            "hypotenuse bound {limit} is below the smallest triple"
        )));
    }
    let mut out = Vec::new();
    let mut m = int(2);
    while &m * &m + Int::one() <= *limit {
        let mut n = Int::one();
        while n < m {
            let admissible =
                m.gcd(&n).is_one() && !(m.is_odd() && n.is_odd());
            if admissible {
                let c = &m * &m + &n * &n;
                if c <= *limit {
                    let t = ppt_from_mn(&m, &n)?;
                    let (lo, hi) = if t.a < t.b { (t.a, t.b) } else { (t.b, t.a) };
                    out.push(PythTriple { a: lo, b: hi, c: t.c });
                }
            }
            n += Int::one();
        }
        m += Int::one();
    }
    out.sort_by(|p, q| (&p.c, &p.a).cmp(&(&q.c, &q.a)));
    Ok(out)
}

/// Rational triple (t²−1, 2t, t²+1); a²+b²=c² is an identity in t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalTriple {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub t: Rational,
}

pub fn triple_from_t(t: &Rational) -> Result<RationalTriple> {
    let one = Rational::one();
    if t.is_zero() || *t == one || *t == -&one {
        return Err(Error::DegenerateParameter(format!(
            "t = {t} collapses a triangle side"
        )));
    }
    let t2 = t * t;
    Ok(RationalTriple {
        a: &t2 - &one,
        b: t * Rational::from_integer(int(2)),
        c: t2 + one,
        t: t.clone(),
    })
}
