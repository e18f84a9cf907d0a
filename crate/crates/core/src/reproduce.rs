use crate::curve::Point;
use crate::error::{Error, Result};
use crate::families::{construct, FamilyId, Param};
use crate::rational::{rat, rat2};
use crate::regulator::regulator;
use serde_json::{json, Value};

/// Outcome of one determinant row: `Yes`/`No` for a plain tolerance check,
/// `ReferenceInconsistent` when the claimed value is provably unreachable
/// for the listed point set and the discrepancy is explained by exact
/// arithmetic rather than computational error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchFlag {
    Yes,
    No,
    ReferenceInconsistent,
}

impl MatchFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchFlag::Yes => "yes",
            MatchFlag::No => "no",
            MatchFlag::ReferenceInconsistent => "reference-inconsistent",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReproRow {
    pub section: String,
    pub instance: String,
    pub points: String,
    pub claimed: String,
    pub computed: String,
    pub rel_err: String,
    pub matched: MatchFlag,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ReproTable {
    pub rows: Vec<ReproRow>,
    pub calibration: String,
    pub all_ok: bool,
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ReproTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,instance,points,claimed,computed,rel_err,match\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&r.section),
                csv_field(&r.instance),
                csv_field(&r.points),
                csv_field(&r.claimed),
                csv_field(&r.computed),
                csv_field(&r.rel_err),
                r.matched.as_str()
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "calibration": self.calibration,
            "all_ok": self.all_ok,
            "rows": self.rows.iter().map(|r| {
                let mut v = json!({
                    "section": r.section,
                    "instance": r.instance,
                    "points": r.points,
                    "claimed": r.claimed,
                    "computed": r.computed,
                    "rel_err": r.rel_err,
                    "match": r.matched.as_str(),
                });
                if let Some(n) = &r.note {
                    v["note"] = json!(n);
                }
                v
            }).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Normal,
    /// The listed points satisfy an exact linear relation, so the claimed
    /// nonzero determinant cannot belong to this set.
    KnownDependent,
    /// The source curve for these rows is displayed elsewhere with an
    /// inconsistent constant term; values are computed on the
    /// substitution-derived curve.
    CurveDisplayNote,
}

pub const MATCH_TOLERANCE: f64 = 1e-6;

const DEPENDENT_NOTE: &str = "determinant is exactly 0: the points satisfy \
P1 + 2*P2 + P3 = O (verified in exact arithmetic), so the claimed nonzero \
value cannot belong to this set; the set {P2,P3,P4} reproduces it instead";

const DISPLAY_NOTE: &str = "computed on the substitution-derived curve with \
constant term (2301/100)^2; the reference tabulation displays this curve \
with constant term (2376/25)^2, which is inconsistent with its own listed \
points";

fn recorded_rows() -> Vec<(FamilyId, Param, Vec<&'static str>, &'static str, RowKind)> {
    use FamilyId::*;
    vec![
        (F1A2C2, Param::Alpha(rat(2)), vec!["P", "Q", "R"], "73.3583597733868", RowKind::Normal),
        (F2A2B2, Param::BigT(rat(1)), vec!["P1", "P2", "P3"], "7.34210213314542", RowKind::KnownDependent),
        (F2A2B2, Param::BigT(rat(1)), vec!["P2", "P3", "P4"], "7.34210213314542", RowKind::Normal),
        (F3B2A2, Param::M(rat(10)), vec!["P1", "P3", "P4"], "421.718713884796", RowKind::CurveDisplayNote),
        (F3B2A2, Param::M(rat(10)), vec!["P2", "P3", "P4"], "105.429678471199", RowKind::CurveDisplayNote),
        (F4C2B2, Param::U(rat(2)), vec!["P1", "P2", "P4"], "16.9957115044387", RowKind::Normal),
        (F4C2B2, Param::U(rat(2)), vec!["P2", "P3", "P4"], "16.9957115044387", RowKind::Normal),
        (F5B2C2, Param::T(rat2(7, 29)), vec!["P3", "P4"], "13.2385415745155", RowKind::Normal),
        (F5B2C2, Param::T(rat2(7, 29)), vec!["P1", "P3"], "52.9541662980621", RowKind::Normal),
    ]
}

/// Recompute every published determinant claim at the given precision and
/// report per-row agreement at relative tolerance 1e-6.
///
/// The height normalization is calibrated on the first row: if its
/// determinant misses the target by a uniform power of two (dimension 3 →
/// factor 2³), every height is rescaled by 2 and the factor is recorded;
/// with the conventions used here the calibration factor is 1.
pub fn reproduce(precision: u32) -> Result<ReproTable> {
    let mut computed = Vec::new();
    for (family, param, set, claimed, kind) in recorded_rows() {
        let inst = construct(family, param)?;
        let pts: Vec<Point> = set
            .iter()
            .map(|n| {
                inst.point(n).cloned().ok_or_else(|| {
                    Error::DegenerateParameter(format!("missing point {n}"))
                })
            })
            .collect::<Result<_>>()?;
        let rep = regulator(&inst.curve, &pts, precision, "1e-4")?;
        computed.push((inst, pts, rep, set, claimed, kind));
    }

    // Calibration against the first target: try height scalings s ∈
    // {1, 2, 1/2}; an n-point determinant scales by sⁿ.
    let det0 = computed[0].2.det.to_f64();
    let target0: f64 = computed[0].4.parse().expect("literal");
    let mut best = (f64::INFINITY, rat(1), "1");
    for (s, name) in [(rat(1), "1"), (rat(2), "2"), (rat2(1, 2), "1/2")] {
        let sf = s.numer().to_string().parse::<f64>().unwrap()
            / s.denom().to_string().parse::<f64>().unwrap();
        let miss = (sf.powi(3) * det0 / target0 - 1.0).abs();
        if miss < best.0 {
            best = (miss, s, name);
        }
    }
    let (_, cal_factor, cal_name) = best;

    let mut rows = Vec::new();
    let mut all_ok = true;
    for (inst, pts, rep, set, claimed, kind) in &computed {
        let cal_pow = num::pow::pow(cal_factor.clone(), pts.len());
        let det = rep.det.mul_rat(&cal_pow);
        let cf = det.to_f64();
        let claimed_f: f64 = claimed.parse().expect("literal");
        let rel = (cf - claimed_f).abs() / claimed_f.abs();
        let mut note = None;
        let matched = if rel <= MATCH_TOLERANCE {
            if *kind == RowKind::CurveDisplayNote {
                note = Some(DISPLAY_NOTE.to_string());
            }
            MatchFlag::Yes
        } else if *kind == RowKind::KnownDependent && dependency_holds(inst) {
            let err_bound = det.err().max(1e-30);
            if cf.abs() <= err_bound * 10.0 + 1e-30 {
                note = Some(DEPENDENT_NOTE.to_string());
                MatchFlag::ReferenceInconsistent
            } else {
                all_ok = false;
                MatchFlag::No
            }
        } else {
            all_ok = false;
            MatchFlag::No
        };
        rows.push(ReproRow {
            section: inst.family.name().to_string(),
            instance: inst.param.to_string(),
            points: set.join(","),
            claimed: claimed.to_string(),
            computed: det.to_sig_string(15),
            rel_err: format!("{rel:.3e}"),
            matched,
            note,
        });
    }
    Ok(ReproTable { rows, calibration: cal_name.to_string(), all_ok })
}

/// Check P1 + 2·P2 + P3 = O by exact group arithmetic.
fn dependency_holds(inst: &crate::families::FamilyInstance) -> bool {
    let (Some(p1), Some(p2), Some(p3)) =
        (inst.point("P1"), inst.point("P2"), inst.point("P3"))
    else {
        return false;
    };
    let e = &inst.curve;
    e.add(p1, &e.add(&e.double(p2), p3)).is_infinity()
}
