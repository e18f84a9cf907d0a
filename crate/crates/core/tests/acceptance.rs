//! Acceptance gate: one test per criterion, each printing a PASS line with
//! the measured evidence (run with `--nocapture` to see them).

use num::{Signed, ToPrimitive, Zero};
use ptcurves_core::curve::curve_i;
use ptcurves_core::factor::Budget;
use ptcurves_core::heights::HeightMachine;
use ptcurves_core::rational::{parse_rational, rat, rat2, Int, Rational};
use ptcurves_core::torsion::torsion_by_search;
use ptcurves_core::{
    canonical_height, certify_positive_rank, construct, enumerate_ppts,
    nagell_lutz_torsion, ppt_from_mn, regulator, reproduce, Curve, FamilyId,
    MatchFlag, Param, Point, PythTriple,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const ALL_FAMILIES: [FamilyId; 7] = [
    FamilyId::F1A2C2,
    FamilyId::F2A2B2,
    FamilyId::F3B2A2,
    FamilyId::F4C2B2,
    FamilyId::F5B2C2,
    FamilyId::F6FreyAc,
    FamilyId::F7FreyBc,
];

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    rat2(num, den)
}

fn random_ppt(rng: &mut ChaCha8Rng) -> PythTriple {
    loop {
        let m = rng.gen_range(2i64..=12);
        let n = rng.gen_range(1i64..m);
        if let Ok(t) = ppt_from_mn(&Int::from(m), &Int::from(n)) {
            return t;
        }
    }
}

/// A random instance of the family, resampling until the parameter is
/// admissible.
fn random_instance(
    rng: &mut ChaCha8Rng,
    family: FamilyId,
) -> ptcurves_core::FamilyInstance {
    for _ in 0..200 {
        let param = if family.is_frey() {
            Param::Triple(random_ppt(rng))
        } else {
            Param::T(random_rational(rng, 12))
        };
        if let Ok(inst) = construct(family, param) {
            return inst;
        }
    }
    panic!("no admissible parameter found in 200 draws");
}

#[test]
fn criterion_1_determinant_reproduction() {
    let t0 = Instant::now();
    let table = reproduce(50).expect("reproduce runs");
    let elapsed = t0.elapsed().as_secs_f64();

    assert_eq!(table.rows.len(), 9);
    assert_eq!(table.calibration, "1", "normalization rescale must be reported");
    let mut matched = 0;
    for (i, row) in table.rows.iter().enumerate() {
        if i == 1 {
            // {P1,P2,P3} at T=1: the claimed value is unreachable — the three
            // points satisfy P1 + 2·P2 + P3 = O, so the determinant is 0.
            assert_eq!(row.matched, MatchFlag::ReferenceInconsistent);
            let inst = construct(FamilyId::F2A2B2, Param::BigT(rat(1))).unwrap();
            let (p1, p2, p3) = (
                inst.point("P1").unwrap(),
                inst.point("P2").unwrap(),
                inst.point("P3").unwrap(),
            );
            let e = &inst.curve;
            assert!(e.add(p1, &e.add(&e.double(p2), p3)).is_infinity());
            let computed: f64 = row.computed.parse().unwrap();
            assert!(computed.abs() < 1e-30, "flagged det must be ≈ 0");
        } else {
            assert_eq!(
                row.matched,
                MatchFlag::Yes,
                "row {i} ({} {} {}) must match: computed {} vs claimed {}",
                row.section,
                row.instance,
                row.points,
                row.computed,
                row.claimed
            );
            matched += 1;
        }
    }
    assert!(table.all_ok);
    assert!(elapsed <= 60.0, "took {elapsed:.1}s, limit 60s");
    println!(
        "criterion 1: PASS — 8/8 reproducible determinants match at 1e-6 \
(precision 50, {elapsed:.1}s); 1 row flagged {}: claimed 7.34210213314542 \
for a set satisfying P1+2*P2+P3=O (det exactly 0; the companion set \
{{P2,P3,P4}} reproduces that value); calibration factor {} (reported, \
no rescale needed); {matched} matches",
        MatchFlag::ReferenceInconsistent.as_str(),
        table.calibration
    );
}

#[test]
fn criterion_2_positivity_certificates() {
    let t0 = Instant::now();
    let triples = enumerate_ppts(&Int::from(200)).unwrap();
    // The stated count is 46, but there are exactly 32 primitive triples
    // with hypotenuse ≤ 200 (≈ 200/2π); the suite certifies all of them.
    assert_eq!(triples.len(), 32);
    let mut certs = 0;
    for family in ALL_FAMILIES {
        for t in &triples {
            let cert = certify_positive_rank(family, t).unwrap_or_else(|e| {
                panic!("{} over {t}: {e}", family.name())
            });
            assert!(cert.verdict.is_infinite());
            certs += 1;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert_eq!(certs, 7 * 32);
    assert!(elapsed <= 30.0, "took {elapsed:.1}s, limit 30s");
    println!(
        "criterion 2: PASS — {certs} infinite-order certificates across 7 \
families x 32 PPTs with c<=200 (stated count 46 does not match the actual \
triple census) in {elapsed:.1}s"
    );
}

#[test]
fn criterion_3_on_curve_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    for family in ALL_FAMILIES {
        for _ in 0..100 {
            let inst = random_instance(&mut rng, family);
            for name in inst.point_names() {
                let p = inst.point(&name).unwrap();
                assert!(
                    inst.curve.contains(p),
                    "{} {}: point {name} off curve",
                    family.name(),
                    inst.param
                );
                checked += 1;
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed <= 10.0, "took {elapsed:.1}s, limit 10s");
    println!(
        "criterion 3: PASS — {checked} catalogued points on 700 random \
instances satisfy their curve equations exactly ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_4_height_laws() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tol = 1e-40;

    // Quadraticity over 50 randomized family points.
    let mut worst_quad: f64 = 0.0;
    for i in 0..50 {
        let family = ALL_FAMILIES[i % ALL_FAMILIES.len()];
        let inst = random_instance(&mut rng, family);
        let p = inst.point("P1").or_else(|| inst.point("P")).unwrap();
        let m = HeightMachine::new(&inst.curve, 50).unwrap();
        let h1 = m.height(p).unwrap().value;
        let h2 = m.height(&inst.curve.double(p)).unwrap().value;
        let defect = h2.sub(&h1.rescale(h2.scale()).mul_i64(4)).to_f64().abs();
        worst_quad = worst_quad.max(defect);
        assert!(defect < tol, "{}: |h(2P)-4h(P)| = {defect:e}", family.name());
    }

    // Parallelogram law over 25 randomized pairs.
    let mut worst_par: f64 = 0.0;
    for i in 0..25 {
        let family = ALL_FAMILIES[i % 5]; // catalog families with P1, P2
        let inst = random_instance(&mut rng, family);
        let p = inst.point("P1").unwrap();
        let q = inst.point("P2").unwrap();
        let m = HeightMachine::new(&inst.curve, 50).unwrap();
        let sum = inst.curve.add(p, q);
        let diff = inst.curve.sub(p, q);
        let h = |pt: &Point| m.height(pt).map(|v| v.value);
        let (hp, hq) = (h(p).unwrap(), h(q).unwrap());
        let (hs, hd) = (h(&sum).unwrap(), h(&diff).unwrap());
        let scale = hs.scale().max(hd.scale()).max(hp.scale()).max(hq.scale());
        let defect = hs
            .rescale(scale)
            .add(&hd.rescale(scale))
            .sub(&hp.rescale(scale).mul_i64(2))
            .sub(&hq.rescale(scale).mul_i64(2))
            .to_f64()
            .abs();
        worst_par = worst_par.max(defect);
        assert!(defect < tol, "{}: parallelogram defect {defect:e}", family.name());
    }

    // Model invariance: heights agree on the source curve and its integral
    // model.
    let mut worst_model: f64 = 0.0;
    for i in 0..10 {
        let family = ALL_FAMILIES[i % 5];
        let inst = random_instance(&mut rng, family);
        let p = inst.point("P1").unwrap();
        let model = inst.curve.integralize().unwrap();
        let q = model.map_point(p).unwrap();
        let h_src = canonical_height(&inst.curve, p, 50).unwrap().value;
        let h_int = canonical_height(&model.curve, &q, 50).unwrap().value;
        let scale = h_src.scale().max(h_int.scale());
        let gap = h_src
            .rescale(scale)
            .sub(&h_int.rescale(scale))
            .to_f64()
            .abs();
        worst_model = worst_model.max(gap);
        assert!(gap < tol, "model-invariance gap {gap:e}");
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "took {elapsed:.1}s, limit 60s");
    println!(
        "criterion 4: PASS — quadraticity worst defect {worst_quad:.2e}, \
parallelogram worst {worst_par:.2e}, model-invariance worst {worst_model:.2e} \
(all < 1e-40, precision 50, {elapsed:.1}s)"
    );
}

#[test]
fn criterion_5_torsion_oracle_equivalence() {
    let t0 = Instant::now();
    let mut curves: Vec<Curve> = vec![
        curve_i(0, -1, 0).unwrap(), // y² = x³ − x
        curve_i(0, 0, 1).unwrap(),  // y² = x³ + 1
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    while curves.len() < 20 {
        let a2 = rng.gen_range(-20i64..=20);
        let a4 = rng.gen_range(-20i64..=20);
        let a6 = rng.gen_range(-20i64..=20);
        if let Ok(c) = curve_i(a2, a4, a6) {
            curves.push(c);
        }
    }
    for e in &curves {
        let model = e.integralize().unwrap();
        let fast = nagell_lutz_torsion(&model, &Budget::default()).unwrap();
        let slow = torsion_by_search(e, 100).unwrap();
        assert_eq!(
            fast, slow,
            "torsion mismatch on y² = x³ + {}x² + {}x + {}",
            e.a2, e.a4, e.a6
        );
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed <= 30.0, "took {elapsed:.1}s, limit 30s");
    println!(
        "criterion 5: PASS — divisor-based torsion equals brute-force \
enumeration (|x| <= 100, order <= 12) on 20 integral curves ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_6_group_law_axioms() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..200 {
        let family = ALL_FAMILIES[i % ALL_FAMILIES.len()];
        let inst = random_instance(&mut rng, family);
        let e = &inst.curve;
        let names = inst.point_names();
        let pick = |rng: &mut ChaCha8Rng| {
            let base = inst.point(&names[rng.gen_range(0..names.len())]).unwrap();
            match rng.gen_range(0..4) {
                0 => base.clone(),
                1 => e.negate(base),
                2 => e.double(base),
                _ => Point::Infinity,
            }
        };
        let (p, q, r) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        assert_eq!(e.add(&e.add(&p, &q), &r), e.add(&p, &e.add(&q, &r)));
        assert_eq!(e.add(&p, &q), e.add(&q, &p));
        assert_eq!(e.add(&p, &e.negate(&p)), Point::Infinity);
        assert_eq!(e.add(&p, &Point::Infinity), p);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed <= 10.0, "took {elapsed:.1}s, limit 10s");
    println!(
        "criterion 6: PASS — associativity, commutativity, inverse, and \
identity hold exactly on 200 random point triples ({elapsed:.1}s)"
    );
}

#[test]
fn criterion_7_rank_list_lower_bounds() {
    // Exact ranks 4–6 need descent and are out of scope; for every
    // parameter on the rank-5/6 lists only the lower-bound determinant is
    // recomputed and required to be nonzero.
    let t0 = Instant::now();
    let mut checked = Vec::new();
    let mut check = |family: FamilyId, param: Param, set: &[&str], label: String| {
        let inst = construct(family, param).unwrap();
        let pts: Vec<Point> = set
            .iter()
            .map(|n| inst.point(n).unwrap().clone())
            .collect();
        let rep = regulator(&inst.curve, &pts, 50, "1e-4").unwrap();
        assert!(
            rep.independent(),
            "{label}: det {} not cleared as nonzero",
            rep.det.to_sig_string(15)
        );
        assert_eq!(rep.rank_lower_bound, set.len());
        checked.push(label);
    };

    for a in [4i64, 8, 10, 11] {
        check(
            FamilyId::F1A2C2,
            Param::Alpha(rat(a)),
            &["P", "Q", "R"],
            format!("alpha={a}"),
        );
    }
    for m in [3i64, 5, 6, 7, 8, 10, 11, 12, 13, 14] {
        check(
            FamilyId::F3B2A2,
            Param::M(rat(m)),
            &["P2", "P3", "P4"],
            format!("m={m}"),
        );
    }
    check(
        FamilyId::F2A2B2,
        Param::BigT(rat(2)),
        &["P2", "P3", "P4"],
        "T=2".to_string(),
    );

    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "criterion 7: PASS — exact-rank claims excluded by design; nonzero \
lower-bound determinants recomputed for {} listed parameters ({}) in \
{elapsed:.1}s",
        checked.len(),
        checked.join(", ")
    );
}

/// Shared sanity check backing criteria 3 and 6: the random generators
/// above stay inside exact rational arithmetic.
#[test]
fn randomized_parameters_stay_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let q = random_rational(&mut rng, 12);
        assert!(q.denom().is_positive());
        assert!(q.numer().abs() <= Int::from(12));
    }
    let zero: Rational = Rational::zero();
    assert_eq!(parse_rational("0").unwrap(), zero);
    assert!(parse_rational("7/29").unwrap().to_f64().unwrap() > 0.0);
}
