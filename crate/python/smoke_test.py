#!/usr/bin/env python3
"""Smoke test for the ptcurves_py extension module.

Expects the extension to have been built first:

    cargo build -p ptcurves-py --release

Copies the most recently built shared library into a temp directory
under the importable name, imports it, and exercises the API surface
against known-good values.
"""

import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def locate_library() -> pathlib.Path:
    candidates = []
    for profile in ("release", "debug"):
        for name in ("libptcurves_py.so", "ptcurves_py.so", "libptcurves_py.dylib"):
            p = ROOT / "target" / profile / name
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit(
            "extension library not found; run: cargo build -p ptcurves-py --release"
        )
    return max(candidates, key=lambda p: p.stat().st_mtime)


lib = locate_library()
tmp = tempfile.mkdtemp(prefix="ptcurves_py_")
shutil.copy2(lib, pathlib.Path(tmp) / "ptcurves_py.so")
sys.path.insert(0, tmp)

import ptcurves_py as pt  # noqa: E402

CHECKS = 0


def ok(label: str, cond: bool) -> None:
    global CHECKS
    if not cond:
        sys.exit(f"FAIL {label}")
    CHECKS += 1
    print(f"PASS {label}")


def raises(label: str, exc, fn) -> None:
    try:
        fn()
    except exc:
        ok(label, True)
        return
    sys.exit(f"FAIL {label}: expected {exc.__name__}")


# --- group law on y^2 = x^3 - x -------------------------------------------
e = pt.Curve(0, -1, 0)
ok("discriminant is nonzero", e.discriminant() == "4")
p0 = e.point(0, 0)
p1 = e.point(1, 0)
ok("contains accepts a curve point", e.contains(p0))
ok("2-torsion points double to infinity", e.double(p0).is_infinity())
ok("sum of two 2-torsion points", e.add(p0, p1) == pt.Point(-1, 0))
ok("negation fixes y=0 points", e.negate(p1) == p1)
ok("scalar multiple reduces mod order", e.scalar_mul(7, p0) == p0)
ok("torsion subgroup has order 4", len(e.torsion_points()) == 4)
ok("2-torsion point has order 2", e.point_order(p0) == 2)

# --- torsion and infinite order -------------------------------------------
e6 = pt.Curve(0, 0, 1)
ok("(2, 3) has order 6 on y^2 = x^3 + 1", e6.point_order(e6.point(2, 3)) == 6)
e9 = pt.Curve(0, -9, 25)
q = e9.point("25/9", "125/27")
ok("rational point of infinite order", e9.point_order(q) is None)

# --- canonical heights -----------------------------------------------------
c = pt.Curve(0, -225, 64)
g = c.point(0, 8)
h1 = c.canonical_height(g, 30)
ok("canonical height matches frozen value", h1.startswith("2.71633628988507177"))
h2 = c.canonical_height(c.double(g), 30)
ok(
    "height is quadratic under doubling",
    abs(float(h2) - 4.0 * float(h1)) < 1e-12,
)
ok("pairing of a point with itself", float(c.height_pairing(g, g, 30)) > 0)

# --- regulator -------------------------------------------------------------
rep = c.regulator([g, c.point(15, 8)], precision=30)
ok("two independent points", rep["independent"] and rep["rank_lower_bound"] == 2)
ok("regulator determinant frozen value", rep["det"].startswith("5.51652821732804"))
ok("gram matrix is 2x2", len(rep["gram"]) == 2 and len(rep["gram"][0]) == 2)

# --- triples ---------------------------------------------------------------
t345 = pt.Triple(3, 4, 5)
ok("triple validates", t345.is_primitive() and t345.c == 5)
ok("generator formula", pt.Triple.from_generators(2, 1) == t345)
ppts = pt.enumerate_triples(30)
ok("five primitive triples up to c=30", len(ppts) == 5 and ppts[0] == t345)
rt = pt.triple_from_parameter("7/29")
ok("rational triple at t=7/29", rt["c"] == "890/841" and rt["b"] == "14/29")

# --- families --------------------------------------------------------------
inst = pt.construct("F1", alpha=2)
ok("alpha-family coefficient", inst.curve.a4 == "-3025/4096")
ok("alpha-family catalog", inst.point_names() == ["P", "Q", "R"])
ok(
    "catalogued points lie on the curve",
    all(inst.curve.contains(p) for p in inst.points().values()),
)
frey = pt.construct("F6_frey_ac", triple=t345)
ok("triple-family curve", frey.curve.a2 == "16" and frey.curve.a4 == "-225")
ok("triple-family witness x", frey.point("P1").x == "225/16")
ok("triple accepted as plain tuple", pt.construct("F6", triple=(3, 4, 5)).curve.a2 == "16")

cert = pt.certify("F1", t345)
ok("positivity certificate", cert["verdict"] == "infinite" and "certificate" in cert)

# --- reproduction table ----------------------------------------------------
table = pt.reproduce_table(precision=30)
ok("reproduction table is green", table["all_ok"] is True)
ok("reproduction table has nine rows", len(table["rows"]) == 9)
ok("calibration factor is one", table["calibration"] == "1")
csv = pt.reproduce_csv(precision=30)
ok(
    "reproduction CSV header",
    csv.splitlines()[0] == "section,instance,points,claimed,computed,rel_err,match",
)

# --- error handling --------------------------------------------------------
raises("singular curve rejected", ValueError, lambda: pt.Curve(0, 0, 0))
raises("off-curve point rejected", ValueError, lambda: e.point(1, 1))
raises(
    "ambiguous parameters rejected",
    ValueError,
    lambda: pt.construct("F1", alpha=2, m=3),
)
raises("degenerate parameter rejected", ValueError, lambda: pt.construct("F1", alpha=1))
raises("non-Pythagorean triple rejected", ValueError, lambda: pt.Triple(1, 2, 3))

print(f"ALL SMOKE TESTS PASSED ({CHECKS} checks)")
