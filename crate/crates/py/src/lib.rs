//! Python bindings for the curve/height/regulator toolkit.
//!
//! Exposes exact rational curve arithmetic, torsion classification,
//! canonical heights, regulator determinants, the triple-parametrized
//! curve families, and the reference-table reproduction pipeline.
//!
//! Rational values cross the boundary as strings ("a/b" or "n") so no
//! precision is lost; Python ints are accepted wherever a rational or
//! integer is expected.

use std::hash::{DefaultHasher, Hash, Hasher};

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyModule};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use ptcurves_core::factor::Budget;
use ptcurves_core::families::ALL_FAMILIES;
use ptcurves_core::rational::{format_rational, parse_rational};
use ptcurves_core::{
    certify_positive_rank, construct as core_construct, enumerate_ppts, nagell_lutz_torsion,
    point_order, ppt_from_mn, regulator as core_regulator, reproduce as core_reproduce,
    triple_from_t, Curve, FamilyId, FamilyInstance, HeightMachine, Int, OrderVerdict, Param,
    Point, PythTriple, Rational,
};

fn map_err(e: ptcurves_core::Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Accepts a Python int or anything whose `str()` parses as "n" or "a/b".
fn to_rational(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(n) = v.extract::<Int>() {
        return Ok(Rational::from_integer(n));
    }
    let s: String = v.str()?.extract()?;
    parse_rational(&s).map_err(map_err)
}

fn to_int(v: &Bound<'_, PyAny>) -> PyResult<Int> {
    if let Ok(n) = v.extract::<Int>() {
        return Ok(n);
    }
    let s: String = v.str()?.extract()?;
    s.trim()
        .parse::<Int>()
        .map_err(|_| PyValueError::new_err(format!("cannot parse integer from {s:?}")))
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => (*b).into_bound_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_bound_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_bound_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py)
            }
        }
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

/// A point on (or off) a curve: affine with exact rational coordinates,
/// or the identity at infinity.
#[pyclass(name = "Point", frozen, from_py_object)]
#[derive(Clone)]
struct PyPoint {
    inner: Point,
}

#[pymethods]
impl PyPoint {
    #[new]
    fn new(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPoint {
            inner: Point::affine(to_rational(x)?, to_rational(y)?),
        })
    }

    /// The group identity.
    #[staticmethod]
    fn infinity() -> Self {
        PyPoint {
            inner: Point::Infinity,
        }
    }

    /// x-coordinate as an exact rational string, or None at infinity.
    #[getter]
    fn x(&self) -> Option<String> {
        self.inner.xy().map(|(x, _)| format_rational(x))
    }

    /// y-coordinate as an exact rational string, or None at infinity.
    #[getter]
    fn y(&self) -> Option<String> {
        self.inner.xy().map(|(_, y)| format_rational(y))
    }

    fn is_infinity(&self) -> bool {
        self.inner.is_infinity()
    }

    fn __repr__(&self) -> String {
        format!("{}", self.inner)
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .extract::<PyRef<'_, PyPoint>>()
            .is_ok_and(|o| o.inner == self.inner)
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }
}

/// y² = x³ + a2·x² + a4·x + a6 over the rationals; construction rejects
/// singular coefficient choices.
#[pyclass(name = "Curve", frozen, from_py_object)]
#[derive(Clone)]
struct PyCurve {
    inner: Curve,
}

impl PyCurve {
    fn check_on(&self, p: &Point) -> PyResult<()> {
        if self.inner.contains(p) {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!(
                "point {p} is not on the curve"
            )))
        }
    }
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(
        a2: &Bound<'_, PyAny>,
        a4: &Bound<'_, PyAny>,
        a6: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        Curve::new(to_rational(a2)?, to_rational(a4)?, to_rational(a6)?)
            .map(|inner| PyCurve { inner })
            .map_err(map_err)
    }

    #[getter]
    fn a2(&self) -> String {
        format_rational(&self.inner.a2)
    }

    #[getter]
    fn a4(&self) -> String {
        format_rational(&self.inner.a4)
    }

    #[getter]
    fn a6(&self) -> String {
        format_rational(&self.inner.a6)
    }

    fn discriminant(&self) -> String {
        format_rational(&self.inner.discriminant())
    }

    fn contains(&self, p: &PyPoint) -> bool {
        self.inner.contains(&p.inner)
    }

    /// Builds an affine point, verifying the curve equation.
    fn point(&self, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<PyPoint> {
        self.inner
            .point(to_rational(x)?, to_rational(y)?)
            .map(|inner| PyPoint { inner })
            .map_err(map_err)
    }

    fn add(&self, p: &PyPoint, q: &PyPoint) -> PyResult<PyPoint> {
        self.check_on(&p.inner)?;
        self.check_on(&q.inner)?;
        Ok(PyPoint {
            inner: self.inner.add(&p.inner, &q.inner),
        })
    }

    fn sub(&self, p: &PyPoint, q: &PyPoint) -> PyResult<PyPoint> {
        self.check_on(&p.inner)?;
        self.check_on(&q.inner)?;
        Ok(PyPoint {
            inner: self.inner.sub(&p.inner, &q.inner),
        })
    }

    fn negate(&self, p: &PyPoint) -> PyResult<PyPoint> {
        self.check_on(&p.inner)?;
        Ok(PyPoint {
            inner: self.inner.negate(&p.inner),
        })
    }

    fn double(&self, p: &PyPoint) -> PyResult<PyPoint> {
        self.check_on(&p.inner)?;
        Ok(PyPoint {
            inner: self.inner.double(&p.inner),
        })
    }

    /// n·P for any integer n (negative n uses the inverse).
    fn scalar_mul(&self, n: &Bound<'_, PyAny>, p: &PyPoint) -> PyResult<PyPoint> {
        self.check_on(&p.inner)?;
        Ok(PyPoint {
            inner: self.inner.scalar_mul(&to_int(n)?, &p.inner),
        })
    }

    /// Canonical height of a point, as a decimal string with `precision`
    /// significant digits and a verified error bound.
    #[pyo3(signature = (p, precision = 30))]
    fn canonical_height(&self, p: &PyPoint, precision: u32) -> PyResult<String> {
        let machine = HeightMachine::new(&self.inner, precision).map_err(map_err)?;
        let h = machine.height(&p.inner).map_err(map_err)?;
        Ok(h.value.to_sig_string(precision as usize))
    }

    /// Height pairing ⟨P, Q⟩ as a decimal string.
    #[pyo3(signature = (p, q, precision = 30))]
    fn height_pairing(&self, p: &PyPoint, q: &PyPoint, precision: u32) -> PyResult<String> {
        let machine = HeightMachine::new(&self.inner, precision).map_err(map_err)?;
        let v = ptcurves_core::height_pairing(&machine, &p.inner, &q.inner).map_err(map_err)?;
        Ok(v.to_sig_string(precision as usize))
    }

    /// Order of a point in the group: an int for torsion points, None
    /// for points of infinite order.
    fn point_order(&self, p: &PyPoint) -> PyResult<Option<u32>> {
        match point_order(&self.inner, &p.inner).map_err(map_err)? {
            OrderVerdict::Finite(n) => Ok(Some(n)),
            OrderVerdict::Infinite(_) => Ok(None),
        }
    }

    /// All torsion points, computed on an integral model by the
    /// integrality/divisibility sieve and mapped back to this curve.
    fn torsion_points(&self) -> PyResult<Vec<PyPoint>> {
        let model = self.inner.integralize().map_err(map_err)?;
        let pts = nagell_lutz_torsion(&model, &Budget::default()).map_err(map_err)?;
        pts.into_iter()
            .map(|p| {
                model
                    .unmap_point(&p)
                    .map(|inner| PyPoint { inner })
                    .map_err(map_err)
            })
            .collect()
    }

    /// Gram determinant of the height pairing on the given points, with
    /// an independence verdict. Returns a dict with keys det, gram,
    /// precision, epsilon, independent, verdict, rank_lower_bound.
    #[pyo3(signature = (points, precision = 30, epsilon = "1e-6"))]
    fn regulator(
        &self,
        py: Python<'_>,
        points: Vec<PyPoint>,
        precision: u32,
        epsilon: &str,
    ) -> PyResult<Py<PyAny>> {
        let pts: Vec<Point> = points.into_iter().map(|p| p.inner).collect();
        let report = core_regulator(&self.inner, &pts, precision, epsilon).map_err(map_err)?;
        Ok(json_to_py(py, &report.to_json())?.unbind())
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(json_to_py(py, &self.inner.to_json())?.unbind())
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(a2={}, a4={}, a6={})",
            self.a2(),
            self.a4(),
            self.a6()
        )
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .extract::<PyRef<'_, PyCurve>>()
            .is_ok_and(|o| o.inner == self.inner)
    }
}

/// A positive integer right-triangle triple a² + b² = c².
#[pyclass(name = "Triple", frozen, from_py_object)]
#[derive(Clone)]
struct PyTriple {
    inner: PythTriple,
}

#[pymethods]
impl PyTriple {
    #[new]
    fn new(
        a: &Bound<'_, PyAny>,
        b: &Bound<'_, PyAny>,
        c: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        PythTriple::new(to_int(a)?, to_int(b)?, to_int(c)?)
            .map(|inner| PyTriple { inner })
            .map_err(map_err)
    }

    /// The primitive triple (m²−n², 2mn, m²+n²) for coprime m > n > 0 of
    /// opposite parity, legs ordered smallest first.
    #[staticmethod]
    fn from_generators(m: &Bound<'_, PyAny>, n: &Bound<'_, PyAny>) -> PyResult<Self> {
        ppt_from_mn(&to_int(m)?, &to_int(n)?)
            .map(|inner| PyTriple { inner })
            .map_err(map_err)
    }

    #[getter]
    fn a(&self) -> Int {
        self.inner.a.clone()
    }

    #[getter]
    fn b(&self) -> Int {
        self.inner.b.clone()
    }

    #[getter]
    fn c(&self) -> Int {
        self.inner.c.clone()
    }

    fn is_primitive(&self) -> bool {
        self.inner.is_primitive()
    }

    fn __repr__(&self) -> String {
        format!("Triple{}", self.inner)
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .extract::<PyRef<'_, PyTriple>>()
            .is_ok_and(|o| o.inner == self.inner)
    }
}

/// A constructed family member: curve plus its catalogued points.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: FamilyInstance,
}

#[pymethods]
impl PyInstance {
    #[getter]
    fn family(&self) -> String {
        self.inner.family.name().to_string()
    }

    /// The parameter binding, e.g. "alpha=2" or "triple=(3, 4, 5)".
    #[getter]
    fn param(&self) -> String {
        format!("{}", self.inner.param)
    }

    #[getter]
    fn curve(&self) -> PyCurve {
        PyCurve {
            inner: self.inner.curve.clone(),
        }
    }

    fn point_names(&self) -> Vec<String> {
        self.inner
            .point_names()
            .into_iter()
            .map(String::from)
            .collect()
    }

    fn point(&self, name: &str) -> PyResult<PyPoint> {
        self.inner
            .point(name)
            .map(|p| PyPoint { inner: p.clone() })
            .ok_or_else(|| PyKeyError::new_err(format!("no catalogued point named {name:?}")))
    }

    /// All catalogued points as a name → Point dict, in catalog order.
    fn points<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let dict = PyDict::new(py);
        for (name, p) in &self.inner.points {
            dict.set_item(name, PyPoint { inner: p.clone() })?;
        }
        Ok(dict)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(json_to_py(py, &self.inner.to_json())?.unbind())
    }

    fn __repr__(&self) -> String {
        format!("Instance({}, {})", self.family(), self.param())
    }
}

fn extract_triple(v: &Bound<'_, PyAny>) -> PyResult<PythTriple> {
    if let Ok(t) = v.extract::<PyTriple>() {
        return Ok(t.inner);
    }
    let items: Vec<Bound<'_, PyAny>> = v.extract()?;
    if items.len() != 3 {
        return Err(PyValueError::new_err(
            "triple must have exactly three entries",
        ));
    }
    PythTriple::new(to_int(&items[0])?, to_int(&items[1])?, to_int(&items[2])?).map_err(map_err)
}

/// Builds a family member. `family` is a name like "F1_a2c2" (the "F1"
/// prefix alone also works); pass exactly one of the keyword parameters.
#[pyfunction]
#[pyo3(signature = (family, *, t = None, alpha = None, T = None, m = None, u = None, triple = None))]
#[allow(non_snake_case)]
fn construct(
    family: &str,
    t: Option<&Bound<'_, PyAny>>,
    alpha: Option<&Bound<'_, PyAny>>,
    T: Option<&Bound<'_, PyAny>>,
    m: Option<&Bound<'_, PyAny>>,
    u: Option<&Bound<'_, PyAny>>,
    triple: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyInstance> {
    let fam = FamilyId::parse(family).map_err(map_err)?;
    let mut chosen: Vec<Param> = Vec::new();
    if let Some(v) = t {
        chosen.push(Param::T(to_rational(v)?));
    }
    if let Some(v) = alpha {
        chosen.push(Param::Alpha(to_rational(v)?));
    }
    if let Some(v) = T {
        chosen.push(Param::BigT(to_rational(v)?));
    }
    if let Some(v) = m {
        chosen.push(Param::M(to_rational(v)?));
    }
    if let Some(v) = u {
        chosen.push(Param::U(to_rational(v)?));
    }
    if let Some(v) = triple {
        chosen.push(Param::Triple(extract_triple(v)?));
    }
    let [param] = <[Param; 1]>::try_from(chosen).map_err(|_| {
        PyValueError::new_err("provide exactly one of t, alpha, T, m, u, triple")
    })?;
    core_construct(fam, param)
        .map(|inner| PyInstance { inner })
        .map_err(map_err)
}

/// Certifies that the family member for a primitive triple has a point
/// of infinite order. Returns a dict with keys family, triple, witness,
/// verdict, and certificate.
#[pyfunction]
fn certify(py: Python<'_>, family: &str, triple: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let fam = FamilyId::parse(family).map_err(map_err)?;
    let t = extract_triple(triple)?;
    let cert = certify_positive_rank(fam, &t).map_err(map_err)?;
    Ok(json_to_py(py, &cert.to_json())?.unbind())
}

/// All primitive triples with hypotenuse at most `limit`, ordered by
/// hypotenuse then smaller leg.
#[pyfunction]
fn enumerate_triples(limit: &Bound<'_, PyAny>) -> PyResult<Vec<PyTriple>> {
    Ok(enumerate_ppts(&to_int(limit)?)
        .map_err(map_err)?
        .into_iter()
        .map(|inner| PyTriple { inner })
        .collect())
}

/// The rational triple (t²−1, 2t, t²+1) for a rational parameter t,
/// as a dict of exact rational strings {a, b, c, t}.
#[pyfunction]
fn triple_from_parameter(py: Python<'_>, t: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let rt = triple_from_t(&to_rational(t)?).map_err(map_err)?;
    let dict = PyDict::new(py);
    dict.set_item("a", format_rational(&rt.a))?;
    dict.set_item("b", format_rational(&rt.b))?;
    dict.set_item("c", format_rational(&rt.c))?;
    dict.set_item("t", format_rational(&rt.t))?;
    Ok(dict.into_any().unbind())
}

/// Recomputes every tabulated regulator determinant and compares against
/// the recorded values. Returns a dict with keys calibration, all_ok,
/// and rows.
#[pyfunction]
#[pyo3(signature = (precision = 30))]
fn reproduce_table(py: Python<'_>, precision: u32) -> PyResult<Py<PyAny>> {
    let table = core_reproduce(precision).map_err(map_err)?;
    Ok(json_to_py(py, &table.to_json())?.unbind())
}

/// The same comparison as `reproduce_table`, rendered as CSV.
#[pyfunction]
#[pyo3(signature = (precision = 30))]
fn reproduce_csv(precision: u32) -> PyResult<String> {
    Ok(core_reproduce(precision).map_err(map_err)?.to_csv())
}

#[pymodule]
fn ptcurves_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoint>()?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyTriple>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_triples, m)?)?;
    m.add_function(wrap_pyfunction!(triple_from_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_table, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_csv, m)?)?;
    let names: Vec<&str> = ALL_FAMILIES.iter().map(|f| f.name()).collect();
    m.add("FAMILIES", names)?;
    Ok(())
}
