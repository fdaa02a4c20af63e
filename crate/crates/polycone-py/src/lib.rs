//! Python bindings: a thin layer over the core library exposing the
//! polynomial model, the invariant pairing, the developing map, and the
//! n = 2 inverse parametrizations.  Complex values cross the boundary as
//! Python `complex`; points of the projective line as `float | None`
//! (`None` is the point at infinity).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polycone::devmap::{self, N2Params};
use polycone::higgsflat::{flatness_residual, HiggsData, UHPoint};
use polycone::hpoly::{sphere_roots, Basis, HPoly, RP1Point};
use polycone::kset::{default_k_tolerance, in_k};
use polycone::qform::{
    certify_transverse, default_lambda, q_lambda, transversality_margin, Lambda,
};
use polycone::slrep::{act, SL2R};
use polycone::stiefel::{sample_cone_prime, Field};

fn err(e: polycone::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_basis(name: &str) -> PyResult<Basis> {
    match name.to_ascii_lowercase().as_str() {
        "xy" => Ok(Basis::XY),
        "zw" => Ok(Basis::ZW),
        _ => Err(PyValueError::new_err(format!(
            "unknown basis {name:?}; expected \"xy\" or \"zw\""
        ))),
    }
}

fn parse_field(name: &str) -> PyResult<Field> {
    match name.to_ascii_lowercase().as_str() {
        "r" => Ok(Field::R),
        "c" => Ok(Field::C),
        _ => Err(PyValueError::new_err(format!(
            "unknown field {name:?}; expected \"r\" or \"c\""
        ))),
    }
}

fn lambda_from(n: usize, weights: Option<Vec<f64>>) -> PyResult<Lambda> {
    match weights {
        None => Ok(default_lambda(n)),
        Some(w) => {
            let lam = Lambda::new(w).map_err(err)?;
            if lam.n() != n {
                return Err(PyValueError::new_err(format!(
                    "{} weights given, the polynomial needs {n}",
                    lam.weights().len()
                )));
            }
            Ok(lam)
        }
    }
}

/// A homogeneous polynomial of odd degree `2n - 1` in two variables,
/// stored by its coefficient vector in either the plain (`xy`) or the
/// rotated (`zw`) coordinate pair.
#[pyclass]
struct Poly {
    inner: HPoly,
}

#[pymethods]
impl Poly {
    #[new]
    #[pyo3(signature = (n, coeffs, basis = "zw"))]
    fn new(n: usize, coeffs: Vec<Complex64>, basis: &str) -> PyResult<Self> {
        let b = parse_basis(basis)?;
        Ok(Self {
            inner: HPoly::new(n, b, coeffs).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// Coefficient vector in the requested basis, highest power of the
    /// first variable first.
    #[pyo3(signature = (basis = "zw"))]
    fn coeffs(&self, basis: &str) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.coeffs_in(parse_basis(basis)?))
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn evaluate(&self, u: Complex64, v: Complex64) -> Complex64 {
        self.inner.evaluate(u, v)
    }

    /// All `2n - 1` roots on the Riemann sphere; `None` is infinity.
    fn sphere_roots(&self) -> PyResult<Vec<Option<Complex64>>> {
        sphere_roots(&self.inner).map_err(err)
    }

    /// Membership test against the high-multiplicity set: returns
    /// `(member, max_real_multiplicity, ambiguous)`.  `ambiguous` is set
    /// when the verdict flips under a tenfold tolerance change.
    #[pyo3(signature = (tol_cluster = None, tol_real = None))]
    fn in_k(
        &self,
        tol_cluster: Option<f64>,
        tol_real: Option<f64>,
    ) -> PyResult<(bool, usize, bool)> {
        let d = default_k_tolerance(self.inner.n());
        let rep = in_k(&self.inner, tol_cluster.unwrap_or(d), tol_real.unwrap_or(d))
            .map_err(err)?;
        Ok((rep.member, rep.mult, rep.ambiguous))
    }

    fn __repr__(&self) -> String {
        format!("Poly(n={}, degree={})", self.inner.n(), self.inner.degree())
    }
}

/// The canonical pairing weights for degree `2n - 1`.
#[pyfunction]
fn default_weights(n: usize) -> Vec<f64> {
    default_lambda(n).weights().to_vec()
}

/// The invariant bilinear pairing of two polynomials in the rotated
/// coordinates; canonical weights unless overridden.
#[pyfunction]
#[pyo3(signature = (p, q, weights = None))]
fn pairing(p: &Poly, q: &Poly, weights: Option<Vec<f64>>) -> PyResult<Complex64> {
    let lam = lambda_from(p.inner.n(), weights)?;
    q_lambda(&lam, &p.inner, &q.inner).map_err(err)
}

/// Transversality margin of a single polynomial at unit scale; positive
/// values certify that its orbit leaves the cone's tangent space.
#[pyfunction]
#[pyo3(signature = (p, weights = None))]
fn margin(p: &Poly, weights: Option<Vec<f64>>) -> PyResult<f64> {
    let lam = lambda_from(p.inner.n(), weights)?;
    transversality_margin(&lam, &p.inner).map_err(err)
}

/// Randomized certification of the margin over `samples` unit draws with
/// canonical weights; returns `(pass, min_margin)` and additionally runs
/// the exact rational inequalities.
#[pyfunction]
#[pyo3(signature = (n, samples, seed = 0))]
fn certify_margin(n: usize, samples: usize, seed: u64) -> PyResult<(bool, f64)> {
    let rep = certify_transverse(&default_lambda(n), samples, seed).map_err(err)?;
    Ok((rep.pass, rep.min_margin))
}

/// The scale-aware default tolerance for membership verdicts.
#[pyfunction]
fn k_tolerance(n: usize) -> f64 {
    default_k_tolerance(n)
}

/// Random fiber coordinates on the cone over the requested scalar field,
/// as lists of `2n` complex structure constants.
#[pyfunction]
#[pyo3(signature = (n, count, field = "c", seed = 0))]
fn sample_cone(n: usize, count: usize, field: &str, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    sample_cone_prime(n, parse_field(field)?, count, seed).map_err(err)
}

/// Develops fiber coordinates `t` (length `2n`, on the cone) at the
/// half-plane point `x + iy` into a degree `2n - 1` polynomial.
#[pyfunction]
fn develop(x: f64, y: f64, t: Vec<Complex64>) -> PyResult<Poly> {
    if t.len() < 2 || t.len() % 2 != 0 {
        return Err(PyValueError::new_err(format!(
            "fiber coordinates need even length at least 2, got {}",
            t.len()
        )));
    }
    let n = t.len() / 2;
    let z = UHPoint::new(x, y).map_err(err)?;
    Ok(Poly {
        inner: devmap::developing(&z, &t, n).map_err(err)?,
    })
}

/// The defect of the rank-`2n` flat-connection identity at `x + iy`.
#[pyfunction]
fn hitchin_residual(n: usize, x: f64, y: f64) -> PyResult<f64> {
    let data = HiggsData::new(n).map_err(err)?;
    let z = UHPoint::new(x, y).map_err(err)?;
    Ok(polycone::higgsflat::hitchin_residual(&data, &z))
}

/// Distance from the identity of the holonomy around the circle of the
/// given radius centred at `x + iy`.
#[pyfunction]
#[pyo3(signature = (n, x, y, radius, steps = 512))]
fn holonomy_defect(n: usize, x: f64, y: f64, radius: f64, steps: usize) -> PyResult<f64> {
    let data = HiggsData::new(n).map_err(err)?;
    let z = UHPoint::new(x, y).map_err(err)?;
    flatness_residual(&data, &z, radius, steps).map_err(err)
}

/// Acts on a polynomial by the determinant-one matrix `[[a, b], [c, d]]`
/// through the degree `2n - 1` representation.
#[pyfunction]
fn mobius_act(a: f64, b: f64, c: f64, d: f64, p: &Poly) -> PyResult<Poly> {
    let g = SL2R::from_rows(a, b, c, d).map_err(err)?;
    Ok(Poly {
        inner: act(&g, &p.inner),
    })
}

fn to_rp1(x: Option<f64>) -> RP1Point {
    match x {
        Some(v) => RP1Point::from_real(v),
        None => RP1Point::infinity(),
    }
}

/// The three real roots (`None` = infinity) cut out by the first
/// parameter chart at `(theta_prime, r, phi)`.
#[pyfunction]
fn n2_forward(theta_prime: f64, r: f64, phi: f64) -> PyResult<Vec<Option<f64>>> {
    let p = N2Params::new(theta_prime, r, phi).map_err(err)?;
    Ok(devmap::n2_forward(&p).iter().map(|q| q.to_real()).collect())
}

/// Inverts the first chart: recovers `(theta_prime, r, phi)` from the
/// three roots (`None` = infinity).
#[pyfunction]
fn n2_inverse(roots: Vec<Option<f64>>) -> PyResult<(f64, f64, f64)> {
    if roots.len() != 3 {
        return Err(PyValueError::new_err(format!(
            "the chart has exactly 3 roots, got {}",
            roots.len()
        )));
    }
    let arr = [to_rp1(roots[0]), to_rp1(roots[1]), to_rp1(roots[2])];
    let p = devmap::n2_inverse(&arr).map_err(err)?;
    Ok((p.theta_prime, p.r, p.phi))
}

#[pymodule(name = "polycone")]
fn polycone_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Poly>()?;
    m.add_function(wrap_pyfunction!(default_weights, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(margin, m)?)?;
    m.add_function(wrap_pyfunction!(certify_margin, m)?)?;
    m.add_function(wrap_pyfunction!(k_tolerance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cone, m)?)?;
    m.add_function(wrap_pyfunction!(develop, m)?)?;
    m.add_function(wrap_pyfunction!(hitchin_residual, m)?)?;
    m.add_function(wrap_pyfunction!(holonomy_defect, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_act, m)?)?;
    m.add_function(wrap_pyfunction!(n2_forward, m)?)?;
    m.add_function(wrap_pyfunction!(n2_inverse, m)?)?;
    Ok(())
}
