//! A flat connection on a rank-2n bundle over the upper half-plane.
//!
//! The bundle splits into line bundles with metric weights
//! `h(z)^{m_k}`, `m_k = 2k - 2n - 1`, `h = 1/(sqrt(2) y)`; a constant
//! subdiagonal field with entries `r_i = sqrt(i(2n-i)/2)` solves the
//! self-duality equation for this metric, and the resulting connection
//! `d + A_z dz + A_zbar dzbar` is flat.  The module evaluates the
//! connection matrices, integrates parallel transport, measures flatness
//! and self-duality residuals, implements the real structure, and tests
//! transversality of the tautological section through an explicit
//! Jacobian whose positivity certifies it.

use crate::stiefel::{tau0, Field};
use crate::{C64, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;

/// A point `x + i y` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UHPoint {
    x: f64,
    y: f64,
}

impl UHPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Invalid(format!(
                "point ({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_z(z: C64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> C64 {
        C64::new(self.x, self.y)
    }
}

/// The conformal factor `h(z) = 1/(sqrt(2) y)`.
pub fn h_val(z: &UHPoint) -> f64 {
    1.0 / (2f64.sqrt() * z.y)
}

/// Structure constants of the rank-2n bundle.
#[derive(Debug, Clone)]
pub struct HiggsData {
    n: usize,
}

impl HiggsData {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        2 * self.n
    }

    /// Metric exponents `m_k = 2k - 2n - 1` for `k = 1..2n`.
    pub fn m_exponents(&self) -> Vec<i64> {
        (1..=2 * self.n as i64)
            .map(|k| 2 * k - 2 * self.n as i64 - 1)
            .collect()
    }

    /// Line weights `a_k = (2n + 1 - 2k)/2 = -m_k/2`.
    pub fn weight(&self, k: usize) -> f64 {
        (2.0 * self.n as f64 + 1.0 - 2.0 * k as f64) / 2.0
    }

    /// Subdiagonal entries `r_i = sqrt(i(2n-i)/2)`, with `r_0 = r_2n = 0`.
    pub fn r(&self, i: usize) -> f64 {
        if i == 0 || i >= 2 * self.n {
            0.0
        } else {
            ((i as f64) * (2.0 * self.n as f64 - i as f64) / 2.0).sqrt()
        }
    }

    /// The constant field: lower subdiagonal `phi[(i, i-1)] = r_i`.
    pub fn phi_matrix(&self) -> DMatrix<C64> {
        let d = self.rank();
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for i in 1..d {
            m[(i, i - 1)] = C64::new(self.r(i), 0.0);
        }
        m
    }

    /// The anti-diagonal pairing matrix of ones.
    pub fn q_matrix(&self) -> DMatrix<f64> {
        let d = self.rank();
        DMatrix::from_fn(d, d, |i, j| if i + j == d - 1 { 1.0 } else { 0.0 })
    }
}

/// Connection matrices at a base point: `nabla = d + az dz + azbar dzbar`.
#[derive(Debug, Clone)]
pub struct ConnSample {
    pub az: DMatrix<C64>,
    pub azbar: DMatrix<C64>,
    pub at: UHPoint,
}

/// Evaluates the connection: `az` is the metric term
/// `diag(m_k d_z log h) = diag(m_k i/(2y))` plus the constant subdiagonal
/// field; `azbar` is the metric adjoint of the field, the superdiagonal
/// `r_k h^2`.
pub fn conn_matrices(data: &HiggsData, z: &UHPoint) -> ConnSample {
    let d = data.rank();
    let h2 = h_val(z) * h_val(z);
    let dlog = C64::new(0.0, 1.0 / (2.0 * z.y));
    let mut az = data.phi_matrix();
    let mut azbar = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for (k, m) in data.m_exponents().iter().enumerate() {
        az[(k, k)] = dlog * (*m as f64);
    }
    for i in 1..d {
        azbar[(i - 1, i)] = C64::new(data.r(i) * h2, 0.0);
    }
    ConnSample {
        az,
        azbar,
        at: *z,
    }
}

fn mat_max_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// Derivative of the transported coordinate vector along a path:
/// parallel sections satisfy `s' + (az z' + azbar conj(z')) s = 0`.
fn transport_rhs(data: &HiggsData, z: C64, dz: C64) -> Result<DMatrix<C64>> {
    let at = UHPoint::from_z(z)?;
    let conn = conn_matrices(data, &at);
    Ok(-(conn.az * dz + conn.azbar * dz.conj()))
}

fn rk4_step(
    data: &HiggsData,
    z0: C64,
    dz: C64,
    s: f64,
    h: f64,
    u: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let f = |sigma: f64, m: &DMatrix<C64>| -> Result<DMatrix<C64>> {
        Ok(transport_rhs(data, z0 + dz * sigma, dz)? * m * C64::new(h, 0.0))
    };
    let k1 = f(s, u)?;
    let k2 = f(s + 0.5 * h, &(u + &k1 * C64::new(0.5, 0.0)))?;
    let k3 = f(s + 0.5 * h, &(u + &k2 * C64::new(0.5, 0.0)))?;
    let k4 = f(s + h, &(u + &k3))?;
    Ok(u + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
        * C64::new(1.0 / 6.0, 0.0))
}

/// Fourth-order transport along the straight segment `from -> to`, with
/// step-doubling control targeting local error `1e-10` (the connection
/// grows like `1/y^2`, so fixed steps degrade near the boundary);
/// `steps` sets the initial subdivision.
pub fn transport_segment(
    data: &HiggsData,
    from: &UHPoint,
    to: &UHPoint,
    steps: usize,
) -> Result<DMatrix<C64>> {
    if steps == 0 {
        return Err(Error::Invalid("steps must be positive".into()));
    }
    let d = data.rank();
    let mut u = DMatrix::from_diagonal_element(d, d, C64::new(1.0, 0.0));
    let z0 = from.z();
    let dz = to.z() - z0;
    let mut s = 0.0f64;
    let mut h = 1.0 / steps as f64;
    let min_h = 1e-7;
    while 1.0 - s > 1e-14 {
        h = h.min(1.0 - s);
        let full = rk4_step(data, z0, dz, s, h, &u)?;
        let half = rk4_step(data, z0, dz, s, 0.5 * h, &u)?;
        let fine = rk4_step(data, z0, dz, s + 0.5 * h, 0.5 * h, &half)?;
        let scale = fine.iter().map(|a| a.norm()).fold(1.0, f64::max);
        let err = (&full - &fine).iter().map(|a| a.norm()).fold(0.0, f64::max) / scale;
        if err > 1e-10 && h > min_h {
            h *= 0.5;
            continue;
        }
        u = fine;
        s += h;
        if err < 1e-12 {
            h *= 2.0;
        }
    }
    Ok(u)
}

/// Transport along a polygonal path through the listed points.
pub fn transport_path(
    data: &HiggsData,
    points: &[UHPoint],
    steps_per_segment: usize,
) -> Result<DMatrix<C64>> {
    if points.len() < 2 {
        return Err(Error::Invalid("path needs at least two points".into()));
    }
    let d = data.rank();
    let mut u = DMatrix::from_diagonal_element(d, d, C64::new(1.0, 0.0));
    for w in points.windows(2) {
        u = transport_segment(data, &w[0], &w[1], steps_per_segment)? * u;
    }
    Ok(u)
}

/// Holonomy defect around the circle of the given radius about `z`:
/// `max |Hol - Id|`.  The loop must stay inside the half-plane.
pub fn flatness_residual(
    data: &HiggsData,
    z: &UHPoint,
    radius: f64,
    steps: usize,
) -> Result<f64> {
    if !radius.is_finite() || radius < 0.0 || radius >= z.y {
        return Err(Error::Invalid(format!(
            "loop of radius {radius} around y = {} leaves the half-plane",
            z.y
        )));
    }
    let d = data.rank();
    let mut u = DMatrix::from_diagonal_element(d, d, C64::new(1.0, 0.0));
    if radius == 0.0 {
        return Ok(0.0);
    }
    let steps = steps.max(8);
    let h = 2.0 * std::f64::consts::PI / steps as f64;
    let center = z.z();
    for i in 0..steps {
        let th = i as f64 * h;
        let f = |theta: f64, m: &DMatrix<C64>| -> Result<DMatrix<C64>> {
            let pos = center + C64::from_polar(radius, theta);
            let vel = C64::new(0.0, radius) * C64::from_polar(1.0, theta);
            Ok(transport_rhs(data, pos, vel)? * m * C64::new(h, 0.0))
        };
        let k1 = f(th, &u)?;
        let k2 = f(th + 0.5 * h, &(&u + &k1 * C64::new(0.5, 0.0)))?;
        let k3 = f(th + 0.5 * h, &(&u + &k2 * C64::new(0.5, 0.0)))?;
        let k4 = f(th + h, &(&u + &k3))?;
        u += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
            * C64::new(1.0 / 6.0, 0.0);
    }
    let id = DMatrix::from_diagonal_element(d, d, C64::new(1.0, 0.0));
    Ok(mat_max_norm(&(u - id)))
}

fn hitchin_residual_for_exponents(n: usize, exponents: &[i64], z: &UHPoint) -> f64 {
    let data = HiggsData { n };
    let d = 2 * n;
    let h2 = h_val(z) * h_val(z);
    // Curvature of the metric connection: diag(m_k / (4 y^2)).
    let curv: Vec<f64> = exponents
        .iter()
        .map(|&m| m as f64 / (4.0 * z.y * z.y))
        .collect();
    // Bracket of the field with its metric adjoint is diagonal with
    // entries (r_{k-1}^2 - r_k^2) h^2.
    let mut worst = 0.0f64;
    for k in 1..=d {
        let bracket = (data.r(k - 1).powi(2) - data.r(k).powi(2)) * h2;
        worst = worst.max((curv[k - 1] - bracket).abs());
    }
    worst
}

/// Residual of the self-duality equation: the metric curvature must equal
/// the bracket of the field with its metric adjoint, entrywise.
pub fn hitchin_residual(data: &HiggsData, z: &UHPoint) -> f64 {
    hitchin_residual_for_exponents(data.n, &data.m_exponents(), z)
}

/// Same residual with caller-supplied metric exponents; a deliberately
/// wrong exponent must produce a residual bounded away from zero.
pub fn hitchin_residual_custom(n: usize, exponents: &[i64], z: &UHPoint) -> Result<f64> {
    if exponents.len() != 2 * n {
        return Err(Error::BadLength {
            got: exponents.len(),
            expected: 2 * n,
        });
    }
    Ok(hitchin_residual_for_exponents(n, exponents, z))
}

/// The real structure: `tau(s)_k = h^{2n+1-2k} conj(s_{2n+1-k})`
/// (1-based), an anti-linear involution of the fiber.
pub fn real_structure_tau(data: &HiggsData, z: &UHPoint, s: &[C64]) -> Result<Vec<C64>> {
    let d = data.rank();
    if s.len() != d {
        return Err(Error::BadLength {
            got: s.len(),
            expected: d,
        });
    }
    let h = h_val(z);
    Ok((1..=d)
        .map(|k| s[d - k].conj() * h.powi((2 * data.n as i64 + 1 - 2 * k as i64) as i32))
        .collect())
}

/// Exact verification of the subdiagonal concavity inequality
/// `2 r_{2i-1} > r_{2i} + r_{2i-2}` for `i = 1..n`, through the identity
/// `4 r_{2i-1}^2 - 2(r_{2i}^2 + r_{2i-2}^2) = 2` in exact rationals; the
/// square-mean bound `(x+y)^2 <= 2(x^2+y^2)` then gives
/// `4 r_{2i-1}^2 - (r_{2i} + r_{2i-2})^2 >= 2` without any square roots.
pub fn subdiagonal_concavity_exact(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let r_sq = |j: i64| -> BigRational {
        if j <= 0 || j >= 2 * n as i64 {
            return BigRational::from_integer(BigInt::from(0));
        }
        BigRational::new(BigInt::from(j * (2 * n as i64 - j)), BigInt::from(2))
    };
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    for i in 1..=n as i64 {
        let lhs = four.clone() * r_sq(2 * i - 1)
            - two.clone() * (r_sq(2 * i) + r_sq(2 * i - 2));
        if lhs != two {
            return Err(Error::Invalid(format!(
                "concavity identity failed at n={n}, i={i}"
            )));
        }
    }
    Ok(())
}

/// The rank-2 parallel sections: in the holomorphic frame,
/// `s_{a,b}(z) = ((a zbar + b) e^{-i pi/4} h, (a z + b) e^{i pi/4})`.
pub fn parallel_section_n1(z: &UHPoint, a: C64, b: C64) -> Vec<C64> {
    let lam = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let h = C64::new(h_val(z), 0.0);
    vec![
        (a * z.z().conj() + b) * h / lam,
        (a * z.z() + b) * lam,
    ]
}

/// Transversality report for the tautological section.
#[derive(Debug, Clone)]
pub struct JacobianReport {
    /// Size of the square real system (`4n` over `C`, `2n` over `R`).
    pub dim: usize,
    /// Smallest singular value; positivity certifies transversality.
    pub min_sv: f64,
    /// Base point the report was sampled at.
    pub at_z: (f64, f64),
    /// Fiber coordinates the report was sampled at.
    pub at_t: Vec<C64>,
}

/// The y-rescaled covariant derivatives of the tautological section in
/// the unitary frame: constant matrices
/// `Dz = -(i/sqrt(2)) diag(a_k) + sub(r_{k-1})` and
/// `Dzbar = -(i/sqrt(2)) diag(a_k) + sup(r_k)`.
fn rescaled_derivatives(data: &HiggsData, include_field: bool) -> (DMatrix<C64>, DMatrix<C64>) {
    let d = data.rank();
    let mut dz = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    let mut dzbar = dz.clone();
    let c = C64::new(0.0, -1.0 / 2f64.sqrt());
    for k in 0..d {
        let a = data.weight(k + 1);
        dz[(k, k)] = c * a;
        dzbar[(k, k)] = c * a;
    }
    if include_field {
        for k in 1..d {
            dz[(k, k - 1)] = C64::new(data.r(k), 0.0);
            dzbar[(k - 1, k)] = C64::new(data.r(k), 0.0);
        }
    }
    (dz, dzbar)
}

fn cone_pairing(t: &[C64]) -> C64 {
    (0..t.len() / 2).map(|j| t[2 * j] * t[2 * j + 1].conj()).sum()
}

/// Realification `(re x_1, im x_1, ...)` used for the complex-field system.
fn realify_c(x: &[C64]) -> Vec<f64> {
    x.iter().flat_map(|a| [a.re, a.im]).collect()
}

/// Orthonormal real basis of the fixed locus of `tau0`:
/// `(delta_k + delta_{2n+1-k})/sqrt(2)` and
/// `(i delta_k - i delta_{2n+1-k})/sqrt(2)` for `k = 1..n`.
fn tau0_fixed_basis(d: usize) -> Vec<Vec<C64>> {
    let n = d / 2;
    let s = 1.0 / 2f64.sqrt();
    let mut basis = Vec::with_capacity(d);
    for k in 0..n {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = C64::new(s, 0.0);
        v[d - 1 - k] = C64::new(s, 0.0);
        basis.push(v);
        let mut w = vec![C64::new(0.0, 0.0); d];
        w[k] = C64::new(0.0, s);
        w[d - 1 - k] = C64::new(0.0, -s);
        basis.push(w);
    }
    basis
}

fn herm_re(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal kernel basis of a real matrix, from the eigenvectors of
/// its Gram matrix with relatively tiny eigenvalues.  Callers check the
/// resulting dimension, which guards the threshold.
fn kernel_basis(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    let gram = m.transpose() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let emax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-12 * emax.max(1e-300);
    let mut kernel = Vec::new();
    for i in 0..cols {
        if eig.eigenvalues[i].abs() <= tol {
            kernel.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    kernel
}

/// Assembles the square real system `(a, v) -> a Dz t + conj(a) Dzbar t + v`
/// with `v` running over the tangent space of the fiber cone at `t`, and
/// reports its smallest singular value.  `include_field = false` drops the
/// subdiagonal field (a rank-drop negative control).
pub fn tautological_jacobian_probe(
    data: &HiggsData,
    field: Field,
    z: &UHPoint,
    t: &[C64],
    include_field: bool,
) -> Result<JacobianReport> {
    let d = data.rank();
    if t.len() != d {
        return Err(Error::BadLength {
            got: t.len(),
            expected: d,
        });
    }
    let scale = t.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return Err(Error::Invalid("zero fiber point".into()));
    }
    let pairing = cone_pairing(t).norm();
    if pairing > 1e-10 * scale {
        return Err(Error::ConstraintViolated {
            residual: pairing / scale,
        });
    }
    if field == Field::R {
        let fixed = tau0(t);
        let res = t
            .iter()
            .zip(&fixed)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if res > 1e-10 * scale.sqrt() {
            return Err(Error::ConstraintViolated { residual: res });
        }
    }
    let (dz, dzbar) = rescaled_derivatives(data, include_field);
    let tv = DVector::from_column_slice(t);
    let col_re: Vec<C64> = (&dz * &tv + &dzbar * &tv).iter().cloned().collect();
    let im_unit = C64::new(0.0, 1.0);
    let col_im: Vec<C64> = (&dz * &tv * im_unit - &dzbar * &tv * im_unit)
        .iter()
        .cloned()
        .collect();

    match field {
        Field::C => {
            // Constraint differential of sum t_{2j-1} conj(t_{2j}) as a
            // real 2 x 4n matrix acting on realified increments.
            let mut cons = DMatrix::from_element(2, 2 * d, 0.0);
            for j in 0..d / 2 {
                let odd = t[2 * j];
                let even = t[2 * j + 1];
                // d/d t_{2j-1}: increment delta multiplies conj(t_{2j}).
                let c1 = even.conj();
                cons[(0, 4 * j)] += c1.re;
                cons[(0, 4 * j + 1)] += -c1.im;
                cons[(1, 4 * j)] += c1.im;
                cons[(1, 4 * j + 1)] += c1.re;
                // d/d t_{2j}: t_{2j-1} conj(delta).
                let c2 = odd;
                cons[(0, 4 * j + 2)] += c2.re;
                cons[(0, 4 * j + 3)] += c2.im;
                cons[(1, 4 * j + 2)] += c2.im;
                cons[(1, 4 * j + 3)] += -c2.re;
            }
            let vert = kernel_basis(&cons);
            let dim = 2 * d;
            if vert.len() != dim - 2 {
                return Err(Error::Invalid(format!(
                    "vertical space has dimension {} instead of {}",
                    vert.len(),
                    dim - 2
                )));
            }
            let mut m = DMatrix::from_element(dim, dim, 0.0);
            let re_col = realify_c(&col_re);
            let im_col = realify_c(&col_im);
            for i in 0..dim {
                m[(i, 0)] = re_col[i];
                m[(i, 1)] = im_col[i];
            }
            for (j, v) in vert.iter().enumerate() {
                for i in 0..dim {
                    m[(i, j + 2)] = v[i];
                }
            }
            let min_sv = m
                .svd(false, false)
                .singular_values
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            Ok(JacobianReport {
                dim,
                min_sv,
                at_z: (z.x, z.y),
                at_t: t.to_vec(),
            })
        }
        Field::R => {
            // Work in coordinates on the fixed locus of tau0 (real
            // dimension 2n); the derivative columns stay inside it.
            let basis = tau0_fixed_basis(d);
            let coords = |w: &[C64]| -> Vec<f64> {
                basis.iter().map(|b| herm_re(b, w)).collect()
            };
            let dim = d;
            // Constraint differential restricted to the fixed locus.
            let mut cons = DMatrix::from_element(2, dim, 0.0);
            for (j, b) in basis.iter().enumerate() {
                let mut dg = C64::new(0.0, 0.0);
                for i in 0..d / 2 {
                    dg += b[2 * i] * t[2 * i + 1].conj() + t[2 * i] * b[2 * i + 1].conj();
                }
                cons[(0, j)] = dg.re;
                cons[(1, j)] = dg.im;
            }
            let vert = kernel_basis(&cons);
            if vert.len() != dim - 2 {
                return Err(Error::Invalid(format!(
                    "vertical space has dimension {} instead of {}",
                    vert.len(),
                    dim - 2
                )));
            }
            let mut m = DMatrix::from_element(dim, dim, 0.0);
            let re_col = coords(&col_re);
            let im_col = coords(&col_im);
            // The derivative columns must not leave the fixed locus.
            let check = |w: &[C64], c: &[f64]| -> f64 {
                let mut back = vec![C64::new(0.0, 0.0); d];
                for (x, b) in c.iter().zip(&basis) {
                    for i in 0..d {
                        back[i] += b[i] * *x;
                    }
                }
                w.iter()
                    .zip(&back)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            };
            let drift = check(&col_re, &re_col).max(check(&col_im, &im_col));
            if drift > 1e-9 * scale.sqrt().max(1.0) {
                return Err(Error::Invalid(format!(
                    "derivative columns left the real locus by {drift:.3e}"
                )));
            }
            for i in 0..dim {
                m[(i, 0)] = re_col[i];
                m[(i, 1)] = im_col[i];
            }
            for (j, v) in vert.iter().enumerate() {
                for i in 0..dim {
                    m[(i, j + 2)] = v[i];
                }
            }
            let min_sv = m
                .svd(false, false)
                .singular_values
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            Ok(JacobianReport {
                dim,
                min_sv,
                at_z: (z.x, z.y),
                at_t: t.to_vec(),
            })
        }
    }
}

/// Transversality check of the tautological section at `(z, t)`; the
/// assembled operator is the y-rescaled one, so the margin is scale-free
/// in the base point.
pub fn tautological_jacobian(
    data: &HiggsData,
    field: Field,
    z: &UHPoint,
    t: &[C64],
) -> Result<JacobianReport> {
    tautological_jacobian_probe(data, field, z, t, true)
}
