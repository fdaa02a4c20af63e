//! The developing map of the flat half-plane bundle.
//!
//! Closed-form parallel frames trivialize the rank-2 flat bundle; their
//! symmetric powers transport the rank-2n bundle.  Expressing the
//! tautological section in the parallel frame develops a fiber point
//! into a binary form of degree `2n-1`, equivariantly for the isometry
//! group of the half-plane.  For `n = 2` an explicit three-parameter
//! solver identifies the image components by their root configurations.

use crate::higgsflat::{h_val, UHPoint};
use crate::hpoly::{binomial, Basis, HForm, HPoly, RP1Point};
use crate::slrep::{phi_prime_diag, sym_rep_matrix, SL2R};
use crate::{C64, Error, Result};
use nalgebra::{DMatrix, Matrix2};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

fn lambda() -> C64 {
    C64::from_polar(1.0, FRAC_PI_4)
}

/// The parallel frame pair at a base point, in holomorphic-frame
/// coordinates: `e1(z) = (zbar lam^-1 h, z lam)`, `e2(z) = (lam^-1 h, lam)`
/// with `lam = e^{i pi/4}`.
#[derive(Debug, Clone)]
pub struct Frame2 {
    pub e1: [C64; 2],
    pub e2: [C64; 2],
    pub z: UHPoint,
}

impl Frame2 {
    pub fn det(&self) -> C64 {
        self.e1[0] * self.e2[1] - self.e2[0] * self.e1[1]
    }
}

/// Matrix with the frame vectors as columns; its determinant is the
/// constant `-i sqrt(2)`.
pub fn frame_matrix(z: &UHPoint) -> Matrix2<C64> {
    let lam = lambda();
    let h = C64::new(h_val(z), 0.0);
    let zc = z.z();
    Matrix2::new(zc.conj() / lam * h, h / lam, zc * lam, lam)
}

fn frame_matrix_inv(z: &UHPoint) -> Matrix2<C64> {
    let lam = lambda();
    let h = C64::new(h_val(z), 0.0);
    let zc = z.z();
    let det = C64::new(0.0, -(2f64.sqrt()));
    Matrix2::new(lam, -h / lam, -zc * lam, zc.conj() / lam * h) / det
}

pub fn frames(z: &UHPoint) -> Frame2 {
    let f = frame_matrix(z);
    Frame2 {
        e1: [f[(0, 0)], f[(1, 0)]],
        e2: [f[(0, 1)], f[(1, 1)]],
        z: *z,
    }
}

/// Parallel transport of holomorphic-frame coordinates from `z` to `z0`:
/// `F(z0) F(z)^-1`.  Unit determinant; exact groupoid law.
pub fn transport2(z0: &UHPoint, z: &UHPoint) -> Matrix2<C64> {
    frame_matrix(z0) * frame_matrix_inv(z)
}

/// The induced matrix of `m` on binary forms of degree `2n-1` in the
/// plain monomial basis (index `j` is the coefficient of
/// `u^{2n-1-j} v^j`): column `j` expands
/// `(m11 u + m21 v)^{2n-1-j} (m12 u + m22 v)^j`.
pub fn sym_power_mono(m: &Matrix2<C64>, n: usize) -> DMatrix<C64> {
    let d = 2 * n - 1;
    let col_u = HForm::linear(Basis::XY, m[(0, 0)], m[(1, 0)]);
    let col_v = HForm::linear(Basis::XY, m[(0, 1)], m[(1, 1)]);
    let mut out = DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0));
    for j in 0..=d {
        let form = col_u.pow(d - j).mul(&col_v.pow(j)).expect("same basis");
        for (i, c) in form.coeffs().iter().enumerate() {
            out[(i, j)] = *c;
        }
    }
    out
}

fn normalizer_diag(n: usize) -> Vec<f64> {
    let d = 2 * n as u64 - 1;
    (0..2 * n).map(|i| (binomial(d, i as u64) as f64).sqrt()).collect()
}

/// Parallel transport of rank-2n holomorphic-frame coordinates from `z`
/// to `z0`: the symmetric power of [`transport2`] conjugated into the
/// square-root-binomial normalized monomial basis, which is exactly the
/// basis in which the rank-2n connection matrices act.
pub fn transport_sym(z0: &UHPoint, z: &UHPoint, n: usize) -> DMatrix<C64> {
    let mut s = sym_power_mono(&transport2(z0, z), n);
    let dn = normalizer_diag(n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            s[(i, j)] *= dn[j] / dn[i];
        }
    }
    s
}

fn cone_residual(t: &[C64]) -> f64 {
    let pairing: C64 = (0..t.len() / 2).map(|j| t[2 * j] * t[2 * j + 1].conj()).sum();
    pairing.norm()
}

/// Develops a fiber point: the tautological section at `(z, t)` written
/// in the parallel frame polynomial variables, as a degree-`2n-1` form.
///
/// `t` are the fiber coordinates in the unitary frame and must satisfy
/// the pairing constraint `sum t_{2j-1} conj(t_{2j}) = 0`.
pub fn developing(z: &UHPoint, t: &[C64], n: usize) -> Result<HPoly> {
    if t.len() != 2 * n {
        return Err(Error::BadLength {
            got: t.len(),
            expected: 2 * n,
        });
    }
    let scale = t.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let res = cone_residual(t);
    if res > 1e-8 * scale {
        return Err(Error::ConstraintViolated { residual: res / scale });
    }
    let h = h_val(z);
    let unit_metric = Matrix2::new(
        C64::new(h.sqrt(), 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0 / h.sqrt(), 0.0),
    );
    let m_corr = frame_matrix_inv(z) * unit_metric;
    let s = sym_power_mono(&m_corr, n);
    let dn = normalizer_diag(n);
    let coeffs: Vec<C64> = (0..2 * n)
        .map(|i| (0..2 * n).map(|j| s[(i, j)] * t[j] * dn[j]).sum())
        .collect();
    HPoly::new(n, Basis::XY, coeffs)
}

/// The developed form evaluated through its displayed closed form
/// `-(2 sqrt(2) y)^{(1-2n)/2} sum_k C(2n-1,k-1)^{1/2} t_k
///  (lam^-1 (u - z v))^{2n-k} (lam (u - zbar v))^{k-1}`,
/// an independent route used to pin the matrix assembly.
pub fn developing_closed(z: &UHPoint, t: &[C64], n: usize) -> Result<HPoly> {
    if t.len() != 2 * n {
        return Err(Error::BadLength {
            got: t.len(),
            expected: 2 * n,
        });
    }
    let d = 2 * n - 1;
    let y = z.y();
    let prefactor = -(2.0 * 2f64.sqrt() * y).powf((1.0 - 2.0 * n as f64) / 2.0);
    let lam = lambda();
    let zc = z.z();
    let one = C64::new(1.0, 0.0);
    let lin_z = HForm::linear(Basis::XY, one, -zc);
    let lin_zbar = HForm::linear(Basis::XY, one, -zc.conj());
    let dn = normalizer_diag(n);
    let mut acc = vec![C64::new(0.0, 0.0); 2 * n];
    for k in 1..=2 * n {
        let j = k - 1;
        let form = lin_z.pow(d - j).mul(&lin_zbar.pow(j)).expect("same basis");
        let phase = lam.powi(2 * k as i32 - 2 * n as i32 - 1);
        let c = t[j] * dn[j] * phase * prefactor;
        for (i, f) in form.coeffs().iter().enumerate() {
            acc[i] += f * c;
        }
    }
    HPoly::new(n, Basis::XY, acc)
}

/// The boundary-cocycle angle `arg(c z + d)` of a Moebius map at `z`.
pub fn theta_gamma(g: &SL2R, z: &UHPoint) -> f64 {
    let m = g.matrix();
    (z.z() * m[(1, 0)] + C64::new(m[(1, 1)], 0.0)).arg()
}

/// Moebius action of a real unimodular matrix on the upper half-plane.
pub fn mobius_point(g: &SL2R, z: &UHPoint) -> Result<UHPoint> {
    let m = g.matrix();
    let zc = z.z();
    let w = (zc * m[(0, 0)] + m[(0, 1)]) / (zc * m[(1, 0)] + m[(1, 1)]);
    UHPoint::new(w.re, w.im)
}

/// The circle action on fiber coordinates: `t_k` gets the phase
/// `e^{i (2n+1-2k) theta}`.
pub fn rotate_fiber(theta: f64, t: &[C64]) -> Result<Vec<C64>> {
    if t.len() % 2 != 0 || t.is_empty() {
        return Err(Error::BadLength {
            got: t.len(),
            expected: t.len() + t.len() % 2,
        });
    }
    let phases = phi_prime_diag(theta, t.len() / 2);
    Ok(t.iter().zip(&phases).map(|(a, p)| a * p).collect())
}

/// Residual of the frame cocycle: in unitary-frame coordinates the
/// Moebius-translated frames differ from the matrix-combined frames by
/// the pure phases `e^{+-i arg(c z + d)}`:
/// `Utilde(g z) = diag(e^{i th}, e^{-i th}) Utilde(z) g^T`.
pub fn left_action_frame_check(g: &SL2R, z: &UHPoint) -> Result<f64> {
    let unit = |w: &UHPoint| -> Matrix2<C64> {
        let h = h_val(w);
        let scale = Matrix2::new(
            C64::new(1.0 / h.sqrt(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h.sqrt(), 0.0),
        );
        scale * frame_matrix(w)
    };
    let gz = mobius_point(g, z)?;
    let theta = theta_gamma(g, z);
    let m = g.matrix();
    let gt = Matrix2::new(
        C64::new(m[(0, 0)], 0.0),
        C64::new(m[(1, 0)], 0.0),
        C64::new(m[(0, 1)], 0.0),
        C64::new(m[(1, 1)], 0.0),
    );
    let phase = Matrix2::new(
        C64::from_polar(1.0, theta),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, -theta),
    );
    let lhs = unit(&gz);
    let rhs = phase * unit(z) * gt;
    let num = (lhs - rhs).iter().map(|a| a.norm()).fold(0.0, f64::max);
    let den = lhs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    Ok(num / den)
}

/// Phase-quotiented distance between the projective classes of two
/// forms: the chordal Fubini-Study metric
/// `min_phase |phat - e^{i phase} qhat| = 2 sin(angle/2)`, which resolves
/// small separations to full precision.
pub fn fs_distance(p: &HPoly, q: &HPoly) -> Result<f64> {
    let a = p.coeffs_in(Basis::XY);
    let b = q.coeffs_in(Basis::XY);
    if a.len() != b.len() {
        return Err(Error::BadLength {
            got: b.len(),
            expected: a.len(),
        });
    }
    let na = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let inner: C64 = b.iter().zip(&a).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let dist2: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x / na - y * phase / nb).norm_sqr())
        .sum();
    Ok(dist2.sqrt())
}

/// Equivariance defect of the developing map: the distance between
/// developing the translated pair `(g z, e^{i theta_g} . t)` and the
/// substitution action of `g` on the developed form.
pub fn equivariance_check(g: &SL2R, z: &UHPoint, t: &[C64], n: usize) -> Result<f64> {
    let gz = mobius_point(g, z)?;
    let gt = rotate_fiber(theta_gamma(g, z), t)?;
    let lhs = developing(&gz, &gt, n)?;
    let base = developing(z, t, n)?;
    let rep = sym_rep_matrix(g, n);
    let coeffs = base.coeffs_in(Basis::XY);
    let moved: Vec<C64> = (0..2 * n)
        .map(|i| (0..2 * n).map(|j| coeffs[j] * rep[(i, j)]).sum())
        .collect();
    let rhs = HPoly::new(n, Basis::XY, moved)?;
    fs_distance(&lhs, &rhs)
}

/// Parameters of the distinct-real-roots image component for `n = 2`:
/// a rotation angle in `[pi/4, 7pi/12)`, a radius, and a phase in
/// `(0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct N2Params {
    pub theta_prime: f64,
    pub r: f64,
    pub phi: f64,
}

impl N2Params {
    pub fn new(theta_prime: f64, r: f64, phi: f64) -> Result<Self> {
        if !(FRAC_PI_4..7.0 * PI / 12.0).contains(&theta_prime) {
            return Err(Error::Invalid(format!(
                "theta_prime {theta_prime} outside [pi/4, 7pi/12)"
            )));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Invalid(format!("radius {r} must be >= 0")));
        }
        if !(0.0 < phi && phi < PI) {
            return Err(Error::Invalid(format!("phi {phi} outside (0, pi)")));
        }
        Ok(Self { theta_prime, r, phi })
    }
}

/// The three projective real roots
/// `a_j = r cos(theta' + (j-1) pi/3 - phi) / cos(theta' + (j-1) pi/3)`;
/// only the first cosine can vanish on the parameter domain, sending
/// `a_1` to infinity.
pub fn n2_forward(p: &N2Params) -> [RP1Point; 3] {
    let mut out = [RP1Point::infinity(), RP1Point::infinity(), RP1Point::infinity()];
    for (j, slot) in out.iter_mut().enumerate() {
        let ang = p.theta_prime + j as f64 * FRAC_PI_3;
        let c = ang.cos();
        if c.abs() < 1e-14 {
            *slot = RP1Point::infinity();
        } else {
            *slot = RP1Point::from_real(p.r * (ang - p.phi).cos() / c);
        }
    }
    out
}

const TAN_7PI_12: f64 = -(2.0 + 1.7320508075688772);

fn n2_inverse_labeled(b: &[RP1Point; 3]) -> Option<N2Params> {
    if b[0].is_infinity() {
        let a2 = b[1].to_real()?;
        let a3 = b[2].to_real()?;
        let rs = 3f64.sqrt() * (a3 - a2) / 2.0;
        if rs <= 0.0 {
            return None;
        }
        let rc = (a2 + a3) / 2.0;
        let r = rs.hypot(rc);
        let phi = rs.atan2(rc);
        return N2Params::new(FRAC_PI_2, r, phi).ok();
    }
    if b[1].is_infinity() || b[2].is_infinity() {
        return None;
    }
    let a1 = b[0].to_real()?;
    let a2 = b[1].to_real()?;
    let a3 = b[2].to_real()?;
    if a3 == a2 {
        return None;
    }
    let xi = (2.0 * a1 - a2 - a3) / (3f64.sqrt() * (a3 - a2));
    let theta_prime = if xi >= 1.0 {
        xi.atan()
    } else if xi < TAN_7PI_12 {
        xi.atan() + PI
    } else {
        return None;
    };
    let rs = 2.0 * (a2 - a1) * (a3 - a1) / (3f64.sqrt() * (1.0 + xi * xi) * (a3 - a2));
    if rs <= 0.0 {
        return None;
    }
    let rc = a1 - xi * rs;
    let r = rs.hypot(rc);
    let phi = rs.atan2(rc);
    N2Params::new(theta_prime, r, phi).ok()
}

/// Recovers the parameters from an ordered root triple.  Exactly one
/// cyclic relabeling satisfies the orientation constraints (the angle
/// lands in the fundamental domain and the recovered `r sin(phi)` is
/// positive); the solver tries all three and requires uniqueness.
/// Root triples produced by [`n2_forward`] are already correctly ordered.
pub fn n2_inverse(roots: &[RP1Point; 3]) -> Result<N2Params> {
    for i in 0..3 {
        for j in i + 1..3 {
            if roots[i].chordal(&roots[j]) < 1e-12 {
                return Err(Error::Invalid(format!(
                    "roots {i} and {j} coincide: the triple lies outside the component"
                )));
            }
        }
    }
    let mut found = Vec::new();
    for rot in 0..3 {
        let labeled = [roots[rot], roots[(rot + 1) % 3], roots[(rot + 2) % 3]];
        if let Some(p) = n2_inverse_labeled(&labeled) {
            found.push((rot, p));
        }
    }
    match found.len() {
        1 => Ok(found[0].1),
        0 => Err(Error::Invalid("no cyclic labeling satisfies the orientation".into())),
        k => Err(Error::Invalid(format!("{k} cyclic labelings are consistent"))),
    }
}

/// Parameters of the one-real-root image component for `n = 2`: a
/// rotation angle in `[0, pi)` and the polar coordinates of the upper
/// member of the complex-conjugate root pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega2Params {
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
}

impl Omega2Params {
    pub fn new(theta: f64, r: f64, phi: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) {
            return Err(Error::Invalid(format!("theta {theta} outside [0, pi)")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Invalid(format!("radius {r} must be positive")));
        }
        if !(0.0 < phi && phi < PI) {
            return Err(Error::Invalid(format!("phi {phi} outside (0, pi)")));
        }
        Ok(Self { theta, r, phi })
    }
}

/// The complex root `r e^{i phi}` (upper member of the conjugate pair)
/// and the real root `a = r cos(phi) + r sin(phi) tan(theta + pi/4)`,
/// infinite at `theta = pi/4`.
pub fn omega2_forward(p: &Omega2Params) -> (C64, RP1Point) {
    let zroot = C64::from_polar(p.r, p.phi);
    let u = p.theta + FRAC_PI_4;
    let a = if u.cos().abs() < 1e-14 {
        RP1Point::infinity()
    } else {
        RP1Point::from_real(p.r * p.phi.cos() + p.r * p.phi.sin() * u.tan())
    };
    (zroot, a)
}

/// Recovers the parameters from the upper complex root and the real
/// root: `theta = arctan((a - r cos phi)/(r sin phi)) - pi/4 (mod pi)`.
pub fn omega2_inverse(zroot: C64, a: &RP1Point) -> Result<Omega2Params> {
    if !(zroot.im > 0.0) {
        return Err(Error::Invalid(
            "the complex root must be the upper member of the pair".into(),
        ));
    }
    let r = zroot.norm();
    let phi = zroot.arg();
    let theta = match a.to_real() {
        None => FRAC_PI_4,
        Some(av) => {
            let q = ((av - r * phi.cos()) / (r * phi.sin())).atan();
            (q - FRAC_PI_4).rem_euclid(PI)
        }
    };
    Omega2Params::new(theta, r, phi)
}

fn root_factor(t: &RP1Point) -> HForm {
    HForm::linear(Basis::XY, C64::new(t.b(), 0.0), C64::new(-t.a(), 0.0))
}

/// The cubic with the three real roots of the parameter triple.
pub fn f1_point(p: &N2Params) -> Result<HPoly> {
    let roots = n2_forward(p);
    let form = root_factor(&roots[0])
        .mul(&root_factor(&roots[1]))?
        .mul(&root_factor(&roots[2]))?;
    HPoly::from_form(form)
}

/// The cubic with the conjugate root pair and one real root of the
/// parameter triple.
pub fn f2_point(p: &Omega2Params) -> Result<HPoly> {
    let (zroot, a) = omega2_forward(p);
    let one = C64::new(1.0, 0.0);
    let form = HForm::linear(Basis::XY, one, -zroot)
        .mul(&HForm::linear(Basis::XY, one, -zroot.conj()))?
        .mul(&root_factor(&a))?;
    HPoly::from_form(form)
}
