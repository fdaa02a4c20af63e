//! Stiefel cones and their quotients.
//!
//! A [`StiefelPoint`] is an ordered pair `(v, w)` of vectors in `K^n`
//! (`K = R` or `C`).  The cone `C_K` consists of pairs with
//! `Re<v,w> = 0` and `|v| = |w|`; normalising to unit vectors gives the
//! Stiefel variety `SF_K`.  The module provides membership predicates for
//! the cone and for its linear model `C'_K` (a pairing condition on `2n`
//! complex coordinates), the `U(n) x O(2)` action, the fibration onto
//! positive-definite symmetric `2x2` matrices, and the projection maps to
//! oriented real 2-planes and projective classes.

use crate::{C64, Error, Result};
use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Scalar field tag for Stiefel data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    R,
    C,
}

/// Hermitian inner product `sum conj(v_k) w_k`.
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn max_im(v: &[C64]) -> f64 {
    v.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
}

/// An ordered vector pair `(v, w)` over the tagged field.
#[derive(Debug, Clone)]
pub struct StiefelPoint {
    field: Field,
    v: Vec<C64>,
    w: Vec<C64>,
}

impl StiefelPoint {
    /// Builds a point, checking that `v` and `w` have equal length, are not
    /// both zero, and are (numerically) real when `field` is `R`.
    pub fn new(field: Field, v: Vec<C64>, w: Vec<C64>) -> Result<Self> {
        if v.len() != w.len() || v.is_empty() {
            return Err(Error::BadLength {
                got: w.len(),
                expected: v.len().max(1),
            });
        }
        let scale = (norm_sq(&v) + norm_sq(&w)).sqrt();
        if scale == 0.0 {
            return Err(Error::Invalid("zero Stiefel point".into()));
        }
        if field == Field::R {
            let im = max_im(&v).max(max_im(&w));
            if im > 1e-9 * scale {
                return Err(Error::ConstraintViolated { residual: im });
            }
        }
        Ok(Self { field, v, w })
    }

    /// Convenience constructor from real data.
    pub fn from_real(v: &[f64], w: &[f64]) -> Result<Self> {
        Self::new(
            Field::R,
            v.iter().map(|&x| C64::new(x, 0.0)).collect(),
            w.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Half-rank `n` (the common length of `v` and `w`).
    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[C64] {
        &self.v
    }

    pub fn w(&self) -> &[C64] {
        &self.w
    }

    /// Scales both vectors by a positive real factor.
    pub fn scale(&self, r: f64) -> Self {
        Self {
            field: self.field,
            v: self.v.iter().map(|a| a * r).collect(),
            w: self.w.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplies both vectors by `e^{i theta}` (complex points only).
    pub fn rotate(&self, theta: f64) -> Result<Self> {
        if self.field == Field::R {
            return Err(Error::Invalid("phase rotation needs a complex point".into()));
        }
        let u = C64::from_polar(1.0, theta);
        Ok(Self {
            field: self.field,
            v: self.v.iter().map(|a| a * u).collect(),
            w: self.w.iter().map(|a| a * u).collect(),
        })
    }
}

/// Residuals of the cone conditions for a [`StiefelPoint`].
#[derive(Debug, Clone, Copy)]
pub struct ConeReport {
    /// `|Re<v,w>|`.
    pub re_inner: f64,
    /// `||v|^2 - |w|^2|`.
    pub norm_gap: f64,
    /// `|Im<v,w>|`; constrained only over `R`.
    pub im_inner: f64,
    /// Scale `|v|^2 + |w|^2` used to normalise the residuals.
    pub scale: f64,
    pub ok: bool,
}

/// Tests membership in the cone `C_K`; residuals are compared against
/// `tol * (|v|^2 + |w|^2)`.
pub fn in_cone(p: &StiefelPoint, tol: f64) -> ConeReport {
    let ip = inner(&p.v, &p.w);
    let re_inner = ip.re.abs();
    let im_inner = ip.im.abs();
    let norm_gap = (norm_sq(&p.v) - norm_sq(&p.w)).abs();
    let scale = norm_sq(&p.v) + norm_sq(&p.w);
    let mut ok = re_inner <= tol * scale && norm_gap <= tol * scale;
    if p.field == Field::R {
        ok = ok && im_inner <= tol * scale;
    }
    ConeReport {
        re_inner,
        norm_gap,
        im_inner,
        scale,
        ok,
    }
}

/// Residuals of the linear-model cone conditions on `2n` coordinates.
#[derive(Debug, Clone, Copy)]
pub struct ConePrimeReport {
    /// The pairing `sum t_{2j-1} conj(t_{2j})` (1-based pairs).
    pub pairing: C64,
    /// `max_k |t_k - conj(t_{2n+1-k})|`; constrained only over `R`.
    pub reality: f64,
    pub ok: bool,
}

/// The antiholomorphic involution `tau0(t)_k = conj(t_{2n+1-k})`.
pub fn tau0(t: &[C64]) -> Vec<C64> {
    t.iter().rev().map(|a| a.conj()).collect()
}

/// Tests membership in `C'_K = { sum t_{2j-1} conj(t_{2j}) = 0 }`, with the
/// real locus cut out by `tau0`-invariance.  Residuals are absolute.
pub fn in_cone_prime(t: &[C64], field: Field, tol: f64) -> ConePrimeReport {
    let pairs = t.len() / 2;
    let pairing: C64 = (0..pairs).map(|j| t[2 * j] * t[2 * j + 1].conj()).sum();
    let fixed = tau0(t);
    let reality = t
        .iter()
        .zip(&fixed)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let mut ok = t.len() % 2 == 0 && pairing.norm() <= tol;
    if field == Field::R {
        ok = ok && reality <= tol;
    }
    ConePrimeReport {
        pairing,
        reality,
        ok,
    }
}

fn unitarity_residual(a: &DMatrix<C64>) -> f64 {
    let gram = a.adjoint() * a;
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// Applies `(A, B) . M = A M B^{-1}` to the `n x 2` matrix `M = [v w]`.
///
/// `A` must be orthogonal (field `R`) or unitary (field `C`) and `B`
/// orthogonal, both within `1e-8`.
pub fn act_group(p: &StiefelPoint, a: &DMatrix<C64>, b: &Matrix2<f64>) -> Result<StiefelPoint> {
    let n = p.n();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::BadLength {
            got: a.nrows(),
            expected: n,
        });
    }
    let res_a = unitarity_residual(a);
    if res_a > 1e-8 {
        return Err(Error::NotInGroup { residual: res_a });
    }
    if p.field == Field::R {
        let im = a.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
        if im > 1e-8 {
            return Err(Error::NotInGroup { residual: im });
        }
    }
    let bg = b.transpose() * b;
    let res_b = (bg - Matrix2::identity()).abs().max();
    if res_b > 1e-8 {
        return Err(Error::NotInGroup { residual: res_b });
    }
    // For orthogonal B the inverse is its transpose.
    let c = b.transpose();
    let mix = |c0: f64, c1: f64| -> Vec<C64> {
        p.v.iter()
            .zip(&p.w)
            .map(|(x, y)| x * c0 + y * c1)
            .collect()
    };
    let col1 = mix(c[(0, 0)], c[(1, 0)]);
    let col2 = mix(c[(0, 1)], c[(1, 1)]);
    let apply = |col: &[C64]| -> Vec<C64> {
        (0..n)
            .map(|i| (0..n).map(|j| a[(i, j)] * col[j]).sum())
            .collect()
    };
    StiefelPoint::new(p.field, apply(&col1), apply(&col2))
}

/// The fibration `h(M) = Re(conj(M)^T M)` onto symmetric `2x2` matrices.
///
/// `h` is positive semi-definite, positive definite exactly when `M` has
/// rank 2, and its fibre over the identity is the Stiefel variety.
pub fn diag_fiber_map(p: &StiefelPoint) -> Matrix2<f64> {
    let vv = norm_sq(&p.v);
    let ww = norm_sq(&p.w);
    let vw = inner(&p.v, &p.w).re;
    Matrix2::new(vv, vw, vw, ww)
}

/// Canonical representative of a projective class `[x]` in `KP^{m-1}`:
/// unit norm with the entry of largest modulus made positive real.
#[derive(Debug, Clone)]
pub struct ProjClass {
    rep: Vec<C64>,
}

impl ProjClass {
    pub fn new(x: &[C64]) -> Result<Self> {
        let ns = norm_sq(x);
        if ns == 0.0 {
            return Err(Error::Invalid("zero vector has no projective class".into()));
        }
        let scale = ns.sqrt();
        let mut rep: Vec<C64> = x.iter().map(|a| a / scale).collect();
        let mut best = 0usize;
        for (k, a) in rep.iter().enumerate() {
            if a.norm() > rep[best].norm() {
                best = k;
            }
        }
        let phase = rep[best] / rep[best].norm();
        for a in rep.iter_mut() {
            *a /= phase;
        }
        Ok(Self { rep })
    }

    pub fn rep(&self) -> &[C64] {
        &self.rep
    }

    /// Coordinatewise distance between canonical representatives.
    pub fn distance(&self, other: &Self) -> f64 {
        self.rep
            .iter()
            .zip(&other.rep)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Canonical representative of a class under positive real scaling only:
/// the unit-norm multiple.
#[derive(Debug, Clone)]
pub struct SphereClass {
    rep: Vec<C64>,
}

impl SphereClass {
    pub fn new(x: &[C64]) -> Result<Self> {
        let ns = norm_sq(x);
        if ns == 0.0 {
            return Err(Error::Invalid("zero vector has no sphere class".into()));
        }
        let scale = ns.sqrt();
        Ok(Self {
            rep: x.iter().map(|a| a / scale).collect(),
        })
    }

    pub fn rep(&self) -> &[C64] {
        &self.rep
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.rep
            .iter()
            .zip(&other.rep)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// An oriented real 2-plane, stored as an orthonormal ordered frame.
#[derive(Debug, Clone)]
pub struct OrientedPlane {
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl OrientedPlane {
    /// Gram–Schmidt frame of an ordered spanning pair, keeping orientation.
    ///
    /// Fails when the pair is rank deficient at relative threshold `1e-8`.
    pub fn from_pair(x1: &[f64], x2: &[f64]) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::BadLength {
                got: x2.len(),
                expected: x1.len(),
            });
        }
        let n1 = x1.iter().map(|a| a * a).sum::<f64>().sqrt();
        let n2_in = x2.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n1 <= 1e-8 * n2_in.max(1e-300) || n1 == 0.0 {
            return Err(Error::Invalid("rank-deficient plane data".into()));
        }
        let u1: Vec<f64> = x1.iter().map(|a| a / n1).collect();
        let proj: f64 = u1.iter().zip(x2).map(|(a, b)| a * b).sum();
        let r2: Vec<f64> = x2.iter().zip(&u1).map(|(b, a)| b - proj * a).collect();
        let n2 = r2.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n2 <= 1e-8 * n2_in {
            return Err(Error::Invalid("rank-deficient plane data".into()));
        }
        let u2: Vec<f64> = r2.iter().map(|a| a / n2).collect();
        Ok(Self { u1, u2 })
    }

    pub fn frame(&self) -> (&[f64], &[f64]) {
        (&self.u1, &self.u2)
    }

    /// Principal angles (radians, increasing) between the two planes.
    ///
    /// Cosines come from the SVD of the frame product; angles below pi/4
    /// are recomputed from the sine-based residual SVD, which stays
    /// accurate near zero where the arccosine loses half the precision.
    pub fn principal_angles(&self, other: &Self) -> [f64; 2] {
        let m = Matrix2::new(
            dot(&self.u1, &other.u1),
            dot(&self.u1, &other.u2),
            dot(&self.u2, &other.u1),
            dot(&self.u2, &other.u2),
        );
        let sv = m.svd(false, false).singular_values;
        let mut cos = [sv[0].clamp(-1.0, 1.0), sv[1].clamp(-1.0, 1.0)];
        cos.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let dim = self.u1.len();
        let residual = |v: &[f64]| -> Vec<f64> {
            let p1 = dot(&self.u1, v);
            let p2 = dot(&self.u2, v);
            (0..dim)
                .map(|i| v[i] - p1 * self.u1[i] - p2 * self.u2[i])
                .collect()
        };
        let b1 = residual(&other.u1);
        let b2 = residual(&other.u2);
        let bmat = DMatrix::from_fn(dim, 2, |i, j| if j == 0 { b1[i] } else { b2[i] });
        let sins = bmat.svd(false, false).singular_values;
        let mut sin = [sins[0].clamp(0.0, 1.0), sins[1].clamp(0.0, 1.0)];
        sin.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let pick = |k: usize| -> f64 {
            if cos[k] > std::f64::consts::FRAC_1_SQRT_2 {
                sin[k].asin()
            } else {
                cos[k].acos()
            }
        };
        [pick(0), pick(1)]
    }

    /// True when the planes agree (principal angles below `tol`).
    pub fn same_plane(&self, other: &Self, tol: f64) -> bool {
        let [a, b] = self.principal_angles(other);
        a <= tol && b <= tol
    }

    /// True when the planes agree and their orientations match.
    pub fn same_oriented(&self, other: &Self, tol: f64) -> bool {
        let m = Matrix2::new(
            dot(&self.u1, &other.u1),
            dot(&self.u1, &other.u2),
            dot(&self.u2, &other.u1),
            dot(&self.u2, &other.u2),
        );
        self.same_plane(other, tol) && m.determinant() > 0.0
    }

    /// Orientation of the ordered pair `(x1, x2)` relative to this plane:
    /// the sign of the determinant of the change of basis to the frame.
    pub fn orientation_of(&self, x1: &[f64], x2: &[f64]) -> f64 {
        let m = Matrix2::new(
            dot(&self.u1, x1),
            dot(&self.u1, x2),
            dot(&self.u2, x1),
            dot(&self.u2, x2),
        );
        m.determinant().signum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Realification of a coordinate vector: over `C` the interleaved
/// `(re x_1, im x_1, re x_2, im x_2, ...)`, over `R` the real parts.
pub fn realify(x: &[C64], field: Field) -> Vec<f64> {
    match field {
        Field::R => x.iter().map(|a| a.re).collect(),
        Field::C => x.iter().flat_map(|a| [a.re, a.im]).collect(),
    }
}

/// Projections of a Stiefel point: the oriented real span of `(v, w)` and
/// the projective class of `v`.
pub fn projections(p: &StiefelPoint) -> Result<(OrientedPlane, ProjClass)> {
    let x1 = realify(&p.v, p.field);
    let x2 = realify(&p.w, p.field);
    let plane = OrientedPlane::from_pair(&x1, &x2)?;
    let base = ProjClass::new(&p.v)?;
    Ok((plane, base))
}

/// Reads an interleaved vector `(v_1, w_1, v_2, w_2, ...)` as a pair.
pub fn split_interleaved(x: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    if x.len() % 2 != 0 {
        return Err(Error::BadLength {
            got: x.len(),
            expected: x.len() + 1,
        });
    }
    let v = x.iter().step_by(2).copied().collect();
    let w = x.iter().skip(1).step_by(2).copied().collect();
    Ok((v, w))
}

/// Interleaves a pair into `(v_1, w_1, v_2, w_2, ...)`.
pub fn interleave_pair(v: &[C64], w: &[C64]) -> Result<Vec<C64>> {
    if v.len() != w.len() {
        return Err(Error::BadLength {
            got: w.len(),
            expected: v.len(),
        });
    }
    Ok(v.iter().zip(w).flat_map(|(a, b)| [*a, *b]).collect())
}

/// Maps linear-model coordinates `t` to a Stiefel point through the
/// change of basis of [`crate::slrep::basis_change_a`], reading the image
/// in interleaved pair order.  Sends `C'_K` into `C_K`.
pub fn cone_from_t(field: Field, t: &[C64]) -> Result<StiefelPoint> {
    if t.len() % 2 != 0 || t.is_empty() {
        return Err(Error::BadLength {
            got: t.len(),
            expected: t.len() + 1,
        });
    }
    let n = t.len() / 2;
    let a = crate::slrep::basis_change_a(n);
    let x = crate::slrep::apply_matrix(&a, t);
    let (v, w) = split_interleaved(&x)?;
    StiefelPoint::new(field, v, w)
}

pub(crate) fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    (0..len).map(|_| gaussian_c64(rng)).collect()
}

/// Draws `count` points of `C'_K` in `2n` coordinates, by sampling freely
/// and solving the pairing constraint for one pivot coordinate.
///
/// Over `R` the locus is `{0}` when `n = 1`, which is rejected.
pub fn sample_cone_prime(n: usize, field: Field, count: usize, seed: u64) -> Result<Vec<Vec<C64>>> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if field == Field::R && n == 1 {
        return Err(Error::Invalid(
            "the real linear-model cone is a single point for n = 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(match field {
            Field::C => loop {
                let mut t = gaussian_vec(&mut rng, 2 * n);
                if t[0].norm() < 0.1 {
                    continue;
                }
                let rest: C64 = (1..n).map(|j| t[2 * j] * t[2 * j + 1].conj()).sum();
                t[1] = (-rest / t[0]).conj();
                break t;
            },
            Field::R => loop {
                // Free coordinates s = (t_1 .. t_n); the rest are forced by
                // tau0.  The pairing restricted to the fixed locus is
                // 2 * sum_{j <= floor(n/2)} s_{2j-1} conj(s_{2j}), plus
                // s_n^2 when n is odd; solve for conj(s_2).
                let mut s = gaussian_vec(&mut rng, n);
                if s[0].norm() < 0.1 {
                    continue;
                }
                let mut rest: C64 = (1..n / 2).map(|j| s[2 * j] * s[2 * j + 1].conj()).sum();
                rest *= 2.0;
                if n % 2 == 1 {
                    rest += s[n - 1] * s[n - 1];
                }
                s[1] = (-rest / (2.0 * s[0])).conj();
                let mut t = s.clone();
                t.extend(s.iter().rev().map(|a| a.conj()));
                break t;
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slrep;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn cvec(xs: &[(f64, f64)]) -> Vec<C64> {
        xs.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let g = DMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
        g.qr().q()
    }

    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), 0.0)
        });
        g.qr().q()
    }

    fn sample_cone_point(n: usize, field: Field, rng: &mut ChaCha8Rng) -> StiefelPoint {
        // Orthonormal columns from QR give a unit Stiefel point; a random
        // positive scale moves it along the cone.
        let q = match field {
            Field::C => random_unitary(n.max(2), rng),
            Field::R => random_orthogonal(n.max(2), rng),
        };
        let v: Vec<C64> = (0..n).map(|i| q[(i, 0)]).collect();
        let w: Vec<C64> = (0..n).map(|i| q[(i, 1)]).collect();
        let r: f64 = rng.random_range(0.1..3.0);
        StiefelPoint::new(field, v, w).unwrap().scale(r)
    }

    #[test]
    fn standard_pairs_lie_in_cone() {
        let p = StiefelPoint::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(in_cone(&p, 1e-12).ok);

        let q = StiefelPoint::new(Field::C, cvec(&[(1.0, 0.0)]), cvec(&[(0.0, 1.0)])).unwrap();
        assert!(in_cone(&q, 1e-12).ok);

        let bad = StiefelPoint::from_real(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let rep = in_cone(&bad, 1e-6);
        assert!(!rep.ok);
        assert!(rep.re_inner > 0.9);
    }

    #[test]
    fn cone_prime_examples() {
        let t1 = cvec(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let rep = in_cone_prime(&t1, Field::R, 1e-12);
        assert!(rep.ok);
        assert_abs_diff_eq!(rep.reality, 0.0, epsilon = 1e-15);

        let t2 = cvec(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(in_cone_prime(&t2, Field::C, 1e-12).ok);
        assert!(!in_cone_prime(&t2, Field::R, 1e-12).ok);

        let t3 = cvec(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let rep3 = in_cone_prime(&t3, Field::C, 1e-6);
        assert!(!rep3.ok);
        assert_abs_diff_eq!(rep3.pairing.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn group_action_preserves_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [Field::R, Field::C] {
            for n in [2usize, 3, 5] {
                for _ in 0..40 {
                    let p = sample_cone_point(n, field, &mut rng);
                    let a = match field {
                        Field::C => random_unitary(n, &mut rng),
                        Field::R => random_orthogonal(n, &mut rng),
                    };
                    let theta: f64 = rng.random_range(0.0..2.0 * PI);
                    let b = slrep::rot2(theta);
                    let q = act_group(&p, &a, &b).unwrap();
                    let rep = in_cone(&q, 1e-9);
                    assert!(rep.ok, "field {:?} n {} residual {:?}", field, n, rep);
                }
            }
        }
    }

    #[test]
    fn group_action_composes_on_the_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 3;
        let p = sample_cone_point(n, Field::C, &mut rng);
        let a1 = random_unitary(n, &mut rng);
        let a2 = random_unitary(n, &mut rng);
        let b1 = slrep::rot2(0.7);
        let b2 = slrep::rot2(-1.3);
        let lhs = act_group(&act_group(&p, &a1, &b1).unwrap(), &a2, &b2).unwrap();
        let rhs = act_group(&p, &(&a2 * &a1), &(b2 * b1)).unwrap();
        for k in 0..n {
            assert_abs_diff_eq!((lhs.v()[k] - rhs.v()[k]).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((lhs.w()[k] - rhs.w()[k]).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_unitary_inputs() {
        let p = StiefelPoint::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let a = DMatrix::from_diagonal_element(2, 2, C64::new(2.0, 0.0));
        assert!(matches!(
            act_group(&p, &a, &Matrix2::identity()),
            Err(Error::NotInGroup { .. })
        ));
        let id = DMatrix::from_diagonal_element(2, 2, C64::new(1.0, 0.0));
        let b = Matrix2::new(1.0, 1.0, 0.0, 1.0);
        assert!(matches!(act_group(&p, &id, &b), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn unitary_invariant_function() {
        // Im<v,w>/(|v||w|) is unchanged by A in U(n) with B = Id.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 4;
        for _ in 0..100 {
            let v = gaussian_vec(&mut rng, n);
            let w = gaussian_vec(&mut rng, n);
            let p = StiefelPoint::new(Field::C, v, w).unwrap();
            let f = |q: &StiefelPoint| {
                inner(q.v(), q.w()).im / (norm_sq(q.v()).sqrt() * norm_sq(q.w()).sqrt())
            };
            let a = random_unitary(n, &mut rng);
            let q = act_group(&p, &a, &Matrix2::identity()).unwrap();
            assert_abs_diff_eq!(f(&p), f(&q), epsilon = 1e-10);
        }
    }

    #[test]
    fn fiber_map_examples_and_equivariance() {
        let p = StiefelPoint::from_real(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let h = diag_fiber_map(&p);
        assert_abs_diff_eq!((h - Matrix2::identity()).abs().max(), 0.0, epsilon = 1e-15);

        let rank1 = StiefelPoint::from_real(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(diag_fiber_map(&rank1).determinant(), 0.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let v = gaussian_vec(&mut rng, 3);
            let w = gaussian_vec(&mut rng, 3);
            let p = StiefelPoint::new(Field::C, v, w).unwrap();
            let g = slrep::exp_sl2(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            );
            let gi = g.inverse();
            let m = gi.matrix();
            // (Id, g).M = M g^{-1}: columns mix by the columns of g^{-1}.
            let v2: Vec<C64> = p
                .v()
                .iter()
                .zip(p.w())
                .map(|(x, y)| x * m[(0, 0)] + y * m[(1, 0)])
                .collect();
            let w2: Vec<C64> = p
                .v()
                .iter()
                .zip(p.w())
                .map(|(x, y)| x * m[(0, 1)] + y * m[(1, 1)])
                .collect();
            let q = StiefelPoint::new(Field::C, v2, w2).unwrap();
            let lhs = diag_fiber_map(&q);
            let rhs = m.transpose() * diag_fiber_map(&p) * m;
            assert_abs_diff_eq!((lhs - rhs).abs().max(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fiber_over_identity_is_unit_stiefel() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let p = sample_cone_point(3, Field::C, &mut rng);
            let h = diag_fiber_map(&p);
            let near_id = (h - Matrix2::identity()).abs().max() <= 1e-9;
            let rep = in_cone(&p, 1e-10);
            let unit = rep.ok && (norm_sq(p.v()) - 1.0).abs() <= 1e-9;
            assert_eq!(near_id, unit);
            let u = p.scale(1.0 / norm_sq(p.v()).sqrt());
            assert!((diag_fiber_map(&u) - Matrix2::identity()).abs().max() <= 1e-9);
        }
    }

    #[test]
    fn projection_examples() {
        let p = StiefelPoint::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        let (plane, base) = projections(&p).unwrap();
        assert_abs_diff_eq!(plane.frame().0[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plane.frame().1[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(base.rep()[0].re, 1.0, epsilon = 1e-15);

        // Scaling by r > 0 changes neither projection.
        let q = p.scale(2.5);
        let (plane2, base2) = projections(&q).unwrap();
        assert!(plane.same_oriented(&plane2, 1e-10));
        assert_abs_diff_eq!(base.distance(&base2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_projection_fails() {
        let p = StiefelPoint::from_real(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert!(projections(&p).is_err());
    }

    #[test]
    fn complex_line_plane_is_rotation_invariant() {
        // When w = i v the real span of (v, w) is a complex line, so the
        // U(1) action fixes the plane (and flips nothing).
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let v = gaussian_vec(&mut rng, 3);
            let w: Vec<C64> = v.iter().map(|a| a * C64::new(0.0, 1.0)).collect();
            let p = StiefelPoint::new(Field::C, v, w).unwrap();
            let (plane, _) = projections(&p).unwrap();
            let theta: f64 = rng.random_range(0.0..2.0 * PI);
            let (plane2, _) = projections(&p.rotate(theta).unwrap()).unwrap();
            let [a, b] = plane.principal_angles(&plane2);
            assert!(a <= 1e-10 && b <= 1e-10, "angles {} {}", a, b);
        }
    }

    #[test]
    fn rotation_commutes_with_span() {
        // Multiplying by e^{i theta} is an orthogonal map of R^{2n}, so the
        // rotated point spans the rotated plane.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let v = gaussian_vec(&mut rng, 3);
        let w = gaussian_vec(&mut rng, 3);
        let p = StiefelPoint::new(Field::C, v, w).unwrap();
        let theta = 0.9;
        let (plane_rot, _) = projections(&p.rotate(theta).unwrap()).unwrap();
        let (plane, _) = projections(&p).unwrap();
        let rot = |u: &[f64]| -> Vec<f64> {
            u.chunks(2)
                .flat_map(|ab| {
                    let z = C64::new(ab[0], ab[1]) * C64::from_polar(1.0, theta);
                    [z.re, z.im]
                })
                .collect()
        };
        let expected =
            OrientedPlane::from_pair(&rot(plane.frame().0), &rot(plane.frame().1)).unwrap();
        assert!(plane_rot.same_oriented(&expected, 1e-10));
    }

    #[test]
    fn canonical_representatives_are_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let x = gaussian_vec(&mut rng, 5);
            let r: f64 = rng.random_range(0.1..9.0);
            let phase = C64::from_polar(rng.random_range(0.1..4.0), rng.random_range(0.0..2.0 * PI));
            let sx: Vec<C64> = x.iter().map(|a| a * r).collect();
            let px: Vec<C64> = x.iter().map(|a| a * phase).collect();
            assert!(
                SphereClass::new(&x)
                    .unwrap()
                    .distance(&SphereClass::new(&sx).unwrap())
                    <= 1e-10
            );
            assert!(
                ProjClass::new(&x)
                    .unwrap()
                    .distance(&ProjClass::new(&px).unwrap())
                    <= 1e-10
            );
        }
    }

    #[test]
    fn basis_change_sends_linear_model_onto_cone() {
        for field in [Field::R, Field::C] {
            for n in [2usize, 3, 4, 5] {
                let samples = sample_cone_prime(n, field, 50, 2024 + n as u64).unwrap();
                for t in samples {
                    let rep = in_cone_prime(&t, field, 1e-9);
                    assert!(rep.ok, "sampler left the linear model: {:?}", rep);
                    let p = cone_from_t(field, &t).unwrap();
                    let cone = in_cone(&p, 1e-9);
                    assert!(cone.ok, "image not in cone: {:?}", cone);
                }
            }
        }
        // n = 1 over C as well (over R the locus degenerates to a point).
        for t in sample_cone_prime(1, Field::C, 50, 77).unwrap() {
            assert!(in_cone(&cone_from_t(Field::C, &t).unwrap(), 1e-9).ok);
        }
        assert!(matches!(
            sample_cone_prime(1, Field::R, 1, 0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn interleave_round_trip() {
        let v = cvec(&[(1.0, 2.0), (3.0, 4.0)]);
        let w = cvec(&[(5.0, 6.0), (7.0, 8.0)]);
        let x = interleave_pair(&v, &w).unwrap();
        assert_eq!(x[1], C64::new(5.0, 6.0));
        let (v2, w2) = split_interleaved(&x).unwrap();
        assert_eq!(v, v2);
        assert_eq!(w, w2);
    }

    #[test]
    fn frozen_n1_complex_example() {
        // v = (1), w = (i): phase-orthogonal unit pair.
        let p = StiefelPoint::new(Field::C, cvec(&[(1.0, 0.0)]), cvec(&[(0.0, 1.0)])).unwrap();
        let rep = in_cone(&p, 1e-12);
        assert!(rep.ok);
        assert_abs_diff_eq!(rep.re_inner, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inner(p.v(), p.w()).im, 1.0, epsilon = 1e-15);
    }
}
