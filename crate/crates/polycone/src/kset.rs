//! The equivariant curve and the limit set K.
//!
//! For each real projective parameter `[a:b]` the curve value is the
//! n-dimensional subspace of degree-(2n-1) polynomials divisible by
//! `(aX + bY)^n`.  The union of the projective classes of all such
//! polynomials is the limit set `K`; membership is decided by counting
//! real root multiplicities, and its complement `Omega` is the domain on
//! which the later constructions live.

use crate::hpoly::{real_root_multiplicity, Basis, HForm, HPoly, RP1Point, RootReport};
use crate::slrep::SL2R;
use crate::stiefel::gaussian_vec;
use crate::{C64, Error, Result};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A list of polynomials spanning a subspace of the degree-(2n-1) space.
///
/// Construction checks genuine spanning: after normalising each
/// coefficient column, the minimum singular value must exceed `1e-8`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    polys: Vec<HPoly>,
}

impl SubspaceBasis {
    pub fn new(polys: Vec<HPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::Invalid("empty basis".into()));
        }
        let n = polys[0].n();
        if polys.iter().any(|p| p.n() != n) {
            return Err(Error::BasisMismatch);
        }
        let m = frame_matrix(&polys)?;
        let min_sv = m
            .svd(false, false)
            .singular_values
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_sv <= 1e-8 {
            return Err(Error::Invalid(format!(
                "rank-deficient basis (min singular value {min_sv:.3e})"
            )));
        }
        Ok(Self { polys })
    }

    pub fn polys(&self) -> &[HPoly] {
        &self.polys
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }
}

/// Normalised coefficient-column matrix of a polynomial list (XY basis).
fn frame_matrix(polys: &[HPoly]) -> Result<DMatrix<C64>> {
    let rows = polys[0].degree() + 1;
    let mut m = DMatrix::from_element(rows, polys.len(), C64::new(0.0, 0.0));
    for (j, p) in polys.iter().enumerate() {
        let c = p.coeffs_in(Basis::XY);
        let norm = c.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        for (i, a) in c.iter().enumerate() {
            m[(i, j)] = a / norm;
        }
    }
    Ok(m)
}

/// Principal angles (radians, increasing) between the spans of two bases
/// of equal dimension, using the hybrid cosine/sine formulation that stays
/// accurate for angles near zero.
pub fn subspace_angles(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<Vec<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::BadLength {
            got: b.dim(),
            expected: a.dim(),
        });
    }
    let q1 = frame_matrix(&a.polys)?.qr().q();
    let q2 = frame_matrix(&b.polys)?.qr().q();
    if q1.nrows() != q2.nrows() {
        return Err(Error::BasisMismatch);
    }
    let c = q1.adjoint() * &q2;
    let mut cos: Vec<f64> = c
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    cos.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let residual = &q2 - &q1 * &c;
    let mut sin: Vec<f64> = residual
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sin.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok((0..a.dim())
        .map(|k| {
            if cos[k] > std::f64::consts::FRAC_1_SQRT_2 {
                sin[k].asin()
            } else {
                cos[k].acos()
            }
        })
        .collect())
}

/// The curve value at `t = [a:b]`: the span of
/// `(aX + bY)^n X^j Y^{n-1-j}` for `j = 0..n-1`.
pub fn v_curve(t: &RP1Point, n: usize) -> Result<SubspaceBasis> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let ell = HForm::linear(Basis::XY, C64::new(t.a(), 0.0), C64::new(t.b(), 0.0));
    let factor = ell.pow(n);
    let x = HForm::linear(Basis::XY, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let y = HForm::linear(Basis::XY, C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let mut polys = Vec::with_capacity(n);
    for j in 0..n {
        let mono = x.pow(n - 1 - j).mul(&y.pow(j))?;
        polys.push(HPoly::from_form(factor.mul(&mono)?)?);
    }
    SubspaceBasis::new(polys)
}

/// The action on the curve parameter induced by the substitution action on
/// linear forms: the coefficient pair maps by the inverse transpose, which
/// is the usual Moebius action on the root of the form.
pub fn mobius(g: &SL2R, t: &RP1Point) -> Result<RP1Point> {
    let m = g.inverse().matrix().transpose();
    RP1Point::new(
        m[(0, 0)] * t.a() + m[(0, 1)] * t.b(),
        m[(1, 0)] * t.a() + m[(1, 1)] * t.b(),
    )
}

/// Outcome of a limit-set membership test.
#[derive(Debug, Clone, Copy)]
pub struct KReport {
    /// Whether some real point carries root multiplicity at least `n`.
    pub member: bool,
    /// The maximal real multiplicity found at the given tolerances.
    pub mult: usize,
    /// Set when the verdict flips anywhere on the 3x3 tolerance grid
    /// `{tol/10, tol, 10 tol}` in either tolerance — the decision then
    /// depends on the tolerance choice and should not be trusted.
    pub ambiguous: bool,
}

/// Tests membership of the projective class of `p` in the limit set:
/// `member` iff the largest real root multiplicity is at least `p.n()`.
pub fn in_k(p: &HPoly, tol_cluster: f64, tol_real: f64) -> Result<KReport> {
    let n = p.n();
    let center: RootReport = real_root_multiplicity(p, tol_cluster, tol_real)?;
    let member = center.max_real_mult >= n;
    // Ambiguity here is decision-relevant only: the root-level report flags
    // every near-boundary margin, but a flag that cannot flip the
    // membership verdict (say, a lone root grazing the real axis) must not
    // poison it.  Re-deciding across a 100x tolerance range in each axis
    // is the propagated form of that sensitivity.
    let mut ambiguous = false;
    for fc in [0.1, 1.0, 10.0] {
        for fr in [0.1, 1.0, 10.0] {
            if fc == 1.0 && fr == 1.0 {
                continue;
            }
            let rep = real_root_multiplicity(p, tol_cluster * fc, tol_real * fr)?;
            if (rep.max_real_mult >= n) != member {
                ambiguous = true;
            }
        }
    }
    Ok(KReport {
        member,
        mult: center.max_real_mult,
        ambiguous,
    })
}

/// Clustering tolerance adequate for an n-fold root: an exact multiplicity-m
/// root is resolved by the eigenvalue solver only at the eps^(1/m) scale,
/// so the default scales accordingly (floored at 1e-6).
pub fn default_k_tolerance(n: usize) -> f64 {
    let eps = f64::EPSILON;
    (20.0 * eps.powf(1.0 / n as f64)).max(1e-6)
}

/// Membership test at the multiplicity-aware default tolerance.
pub fn in_k_default(p: &HPoly) -> Result<KReport> {
    let tol = default_k_tolerance(p.n());
    in_k(p, tol, tol)
}

/// Draws `count` members of the limit set: `(aX + bY)^n Q` with a random
/// real direction `[a:b]` and random complex `Q` of degree `n-1`.
pub fn sample_k(n: usize, count: usize, seed: u64) -> Result<Vec<HPoly>> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let dir = loop {
            let g = gaussian_vec(&mut rng, 1)[0];
            if g.norm() > 0.1 {
                break g;
            }
        };
        let ell = HForm::linear(
            Basis::XY,
            C64::new(dir.re / dir.norm(), 0.0),
            C64::new(dir.im / dir.norm(), 0.0),
        );
        let q = loop {
            let coeffs = gaussian_vec(&mut rng, n);
            if coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-4 {
                break HForm::new(Basis::XY, coeffs)?;
            }
        };
        out.push(HPoly::from_form(ell.pow(n).mul(&q)?)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slrep::{act, circle_act, exp_sl2};
    use rand::Rng;
    use std::f64::consts::PI;

    fn poly_xy(n: usize, coeffs: &[(f64, f64)]) -> HPoly {
        HPoly::new(
            n,
            Basis::XY,
            coeffs.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn curve_frozen_values() {
        let b = v_curve(&RP1Point::new(1.0, 0.0).unwrap(), 2).unwrap();
        // (X)^2 {X, Y} = {X^3, X^2 Y}.
        let c0 = b.polys()[0].coeffs_in(Basis::XY);
        let c1 = b.polys()[1].coeffs_in(Basis::XY);
        assert!((c0[0] - C64::new(1.0, 0.0)).norm() < 1e-15 && c0[1].norm() < 1e-15);
        assert!((c1[1] - C64::new(1.0, 0.0)).norm() < 1e-15 && c1[0].norm() < 1e-15);

        let b2 = v_curve(&RP1Point::new(0.0, 1.0).unwrap(), 2).unwrap();
        // (Y)^2 {X, Y} = {X Y^2, Y^3}.
        let d0 = b2.polys()[0].coeffs_in(Basis::XY);
        let d1 = b2.polys()[1].coeffs_in(Basis::XY);
        assert!((d0[2] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((d1[3] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn curve_members_lie_in_limit_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in [2usize, 3] {
            let tol = default_k_tolerance(n).max(1e-4);
            for _ in 0..20 {
                let theta: f64 = rng.random_range(0.0..PI);
                let t = RP1Point::new(theta.cos(), theta.sin()).unwrap();
                let basis = v_curve(&t, n).unwrap();
                for p in basis.polys() {
                    let rep = in_k(p, tol, tol).unwrap();
                    assert!(rep.member, "basis element escaped K at n={n}");
                }
                // A random combination keeps the n-fold factor.
                let coeffs = gaussian_vec(&mut rng, n);
                let mut combo = HPoly::zero(n, Basis::XY);
                for (c, p) in coeffs.iter().zip(basis.polys()) {
                    combo = combo.add(&p.scale(*c)).unwrap();
                }
                if combo.norm() > 1e-6 {
                    let rep = in_k(&combo, tol, tol).unwrap();
                    assert!(rep.member && rep.mult >= n);
                }
            }
        }
    }

    #[test]
    fn curve_equivariance_with_dual_moebius_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for n in [2usize, 3] {
            for _ in 0..25 {
                let g = exp_sl2(
                    rng.random_range(-0.7..0.7),
                    rng.random_range(-0.7..0.7),
                    rng.random_range(-0.7..0.7),
                );
                let theta: f64 = rng.random_range(0.0..PI);
                let t = RP1Point::new(theta.cos(), theta.sin()).unwrap();
                let moved = v_curve(&mobius(&g, &t).unwrap(), n).unwrap();
                let pushed = SubspaceBasis::new(
                    v_curve(&t, n)
                        .unwrap()
                        .polys()
                        .iter()
                        .map(|p| act(&g, p))
                        .collect(),
                )
                .unwrap();
                let angles = subspace_angles(&moved, &pushed).unwrap();
                let worst = angles.last().copied().unwrap();
                assert!(worst <= 1e-8, "angle {worst:.3e} at n={n}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        // X^2 Y: double real root at [0:1].
        let p = poly_xy(2, &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let rep = in_k_default(&p).unwrap();
        assert!(rep.member && rep.mult >= 2 && !rep.ambiguous);

        // (X-Y)(X-2Y)(X-3Y): three distinct real roots.
        let ell = |r: f64| HForm::linear(Basis::XY, C64::new(1.0, 0.0), C64::new(-r, 0.0));
        let q = HPoly::from_form(ell(1.0).mul(&ell(2.0)).unwrap().mul(&ell(3.0)).unwrap()).unwrap();
        let rep = in_k_default(&q).unwrap();
        assert!(!rep.member && rep.mult == 1 && !rep.ambiguous);

        // Z^3: triple root at z = i, no real roots at all.
        let z3 = HPoly::monomial(2, Basis::ZW, 3).unwrap();
        let rep = in_k_default(&z3).unwrap();
        assert!(!rep.member && !rep.ambiguous);
    }

    #[test]
    fn triple_real_root_needs_matching_tolerance() {
        // X^3 for n=2: the triple root at zero is peeled off exactly.
        let p = HPoly::monomial(2, Basis::XY, 0).unwrap();
        let rep = in_k_default(&p).unwrap();
        assert!(rep.member && rep.mult == 3 && !rep.ambiguous);

        // (X-Y)^3: a triple root away from zero scatters at the eps^(1/3)
        // scale, so membership needs a tolerance of about 1e-4.
        let ell = HForm::linear(Basis::XY, C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        let q = HPoly::from_form(ell.pow(3)).unwrap();
        let rep = in_k(&q, 1e-4, 1e-4).unwrap();
        assert!(rep.member && rep.mult == 3);
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        for n in [2usize, 3, 4] {
            let samples = sample_k(n, 40, 99).unwrap();
            assert_eq!(samples.len(), 40);
            for p in &samples {
                let rep = in_k_default(p).unwrap();
                assert!(rep.member, "sample_k produced a non-member at n={n}");
            }
        }
        let a = sample_k(3, 5, 7).unwrap();
        let b = sample_k(3, 5, 7).unwrap();
        for (p, q) in a.iter().zip(&b) {
            for (x, y) in p.coeffs().iter().zip(q.coeffs()) {
                assert_eq!(x, y);
            }
        }
        assert!(sample_k(2, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn limit_set_is_rotation_and_flow_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for p in sample_k(2, 25, 123).unwrap() {
            let theta: f64 = rng.random_range(0.0..2.0 * PI);
            let rep = in_k_default(&circle_act(theta, &p)).unwrap();
            assert!(rep.member, "circle action left K");
            let g = exp_sl2(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            );
            let rep = in_k_default(&act(&g, &p)).unwrap();
            assert!(rep.member, "group action left K");
        }
    }

    #[test]
    fn complement_is_open_in_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let ell = |r: f64| HForm::linear(Basis::XY, C64::new(1.0, 0.0), C64::new(-r, 0.0));
        let omega1 =
            HPoly::from_form(ell(1.0).mul(&ell(2.0)).unwrap().mul(&ell(3.0)).unwrap()).unwrap();
        let omega2 = HPoly::monomial(2, Basis::ZW, 3).unwrap().to_basis(Basis::XY);
        for base in [omega1, omega2] {
            for _ in 0..20 {
                let noise: Vec<C64> = gaussian_vec(&mut rng, 4)
                    .into_iter()
                    .map(|a| a * 1e-9)
                    .collect();
                let perturbed = base
                    .add(&HPoly::new(2, Basis::XY, noise).unwrap())
                    .unwrap();
                let rep = in_k_default(&perturbed).unwrap();
                assert!(!rep.member && !rep.ambiguous);
            }
        }
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        let p = HPoly::monomial(2, Basis::XY, 0).unwrap();
        assert!(SubspaceBasis::new(vec![p.clone(), p.scale(C64::new(2.0, 0.0))]).is_err());
    }
}
