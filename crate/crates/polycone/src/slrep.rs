//! The 2n-dimensional irreducible representation of SL(2,R) on homogeneous
//! polynomials of degree 2n-1, together with the circle action, the
//! infinitesimal action of the diagonal generator, and the paired-coordinate
//! change of basis.
//!
//! The substitution convention is fixed once here and everything else is
//! cross-checked against it: for `g` with inverse `[[a, b], [c, d]]`,
//!
//! ```text
//! (g . P)(X, Y) = P(a X + b Y, c X + d Y).
//! ```
//!
//! In the rotated pair this makes the counterclockwise rotation by `theta`
//! act as `Z -> e^(i theta) Z`, `W -> e^(-i theta) W`, so the coefficient
//! `p_k` of `Z^k W^(2n-1-k)` picks up the phase `e^(i (2k - (2n-1)) theta)`.

use crate::hpoly::{Basis, HForm, HPoly};
use crate::{C64, Error, Result};
use nalgebra::{DMatrix, Matrix2};

/// Element of SL(2,R); construction validates the determinant.
#[derive(Clone, Copy, Debug)]
pub struct SL2R(Matrix2<f64>);

impl SL2R {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let residual = (m.determinant() - 1.0).abs();
        if residual > 1e-9 {
            return Err(Error::NotInGroup { residual });
        }
        Ok(Self(m))
    }

    pub fn from_rows(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(Matrix2::new(a, b, c, d))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    /// Exact inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        let m = &self.0;
        Self(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    /// Composition `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Inverse-transpose, the dual group element.
    pub fn inv_transpose(&self) -> Self {
        Self(self.inverse().0.transpose())
    }
}

/// Counterclockwise rotation by `theta`.
pub fn rotation(theta: f64) -> SL2R {
    let (s, c) = theta.sin_cos();
    SL2R(Matrix2::new(c, -s, s, c))
}

/// The diagonal flow `diag(e^-t, e^t)`, the exponential of the
/// infinitesimal generator `diag(-1, 1)`.
pub fn diag_flow(t: f64) -> SL2R {
    SL2R(Matrix2::new((-t).exp(), 0.0, 0.0, t.exp()))
}

/// Exponential of the traceless matrix `[[a, b], [c, -a]]`; lands in
/// SL(2,R) exactly.
pub fn exp_sl2(a: f64, b: f64, c: f64) -> SL2R {
    let delta = a * a + b * c;
    // exp(M) = cosh(sqrt(delta)) I + sinh(sqrt(delta))/sqrt(delta) M,
    // with the analytic continuation through delta <= 0.
    let (ch, sh_over) = if delta > 1e-12 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if delta < -1e-12 {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        (1.0 + delta / 2.0, 1.0 + delta / 6.0)
    };
    let m = Matrix2::new(ch + sh_over * a, sh_over * b, sh_over * c, ch - sh_over * a);
    // Renormalize away the last-bit determinant drift.
    let det = m.determinant();
    SL2R(m / det.sqrt())
}

/// The substitution action of `g` on `P`, returned in `P`'s basis.
pub fn act(g: &SL2R, p: &HPoly) -> HPoly {
    let inv = g.inverse();
    let m = inv.matrix();
    let sub = [
        C64::new(m[(0, 0)], 0.0),
        C64::new(m[(0, 1)], 0.0),
        C64::new(m[(1, 0)], 0.0),
        C64::new(m[(1, 1)], 0.0),
    ];
    let xy = p.form().to_basis(Basis::XY);
    let moved = xy.substitute_xy(sub).expect("XY basis");
    let out = HPoly::from_form(moved.to_basis(p.basis())).expect("degree preserved");
    out
}

/// Matrix of [`act`]`(g, .)` on `XY` coefficient vectors (real entries).
pub fn sym_rep_matrix(g: &SL2R, n: usize) -> DMatrix<f64> {
    let dim = 2 * n;
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let e = HPoly::monomial(n, Basis::XY, k).expect("valid index");
        let col = act(g, &e);
        for (i, c) in col.coeffs().iter().enumerate() {
            out[(i, k)] = c.re;
        }
    }
    out
}

/// Matrix of the dual action `g -> act((g^-1)^T, .)` on `XY` coefficients.
pub fn iota_bar(g: &SL2R, n: usize) -> DMatrix<f64> {
    sym_rep_matrix(&g.inv_transpose(), n)
}

/// Infinitesimal action of the generator `diag(-1, 1)` on a general
/// homogeneous form: `X P_X - Y P_Y`, equivalently `Z P_W + W P_Z`.
pub fn lie_act_g0_form(f: &HForm) -> HForm {
    let zw = f.to_basis(Basis::ZW);
    let d = zw.degree();
    let p = zw.coeffs();
    let mut out = vec![C64::new(0.0, 0.0); d + 1];
    for k in 0..=d {
        let mut acc = C64::new(0.0, 0.0);
        if k + 1 <= d {
            acc += (k as f64 + 1.0) * p[k + 1];
        }
        if k >= 1 {
            acc += (d as f64 - k as f64 + 1.0) * p[k - 1];
        }
        out[k] = acc;
    }
    HForm::new(Basis::ZW, out).expect("same degree").to_basis(f.basis())
}

/// [`lie_act_g0_form`] on a degree 2n-1 polynomial.
pub fn lie_act_g0(p: &HPoly) -> HPoly {
    HPoly::from_form(lie_act_g0_form(p.form())).expect("degree preserved")
}

/// Action of the counterclockwise rotation by `theta`, applied diagonally
/// on `(Z, W)` coefficients: `p_k -> e^(i (2k - (2n-1)) theta) p_k`.
/// Coincides with [`act`]`(rotation(theta), .)`.
pub fn circle_act(theta: f64, p: &HPoly) -> HPoly {
    let zw = p.coeffs_in(Basis::ZW);
    let d = p.degree() as i64;
    let coeffs: Vec<C64> = zw
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let phase = (2 * k as i64 - d) as f64 * theta;
            c * C64::new(phase.cos(), phase.sin())
        })
        .collect();
    HPoly::new(p.n(), Basis::ZW, coeffs)
        .expect("same length")
        .to_basis(p.basis())
}

/// 2x2 rotation matrix by `theta`.
pub fn rot2(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// The SO(n) factor of the paired-coordinate circle representation:
/// 2x2 rotation blocks of angles `(2n + 2 - 4i) theta` for `i = 1..`,
/// with a trailing 1x1 identity block when `n` is odd.
pub fn phi_so_n(theta: f64, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(n, n);
    let pairs = n / 2;
    for i in 1..=pairs {
        let ang = (2 * n as i64 + 2 - 4 * i as i64) as f64 * theta;
        let r = rot2(ang);
        let o = 2 * (i - 1);
        out[(o, o)] = r[(0, 0)];
        out[(o, o + 1)] = r[(0, 1)];
        out[(o + 1, o)] = r[(1, 0)];
        out[(o + 1, o + 1)] = r[(1, 1)];
    }
    if n % 2 == 1 {
        out[(n - 1, n - 1)] = 1.0;
    }
    out
}

/// Diagonal of the circle action on `2n` ordered coordinates
/// `t_1, ..., t_2n`: entry `k` (1-based) is `e^(i (2n + 1 - 2k) theta)`.
pub fn phi_prime_diag(theta: f64, n: usize) -> Vec<C64> {
    (1..=2 * n)
        .map(|k| {
            let ang = (2 * n as i64 + 1 - 2 * k as i64) as f64 * theta;
            C64::new(ang.cos(), ang.sin())
        })
        .collect()
}

/// Kronecker product `l (x) r` acting on interleaved coordinates
/// `(v_1, w_1, ..., v_n, w_n)`.
fn kron_interleaved(l: &DMatrix<f64>, r: &Matrix2<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            for a in 0..2 {
                for b in 0..2 {
                    out[(2 * i + a, 2 * j + b)] = l[(i, j)] * r[(a, b)];
                }
            }
        }
    }
    out
}

/// The paired-coordinate circle action `(L_theta, R_theta)` embedded as a
/// 2n x 2n real matrix on interleaved `(v, w)` coordinates.
pub fn phi_embedded(theta: f64, n: usize) -> DMatrix<f64> {
    kron_interleaved(&phi_so_n(theta, n), &rot2(theta))
}

/// The residual circle action downstairs: identity on the `v`-`w` pair
/// index, rotation by `theta` within each pair.
pub fn delta_embedded(theta: f64, n: usize) -> DMatrix<f64> {
    kron_interleaved(&DMatrix::identity(n, n), &rot2(theta))
}

/// Unitary change of basis from ordered coordinates `t_1..t_2n` to
/// interleaved pair coordinates `(v_1, w_1, ..., v_n, w_n)`.
///
/// It intertwines the diagonal phases [`phi_prime_diag`] with
/// [`phi_embedded`], and sends the fixed locus of
/// `t_k = conj(t_(2n+1-k))` onto real vectors.
pub fn basis_change_a(n: usize) -> DMatrix<C64> {
    let dim = 2 * n;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let half = C64::new(0.5, 0.0);
    // 4x4 block: inputs (t_(2i-1), t_2i, t_(2n+1-2i), t_(2n+2-2i)),
    // outputs (v_(2i-1), w_(2i-1), v_2i, w_2i).
    let block = [
        [one, one, one, one],
        [-i, i, -i, i],
        [-i, -i, i, i],
        [-one, one, one, -one],
    ];
    for bi in 1..=(n / 2) {
        let rows = [4 * bi - 4, 4 * bi - 3, 4 * bi - 2, 4 * bi - 1];
        let cols = [2 * bi - 2, 2 * bi - 1, dim - 2 * bi, dim + 1 - 2 * bi];
        for (r, row) in rows.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                out[(*row, *col)] = half * block[r][c];
            }
        }
    }
    if n % 2 == 1 {
        // Middle 2x2 block on (t_n, t_(n+1)) -> (v_n, w_n): the trailing
        // 1x1 identity block of the SO(n) factor couples the last pair.
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let row = 2 * n - 2;
        let col = n - 1;
        out[(row, col)] = s;
        out[(row, col + 1)] = s;
        out[(row + 1, col)] = -i * s;
        out[(row + 1, col + 1)] = i * s;
    }
    out
}

/// Conjugate transpose of [`basis_change_a`], its exact inverse
/// (the change of basis is unitary).
pub fn basis_change_a_inv(n: usize) -> DMatrix<C64> {
    basis_change_a(n).adjoint()
}

/// Applies a complex matrix to a coefficient vector.
pub fn apply_matrix(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_poly(n: usize, basis: Basis, seed: u64) -> HPoly {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..2 * n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        HPoly::new(n, basis, coeffs).unwrap()
    }

    #[test]
    fn diag_flow_scales_monomials() {
        // X^a Y^(2n-1-a) is an eigenvector of the diagonal flow with
        // eigenvalue e^(t (2a - 2n + 1)).
        let t = 0.37;
        let g = diag_flow(t);
        for n in [1usize, 2, 3] {
            let d = 2 * n - 1;
            for k in 0..2 * n {
                let a = d - k;
                let p = HPoly::monomial(n, Basis::XY, k).unwrap();
                let moved = act(&g, &p);
                let expect = (t * (2.0 * a as f64 - d as f64)).exp();
                assert_abs_diff_eq!(moved.coeffs()[k].re, expect, epsilon = 1e-12 * expect);
                let off: f64 = moved
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, c)| c.norm())
                    .sum();
                assert!(off < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_acts_diagonally_on_zw() {
        let theta = 0.83;
        let g = rotation(theta);
        let z = HPoly::monomial(1, Basis::ZW, 1).unwrap();
        let moved = act(&g, &z);
        // Z -> e^(i theta) Z
        assert!((moved.coeffs()[1] - c(theta.cos(), theta.sin())).norm() < 1e-12);
        assert!(moved.coeffs()[0].norm() < 1e-12);
    }

    #[test]
    fn circle_act_matches_substitution_action() {
        for seed in 0..20u64 {
            let theta = 0.1 + 0.31 * seed as f64;
            for n in [1usize, 2, 3] {
                let p = random_poly(n, Basis::ZW, 1000 + seed + n as u64);
                let a = circle_act(theta, &p);
                let b = act(&rotation(theta), &p);
                for k in 0..2 * n {
                    assert!((a.coeffs()[k] - b.coeffs()[k]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn lie_action_sends_z_to_w() {
        let z = HPoly::monomial(1, Basis::ZW, 1).unwrap();
        let moved = lie_act_g0(&z);
        assert!((moved.coeffs()[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(moved.coeffs()[1].norm() < 1e-14);
    }

    #[test]
    fn lie_action_matches_flow_derivative() {
        let p = random_poly(3, Basis::ZW, 7);
        let h = 1e-5;
        let plus = act(&diag_flow(h), &p);
        let minus = act(&diag_flow(-h), &p);
        let lie = lie_act_g0(&p);
        for k in 0..6 {
            let fd = (plus.coeffs()[k] - minus.coeffs()[k]) / (2.0 * h);
            assert!((fd - lie.coeffs()[k]).norm() < 1e-8);
        }
    }

    #[test]
    fn lie_action_is_a_derivation() {
        let f = HForm::new(
            Basis::XY,
            vec![c(1.0, 0.2), c(-0.5, 0.0), c(0.3, -1.0)],
        )
        .unwrap();
        let g = HForm::new(Basis::XY, vec![c(0.7, 0.0), c(0.0, 1.1)]).unwrap();
        let fg = f.mul(&g).unwrap();
        let lhs = lie_act_g0_form(&fg);
        let rhs = lie_act_g0_form(&f)
            .mul(&g)
            .unwrap()
            .add(&f.mul(&lie_act_g0_form(&g)).unwrap())
            .unwrap();
        for k in 0..lhs.coeffs().len() {
            assert!((lhs.coeffs()[k] - rhs.coeffs()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn sym_rep_matches_action_and_is_multiplicative() {
        let g = exp_sl2(0.3, -0.8, 0.5);
        let h = exp_sl2(-0.2, 0.4, 1.1);
        let n = 2;
        let mg = sym_rep_matrix(&g, n);
        let mh = sym_rep_matrix(&h, n);
        let mgh = sym_rep_matrix(&g.compose(&h), n);
        assert!((mg.clone() * mh.clone() - mgh).norm() < 1e-10);
        let p = random_poly(n, Basis::XY, 3);
        let via_matrix: Vec<C64> = {
            let m_c = mg.map(|x| C64::new(x, 0.0));
            apply_matrix(&m_c, p.coeffs())
        };
        let via_act = act(&g, &p);
        for k in 0..2 * n {
            assert!((via_matrix[k] - via_act.coeffs()[k]).norm() < 1e-10);
        }
        let dual = iota_bar(&g, n);
        let dual2 = iota_bar(&h, n);
        let dual12 = iota_bar(&g.compose(&h), n);
        assert!((dual * dual2 - dual12).norm() < 1e-10);
    }

    #[test]
    fn basis_change_is_unitary_and_realifies_fixed_points() {
        for n in 1..=5usize {
            let a = basis_change_a(n);
            let prod = &a * a.adjoint();
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)] - c(want, 0.0)).norm() < 1e-12);
                }
            }
            // tau_0-fixed input t_k = conj(t_(2n+1-k)) maps to a real vector.
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(n as u64);
            let mut t = vec![c(0.0, 0.0); 2 * n];
            for k in 0..n {
                let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                t[k] = v;
                t[2 * n - 1 - k] = v.conj();
            }
            let image = apply_matrix(&a, &t);
            for x in &image {
                assert!(x.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_change_n1_frozen_value() {
        let a = basis_change_a(1);
        let image = apply_matrix(&a, &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((image[0] - c(std::f64::consts::SQRT_2, 0.0)).norm() < 1e-14);
        assert!(image[1].norm() < 1e-14);
    }

    #[test]
    fn basis_change_n2_frozen_values() {
        let a = basis_change_a(2);
        let t1 = c(0.3, -0.9);
        let t2 = c(-1.2, 0.4);
        let t = [t1, t2, t2.conj(), t1.conj()];
        let image = apply_matrix(&a, &t);
        let want = [
            t1.re + t2.re,
            t1.im - t2.im,
            t1.im + t2.im,
            -t1.re + t2.re,
        ];
        for (got, want) in image.iter().zip(want) {
            assert!(got.im.abs() < 1e-14);
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn conjugation_relates_phases_to_block_rotations() {
        for n in 1..=5usize {
            for &theta in &[0.21, 1.7, -0.6] {
                let a = basis_change_a(n);
                let ainv = basis_change_a_inv(n);
                let mut phases = DMatrix::<C64>::zeros(2 * n, 2 * n);
                for (k, p) in phi_prime_diag(theta, n).into_iter().enumerate() {
                    phases[(k, k)] = p;
                }
                let conj = &a * phases * &ainv;
                let target = phi_embedded(theta, n);
                for i in 0..2 * n {
                    for j in 0..2 * n {
                        assert!(
                            (conj[(i, j)] - c(target[(i, j)], 0.0)).norm() < 1e-10,
                            "n={n} theta={theta} entry ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn circle_representations_are_homomorphisms() {
        let (t1, t2) = (0.4, -1.3);
        for n in 1..=4usize {
            let lhs = phi_embedded(t1, n) * phi_embedded(t2, n);
            assert!((lhs - phi_embedded(t1 + t2, n)).norm() < 1e-12);
            let lhs = delta_embedded(t1, n) * delta_embedded(t2, n);
            assert!((lhs - delta_embedded(t1 + t2, n)).norm() < 1e-12);
            let p1 = phi_prime_diag(t1, n);
            let p2 = phi_prime_diag(t2, n);
            let p12 = phi_prime_diag(t1 + t2, n);
            for k in 0..2 * n {
                assert!((p1[k] * p2[k] - p12[k]).norm() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn action_composes(
            a1 in -0.6f64..0.6, b1 in -0.6f64..0.6, c1 in -0.6f64..0.6,
            a2 in -0.6f64..0.6, b2 in -0.6f64..0.6, c2 in -0.6f64..0.6,
            seed in 0u64..1000,
        ) {
            let g = exp_sl2(a1, b1, c1);
            let h = exp_sl2(a2, b2, c2);
            let p = random_poly(2, Basis::XY, seed);
            let lhs = act(&g, &act(&h, &p));
            let rhs = act(&g.compose(&h), &p);
            for k in 0..4 {
                prop_assert!((lhs.coeffs()[k] - rhs.coeffs()[k]).norm() < 1e-9);
            }
        }

        #[test]
        fn action_is_invariant_under_basis_of_storage(
            seed in 0u64..1000, t in -0.8f64..0.8,
        ) {
            let g = exp_sl2(t, 0.3, -0.2);
            let p = random_poly(2, Basis::ZW, seed);
            let via_zw = act(&g, &p).coeffs_in(Basis::XY);
            let via_xy = act(&g, &p.to_basis(Basis::XY)).coeffs_in(Basis::XY);
            for k in 0..4 {
                prop_assert!((via_zw[k] - via_xy[k]).norm() < 1e-10);
            }
        }
    }
}
