//! The invariant pairing `q` on odd-degree polynomials and its cone.
//!
//! For a positive palindromic weight vector `lambda` the pairing couples
//! adjacent even/odd coefficients in the Z/W basis.  Its null cone
//! carries the diagonal flow monotonically (the value of `q` along the
//! flow is strictly increasing), which keeps the cone's projective
//! classes away from the limit set of module [`crate::kset`].  This
//! module provides the pairing, the canonical weights, transversality
//! certificates (exact rational and statistical), cone samplers for both
//! scalar fields, the flow-monotonicity report, and the nonintersection
//! check itself.

use crate::hpoly::{binomial, Basis, HPoly};
use crate::kset::{in_k, KReport};
use crate::slrep::{act, diag_flow, lie_act_g0, SL2R};
use crate::stiefel::{gaussian_vec, sample_cone_prime, Field, ProjClass};
use crate::{C64, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Positive palindromic weight vector `lambda_0 .. lambda_{n-1}`.
#[derive(Debug, Clone)]
pub struct Lambda {
    weights: Vec<f64>,
}

impl Lambda {
    /// Validates positivity and palindromy (`lambda_k = lambda_{n-1-k}`
    /// within `1e-12`).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("empty weight vector".into()));
        }
        if weights.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Invalid("weights must be positive".into()));
        }
        let n = weights.len();
        for k in 0..n {
            if (weights[k] - weights[n - 1 - k]).abs() > 1e-12 {
                return Err(Error::Invalid(format!(
                    "weights must be palindromic: w[{k}] = {} vs w[{}] = {}",
                    weights[k],
                    n - 1 - k,
                    weights[n - 1 - k]
                )));
            }
        }
        Ok(Self { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when these are the canonical weights for their size (to within
    /// a relative `1e-14`), enabling the exact certificate path.
    pub fn is_canonical(&self) -> bool {
        let canon = default_lambda(self.n());
        self.weights
            .iter()
            .zip(canon.weights())
            .all(|(a, b)| (a - b).abs() <= 1e-14 * b)
    }
}

/// The canonical weights `lambda_k = (C(2n-1,2k) C(2n-1,2k+1))^{-1/2}`.
///
/// The binomial product is computed exactly in integers before the single
/// floating square root, so palindromy holds bit-for-bit.
pub fn default_lambda(n: usize) -> Lambda {
    let d = (2 * n - 1) as u64;
    let weights = (0..n)
        .map(|k| {
            let prod = binomial(d, 2 * k as u64) * binomial(d, 2 * k as u64 + 1);
            1.0 / (prod as f64).sqrt()
        })
        .collect();
    Lambda { weights }
}

fn zw(p: &HPoly) -> Vec<C64> {
    p.coeffs_in(Basis::ZW)
}

fn check_sizes(lambda: &Lambda, p: &HPoly) -> Result<()> {
    if p.n() != lambda.n() {
        return Err(Error::BadLength {
            got: p.n(),
            expected: lambda.n(),
        });
    }
    Ok(())
}

/// The pairing `q(P,Q) = 1/2 sum_k lambda_k (p_{2k} conj(q_{2k+1}) +
/// q_{2k} conj(p_{2k+1}))` on Z/W coefficients.
///
/// It is symmetric, real-bilinear, and `q(P,P) = sum_k lambda_k p_{2k}
/// conj(p_{2k+1})`.
pub fn q_lambda(lambda: &Lambda, p: &HPoly, q: &HPoly) -> Result<C64> {
    check_sizes(lambda, p)?;
    check_sizes(lambda, q)?;
    let pc = zw(p);
    let qc = zw(q);
    let mut acc = C64::new(0.0, 0.0);
    for (k, &l) in lambda.weights.iter().enumerate() {
        acc += (pc[2 * k] * qc[2 * k + 1].conj() + qc[2 * k] * pc[2 * k + 1].conj()) * (0.5 * l);
    }
    Ok(acc)
}

/// `q(P,P)`, the defining quantity of the null cone.
pub fn q_self(lambda: &Lambda, p: &HPoly) -> Result<C64> {
    check_sizes(lambda, p)?;
    let pc = zw(p);
    Ok(lambda
        .weights
        .iter()
        .enumerate()
        .map(|(k, &l)| pc[2 * k] * pc[2 * k + 1].conj() * l)
        .sum())
}

/// Closed form of `q(P, g0.P)` for real `P` and palindromic weights:
/// `sum_k lambda_k ((2n-1-2k)|p_{2k}|^2 + (2k+2) p_{2k} conj(p_{2k+2}))`.
pub fn real_g0_pairing_closed_form(lambda: &Lambda, p: &HPoly) -> Result<C64> {
    check_sizes(lambda, p)?;
    let pc = zw(p);
    let n = lambda.n();
    let mut acc = C64::new(0.0, 0.0);
    for (k, &l) in lambda.weights.iter().enumerate() {
        let diag = pc[2 * k].norm_sqr() * (2 * n - 1 - 2 * k) as f64;
        let cross = if 2 * k + 2 < 2 * n {
            pc[2 * k] * pc[2 * k + 2].conj() * (2 * k + 2) as f64
        } else {
            C64::new(0.0, 0.0)
        };
        acc += (C64::new(diag, 0.0) + cross) * l;
    }
    Ok(acc)
}

/// `Re q(P', g0.P')` for the unit rescaling `P'` of `P` (Z/W coefficient
/// norm); positive margins certify transversality of the flow direction.
pub fn transversality_margin(lambda: &Lambda, p: &HPoly) -> Result<f64> {
    check_sizes(lambda, p)?;
    let norm = p.norm();
    if norm == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let v = q_lambda(lambda, p, &lie_act_g0(p))?;
    Ok(v.re / (norm * norm))
}

fn big(v: u128) -> BigInt {
    BigInt::from_u128(v).unwrap()
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Square of the first proof constant:
/// `b_k^2 = (2n-2k-1)(2n-2k) 2k / (2k+1)`.
fn b_sq(n: usize, k: usize) -> BigRational {
    let m = (2 * n - 2 * k - 1) as u128;
    ratio(big(m * (m + 1) * 2 * k as u128), big(2 * k as u128 + 1))
}

/// Square of the second proof constant:
/// `c_k^2 = (2n-2k-2)(2n-2k-1)(2k+2) / (2k+1)`.
fn c_sq(n: usize, k: usize) -> BigRational {
    let m = (2 * n - 2 * k - 1) as u128;
    ratio(big((m - 1) * m * (2 * k as u128 + 2)), big(2 * k as u128 + 1))
}

/// Square of the canonical weight as an exact rational.
fn lambda_sq_exact(n: usize, k: usize) -> BigRational {
    let d = (2 * n - 1) as u64;
    let prod = binomial(d, 2 * k as u64) * binomial(d, 2 * k as u64 + 1);
    ratio(BigInt::from(1), big(prod))
}

/// Exact check of the first transversality inequality,
/// `2n-2k-1 > (b_k + c_k)/2` for `k = 0..n-1`, via the identity
/// `2(2n-2k-1)^2 - (b_k^2 + c_k^2) = 2(2n-2k-1)/(2k+1)` and the
/// quadratic-arithmetic mean bound; everything runs on exact squares.
pub fn gap_inequality_exact(n: usize) -> Result<()> {
    for k in 0..n {
        let m = (2 * n - 2 * k - 1) as u128;
        let lhs = ratio(big(2 * m * m), big(1)) - (b_sq(n, k) + c_sq(n, k));
        let expected = ratio(big(2 * m), big(2 * k as u128 + 1));
        if lhs != expected {
            return Err(Error::Invalid(format!(
                "gap identity failed at n={n}, k={k}"
            )));
        }
        if lhs <= BigRational::zero() {
            return Err(Error::Invalid(format!(
                "mean inequality not strict at n={n}, k={k}"
            )));
        }
    }
    Ok(())
}

/// Exact check of the second transversality relation for the canonical
/// weights: `lambda_{k+1}^2 b_{k+1}^2 c_k^2 >= (2k+2)^4 lambda_k^2` for
/// `k = 0..n-2`.
///
/// For the canonical weights this holds as an exact equality (the two
/// sides share the closed form `(2k+1)(2k+2)^2(2k+3)` over
/// `(2n-2k-1)(2n-2k-2)^2(2n-2k-3)` after dividing by `lambda_k^2`), which
/// makes the cross-term bound in the positivity argument tight; strict
/// positivity then rests entirely on the first inequality.  The equality
/// is asserted exactly so any drift in the constants is caught.
pub fn weight_balance_exact(n: usize) -> Result<()> {
    for k in 0..n.saturating_sub(1) {
        let lhs = lambda_sq_exact(n, k + 1) * b_sq(n, k + 1) * c_sq(n, k);
        let f = (2 * k as u128 + 2).pow(4);
        let rhs = lambda_sq_exact(n, k) * ratio(big(f), big(1));
        if lhs < rhs {
            return Err(Error::Invalid(format!(
                "weight-ratio inequality failed at n={n}, k={k}"
            )));
        }
        if lhs != rhs {
            return Err(Error::Invalid(format!(
                "weight-ratio balance expected to be exact at n={n}, k={k}"
            )));
        }
    }
    Ok(())
}

/// Transversality certificate: the exact rational inequalities (canonical
/// weights only) plus a statistical minimum margin over random unit
/// polynomials, with the minimising sample kept as a witness.
#[derive(Debug, Clone)]
pub struct TransversalityReport {
    /// Whether the exact inequalities were run (canonical weights).
    pub exact_checked: bool,
    /// Statistical minimum of the margin over the sampled polynomials.
    pub min_margin: f64,
    /// Z/W coefficients of the minimising sample.
    pub witness: Vec<C64>,
    pub samples: usize,
    pub pass: bool,
}

/// Runs both certificates; `samples` random complex polynomials are drawn
/// from the given seed.
pub fn certify_transverse(
    lambda: &Lambda,
    samples: usize,
    seed: u64,
) -> Result<TransversalityReport> {
    let n = lambda.n();
    let exact_checked = lambda.is_canonical();
    if exact_checked {
        gap_inequality_exact(n)?;
        weight_balance_exact(n)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    let mut witness = Vec::new();
    for _ in 0..samples {
        let coeffs = loop {
            let c = gaussian_vec(&mut rng, 2 * n);
            if c.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6 {
                break c;
            }
        };
        let p = HPoly::new(n, Basis::ZW, coeffs)?;
        let margin = transversality_margin(lambda, &p)?;
        if margin < min_margin {
            min_margin = margin;
            witness = p.coeffs_in(Basis::ZW);
        }
    }
    let pass = samples == 0 || min_margin > 0.0;
    Ok(TransversalityReport {
        exact_checked,
        min_margin,
        witness,
        samples,
        pass,
    })
}

/// Draws `count` members of the null cone `{q(P,P) = 0}`.
///
/// Over `C` all coefficients are Gaussian and the single complex
/// constraint is solved for `p_1` (rejecting `|p_0| < 0.1`).  Over `R`
/// points of the linear-model cone are drawn and pushed through the
/// diagonal weight rescaling, which preserves the reality condition
/// because the weights are palindromic.
pub fn sample_c_lambda(
    lambda: &Lambda,
    field: Field,
    count: usize,
    seed: u64,
) -> Result<Vec<HPoly>> {
    let n = lambda.n();
    match field {
        Field::C => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let mut p = loop {
                    let c = gaussian_vec(&mut rng, 2 * n);
                    if c[0].norm() >= 0.1 {
                        break c;
                    }
                };
                let rest: C64 = (1..n)
                    .map(|k| p[2 * k] * p[2 * k + 1].conj() * lambda.weights[k])
                    .sum();
                p[1] = (-rest / (lambda.weights[0] * p[0])).conj();
                out.push(HPoly::new(n, Basis::ZW, p)?);
            }
            Ok(out)
        }
        Field::R => {
            let ts = sample_cone_prime(n, Field::R, count, seed)?;
            ts.into_iter()
                .map(|t| {
                    let coeffs: Vec<C64> = t
                        .iter()
                        .enumerate()
                        .map(|(j, &x)| x / lambda.weights[j / 2].sqrt())
                        .collect();
                    HPoly::new(n, Basis::ZW, coeffs)
                })
                .collect()
        }
    }
}

/// Report of the flow-monotonicity check along the diagonal flow.
#[derive(Debug, Clone)]
pub struct FlowReport {
    /// `f(t) = Re q(g_t.P, g_t.P)` on the grid.
    pub values: Vec<f64>,
    /// Minimum of the analytic derivative `2 Re q(g_t.P, g0.(g_t.P))`.
    pub min_derivative: f64,
    /// Worst relative gap between analytic and centered finite-difference
    /// derivatives.
    pub max_fd_rel_err: f64,
    /// Strictly increasing along the grid.
    pub monotone: bool,
    /// `f` and `t` share signs on the grid (`|f(0)|` at cone residual).
    pub sign_ok: bool,
    pub pass: bool,
}

/// Verifies that `f(t) = Re q(g_t.P, g_t.P)` increases strictly along the
/// diagonal flow for a cone member `P`, that the analytic derivative is
/// positive and matches finite differences, and that `f` changes sign
/// exactly at `t = 0`.
pub fn flow_monotone(lambda: &Lambda, p: &HPoly, t_grid: &[f64]) -> Result<FlowReport> {
    check_sizes(lambda, p)?;
    let norm2 = p.norm() * p.norm();
    let residual = q_self(lambda, p)?.norm();
    if residual > 1e-8 * norm2 {
        return Err(Error::ConstraintViolated {
            residual: residual / norm2,
        });
    }
    let f = |t: f64| -> Result<f64> {
        let pt = act(&diag_flow(t), p);
        Ok(q_self(lambda, &pt)?.re)
    };
    let fp = |t: f64| -> Result<f64> {
        let pt = act(&diag_flow(t), p);
        Ok(2.0 * q_lambda(lambda, &pt, &lie_act_g0(&pt))?.re)
    };
    let mut values = Vec::with_capacity(t_grid.len());
    let mut min_derivative = f64::INFINITY;
    let mut max_fd_rel_err: f64 = 0.0;
    let mut sign_ok = true;
    let h = 1e-5;
    for &t in t_grid {
        let v = f(t)?;
        values.push(v);
        let d = fp(t)?;
        min_derivative = min_derivative.min(d);
        let fd = (f(t + h)? - f(t - h)?) / (2.0 * h);
        max_fd_rel_err = max_fd_rel_err.max((d - fd).abs() / d.abs().max(1e-300));
        if t.abs() > 1e-6 && v.signum() != t.signum() {
            sign_ok = false;
        }
        if t.abs() <= 1e-6 && v.abs() > 1e-7 * norm2 {
            sign_ok = false;
        }
    }
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let pass = monotone && sign_ok && min_derivative > 0.0 && max_fd_rel_err <= 1e-6;
    Ok(FlowReport {
        values,
        min_derivative,
        max_fd_rel_err,
        monotone,
        sign_ok,
        pass,
    })
}

/// Report of the cone-avoids-limit-set check.
#[derive(Debug, Clone)]
pub struct NonIntersectReport {
    pub samples: usize,
    /// Minimum over samples of `n - max_real_mult` (must stay positive).
    pub min_mult_slack: i64,
    /// Smallest root-cluster separation seen in any sample.
    pub worst_cluster_gap: f64,
    /// Samples whose membership verdict was tolerance-sensitive.
    pub ambiguous_count: usize,
    /// Z/W coefficients of the sample attaining the minimum slack.
    pub worst_witness: Vec<C64>,
    pub pass: bool,
}

/// Draws cone members and verifies that none of them lies in the limit
/// set: every sample must be an unambiguous non-member.  Reports the
/// worst multiplicity slack and the smallest cluster separation.
pub fn nonintersect_check(
    lambda: &Lambda,
    field: Field,
    samples: usize,
    seed: u64,
    tol_cluster: f64,
    tol_real: f64,
) -> Result<NonIntersectReport> {
    let n = lambda.n();
    let polys = sample_c_lambda(lambda, field, samples, seed)?;
    let mut min_mult_slack = i64::MAX;
    let mut worst_cluster_gap = f64::INFINITY;
    let mut ambiguous_count = 0usize;
    let mut worst_witness = Vec::new();
    let mut all_nonmember = true;
    for p in &polys {
        let rep: KReport = in_k(p, tol_cluster, tol_real)?;
        if rep.member {
            all_nonmember = false;
        }
        if rep.ambiguous {
            ambiguous_count += 1;
        }
        let slack = n as i64 - rep.mult as i64;
        if slack < min_mult_slack {
            min_mult_slack = slack;
            worst_witness = p.coeffs_in(Basis::ZW);
        }
        let root_rep = crate::hpoly::real_root_multiplicity(p, tol_cluster, tol_real)?;
        for c in &root_rep.clusters {
            if c.gap.is_finite() {
                worst_cluster_gap = worst_cluster_gap.min(c.gap);
            }
        }
    }
    if samples == 0 {
        min_mult_slack = n as i64;
    }
    let pass = all_nonmember && ambiguous_count == 0 && min_mult_slack > 0;
    Ok(NonIntersectReport {
        samples,
        min_mult_slack,
        worst_cluster_gap,
        ambiguous_count,
        worst_witness,
        pass,
    })
}

/// The orbit map: the projective class of `g.P` in XY coefficients.
pub fn phi_map(g: &SL2R, p: &HPoly) -> Result<ProjClass> {
    ProjClass::new(&act(g, p).coeffs_in(Basis::XY))
}

/// Local-injectivity margin of the orbit map at `P`: the modulus of
/// `q(P, g0.P)` at unit scale.  A positive value certifies that the flow
/// direction leaves the cone's tangent space.
pub fn phi_injectivity_margin(lambda: &Lambda, p: &HPoly) -> Result<f64> {
    check_sizes(lambda, p)?;
    let norm = p.norm();
    if norm == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let v = q_lambda(lambda, p, &lie_act_g0(p))?;
    Ok(v.norm() / (norm * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kset::in_k_default;
    use crate::slrep::{circle_act, exp_sl2, rotation};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn zw_poly(n: usize, coeffs: &[(f64, f64)]) -> HPoly {
        HPoly::new(
            n,
            Basis::ZW,
            coeffs.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap()
    }

    fn ones_lambda(n: usize) -> Lambda {
        Lambda::new(vec![1.0; n]).unwrap()
    }

    fn random_real_poly(n: usize, rng: &mut ChaCha8Rng) -> HPoly {
        // Reality in the Z/W basis: p_k = conj(p_{2n-1-k}).
        let half = gaussian_vec(rng, n);
        let mut coeffs = half.clone();
        coeffs.extend(half.iter().rev().map(|a| a.conj()));
        HPoly::new(n, Basis::ZW, coeffs).unwrap()
    }

    #[test]
    fn frozen_pairing_values() {
        let l = ones_lambda(2);
        let z3 = HPoly::monomial(2, Basis::ZW, 3).unwrap();
        assert_abs_diff_eq!(q_self(&l, &z3).unwrap().norm(), 0.0, epsilon = 1e-15);

        let p = zw_poly(2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let v = q_self(&l, &p).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let w = q_lambda(&l, &p, &p).unwrap();
        assert_abs_diff_eq!((v - w).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pairing_is_symmetric_and_real_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = default_lambda(3);
        for _ in 0..50 {
            let p = HPoly::new(3, Basis::ZW, gaussian_vec(&mut rng, 6)).unwrap();
            let q = HPoly::new(3, Basis::ZW, gaussian_vec(&mut rng, 6)).unwrap();
            let r = HPoly::new(3, Basis::ZW, gaussian_vec(&mut rng, 6)).unwrap();
            let a: f64 = rng.random_range(-2.0..2.0);
            let qpq = q_lambda(&l, &p, &q).unwrap();
            assert_abs_diff_eq!(
                (qpq - q_lambda(&l, &q, &p).unwrap()).norm(),
                0.0,
                epsilon = 1e-12
            );
            let lin = q_lambda(&l, &p.scale(C64::new(a, 0.0)).add(&r).unwrap(), &q).unwrap();
            let expect = qpq * a + q_lambda(&l, &r, &q).unwrap();
            assert_abs_diff_eq!((lin - expect).norm(), 0.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn rotation_covariance() {
        // Rotating both arguments by the inverse rotation scales the
        // pairing by e^{2 i theta}; the forward rotation gives the
        // conjugate factor.  Checked for 100 random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 3] {
            let l = default_lambda(n);
            for _ in 0..34 {
                let p = HPoly::new(n, Basis::ZW, gaussian_vec(&mut rng, 2 * n)).unwrap();
                let q = HPoly::new(n, Basis::ZW, gaussian_vec(&mut rng, 2 * n)).unwrap();
                let theta: f64 = rng.random_range(0.0..2.0 * PI);
                let base = q_lambda(&l, &p, &q).unwrap();
                let fwd = q_lambda(&l, &circle_act(theta, &p), &circle_act(theta, &q)).unwrap();
                let factor = C64::from_polar(1.0, -2.0 * theta);
                assert_abs_diff_eq!((fwd - base * factor).norm(), 0.0, epsilon = 1e-10);
                let inv_rot = rotation(-theta);
                let bwd = q_lambda(&l, &act(&inv_rot, &p), &act(&inv_rot, &q)).unwrap();
                let factor2 = C64::from_polar(1.0, 2.0 * theta);
                assert_abs_diff_eq!((bwd - base * factor2).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn canonical_weights() {
        let l2 = default_lambda(2);
        assert_abs_diff_eq!(l2.weights()[0], 3f64.powf(-0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(l2.weights()[1], 3f64.powf(-0.5), epsilon = 1e-15);
        let l1 = default_lambda(1);
        assert_abs_diff_eq!(l1.weights()[0], 1.0, epsilon = 0.0);
        for n in 1..=20 {
            let l = default_lambda(n);
            for k in 0..n {
                // Bit-exact palindromy thanks to integer binomials.
                assert_eq!(l.weights()[k], l.weights()[n - 1 - k]);
            }
            assert!(l.is_canonical());
        }
        assert!(Lambda::new(vec![1.0, 2.0]).is_err());
        assert!(Lambda::new(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn frozen_margin_for_cubic_monomial() {
        // P = Z^3, canonical weights (n = 2): margin = (3/2) lambda_1
        // at unit norm, i.e. sqrt(3)/2.
        let l = default_lambda(2);
        let z3 = HPoly::monomial(2, Basis::ZW, 3).unwrap();
        let m = transversality_margin(&l, &z3).unwrap();
        assert_abs_diff_eq!(m, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        // Scale invariance.
        let m2 = transversality_margin(&l, &z3.scale(C64::new(2.0, 0.0))).unwrap();
        assert_abs_diff_eq!(m, m2, epsilon = 1e-12);
        // Weight scaling is linear.
        let l_eps = Lambda::new(vec![0.01, 0.01]).unwrap();
        let l_one = ones_lambda(2);
        let a = transversality_margin(&l_eps, &z3).unwrap();
        let b = transversality_margin(&l_one, &z3).unwrap();
        assert_abs_diff_eq!(a, 0.01 * b, epsilon = 1e-14);
    }

    #[test]
    fn real_to_complex_margin_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3] {
            let l = default_lambda(n);
            for _ in 0..25 {
                let a = random_real_poly(n, &mut rng);
                let b = random_real_poly(n, &mut rng);
                let p = a.add(&b.scale(C64::new(0.0, 1.0))).unwrap();
                let pair = |x: &HPoly| q_lambda(&l, x, &lie_act_g0(x)).unwrap().re;
                assert_abs_diff_eq!(pair(&p), pair(&a) + pair(&b), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_matches_generic_pairing_for_real_polys() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4usize {
            let l = default_lambda(n);
            for _ in 0..50 {
                let p = random_real_poly(n, &mut rng);
                let generic = q_lambda(&l, &p, &lie_act_g0(&p)).unwrap();
                let closed = real_g0_pairing_closed_form(&l, &p).unwrap();
                assert_abs_diff_eq!((generic - closed).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn exact_inequalities_hold_up_to_n_20() {
        for n in 1..=20usize {
            gap_inequality_exact(n).unwrap();
            weight_balance_exact(n).unwrap();
        }
    }

    #[test]
    fn certification_reports_positive_minimum() {
        for n in 2..=4usize {
            let l = default_lambda(n);
            let rep = certify_transverse(&l, 2000, 1234).unwrap();
            assert!(rep.exact_checked);
            assert!(rep.pass && rep.min_margin > 0.0);
            assert_eq!(rep.witness.len(), 2 * n);
            // The witness reproduces the reported margin.
            let w = HPoly::new(n, Basis::ZW, rep.witness.clone()).unwrap();
            let m = transversality_margin(&l, &w).unwrap();
            assert_abs_diff_eq!(m, rep.min_margin, epsilon = 1e-12);
        }
    }

    #[test]
    fn cone_samples_satisfy_constraints() {
        for n in 1..=4usize {
            let l = default_lambda(n);
            for p in sample_c_lambda(&l, Field::C, 100, 42).unwrap() {
                let res = q_self(&l, &p).unwrap().norm();
                assert!(res <= 1e-10 * p.norm() * p.norm());
            }
            if n >= 2 {
                for p in sample_c_lambda(&l, Field::R, 100, 43).unwrap() {
                    let res = q_self(&l, &p).unwrap().norm();
                    assert!(res <= 1e-10 * p.norm() * p.norm());
                    assert!(p.reality_residual() <= 1e-12 * p.norm());
                }
            }
        }
        assert!(sample_c_lambda(&default_lambda(1), Field::R, 1, 0).is_err());
    }

    #[test]
    fn frozen_real_cone_member() {
        // p = (e^{-3 i pi / 4}, 0, 0, e^{3 i pi / 4}): real and null.
        let l = default_lambda(2);
        let p = HPoly::new(
            2,
            Basis::ZW,
            vec![
                C64::from_polar(1.0, -3.0 * FRAC_PI_4),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, 3.0 * FRAC_PI_4),
            ],
        )
        .unwrap();
        assert!(p.reality_residual() <= 1e-15);
        assert_abs_diff_eq!(q_self(&l, &p).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn flow_is_monotone_on_cone_samples() {
        let grid: Vec<f64> = (0..101).map(|i| -2.0 + 0.04 * i as f64).collect();
        for n in [2usize, 3] {
            let l = default_lambda(n);
            for field in [Field::C, Field::R] {
                for p in sample_c_lambda(&l, field, 10, 77).unwrap() {
                    let rep = flow_monotone(&l, &p, &grid).unwrap();
                    assert!(
                        rep.pass,
                        "flow report failed: monotone={} sign={} min_d={} fd={}",
                        rep.monotone, rep.sign_ok, rep.min_derivative, rep.max_fd_rel_err
                    );
                }
            }
        }
    }

    #[test]
    fn flow_check_rejects_non_cone_members() {
        let l = ones_lambda(2);
        let p = zw_poly(2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            flow_monotone(&l, &p, &[0.0]),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn cone_avoids_limit_set_in_samples() {
        use crate::hpoly::{DEFAULT_TOL_CLUSTER, DEFAULT_TOL_REAL};
        for n in [2usize, 3] {
            let l = default_lambda(n);
            for field in [Field::C, Field::R] {
                let rep = nonintersect_check(
                    &l,
                    field,
                    300,
                    2718,
                    DEFAULT_TOL_CLUSTER,
                    DEFAULT_TOL_REAL,
                )
                .unwrap();
                assert!(
                    rep.pass,
                    "n={n} {field:?}: slack={} ambiguous={}",
                    rep.min_mult_slack, rep.ambiguous_count
                );
                assert!(rep.min_mult_slack >= 1);
                assert_eq!(rep.ambiguous_count, 0);
            }
        }
    }

    #[test]
    fn orbit_map_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let l = default_lambda(2);
        let samples = sample_c_lambda(&l, Field::C, 30, 99).unwrap();
        for p in &samples {
            // Identity maps to the class of P itself.
            let id_class = phi_map(&SL2R::identity(), p).unwrap();
            let direct = ProjClass::new(&p.coeffs_in(Basis::XY)).unwrap();
            assert!(id_class.distance(&direct) <= 1e-12);
            // The image stays outside the limit set.
            let g = exp_sl2(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.8..0.8),
            );
            let moved = act(&g, p);
            assert!(!in_k_default(&moved).unwrap().member);
            // Local injectivity margin is positive on the cone.
            assert!(phi_injectivity_margin(&l, p).unwrap() > 1e-6);
        }
        // Distinct random source data yield distinct projective images.
        for i in 0..(samples.len() - 1) {
            let g1 = exp_sl2(0.1 * i as f64, -0.2, 0.05);
            let g2 = exp_sl2(-0.3, 0.1 * i as f64 + 0.05, -0.1);
            let c1 = phi_map(&g1, &samples[i]).unwrap();
            let c2 = phi_map(&g2, &samples[i + 1]).unwrap();
            assert!(c1.distance(&c2) > 1e-9);
        }
    }
}
