//! Invariant-pairing suite: exact rational inequalities, circle
//! covariance, the diagonal-generator closed form, transversality
//! margins, cone sampling, and flow monotonicity.

use polycone::hpoly::{Basis, HPoly};
use polycone::qform::{
    certify_transverse, default_lambda, gap_inequality_exact, weight_balance_exact, flow_monotone, phi_injectivity_margin,
    q_lambda, q_self, real_g0_pairing_closed_form, sample_c_lambda,
};
use polycone::slrep::{circle_act, lie_act_g0};
use polycone::stiefel::Field;
use polycone::{Error, C64};
use rand::Rng;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{cvec_json, run_check, CheckOutcome, CheckRecord};

use super::{
    field_salt, field_tag, gauss_cvec, gauss_rvec, par_max, par_min, scaled, stream_rng,
    SKIP_REAL_N1, SKIP_SAMPLED,
};

const SALT_CIRCLE: u64 = 0x11;
const SALT_CLOSED: u64 = 0x12;
const SALT_CERTIFY: u64 = 0x13;
const SALT_CONE: u64 = 0x14;
const SALT_FLOW: u64 = 0x15;
const SALT_INJ: u64 = 0x16;

/// Sampled positivity gates are criterion-strength for small n; beyond
/// that the canonical weights decay combinatorially and only strict
/// positivity remains numerically meaningful.
fn margin_floor(n: usize) -> f64 {
    if n <= 6 {
        1e-4
    } else {
        0.0
    }
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let n = cfg.n;
    let lambda = default_lambda(n);
    let mut out = Vec::new();

    out.push(run_check("qform/exact_inequalities", || {
        for k in 1..=20usize.max(n) {
            gap_inequality_exact(k)?;
            weight_balance_exact(k)?;
        }
        Ok(CheckOutcome::gate_exact(true))
    }));

    out.push(run_check("qform/weights_canonical", || {
        let mut ok = true;
        for k in 1..=20usize.max(n) {
            let lam = default_lambda(k);
            let w = lam.weights();
            ok &= lam.is_canonical();
            ok &= w.iter().all(|&x| x > 0.0 && x.is_finite());
            ok &= (0..k).all(|j| w[j] == w[k - 1 - j]);
        }
        Ok(CheckOutcome::gate_exact(ok))
    }));

    out.push(run_check("qform/circle_covariance", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let draw = |i: usize| -> Result<(f64, HPoly, HPoly), Error> {
            let mut rng = stream_rng(cfg.seed, SALT_CIRCLE, i as u64);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let p = HPoly::new(n, Basis::ZW, gauss_cvec(&mut rng, 2 * n))?;
            let q = HPoly::new(n, Basis::ZW, gauss_cvec(&mut rng, 2 * n))?;
            Ok((theta, p, q))
        };
        let residual = |theta: f64, p: &HPoly, q: &HPoly| -> Result<f64, Error> {
            let moved = q_lambda(&lambda, &circle_act(theta, p), &circle_act(theta, q))?;
            let base = q_lambda(&lambda, p, q)?;
            let twist = C64::from_polar(1.0, -2.0 * theta);
            let scale = (p.norm() * q.norm()).max(1e-300);
            Ok((moved - twist * base).norm() / scale)
        };
        let (worst, idx) = par_max(cfg.samples, |i| {
            draw(i)
                .and_then(|(theta, p, q)| residual(theta, &p, &q))
                .unwrap_or(f64::INFINITY)
        })
        .expect("samples > 0");
        let (theta, p, q) = draw(idx)?;
        Ok(CheckOutcome::gate(
            worst <= 1e-10,
            worst,
            json!({
                "theta": theta,
                "p_zw": cvec_json(p.coeffs()),
                "q_zw": cvec_json(q.coeffs()),
            }),
        ))
    }));

    out.push(run_check("qform/diag_closed_form", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let draw = |i: usize| -> Result<HPoly, Error> {
            let mut rng = stream_rng(cfg.seed, SALT_CLOSED, i as u64);
            HPoly::new(n, Basis::XY, gauss_rvec(&mut rng, 2 * n))
        };
        let residual = |p: &HPoly| -> Result<f64, Error> {
            let closed = real_g0_pairing_closed_form(&lambda, p)?;
            let direct = q_lambda(&lambda, p, &lie_act_g0(p))?;
            let scale = (p.norm() * p.norm()).max(1e-300);
            Ok((closed - direct).norm() / scale)
        };
        let (worst, idx) = par_max(cfg.samples, |i| {
            draw(i).and_then(|p| residual(&p)).unwrap_or(f64::INFINITY)
        })
        .expect("samples > 0");
        let p = draw(idx)?;
        Ok(CheckOutcome::gate(
            worst <= 1e-10,
            worst,
            json!({ "p_xy": cvec_json(p.coeffs()) }),
        ))
    }));

    out.push(run_check("qform/certify_margin", || {
        if cfg.samples == 0 {
            // The exact rational half of the certificate still runs.
            let rep = certify_transverse(&lambda, 0, cfg.seed)?;
            return Ok(CheckOutcome::gate_exact(rep.pass && rep.exact_checked));
        }
        let rep = certify_transverse(&lambda, cfg.samples, cfg.seed.wrapping_add(SALT_CERTIFY))?;
        let ok = rep.pass && rep.min_margin > margin_floor(n);
        Ok(CheckOutcome::gate(
            ok,
            rep.min_margin,
            json!({ "p_zw": cvec_json(&rep.witness) }),
        ))
    }));

    for field in cfg.field.fields() {
        let name = format!("qform/cone_membership/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let ps = sample_c_lambda(
                &lambda,
                field,
                cfg.samples,
                cfg.seed.wrapping_add(SALT_CONE + field_salt(field)),
            )?;
            let residual = |p: &HPoly| -> Result<f64, Error> {
                let scale = (p.norm() * p.norm()).max(1e-300);
                let mut r = q_self(&lambda, p)?.norm() / scale;
                if field == Field::R {
                    r = r.max(p.reality_residual() / scale.sqrt());
                }
                Ok(r)
            };
            let (worst, idx) = par_max(ps.len(), |i| {
                residual(&ps[i]).unwrap_or(f64::INFINITY)
            })
            .expect("samples > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-10,
                worst,
                json!({ "p_zw": cvec_json(ps[idx].coeffs()) }),
            ))
        }));
    }

    for field in cfg.field.fields() {
        let name = format!("qform/flow_monotone/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 1000, 3, 50);
            let ps = sample_c_lambda(
                &lambda,
                field,
                count,
                cfg.seed.wrapping_add(SALT_FLOW + field_salt(field)),
            )?;
            let grid: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.04).collect();
            let (worst, idx) = par_min(ps.len(), |i| {
                match flow_monotone(&lambda, &ps[i], &grid) {
                    Ok(rep) if rep.pass => rep.min_derivative,
                    _ => f64::NEG_INFINITY,
                }
            })
            .expect("count > 0");
            Ok(CheckOutcome::gate(
                worst > 0.0,
                worst,
                json!({ "p_zw": cvec_json(ps[idx].coeffs()) }),
            ))
        }));
    }

    for field in cfg.field.fields() {
        let name = format!("qform/injectivity_margin/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 10, 10, 2000);
            let ps = sample_c_lambda(
                &lambda,
                field,
                count,
                cfg.seed.wrapping_add(SALT_INJ + field_salt(field)),
            )?;
            let (worst, idx) = par_min(ps.len(), |i| {
                phi_injectivity_margin(&lambda, &ps[i]).unwrap_or(f64::NEG_INFINITY)
            })
            .expect("count > 0");
            let floor = if n <= 6 { 1e-6 } else { 0.0 };
            Ok(CheckOutcome::gate(
                worst > floor,
                worst,
                json!({ "p_zw": cvec_json(ps[idx].coeffs()) }),
            ))
        }));
    }

    out
}
