//! Frame-cone suite: the interleaving basis change lands in the cone,
//! the two-sided group action stays there, the paired-coordinate circle
//! conjugates to the block rotation, and the fiber map onto symmetric
//! matrices is equivariant.

use nalgebra::{DMatrix, Matrix2};
use polycone::slrep::{basis_change_a, basis_change_a_inv, phi_embedded, phi_prime_diag, rot2};
use polycone::stiefel::{
    act_group, cone_from_t, diag_fiber_map, in_cone, projections, sample_cone_prime, Field,
    StiefelPoint,
};
use polycone::{Error, C64};
use rand::Rng;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{cvec_json, run_check, CheckOutcome, CheckRecord};

use super::{
    field_salt, field_tag, gauss_cvec, gauss_rvec, max_entry, par_max, random_unitary, scaled,
    stream_rng, SKIP_REAL_N1, SKIP_SAMPLED,
};

const SALT_BASIS: u64 = 0x81;
const SALT_ACTION: u64 = 0x82;
const SALT_CONJ: u64 = 0x83;
const SALT_FIBER: u64 = 0x84;
const SALT_PROJ: u64 = 0x85;

fn cone_residual_of(p: &StiefelPoint, field: Field) -> f64 {
    let rep = in_cone(p, 1e-9);
    let mut r = rep.re_inner.max(rep.norm_gap);
    if field == Field::R {
        r = r.max(rep.im_inner);
    }
    r / rep.scale.max(1e-300)
}

/// Random orthogonal 2x2 matrix; reflections included.
fn random_o2(rng: &mut rand_chacha::ChaCha8Rng) -> Matrix2<f64> {
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    if rng.random_range(0..2) == 0 {
        rot2(theta)
    } else {
        let (s, c) = theta.sin_cos();
        Matrix2::new(c, s, s, -c)
    }
}

fn random_point(rng: &mut rand_chacha::ChaCha8Rng, n: usize, field: Field) -> StiefelPoint {
    loop {
        let (v, w) = match field {
            Field::C => (gauss_cvec(rng, n), gauss_cvec(rng, n)),
            Field::R => (gauss_rvec(rng, n), gauss_rvec(rng, n)),
        };
        if let Ok(p) = StiefelPoint::new(field, v, w) {
            return p;
        }
    }
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let n = cfg.n;
    let mut out = Vec::new();

    for field in cfg.field.fields() {
        let name = format!("stiefel/basis_change/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let ts = sample_cone_prime(
                n,
                field,
                cfg.samples,
                cfg.seed.wrapping_add(SALT_BASIS + field_salt(field)),
            )?;
            let (worst, idx) = par_max(cfg.samples, |i| match cone_from_t(field, &ts[i]) {
                Ok(p) => cone_residual_of(&p, field),
                Err(_) => f64::INFINITY,
            })
            .expect("samples > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-9,
                worst,
                json!({ "t": cvec_json(&ts[idx]) }),
            ))
        }));
    }

    for field in cfg.field.fields() {
        let name = format!("stiefel/cone_transport/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 10, 20, 5000);
            let ts = sample_cone_prime(
                n,
                field,
                count,
                cfg.seed.wrapping_add(SALT_ACTION + field_salt(field)),
            )?;
            let probe = |i: usize| -> Result<f64, Error> {
                let mut rng = stream_rng(cfg.seed, SALT_ACTION + field_salt(field), i as u64);
                let a = random_unitary(&mut rng, n, field);
                let b = random_o2(&mut rng);
                let p = cone_from_t(field, &ts[i])?;
                let moved = act_group(&p, &a, &b)?;
                Ok(cone_residual_of(&moved, field))
            };
            let (worst, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
                .expect("count > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-9,
                worst,
                json!({ "t": cvec_json(&ts[idx]) }),
            ))
        }));
    }

    out.push(run_check("stiefel/conjugation", || {
        // Fixed angles keep this meaningful when sampling is disabled.
        let mut thetas = vec![
            0.0,
            0.37,
            std::f64::consts::FRAC_PI_4,
            1.0,
            2.2,
            std::f64::consts::PI,
            4.0,
            5.5,
        ];
        if cfg.samples > 0 {
            let extra = scaled(cfg.samples, 100, 20, 200);
            for i in 0..extra {
                let mut rng = stream_rng(cfg.seed, SALT_CONJ, i as u64);
                thetas.push(rng.random_range(0.0..std::f64::consts::TAU));
            }
        }
        let mut worst = 0.0f64;
        let mut at = (0usize, 0.0f64);
        for k in 1..=n {
            let a = basis_change_a(k);
            let a_inv = basis_change_a_inv(k);
            for &theta in &thetas {
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(phi_prime_diag(
                    theta, k,
                )));
                let lhs = &a * d * &a_inv;
                let target = phi_embedded(theta, k).map(|x| C64::new(x, 0.0));
                let r = max_entry(&(lhs - target));
                if r > worst {
                    worst = r;
                    at = (k, theta);
                }
            }
        }
        Ok(CheckOutcome::gate(
            worst <= 1e-10,
            worst,
            json!({ "n": at.0, "theta": at.1 }),
        ))
    }));

    for field in cfg.field.fields() {
        let name = format!("stiefel/fiber_map/{}", field_tag(field));
        out.push(run_check(&name, || {
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 10, 20, 5000);
            let probe = |i: usize| -> Result<f64, Error> {
                let mut rng = stream_rng(cfg.seed, SALT_FIBER + field_salt(field), i as u64);
                let p = random_point(&mut rng, n, field);
                let a = random_unitary(&mut rng, n, field);
                let b = random_o2(&mut rng);
                let moved = act_group(&p, &a, &b)?;
                let lhs = diag_fiber_map(&moved);
                let h = diag_fiber_map(&p);
                // (A, B) . M = A M B^{-1} = A M B^T, so the fiber image
                // conjugates the other way: h -> B h B^T.
                let rhs = b * h * b.transpose();
                let scale = h.abs().max().max(1e-300);
                Ok((lhs - rhs).abs().max() / scale)
            };
            let (worst, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
                .expect("count > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-10,
                worst,
                json!({ "sample": idx }),
            ))
        }));
    }

    for field in cfg.field.fields() {
        let name = format!("stiefel/projections/{}", field_tag(field));
        out.push(run_check(&name, || {
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 10, 20, 2000);
            let probe = |i: usize| -> Result<f64, Error> {
                let mut rng = stream_rng(cfg.seed, SALT_PROJ + field_salt(field), i as u64);
                let p = random_point(&mut rng, n, field);
                let scale_factor = rng.random_range(0.3..3.0);
                let (plane, class) = projections(&p)?;
                let scaled_p = p.scale(scale_factor);
                let (plane2, class2) = projections(&scaled_p)?;
                let mut r = class.distance(&class2);
                if !plane.same_oriented(&plane2, 1e-9) {
                    return Ok(f64::INFINITY);
                }
                if field == Field::C {
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    let (_, class3) = projections(&p.rotate(theta)?)?;
                    r = r.max(class.distance(&class3));
                }
                Ok(r)
            };
            let (worst, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
                .expect("count > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-10,
                worst,
                json!({ "sample": idx }),
            ))
        }));
    }

    out
}
