//! Group-equivariance suite: the boundary curve, the matrix
//! representation, the developing map, the frame cocycle, and the
//! reduction of membership tests to the base point.

use polycone::devmap::{
    developing, equivariance_check, fs_distance, left_action_frame_check, theta_gamma,
};
use polycone::higgsflat::UHPoint;
use polycone::hpoly::{Basis, HPoly, RP1Point};
use polycone::kset::{in_k, mobius, subspace_angles, v_curve, SubspaceBasis};
use polycone::slrep::{act, rotation, sym_rep_matrix, SL2R};
use polycone::stiefel::{sample_cone_prime, Field};
use polycone::{Error, C64};
use rand::Rng;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{cvec_json, run_check, CheckOutcome, CheckRecord};

use super::{
    field_salt, field_tag, gauss_cvec, par_max, random_sl2, random_uh, scaled, stream_rng,
    SKIP_REAL_N1, SKIP_SAMPLED,
};

const SALT_CURVE: u64 = 0x31;
const SALT_REP: u64 = 0x32;
const SALT_DEV: u64 = 0x33;
const SALT_FRAME: u64 = 0x34;
const SALT_BASE: u64 = 0x35;

fn base_i() -> UHPoint {
    UHPoint::new(0.0, 1.0).expect("i lies in the half-plane")
}

/// Triangular group element moving the base point i to z, chosen so the
/// associated boundary-cocycle phase at i vanishes.
fn to_point(z: &UHPoint) -> SL2R {
    let y = z.y().sqrt();
    SL2R::from_rows(y, z.x() / y, 0.0, 1.0 / y).expect("unimodular by construction")
}

fn g_json(g: &SL2R) -> serde_json::Value {
    let m = g.matrix();
    json!([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let n = cfg.n;
    let mut out = Vec::new();

    out.push(run_check("equivariance/curve", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 10, 20, 2000);
        let draw = |i: usize| -> (SL2R, RP1Point) {
            let mut rng = stream_rng(cfg.seed, SALT_CURVE, i as u64);
            let g = random_sl2(&mut rng);
            let alpha: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let t = RP1Point::new(alpha.cos(), alpha.sin()).expect("unit direction");
            (g, t)
        };
        let angle = |g: &SL2R, t: &RP1Point| -> Result<f64, Error> {
            let before = v_curve(t, n)?;
            let moved = SubspaceBasis::new(before.polys().iter().map(|p| act(g, p)).collect())?;
            let target = v_curve(&mobius(g, t)?, n)?;
            let angles = subspace_angles(&moved, &target)?;
            Ok(angles.into_iter().fold(0.0, f64::max))
        };
        let (worst, idx) = par_max(count, |i| {
            let (g, t) = draw(i);
            angle(&g, &t).unwrap_or(f64::INFINITY)
        })
        .expect("count > 0");
        let (g, t) = draw(idx);
        Ok(CheckOutcome::gate(
            worst <= 1e-8,
            worst,
            json!({ "g": g_json(&g), "t": [t.a(), t.b()] }),
        ))
    }));

    out.push(run_check("equivariance/representation", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 10, 20, 5000);
        let draw = |i: usize| -> (SL2R, SL2R, HPoly) {
            let mut rng = stream_rng(cfg.seed, SALT_REP, i as u64);
            let g = random_sl2(&mut rng);
            let h = random_sl2(&mut rng);
            let p = HPoly::new(n, Basis::XY, gauss_cvec(&mut rng, 2 * n))
                .expect("full-length coefficient vector");
            (g, h, p)
        };
        let residual = |g: &SL2R, h: &SL2R, p: &HPoly| -> f64 {
            let gh = g.compose(h);
            let m_gh = sym_rep_matrix(&gh, n);
            let m_prod = sym_rep_matrix(g, n) * sym_rep_matrix(h, n);
            let scale = m_gh.iter().fold(1e-300f64, |a, &b| a.max(b.abs()));
            let mat = (&m_gh - &m_prod)
                .iter()
                .fold(0.0f64, |a, &b| a.max(b.abs()))
                / scale;
            let via_matrix: Vec<C64> = {
                let c = p.coeffs_in(Basis::XY);
                (0..2 * n)
                    .map(|i| (0..2 * n).map(|j| c[j] * m_gh[(i, j)]).sum())
                    .collect()
            };
            let direct = act(&gh, p).coeffs_in(Basis::XY);
            let pscale = direct.iter().map(|a| a.norm()).fold(1e-300, f64::max);
            let action = direct
                .iter()
                .zip(&via_matrix)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                / pscale;
            mat.max(action)
        };
        let (worst, idx) = par_max(count, |i| {
            let (g, h, p) = draw(i);
            residual(&g, &h, &p)
        })
        .expect("count > 0");
        let (g, h, _) = draw(idx);
        Ok(CheckOutcome::gate(
            worst <= 1e-10,
            worst,
            json!({ "g": g_json(&g), "h": g_json(&h) }),
        ))
    }));

    for field in cfg.field.fields() {
        let name = format!("equivariance/developing/{}", field_tag(field));
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
                cfg.seed.wrapping_add(SALT_DEV + field_salt(field)),
            )?;
            let (worst, idx) = par_max(count, |i| {
                let mut rng = stream_rng(cfg.seed, SALT_DEV + field_salt(field), i as u64);
                let g = random_sl2(&mut rng);
                let z = random_uh(&mut rng);
                equivariance_check(&g, &z, &ts[i], n).unwrap_or(f64::INFINITY)
            })
            .expect("count > 0");
            let mut rng = stream_rng(cfg.seed, SALT_DEV + field_salt(field), idx as u64);
            let g = random_sl2(&mut rng);
            let z = random_uh(&mut rng);
            Ok(CheckOutcome::gate(
                worst <= 1e-8,
                worst,
                json!({
                    "g": g_json(&g),
                    "z": [z.x(), z.y()],
                    "t": cvec_json(&ts[idx]),
                }),
            ))
        }));
    }

    out.push(run_check("equivariance/frame_cocycle", || {
        // Deterministic core: the identity and a pure rotation at i.
        let mut worst = left_action_frame_check(&SL2R::identity(), &base_i())?;
        worst = worst.max(left_action_frame_check(&rotation(0.4), &base_i())?);
        let sampled = if cfg.samples == 0 {
            None
        } else {
            let count = scaled(cfg.samples, 10, 20, 5000);
            Some(
                par_max(count, |i| {
                    let mut rng = stream_rng(cfg.seed, SALT_FRAME, i as u64);
                    let g = random_sl2(&mut rng);
                    let z = random_uh(&mut rng);
                    left_action_frame_check(&g, &z).unwrap_or(f64::INFINITY)
                })
                .expect("count > 0"),
            )
        };
        let witness = match sampled {
            Some((value, idx)) if value >= worst => {
                worst = value;
                let mut rng = stream_rng(cfg.seed, SALT_FRAME, idx as u64);
                let g = random_sl2(&mut rng);
                let z = random_uh(&mut rng);
                json!({ "g": g_json(&g), "z": [z.x(), z.y()] })
            }
            _ => json!({ "g": "fixed probe", "z": [0.0, 1.0] }),
        };
        Ok(CheckOutcome::gate(worst <= 1e-10, worst, witness))
    }));

    for field in cfg.field.fields() {
        let name = format!("equivariance/base_reduction/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let tol_cluster = cfg.tol_cluster_resolved();
            let tol_real = cfg.tol_real_resolved();
            let count = scaled(cfg.samples, 10, 20, 2000);
            let ts = sample_cone_prime(
                n,
                field,
                count,
                cfg.seed.wrapping_add(SALT_BASE + field_salt(field)),
            )?;
            let probe = |i: usize| -> Result<f64, Error> {
                let mut rng = stream_rng(cfg.seed, SALT_BASE + field_salt(field), i as u64);
                let z = random_uh(&mut rng);
                let gz = to_point(&z);
                // The reduction element has vanishing cocycle phase, so
                // the fiber coordinates move untouched.
                if theta_gamma(&gz, &base_i()).abs() > 1e-12 {
                    return Ok(f64::INFINITY);
                }
                let at_z = developing(&z, &ts[i], n)?;
                let at_i = developing(&base_i(), &ts[i], n)?;
                let rep = sym_rep_matrix(&gz, n);
                let c = at_i.coeffs_in(Basis::XY);
                let moved: Vec<C64> = (0..2 * n)
                    .map(|r| (0..2 * n).map(|j| c[j] * rep[(r, j)]).sum())
                    .collect();
                let transported = HPoly::new(n, Basis::XY, moved)?;
                let d = fs_distance(&at_z, &transported)?;
                let k_z = in_k(&at_z, tol_cluster, tol_real)?;
                let k_i = in_k(&at_i, tol_cluster, tol_real)?;
                if k_z.member != k_i.member {
                    return Ok(f64::INFINITY);
                }
                Ok(d)
            };
            let (worst, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
                .expect("count > 0");
            let mut rng = stream_rng(cfg.seed, SALT_BASE + field_salt(field), idx as u64);
            let z = random_uh(&mut rng);
            Ok(CheckOutcome::gate(
                worst <= 1e-8,
                worst,
                json!({ "z": [z.x(), z.y()], "t": cvec_json(&ts[idx]) }),
            ))
        }));
    }

    out
}
