//! Exact-inverse suite for the n = 2 root parametrizations: forward and
//! inverse round trips on both components (including the branch through
//! infinity), the parameter polynomials' root content, and rejection of
//! degenerate inputs.  The construction is specific to n = 2, so this
//! suite ignores `--n`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use polycone::devmap::{
    f1_point, f2_point, n2_forward, n2_inverse, omega2_forward, omega2_inverse, N2Params,
    Omega2Params,
};
use polycone::hpoly::{chordal_sphere, real_root_multiplicity, RP1Point};
use polycone::kset::in_k_default;
use polycone::{Error, C64};
use rand::Rng;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{run_check, CheckOutcome, CheckRecord};

use super::{par_max, scaled, stream_rng, SKIP_SAMPLED};

const SALT_OMEGA1: u64 = 0x91;
const SALT_OMEGA2: u64 = 0x92;
const SALT_POLY: u64 = 0x93;

fn draw_n2(rng: &mut rand_chacha::ChaCha8Rng, force_infinity: bool) -> N2Params {
    let theta_prime = if force_infinity {
        FRAC_PI_2
    } else {
        rng.random_range(FRAC_PI_4..7.0 * PI / 12.0 - 1e-9)
    };
    N2Params::new(
        theta_prime,
        rng.random_range(0.05..3.0),
        rng.random_range(1e-2..PI - 1e-2),
    )
    .expect("parameters inside the domain")
}

fn round_trip_n2(p: &N2Params) -> Result<f64, Error> {
    let roots = n2_forward(p);
    let q = n2_inverse(&roots)?;
    let back = n2_forward(&q);
    let mut err = (q.theta_prime - p.theta_prime).abs();
    err = err.max((q.r - p.r).abs() / (1.0 + p.r));
    err = err.max((q.phi - p.phi).abs());
    for (a, b) in roots.iter().zip(&back) {
        err = err.max(a.chordal(b));
    }
    Ok(err)
}

fn draw_omega2(rng: &mut rand_chacha::ChaCha8Rng, force_infinity: bool) -> Omega2Params {
    let theta = if force_infinity {
        FRAC_PI_4
    } else {
        rng.random_range(0.0..PI - 1e-9)
    };
    Omega2Params::new(
        theta,
        rng.random_range(0.05..3.0),
        rng.random_range(1e-2..PI - 1e-2),
    )
    .expect("parameters inside the domain")
}

fn round_trip_omega2(p: &Omega2Params) -> Result<f64, Error> {
    let (zroot, a) = omega2_forward(p);
    let q = omega2_inverse(zroot, &a)?;
    let mut err = (q.theta - p.theta).abs();
    err = err.max((q.r - p.r).abs() / (1.0 + p.r));
    err = err.max((q.phi - p.phi).abs());
    Ok(err)
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();

    out.push(run_check("n2/omega1_roundtrip", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = cfg.samples;
        let (worst, idx) = par_max(count, |i| {
            let mut rng = stream_rng(cfg.seed, SALT_OMEGA1, i as u64);
            let p = draw_n2(&mut rng, i % 89 == 7);
            round_trip_n2(&p).unwrap_or(f64::INFINITY)
        })
        .expect("count > 0");
        let mut rng = stream_rng(cfg.seed, SALT_OMEGA1, idx as u64);
        let p = draw_n2(&mut rng, idx % 89 == 7);
        Ok(CheckOutcome::gate(
            worst <= 1e-9,
            worst,
            json!({ "theta_prime": p.theta_prime, "r": p.r, "phi": p.phi }),
        ))
    }));

    out.push(run_check("n2/omega2_roundtrip", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = cfg.samples;
        let (worst, idx) = par_max(count, |i| {
            let mut rng = stream_rng(cfg.seed, SALT_OMEGA2, i as u64);
            let p = draw_omega2(&mut rng, i % 101 == 13);
            round_trip_omega2(&p).unwrap_or(f64::INFINITY)
        })
        .expect("count > 0");
        let mut rng = stream_rng(cfg.seed, SALT_OMEGA2, idx as u64);
        let p = draw_omega2(&mut rng, idx % 101 == 13);
        Ok(CheckOutcome::gate(
            worst <= 1e-9,
            worst,
            json!({ "theta": p.theta, "r": p.r, "phi": p.phi }),
        ))
    }));

    out.push(run_check("n2/parameter_polynomials", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 10, 20, 1000);
        let probe = |i: usize| -> Result<f64, Error> {
            let mut rng = stream_rng(cfg.seed, SALT_POLY, i as u64);
            // Regenerate until the three roots separate enough for the
            // polynomial root finder to resolve them cleanly.
            let (p, roots) = loop {
                let p = draw_n2(&mut rng, false);
                let roots = n2_forward(&p);
                let mut sep = f64::INFINITY;
                for a in 0..3 {
                    for b in a + 1..3 {
                        sep = sep.min(roots[a].chordal(&roots[b]));
                    }
                }
                if sep > 1e-3 {
                    break (p, roots);
                }
            };
            let poly = f1_point(&p)?;
            let mut worst: f64 = poly.reality_residual();
            let report = real_root_multiplicity(&poly, 1e-6, 1e-6)?;
            if report.clusters.len() != 3 || in_k_default(&poly)?.member {
                return Ok(f64::INFINITY);
            }
            for r in &roots {
                let target = r.to_real().map(|x| C64::new(x, 0.0));
                let gap = report
                    .clusters
                    .iter()
                    .filter(|c| c.is_real)
                    .map(|c| chordal_sphere(c.center, target))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(gap);
            }
            let p2 = draw_omega2(&mut rng, false);
            let (zroot, a) = omega2_forward(&p2);
            let poly2 = f2_point(&p2)?;
            worst = worst.max(poly2.reality_residual());
            let rep2 = real_root_multiplicity(&poly2, 1e-6, 1e-6)?;
            let complex_gap = rep2
                .clusters
                .iter()
                .filter(|c| !c.is_real)
                .map(|c| chordal_sphere(c.center, Some(zroot)))
                .fold(f64::INFINITY, f64::min);
            let real_target = a.to_real().map(|x| C64::new(x, 0.0));
            let real_gap = rep2
                .clusters
                .iter()
                .filter(|c| c.is_real)
                .map(|c| chordal_sphere(c.center, real_target))
                .fold(f64::INFINITY, f64::min);
            Ok(worst.max(complex_gap).max(real_gap))
        };
        let (worst, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
            .expect("count > 0");
        Ok(CheckOutcome::gate(
            worst <= 1e-6,
            worst,
            json!({ "sample": idx }),
        ))
    }));

    out.push(run_check("n2/degenerate_rejection", || {
        let coincident = [
            RP1Point::from_real(1.0),
            RP1Point::from_real(1.0),
            RP1Point::from_real(2.0),
        ];
        let mut ok = n2_inverse(&coincident).is_err();
        ok &= omega2_inverse(C64::new(0.3, -1.0), &RP1Point::from_real(0.0)).is_err();
        ok &= N2Params::new(0.1, 1.0, 0.5).is_err();
        ok &= Omega2Params::new(0.5, -1.0, 0.5).is_err();
        Ok(CheckOutcome::gate_exact(ok))
    }));

    out
}
