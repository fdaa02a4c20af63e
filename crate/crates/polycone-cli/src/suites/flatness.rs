//! Flat-connection suite: transport groupoid laws, loop holonomy,
//! explicit rank-2 parallel sections, unimodularity, and compatibility
//! with the real structure.

use nalgebra::{DMatrix, DVector};
use polycone::higgsflat::{
    conn_matrices, flatness_residual, parallel_section_n1, real_structure_tau, transport_path,
    transport_segment, HiggsData, UHPoint,
};
use polycone::{Error, C64};
use rand::Rng;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{run_check, CheckOutcome, CheckRecord};

use super::{gauss_c64, gauss_cvec, max_entry, par_max, random_uh, scaled, stream_rng, SKIP_SAMPLED};

const SALT_HOLONOMY: u64 = 0x51;
const SALT_SECTIONS: u64 = 0x52;
const SALT_TAU: u64 = 0x53;
const SALT_DET: u64 = 0x54;

fn rank_list(n: usize) -> Vec<usize> {
    let mut list = vec![1, 2, n];
    list.sort_unstable();
    list.dedup();
    list
}

fn identity(d: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal_element(d, d, C64::new(1.0, 0.0))
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();

    out.push(run_check("flatness/transport_groupoid", || {
        let a = UHPoint::new(0.0, 1.0)?;
        let b = UHPoint::new(0.4, 0.7)?;
        let c = UHPoint::new(-0.3, 1.4)?;
        let mut worst = 0.0f64;
        let mut at = 0usize;
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            let fwd = transport_segment(&data, &a, &b, 64)?;
            let bwd = transport_segment(&data, &b, &a, 64)?;
            let inv = max_entry(&(&bwd * &fwd - identity(data.rank())));
            let through = transport_path(&data, &[a, b, c], 64)?;
            let direct = transport_segment(&data, &a, &c, 64)?;
            let concat = max_entry(&(&through - &direct)) / max_entry(&direct).max(1e-300);
            let r = inv.max(concat);
            if r > worst {
                worst = r;
                at = k;
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-7, worst, json!({ "n": at })))
    }));

    out.push(run_check("flatness/holonomy_base", || {
        let cases = [
            (UHPoint::new(0.3, 1.0)?, 0.5),
            (UHPoint::new(0.0, 2.0)?, 1.5),
        ];
        let mut worst = 0.0f64;
        let mut at = (0usize, 0.0f64);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            for (z, radius) in &cases {
                let r = flatness_residual(&data, z, *radius, 1024)?;
                if r > worst {
                    worst = r;
                    at = (k, *radius);
                }
            }
        }
        Ok(CheckOutcome::gate(
            worst <= 1e-6,
            worst,
            json!({ "n": at.0, "radius": at.1 }),
        ))
    }));

    out.push(run_check("flatness/holonomy", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 500, 5, 100);
        let mut worst = 0.0f64;
        let mut witness = json!(null);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            let loop_at = |i: usize| -> Result<(UHPoint, f64), Error> {
                let mut rng = stream_rng(cfg.seed, SALT_HOLONOMY + k as u64, i as u64);
                let z = random_uh(&mut rng);
                let radius = z.y() * rng.random_range(0.05..0.5);
                Ok((z, radius))
            };
            let (value, idx) = par_max(count, |i| {
                loop_at(i)
                    .and_then(|(z, radius)| flatness_residual(&data, &z, radius, 200))
                    .unwrap_or(f64::INFINITY)
            })
            .expect("count > 0");
            if value >= worst {
                worst = value;
                let (z, radius) = loop_at(idx)?;
                witness = json!({ "n": k, "z": [z.x(), z.y()], "radius": radius });
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-6, worst, witness))
    }));

    out.push(run_check("flatness/parallel_sections", || {
        let data = HiggsData::new(1)?;
        let fd_residual = |z: &UHPoint, a: C64, b: C64| -> f64 {
            let h = 1e-5;
            let s = DVector::from_vec(parallel_section_n1(z, a, b));
            let at = |x: f64, y: f64| -> DVector<C64> {
                DVector::from_vec(parallel_section_n1(
                    &UHPoint::new(x, y).expect("interior point"),
                    a,
                    b,
                ))
            };
            let dx = (at(z.x() + h, z.y()) - at(z.x() - h, z.y())) / C64::new(2.0 * h, 0.0);
            let dy = (at(z.x(), z.y() + h) - at(z.x(), z.y() - h)) / C64::new(2.0 * h, 0.0);
            let conn = conn_matrices(&data, z);
            let im = C64::new(0.0, 1.0);
            let rx = &dx + (&conn.az + &conn.azbar) * &s;
            let ry = &dy + (&conn.az * im - &conn.azbar * im) * &s;
            let scale = s.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            rx.iter()
                .chain(ry.iter())
                .map(|c| c.norm())
                .fold(0.0, f64::max)
                / scale
        };
        // Deterministic core at the base point.
        let mut worst = fd_residual(
            &UHPoint::new(0.0, 1.0)?,
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
        );
        let mut witness = json!({ "z": [0.0, 1.0], "a": [1.0, 0.0], "b": [0.0, 1.0] });
        if cfg.samples > 0 {
            let count = scaled(cfg.samples, 10, 50, 2000);
            let draw = |i: usize| -> (UHPoint, C64, C64) {
                let mut rng = stream_rng(cfg.seed, SALT_SECTIONS, i as u64);
                let z = random_uh(&mut rng);
                (z, gauss_c64(&mut rng), gauss_c64(&mut rng))
            };
            let (value, idx) = par_max(count, |i| {
                let (z, a, b) = draw(i);
                if (a.norm() + b.norm()) < 1e-3 {
                    return 0.0;
                }
                fd_residual(&z, a, b)
            })
            .expect("count > 0");
            if value >= worst {
                worst = value;
                let (z, a, b) = draw(idx);
                witness = json!({ "z": [z.x(), z.y()], "a": [a.re, a.im], "b": [b.re, b.im] });
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-7, worst, witness))
    }));

    out.push(run_check("flatness/real_structure", || {
        let mut worst = 0.0f64;
        let mut witness = json!({ "case": "involution" });
        // Deterministic core: the structure is an involution.
        for k in [1usize, 2] {
            let data = HiggsData::new(k)?;
            let z = UHPoint::new(0.3, 0.9)?;
            let v: Vec<C64> = (0..data.rank())
                .map(|j| C64::new(1.0 + j as f64, 0.5 - j as f64))
                .collect();
            let twice = real_structure_tau(&data, &z, &real_structure_tau(&data, &z, &v)?)?;
            let scale = v.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            let r = v
                .iter()
                .zip(&twice)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                / scale;
            worst = worst.max(r);
        }
        if worst > 1e-12 {
            return Ok(CheckOutcome::gate(false, worst, witness));
        }
        // Sampled: transport preserves the fixed locus.
        if cfg.samples > 0 {
            for k in [1usize, 2] {
                let data = HiggsData::new(k)?;
                let count = scaled(cfg.samples, 200, 5, 50);
                let probe = |i: usize| -> Result<f64, Error> {
                    let mut rng = stream_rng(cfg.seed, SALT_TAU + k as u64, i as u64);
                    let from = random_uh(&mut rng);
                    let to = random_uh(&mut rng);
                    let v = gauss_cvec(&mut rng, data.rank());
                    let fixed: Vec<C64> = v
                        .iter()
                        .zip(&real_structure_tau(&data, &from, &v)?)
                        .map(|(a, b)| a + b)
                        .collect();
                    let norm = fixed.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                    if norm < 1e-6 {
                        return Ok(0.0);
                    }
                    let u = transport_segment(&data, &from, &to, 64)?;
                    let moved: Vec<C64> =
                        (&u * DVector::from_column_slice(&fixed)).iter().cloned().collect();
                    let back = real_structure_tau(&data, &to, &moved)?;
                    let scale = moved.iter().map(|c| c.norm()).fold(1e-300, f64::max);
                    Ok(moved
                        .iter()
                        .zip(&back)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max)
                        / scale)
                };
                let (value, idx) = par_max(count, |i| probe(i).unwrap_or(f64::INFINITY))
                    .expect("count > 0");
                if value >= worst {
                    worst = value;
                    witness = json!({ "case": "transport", "n": k, "sample": idx });
                }
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-7, worst, witness))
    }));

    out.push(run_check("flatness/transport_unimodular", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 500, 3, 30);
        let mut worst = 0.0f64;
        let mut witness = json!(null);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            let (value, idx) = par_max(count, |i| {
                let mut rng = stream_rng(cfg.seed, SALT_DET + k as u64, i as u64);
                let from = random_uh(&mut rng);
                let to = random_uh(&mut rng);
                match transport_segment(&data, &from, &to, 64) {
                    Ok(u) => (u.determinant() - C64::new(1.0, 0.0)).norm(),
                    Err(_) => f64::INFINITY,
                }
            })
            .expect("count > 0");
            if value >= worst {
                worst = value;
                witness = json!({ "n": k, "sample": idx });
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-7, worst, witness))
    }));

    out
}
