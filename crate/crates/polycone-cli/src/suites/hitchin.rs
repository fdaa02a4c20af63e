//! Gauge-curvature suite: the harmonic-metric (self-duality) residual of
//! the Fuchsian pair vanishes identically, and perturbing the metric
//! exponents breaks it by a visible margin.

use polycone::higgsflat::{hitchin_residual, hitchin_residual_custom, HiggsData, UHPoint};
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{run_check, CheckOutcome, CheckRecord};

use super::{par_max, random_uh, stream_rng, SKIP_SAMPLED};

const SALT_RESIDUAL: u64 = 0x41;

/// Half-ranks covered by the base-point checks: the small cases plus the
/// configured one.
fn rank_list(n: usize) -> Vec<usize> {
    let mut list = vec![1, 2, n];
    list.sort_unstable();
    list.dedup();
    list
}

fn fixed_points() -> Vec<UHPoint> {
    [(0.0, 1.0), (0.3, 0.7), (-1.2, 2.5), (5.0, 0.05)]
        .iter()
        .map(|&(x, y)| UHPoint::new(x, y).expect("fixed half-plane points"))
        .collect()
}

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();

    out.push(run_check("hitchin/residual_base", || {
        let mut worst = 0.0f64;
        let mut at = (0usize, 0.0f64, 0.0f64);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            for z in fixed_points() {
                let r = hitchin_residual(&data, &z);
                if r > worst {
                    worst = r;
                    at = (k, z.x(), z.y());
                }
            }
        }
        Ok(CheckOutcome::gate(
            worst <= 1e-8,
            worst,
            json!({ "n": at.0, "z": [at.1, at.2] }),
        ))
    }));

    out.push(run_check("hitchin/residual", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let mut worst = 0.0f64;
        let mut witness = json!(null);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            let (value, idx) = par_max(cfg.samples, |i| {
                let mut rng = stream_rng(cfg.seed, SALT_RESIDUAL + k as u64, i as u64);
                let z = random_uh(&mut rng);
                hitchin_residual(&data, &z)
            })
            .expect("samples > 0");
            if value >= worst {
                worst = value;
                let mut rng = stream_rng(cfg.seed, SALT_RESIDUAL + k as u64, idx as u64);
                let z = random_uh(&mut rng);
                witness = json!({ "n": k, "z": [z.x(), z.y()] });
            }
        }
        Ok(CheckOutcome::gate(worst <= 1e-8, worst, witness))
    }));

    out.push(run_check("hitchin/negative_control", || {
        // Shifting one exponent leaves the residual identity badly
        // broken everywhere it is evaluated.
        let mut floor = f64::INFINITY;
        let mut at = (0usize, 0.0f64, 0.0f64);
        for &k in &rank_list(cfg.n) {
            let data = HiggsData::new(k)?;
            let mut bad = data.m_exponents();
            bad[0] += 2;
            for z in fixed_points() {
                let r = hitchin_residual_custom(k, &bad, &z)?;
                if r < floor {
                    floor = r;
                    at = (k, z.x(), z.y());
                }
            }
        }
        Ok(CheckOutcome::gate(
            floor > 1e-2,
            floor,
            json!({ "n": at.0, "z": [at.1, at.2] }),
        ))
    }));

    out
}
