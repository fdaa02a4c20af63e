//! Transversality suite: the tautological section's derivative keeps a
//! positive smallest singular value over random cone points, the exact
//! concavity identity behind it holds in rational arithmetic, and
//! removing the off-diagonal field provably drops the rank.

use polycone::higgsflat::{
    subdiagonal_concavity_exact, tautological_jacobian, tautological_jacobian_probe, HiggsData, UHPoint,
};
use polycone::stiefel::{sample_cone_prime, Field};
use polycone::C64;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{cvec_json, run_check, CheckOutcome, CheckRecord};

use super::{field_salt, field_tag, par_min, random_uh, stream_rng, SKIP_REAL_N1, SKIP_SAMPLED};

const SALT_JAC: u64 = 0x61;

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let n = cfg.n;
    let mut out = Vec::new();

    out.push(run_check("transversality/concavity_exact", || {
        let top = 20usize.max(n).min(50);
        for k in 1..=top {
            subdiagonal_concavity_exact(k)?;
        }
        Ok(CheckOutcome::gate_exact(true))
    }));

    for field in cfg.field.fields() {
        let name = format!("transversality/jacobian/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let data = HiggsData::new(n)?;
            let ts = sample_cone_prime(
                n,
                field,
                cfg.samples,
                cfg.seed.wrapping_add(SALT_JAC + field_salt(field)),
            )?;
            let (worst, idx) = par_min(cfg.samples, |i| {
                let mut rng = stream_rng(cfg.seed, SALT_JAC + field_salt(field), i as u64);
                let z = random_uh(&mut rng);
                match tautological_jacobian(&data, field, &z, &ts[i]) {
                    Ok(rep) => rep.min_sv,
                    Err(_) => f64::NEG_INFINITY,
                }
            })
            .expect("samples > 0");
            let mut rng = stream_rng(cfg.seed, SALT_JAC + field_salt(field), idx as u64);
            let z = random_uh(&mut rng);
            Ok(CheckOutcome::gate(
                worst > 1e-6,
                worst,
                json!({ "z": [z.x(), z.y()], "t": cvec_json(&ts[idx]) }),
            ))
        }));
    }

    out.push(run_check("transversality/rank_drop_control", || {
        // With the nilpotent field removed, the derivative loses the
        // directions that close up the cone tangent: the margin must
        // collapse while the honest operator keeps a healthy one.
        let data = HiggsData::new(n.max(2))?;
        let d = data.rank();
        let mut t = vec![C64::new(0.0, 0.0); d];
        t[0] = C64::new(1.0, 0.0);
        let z = UHPoint::new(0.2, 1.3)?;
        let with = tautological_jacobian_probe(&data, Field::C, &z, &t, true)?;
        let without = tautological_jacobian_probe(&data, Field::C, &z, &t, false)?;
        let ok = with.min_sv > 1e-6 && without.min_sv <= 1e-10;
        Ok(CheckOutcome::gate(
            ok,
            without.min_sv,
            json!({ "with_field": with.min_sv, "without_field": without.min_sv }),
        ))
    }));

    out
}
