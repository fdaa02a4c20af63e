//! Cone-avoids-forbidden-locus suite: every sampled cone member must be
//! an unambiguous non-member of the real-multiplicity-n root locus, and
//! the orbit map must keep clear of it with a positive margin.

use polycone::kset::in_k;
use polycone::qform::{default_lambda, nonintersect_check, sample_c_lambda};
use polycone::slrep::act;
use polycone::stiefel::Field;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::report::{cvec_json, run_check, CheckOutcome, CheckRecord};

use super::{field_salt, field_tag, par_min, random_sl2, scaled, stream_rng, SKIP_REAL_N1, SKIP_SAMPLED};

const SALT_SCAN: u64 = 0x21;
const SALT_ORBIT: u64 = 0x22;

pub fn checks(cfg: &SuiteConfig) -> Vec<CheckRecord> {
    let n = cfg.n;
    let lambda = default_lambda(n);
    let tol_cluster = cfg.tol_cluster_resolved();
    let tol_real = cfg.tol_real_resolved();
    let mut out = Vec::new();

    for field in cfg.field.fields() {
        let name = format!("nonintersect/scan/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let rep = nonintersect_check(
                &lambda,
                field,
                cfg.samples,
                cfg.seed.wrapping_add(SALT_SCAN + field_salt(field)),
                tol_cluster,
                tol_real,
            )?;
            Ok(CheckOutcome::gate(
                rep.pass,
                rep.min_mult_slack as f64,
                json!({
                    "worst_zw": cvec_json(&rep.worst_witness),
                    "ambiguous_count": rep.ambiguous_count,
                    "worst_cluster_gap": rep.worst_cluster_gap,
                }),
            ))
        }));
    }

    for field in cfg.field.fields() {
        let name = format!("nonintersect/orbit_probes/{}", field_tag(field));
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
                cfg.seed.wrapping_add(SALT_ORBIT + field_salt(field)),
            )?;
            // Slack of the translated sample: n minus the maximal real
            // multiplicity; membership or an ambiguous verdict sinks it.
            let slack = |i: usize| -> f64 {
                let mut rng = stream_rng(cfg.seed, SALT_ORBIT + field_salt(field), i as u64);
                let g = random_sl2(&mut rng);
                let moved = act(&g, &ps[i]);
                match in_k(&moved, tol_cluster, tol_real) {
                    Ok(rep) if !rep.member && !rep.ambiguous => n as f64 - rep.mult as f64,
                    _ => f64::NEG_INFINITY,
                }
            };
            let (worst, idx) = par_min(count, slack).expect("count > 0");
            Ok(CheckOutcome::gate(
                worst > 0.0,
                worst,
                json!({ "p_zw": cvec_json(ps[idx].coeffs()) }),
            ))
        }));
    }

    out
}
