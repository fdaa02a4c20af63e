//! Root-structure suite for developed forms: cluster partitions, limit
//! set clearance, and reconstruction from the reported clusters.  This
//! suite feeds `--dump-csv`.

use std::cmp::Ordering;

use polycone::devmap::{developing, fs_distance};
use polycone::hpoly::{real_root_multiplicity, reconstruct_from_report, sphere_roots};
use polycone::kset::{in_k, sample_k};
use polycone::stiefel::{sample_cone_prime, Field};
use polycone::{Error, C64};
use rayon::prelude::*;
use serde_json::json;

use crate::config::SuiteConfig;
use crate::csvout::{num, Table};
use crate::report::{cvec_json, finish_check, run_check, CheckOutcome, CheckRecord};

use super::{field_salt, field_tag, par_max, par_min, random_uh, scaled, stream_rng, SKIP_REAL_N1, SKIP_SAMPLED};

const SALT_SCAN: u64 = 0x71;
const SALT_RECON: u64 = 0x72;
const SALT_BOUNDARY: u64 = 0x73;

struct SampleOut {
    partition_ok: bool,
    ambiguous: bool,
    member: bool,
    slack: i64,
    z: (f64, f64),
    roots: Vec<Option<C64>>,
    err: Option<String>,
}

fn sorted_roots(mut roots: Vec<Option<C64>>) -> Vec<Option<C64>> {
    roots.sort_by(|a, b| match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal)),
    });
    roots
}

fn table_header(n: usize) -> Vec<String> {
    let mut h = vec!["field".to_string(), "sample".to_string()];
    for j in 0..2 * n {
        h.push(format!("t{j}_re"));
        h.push(format!("t{j}_im"));
    }
    h.push("z_re".to_string());
    h.push("z_im".to_string());
    for j in 1..2 * n {
        h.push(format!("root{j}_re"));
        h.push(format!("root{j}_im"));
    }
    h
}

pub fn checks(cfg: &SuiteConfig, want_csv: bool) -> (Vec<CheckRecord>, Option<Table>) {
    let n = cfg.n;
    let tol_cluster = cfg.tol_cluster_resolved();
    let tol_real = cfg.tol_real_resolved();
    let mut out = Vec::new();
    let mut table = want_csv.then(|| Table::new(table_header(n)));

    for field in cfg.field.fields() {
        let name = format!("roots/scan/{}", field_tag(field));
        if (field == Field::R && n == 1) || cfg.samples == 0 {
            let reason = if cfg.samples == 0 { SKIP_SAMPLED } else { SKIP_REAL_N1 };
            out.push(run_check(&name, || Ok(CheckOutcome::skip(reason))));
            continue;
        }
        // Sampling happens outside `run_check` so the CSV rows survive;
        // the clock starts before the scan so the record reflects it.
        let start = std::time::Instant::now();
        let scan = (|| -> Result<(Vec<Vec<C64>>, Vec<SampleOut>), Error> {
            let ts = sample_cone_prime(
                n,
                field,
                cfg.samples,
                cfg.seed.wrapping_add(SALT_SCAN + field_salt(field)),
            )?;
            let outs: Vec<SampleOut> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(cfg.seed, SALT_SCAN + field_salt(field), i as u64);
                    let z = random_uh(&mut rng);
                    let body = || -> Result<SampleOut, Error> {
                        let p = developing(&z, &ts[i], n)?;
                        let rep = real_root_multiplicity(&p, tol_cluster, tol_real)?;
                        let kr = in_k(&p, tol_cluster, tol_real)?;
                        let total: usize = rep.clusters.iter().map(|c| c.size).sum();
                        Ok(SampleOut {
                            partition_ok: total == 2 * n - 1,
                            ambiguous: kr.ambiguous,
                            member: kr.member,
                            slack: n as i64 - kr.mult as i64,
                            z: (z.x(), z.y()),
                            roots: sorted_roots(sphere_roots(&p)?),
                            err: None,
                        })
                    };
                    body().unwrap_or_else(|e| SampleOut {
                        partition_ok: false,
                        ambiguous: false,
                        member: false,
                        slack: i64::MIN,
                        z: (z.x(), z.y()),
                        roots: Vec::new(),
                        err: Some(e.to_string()),
                    })
                })
                .collect();
            Ok((ts, outs))
        })();
        match scan {
            Err(e) => {
                out.push(finish_check(&name, start, Err(e)));
            }
            Ok((ts, outs)) => {
                if let Some(t) = table.as_mut() {
                    for (i, o) in outs.iter().enumerate() {
                        let mut row = vec![field_tag(field).to_string(), i.to_string()];
                        for c in &ts[i] {
                            row.push(num(c.re));
                            row.push(num(c.im));
                        }
                        row.push(num(o.z.0));
                        row.push(num(o.z.1));
                        for j in 0..2 * n - 1 {
                            match o.roots.get(j).copied().flatten() {
                                Some(c) => {
                                    row.push(num(c.re));
                                    row.push(num(c.im));
                                }
                                None => {
                                    row.push(num(f64::INFINITY));
                                    row.push(num(0.0));
                                }
                            }
                        }
                        t.push(row);
                    }
                }
                let mut worst_slack = i64::MAX;
                let mut worst_idx = 0usize;
                let mut ok = true;
                for (i, o) in outs.iter().enumerate() {
                    if !o.partition_ok || o.ambiguous || o.member || o.err.is_some() {
                        ok = false;
                    }
                    if o.slack < worst_slack {
                        worst_slack = o.slack;
                        worst_idx = i;
                    }
                }
                ok &= worst_slack > 0;
                let o = &outs[worst_idx];
                let outcome = CheckOutcome::gate(
                    ok,
                    worst_slack as f64,
                    json!({
                        "t": cvec_json(&ts[worst_idx]),
                        "z": [o.z.0, o.z.1],
                        "error": o.err,
                    }),
                );
                out.push(finish_check(&name, start, Ok(outcome)));
            }
        }
    }

    for field in cfg.field.fields() {
        let name = format!("roots/reconstruct/{}", field_tag(field));
        out.push(run_check(&name, || {
            if field == Field::R && n == 1 {
                return Ok(CheckOutcome::skip(SKIP_REAL_N1));
            }
            if cfg.samples == 0 {
                return Ok(CheckOutcome::skip(SKIP_SAMPLED));
            }
            let count = scaled(cfg.samples, 10, 20, 1000);
            let ts = sample_cone_prime(
                n,
                field,
                count,
                cfg.seed.wrapping_add(SALT_RECON + field_salt(field)),
            )?;
            let distance = |i: usize| -> Result<f64, Error> {
                let mut rng = stream_rng(cfg.seed, SALT_RECON + field_salt(field), i as u64);
                let z = random_uh(&mut rng);
                let p = developing(&z, &ts[i], n)?;
                let rep = real_root_multiplicity(&p, tol_cluster, tol_real)?;
                let rebuilt = reconstruct_from_report(&rep, n)?;
                fs_distance(&p, &rebuilt)
            };
            let (worst, idx) = par_max(count, |i| distance(i).unwrap_or(f64::INFINITY))
                .expect("count > 0");
            Ok(CheckOutcome::gate(
                worst <= 1e-6,
                worst,
                json!({ "t": cvec_json(&ts[idx]) }),
            ))
        }));
    }

    out.push(run_check("roots/forbidden_detected", || {
        if cfg.samples == 0 {
            return Ok(CheckOutcome::skip(SKIP_SAMPLED));
        }
        let count = scaled(cfg.samples, 10, 20, 1000);
        let ks = sample_k(n, count, cfg.seed.wrapping_add(SALT_BOUNDARY))?;
        let (worst, idx) = par_min(count, |i| match in_k(&ks[i], tol_cluster, tol_real) {
            Ok(rep) if rep.member => rep.mult as f64 - n as f64,
            _ => f64::NEG_INFINITY,
        })
        .expect("count > 0");
        Ok(CheckOutcome::gate(
            worst >= 0.0,
            worst,
            json!({ "p_xy": cvec_json(ks[idx].coeffs()) }),
        ))
    }));

    (out, table)
}
