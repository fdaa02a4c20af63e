//! The verification suites.
//!
//! Every sampled check derives its randomness from the run seed and the
//! sample index through a fixed stream schedule, so results are
//! byte-identical across thread counts; parallel reductions break ties
//! by sample index.

mod equivariance;
mod flatness;
mod hitchin;
mod n2;
mod nonintersect;
mod qform;
mod roots;
mod stiefel;
mod transversality;

use nalgebra::DMatrix;
use polycone::higgsflat::UHPoint;
use polycone::slrep::{exp_sl2, SL2R};
use polycone::stiefel::Field;
use polycone::C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::{Suite, SuiteConfig};
use crate::csvout::Table;
use crate::report::SuiteReport;

/// Runs the configured suite (or all of them) and collects the report;
/// the roots suite contributes CSV rows when `want_csv` is set.
pub fn run_config(cfg: &SuiteConfig, want_csv: bool) -> (SuiteReport, Option<Table>) {
    let list: Vec<Suite> = match cfg.suite {
        Suite::All => vec![
            Suite::Qform,
            Suite::Nonintersect,
            Suite::Equivariance,
            Suite::Hitchin,
            Suite::Flatness,
            Suite::Transversality,
            Suite::Roots,
            Suite::Stiefel,
            Suite::N2,
        ],
        s => vec![s],
    };
    let mut checks = Vec::new();
    let mut csv = None;
    for s in list {
        match s {
            Suite::Qform => checks.extend(qform::checks(cfg)),
            Suite::Nonintersect => checks.extend(nonintersect::checks(cfg)),
            Suite::Equivariance => checks.extend(equivariance::checks(cfg)),
            Suite::Hitchin => checks.extend(hitchin::checks(cfg)),
            Suite::Flatness => checks.extend(flatness::checks(cfg)),
            Suite::Transversality => checks.extend(transversality::checks(cfg)),
            Suite::Roots => {
                let (recs, table) = roots::checks(cfg, want_csv);
                checks.extend(recs);
                if table.is_some() {
                    csv = table;
                }
            }
            Suite::Stiefel => checks.extend(stiefel::checks(cfg)),
            Suite::N2 => checks.extend(n2::checks(cfg)),
            Suite::All => unreachable!(),
        }
    }
    (SuiteReport::new(cfg, checks), csv)
}

/// Reason string for checks skipped because `--samples 0`.
pub(crate) const SKIP_SAMPLED: &str = "sampling disabled (--samples 0)";
/// Reason string for real-field checks at n = 1, where the real cone is
/// empty.
pub(crate) const SKIP_REAL_N1: &str = "the real cone is empty for n = 1";

pub(crate) fn field_tag(f: Field) -> &'static str {
    match f {
        Field::R => "r",
        Field::C => "c",
    }
}

/// Distinct salt contribution per field, so r/c streams never share.
pub(crate) fn field_salt(f: Field) -> u64 {
    match f {
        Field::R => 0x100,
        Field::C => 0x200,
    }
}

/// Deterministic per-sample RNG: one ChaCha stream per (check, index).
pub(crate) fn stream_rng(seed: u64, salt: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((salt << 40) ^ idx);
    rng
}

pub(crate) fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub(crate) fn gauss_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

pub(crate) fn gauss_cvec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| gauss_c64(rng)).collect()
}

pub(crate) fn gauss_rvec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| C64::new(gauss(rng), 0.0)).collect()
}

/// Random group element with moderate displacement.
pub(crate) fn random_sl2(rng: &mut ChaCha8Rng) -> SL2R {
    exp_sl2(
        rng.random_range(-0.8..0.8),
        rng.random_range(-0.8..0.8),
        rng.random_range(-0.8..0.8),
    )
}

/// Random base point away from the boundary.
pub(crate) fn random_uh(rng: &mut ChaCha8Rng) -> UHPoint {
    UHPoint::new(rng.random_range(-2.0..2.0), rng.random_range(0.2..3.0))
        .expect("coordinates lie in the half-plane")
}

/// Haar-like random unitary (or orthogonal, over R) matrix via QR.
pub(crate) fn random_unitary(rng: &mut ChaCha8Rng, n: usize, field: Field) -> DMatrix<C64> {
    let m = match field {
        Field::C => DMatrix::from_fn(n, n, |_, _| gauss_c64(rng)),
        Field::R => DMatrix::from_fn(n, n, |_, _| C64::new(gauss(rng), 0.0)),
    };
    m.qr().q()
}

/// Derived sample count for checks whose per-sample cost is much higher
/// than the suite baseline.
pub(crate) fn scaled(samples: usize, divisor: usize, lo: usize, hi: usize) -> usize {
    (samples / divisor).clamp(lo, hi)
}

/// Parallel argmax of `eval` over `0..count`; ties resolve to the
/// smallest index, so the result is reduction-order independent.
pub(crate) fn par_max<F>(count: usize, eval: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| (eval(i), i))
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
}

/// Parallel argmin of `eval` over `0..count`; ties resolve to the
/// smallest index.
pub(crate) fn par_min<F>(count: usize, eval: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| (eval(i), i))
        .reduce_with(|a, b| {
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
}

/// Maximal entry modulus, for residuals of matrix identities.
pub(crate) fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|a| a.norm()).fold(0.0, f64::max)
}
