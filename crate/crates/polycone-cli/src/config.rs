//! Run configuration shared by the binary and the suite runners.

use polycone::kset::default_k_tolerance;
use polycone::stiefel::Field;
use serde::Serialize;

/// Verification suite selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Every suite below, concatenated.
    All,
    /// Invariant pairing: covariance, exact inequalities, margins, flow.
    Qform,
    /// Cone samples stay outside the forbidden root locus.
    Nonintersect,
    /// Group equivariance of the curve, the representation, and the
    /// developing map.
    Equivariance,
    /// Gauge-curvature (self-duality) residual of the harmonic metric.
    Hitchin,
    /// Holonomy, parallel sections, and real-structure transport.
    Flatness,
    /// Full-rank margins of the tautological section's derivative.
    Transversality,
    /// Root clustering of developed forms, with optional CSV dumps.
    Roots,
    /// Frame-cone actions, basis change, and the fiber map.
    Stiefel,
    /// Exact inverse of the n = 2 root parametrization.
    N2,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Qform => "qform",
            Suite::Nonintersect => "nonintersect",
            Suite::Equivariance => "equivariance",
            Suite::Hitchin => "hitchin",
            Suite::Flatness => "flatness",
            Suite::Transversality => "transversality",
            Suite::Roots => "roots",
            Suite::Stiefel => "stiefel",
            Suite::N2 => "n2",
        }
    }
}

/// Which coefficient fields the sampled checks cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldChoice {
    R,
    C,
    Both,
}

impl FieldChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldChoice::R => "r",
            FieldChoice::C => "c",
            FieldChoice::Both => "both",
        }
    }

    /// The concrete fields to iterate over.
    pub fn fields(self) -> Vec<Field> {
        match self {
            FieldChoice::R => vec![Field::R],
            FieldChoice::C => vec![Field::C],
            FieldChoice::Both => vec![Field::R, Field::C],
        }
    }
}

/// Resolved configuration of a single run.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Half-rank parameter; polynomials have degree `2n - 1`.
    pub n: usize,
    pub field: FieldChoice,
    /// Number of samples for sampled checks; `0` skips them while the
    /// deterministic checks still run.
    pub samples: usize,
    pub seed: u64,
    /// Chordal root-clustering tolerance; `None` uses the n-dependent
    /// default.
    pub tol_cluster: Option<f64>,
    /// Chordal real-line tolerance; `None` uses the n-dependent default.
    pub tol_real: Option<f64>,
    /// Worker pool size; `None` keeps the global default.
    pub threads: Option<usize>,
}

impl SuiteConfig {
    pub fn tol_cluster_resolved(&self) -> f64 {
        self.tol_cluster.unwrap_or_else(|| default_k_tolerance(self.n))
    }

    pub fn tol_real_resolved(&self) -> f64 {
        self.tol_real.unwrap_or_else(|| default_k_tolerance(self.n))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            n: self.n,
            field: self.field.as_str().to_string(),
            samples: self.samples,
            seed: self.seed,
            tol_cluster: self.tol_cluster_resolved(),
            tol_real: self.tol_real_resolved(),
            threads: self.threads,
        }
    }
}

/// Configuration echo embedded in the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub field: String,
    pub samples: usize,
    pub seed: u64,
    pub tol_cluster: f64,
    pub tol_real: f64,
    pub threads: Option<usize>,
}
