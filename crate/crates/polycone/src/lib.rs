//! Numerical geometry of the degree-(2n-1) homogeneous-polynomial model of
//! SL(2,R) representations.
//!
//! The library works in the space of homogeneous polynomials of odd degree
//! 2n-1 in two variables, which carries the irreducible 2n-dimensional
//! representation of SL(2,R) by substitution. On top of that model it
//! provides:
//!
//! * [`hpoly`] — coefficient containers in the real (X,Y) and rotated (Z,W)
//!   variable pairs, evaluation, products, and root clustering with
//!   multiplicity on the Riemann sphere;
//! * [`slrep`] — the substitution action, its 2n-dimensional matrix form, the
//!   circle action, the infinitesimal action of the diagonal generator, and
//!   the block change of basis to paired real coordinates;
//! * [`stiefel`] — the cone of orthogonal equal-norm frames (v,w), its
//!   interleaved-coordinate sibling, group actions, projections to oriented
//!   planes and projective classes, and the fiber map onto symmetric 2x2
//!   matrices;
//! * [`kset`] — the forbidden set of polynomials with a real root of
//!   multiplicity at least n, the boundary curve of n-dimensional subspaces,
//!   and membership reports;
//! * [`qform`] — the invariant sesquilinear pairing, canonical weights, exact
//!   rational transversality certificates, cone sampling, and the
//!   monotone-flow / non-intersection checks;
//! * [`higgsflat`] — the Fuchsian flat connection on the upper half-plane in
//!   its holomorphic frame: connection matrices, numerical parallel
//!   transport, flatness and gauge-curvature residuals, the real structure,
//!   and the full-rank check for the tautological section's derivative;
//! * [`devmap`] — explicit parallel frames, transport in closed form, the
//!   developing map into polynomials at the base point i, its equivariance,
//!   and the exact root-parametrization inverse for n = 2.

pub mod devmap;
pub mod higgsflat;
pub mod hpoly;
pub mod kset;
pub mod qform;
pub mod slrep;
pub mod stiefel;

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Errors shared by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("polynomial is numerically zero")]
    ZeroPolynomial,
    #[error("matrix is not in the expected group (residual {residual:.3e})")]
    NotInGroup { residual: f64 },
    #[error("point fails the required constraint (residual {residual:.3e})")]
    ConstraintViolated { residual: f64 },
    #[error("basis mismatch: operands use different variable pairs")]
    BasisMismatch,
    #[error("{0}")]
    Invalid(String),
    #[error("eigenvalue computation failed to converge")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
