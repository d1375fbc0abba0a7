//! Numerical laboratory for weighted Bergman kernels and zeros of Gaussian
//! random polynomials in one complex variable.
//!
//! The crate builds orthonormal polynomial bases for norms of the form
//! `∫ |f|² e^{-2nφₙ} dV`, evaluates the associated Bergman kernel and its
//! diagonal / near-diagonal / off-diagonal behaviour, samples random
//! polynomials with iid complex Gaussian coefficients, and runs Monte-Carlo
//! ensembles of linear statistics of their zeros together with the
//! correlation-integral conditions that drive asymptotic normality.

pub mod bergman;
pub mod cltlab;
pub mod linalg;
pub mod orthobasis;
pub mod quadrature;
pub mod rng;
pub mod weights;
pub mod zerostats;

pub use num_complex::Complex64;

/// Errors surfaced by the numerical modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("finite-difference evaluation produced a non-finite value at {0}")]
    NonFinite(Complex64),
    #[error("operation requires a radial weight")]
    NotRadial,
    #[error("r·φ'(r) = {target} has no sign change on (0, {r_max}]")]
    NoBracketing { target: f64, r_max: f64 },
    #[error("hypothesis-check grid region is degenerate")]
    EmptyGrid,
    #[error("quadrature rule sizes invalid: n_radial={n_radial}, n_angular={n_angular}")]
    InvalidSize { n_radial: usize, n_angular: usize },
    #[error("growth condition not verified; tail certificate unavailable")]
    GrowthUnverified,
    #[error("tail integral diverges: n·ε must exceed 1 (n={n}, ε={epsilon})")]
    DivergentTail { n: usize, epsilon: f64 },
    #[error("Gram matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Gram matrix too ill-conditioned: estimate {0:.3e} exceeds 1e12")]
    IllConditioned(f64),
    #[error("kernel diagonal is non-positive; basis is corrupt")]
    DegenerateDiagonal,
    #[error("point {0} lies outside the bulk")]
    OutsideBulk(Complex64),
    #[error("normal frame invalid: {0}")]
    FrameInvalid(String),
    #[error("decay fit has {0} usable radii; at least 4 required")]
    InsufficientPoints(usize),
    #[error("polynomial is numerically zero")]
    ZeroPolynomial,
    #[error("root finding did not converge (Aberth and companion fallback both failed)")]
    NonConvergent,
    #[error("quadrature node within 1e-8 of a polynomial zero after jitter; resample")]
    NodeOnZero,
    #[error("test-function support is not contained in the bulk")]
    SupportOutsideBulk,
    #[error("ensemble variance is degenerate ({0:.3e})")]
    DegenerateVariance(f64),
    #[error("sample is degenerate (need ≥ 100 values with nonzero variance)")]
    DegenerateSample,
    #[error("ψ = ΔΦ/2π vanishes identically on the region")]
    ZeroPsi,
    #[error("n_list must contain at least {0} entries")]
    TooFewDegrees(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
