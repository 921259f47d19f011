//! Exact-arithmetic toolkit for normalized non-singular Fourier coefficients of
//! unitary Siegel–Eisenstein series over function fields.
//!
//! Everything here is exact: polynomials over arbitrary-precision integers,
//! rationals, finite-field and truncated-valuation-ring arithmetic, and finite
//! group characters. The library computes local and global density polynomials
//! in the variable `T = q^{-2s}`, extracts central derivatives of any order,
//! and ships the brute-force oracles (lattice representation counting,
//! submodule enumeration, Grassmannian point counts, hyperoctahedral character
//! sums) that every closed formula is checked against.
//!
//! Module map:
//! * [`poly`] — dense univariate integer polynomials, Gaussian binomials,
//!   central derivatives.
//! * [`partition`] — integer partitions (Jordan types).
//! * [`ff`] — finite fields `F_{p^e}` with table-driven arithmetic.
//! * [`truncring`] — truncated valuation rings `F[t]/(t^N)` with the inert
//!   (Frobenius) and split (swap) involutions.
//! * [`torsion`] — Hermitian torsion modules, submodule enumeration, isotropy,
//!   orthogonal complements, Jordan types.
//! * [`density`] — local Siegel series, global density polynomials, the
//!   self-dual closed form, counting oracles, functional-equation checks.
//! * [`springer`] — Frobenius trace polynomials of Springer-type sheaves and
//!   the Steinberg scalar.
//! * [`weyl`] — the hyperoctahedral group `W_d`, induced characters, and the
//!   graded character identities.
//! * [`siegelweil`] — global assembly: normalized coefficients, analytic
//!   values vs. geometric degrees, symmetry diagnostics.

pub mod density;
pub mod ff;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod siegelweil;
pub mod springer;
pub mod torsion;
pub mod truncring;
pub mod weyl;

pub use density::{DiagonalLattice, GlobalHermDatum, PlaceDatum, PlaceKind};
pub use partition::Partition;
pub use poly::IntPoly;
pub use rational::Rational;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds the prescribed length {length}")]
    DegreeExceedsLength { degree: i64, length: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("ring mismatch: operands belong to different rings")]
    RingMismatch,
    #[error("ramified local data are not supported")]
    UnsupportedRamified,
    #[error("{0} is not an odd prime")]
    NonOddPrime(u64),
    #[error("not a submodule of the ambient module")]
    NotASubmodule,
    #[error("internal consistency failure: non-integral logarithm ({0})")]
    NonIntegralLog(String),
    #[error("density ratio did not stabilize by truncation level {0}")]
    NotStabilized(usize),
    #[error("Steinberg stalk is zero on non-semisimple data")]
    NotSemisimple,
    #[error("subgroup block sizes do not sum to d")]
    BadBlockSizes,
    #[error("W_d identity has not been verified for d = {0}")]
    IdentityNotVerified(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration guards. Defaults are desk-scale; every guard scales linearly
/// with the `SWKIT_GUARD_SCALE` environment variable (a float multiplier).
#[derive(Debug, Clone, Copy)]
pub struct Guards {
    /// Largest partition size accepted by `enumerate_partitions`.
    pub max_partition_size: usize,
    /// Largest ring accepted by element enumeration.
    pub max_ring_elements: u64,
    /// Largest module accepted by submodule enumeration.
    pub max_module_elements: u64,
    /// Largest matrix search space for direct representation counting.
    pub max_rep_search: u64,
    /// Largest field accepted by the table-driven constructor.
    pub max_field_size: u64,
    /// Largest hyperoctahedral rank.
    pub max_weyl_rank: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_partition_size: 12,
            max_ring_elements: 10_000_000,
            max_module_elements: 1_000_000,
            max_rep_search: 100_000_000,
            max_field_size: 4096,
            max_weyl_rank: 6,
        }
    }
}

impl Guards {
    /// Default guards scaled by `SWKIT_GUARD_SCALE` when the variable is set.
    pub fn from_env() -> Self {
        let scale = std::env::var("SWKIT_GUARD_SCALE")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|s| s.is_finite() && *s > 0.0)
            .unwrap_or(1.0);
        Guards::default().scaled(scale)
    }

    /// Multiply every numeric guard by `scale`.
    pub fn scaled(self, scale: f64) -> Self {
        let mul_u64 = |v: u64| ((v as f64) * scale).max(1.0) as u64;
        let mul_usize = |v: usize| (((v as f64) * scale).max(1.0)) as usize;
        Guards {
            max_partition_size: mul_usize(self.max_partition_size),
            max_ring_elements: mul_u64(self.max_ring_elements),
            max_module_elements: mul_u64(self.max_module_elements),
            max_rep_search: mul_u64(self.max_rep_search),
            max_field_size: mul_u64(self.max_field_size),
            max_weyl_rank: mul_usize(self.max_weyl_rank),
        }
    }
}
