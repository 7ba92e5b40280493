//! Exact and empirical machinery for the prime divisors of differences of
//! Fourier coefficients of two level-1 cusp eigenforms.
//!
//! The crate is split by subsystem:
//!
//! - [`qexp`]: exact big-integer q-expansions and the six one-dimensional
//!   level-1 eigenforms.
//! - [`arith`]: prime sieving, primality testing and factorization (ω, Ω).
//! - [`gl2count`]: counting in products of `GL_2(Z/ℓⁿZ)` with linked
//!   determinants, and the density δ of trace-equal pairs.
//! - [`richert`]: the weighted one-dimensional sieve function, its parameter
//!   families and the derived divisor-count bounds.
//! - [`lab`]: experiments over per-prime coefficient differences and report
//!   serialization.

pub mod arith;
pub mod error;
pub mod gl2count;
pub mod lab;
pub mod qexp;
pub mod richert;

pub use error::{Error, Result};

pub use arith::{Factorization, FactorConfig};
pub use gl2count::{DiscClass, ImageCounts, ImageParams};
pub use lab::{ExperimentReport, PrimeRecord, SignMode};
pub use qexp::{Eigenform, QSeries, SUPPORTED_WEIGHTS};
pub use richert::{BoundSet, SieveParams};

/// Version string stamped into reports and cache files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
