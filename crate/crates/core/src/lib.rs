//! Global minimizers of the unimodular power-sum problem
//!
//! ```text
//! inf_{|z_k| = 1} max_{ν = 1..n²−n} |z_1^ν + … + z_n^ν|
//! ```
//!
//! and their correspondence with perfect (planar) difference sets of order
//! `n − 1`.
//!
//! The crate is split into:
//!
//! - [`gf`]: exact arithmetic in `GF(p)`, `GF(p^k)` and cubic extensions of
//!   those, enough to run the Singer construction.
//! - [`pds`]: perfect difference sets: verification, Singer construction,
//!   canonical forms, exhaustive search and order-feasibility tests.
//! - [`powersum`]: power sums of unimodular tuples, the Fejér-kernel lower
//!   bound certificate, Newton-Girard coefficients, the Fabrykowski tuple and
//!   structure recovery from a minimizing tuple.
//! - [`minimax`]: multi-start numerical minimization of the max power sum.
//! - [`cli`]: the `powersum` command-line frontend.
//!
//! The numerical modules are generic over the scalar type ([`Real`], i.e.
//! `f32` or `f64`); the aliases below fix it to `f64`.

pub mod arith;
pub mod cli;
pub mod gf;
pub mod minimax;
pub mod pds;
pub mod powersum;
pub mod scalar;

pub use scalar::Real;

pub use gf::{CubicExtension, ExtElement, GfElement, GfError, GfField};
pub use pds::{
    CanonicalForm, FeasibilityReport, PdsError, PerfectDifferenceSet, SearchOutcome, Verdict,
    Witness,
};

/// `f64` unimodular tuple.
pub type Tuple = powersum::UnimodularTuple<f64>;
/// `f32` unimodular tuple.
pub type Tuple32 = powersum::UnimodularTuple<f32>;
/// `f64` power-sum profile.
pub type Profile = powersum::PowerSumProfile<f64>;
/// `f64` difference spectrum.
pub type Spectrum = powersum::DifferenceSpectrum<f64>;
/// `f64` structure recovery result.
pub type Recovery = powersum::RecoveryResult<f64>;
/// `f64` Fejér certificate.
pub type Certificate = powersum::FejerCertificate<f64>;
/// `f64` optimizer configuration.
pub type Config = minimax::OptimizerConfig<f64>;
/// `f64` optimizer report.
pub type Report = minimax::OptimizerReport<f64>;
