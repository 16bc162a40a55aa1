//! Certifying numerics for the dynamics of backward-shift operators on the
//! space of bounded complex sequences.
//!
//! Every vector handled here is an *eventually geometric* sequence: a finite
//! explicit head followed by a finite sum of binomial-times-geometric terms.
//! That class is closed under the shift, under polynomial symbols of the
//! shift, and under the bounded right inverses used to build preimage
//! chains, so all constructions stay exact up to floating-point rounding.
//!
//! Module map:
//!
//! * [`seq`] and [`tail`]: the sequence model, sup-norms, the `l∞/c₀`
//!   seminorm and `c₀` membership.
//! * [`symbol`]: polynomial and power-series symbols `a(B)` of the shift.
//! * [`solve`]: kernels, preimages, mixing chains and certificate transport.
//! * [`certificate`]: the mixing-certificate data type and its verifier.
//! * [`analytic`]: the `R·f(B)` pipeline for holomorphic symbols.
//! * [`obstruction`]: non-dense-range witnesses and spectral identities.
//! * [`product`]: the interleaved operator with a non-separable mixing set.
//! * [`exec`]: data-parallel batch execution with a sequential fallback.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod certificate;
pub mod circle;
mod error;
pub mod exec;
pub mod interval;
pub mod minimax;
pub mod obstruction;
pub mod product;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod seq;
pub mod solve;
pub mod symbol;
pub mod tail;

pub use certificate::{MixingCertificate, OperatorDescriptor};
pub use error::{Error, Result};
pub use interval::CertifiedInterval;
pub use scalar::C64;
pub use seq::GeomSequence;
pub use symbol::OperatorSymbol;
