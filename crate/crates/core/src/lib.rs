//! Beta random scaling of univariate distributions.
//!
//! If `Y ~ H` is independent of `B ~ beta(alpha, beta)`, the product `X = B Y`
//! has law `H_{alpha,beta}`. This crate evaluates that map through Weyl
//! fractional integrals, inverts it (explicitly and by a chain of
//! fractional-order steps), predicts the tails of `H_{alpha,beta}` in all three
//! max-domains of attraction, and implements the bivariate elliptical
//! conditional approximations together with the estimators built on them.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! evaluation and the command line live in the companion `betascale` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod distributions;
pub mod elliptical;
pub mod estimation;
pub mod fractional;
pub mod quadrature;
pub mod rng;
pub mod scaling;
pub mod special;
pub mod tails;

pub use distributions::{Distribution, Family, ScalingFunction, TabulatedCdf};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
pub use scaling::{IterationPlan, ScalingParams};
