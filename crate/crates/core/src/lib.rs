//! Computable objects around Zaremba's conjecture: alphabet-restricted
//! continued fractions and their denominator sets, the Hausdorff dimension of
//! the associated Cantor set, norm-window matrix ensembles, and exponential
//! sums over those ensembles together with the circle-method bookkeeping.

pub mod census;
pub mod cf;
pub mod dimension;
pub mod ensemble;
pub mod error;
pub mod expsum;
pub mod json;

pub use cf::{Alphabet, CfWord, Mat2};
pub use error::{Error, Result};
