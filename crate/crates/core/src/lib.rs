//! Two-qubit dynamics under spatially correlated classical and quantum noise.
//!
//! Units: ħ = 1, times in µs, frequencies and rates in rad/µs.
//! Basis ordering is (↑↑, ↑↓, ↓↑, ↓↓) with ↑ the excited state.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod analytic;
pub mod dynamics;
pub mod entanglement;
pub mod noise;
mod quad;
pub mod rates;
pub mod specfun;

#[cfg(test)]
pub(crate) mod testutil;

pub use num_complex::Complex64;
