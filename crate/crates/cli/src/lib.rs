//! Command-line front end for the correlated-noise two-qubit engine: config
//! parsing, CSV output, figure generation and the verification suites.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod figures;
pub mod output;
pub mod run;
pub mod units;
pub mod verify;
