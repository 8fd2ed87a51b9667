//! Command-line front end for `zhopf-core`: the bundled examples, sweeps and
//! CSV plot data.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod example;
pub mod fixtures;
pub mod sweep;
pub mod table;
