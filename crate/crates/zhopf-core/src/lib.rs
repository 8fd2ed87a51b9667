//! Zero-Hopf analysis of the oscillator
//!
//! ```text
//! x' = -nu (x^3 - mu x - y)
//! y' = -h z + k x - alpha y
//! z' = beta y
//! ```
//!
//! with coefficients that are polynomials in a small parameter `eps`.
//! The crate reduces the system to an averaging standard form, computes
//! averaged functions up to order four, predicts periodic orbits and tori
//! from them, and checks every prediction by integrating the full system.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod bifurcation;
pub mod coefficients;
mod error;
pub mod series;
pub mod standard_form;
pub mod verify;

pub use error::{Error, Result};
