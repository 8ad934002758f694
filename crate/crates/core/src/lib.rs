//! Optimal double-barrier exercise of perpetual American options that can
//! only be exercised at the epochs of an independent Poisson process, for
//! spectrally one-sided jump diffusions with exponential-mixture jumps and a
//! negative discount rate.
//!
//! Start from [`put::PutEngine`] for puts and [`call::CallEngine`] for calls;
//! [`mc`] provides the Monte Carlo oracle used to cross-check every closed form.

// `!(a < b)` is used on purpose so NaN inputs fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod call;
pub mod cli;
pub mod config;
pub mod error;
pub mod expsum;
pub mod fluct;
pub mod mc;
pub mod model;
pub mod oracle;
pub mod pricer;
pub mod put;
pub mod scale;
pub mod solve;

pub use call::CallEngine;
pub use error::{Error, Result};
pub use model::{Jump, LevyModel, Side};
pub use put::{BarrierPair, OptionKind, PricingProblem, PutEngine};
