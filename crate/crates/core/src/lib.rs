//! Stochastic versions of the Arps decline curve.
//!
//! Two scalar linear SDEs share the Arps drift `-d0 Q / (1 + b d0 t)`:
//!
//! - constant volatility, `dQ = drift dt + sigma dB` (Gaussian, an
//!   Ornstein-Uhlenbeck process when `b = 0`);
//! - linear volatility, `dQ = drift dt + sigma Q dB` (lognormal, a geometric
//!   Brownian motion when `b = 0`).
//!
//! Both have the deterministic Arps curve as their mean. The crate provides
//! closed-form moments ([`decline`]), the special functions needed for
//! first-passage results ([`specfun`]), reproducible path simulation
//! ([`sim`]), first-passage-time estimators and comparisons ([`fpt`]) and the
//! command-line front end ([`cli`]).

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decline;
pub mod error;
pub mod fpt;
pub mod sim;
pub mod specfun;
pub mod stats;

pub use decline::{ArpsParams, ModelKind, MomentSummary};
pub use error::{Error, Result};
