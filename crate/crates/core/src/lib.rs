//! Diversity-multiplexing tradeoff (DMT) toolkit for MIMO links with
//! two-way training and feedback.
//!
//! The crate is split into six areas:
//!
//! * [`channel`]: Rayleigh block fading, MMSE training, power detection and
//!   the mismatched-decoding rate bound.
//! * [`dmt`]: closed-form tradeoff curves and their building blocks.
//! * [`oracle`]: numerical minimisation of outage exponents over the
//!   eigenvalue-exponent space.
//! * [`protocol`]: round-by-round simulation of every feedback scheme.
//! * [`montecarlo`]: outage estimation, confidence intervals, slope fits
//!   and transmit-power audits.
//! * [`io`]: results tables, run configuration files and transcript logs.

pub mod channel;
pub mod dmt;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
