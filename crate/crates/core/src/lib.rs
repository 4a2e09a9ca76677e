//! Deterministic simulator of a three-stage commutative-rotation key
//! exchange, extended with entangled-pair certificates issued by a trusted
//! authority, plus adversary models and a Monte-Carlo harness that measure
//! man-in-the-middle detection rates and eavesdropper disturbance.
//!
//! Module map:
//! - [`qsim`] — exact 1- and 2-qubit amplitude simulation, rotations, Born
//!   measurement, Bell pairs with collapse bookkeeping.
//! - [`three_stage`] — the exchange state machine over a tappable channel.
//! - [`cert`] — master keys, pair batches, certificate collapse, placement,
//!   and the XOR authenticity check.
//! - [`adversary`] — intercept-resend and session-splitting attacks.
//! - [`harness`] — seeded scenario runner with stable result records.

pub mod adversary;
pub mod bits;
pub mod cert;
pub mod error;
pub mod harness;
pub mod qsim;
pub mod rng;
pub mod three_stage;

pub use bits::BitString;
pub use error::{Error, Result};
pub use rng::RandomSource;
