//! Sender-optimal signaling for Bayesian persuasion when the receiver's
//! action probabilities are bounded by quotas.
//!
//! Everything is computed over exact rationals: a closed form for the
//! two-state case, an obedience LP for general finite instances, and a
//! brute-force grid oracle that evaluates every discretized scheme against
//! the receiver's quota-constrained best response.

pub mod binary;
pub mod catalog;
pub mod error;
pub mod lab;
pub mod linprog;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod response;
pub mod sender_lp;

pub use error::{Error, Result};
pub use rational::Rational;
