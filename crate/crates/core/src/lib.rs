//! Coded shuffle schemes for distributed computing with pre-set data placement and reduce assignment.
//!
//! Loads are exact rationals normalized by QN. Both one-shot ([`osct`]) and few-shot ([`fsct`])
//! schemes are executed over GF(2^m) and decoded at every requester.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod fsct;
pub mod goldens;
pub mod instance;
pub mod oracles;
pub mod osct;
pub mod par;
pub mod payload;
pub mod report;
pub mod sets;
pub mod sweep;
pub mod transcript;

pub use algebra::Rational;
pub use analysis::IvCatalog;
pub use instance::{InstanceDescriptor, SystemInstance};
