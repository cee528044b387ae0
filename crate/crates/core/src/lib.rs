//! Exact inference for classical and quantum Bayesian nets.

pub mod catalog;
pub mod classical;
pub mod cli;
pub mod error;
pub mod fuzzy;
pub mod graph;
pub mod lattice;
pub mod net;
pub mod pathsum;
pub mod quantum;
pub mod spin;

pub use error::{Error, Result};
pub use net::{Assignment, CbNet, Complex, Net, QbNet};
