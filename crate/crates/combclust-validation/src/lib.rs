//! Reference datasets the library is checked against, plus brute-force
//! oracles used by the acceptance run.
//!
//! Item numbers in the datasets are 1-based; helpers convert to
//! the library's 0-based indices.

pub mod data;
pub mod oracles;
