//! Semantically secure wiretap coding from seeded universal hashing.
//!
//! Layers, bottom up: [`gf`] field arithmetic, [`uhf`] the invertible hash
//! family, [`ecc`] block codes, [`channel`] channel models, [`codec`] the
//! end-to-end pipeline, [`leakage`] exact information measures, [`secrecy`]
//! rate planning and bounds, [`sim`] Monte Carlo harness.

pub mod gf;
pub mod leakage;
pub mod numeric;
pub mod uhf;
pub mod channel;
pub mod codec;
pub mod ecc;
pub mod rng;
pub mod secrecy;
pub mod sim;
