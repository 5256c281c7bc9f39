//! Wildfire danger assessment.
//!
//! The crate chains four stages: the Canadian Fire Weather Index system
//! ([`fwi`]), a forward-pass CNN burn-scar classifier ([`cnn`]) applied to
//! tiles of aerial imagery ([`imaging`]), and a fusion rule ([`fusion`])
//! that turns both into a 0–5 danger level per tile. [`regress`] holds the
//! tabular regression harness used to study how well raw weather predicts
//! the moisture codes.

pub mod cli;
pub mod cnn;
pub mod config;
pub mod fusion;
pub mod fwi;
pub mod imaging;
pub mod regress;
pub mod render;
pub mod weather;
