//! Test-side helpers and oracles. Nothing here calls into the model,
//! solver or validator code it is used to check.
#![allow(dead_code)]

pub mod build;
pub mod gen;
pub mod lpread;
pub mod miner;
pub mod oracle;
pub mod synth;
