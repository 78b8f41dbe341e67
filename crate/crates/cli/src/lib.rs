//! Command-line laboratory for Hele-Shaw flow: experiment configuration,
//! artifact emitters and the acceptance checks behind `hsflow verify`.

pub mod config;
pub mod emit;
pub mod experiment;
pub mod field;
pub mod verify;
