//! Reproduction harness for the inexact fixed-point experiments: config
//! parsing, parameter sweeps, table output and the acceptance checks.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod reference;
pub mod report;
pub mod runner;
