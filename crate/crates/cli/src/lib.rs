//! Library surface of the command-line harness, exposed so integration
//! tests can drive the commands in-process.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod pipeline;
