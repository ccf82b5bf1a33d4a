//! File formats, parallel Monte Carlo and the command-line front end for
//! [`lapratio_core`].

pub mod cli;
pub mod formats;
pub mod parallel;
pub mod selftest;
pub mod tables;
