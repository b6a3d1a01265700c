//! Verification suites, experiments and reporting for `dirac-beltrami`.

pub mod config;
pub mod experiments;
pub mod fields;
pub mod recipes;
pub mod report;
pub mod solve;
pub mod suites;
